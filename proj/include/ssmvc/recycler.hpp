#pragma once

#include "ssmvc/core.hpp"
#include "ssmvc/node.hpp"

namespace ssmvc {

/**
 * Simulator-level realization of the recycling contract: observe delivery across
 * correct nodes, and once every correct node has reported every object of the
 * batch, reset all protocol objects and the channels within a bounded window.
 * The paper assumes this mechanism; it is not a distributed protocol here.
 */
class Recycler {
 public:
  struct Options {
    int delta = 1;
    std::uint64_t window = 8;  // D: recycle executes within this many steps of arming
    std::uint64_t seed = 0;
  };

  void configure(const SystemParams& p, PeerMask correct, Options opt) {
    params_ = p;
    correct_ = correct;
    opt_ = opt;
    flags_.assign(static_cast<std::size_t>(p.n) * opt.delta, 0);
  }

  // Sticky wasDelivered() bookkeeping, driven by the harness's result() polls.
  void note_delivery(NodeId i, int obj) {
    flags_[static_cast<std::size_t>(i) * opt_.delta + obj] = 1;
  }
  bool was_delivered(NodeId i, int obj) const {
    return flags_[static_cast<std::size_t>(i) * opt_.delta + obj] != 0;
  }

  bool all_correct_delivered() const {
    for (int i = 0; i < params_.n; ++i) {
      if (!(correct_ & bit(static_cast<NodeId>(i)))) continue;
      for (int o = 0; o < opt_.delta; ++o)
        if (!was_delivered(static_cast<NodeId>(i), o)) return false;
    }
    return true;
  }

  // Called between steps. Returns true when the batch recycle executed.
  bool poll(ProtocolWorld& world);

  bool fired() const { return fired_; }
  std::uint64_t fired_step() const { return fired_step_; }

 private:
  SystemParams params_;
  PeerMask correct_ = 0;
  Options opt_;
  std::vector<std::uint8_t> flags_;
  bool armed_ = false;
  bool fired_ = false;
  std::uint64_t due_step_ = 0;
  std::uint64_t fired_step_ = 0;
};

}  // namespace ssmvc
