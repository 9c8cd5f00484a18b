#pragma once

#include <array>

#include "ssmvc/bincon.hpp"
#include "ssmvc/brb.hpp"
#include "ssmvc/core.hpp"
#include "ssmvc/node.hpp"

namespace ssmvc {

enum class OracleMode : std::uint8_t { VbbOnly, Mvc };

/**
 * Reference node running the non-stabilizing algorithms: validated broadcast with
 * blocking waits realized as guard-enabled transitions, and the reduction that
 * proposes sameValue() to binary consensus once n-t deliveries arrived. Shares the
 * reliable-broadcast and binary-consensus machinery with the stack under test; the
 * differential target is the layer logic above them.
 *
 * Not self-stabilizing, never fault-injected.
 */
class OracleNode {
 public:
  OracleNode(const NodeConfig& cfg, OracleMode mode);

  NodeId id() const { return cfg_.id; }
  bool tick_enabled(std::uint64_t) const { return cfg_.strategy != Strategy::Crash; }

  std::vector<Message> tick(std::uint64_t step, Rng& rng);
  void on_message(const Message& m, std::uint64_t step);

  // Per-sender VBB delivery map (bottom where the task has not completed).
  DeliveryResult vbb_delivered(NodeId j) const { return delivered_[j]; }
  // Final consensus outcome (Mvc mode).
  DeliveryResult decision() const { return decision_; }

 private:
  Multiset rec() const;  // multiset of BRB-delivered INIT values
  int init_delivered_count() const;
  void drive(std::uint64_t step);

  NodeConfig cfg_;
  OracleMode mode_;
  Thresholds th_;
  std::array<std::array<BrbInstance, kMaxNodes>, 2> brb_;
  std::array<DeliveryResult, kMaxNodes> delivered_;
  bool valid_sent_ = false;
  bool bc_proposed_ = false;
  BinConInstance bco_;
  DeliveryResult decision_;
};

using OracleWorld = World<OracleNode>;

}  // namespace ssmvc
