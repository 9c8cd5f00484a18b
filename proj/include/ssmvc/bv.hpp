#pragma once

#include <algorithm>
#include <array>
#include <vector>

#include "ssmvc/core.hpp"

namespace ssmvc {

inline constexpr std::uint8_t kBvFalse = 1;
inline constexpr std::uint8_t kBvTrue = 2;
inline constexpr std::uint8_t kBvNoLevel = 0xff;

inline std::uint8_t bv_bit(bool b) { return b ? kBvTrue : kBvFalse; }

/**
 * All-to-all binary-values broadcast. A value is forwarded once backed by t+1
 * distinct holders and delivered at 2t+1 holders.
 *
 * Claims are stratified: an assertion is level 0, and a forward sits one level
 * above the (t+1)-lowest supporting claim, capped at the node count. Forwards and
 * the delivered set are re-derived from the records on every change, records
 * follow the peers' streams, and the caller re-asserts its own attestation each
 * iteration. A corrupted forward ring with no live assertion under it therefore
 * climbs its own levels past the cap and dies, while any legitimately grounded
 * cascade is a fixed point. Byzantine nodes alone stay below the t+1 bar.
 */
class BvInstance {
 public:
  void configure(NodeId self, int n) {
    self_ = self;
    n_ = n;
  }

  // Adds b to the assertion set (a round estimate is asserted cumulatively).
  void bv_broadcast(bool b, const Thresholds& th) {
    bcast_ |= bv_bit(b);
    amplify(th);
  }

  // Replaces the assertion set with exactly {b}: the caller re-asserts its current
  // attestation each iteration, and stale bits from an arbitrary start fade out.
  void bv_broadcast_set(bool b, const Thresholds& th) {
    bcast_ = bv_bit(b);
    amplify(th);
  }

  // Current delivered set; empty before any quorum.
  std::uint8_t bin_values() const { return bin_values_; }
  bool contains(bool b) const { return bin_values_ & bv_bit(b); }

  // Claim level per value for the wire: 0 asserts, higher levels forward.
  std::uint8_t level(bool b) const {
    if (bcast_ & bv_bit(b)) return 0;
    return fwd_lvl_[b ? 1 : 0];
  }
  std::uint8_t bcast() const { return bcast_; }
  // Values this node vouches for at any level.
  std::uint8_t mine() const {
    std::uint8_t m = bcast_;
    if (fwd_lvl_[0] != kBvNoLevel) m |= kBvFalse;
    if (fwd_lvl_[1] != kBvNoLevel) m |= kBvTrue;
    return m;
  }

  void absorb(NodeId from, std::uint8_t lvl_false, std::uint8_t lvl_true,
              const Thresholds& th) {
    if (from != self_) {
      seen_[from][0] = lvl_false;
      seen_[from][1] = lvl_true;
    }
    amplify(th);
  }

  // Do-forever hook so injected local corruption heals on a quiet object.
  void tick_stabilize(const Thresholds& th) { amplify(th); }

  bool active() const {
    if (bcast_ || bin_values_ || fwd_lvl_[0] != kBvNoLevel || fwd_lvl_[1] != kBvNoLevel)
      return true;
    for (int i = 0; i < n_; ++i)
      if (seen_[i][0] != kBvNoLevel || seen_[i][1] != kBvNoLevel) return true;
    return false;
  }

  void recycle() {
    bcast_ = 0;
    fwd_lvl_[0] = fwd_lvl_[1] = kBvNoLevel;
    bin_values_ = 0;
    for (auto& s : seen_) s = {kBvNoLevel, kBvNoLevel};
  }

  void serialize(std::vector<std::uint8_t>& out) const {
    out.push_back(bcast_);
    out.push_back(fwd_lvl_[0]);
    out.push_back(fwd_lvl_[1]);
    out.push_back(bin_values_);
    for (int i = 0; i < n_; ++i) {
      out.push_back(seen_[i][0]);
      out.push_back(seen_[i][1]);
    }
  }

  std::uint8_t& mine_slot() { return bcast_; }
  std::uint8_t& bin_values_slot() { return bin_values_; }
  std::uint8_t& seen_slot(NodeId i, bool b) { return seen_[i][b ? 1 : 0]; }
  bool seen_any(NodeId i) const {
    return seen_[i][0] != kBvNoLevel || seen_[i][1] != kBvNoLevel;
  }

 private:
  void amplify(const Thresholds& th) {
    for (int v = 0; v < 2; ++v) {
      // supporting levels from peers, plus the own assertion
      std::array<std::uint8_t, kMaxNodes + 1> lv;
      int c = 0;
      if (bcast_ & bv_bit(v != 0)) lv[c++] = 0;
      for (int i = 0; i < n_; ++i)
        if (i != self_ && seen_[i][v] != kBvNoLevel) lv[c++] = seen_[i][v];
      std::sort(lv.begin(), lv.begin() + c);
      std::uint8_t fl = kBvNoLevel;
      if (c >= th.t_plus_1) {
        int base = lv[th.t_plus_1 - 1];
        if (base + 1 <= n_) fl = static_cast<std::uint8_t>(base + 1);
      }
      fwd_lvl_[v] = fl;
    }
    std::uint8_t bins = 0;
    for (int v = 0; v < 2; ++v) {
      int c = (bcast_ & bv_bit(v != 0)) || fwd_lvl_[v] != kBvNoLevel ? 1 : 0;
      for (int i = 0; i < n_; ++i)
        if (i != self_ && seen_[i][v] != kBvNoLevel) ++c;
      if (c >= th.two_t_plus_1) bins |= bv_bit(v != 0);
    }
    bin_values_ = bins;
  }

  NodeId self_ = 0;
  int n_ = 0;
  std::uint8_t bcast_ = 0;  // values this node asserted itself
  std::array<std::uint8_t, 2> fwd_lvl_{kBvNoLevel, kBvNoLevel};  // derived forward levels
  std::uint8_t bin_values_ = 0;                                  // derived delivered set
  std::array<std::array<std::uint8_t, 2>, kMaxNodes> seen_{};    // per-peer claim levels

 public:
  BvInstance() {
    for (auto& s : seen_) s = {kBvNoLevel, kBvNoLevel};
  }
};

}  // namespace ssmvc
