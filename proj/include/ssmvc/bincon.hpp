#pragma once

#include <array>
#include <vector>

#include "ssmvc/bv.hpp"
#include "ssmvc/core.hpp"
#include "ssmvc/wire.hpp"

namespace ssmvc {

inline constexpr int kDefaultRoundCap = 64;

/**
 * Binary consensus in the Mostefaoui-Moumen-Raynal shape: per round, a BV-broadcast
 * of the current estimate, an AUX vote restricted to the round's binValues, and a
 * common coin. The coin is a deterministic function of (scenario seed, object,
 * round) shared by all nodes; tests may pin individual rounds.
 *
 * Safety never rests on the coin. The error symbol is produced only when the round
 * cap is exhausted, which the default coin cannot reach at desk scale.
 */
class BinConInstance {
 public:
  void configure(NodeId self, int n, std::uint64_t coin_salt, int round_cap = kDefaultRoundCap);

  // First proposal wins; later calls are ignored.
  void propose(bool b, const Thresholds& th);

  // Pending until a decision; then the decided boolean (as 0/1); Error on cap exhaustion.
  DeliveryResult result() const { return result_; }

  // Non-bottom object state: invoked, or carrying a (possibly injected) result.
  bool active() const { return round_ != 0 || !result_.is_pending(); }

  void absorb(NodeId from, const BcSection& s, const Thresholds& th);

  // Runs every enabled guard: AUX vote, round advance, decision, cap check.
  // Begins with the consistency rules, so corrupted results and votes heal.
  void progress(const Thresholds& th);

  void fill_section(BcSection& s) const;

  void recycle();

  void serialize(std::vector<std::uint8_t>& out) const;

  bool coin(int round) const;
  void override_coin(int round, bool value);  // test hook

  int current_round() const { return round_; }
  int round_cap() const { return round_cap_; }

  // fault-injection access
  std::uint16_t& round_slot() { return round_; }
  std::uint8_t& est_slot() { return est_; }
  DeliveryResult& result_slot() { return result_; }
  BvInstance& round_bv(int round) { return rounds_[round - 1].bv; }
  std::uint8_t& aux_slot(int round, NodeId i) { return rounds_[round - 1].aux_seen[i]; }
  std::uint8_t& my_aux_slot(int round) { return rounds_[round - 1].my_aux; }

 private:
  void stabilize(const Thresholds& th);

  struct Round {
    BvInstance bv;
    std::array<std::uint8_t, kMaxNodes> aux_seen{};  // 0 none, 1 False, 2 True
    std::uint8_t my_aux = 0;

    void recycle() {
      bv.recycle();
      aux_seen.fill(0);
      my_aux = 0;
    }
  };

  NodeId self_ = 0;
  int n_ = 0;
  std::uint64_t coin_salt_ = 0;
  int round_cap_ = kDefaultRoundCap;
  std::vector<std::int8_t> coin_override_;  // test-only, not protocol state

  std::uint16_t round_ = 0;  // 1-based; 0 = inactive
  std::uint8_t est_ = 0;
  DeliveryResult result_;
  std::vector<Round> rounds_;
  std::array<std::int8_t, kMaxNodes> decided_seen_;  // -1 none, else 0/1
};

}  // namespace ssmvc
