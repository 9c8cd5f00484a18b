#pragma once

#include <array>
#include <vector>

#include "ssmvc/brb.hpp"
#include "ssmvc/core.hpp"
#include "ssmvc/wire.hpp"

namespace ssmvc {

// Which phase's payload values the re-attestation counts in vbbDeliver branches
// (5)/(6). Init matches the non-stabilizing algorithm's rec multiset; ValidAsWritten
// reproduces the transformed pseudocode literally (see the differential suite).
enum class VbbEqPhase : std::uint8_t { Init, ValidAsWritten };

// Which branch of the vbbDeliver chain produced the outcome. TestI/TestII/TestIII
// are the consistency tests; NormalValue/NormalDiff are the two legitimate exits.
enum class VbbBranch : std::uint8_t {
  NotReady,     // branch (2) or (8)
  TestI,        // VALID encoded without INIT
  TestII,       // ill-formatted BRB payload (branches (3) and (4))
  NormalValue,  // branch (5)
  NormalDiff,   // branch (6)
  TestIII,      // branch (7) fallback
};

struct VbbOutcome {
  DeliveryResult result;
  VbbBranch branch = VbbBranch::NotReady;
};

/**
 * Validated Byzantine broadcast over a 2 x n array of reliable-broadcast channels:
 * brb[phase][column] carries column's INIT, resp. VALID message. The do-forever body
 * moves the own channel from INIT to VALID once the INIT round is attested, and
 * vbbDeliver runs the consistency-test chain. All queries are const.
 */
class VbbState {
 public:
  void configure(NodeId self, const SystemParams& p, int alphabet, VbbEqPhase mode);

  void vbb_broadcast(Value v);

  // Do-forever body: INIT->VALID transition when the guard holds.
  void tick();

  VbbOutcome vbb_deliver(NodeId k) const;

  // >= n-t distinct senders' phase-phs broadcasts delivered here.
  bool vbb_wait(NodeId k, Phase phs) const;
  // >= n-2t distinct senders delivered payloads whose value component equals v.
  bool vbb_eq(NodeId k, Phase phs, Value v) const;
  // >= t+1 distinct senders delivered payloads differing from v.
  bool vbb_diff(NodeId k, Phase phs, Value v) const;

  void absorb(NodeId from, const BrbSection& s);

  void fill_sections(std::uint8_t obj, std::vector<BrbSection>& out) const;

  void recycle();

  void serialize(std::vector<std::uint8_t>& out) const;

  BrbInstance& instance(Phase phs, NodeId column) {
    return brb_[static_cast<int>(phs)][column];
  }
  const BrbInstance& instance(Phase phs, NodeId column) const {
    return brb_[static_cast<int>(phs)][column];
  }

  const Thresholds& th() const { return th_; }
  int alphabet() const { return alphabet_; }

 private:
  // value of sender l's phase-phs broadcast, nullopt while undelivered
  std::optional<BrbPayload> chan(Phase phs, NodeId l) const {
    return brb_[static_cast<int>(phs)][l].deliver(l);
  }

  NodeId self_ = 0;
  SystemParams p_;
  Thresholds th_{};
  int alphabet_ = 4;
  VbbEqPhase mode_ = VbbEqPhase::Init;
  std::array<std::array<BrbInstance, kMaxNodes>, 2> brb_;
};

}  // namespace ssmvc
