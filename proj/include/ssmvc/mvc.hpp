#pragma once

#include "ssmvc/bincon.hpp"
#include "ssmvc/bv.hpp"
#include "ssmvc/core.hpp"
#include "ssmvc/vbb.hpp"

namespace ssmvc {

// Which branch of the result() chain produced the outcome.
enum class MvcBranch : std::uint8_t {
  NotReady,    // bcO unset or undecided
  BcFalse,     // binary consensus decided False
  BcError,     // binary consensus exhausted its rounds
  NormalValue, // n-2t deliveries of one value
  ConsTest,    // True never entered bvO.binValues() (transient-fault escape)
  Incomplete,  // tail bottom
};

struct MvcOutcome {
  DeliveryResult result;
  MvcBranch branch = MvcBranch::NotReady;
};

/**
 * Multivalued consensus object: one VBB stack covering all originators, the outer
 * BV object used by the consistency test, and the binary consensus object. All
 * queries are const; mutation happens in propose/tick/absorb/recycle only.
 */
class MvcState {
 public:
  void configure(NodeId self, const SystemParams& p, int alphabet, VbbEqPhase mode,
                 std::uint64_t coin_salt, int round_cap = kDefaultRoundCap);

  void propose(Value v);

  // Do-forever body.
  void tick();

  MvcOutcome result_full() const;
  DeliveryResult result() const { return result_full().result; }

  // >= n-t originators resolved (error outcomes count).
  bool mc_wait() const;
  // one value, no other, delivered from >= n-2t originators
  bool same_value() const;

  void absorb_brb(NodeId from, const BrbSection& s) { vbb_.absorb(from, s); }
  void absorb_bv(NodeId from, std::uint8_t lvl_false, std::uint8_t lvl_true) {
    bvo_.absorb(from, lvl_false, lvl_true, vbb_.th());
  }
  void absorb_bc(NodeId from, const BcSection& s) { bco_.absorb(from, s, vbb_.th()); }

  void fill_sections(std::uint8_t obj, std::vector<BrbSection>& brb, std::vector<BvSection>& bv,
                     std::vector<BcSection>& bc) const;

  void recycle();

  void serialize(std::vector<std::uint8_t>& out) const;

  VbbState& vbb() { return vbb_; }
  const VbbState& vbb() const { return vbb_; }
  BvInstance& bvo() { return bvo_; }
  const BvInstance& bvo() const { return bvo_; }
  BinConInstance& bco() { return bco_; }
  const BinConInstance& bco() const { return bco_; }

 private:
  NodeId self_ = 0;
  SystemParams p_;
  VbbState vbb_;
  BvInstance bvo_;
  BinConInstance bco_;
};

}  // namespace ssmvc
