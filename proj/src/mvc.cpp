#include "ssmvc/mvc.hpp"

namespace ssmvc {

void MvcState::configure(NodeId self, const SystemParams& p, int alphabet, VbbEqPhase mode,
                         std::uint64_t coin_salt, int round_cap) {
  self_ = self;
  p_ = p;
  vbb_.configure(self, p, alphabet, mode);
  bvo_.configure(self, p.n);
  bco_.configure(self, p.n, coin_salt, round_cap);
}

void MvcState::propose(Value v) { vbb_.vbb_broadcast(v); }

void MvcState::tick() {
  vbb_.tick();
  if (bvo_.active()) bvo_.tick_stabilize(vbb_.th());
  if (mc_wait()) {
    bool sv = same_value();
    if (!bco_.active()) bco_.propose(sv, vbb_.th());
    // re-asserted every iteration: the consistency test tracks what the node
    // currently attests, so stale or injected bits fade out
    bvo_.bv_broadcast_set(sv, vbb_.th());
  }
  bco_.progress(vbb_.th());
}

bool MvcState::mc_wait() const {
  int c = 0;
  for (int k = 0; k < p_.n; ++k)
    if (!vbb_.vbb_deliver(static_cast<NodeId>(k)).result.is_pending()) ++c;
  return c >= vbb_.th().n_minus_t;
}

bool MvcState::same_value() const {
  std::array<int, kMaxAlphabet> counts{};
  int distinct = 0, best = 0;
  for (int k = 0; k < p_.n; ++k) {
    auto r = vbb_.vbb_deliver(static_cast<NodeId>(k)).result;
    if (!r.is_decided()) continue;
    if (counts[r.value]++ == 0) ++distinct;
    best = std::max(best, counts[r.value]);
  }
  return distinct == 1 && best >= vbb_.th().n_minus_2t;
}

MvcOutcome MvcState::result_full() const {
  // (1) not ready to complete
  if (!bco_.active() || bco_.result().is_pending())
    return {DeliveryResult::pending(), MvcBranch::NotReady};

  DeliveryResult bc = bco_.result();
  // (2) the test was not passed by any correct node
  if (bc.is_decided() && bc.value == 0) return {DeliveryResult::error(), MvcBranch::BcFalse};
  // (2b) the binary object itself gave up
  if (bc.is_error()) return {DeliveryResult::error(), MvcBranch::BcError};

  // (3) some value delivered from n-2t originators
  std::array<int, kMaxAlphabet> counts{};
  for (int k = 0; k < p_.n; ++k) {
    auto r = vbb_.vbb_deliver(static_cast<NodeId>(k)).result;
    if (r.is_decided()) ++counts[r.value];
  }
  for (int v = 0; v < kMaxAlphabet; ++v)
    if (counts[v] >= vbb_.th().n_minus_2t)
      return {DeliveryResult::decided(static_cast<Value>(v)), MvcBranch::NormalValue};

  // (4) consistency test: n-t resolutions, yet no correct node ever attested True
  if (mc_wait() && !bvo_.contains(true))
    return {DeliveryResult::error(), MvcBranch::ConsTest};

  // (5) not ready to complete
  return {DeliveryResult::pending(), MvcBranch::Incomplete};
}

void MvcState::fill_sections(std::uint8_t obj, std::vector<BrbSection>& brb,
                             std::vector<BvSection>& bv, std::vector<BcSection>& bc) const {
  vbb_.fill_sections(obj, brb);
  if (bvo_.active()) {
    BvSection s;
    s.obj = obj;
    s.lvl_false = bvo_.level(false);
    s.lvl_true = bvo_.level(true);
    bv.push_back(s);
  }
  if (bco_.active()) {
    BcSection s;
    s.obj = obj;
    bco_.fill_section(s);
    bc.push_back(std::move(s));
  }
}

void MvcState::recycle() {
  vbb_.recycle();
  bvo_.recycle();
  bco_.recycle();
}

void MvcState::serialize(std::vector<std::uint8_t>& out) const {
  vbb_.serialize(out);
  bvo_.serialize(out);
  bco_.serialize(out);
}

}  // namespace ssmvc
