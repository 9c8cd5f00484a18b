#include "ssmvc/vbb.hpp"

namespace ssmvc {

void VbbState::configure(NodeId self, const SystemParams& p, int alphabet, VbbEqPhase mode) {
  self_ = self;
  p_ = p;
  th_ = thresholds(p);
  alphabet_ = alphabet;
  mode_ = mode;
  for (int phs = 0; phs < 2; ++phs)
    for (int c = 0; c < p.n; ++c) brb_[phs][c].configure(self, static_cast<NodeId>(c), p.n);
}

void VbbState::vbb_broadcast(Value v) {
  instance(Phase::Init, self_).broadcast(BrbPayload::val(self_, v), th_);
}

void VbbState::tick() {
  // consistency rules run every iteration on every channel, so corruption heals
  // even where no fresh message arrives
  for (int phs = 0; phs < 2; ++phs)
    for (int c = 0; c < p_.n; ++c)
      if (brb_[phs][c].active()) brb_[phs][c].tick_stabilize(th_);

  BrbInstance& init_self = instance(Phase::Init, self_);
  BrbInstance& valid_self = instance(Phase::Valid, self_);
  if (valid_self.has_broadcast()) return;
  if (!vbb_wait(self_, Phase::Init) || !init_self.has_terminated(th_)) return;

  // Own INIT value is read back from the BRB object, never from a cached copy, so
  // the attestation waits for the self-delivery too.
  auto own = init_self.deliver(self_);
  if (!own) return;
  bool attested = own->body == Body::Val && own->data < alphabet_ &&
                  vbb_eq(self_, Phase::Init, own->data);
  valid_self.broadcast(BrbPayload::flag(self_, attested), th_);
}

bool VbbState::vbb_wait(NodeId, Phase phs) const {
  int c = 0;
  for (int l = 0; l < p_.n; ++l)
    if (chan(phs, static_cast<NodeId>(l))) ++c;
  return c >= th_.n_minus_t;
}

bool VbbState::vbb_eq(NodeId, Phase phs, Value v) const {
  int c = 0;
  for (int l = 0; l < p_.n; ++l) {
    auto d = chan(phs, static_cast<NodeId>(l));
    if (d && d->body == Body::Val && d->data == v) ++c;
  }
  return c >= th_.n_minus_2t;
}

bool VbbState::vbb_diff(NodeId, Phase phs, Value v) const {
  int c = 0;
  for (int l = 0; l < p_.n; ++l) {
    auto d = chan(phs, static_cast<NodeId>(l));
    if (d && !(d->body == Body::Val && d->data == v)) ++c;
  }
  return c >= th_.t_plus_1;
}

VbbOutcome VbbState::vbb_deliver(NodeId k) const {
  auto init_k = instance(Phase::Init, k).deliver(k);
  auto valid_k = instance(Phase::Valid, k).deliver(k);

  // (1) VALID encoded without INIT
  if (!init_k && valid_k) return {DeliveryResult::error(), VbbBranch::TestI};
  // (2) wait until both of k's channels delivered
  if (!init_k || !valid_k) return {DeliveryResult::pending(), VbbBranch::NotReady};
  // (3) payload attributed to someone else
  if (init_k->claimed != k || valid_k->claimed != k)
    return {DeliveryResult::error(), VbbBranch::TestII};
  // (4) INIT must carry (k, v in V), VALID must carry (k, boolean)
  if (init_k->body != Body::Val || init_k->data >= alphabet_ || valid_k->body != Body::Flag ||
      valid_k->data > 1)
    return {DeliveryResult::error(), VbbBranch::TestII};

  bool x = valid_k->data != 0;
  Value v = init_k->data;
  Phase eq_phase = mode_ == VbbEqPhase::Init ? Phase::Init : Phase::Valid;
  // (5) attested and re-attested here
  if (x && vbb_eq(k, eq_phase, v)) return {DeliveryResult::decided(v), VbbBranch::NormalValue};
  // (6) not attested and t+1 witnesses against
  if (!x && vbb_diff(k, eq_phase, v)) return {DeliveryResult::error(), VbbBranch::NormalDiff};
  // (7) enough VALID-phase deliveries, yet neither exit above fires
  if (vbb_wait(k, Phase::Valid)) return {DeliveryResult::error(), VbbBranch::TestIII};
  // (8) incomplete
  return {DeliveryResult::pending(), VbbBranch::NotReady};
}

void VbbState::absorb(NodeId from, const BrbSection& s) {
  if (s.column >= p_.n) return;
  brb_[static_cast<int>(s.phase)][s.column].absorb(from, s, th_);
}

void VbbState::fill_sections(std::uint8_t obj, std::vector<BrbSection>& out) const {
  for (int phs = 0; phs < 2; ++phs) {
    for (int c = 0; c < p_.n; ++c) {
      const BrbInstance& inst = brb_[phs][c];
      if (!inst.active()) continue;
      BrbSection s;
      s.obj = obj;
      s.phase = static_cast<Phase>(phs);
      s.column = static_cast<NodeId>(c);
      inst.fill_section(s);
      out.push_back(std::move(s));
    }
  }
}

void VbbState::recycle() {
  for (int phs = 0; phs < 2; ++phs)
    for (int c = 0; c < p_.n; ++c) brb_[phs][c].recycle();
}

void VbbState::serialize(std::vector<std::uint8_t>& out) const {
  for (int phs = 0; phs < 2; ++phs)
    for (int c = 0; c < p_.n; ++c) brb_[phs][c].serialize(out);
}

}  // namespace ssmvc
