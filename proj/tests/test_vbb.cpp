#include "doctest.h"
#include "ssmvc/vbb.hpp"

using namespace ssmvc;

namespace {

constexpr SystemParams kP{4, 1, 8};

VbbState make(NodeId self = 0, VbbEqPhase mode = VbbEqPhase::Init) {
  VbbState v;
  v.configure(self, kP, 4, mode);
  return v;
}

// force sender l's phase broadcast to be delivered at this replica, with the
// ready records a real delivery leaves behind
void put(VbbState& v, Phase phs, NodeId l, BrbPayload p) {
  auto& inst = v.instance(phs, l);
  inst.delivered_slot() = p;
  for (NodeId peer = 0; peer < 3; ++peer) {
    inst.ready_slot(peer) = p;
    inst.fresh_mask() |= bit(peer);
  }
}

void put_val(VbbState& v, Phase phs, NodeId l, Value x) {
  put(v, phs, l, BrbPayload::val(l, x));
}

std::vector<std::uint8_t> bytes(const VbbState& v) {
  std::vector<std::uint8_t> out;
  v.serialize(out);
  return out;
}

}  // namespace

TEST_CASE("vbbWait counts distinct delivered senders against n-t") {
  auto v = make();
  CHECK(!v.vbb_wait(0, Phase::Init));  // fresh state
  put_val(v, Phase::Init, 0, 0);
  put_val(v, Phase::Init, 1, 1);
  CHECK(!v.vbb_wait(0, Phase::Init));  // 2 < 3
  put_val(v, Phase::Init, 2, 0);
  CHECK(v.vbb_wait(0, Phase::Init));  // 3 = n-t
}

TEST_CASE("vbbEq needs n-2t equal value components") {
  auto v = make();
  put_val(v, Phase::Init, 0, 0);
  CHECK(!v.vbb_eq(0, Phase::Init, 0));  // 1 < 2
  put_val(v, Phase::Init, 2, 0);
  CHECK(v.vbb_eq(0, Phase::Init, 0));  // 2 = n-2t
  put_val(v, Phase::Init, 3, 1);
  CHECK(v.vbb_eq(0, Phase::Init, 0));
  CHECK(!v.vbb_eq(0, Phase::Init, 1));  // mixed {A,A,B}: true for A only
}

TEST_CASE("vbbDiff needs t+1 differing deliveries") {
  auto v = make();
  put_val(v, Phase::Init, 0, 0);
  put_val(v, Phase::Init, 1, 1);
  put_val(v, Phase::Init, 2, 2);
  CHECK(v.vbb_diff(0, Phase::Init, 0));  // {A,B,C}: 2 differ from A
  auto w = make();
  put_val(w, Phase::Init, 0, 0);
  put_val(w, Phase::Init, 1, 0);
  put_val(w, Phase::Init, 2, 0);
  CHECK(!w.vbb_diff(0, Phase::Init, 0));  // {A,A,A}
  auto u = make();
  put_val(u, Phase::Init, 0, 0);
  put_val(u, Phase::Init, 1, 1);
  CHECK(!u.vbb_diff(0, Phase::Init, 0));  // {A,B}: only one differs
}

TEST_CASE("junk payloads count as different, never as equal") {
  auto v = make();
  put(v, Phase::Init, 0, BrbPayload::junk(0, 0xaa));
  put(v, Phase::Init, 1, BrbPayload::flag(1, true));
  CHECK(!v.vbb_eq(0, Phase::Init, 0));
  CHECK(v.vbb_diff(0, Phase::Init, 0));  // 2 non-values differ from A
}

TEST_CASE("vbbDeliver branch chain on sender k") {
  const NodeId k = 2;

  SUBCASE("test I: VALID without INIT") {
    auto v = make();
    put(v, Phase::Valid, k, BrbPayload::flag(k, true));
    auto oc = v.vbb_deliver(k);
    CHECK(oc.result.is_error());
    CHECK(oc.branch == VbbBranch::TestI);
  }
  SUBCASE("both bottom is pending") {
    auto v = make();
    CHECK(v.vbb_deliver(k).result.is_pending());
    CHECK(v.vbb_deliver(k).branch == VbbBranch::NotReady);
  }
  SUBCASE("INIT delivered, VALID missing is pending") {
    auto v = make();
    put_val(v, Phase::Init, k, 1);
    CHECK(v.vbb_deliver(k).result.is_pending());
  }
  SUBCASE("test II: wrong claimed id in either phase") {
    auto v = make();
    put(v, Phase::Init, k, BrbPayload::val(1, 0));  // (j,.) with j != k
    put(v, Phase::Valid, k, BrbPayload::flag(k, true));
    auto oc = v.vbb_deliver(k);
    CHECK(oc.result.is_error());
    CHECK(oc.branch == VbbBranch::TestII);
  }
  SUBCASE("test II: INIT value outside V or VALID not boolean") {
    auto v = make();
    put(v, Phase::Init, k, BrbPayload::val(k, 9));  // alphabet is 4
    put(v, Phase::Valid, k, BrbPayload::flag(k, true));
    CHECK(v.vbb_deliver(k).branch == VbbBranch::TestII);

    auto w = make();
    put_val(w, Phase::Init, k, 1);
    put(w, Phase::Valid, k, BrbPayload::val(k, 1));  // value where boolean belongs
    CHECK(w.vbb_deliver(k).branch == VbbBranch::TestII);
  }
  SUBCASE("branch 5: attested and re-attested value") {
    // INIT (k,A); VALID (k,true); two senders' INIT deliveries carry A
    auto v = make();
    put_val(v, Phase::Init, k, 0);
    put(v, Phase::Valid, k, BrbPayload::flag(k, true));
    put_val(v, Phase::Init, 0, 0);
    auto oc = v.vbb_deliver(k);
    CHECK(oc.result == DeliveryResult::decided(0));
    CHECK(oc.branch == VbbBranch::NormalValue);
  }
  SUBCASE("branch 6: unattested with t+1 witnesses against") {
    auto v = make();
    put_val(v, Phase::Init, k, 0);
    put(v, Phase::Valid, k, BrbPayload::flag(k, false));
    put_val(v, Phase::Init, 0, 1);
    put_val(v, Phase::Init, 1, 2);
    auto oc = v.vbb_deliver(k);
    CHECK(oc.result.is_error());
    CHECK(oc.branch == VbbBranch::NormalDiff);
  }
  SUBCASE("test III: n-t VALID deliveries but no exit fires") {
    auto v = make();
    put_val(v, Phase::Init, k, 0);
    put(v, Phase::Valid, k, BrbPayload::flag(k, true));  // attested, but only 1 INIT matches
    put(v, Phase::Valid, 0, BrbPayload::flag(0, true));
    put(v, Phase::Valid, 1, BrbPayload::flag(1, true));
    auto oc = v.vbb_deliver(k);
    CHECK(oc.result.is_error());
    CHECK(oc.branch == VbbBranch::TestIII);
  }
  SUBCASE("incomplete tail stays pending") {
    auto v = make();
    put_val(v, Phase::Init, k, 0);
    put(v, Phase::Valid, k, BrbPayload::flag(k, true));
    CHECK(v.vbb_deliver(k).result.is_pending());
  }
}

TEST_CASE("branch evaluation order: test I wins over format tests") {
  auto v = make();
  put(v, Phase::Valid, 2, BrbPayload::val(1, 9));  // malformed AND missing INIT
  CHECK(v.vbb_deliver(2).branch == VbbBranch::TestI);
}

TEST_CASE("brute force: branch 5 outcome over all delivery subsets") {
  // spec-style check: whenever VALID=(k,true) and INIT=(k,v), the value is returned
  // exactly when >= n-2t senders' INIT values equal v
  const NodeId k = 3;
  for (int mask = 0; mask < 8; ++mask) {      // which of senders 0..2 delivered INIT
    for (int vals = 0; vals < 27; ++vals) {   // their values in {A,B,C}
      auto v = make();
      put_val(v, Phase::Init, k, 0);
      put(v, Phase::Valid, k, BrbPayload::flag(k, true));
      int x = vals;
      int matches = 1;  // k's own INIT carries A
      for (int l = 0; l < 3; ++l, x /= 3) {
        if (!(mask & (1 << l))) continue;
        put_val(v, Phase::Init, static_cast<NodeId>(l), static_cast<Value>(x % 3));
        if (x % 3 == 0) ++matches;
      }
      auto oc = v.vbb_deliver(k);
      if (matches >= 2) {
        CHECK(oc.result == DeliveryResult::decided(0));
      } else {
        CHECK(!(oc.result == DeliveryResult::decided(0)));
      }
    }
  }
}

TEST_CASE("the as-written VALID mode never matches boolean payloads") {
  auto v = make(0, VbbEqPhase::ValidAsWritten);
  put_val(v, Phase::Init, 2, 0);
  put(v, Phase::Valid, 2, BrbPayload::flag(2, true));
  put_val(v, Phase::Init, 0, 0);
  put_val(v, Phase::Init, 1, 0);
  // in Init mode this is branch 5; as-written it falls through
  CHECK(v.vbb_deliver(2).result.is_pending());
  put(v, Phase::Valid, 0, BrbPayload::flag(0, true));
  put(v, Phase::Valid, 1, BrbPayload::flag(1, true));
  CHECK(v.vbb_deliver(2).branch == VbbBranch::TestIII);
}

TEST_CASE("queries leave the state bit-identical") {
  auto v = make();
  put_val(v, Phase::Init, 0, 0);
  put(v, Phase::Valid, 0, BrbPayload::flag(0, true));
  put_val(v, Phase::Init, 1, 0);
  auto before = bytes(v);
  for (int k = 0; k < 4; ++k) {
    (void)v.vbb_deliver(static_cast<NodeId>(k));
    (void)v.vbb_wait(static_cast<NodeId>(k), Phase::Init);
    (void)v.vbb_eq(static_cast<NodeId>(k), Phase::Init, 0);
    (void)v.vbb_diff(static_cast<NodeId>(k), Phase::Valid, 1);
  }
  CHECK(bytes(v) == before);
}

TEST_CASE("tick broadcasts VALID only after the guard holds") {
  auto th = thresholds(kP);
  auto v = make(0);
  v.vbb_broadcast(1);  // INIT (0,B)
  v.tick();
  CHECK(!v.instance(Phase::Valid, 0).has_broadcast());  // guard false

  // three INIT diagonals + self delivery + termination acks
  put_val(v, Phase::Init, 0, 1);
  put_val(v, Phase::Init, 1, 1);
  put_val(v, Phase::Init, 2, 2);
  v.tick();
  CHECK(!v.instance(Phase::Valid, 0).has_broadcast());  // no acks yet
  BrbSection done;
  done.ready = BrbPayload::val(0, 1);  // an acknowledging peer also holds a ready
  done.done = true;
  for (NodeId l : {1, 2, 3}) v.instance(Phase::Init, 0).absorb(l, done, th);
  v.tick();
  REQUIRE(v.instance(Phase::Valid, 0).has_broadcast());
  // own value B matched by sender 1 only plus self = 2 >= n-2t: attested
  CHECK(*v.instance(Phase::Valid, 0).own() == BrbPayload::flag(0, true));
}

TEST_CASE("tick attests false when the own value lacks support") {
  auto th = thresholds(kP);
  auto v = make(0);
  v.vbb_broadcast(3);
  put_val(v, Phase::Init, 0, 3);
  put_val(v, Phase::Init, 1, 1);
  put_val(v, Phase::Init, 2, 2);
  BrbSection done;
  done.ready = BrbPayload::val(0, 3);
  done.done = true;
  for (NodeId l : {1, 2, 3}) v.instance(Phase::Init, 0).absorb(l, done, th);
  v.tick();
  REQUIRE(v.instance(Phase::Valid, 0).has_broadcast());
  CHECK(*v.instance(Phase::Valid, 0).own() == BrbPayload::flag(0, false));
}

TEST_CASE("recycle resets all 2n channels to bottom") {
  auto v = make(1);
  auto fresh = make(1);
  v.vbb_broadcast(2);
  put_val(v, Phase::Init, 0, 0);
  put(v, Phase::Valid, 3, BrbPayload::flag(3, false));
  CHECK(bytes(v) != bytes(fresh));
  v.recycle();
  CHECK(bytes(v) == bytes(fresh));
  for (int k = 0; k < 4; ++k) CHECK(v.vbb_deliver(static_cast<NodeId>(k)).result.is_pending());
  v.recycle();
  CHECK(bytes(v) == bytes(fresh));
}
