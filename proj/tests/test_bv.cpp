#include "doctest.h"
#include "ssmvc/bv.hpp"

using namespace ssmvc;

namespace {
constexpr SystemParams kP{4, 1, 8};
}

TEST_CASE("fresh instance delivers the empty set") {
  BvInstance b;
  b.configure(0, kP.n);
  CHECK(b.bin_values() == 0);
  CHECK(!b.contains(false));
  CHECK(!b.contains(true));
}

TEST_CASE("t receipts do not forward, t+1 do") {
  // at n=7, t=2 the forward (3) and delivery (5) bars are distinguishable
  SystemParams p7{7, 2, 8};
  auto th = thresholds(p7);
  BvInstance b;
  b.configure(0, p7.n);
  b.absorb(1, kBvNoLevel, 0, th);
  b.absorb(2, kBvNoLevel, 0, th);
  CHECK((b.mine() & kBvTrue) == 0);  // 2 = t, below threshold
  b.absorb(3, kBvNoLevel, 0, th);
  CHECK((b.mine() & kBvTrue) != 0);  // t+1 distinct receipts
  CHECK(b.bin_values() == 0);        // 4 holders, still below 2t+1 = 5
  b.absorb(4, kBvNoLevel, 0, th);
  CHECK(b.contains(true));
}

TEST_CASE("2t+1 distinct receipts deliver") {
  auto th = thresholds(kP);
  BvInstance b;
  b.configure(0, kP.n);
  b.absorb(1, kBvNoLevel, 0, th);
  b.absorb(2, kBvNoLevel, 0, th);
  // forwarding made it 3 distinct holders (1, 2, self) = 2t+1
  CHECK(b.contains(true));
  CHECK(!b.contains(false));
}

TEST_CASE("own broadcast counts as one distinct holder") {
  auto th = thresholds(kP);
  BvInstance b;
  b.configure(0, kP.n);
  b.bv_broadcast(false, th);
  CHECK((b.mine() & kBvFalse) != 0);
  b.absorb(1, 0, kBvNoLevel, th);
  CHECK(!b.contains(false));  // 2 < 2t+1
  b.absorb(3, 0, kBvNoLevel, th);
  CHECK(b.contains(false));
}

TEST_CASE("re-broadcast on the same object is harmless") {
  auto th = thresholds(kP);
  BvInstance b;
  b.configure(2, kP.n);
  b.bv_broadcast(true, th);
  std::vector<std::uint8_t> s1;
  b.serialize(s1);
  b.bv_broadcast(true, th);
  std::vector<std::uint8_t> s2;
  b.serialize(s2);
  CHECK(s1 == s2);
}

TEST_CASE("recycle clears to the initial state") {
  auto th = thresholds(kP);
  BvInstance fresh, b;
  fresh.configure(1, kP.n);
  b.configure(1, kP.n);
  b.bv_broadcast(true, th);
  b.absorb(0, 0, 0, th);
  b.absorb(2, kBvNoLevel, 0, th);
  CHECK(b.bin_values() != 0);
  b.recycle();
  std::vector<std::uint8_t> sb, sf;
  b.serialize(sb);
  fresh.serialize(sf);
  CHECK(sb == sf);
  CHECK(b.bin_values() == 0);
  b.recycle();  // idempotent
  std::vector<std::uint8_t> sb2;
  b.serialize(sb2);
  CHECK(sb2 == sf);
}

TEST_CASE("byzantine-only values never enter binValues") {
  // t nodes pushing False cannot reach the forward threshold at any correct node
  auto th = thresholds(kP);
  BvInstance b;
  b.configure(0, kP.n);
  b.bv_broadcast(true, th);
  b.absorb(3, 0, kBvNoLevel, th);  // the single byzantine node, repeatedly
  b.absorb(3, 0, kBvNoLevel, th);
  b.absorb(1, kBvNoLevel, 0, th);
  b.absorb(2, kBvNoLevel, 0, th);
  CHECK(b.contains(true));
  CHECK(!b.contains(false));
  CHECK((b.mine() & kBvFalse) == 0);
}
