#include <stdexcept>

#include "doctest.h"
#include "ssmvc/core.hpp"

using namespace ssmvc;

namespace {

// brute-force count by direct enumeration, independent of the library path
int count_equal(Value v, const Multiset& rec) {
  int c = 0;
  for (const auto& e : rec.entries())
    if (!e.is_error && e.value == v) ++c;
  return c;
}

Multiset bag(std::initializer_list<int> vals) {
  // -1 encodes the error symbol
  Multiset m;
  NodeId id = 0;
  for (int v : vals) {
    if (v < 0) m.add_error(id++);
    else m.add(id++, static_cast<Value>(v));
  }
  return m;
}

}  // namespace

TEST_CASE("equal counts matching entries") {
  CHECK(equal(0, bag({0, 0, 1})) == 2);      // v=A, rec={A,A,B}
  CHECK(equal(0, bag({})) == 0);             // empty
  CHECK(equal(1, bag({0, 0, 1, -1})) == 1);  // error entry never equals a value
  CHECK(equal(1, bag({0, 0, 1, -1})) == count_equal(1, bag({0, 0, 1, -1})));
}

TEST_CASE("differ counts the complement including errors") {
  CHECK(differ(0, bag({0, 0, 1})) == 1);
  CHECK(differ(0, bag({1, -1, 2})) == 3);
  CHECK(differ(0, bag({0})) == 0);
}

TEST_CASE("equal + differ partition the multiset") {
  Rng rng(42);
  for (int it = 0; it < 200; ++it) {
    Multiset m;
    int sz = static_cast<int>(rng.below(12));
    for (int i = 0; i < sz; ++i) {
      if (rng.chance(0.2)) m.add_error(static_cast<NodeId>(i));
      else m.add(static_cast<NodeId>(i), static_cast<Value>(rng.below(4)));
    }
    for (Value v = 0; v < 4; ++v) CHECK(equal(v, m) + differ(v, m) == m.size());
  }
}

TEST_CASE("thresholds arithmetic and the re-attestation inequality") {
  auto th = thresholds({4, 1, 8});
  CHECK(th.n_minus_t == 3);
  CHECK(th.n_minus_2t == 2);
  CHECK(th.t_plus_1 == 2);

  th = thresholds({10, 3, 8});
  CHECK(th.n_minus_t == 7);
  CHECK(th.n_minus_2t == 4);
  CHECK(th.t_plus_1 == 4);

  CHECK_THROWS_AS(thresholds({3, 1, 8}), std::invalid_argument);

  for (int t = 0; t <= 5; ++t)
    for (int n = 3 * t + 1; n <= kMaxNodes; ++n) {
      auto x = thresholds({n, t, 1});
      CHECK(x.n_minus_2t >= x.t_plus_1);
    }
}

TEST_CASE("delivery result is exactly one variant and compares by value") {
  auto p = DeliveryResult::pending();
  auto e = DeliveryResult::error();
  auto d = DeliveryResult::decided(2);
  CHECK(p.is_pending());
  CHECK(!p.is_error());
  CHECK(e.is_error());
  CHECK(d.is_decided());
  CHECK(d == DeliveryResult::decided(2));
  CHECK(!(d == DeliveryResult::decided(1)));
  CHECK(!(d == e));
  CHECK(p == DeliveryResult::pending());
  CHECK(d.str() == "C");
  CHECK(e.str() == "ERR");
}

TEST_CASE("rng is deterministic and seed-sensitive") {
  Rng a(7), b(7), c(8);
  for (int i = 0; i < 64; ++i) CHECK(a.next() == b.next());
  bool differs = false;
  Rng a2(7);
  for (int i = 0; i < 64; ++i)
    if (a2.next() != c.next()) differs = true;
  CHECK(differs);
}
