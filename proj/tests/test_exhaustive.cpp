#include <deque>
#include <unordered_set>

#include "doctest.h"
#include "ssmvc/exhaustive.hpp"

using namespace ssmvc;
using namespace ssmvc::exhaustive;

TEST_CASE("brb: correct originator, every schedule keeps all five properties") {
  BrbSearchConfig cfg;
  cfg.byz_originator = false;
  cfg.max_depth = 10;  // the acceptance suite runs the deep version
  auto stats = search_brb(cfg);
  CHECK(stats.exhausted);
  CHECK(stats.violations == 0);
  CHECK(stats.visited > 100);
  CHECK(stats.liveness_failures == 0);
}

TEST_CASE("brb: byzantine originator equivocating over every pattern") {
  for (int pattern = 0; pattern < 8; ++pattern) {
    for (bool forge_ready : {false, true}) {
      BrbSearchConfig cfg;
      cfg.byz_originator = true;
      cfg.equivocation_pattern = pattern;
      cfg.forge_ready = forge_ready;
      cfg.max_depth = 10;
      auto stats = search_brb(cfg);
      INFO("pattern ", pattern, " forge_ready ", forge_ready);
      CHECK(stats.exhausted);
      CHECK(stats.violations == 0);
      CHECK(stats.liveness_failures == 0);
    }
  }
}

TEST_CASE("brb: a forging follower cannot fake the originator's message") {
  BrbSearchConfig cfg;
  cfg.byz_originator = false;
  cfg.forging_follower = true;
  cfg.max_depth = 10;
  auto stats = search_brb(cfg);
  CHECK(stats.exhausted);
  CHECK(stats.violations == 0);
  CHECK(stats.liveness_failures == 0);
}

TEST_CASE("bv: all three requirements over every schedule") {
  SUBCASE("unanimous true") {
    BvSearchConfig cfg;
    cfg.inputs = {1, 1, 1};
    auto stats = search_bv(cfg);
    CHECK(stats.exhausted);
    CHECK(stats.violations == 0);
    CHECK(stats.liveness_failures == 0);
  }
  SUBCASE("split inputs") {
    BvSearchConfig cfg;
    cfg.inputs = {1, 0, 1};
    auto stats = search_bv(cfg);
    CHECK(stats.exhausted);
    CHECK(stats.violations == 0);
    CHECK(stats.liveness_failures == 0);
  }
  SUBCASE("byzantine-only false") {
    BvSearchConfig cfg;
    cfg.inputs = {1, 1, 1};
    cfg.byz_pushes_false = true;
    auto stats = search_bv(cfg);
    CHECK(stats.exhausted);
    CHECK(stats.violations == 0);
    CHECK(stats.liveness_failures == 0);
  }
}

TEST_CASE("bincon: definition 3 over bounded-depth schedules") {
  for (std::uint64_t salt : {1ull, 2ull}) {
    SUBCASE("unanimous") {
      BcSearchConfig cfg;
      cfg.proposals = {1, 1, 1};
      cfg.salt = salt;
      cfg.max_depth = 7;
      auto stats = search_bc(cfg);
      CHECK(stats.violations == 0);
      CHECK(stats.liveness_failures == 0);
      CHECK(stats.visited > 100);
    }
    SUBCASE("split with a byzantine flipper") {
      BcSearchConfig cfg;
      cfg.proposals = {1, 0, 1};
      cfg.byz_flips = true;
      cfg.salt = salt;
      cfg.max_depth = 7;
      auto stats = search_bc(cfg);
      CHECK(stats.violations == 0);
      CHECK(stats.liveness_failures == 0);
    }
  }
}
