#include "doctest.h"
#include "ssmvc/harness.hpp"

using namespace ssmvc;

namespace {

Scenario plain(int n, std::vector<Value> props, std::uint64_t seed) {
  Scenario sc;
  sc.params = {n, (n - 1) / 3, 8};
  sc.proposals = std::move(props);
  sc.alphabet = 4;
  sc.policy = PolicyKind::Fifo;
  sc.seed = seed;
  sc.stop = StopCond::AllDecided;
  sc.max_steps = 60000;
  return sc;
}

}  // namespace

TEST_CASE("fault-free unanimity decides the common value everywhere") {
  auto sc = plain(4, {1, 1, 1, 1}, 11);
  auto art = run_scenario(sc);
  REQUIRE(art.report.stop_met);
  for (int i = 0; i < 4; ++i) CHECK(art.final_results[i] == DeliveryResult::decided(1));
  CHECK(art.report.all_pass());
  CHECK(art.report.verdicts.at("BC-validity") == Verdict::Pass);
  CHECK(art.report.verdicts.at("Closure-soundness") == Verdict::Pass);
}

TEST_CASE("collusion on a byzantine-only value never wins") {
  auto sc = plain(4, {0, 1, 0, 3}, 12);
  sc.byzantine = bit(3);
  sc.strategy = Strategy::Collude;
  sc.byz_value = 3;
  auto art = run_scenario(sc);
  REQUIRE(art.report.stop_met);
  for (int i = 0; i < 3; ++i) {
    CHECK(!art.final_results[i].is_pending());
    CHECK(!(art.final_results[i] == DeliveryResult::decided(3)));
  }
  CHECK(art.report.verdicts.at("BC-no-intrusion") != Verdict::Fail);
  CHECK(art.report.verdicts.at("BC-agreement") == Verdict::Pass);
}

TEST_CASE("crash strategy leaves completion intact") {
  auto sc = plain(7, {2, 2, 2, 2, 2, 2, 2}, 13);
  sc.byzantine = bit(1) | bit(5);
  sc.strategy = Strategy::Crash;
  auto art = run_scenario(sc);
  REQUIRE(art.report.stop_met);
  CHECK(art.report.verdicts.at("BC-completion") == Verdict::Pass);
  CHECK(art.report.verdicts.at("BC-validity") == Verdict::Pass);
}

TEST_CASE("equivocation cannot split delivery") {
  auto sc = plain(4, {0, 0, 0, 0}, 14);
  sc.byzantine = bit(2);
  sc.strategy = Strategy::Equivocate;
  sc.byz_value = 1;
  auto art = run_scenario(sc);
  REQUIRE(art.report.stop_met);
  CHECK(art.report.verdicts.at("BRB-no-duplicity") == Verdict::Pass);
  CHECK(art.report.verdicts.at("VBB-uniformity") == Verdict::Pass);
  CHECK(art.report.verdicts.at("BC-validity") == Verdict::Pass);
}

TEST_CASE("replaying a seed yields a byte-identical trace") {
  auto sc = plain(4, {0, 1, 2, 0}, 15);
  sc.policy = PolicyKind::Random;
  auto a = run_scenario(sc);
  auto b = run_scenario(sc);
  CHECK(a.trace.render() == b.trace.render());
  sc.seed = 16;
  auto c = run_scenario(sc);
  CHECK(a.trace.render() != c.trace.render());
}

TEST_CASE("verdicts are recomputable from the exported trace alone") {
  auto sc = plain(4, {2, 2, 2, 2}, 17);
  auto art = run_scenario(sc);
  std::string text = art.trace.render();
  auto parsed = Trace::parse(text);
  REQUIRE(parsed.has_value());
  Report again = verdicts_from_trace(*parsed);
  CHECK(again.verdicts == art.report.verdicts);
  CHECK(again.rounds_to_decide == art.report.rounds_to_decide);
  CHECK(again.cycles_to_stabilize == art.report.cycles_to_stabilize);
}

TEST_CASE("negative fixture: an agreement violation is detected") {
  // hand-built trace in which two correct nodes decide different values
  Trace t;
  t.add_meta("name", "fixture-agreement");
  t.add_meta("n", "4");
  t.add_meta("t", "1");
  t.add_meta("capacity", "8");
  t.add_meta("alphabet", "4");
  t.add_meta("delta", "1");
  t.add_meta("byzantine", "0");
  t.add_meta("strategy", "correct");
  t.add_meta("policy", "fifo");
  t.add_meta("fair_from", "0");
  t.add_meta("proposals", "AABB");
  t.add_meta("seed", "1");
  t.add_meta("stop", "all-decided");
  t.add_meta("vbb_eq_phase", "init");
  auto decide = [&](NodeId node, Value v, std::uint64_t step) {
    t.add({step, -1, EventKind::Decide, node, 0,
           static_cast<std::uint8_t>(MvcBranch::NormalValue), 0, 0,
           pack_outcome(DeliveryResult::decided(v))});
  };
  decide(0, 0, 1);
  decide(1, 0, 2);
  decide(2, 1, 3);  // disagrees
  decide(3, 0, 4);
  Report rep = verdicts_from_trace(t);
  CHECK(rep.verdicts.at("BC-agreement") == Verdict::Fail);
}

TEST_CASE("negative fixture: duplicity and intrusion are detected") {
  Trace t;
  t.add_meta("name", "fixture-dup");
  t.add_meta("n", "4");
  t.add_meta("t", "1");
  t.add_meta("capacity", "8");
  t.add_meta("alphabet", "4");
  t.add_meta("delta", "1");
  t.add_meta("byzantine", "8");  // node 3
  t.add_meta("strategy", "collude-value");
  t.add_meta("policy", "fifo");
  t.add_meta("fair_from", "0");
  t.add_meta("proposals", "AAAD");
  t.add_meta("seed", "1");
  t.add_meta("stop", "all-decided");
  t.add_meta("vbb_eq_phase", "init");
  // nodes 0 and 1 BRB-deliver different payloads for the same channel
  auto brbdel = [&](NodeId node, std::uint64_t payload, std::uint64_t step) {
    t.add({step, -1, EventKind::BrbDeliver, node, 0, 0, 3, 0, payload});
  };
  brbdel(0, pack_payload(BrbPayload::val(3, 0)), 1);
  brbdel(1, pack_payload(BrbPayload::val(3, 1)), 2);
  // node 2 decides the byzantine-only value D
  t.add({3, -1, EventKind::Decide, 2, 0, static_cast<std::uint8_t>(MvcBranch::NormalValue), 0,
         0, pack_outcome(DeliveryResult::decided(3))});
  Report rep = verdicts_from_trace(t);
  CHECK(rep.verdicts.at("BRB-no-duplicity") == Verdict::Fail);
  CHECK(rep.verdicts.at("BC-no-intrusion") == Verdict::Fail);
}

TEST_CASE("negative fixture: closure detector flags a settled consistency test") {
  Trace t;
  t.add_meta("name", "fixture-closure");
  t.add_meta("n", "4");
  t.add_meta("t", "1");
  t.add_meta("capacity", "8");
  t.add_meta("alphabet", "4");
  t.add_meta("delta", "1");
  t.add_meta("byzantine", "0");
  t.add_meta("strategy", "correct");
  t.add_meta("policy", "fifo");
  t.add_meta("fair_from", "0");
  t.add_meta("proposals", "AAAA");
  t.add_meta("seed", "1");
  t.add_meta("stop", "all-decided");
  t.add_meta("vbb_eq_phase", "init");
  t.add({1, -1, EventKind::VbbDeliver, 0, 0, static_cast<std::uint8_t>(VbbBranch::TestIII), 2,
         0, pack_outcome(DeliveryResult::error())});
  Report rep = verdicts_from_trace(t);
  CHECK(rep.verdicts.at("Closure-soundness") == Verdict::Fail);
}

TEST_CASE("scenario knobs: unfair-then-fair policy still completes") {
  auto sc = plain(4, {3, 3, 3, 3}, 19);
  sc.policy = PolicyKind::UnfairThenFair;
  sc.victims = bit(1);
  sc.until_step = 400;
  sc.max_steps = 80000;
  auto art = run_scenario(sc);
  REQUIRE(art.report.stop_met);
  CHECK(art.report.verdicts.at("BC-validity") == Verdict::Pass);
  // cycles are only counted from the fair suffix
  for (const auto& e : art.trace.events)
    if (e.step < 400) CHECK(e.cycle == -1);
}

TEST_CASE("delay-maximal byzantine nodes cannot block completion") {
  auto sc = plain(4, {2, 2, 2, 2}, 20);
  sc.byzantine = bit(0);
  sc.strategy = Strategy::DelayMax;
  sc.delay_until = 2000;
  auto art = run_scenario(sc);
  REQUIRE(art.report.stop_met);
  CHECK(art.report.verdicts.at("BC-completion") == Verdict::Pass);
}

TEST_CASE("the valid-as-written mode diverges and the suite reports it") {
  auto sc = plain(4, {1, 1, 1, 1}, 21);
  sc.vbb_eq_phase = VbbEqPhase::ValidAsWritten;
  sc.max_steps = 4000;  // it cannot settle; bound the run
  auto art = run_scenario(sc);
  CHECK(!art.report.stop_met);  // branch 5 never fires as written
  auto dr = differential_run(sc);
  CHECK(!dr.ok);  // divergence against the non-stabilizing reference, reported
}
