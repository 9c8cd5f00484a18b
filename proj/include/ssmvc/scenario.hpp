#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssmvc/core.hpp"
#include "ssmvc/node.hpp"
#include "ssmvc/transport.hpp"

namespace ssmvc {

enum class StopCond : std::uint8_t {
  AllDecided,      // every correct node's result() is non-bottom
  Recycled,        // the recycler fired
  Epoch2Decided,   // post-recycling invocation completed at every correct node
  Steps,           // run to max_steps
};

const char* stop_name(StopCond s);
std::optional<StopCond> stop_from(const std::string& s);

struct FaultSpec {
  bool enabled = false;
  std::uint64_t seed = 0;
  // ""/random = seeded corruption over the mask; otherwise a named targeted
  // corruption: bco-forced-true, valid-without-init, ghost-delivered
  std::string target = "random";
  double density = 0.15;
  std::vector<std::string> mask;  // path globs over mutable fields; empty = everything
  bool corrupt_channels = true;
};

struct Scenario {
  std::string name = "scenario";
  SystemParams params;
  int alphabet = 4;
  std::vector<Value> proposals;   // per node, epoch 1 (Byzantine slots are their cover values)
  std::vector<Value> proposals2;  // per node, epoch 2; empty = same as epoch 1
  PeerMask byzantine = 0;
  Strategy strategy = Strategy::Correct;
  Value byz_value = 0;
  std::uint64_t delay_until = 0;
  PolicyKind policy = PolicyKind::Fifo;
  PeerMask victims = 0;
  std::uint64_t until_step = 0;
  FaultSpec faults;
  int delta = 1;
  std::uint64_t recycle_window = 8;
  StopCond stop = StopCond::AllDecided;
  std::uint64_t max_steps = 200000;
  VbbEqPhase vbb_eq_phase = VbbEqPhase::Init;
  int round_cap = kDefaultRoundCap;
  std::uint64_t seed = 1;

  SchedulerPolicy scheduler() const { return {policy, victims, until_step}; }
  PeerMask correct_mask() const {
    PeerMask all = (PeerMask{1} << params.n) - 1;
    return all & ~byzantine;
  }
  void validate() const;  // throws std::invalid_argument
};

struct ScenarioParseError : std::runtime_error {
  int line;
  ScenarioParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);
std::string scenario_to_text(const Scenario& s);

// Seeded scenario families used by the acceptance suite and the batch runner.
Scenario make_closure_scenario(int n, std::uint64_t seed);       // fault-free start
Scenario make_convergence_scenario(int n, std::uint64_t seed);   // corrupted start + recycling
Scenario make_differential_scenario(int n, std::uint64_t seed);  // oracle comparison
Scenario make_unfair_scenario(int n, std::uint64_t seed);        // unfair-until-k policy

}  // namespace ssmvc
