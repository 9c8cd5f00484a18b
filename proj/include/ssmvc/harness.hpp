#pragma once

#include <map>
#include <string>

#include "ssmvc/metrics.hpp"
#include "ssmvc/node.hpp"
#include "ssmvc/recycler.hpp"
#include "ssmvc/scenario.hpp"
#include "ssmvc/transport.hpp"

namespace ssmvc {

enum class Verdict : std::uint8_t { Pass, Fail, NA };

const char* verdict_name(Verdict v);

struct Report {
  std::string scenario;
  std::vector<std::string> final_results;        // per node, final epoch
  std::map<std::string, Verdict> verdicts;
  int rounds_to_decide = -1;        // CRWF, final epoch
  int cycles_to_stabilize = -1;     // ACAF, first epoch; -1 when not applicable
  int num_b = 1;                    // broadcasts per loop iteration used for ACAF
  bool recycled = false;
  bool stop_met = false;
  std::uint64_t steps = 0;
  LayerCounts counts;

  bool all_pass() const {
    for (const auto& [k, v] : verdicts)
      if (v == Verdict::Fail) return false;
    return true;
  }
  std::string to_text() const;
  std::string to_json() const;
};

struct RunArtifacts {
  Report report;
  Trace trace;
  std::vector<DeliveryResult> final_results;                    // per node, object 0
  std::vector<std::array<DeliveryResult, kMaxNodes>> final_vbb; // per node, object 0
};

// Wires all modules, runs the scenario to its stop condition, labels the trace and
// computes the report. Deterministic in (scenario, seed).
RunArtifacts run_scenario(const Scenario& sc);

// Recomputes every verdict from an exported trace alone (the check-trace path).
Report verdicts_from_trace(const Trace& t);

struct DiffResult {
  bool ok = true;
  int compared_nodes = 0;
  int mvc_mismatches = 0;
  int vbb_mismatches = 0;
  std::string detail;
};

// Runs the stack and the non-stabilizing reference on the same scenario and
// compares final outcomes node-for-node.
DiffResult differential_run(const Scenario& sc);

}  // namespace ssmvc
