#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ssmvc/harness.hpp"

namespace fs = std::filesystem;
using namespace ssmvc;

namespace {

int run_one(const std::string& path, std::optional<std::uint64_t> seed,
            const std::string& trace_out, const std::string& report_out,
            std::optional<std::uint64_t> max_steps, bool quiet) {
  Scenario sc;
  try {
    sc = load_scenario_file(path);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << "\n";
    return 2;
  }
  if (seed) sc.seed = *seed;
  if (max_steps) sc.max_steps = *max_steps;

  RunArtifacts art = run_scenario(sc);
  if (!trace_out.empty()) {
    std::ofstream f(trace_out);
    f << art.trace.render();
  }
  if (!report_out.empty()) {
    std::ofstream f(report_out);
    f << art.report.to_json();
  }
  if (!quiet) std::cout << art.report.to_text();
  return art.report.all_pass() && art.report.stop_met ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-stabilizing Byzantine multivalued consensus simulator"};
  app.require_subcommand(1);

  std::string scenario_path, trace_out, report_out, dir, trace_in;
  std::optional<std::uint64_t> seed, max_steps;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "run one scenario file");
  run->add_option("scenario", scenario_path, "scenario file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--max-steps", max_steps, "override the step budget");
  run->add_option("--trace", trace_out, "write the trace here");
  run->add_option("--report", report_out, "write the JSON report here");
  run->add_flag("--quiet", quiet, "suppress the text report");

  auto* batch = app.add_subcommand("batch", "run every .scenario file in a directory");
  batch->add_option("dir", dir, "scenario directory")->required();

  auto* check = app.add_subcommand("check-trace", "recompute verdicts from a trace");
  check->add_option("trace", trace_in, "trace file")->required();

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_one(scenario_path, seed, trace_out, report_out, max_steps, quiet);

  if (batch->parsed()) {
    int failures = 0, count = 0;
    std::vector<fs::path> files;
    for (const auto& ent : fs::directory_iterator(dir))
      if (ent.path().extension() == ".scenario") files.push_back(ent.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
      ++count;
      int rc = run_one(p.string(), std::nullopt, "", "", std::nullopt, true);
      std::cout << (rc == 0 ? "PASS " : "FAIL ") << p.filename().string() << "\n";
      if (rc != 0) ++failures;
    }
    std::cout << count - failures << "/" << count << " scenarios passed\n";
    return failures ? 1 : 0;
  }

  if (check->parsed()) {
    std::ifstream f(trace_in);
    if (!f) {
      std::cerr << "cannot open " << trace_in << "\n";
      return 2;
    }
    std::ostringstream os;
    os << f.rdbuf();
    auto tr = Trace::parse(os.str());
    if (!tr) {
      std::cerr << "malformed trace\n";
      return 2;
    }
    Report rep = verdicts_from_trace(*tr);
    std::cout << rep.to_text();
    return rep.all_pass() ? 0 : 1;
  }
  return 0;
}
