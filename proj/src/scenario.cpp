#include "ssmvc/scenario.hpp"

#include <fstream>
#include <sstream>

namespace ssmvc {

const char* stop_name(StopCond s) {
  switch (s) {
    case StopCond::AllDecided: return "all-decided";
    case StopCond::Recycled: return "recycled";
    case StopCond::Epoch2Decided: return "epoch2-decided";
    case StopCond::Steps: return "steps";
  }
  return "?";
}

std::optional<StopCond> stop_from(const std::string& s) {
  if (s == "all-decided") return StopCond::AllDecided;
  if (s == "recycled") return StopCond::Recycled;
  if (s == "epoch2-decided") return StopCond::Epoch2Decided;
  if (s == "steps") return StopCond::Steps;
  return std::nullopt;
}

void Scenario::validate() const {
  if (!params.valid()) throw std::invalid_argument("params: need n >= 3t+1, capacity >= 1");
  if (alphabet < 2 || alphabet > kMaxAlphabet) throw std::invalid_argument("alphabet out of range");
  if (static_cast<int>(proposals.size()) != params.n)
    throw std::invalid_argument("proposals must cover every node");
  for (Value v : proposals)
    if (v >= alphabet) throw std::invalid_argument("proposal outside the alphabet");
  if (popcount(byzantine) > params.t)
    throw std::invalid_argument("byzantine set larger than t");
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
  if (delta < 1) throw std::invalid_argument("delta must be positive");
}

namespace {

struct Cursor {
  std::istringstream in;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

Value parse_value(const std::string& s, int line) {
  std::string v = trim(s);
  if (v.size() == 1 && v[0] >= 'A' && v[0] <= 'Z') return static_cast<Value>(v[0] - 'A');
  try {
    return static_cast<Value>(std::stoi(v));
  } catch (...) {
    throw ScenarioParseError(line, "bad value '" + v + "'");
  }
}

PeerMask parse_id_list(const std::string& s, int line) {
  PeerMask m = 0;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    try {
      int id = std::stoi(tok);
      if (id < 0 || id >= kMaxNodes) throw ScenarioParseError(line, "node id out of range");
      m |= bit(static_cast<NodeId>(id));
    } catch (const ScenarioParseError&) {
      throw;
    } catch (...) {
      throw ScenarioParseError(line, "bad node id '" + tok + "'");
    }
  }
  return m;
}

std::uint64_t parse_u64(const std::string& s, int line) {
  try {
    return std::stoull(trim(s));
  } catch (...) {
    throw ScenarioParseError(line, "bad number '" + s + "'");
  }
}

double parse_double(const std::string& s, int line) {
  try {
    return std::stod(trim(s));
  } catch (...) {
    throw ScenarioParseError(line, "bad number '" + s + "'");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  sc.proposals.clear();
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  std::optional<Value> default_prop, default_prop2;
  std::vector<std::pair<int, Value>> props, props2;

  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ScenarioParseError(line, "unterminated section header");
      section = s.substr(1, s.size() - 2);
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ScenarioParseError(line, "expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string val = trim(s.substr(eq + 1));

    if (section == "params") {
      if (key == "n") sc.params.n = static_cast<int>(parse_u64(val, line));
      else if (key == "t") sc.params.t = static_cast<int>(parse_u64(val, line));
      else if (key == "capacity") sc.params.capacity = static_cast<int>(parse_u64(val, line));
      else if (key == "alphabet") sc.alphabet = static_cast<int>(parse_u64(val, line));
      else throw ScenarioParseError(line, "unknown params key '" + key + "'");
    } else if (section == "proposals" || section == "proposals2") {
      auto& defs = section == "proposals" ? default_prop : default_prop2;
      auto& list = section == "proposals" ? props : props2;
      if (key == "default") defs = parse_value(val, line);
      else if (key.rfind("node", 0) == 0)
        list.emplace_back(std::stoi(key.substr(4)), parse_value(val, line));
      else throw ScenarioParseError(line, "unknown proposals key '" + key + "'");
    } else if (section == "byzantine") {
      if (key == "nodes") sc.byzantine = parse_id_list(val, line);
      else if (key == "strategy") {
        auto st = strategy_from(val);
        if (!st) throw ScenarioParseError(line, "unknown strategy '" + val + "'");
        sc.strategy = *st;
      } else if (key == "value") sc.byz_value = parse_value(val, line);
      else if (key == "delay_until") sc.delay_until = parse_u64(val, line);
      else throw ScenarioParseError(line, "unknown byzantine key '" + key + "'");
    } else if (section == "scheduler") {
      if (key == "policy") {
        auto p = policy_from(val);
        if (!p) throw ScenarioParseError(line, "unknown policy '" + val + "'");
        sc.policy = *p;
      } else if (key == "seed") sc.seed = parse_u64(val, line);
      else if (key == "victims") sc.victims = parse_id_list(val, line);
      else if (key == "until_step") sc.until_step = parse_u64(val, line);
      else throw ScenarioParseError(line, "unknown scheduler key '" + key + "'");
    } else if (section == "faults") {
      sc.faults.enabled = true;
      if (key == "seed") sc.faults.seed = parse_u64(val, line);
      else if (key == "target") sc.faults.target = val;
      else if (key == "density") sc.faults.density = parse_double(val, line);
      else if (key == "channels") sc.faults.corrupt_channels = (val == "true" || val == "1");
      else if (key == "mask") {
        std::istringstream ms(val);
        std::string tok;
        while (std::getline(ms, tok, ',')) {
          tok = trim(tok);
          if (!tok.empty()) sc.faults.mask.push_back(tok);
        }
      } else throw ScenarioParseError(line, "unknown faults key '" + key + "'");
    } else if (section == "recycling") {
      if (key == "mode") {
        if (val != "single" && val != "batch")
          throw ScenarioParseError(line, "mode must be single or batch");
      } else if (key == "delta") sc.delta = static_cast<int>(parse_u64(val, line));
      else if (key == "window") sc.recycle_window = parse_u64(val, line);
      else throw ScenarioParseError(line, "unknown recycling key '" + key + "'");
    } else if (section == "stop") {
      if (key == "condition") {
        auto st = stop_from(val);
        if (!st) throw ScenarioParseError(line, "unknown stop condition '" + val + "'");
        sc.stop = *st;
      } else if (key == "max_steps") sc.max_steps = parse_u64(val, line);
      else throw ScenarioParseError(line, "unknown stop key '" + key + "'");
    } else if (section == "protocol") {
      if (key == "vbb_eq_phase") {
        if (val == "init") sc.vbb_eq_phase = VbbEqPhase::Init;
        else if (val == "valid") sc.vbb_eq_phase = VbbEqPhase::ValidAsWritten;
        else throw ScenarioParseError(line, "vbb_eq_phase must be init or valid");
      } else if (key == "round_cap") sc.round_cap = static_cast<int>(parse_u64(val, line));
      else if (key == "seed") sc.seed = parse_u64(val, line);
      else if (key == "name") sc.name = val;
      else throw ScenarioParseError(line, "unknown protocol key '" + key + "'");
    } else {
      throw ScenarioParseError(line, "unknown section '" + section + "'");
    }
  }

  sc.proposals.assign(sc.params.n, default_prop.value_or(0));
  for (auto [id, v] : props) {
    if (id < 0 || id >= sc.params.n) throw ScenarioParseError(0, "proposal for unknown node");
    sc.proposals[id] = v;
  }
  if (default_prop2 || !props2.empty()) {
    sc.proposals2.assign(sc.params.n, default_prop2.value_or(default_prop.value_or(0)));
    for (auto [id, v] : props2) {
      if (id < 0 || id >= sc.params.n) throw ScenarioParseError(0, "proposal2 for unknown node");
      sc.proposals2[id] = v;
    }
  }
  sc.validate();
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return parse_scenario(os.str());
}

std::string scenario_to_text(const Scenario& sc) {
  std::ostringstream os;
  os << "[params]\n"
     << "n = " << sc.params.n << "\nt = " << sc.params.t << "\ncapacity = " << sc.params.capacity
     << "\nalphabet = " << sc.alphabet << "\n\n[proposals]\n";
  for (int i = 0; i < sc.params.n; ++i)
    os << "node" << i << " = " << value_name(sc.proposals[i]) << '\n';
  if (!sc.proposals2.empty()) {
    os << "\n[proposals2]\n";
    for (int i = 0; i < sc.params.n; ++i)
      os << "node" << i << " = " << value_name(sc.proposals2[i]) << '\n';
  }
  if (sc.byzantine) {
    os << "\n[byzantine]\nnodes = ";
    bool first = true;
    for (int i = 0; i < sc.params.n; ++i)
      if (sc.byzantine & bit(static_cast<NodeId>(i))) {
        os << (first ? "" : ",") << i;
        first = false;
      }
    os << "\nstrategy = " << strategy_name(sc.strategy)
       << "\nvalue = " << value_name(sc.byz_value) << "\ndelay_until = " << sc.delay_until << '\n';
  }
  os << "\n[scheduler]\npolicy = " << policy_name(sc.policy) << "\nseed = " << sc.seed;
  if (sc.victims) {
    os << "\nvictims = ";
    bool first = true;
    for (int i = 0; i < sc.params.n; ++i)
      if (sc.victims & bit(static_cast<NodeId>(i))) {
        os << (first ? "" : ",") << i;
        first = false;
      }
  }
  os << "\nuntil_step = " << sc.until_step << '\n';
  if (sc.faults.enabled) {
    os << "\n[faults]\nseed = " << sc.faults.seed << "\ntarget = " << sc.faults.target
       << "\ndensity = " << sc.faults.density
       << "\nchannels = " << (sc.faults.corrupt_channels ? "true" : "false") << '\n';
  }
  os << "\n[recycling]\ndelta = " << sc.delta << "\nwindow = " << sc.recycle_window << '\n';
  os << "\n[stop]\ncondition = " << stop_name(sc.stop) << "\nmax_steps = " << sc.max_steps << '\n';
  os << "\n[protocol]\nname = " << sc.name
     << "\nvbb_eq_phase = " << (sc.vbb_eq_phase == VbbEqPhase::Init ? "init" : "valid")
     << "\nround_cap = " << sc.round_cap << '\n';
  return os.str();
}

namespace {

// proposals, byzantine set, strategy and policy drawn from the seed
void randomize_population(Scenario& sc, Rng& rng, bool want_byz) {
  int n = sc.params.n;
  int values_in_play = 2 + static_cast<int>(rng.below(3));  // 2..4 distinct values
  sc.alphabet = std::max(4, values_in_play);
  sc.proposals.resize(n);
  bool unanimous = rng.chance(0.35);
  Value common = static_cast<Value>(rng.below(values_in_play));
  for (int i = 0; i < n; ++i)
    sc.proposals[i] = unanimous ? common : static_cast<Value>(rng.below(values_in_play));

  if (want_byz && sc.params.t > 0) {
    int count = 1 + static_cast<int>(rng.below(sc.params.t));
    PeerMask m = 0;
    while (popcount(m) < count) m |= bit(static_cast<NodeId>(rng.below(n)));
    sc.byzantine = m;
  }
}

}  // namespace

Scenario make_closure_scenario(int n, std::uint64_t seed) {
  Scenario sc;
  sc.name = "closure-n" + std::to_string(n) + "-s" + std::to_string(seed);
  sc.params.n = n;
  sc.params.t = (n - 1) / 3;
  sc.params.capacity = 8;
  sc.seed = seed;
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + n);

  randomize_population(sc, rng, true);

  static const Strategy strategies[] = {Strategy::Crash, Strategy::Equivocate,
                                        Strategy::Collude, Strategy::SpamInvalid};
  sc.strategy = sc.byzantine ? strategies[rng.below(4)] : Strategy::Correct;
  // the intrusion value: proposed by no correct node
  sc.byz_value = static_cast<Value>(sc.alphabet - 1);
  bool clash = false;
  for (int i = 0; i < n; ++i)
    if (!(sc.byzantine & bit(static_cast<NodeId>(i))) && sc.proposals[i] == sc.byz_value)
      clash = true;
  if (clash && sc.alphabet < kMaxAlphabet) {
    sc.byz_value = static_cast<Value>(sc.alphabet);
    sc.alphabet += 1;
  }

  switch (rng.below(3)) {
    case 0: sc.policy = PolicyKind::Fifo; break;
    case 1: sc.policy = PolicyKind::Random; break;
    default: {
      sc.policy = PolicyKind::AdversarialDelay;
      PeerMask correct = sc.correct_mask();
      // starve one correct node for a budget
      for (int i = 0; i < n; ++i)
        if (correct & bit(static_cast<NodeId>(i))) {
          if (rng.chance(1.0 / (i + 1))) sc.victims = bit(static_cast<NodeId>(i));
        }
      sc.until_step = 100 + rng.below(300);
      break;
    }
  }
  sc.stop = StopCond::AllDecided;
  sc.max_steps = 60000;
  return sc;
}

Scenario make_convergence_scenario(int n, std::uint64_t seed) {
  Scenario sc;
  sc.name = "convergence-n" + std::to_string(n) + "-s" + std::to_string(seed);
  sc.params.n = n;
  sc.params.t = (n - 1) / 3;
  sc.params.capacity = 8;
  sc.seed = seed;
  Rng rng(seed * 0xd1342543de82ef95ULL + n);

  randomize_population(sc, rng, rng.chance(0.5));
  if (sc.byzantine) sc.strategy = rng.chance(0.5) ? Strategy::Crash : Strategy::Collude;
  sc.byz_value = static_cast<Value>(sc.alphabet - 1);

  sc.policy = rng.chance(0.5) ? PolicyKind::Fifo : PolicyKind::Random;
  sc.faults.enabled = true;
  sc.faults.seed = seed ^ 0xabcdef;
  switch (seed % 4) {
    case 0: sc.faults.target = "bco-forced-true"; break;
    case 1: sc.faults.target = "valid-without-init"; break;
    case 2: sc.faults.target = "ghost-delivered"; break;
    default: sc.faults.target = "random"; break;
  }
  if (sc.faults.target == "bco-forced-true") {
    // the blocking corruption needs sameValue() == False at every correct node
    sc.alphabet = std::max(sc.alphabet, std::min(kMaxAlphabet, n));
    for (int i = 0; i < n; ++i) sc.proposals[i] = static_cast<Value>(i % sc.alphabet);
  }
  sc.faults.density = 0.1 + 0.2 * (static_cast<double>(rng.below(100)) / 100.0);
  sc.stop = StopCond::Epoch2Decided;
  sc.max_steps = 120000;
  return sc;
}

Scenario make_differential_scenario(int n, std::uint64_t seed) {
  // Only scenario classes whose outcome Definition 1 pins independently of the
  // schedule: unanimous correct proposals (the value must be decided), and
  // pairwise-distinct correct proposals with crashing byzantine nodes (no value
  // can reach n-2t support, so the error symbol is the only outcome). Split
  // proposals admit both a value and the error symbol depending on timing, which
  // makes node-for-node equality across two executions meaningless.
  Scenario sc;
  sc.name = "differential-n" + std::to_string(n) + "-s" + std::to_string(seed);
  sc.params.n = n;
  sc.params.t = (n - 1) / 3;
  sc.params.capacity = 8;
  sc.seed = seed;
  Rng rng(seed * 0x9e3779b97f4a7c15ULL + 3 * n);

  sc.proposals.resize(n);
  bool unanimous = rng.chance(0.6);
  if (unanimous) {
    sc.alphabet = 4;
    Value v = static_cast<Value>(rng.below(3));
    for (int i = 0; i < n; ++i) sc.proposals[i] = v;
    if (sc.params.t > 0) {
      int count = 1 + static_cast<int>(rng.below(sc.params.t));
      PeerMask m = 0;
      while (popcount(m) < count) m |= bit(static_cast<NodeId>(rng.below(n)));
      sc.byzantine = m;
      static const Strategy strategies[] = {Strategy::Crash, Strategy::Equivocate,
                                            Strategy::Collude, Strategy::SpamInvalid};
      sc.strategy = strategies[rng.below(4)];
      sc.byz_value = 3;
    }
  } else {
    sc.alphabet = std::min(kMaxAlphabet, std::max(4, n));
    for (int i = 0; i < n; ++i) sc.proposals[i] = static_cast<Value>(i % sc.alphabet);
    if (sc.params.t > 0) {
      sc.byzantine = bit(static_cast<NodeId>(rng.below(n)));
      sc.strategy = Strategy::Crash;
    }
  }
  sc.policy = rng.chance(0.5) ? PolicyKind::Fifo : PolicyKind::Random;
  sc.stop = StopCond::AllDecided;
  sc.max_steps = 80000;
  return sc;
}

Scenario make_unfair_scenario(int n, std::uint64_t seed) {
  Scenario sc = make_closure_scenario(n, seed);
  sc.name = "unfair-n" + std::to_string(n) + "-s" + std::to_string(seed);
  Rng rng(seed * 0x2545f4914f6cdd1dULL + n);
  sc.policy = PolicyKind::UnfairThenFair;
  PeerMask correct = sc.correct_mask();
  PeerMask pick = 0;
  for (int i = 0; i < n; ++i)
    if ((correct & bit(static_cast<NodeId>(i))) && rng.chance(0.3)) pick |= bit(static_cast<NodeId>(i));
  if (!pick) {
    for (int i = 0; i < n; ++i)
      if (correct & bit(static_cast<NodeId>(i))) {
        pick = bit(static_cast<NodeId>(i));
        break;
      }
  }
  sc.victims = pick;
  sc.until_step = 200 + rng.below(400);
  sc.max_steps = 80000;
  return sc;
}

}  // namespace ssmvc
