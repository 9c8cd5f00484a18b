#include "ssmvc/faults.hpp"

#include <sstream>

namespace ssmvc {

namespace {

BrbPayload random_payload(Rng& rng, int n, int alphabet) {
  BrbPayload p;
  p.claimed = static_cast<NodeId>(rng.below(n));
  switch (rng.below(3)) {
    case 0: p = BrbPayload::val(p.claimed, static_cast<Value>(rng.below(alphabet))); break;
    case 1: p = BrbPayload::flag(p.claimed, rng.below(2) != 0); break;
    default: p = BrbPayload::junk(p.claimed, static_cast<std::uint8_t>(rng.next())); break;
  }
  return p;
}

std::string fmt(const char* f, int a, int b = -1, int c = -1, int d = -1) {
  std::ostringstream os;
  os << f << a;
  if (b >= 0) os << '/' << b;
  if (c >= 0) os << '/' << c;
  if (d >= 0) os << '/' << d;
  return os.str();
}

}  // namespace

std::vector<FieldRef> enumerate_fields(ProtocolWorld& world, PeerMask correct) {
  std::vector<FieldRef> out;
  const SystemParams p = world.params();
  for (int i = 0; i < p.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) continue;
    ProtocolNode& node = world.node(static_cast<NodeId>(i));
    int alphabet = node.config().alphabet;
    for (int o = 0; o < node.delta(); ++o) {
      MvcState& obj = node.obj(o);
      std::string base = "node/" + std::to_string(i) + "/obj/" + std::to_string(o);
      for (int phs = 0; phs < 2; ++phs) {
        for (int c = 0; c < p.n; ++c) {
          BrbInstance& inst = obj.vbb().instance(static_cast<Phase>(phs), static_cast<NodeId>(c));
          std::string ib = base + "/vbb/" + (phs == 0 ? "init" : "valid") + "/" + std::to_string(c);
          out.push_back({ib + "/own", [&inst, n = p.n, alphabet](Rng& r) {
                           inst.own_slot() = random_payload(r, n, alphabet);
                         }});
          out.push_back({ib + "/claim", [&inst, n = p.n, alphabet](Rng& r) {
                           inst.claim_slot() = random_payload(r, n, alphabet);
                         }});
          out.push_back({ib + "/delivered", [&inst, n = p.n, alphabet](Rng& r) {
                           inst.delivered_slot() = random_payload(r, n, alphabet);
                         }});
          out.push_back({ib + "/done", [&inst, n = p.n](Rng& r) {
                           inst.done_mask() = static_cast<PeerMask>(r.below(1u << n));
                         }});
          for (int l = 0; l < p.n; ++l) {
            out.push_back({ib + "/echo/" + std::to_string(l), [&inst, l, n = p.n, alphabet](Rng& r) {
                             inst.echo_slot(static_cast<NodeId>(l)) = random_payload(r, n, alphabet);
                           }});
            out.push_back({ib + "/ready/" + std::to_string(l), [&inst, l, n = p.n, alphabet](Rng& r) {
                             inst.ready_slot(static_cast<NodeId>(l)) = random_payload(r, n, alphabet);
                           }});
          }
        }
      }
      BvInstance& bvo = obj.bvo();
      out.push_back({base + "/mvc/bvO/mine", [&bvo](Rng& r) {
                       bvo.mine_slot() = static_cast<std::uint8_t>(r.below(4));
                     }});
      out.push_back({base + "/mvc/bvO/binValues", [&bvo](Rng& r) {
                       bvo.bin_values_slot() = static_cast<std::uint8_t>(r.below(4));
                     }});
      for (int l = 0; l < p.n; ++l) {
        out.push_back({base + "/mvc/bvO/seen/" + std::to_string(l), [&bvo, l, n = p.n](Rng& r) {
                         bvo.seen_slot(static_cast<NodeId>(l), r.below(2) != 0) =
                             static_cast<std::uint8_t>(r.below(n + 2));
                       }});
      }
      BinConInstance& bco = obj.bco();
      out.push_back({base + "/mvc/bcO/round", [&bco](Rng& r) {
                       bco.round_slot() = static_cast<std::uint16_t>(r.below(bco.round_cap() + 4));
                     }});
      out.push_back({base + "/mvc/bcO/est", [&bco](Rng& r) {
                       bco.est_slot() = static_cast<std::uint8_t>(r.below(2));
                     }});
      out.push_back({base + "/mvc/bcO/result", [&bco](Rng& r) {
                       switch (r.below(3)) {
                         case 0: bco.result_slot() = DeliveryResult::pending(); break;
                         case 1: bco.result_slot() = DeliveryResult::error(); break;
                         default:
                           bco.result_slot() =
                               DeliveryResult::decided(static_cast<Value>(r.below(2)));
                       }
                     }});
      for (int rd = 1; rd <= 2; ++rd) {  // early rounds are the live attack surface
        out.push_back({base + "/mvc/bcO/round" + std::to_string(rd) + "/myaux", [&bco, rd](Rng& r) {
                         bco.my_aux_slot(rd) = static_cast<std::uint8_t>(r.below(3));
                       }});
        for (int l = 0; l < p.n; ++l)
          out.push_back({base + "/mvc/bcO/round" + std::to_string(rd) + "/aux/" + std::to_string(l),
                         [&bco, rd, l](Rng& r) {
                           bco.aux_slot(rd, static_cast<NodeId>(l)) =
                               static_cast<std::uint8_t>(r.below(3));
                         }});
      }
    }
  }
  return out;
}

bool path_matches(const std::string& pattern, const std::string& path) {
  // segment-wise; '*' one segment, '**' any suffix
  std::size_t pi = 0, si = 0;
  while (pi < pattern.size() && si < path.size()) {
    std::size_t pe = pattern.find('/', pi);
    std::size_t se = path.find('/', si);
    std::string pseg = pattern.substr(pi, pe == std::string::npos ? std::string::npos : pe - pi);
    std::string sseg = path.substr(si, se == std::string::npos ? std::string::npos : se - si);
    if (pseg == "**") return true;
    if (pseg != "*" && pseg != sseg) return false;
    if (pe == std::string::npos && se == std::string::npos) return true;
    if (pe == std::string::npos || se == std::string::npos) return false;
    pi = pe + 1;
    si = se + 1;
  }
  return pi >= pattern.size() && si >= path.size();
}

namespace {

void corrupt_channels(ProtocolWorld& world, const Scenario& sc, Rng& rng) {
  const SystemParams p = world.params();
  for (int s = 0; s < p.n; ++s) {
    for (int d = 0; d < p.n; ++d) {
      if (s == d) continue;
      if (world.crashed() & bit(static_cast<NodeId>(d))) continue;
      if (!rng.chance(sc.faults.density)) continue;
      int count = 1 + static_cast<int>(rng.below(std::min(p.capacity, 3)));
      for (int m = 0; m < count; ++m) {
        Message msg;
        msg.src = static_cast<NodeId>(s);
        msg.dst = static_cast<NodeId>(d);
        int sections = 1 + static_cast<int>(rng.below(4));
        for (int k = 0; k < sections; ++k) {
          BrbSection sec;
          sec.obj = 0;
          sec.phase = rng.below(2) ? Phase::Valid : Phase::Init;
          sec.column = static_cast<NodeId>(rng.below(p.n));
          if (rng.below(2)) sec.own = random_payload(rng, p.n, sc.alphabet);
          if (rng.below(2)) sec.echo = random_payload(rng, p.n, sc.alphabet);
          if (rng.below(2)) sec.ready = random_payload(rng, p.n, sc.alphabet);
          sec.done = rng.below(2) != 0;
          msg.brb.push_back(sec);
        }
        if (rng.below(2)) {
          BvSection bs;
          bs.obj = 0;
          bs.lvl_false = static_cast<std::uint8_t>(rng.below(p.n + 2));
          bs.lvl_true = static_cast<std::uint8_t>(rng.below(p.n + 2));
          msg.bv.push_back(bs);
        }
        world.push_message(std::move(msg));
      }
    }
  }
}

}  // namespace

void inject_transient_faults(ProtocolWorld& world, const Scenario& sc) {
  if (!sc.faults.enabled) return;
  Rng rng(sc.faults.seed ^ 0x3c6ef372fe94f82bULL);
  PeerMask correct = sc.correct_mask();
  Trace& trace = world.trace();
  auto log = [&](const std::string& path) {
    trace.add({world.clock(), -1, EventKind::Corrupt, 0, 0, 0, 0, 0,
               fnv1a(path.data(), path.size())});
  };

  const std::string& target = sc.faults.target;
  if (target == "bco-forced-true") {
    // the classic blocking state: a decided True that nobody proposed, encoded
    // as a consistent-looking object so only the layer above can catch it
    for (int i = 0; i < world.params().n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      auto& bco = world.node(static_cast<NodeId>(i)).obj(0).bco();
      bco.result_slot() = DeliveryResult::decided(1);
      bco.round_slot() = 1;
      bco.est_slot() = 1;
      log(fmt("node/", i) + "/obj/0/mvc/bcO/result");
    }
    return;
  }
  if (target == "valid-without-init") {
    NodeId col = static_cast<NodeId>(rng.below(world.params().n));
    for (int i = 0; i < world.params().n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      auto& inst = world.node(static_cast<NodeId>(i)).obj(0).vbb().instance(Phase::Valid, col);
      inst.delivered_slot() = BrbPayload::flag(col, true);
      log(fmt("node/", i) + "/obj/0/vbb/valid/" + std::to_string(col) + "/delivered");
    }
    return;
  }
  if (target == "ghost-delivered") {
    // delivery flags without any messages in flight
    for (int i = 0; i < world.params().n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      auto& node = world.node(static_cast<NodeId>(i));
      auto& inst = node.obj(0).vbb().instance(Phase::Init, static_cast<NodeId>(i));
      inst.done_mask() = (PeerMask{1} << world.params().n) - 1;
      inst.delivered_slot() =
          BrbPayload::val(static_cast<NodeId>(i), static_cast<Value>(rng.below(sc.alphabet)));
      log(fmt("node/", i) + "/obj/0/vbb/init/" + std::to_string(i) + "/done");
    }
    return;
  }

  // seeded arbitrary corruption over the mask
  auto fields = enumerate_fields(world, correct);
  for (auto& f : fields) {
    if (!sc.faults.mask.empty()) {
      bool hit = false;
      for (const auto& pat : sc.faults.mask)
        if (path_matches(pat, f.path)) {
          hit = true;
          break;
        }
      if (!hit) continue;
    }
    if (!rng.chance(sc.faults.density)) continue;
    f.smash(rng);
    log(f.path);
  }
  if (sc.faults.corrupt_channels) corrupt_channels(world, sc, rng);
}

}  // namespace ssmvc
