#include "ssmvc/harness.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"
#include "ssmvc/faults.hpp"
#include "ssmvc/oracle.hpp"

namespace ssmvc {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::NA: return "n/a";
  }
  return "?";
}

namespace {

DeliveryResult unpack_outcome(std::uint64_t p) {
  DeliveryResult r;
  r.kind = static_cast<ResultKind>((p >> 8) & 0xff);
  r.value = static_cast<Value>(p & 0xff);
  return r;
}

std::string mask_to_string(PeerMask m) { return std::to_string(m); }

std::string proposals_to_string(const std::vector<Value>& v) {
  std::string s;
  for (Value x : v) s += static_cast<char>('A' + x);
  return s;
}

std::vector<Value> proposals_from_string(const std::string& s) {
  std::vector<Value> v;
  for (char c : s) v.push_back(static_cast<Value>(c - 'A'));
  return v;
}

// ---------------------------------------------------------------------------
// observation polling

struct ObjSnap {
  MvcOutcome mvc;
  std::array<VbbOutcome, kMaxNodes> vbb{};
  std::array<std::array<std::uint64_t, kMaxNodes>, 2> brb{};  // packed payload + 1
  std::array<std::uint64_t, 2> own{};                          // own broadcast + 1
  std::uint8_t bv_bin = 0, bv_mine = 0;
  bool proposed = false;
};

struct Observer {
  std::vector<std::vector<ObjSnap>> snap;  // [node][obj]
  PeerMask correct = 0;
  int n = 0, delta = 1;

  void reset(int n_, int delta_, PeerMask correct_) {
    n = n_;
    delta = delta_;
    correct = correct_;
    snap.assign(n, std::vector<ObjSnap>(delta));
  }

  void poll(ProtocolWorld& world, NodeId i, Recycler& rec) {
    if (!(correct & bit(i))) return;
    ProtocolNode& node = world.node(i);
    Trace& tr = world.trace();
    std::uint64_t step = world.clock();
    for (int o = 0; o <= node.cur_obj() && o < delta; ++o) {
      ObjSnap& s = snap[i][o];
      const MvcState& obj = node.obj(o);
      auto ob = static_cast<std::uint8_t>(o);

      if (!s.proposed && node.proposed(o)) {
        s.proposed = true;
        tr.add({step, -1, EventKind::Propose, i, ob, 0, 0, 0,
                node.proposal(node.epoch() % 2, o)});
      }
      for (int phs = 0; phs < 2; ++phs) {
        const auto& own = obj.vbb().instance(static_cast<Phase>(phs), i).own();
        std::uint64_t packed = own ? pack_payload(*own) + 1 : 0;
        if (packed != s.own[phs] && packed) {
          s.own[phs] = packed;
          tr.add({step, -1, EventKind::Bcast, i, ob, static_cast<std::uint8_t>(phs), 0, 0,
                  packed - 1});
        }
        for (int c = 0; c < n; ++c) {
          auto d = obj.vbb().instance(static_cast<Phase>(phs), static_cast<NodeId>(c))
                       .deliver(static_cast<NodeId>(c));
          std::uint64_t pd = d ? pack_payload(*d) + 1 : 0;
          if (pd != s.brb[phs][c] && pd) {
            s.brb[phs][c] = pd;
            tr.add({step, -1, EventKind::BrbDeliver, i, ob, static_cast<std::uint8_t>(phs),
                    static_cast<std::uint8_t>(c), 0, pd - 1});
          }
        }
      }
      for (int c = 0; c < n; ++c) {
        VbbOutcome oc = obj.vbb().vbb_deliver(static_cast<NodeId>(c));
        if (oc.result == s.vbb[c].result && oc.branch == s.vbb[c].branch) continue;
        s.vbb[c] = oc;
        tr.add({step, -1, EventKind::VbbDeliver, i, ob, static_cast<std::uint8_t>(oc.branch),
                static_cast<std::uint8_t>(c), 0, pack_outcome(oc.result)});
      }
      std::uint8_t bin = obj.bvo().bin_values(), mine = obj.bvo().mine();
      if (bin != s.bv_bin || mine != s.bv_mine) {
        s.bv_bin = bin;
        s.bv_mine = mine;
        tr.add({step, -1, EventKind::BvDeliver, i, ob, bin, mine, 0, 0});
      }
      MvcOutcome mo = obj.result_full();
      if (!(mo.result == s.mvc.result) || mo.branch != s.mvc.branch) {
        s.mvc = mo;
        tr.add({step, -1, EventKind::Decide, i, ob, static_cast<std::uint8_t>(mo.branch), 0, 0,
                pack_outcome(mo.result)});
        if (!mo.result.is_pending()) rec.note_delivery(i, o);
      }
    }
  }
};

// ---------------------------------------------------------------------------
// stop conditions: quiescent-stable completion so eventual properties are crisp

bool channels_settled(ProtocolWorld& world, PeerMask correct, int delta) {
  const SystemParams& p = world.params();
  for (int i = 0; i < p.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) continue;
    ProtocolNode& node = world.node(static_cast<NodeId>(i));
    for (int o = 0; o < delta; ++o) {
      const MvcState& obj = node.obj(o);
      if (obj.result().is_pending()) return false;
      // correct senders' channels must rest on the two legitimate exits
      for (int k = 0; k < p.n; ++k) {
        if (!(correct & bit(static_cast<NodeId>(k)))) continue;
        VbbOutcome oc = obj.vbb().vbb_deliver(static_cast<NodeId>(k));
        if (oc.branch != VbbBranch::NormalValue && oc.branch != VbbBranch::NormalDiff)
          return false;
      }
      // a channel delivered anywhere must be delivered everywhere
      for (int phs = 0; phs < 2; ++phs) {
        for (int c = 0; c < p.n; ++c) {
          bool some = false, all = true;
          for (int j = 0; j < p.n; ++j) {
            if (!(correct & bit(static_cast<NodeId>(j)))) continue;
            bool has = world.node(static_cast<NodeId>(j))
                           .obj(o)
                           .vbb()
                           .instance(static_cast<Phase>(phs), static_cast<NodeId>(c))
                           .deliver(static_cast<NodeId>(c))
                           .has_value();
            some |= has;
            all &= has;
          }
          if (some && !all) return false;
        }
      }
      // the outer BV sets must have converged to one nonempty set
      std::int16_t bin = -1;
      for (int j = 0; j < p.n; ++j) {
        if (!(correct & bit(static_cast<NodeId>(j)))) continue;
        std::uint8_t b = world.node(static_cast<NodeId>(j)).obj(o).bvo().bin_values();
        if (bin < 0) bin = b;
        else if (bin != b) return false;
      }
      if (bin == 0) return false;
    }
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// verdict engine

namespace {

struct EpochObs {
  int n = 0, delta = 1;
  // flattened [node][obj] and [node][obj][col]
  std::vector<MvcOutcome> mvc;
  std::vector<VbbOutcome> vbb;
  std::vector<std::uint64_t> brb;     // [node][obj][phs][col], packed+1
  std::vector<int> brb_events;        // same shape: event count
  std::vector<std::uint64_t> bcast;   // [node][obj][phs], packed+1
  std::vector<std::uint8_t> bv_bin, bv_mine;  // [node][obj]
  std::vector<std::int16_t> propose;  // [node][obj], -1 none
  int recycle_events = 0;
  std::uint64_t first_step = 0, last_step = 0;
  std::vector<std::uint64_t> first_decide_step;  // [node], ~0 when none

  MvcOutcome& mvc_at(int i, int o) { return mvc[i * delta + o]; }
  VbbOutcome& vbb_at(int i, int o, int c) { return vbb[(i * delta + o) * kMaxNodes + c]; }
  std::uint64_t& brb_at(int i, int o, int p, int c) {
    return brb[((i * delta + o) * 2 + p) * kMaxNodes + c];
  }
  int& brb_ev(int i, int o, int p, int c) {
    return brb_events[((i * delta + o) * 2 + p) * kMaxNodes + c];
  }
  std::uint64_t& bcast_at(int i, int o, int p) { return bcast[(i * delta + o) * 2 + p]; }
};

EpochObs scan_epoch(const Trace& t, int n, int delta, std::size_t from, std::size_t to) {
  EpochObs e;
  e.n = n;
  e.delta = delta;
  e.mvc.assign(n * delta, {});
  e.vbb.assign(n * delta * kMaxNodes, {});
  e.brb.assign(n * delta * 2 * kMaxNodes, 0);
  e.brb_events.assign(n * delta * 2 * kMaxNodes, 0);
  e.bcast.assign(n * delta * 2, 0);
  e.bv_bin.assign(n * delta, 0);
  e.bv_mine.assign(n * delta, 0);
  e.propose.assign(n * delta, -1);
  e.first_decide_step.assign(n, ~0ULL);
  bool first = true;
  for (std::size_t idx = from; idx < to; ++idx) {
    const TraceEvent& ev = t.events[idx];
    if (first) {
      e.first_step = ev.step;
      first = false;
    }
    e.last_step = ev.step;
    if (ev.node >= n || ev.obj >= delta) continue;
    switch (ev.kind) {
      case EventKind::Decide: {
        auto r = unpack_outcome(ev.payload);
        e.mvc_at(ev.node, ev.obj) = {r, static_cast<MvcBranch>(ev.a)};
        if (!r.is_pending() && e.first_decide_step[ev.node] == ~0ULL)
          e.first_decide_step[ev.node] = ev.step;
        break;
      }
      case EventKind::VbbDeliver:
        e.vbb_at(ev.node, ev.obj, ev.b) = {unpack_outcome(ev.payload),
                                           static_cast<VbbBranch>(ev.a)};
        break;
      case EventKind::BrbDeliver:
        e.brb_at(ev.node, ev.obj, ev.a, ev.b) = ev.payload + 1;
        e.brb_ev(ev.node, ev.obj, ev.a, ev.b)++;
        break;
      case EventKind::Bcast:
        e.bcast_at(ev.node, ev.obj, ev.a) = ev.payload + 1;
        break;
      case EventKind::BvDeliver:
        e.bv_bin[ev.node * delta + ev.obj] = ev.a;
        e.bv_mine[ev.node * delta + ev.obj] = ev.b;
        break;
      case EventKind::Propose:
        e.propose[ev.node * delta + ev.obj] = static_cast<std::int16_t>(ev.payload);
        break;
      case EventKind::Recycle:
        e.recycle_events++;
        break;
      default: break;
    }
  }
  return e;
}

struct VerdictCtx {
  int n = 0, t = 0, delta = 1, alphabet = 4;
  PeerMask byz = 0;
  std::vector<Value> proposals, proposals2;
  std::uint64_t fair_from = 0;
  PolicyKind policy = PolicyKind::Fifo;
  PeerMask correct() const { return ((PeerMask{1} << n) - 1) & ~byz; }
};

void definition1_verdicts(const VerdictCtx& cx, EpochObs& e, const std::vector<Value>& props,
                          std::map<std::string, Verdict>& out, const std::string& prefix) {
  PeerMask correct = cx.correct();
  // R1 completion
  bool complete = true;
  for (int i = 0; i < cx.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) continue;
    for (int o = 0; o < cx.delta; ++o)
      if (e.mvc_at(i, o).result.is_pending()) complete = false;
  }
  out[prefix + "BC-completion"] = complete ? Verdict::Pass : Verdict::Fail;

  // R2 agreement over non-bottom outcomes
  bool agree = true;
  for (int o = 0; o < cx.delta; ++o) {
    std::optional<DeliveryResult> seen;
    for (int i = 0; i < cx.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      auto r = e.mvc_at(i, o).result;
      if (r.is_pending()) continue;
      if (!seen) seen = r;
      else if (!(*seen == r)) agree = false;
    }
  }
  out[prefix + "BC-agreement"] = agree ? Verdict::Pass : Verdict::Fail;

  // R3 validity (evaluable only under unanimous correct proposals)
  bool unanimous = true;
  std::optional<Value> common;
  for (int i = 0; i < cx.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) continue;
    if (!common) common = props[i];
    else if (*common != props[i]) unanimous = false;
  }
  if (!unanimous || !common) {
    out[prefix + "BC-validity"] = Verdict::NA;
  } else {
    bool ok = true;
    for (int i = 0; i < cx.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      for (int o = 0; o < cx.delta; ++o)
        if (!(e.mvc_at(i, o).result == DeliveryResult::decided(*common))) ok = false;
    }
    out[prefix + "BC-validity"] = ok ? Verdict::Pass : Verdict::Fail;
  }

  // R4 no-intrusion: a decided value must be some correct node's proposal
  bool any_value = false, intrusion = false;
  for (int i = 0; i < cx.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) continue;
    for (int o = 0; o < cx.delta; ++o) {
      auto r = e.mvc_at(i, o).result;
      if (!r.is_decided()) continue;
      any_value = true;
      bool proposed_by_correct = false;
      for (int j = 0; j < cx.n; ++j)
        if ((correct & bit(static_cast<NodeId>(j))) && props[j] == r.value)
          proposed_by_correct = true;
      if (!proposed_by_correct) intrusion = true;
    }
  }
  out[prefix + "BC-no-intrusion"] =
      !any_value ? Verdict::NA : (intrusion ? Verdict::Fail : Verdict::Pass);
}

void layer_verdicts(const VerdictCtx& cx, EpochObs& e, const std::vector<Value>& props,
                    std::map<std::string, Verdict>& out) {
  PeerMask correct = cx.correct();

  // VBB-completion over correct senders
  bool vc = true;
  for (int i = 0; i < cx.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) continue;
    for (int o = 0; o < cx.delta; ++o)
      for (int k = 0; k < cx.n; ++k)
        if ((correct & bit(static_cast<NodeId>(k))) && e.vbb_at(i, o, k).result.is_pending())
          vc = false;
  }
  out["VBB-completion"] = vc ? Verdict::Pass : Verdict::Fail;

  // VBB-uniformity: correct senders by final outcome; byzantine senders over the
  // quorum-grounded exits only (error-detection branches may still be in flight)
  bool uni = true;
  for (int o = 0; o < cx.delta; ++o) {
    for (int k = 0; k < cx.n; ++k) {
      std::optional<DeliveryResult> seen;
      bool sender_correct = (correct & bit(static_cast<NodeId>(k))) != 0;
      for (int i = 0; i < cx.n; ++i) {
        if (!(correct & bit(static_cast<NodeId>(i)))) continue;
        VbbOutcome oc = e.vbb_at(i, o, k);
        if (oc.result.is_pending()) continue;
        if (!sender_correct && oc.branch != VbbBranch::NormalValue &&
            oc.branch != VbbBranch::NormalDiff)
          continue;
        if (!seen) seen = oc.result;
        else if (!(*seen == oc.result)) uni = false;
      }
    }
  }
  out["VBB-uniformity"] = uni ? Verdict::Pass : Verdict::Fail;

  // VBB-justification: delivered values were vbb-broadcast by a correct node
  bool just = true, any = false;
  for (int o = 0; o < cx.delta; ++o) {
    PeerMask correct_bcast_of[kMaxAlphabet + 1] = {};
    for (int j = 0; j < cx.n; ++j) {
      if (!(correct & bit(static_cast<NodeId>(j)))) continue;
      std::uint64_t b = e.bcast_at(j, o, 0);
      if (!b) continue;
      std::uint64_t packed = b - 1;
      if (((packed >> 8) & 0xff) == static_cast<std::uint64_t>(Body::Val))
        correct_bcast_of[packed & 0xff] |= bit(static_cast<NodeId>(j));
    }
    for (int i = 0; i < cx.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      for (int k = 0; k < cx.n; ++k) {
        auto r = e.vbb_at(i, o, k).result;
        if (!r.is_decided()) continue;
        any = true;
        if (r.value > kMaxAlphabet || !correct_bcast_of[r.value]) just = false;
      }
    }
  }
  out["VBB-justification"] = !any ? Verdict::NA : (just ? Verdict::Pass : Verdict::Fail);

  // VBB-obligation under unanimous correct proposals
  bool unanimous = true;
  std::optional<Value> common;
  for (int i = 0; i < cx.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) continue;
    if (!common) common = props[i];
    else if (*common != props[i]) unanimous = false;
  }
  if (!unanimous || !common) {
    out["VBB-obligation"] = Verdict::NA;
  } else {
    bool ok = true;
    for (int o = 0; o < cx.delta; ++o)
      for (int i = 0; i < cx.n; ++i) {
        if (!(correct & bit(static_cast<NodeId>(i)))) continue;
        for (int k = 0; k < cx.n; ++k)
          if ((correct & bit(static_cast<NodeId>(k))) &&
              !(e.vbb_at(i, o, k).result == DeliveryResult::decided(*common)))
            ok = false;
      }
    out["VBB-obligation"] = ok ? Verdict::Pass : Verdict::Fail;
  }

  // BRB properties from delivery events
  bool dup = true, integ = true, valid = true, comp1 = true, comp2 = true;
  for (int o = 0; o < cx.delta; ++o) {
    for (int phs = 0; phs < 2; ++phs) {
      for (int c = 0; c < cx.n; ++c) {
        std::optional<std::uint64_t> seen;
        bool col_correct = (correct & bit(static_cast<NodeId>(c))) != 0;
        bool some = false, all = true;
        for (int i = 0; i < cx.n; ++i) {
          if (!(correct & bit(static_cast<NodeId>(i)))) continue;
          if (e.brb_ev(i, o, phs, c) > 1) integ = false;
          std::uint64_t d = e.brb_at(i, o, phs, c);
          if (!d) {
            all = false;
            continue;
          }
          some = true;
          if (!seen) seen = d;
          else if (*seen != d) dup = false;
          if (col_correct) {
            std::uint64_t b = e.bcast_at(c, o, phs);
            if (b && b != d) valid = false;
          }
        }
        if (col_correct && !all) comp1 = false;
        if (some && !all) comp2 = false;
      }
    }
  }
  out["BRB-no-duplicity"] = dup ? Verdict::Pass : Verdict::Fail;
  out["BRB-integrity"] = integ ? Verdict::Pass : Verdict::Fail;
  out["BRB-validity"] = valid ? Verdict::Pass : Verdict::Fail;
  out["BRB-completion-1"] = comp1 ? Verdict::Pass : Verdict::Fail;
  out["BRB-completion-2"] = comp2 ? Verdict::Pass : Verdict::Fail;

  // outer BV object
  bool bv_valid = true, bv_agree = true, bv_complete = true;
  for (int o = 0; o < cx.delta; ++o) {
    std::uint8_t mine_union = 0;
    std::int16_t common_bin = -1;
    for (int i = 0; i < cx.n; ++i)
      if (correct & bit(static_cast<NodeId>(i))) mine_union |= e.bv_mine[i * cx.delta + o];
    for (int i = 0; i < cx.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      std::uint8_t b = e.bv_bin[i * cx.delta + o];
      if (b & ~mine_union) bv_valid = false;
      if (!b) bv_complete = false;
      if (common_bin < 0) common_bin = b;
      else if (common_bin != b) bv_agree = false;
    }
  }
  out["BV-validity"] = bv_valid ? Verdict::Pass : Verdict::Fail;
  out["BV-agreement"] = bv_agree ? Verdict::Pass : Verdict::Fail;
  out["BV-completion"] = bv_complete ? Verdict::Pass : Verdict::Fail;

  // Closure soundness: no settled consistency-test error on a correct sender,
  // and the value branch never bypassed by the transient-fault escape.
  bool sound = true;
  for (int o = 0; o < cx.delta; ++o) {
    for (int i = 0; i < cx.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      for (int k = 0; k < cx.n; ++k) {
        if (!(correct & bit(static_cast<NodeId>(k)))) continue;
        VbbBranch br = e.vbb_at(i, o, k).branch;
        if (br == VbbBranch::TestI || br == VbbBranch::TestII || br == VbbBranch::TestIII)
          sound = false;
      }
      if (e.mvc_at(i, o).branch == MvcBranch::ConsTest) sound = false;
    }
  }
  out["Closure-soundness"] = sound ? Verdict::Pass : Verdict::Fail;
}

}  // namespace

Report verdicts_from_trace(const Trace& t) {
  Report rep;
  VerdictCtx cx;
  rep.scenario = t.meta_value("name");
  cx.n = std::stoi(t.meta_value("n"));
  cx.t = std::stoi(t.meta_value("t"));
  cx.delta = std::stoi(t.meta_value("delta"));
  cx.alphabet = std::stoi(t.meta_value("alphabet"));
  cx.byz = static_cast<PeerMask>(std::stoul(t.meta_value("byzantine")));
  cx.proposals = proposals_from_string(t.meta_value("proposals"));
  std::string p2 = t.meta_value("proposals2");
  cx.proposals2 = p2.empty() ? cx.proposals : proposals_from_string(p2);
  cx.fair_from = std::stoull(t.meta_value("fair_from"));

  // epoch boundary: after the last recycle event
  std::size_t boundary = 0;
  for (std::size_t i = 0; i < t.events.size(); ++i)
    if (t.events[i].kind == EventKind::Recycle) boundary = i + 1;
  bool recycled = boundary > 0;
  rep.recycled = recycled;

  EpochObs e1 = scan_epoch(t, cx.n, cx.delta, 0, recycled ? boundary : t.events.size());
  EpochObs fin = recycled ? scan_epoch(t, cx.n, cx.delta, boundary, t.events.size())
                          : std::move(e1);

  const std::vector<Value>& final_props = recycled ? cx.proposals2 : cx.proposals;
  definition1_verdicts(cx, fin, final_props, rep.verdicts, "");
  layer_verdicts(cx, fin, final_props, rep.verdicts);

  if (recycled) {
    // Theorem-3 convergence: every correct node reaches a non-bottom result at
    // some point of the corrupted epoch (a later flicker back to bottom after a
    // consistency reset does not undo the sticky delivery report)
    bool conv = true;
    PeerMask correct = cx.correct();
    for (int i = 0; i < cx.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      if (e1.first_decide_step[i] == ~0ULL) conv = false;
    }
    rep.verdicts["Convergence-completion"] = conv ? Verdict::Pass : Verdict::Fail;
    rep.verdicts["Recycling-fired"] =
        e1.recycle_events == cx.n * cx.delta ? Verdict::Pass : Verdict::Fail;
  }

  // measurements
  PeerMask correct = cx.correct();
  int n_minus_t = cx.n - cx.t;
  {
    std::uint64_t from = recycled ? fin.first_step : 0;
    auto rounds = crwf_rounds(t, correct, cx.n, n_minus_t, from);
    std::uint64_t last_decide = 0;
    bool all = true;
    for (int i = 0; i < cx.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      if (fin.first_decide_step[i] == ~0ULL) all = false;
      else last_decide = std::max(last_decide, fin.first_decide_step[i]);
    }
    if (all) rep.rounds_to_decide = interval_index(rounds, last_decide);
  }
  {
    EpochObs& first_epoch = recycled ? e1 : fin;
    auto cycles = acaf_cycles(t, correct, cx.n, cx.fair_from);
    std::uint64_t last_decide = 0;
    bool all = true;
    for (int i = 0; i < cx.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      if (first_epoch.first_decide_step[i] == ~0ULL) all = false;
      else last_decide = std::max(last_decide, first_epoch.first_decide_step[i]);
    }
    if (all && last_decide >= cx.fair_from)
      rep.cycles_to_stabilize = interval_index(cycles, last_decide);
  }

  // final per-node results
  rep.final_results.assign(cx.n, "-");
  for (int i = 0; i < cx.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) {
      rep.final_results[i] = "byz";
      continue;
    }
    rep.final_results[i] = fin.mvc_at(i, 0).result.str();
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<NodeConfig> build_configs(const Scenario& sc) {
  std::vector<NodeConfig> cfgs(sc.params.n);
  for (int i = 0; i < sc.params.n; ++i) {
    NodeConfig& c = cfgs[i];
    c.id = static_cast<NodeId>(i);
    c.params = sc.params;
    c.alphabet = sc.alphabet;
    c.mode = sc.vbb_eq_phase;
    c.coin_seed = sc.seed;
    c.round_cap = sc.round_cap;
    c.delta = sc.delta;
    c.strategy = (sc.byzantine & bit(static_cast<NodeId>(i))) ? sc.strategy : Strategy::Correct;
    c.byz_value = sc.byz_value;
    c.delay_until = sc.delay_until;
    c.proposals[0] = {sc.proposals[i]};
    c.proposals[1] = {sc.proposals2.empty() ? sc.proposals[i] : sc.proposals2[i]};
  }
  return cfgs;
}

void write_meta(Trace& tr, const Scenario& sc) {
  tr.add_meta("name", sc.name);
  tr.add_meta("n", std::to_string(sc.params.n));
  tr.add_meta("t", std::to_string(sc.params.t));
  tr.add_meta("capacity", std::to_string(sc.params.capacity));
  tr.add_meta("alphabet", std::to_string(sc.alphabet));
  tr.add_meta("delta", std::to_string(sc.delta));
  tr.add_meta("byzantine", mask_to_string(sc.byzantine));
  tr.add_meta("strategy", strategy_name(sc.strategy));
  tr.add_meta("policy", policy_name(sc.policy));
  tr.add_meta("fair_from", std::to_string(sc.scheduler().fair_from()));
  tr.add_meta("proposals", proposals_to_string(sc.proposals));
  if (!sc.proposals2.empty()) tr.add_meta("proposals2", proposals_to_string(sc.proposals2));
  tr.add_meta("seed", std::to_string(sc.seed));
  tr.add_meta("stop", stop_name(sc.stop));
  tr.add_meta("vbb_eq_phase", sc.vbb_eq_phase == VbbEqPhase::Init ? "init" : "valid");
}

}  // namespace

RunArtifacts run_scenario(const Scenario& sc) {
  sc.validate();
  ProtocolWorld world(sc.params, sc.scheduler(), sc.seed);
  auto cfgs = build_configs(sc);
  for (auto& c : cfgs) world.add_node(ProtocolNode(c));
  if (sc.strategy == Strategy::Crash) world.crashed() = sc.byzantine;

  write_meta(world.trace(), sc);
  inject_transient_faults(world, sc);

  PeerMask correct = sc.correct_mask();
  Recycler recycler;
  recycler.configure(sc.params, correct, {sc.delta, sc.recycle_window, sc.seed});

  Observer obs;
  obs.reset(sc.params.n, sc.delta, correct);
  for (int i = 0; i < sc.params.n; ++i) obs.poll(world, static_cast<NodeId>(i), recycler);

  auto stop_met = [&]() -> bool {
    switch (sc.stop) {
      case StopCond::AllDecided: return channels_settled(world, correct, sc.delta);
      case StopCond::Recycled: return recycler.fired();
      case StopCond::Epoch2Decided:
        return recycler.fired() && channels_settled(world, correct, sc.delta);
      case StopCond::Steps: return false;
    }
    return false;
  };

  bool met = false;
  std::uint64_t steps = 0;
  while (steps < sc.max_steps) {
    if (steps % 4 == 0 && stop_met()) {
      met = true;
      break;
    }
    StepResult r = world.step();
    if (!r.progressed) break;
    ++steps;
    obs.poll(world, r.actor, recycler);
    if (recycler.poll(world)) {
      obs.reset(sc.params.n, sc.delta, correct);  // fresh epoch, fresh baselines
      for (int i = 0; i < sc.params.n; ++i) obs.poll(world, static_cast<NodeId>(i), recycler);
    }
  }
  if (!met) met = stop_met();

  label_cycles(world.trace(), correct, sc.params.n, sc.scheduler().fair_from());

  RunArtifacts art;
  art.trace = std::move(world.trace());
  art.report = verdicts_from_trace(art.trace);
  art.report.stop_met = met;
  art.report.steps = steps;
  art.report.counts = world.counts();
  art.final_results.resize(sc.params.n);
  art.final_vbb.resize(sc.params.n);
  for (int i = 0; i < sc.params.n; ++i) {
    art.final_results[i] = world.node(static_cast<NodeId>(i)).obj(0).result();
    for (int k = 0; k < sc.params.n; ++k)
      art.final_vbb[i][k] =
          world.node(static_cast<NodeId>(i)).obj(0).vbb().vbb_deliver(static_cast<NodeId>(k)).result;
  }
  return art;
}

DiffResult differential_run(const Scenario& sc) {
  DiffResult dr;
  RunArtifacts proto = run_scenario(sc);

  OracleWorld ow(sc.params, sc.scheduler(), sc.seed);
  auto cfgs = build_configs(sc);
  for (auto& c : cfgs) ow.add_node(OracleNode(c, OracleMode::Mvc));
  if (sc.strategy == Strategy::Crash) ow.crashed() = sc.byzantine;

  PeerMask correct = sc.correct_mask();
  auto oracle_done = [&](OracleWorld& w) {
    for (int i = 0; i < sc.params.n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      if (w.node(static_cast<NodeId>(i)).decision().is_pending()) return false;
      for (int k = 0; k < sc.params.n; ++k)
        if ((correct & bit(static_cast<NodeId>(k))) &&
            w.node(static_cast<NodeId>(i)).vbb_delivered(static_cast<NodeId>(k)).is_pending())
          return false;
    }
    return true;
  };
  ow.run_until(oracle_done, sc.max_steps);

  std::ostringstream detail;
  for (int i = 0; i < sc.params.n; ++i) {
    if (!(correct & bit(static_cast<NodeId>(i)))) continue;
    ++dr.compared_nodes;
    DeliveryResult a = proto.final_results[i];
    DeliveryResult b = ow.node(static_cast<NodeId>(i)).decision();
    if (!a.is_pending() && !b.is_pending() && !(a == b)) {
      ++dr.mvc_mismatches;
      detail << "node " << i << ": stack=" << a.str() << " oracle=" << b.str() << "; ";
    }
    for (int k = 0; k < sc.params.n; ++k) {
      // byzantine channels may legitimately resolve differently in two executions
      // (no-duplicity picks a winner per run); correct channels are pinned
      if (!(correct & bit(static_cast<NodeId>(k)))) continue;
      DeliveryResult va = proto.final_vbb[i][k];
      DeliveryResult vb = ow.node(static_cast<NodeId>(i)).vbb_delivered(static_cast<NodeId>(k));
      if (!va.is_pending() && !vb.is_pending() && !(va == vb)) {
        ++dr.vbb_mismatches;
        detail << "node " << i << " chan " << k << ": stack=" << va.str()
               << " oracle=" << vb.str() << "; ";
      }
    }
  }
  dr.ok = dr.mvc_mismatches == 0 && dr.vbb_mismatches == 0;
  dr.detail = detail.str();
  return dr;
}

// ---------------------------------------------------------------------------

std::string Report::to_text() const {
  std::ostringstream os;
  os << "scenario: " << scenario << "\n";
  os << "results:";
  for (const auto& r : final_results) os << ' ' << r;
  os << "\nsteps: " << steps << " stop_met: " << (stop_met ? "yes" : "no")
     << " recycled: " << (recycled ? "yes" : "no") << "\n";
  os << "rounds_to_decide: " << rounds_to_decide
     << " cycles_to_stabilize: " << cycles_to_stabilize << " num_b: " << num_b << "\n";
  os << "messages: " << counts.messages << " (brb " << counts.brb_sections << ", bv "
     << counts.bv_sections << ", bc " << counts.bc_sections << ")\n";
  for (const auto& [k, v] : verdicts) os << "  [" << verdict_name(v) << "] " << k << "\n";
  return os.str();
}

std::string Report::to_json() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["final_results"] = final_results;
  j["steps"] = steps;
  j["stop_met"] = stop_met;
  j["recycled"] = recycled;
  j["rounds_to_decide"] = rounds_to_decide;
  j["cycles_to_stabilize"] = cycles_to_stabilize;
  j["num_b"] = num_b;
  j["messages"] = {{"total", counts.messages},
                   {"brb", counts.brb_sections},
                   {"bv", counts.bv_sections},
                   {"bc", counts.bc_sections}};
  nlohmann::json v;
  for (const auto& [k, val] : verdicts) v[k] = verdict_name(val);
  j["verdicts"] = v;
  return j.dump(2);
}

}  // namespace ssmvc
