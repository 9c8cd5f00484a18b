#include "ssmvc/exhaustive.hpp"

#include <deque>
#include <optional>
#include <unordered_set>
#include <vector>

#include "ssmvc/bincon.hpp"
#include "ssmvc/brb.hpp"
#include "ssmvc/bv.hpp"
#include "ssmvc/wire.hpp"

namespace ssmvc::exhaustive {

namespace {

constexpr SystemParams kP{4, 1, 1};

template <class State>
SearchStats bfs(const State& root, std::size_t max_states, int probe_stride, int max_depth) {
  SearchStats st;
  std::unordered_set<std::uint64_t> seen;
  std::deque<std::pair<State, int>> frontier;
  seen.insert(root.hash());
  frontier.emplace_back(root, 0);
  st.visited = 1;
  if (!root.check_safety()) ++st.violations;

  std::vector<State> kids;
  while (!frontier.empty()) {
    if (st.visited >= max_states) return st;  // exhausted stays false
    auto [cur, depth] = std::move(frontier.front());
    frontier.pop_front();
    if (depth >= max_depth) continue;  // depth-bounded: the layer is kept, not expanded

    kids.clear();
    cur.expand(kids);
    for (auto& k : kids) {
      ++st.edges;
      std::uint64_t h = k.hash();
      if (!seen.insert(h).second) continue;
      if (!k.check_safety()) ++st.violations;
      if (!k.write_once_ok(cur)) ++st.violations;
      if (probe_stride > 0 && (st.visited % probe_stride) == 0) {
        ++st.probes;
        if (!k.probe_liveness()) ++st.liveness_failures;
      }
      ++st.visited;
      if (st.visited >= max_states) return st;
      frontier.emplace_back(std::move(k), depth + 1);
    }
  }
  st.exhausted = true;  // every schedule prefix within the depth bound was explored
  return st;
}

// ---------------------------------------------------------------------------
// BRB search world: one channel (phase init, column 0), nodes 0..3.

struct BrbWorld {
  BrbSearchConfig cfg;
  Thresholds th = thresholds(kP);
  PeerMask correct = 0;
  NodeId byz = 0;  // meaningful only when a byzantine exists
  std::array<BrbInstance, 4> inst;                    // correct slots only are used
  std::array<std::optional<BrbSection>, 16> chan;     // latest-wins, [src*4+dst]

  static BrbWorld root(const BrbSearchConfig& cfg) {
    BrbWorld w;
    w.cfg = cfg;
    for (int i = 0; i < 4; ++i) w.inst[i].configure(static_cast<NodeId>(i), 0, 4);
    if (cfg.byz_originator) {
      w.byz = 0;
      w.correct = bit(1) | bit(2) | bit(3);
    } else if (cfg.forging_follower) {
      w.byz = 3;
      w.correct = bit(0) | bit(1) | bit(2);
      w.inst[0].broadcast(BrbPayload::val(0, 0), w.th);
    } else {
      w.correct = bit(0) | bit(1) | bit(2) | bit(3);
      w.inst[0].broadcast(BrbPayload::val(0, 0), w.th);
    }
    return w;
  }

  bool has_byz() const { return popcount(correct) < 4; }

  BrbSection byz_section(NodeId dst) const {
    BrbSection s;
    s.phase = Phase::Init;
    s.column = 0;
    if (cfg.byz_originator) {
      Value v = (cfg.equivocation_pattern >> dst) & 1 ? 1 : 0;
      BrbPayload p = BrbPayload::val(0, v);
      s.own = p;
      s.echo = p;
      if (cfg.forge_ready) s.ready = p;
    } else {
      // forging follower: vouches for a message the originator never sent
      BrbPayload p = BrbPayload::val(0, 1);
      s.echo = p;
      s.ready = p;
      s.done = true;
    }
    return s;
  }

  BrbSection correct_section(NodeId i) const {
    BrbSection s;
    s.phase = Phase::Init;
    s.column = 0;
    inst[i].fill_section(s);
    return s;
  }

  std::uint64_t hash() const {
    std::vector<std::uint8_t> b;
    serialize(b);
    return fnv1a(b.data(), b.size());
  }

  void serialize(std::vector<std::uint8_t>& b) const {
    for (int i = 0; i < 4; ++i)
      if (correct & bit(static_cast<NodeId>(i))) inst[i].serialize(b);
    for (const auto& c : chan) {
      if (!c) {
        b.push_back(0);
        continue;
      }
      b.push_back(1);
      auto put = [&](const std::optional<BrbPayload>& p) {
        if (!p) {
          b.push_back(0);
          return;
        }
        b.push_back(1);
        b.push_back(p->claimed);
        b.push_back(static_cast<std::uint8_t>(p->body));
        b.push_back(p->data);
      };
      put(c->own);
      put(c->echo);
      put(c->ready);
      b.push_back(c->done ? 1 : 0);
    }
  }

  void expand(std::vector<BrbWorld>& out) const {
    // correct iterations: gossip the current slice to every correct peer
    for (int i = 0; i < 4; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      BrbWorld child = *this;
      BrbSection s = correct_section(static_cast<NodeId>(i));
      for (int d = 0; d < 4; ++d) {
        if (d == i || !(correct & bit(static_cast<NodeId>(d)))) continue;
        child.chan[i * 4 + d] = s;
      }
      out.push_back(std::move(child));
    }
    // adversary injections, one destination at a time
    if (has_byz()) {
      for (int d = 0; d < 4; ++d) {
        if (!(correct & bit(static_cast<NodeId>(d)))) continue;
        BrbWorld child = *this;
        child.chan[byz * 4 + d] = byz_section(static_cast<NodeId>(d));
        out.push_back(std::move(child));
      }
    }
    // deliveries
    for (int s = 0; s < 4; ++s) {
      for (int d = 0; d < 4; ++d) {
        if (!chan[s * 4 + d]) continue;
        BrbWorld child = *this;
        child.inst[d].absorb(static_cast<NodeId>(s), *chan[s * 4 + d], th);
        child.chan[s * 4 + d].reset();
        out.push_back(std::move(child));
      }
    }
  }

  bool check_safety() const {
    // no-duplicity among correct observers
    std::optional<BrbPayload> seen;
    for (int i = 0; i < 4; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      auto d = inst[i].deliver(0);
      if (!d) continue;
      if (!seen) seen = *d;
      else if (!(*seen == *d)) return false;
      // validity: with a correct originator only its payload may be delivered
      if (!cfg.byz_originator && !(*d == BrbPayload::val(0, 0))) return false;
    }
    return true;
  }

  bool write_once_ok(const BrbWorld& parent) const {
    for (int i = 0; i < 4; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      auto a = parent.inst[i].deliver(0);
      auto b = inst[i].deliver(0);
      if (a && (!b || !(*a == *b))) return false;
    }
    return true;
  }

  bool probe_liveness() const {
    BrbWorld w = *this;
    for (int sweep = 0; sweep < 12; ++sweep) {
      for (int i = 0; i < 4; ++i) {
        if (!(correct & bit(static_cast<NodeId>(i)))) continue;
        BrbSection s = w.correct_section(static_cast<NodeId>(i));
        for (int d = 0; d < 4; ++d) {
          if (d == i || !(correct & bit(static_cast<NodeId>(d)))) continue;
          w.inst[d].absorb(static_cast<NodeId>(i), s, th);
        }
      }
    }
    if (!w.check_safety()) return false;
    if (!cfg.byz_originator) {
      // completion-1 and sender-side termination
      for (int i = 0; i < 4; ++i) {
        if (!(correct & bit(static_cast<NodeId>(i)))) continue;
        if (!w.inst[i].deliver(0)) return false;
      }
      if ((correct & bit(0)) && !w.inst[0].has_terminated(th)) return false;
    } else {
      // completion-2: a delivery anywhere spreads everywhere
      bool some = false;
      for (int i = 1; i < 4; ++i)
        if (inst[i].deliver(0)) some = true;
      if (some)
        for (int i = 1; i < 4; ++i)
          if (!w.inst[i].deliver(0)) return false;
    }
    return true;
  }
};

// ---------------------------------------------------------------------------
// BV search world: nodes 0..2 correct, node 3 the optional adversary.

struct BvWorld {
  BvSearchConfig cfg;
  Thresholds th = thresholds(kP);
  std::array<BvInstance, 3> inst;
  std::array<std::optional<std::uint16_t>, 16> chan;  // (lvlF | lvlT<<8) in flight

  static BvWorld root(const BvSearchConfig& cfg) {
    BvWorld w;
    w.cfg = cfg;
    for (int i = 0; i < 3; ++i) {
      w.inst[i].configure(static_cast<NodeId>(i), 4);
      w.inst[i].bv_broadcast(cfg.inputs[i] != 0, w.th);
    }
    return w;
  }

  std::uint8_t allowed_mask() const {
    std::uint8_t m = 0;
    for (int i = 0; i < 3; ++i) m |= bv_bit(cfg.inputs[i] != 0);
    return m;
  }

  std::uint64_t hash() const {
    std::vector<std::uint8_t> b;
    for (int i = 0; i < 3; ++i) inst[i].serialize(b);
    for (const auto& c : chan) {
      b.push_back(c ? 1 : 0);
      b.push_back(c ? static_cast<std::uint8_t>(*c & 0xff) : 0);
      b.push_back(c ? static_cast<std::uint8_t>(*c >> 8) : 0);
    }
    return fnv1a(b.data(), b.size());
  }

  void expand(std::vector<BvWorld>& out) const {
    for (int i = 0; i < 3; ++i) {
      BvWorld child = *this;
      for (int d = 0; d < 3; ++d)
        if (d != i)
          child.chan[i * 4 + d] = static_cast<std::uint16_t>(inst[i].level(false) |
                                                             (inst[i].level(true) << 8));
      out.push_back(std::move(child));
    }
    if (cfg.byz_pushes_false) {
      for (int d = 0; d < 3; ++d) {
        BvWorld child = *this;
        child.chan[3 * 4 + d] = static_cast<std::uint16_t>(0 | (kBvNoLevel << 8));
        out.push_back(std::move(child));
      }
    }
    for (int s = 0; s < 4; ++s) {
      for (int d = 0; d < 3; ++d) {
        if (!chan[s * 4 + d]) continue;
        BvWorld child = *this;
        std::uint16_t w = *chan[s * 4 + d];
        child.inst[d].absorb(static_cast<NodeId>(s), static_cast<std::uint8_t>(w & 0xff),
                             static_cast<std::uint8_t>(w >> 8), th);
        child.chan[s * 4 + d].reset();
        out.push_back(std::move(child));
      }
    }
  }

  bool check_safety() const {
    // BV-validity: binValues only contains values bv-broadcast by correct nodes
    std::uint8_t allowed = allowed_mask();
    for (int i = 0; i < 3; ++i)
      if (inst[i].bin_values() & ~allowed) return false;
    return true;
  }

  bool write_once_ok(const BvWorld& parent) const {
    // binValues grows monotonically within one activation
    for (int i = 0; i < 3; ++i)
      if (parent.inst[i].bin_values() & ~inst[i].bin_values()) return false;
    return true;
  }

  bool probe_liveness() const {
    BvWorld w = *this;
    for (int sweep = 0; sweep < 8; ++sweep)
      for (int i = 0; i < 3; ++i)
        for (int d = 0; d < 3; ++d)
          if (d != i)
            w.inst[d].absorb(static_cast<NodeId>(i), w.inst[i].level(false),
                             w.inst[i].level(true), th);
    // completion and uniform agreement on one nonempty set
    std::uint8_t first = w.inst[0].bin_values();
    if (!first) return false;
    for (int i = 1; i < 3; ++i)
      if (w.inst[i].bin_values() != first) return false;
    return w.check_safety();
  }
};

// ---------------------------------------------------------------------------
// Binary consensus search world: nodes 0..2 correct, node 3 the adversary.

struct BcWorld {
  BcSearchConfig cfg;
  Thresholds th = thresholds(kP);
  std::array<BinConInstance, 3> inst;
  std::array<std::optional<BcSection>, 16> chan;

  static BcWorld root(const BcSearchConfig& cfg) {
    BcWorld w;
    w.cfg = cfg;
    for (int i = 0; i < 3; ++i) {
      w.inst[i].configure(static_cast<NodeId>(i), 4, cfg.salt, cfg.round_cap);
      w.inst[i].propose(cfg.proposals[i] != 0, w.th);
    }
    return w;
  }

  BcSection byz_section(int variant) const {
    BcSection s;
    s.round = variant == 1 ? 2 : 1;
    s.rounds.resize(s.round);
    switch (variant) {
      case 0:
        s.rounds[0] = {0, 0, 1};  // asserts both values
        break;
      case 1:
        s.rounds[0] = {0, 0, 2};
        s.rounds[1] = {0, 0, 1};
        s.decided = 1;
        break;
      default:
        s.rounds[0] = {0, kBvNoLevel, 1};  // asserts False only
        s.decided = 0;
        break;
    }
    return s;
  }

  std::uint64_t hash() const {
    std::vector<std::uint8_t> b;
    for (int i = 0; i < 3; ++i) inst[i].serialize(b);
    for (const auto& c : chan) {
      if (!c) {
        b.push_back(0);
        continue;
      }
      b.push_back(1);
      b.push_back(static_cast<std::uint8_t>(c->round));
      for (const auto& r : c->rounds) {
        b.push_back(r.lvl_false);
        b.push_back(r.lvl_true);
        b.push_back(r.aux);
      }
      b.push_back(static_cast<std::uint8_t>(c->decided + 1));
    }
    return fnv1a(b.data(), b.size());
  }

  void expand(std::vector<BcWorld>& out) const {
    for (int i = 0; i < 3; ++i) {
      BcWorld child = *this;
      BcSection s;
      child.inst[i].fill_section(s);
      for (int d = 0; d < 3; ++d)
        if (d != i) child.chan[i * 4 + d] = s;
      out.push_back(std::move(child));
    }
    if (cfg.byz_flips) {
      for (int variant = 0; variant < 3; ++variant) {
        for (int d = 0; d < 3; ++d) {
          BcWorld child = *this;
          child.chan[3 * 4 + d] = byz_section(variant);
          out.push_back(std::move(child));
        }
      }
    }
    for (int s = 0; s < 4; ++s) {
      for (int d = 0; d < 3; ++d) {
        if (!chan[s * 4 + d]) continue;
        BcWorld child = *this;
        child.inst[d].absorb(static_cast<NodeId>(s), *chan[s * 4 + d], th);
        child.chan[s * 4 + d].reset();
        out.push_back(std::move(child));
      }
    }
  }

  bool proposals_unanimous(bool& v) const {
    v = cfg.proposals[0] != 0;
    for (int i = 1; i < 3; ++i)
      if ((cfg.proposals[i] != 0) != v) return false;
    return true;
  }

  bool check_safety() const {
    std::optional<DeliveryResult> seen;
    for (int i = 0; i < 3; ++i) {
      DeliveryResult r = inst[i].result();
      if (!r.is_decided()) continue;
      // agreement
      if (!seen) seen = r;
      else if (!(*seen == r)) return false;
      // validity: the decided boolean was proposed by a correct node
      bool v;
      if (proposals_unanimous(v) && r.value != static_cast<Value>(v ? 1 : 0)) return false;
    }
    return true;
  }

  bool write_once_ok(const BcWorld& parent) const {
    for (int i = 0; i < 3; ++i) {
      DeliveryResult a = parent.inst[i].result(), b = inst[i].result();
      if (!a.is_pending() && !(a == b)) return false;
    }
    return true;
  }

  bool probe_liveness() const {
    BcWorld w = *this;
    for (int sweep = 0; sweep < 40; ++sweep) {
      bool done = true;
      for (int i = 0; i < 3; ++i)
        if (w.inst[i].result().is_pending()) done = false;
      if (done) break;
      for (int i = 0; i < 3; ++i) {
        BcSection s;
        w.inst[i].fill_section(s);
        for (int d = 0; d < 3; ++d)
          if (d != i) w.inst[d].absorb(static_cast<NodeId>(i), s, th);
      }
    }
    for (int i = 0; i < 3; ++i)
      if (w.inst[i].result().is_pending()) return false;
    return w.check_safety();
  }
};

}  // namespace

SearchStats search_brb(const BrbSearchConfig& cfg) {
  return bfs(BrbWorld::root(cfg), cfg.max_states, cfg.probe_stride, cfg.max_depth);
}

SearchStats search_bv(const BvSearchConfig& cfg) {
  return bfs(BvWorld::root(cfg), cfg.max_states, cfg.probe_stride, cfg.max_depth);
}

SearchStats search_bc(const BcSearchConfig& cfg) {
  return bfs(BcWorld::root(cfg), cfg.max_states, cfg.probe_stride, cfg.max_depth);
}

}  // namespace ssmvc::exhaustive
