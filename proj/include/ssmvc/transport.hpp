#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ssmvc/core.hpp"
#include "ssmvc/wire.hpp"

namespace ssmvc {

enum class EventKind : std::uint8_t {
  Tick,        // do-forever iteration at `node`
  Send,        // a=src b=dst, seq, payload=digest
  Recv,        // a=src b=dst, seq, payload=digest
  Drop,        // a=src b=dst, seq (capacity overflow)
  BrbDeliver,  // observer `node`, obj, a=phase, b=column, payload=packed payload
  VbbDeliver,  // observer `node`, obj, a=branch, b=column, payload=outcome
  BvDeliver,   // observer `node`, obj, a=binValues mask
  Decide,      // observer `node`, obj, a=branch, payload=outcome
  Propose,     // `node`, obj, payload=value
  Bcast,       // `node`, obj, a=phase, payload=packed payload
  Recycle,     // `node`, obj
  Corrupt,     // `node`, payload=path digest
};

const char* event_kind_name(EventKind k);
std::optional<EventKind> event_kind_from(const std::string& s);

struct TraceEvent {
  std::uint64_t step = 0;
  std::int32_t cycle = -1;  // asynchronous-cycle ordinal, -1 when not applicable
  EventKind kind = EventKind::Tick;
  NodeId node = 0;
  std::uint8_t obj = 0;
  std::uint8_t a = 0;
  std::uint8_t b = 0;
  std::uint32_t seq = 0;
  std::uint64_t payload = 0;
};

/// Append-only ordered event log plus scenario metadata; the unit every verdict
/// and measurement is recomputed from.
struct Trace {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<TraceEvent> events;

  void add_meta(const std::string& k, const std::string& v) { meta.emplace_back(k, v); }
  std::string meta_value(const std::string& k) const;

  void add(TraceEvent e) { events.push_back(e); }

  // Line-delimited export: '# key value' meta lines, then one record per event with
  // stable field order: step cycle node kind instance seq payload.
  std::string render() const;
  static std::optional<Trace> parse(const std::string& text);
};

enum class PolicyKind : std::uint8_t { Fifo, Random, AdversarialDelay, UnfairThenFair };

const char* policy_name(PolicyKind k);
std::optional<PolicyKind> policy_from(const std::string& s);

struct SchedulerPolicy {
  PolicyKind kind = PolicyKind::Fifo;
  PeerMask victims = 0;        // starved set for the unfair policies
  std::uint64_t until_step = 0;  // budget: starvation ends here

  // First step from which the fair-execution guarantee holds.
  std::uint64_t fair_from() const {
    return (kind == PolicyKind::Fifo || kind == PolicyKind::Random) ? 0 : until_step;
  }
};

enum class OverflowPolicy : std::uint8_t { DropOldest, DropNewest };

struct Channel {
  std::deque<Message> q;
  std::uint32_t next_seq = 0;   // per-channel send counter, tags trace records
  std::deque<std::uint32_t> seqs;
};

struct StepResult {
  bool progressed = false;
  bool was_tick = false;
  NodeId actor = 0;
};

struct LayerCounts {
  std::uint64_t messages = 0;
  std::uint64_t brb_sections = 0;
  std::uint64_t bv_sections = 0;
  std::uint64_t bc_sections = 0;
};

/**
 * Deterministic discrete-event world over any message-driven node type.
 *
 * NodeT must provide: id(), tick_enabled(step) -> bool,
 * tick(step, Rng&) -> std::vector<Message>, on_message(const Message&, step).
 *
 * The world owns all mutation: one step() executes exactly one receive or one
 * do-forever iteration at one node. (seed, scenario) -> trace is a pure function.
 */
template <class NodeT>
class World {
 public:
  World(const SystemParams& params, SchedulerPolicy policy, std::uint64_t seed,
        OverflowPolicy overflow = OverflowPolicy::DropOldest)
      : params_(params),
        policy_(policy),
        rng_(seed ^ 0x5851f42d4c957f2dULL),
        overflow_(overflow),
        channels_(static_cast<std::size_t>(params.n) * params.n) {}

  void add_node(NodeT n) { nodes_.push_back(std::move(n)); }

  NodeT& node(NodeId i) { return nodes_[i]; }
  const NodeT& node(NodeId i) const { return nodes_[i]; }
  std::vector<NodeT>& nodes() { return nodes_; }
  const std::vector<NodeT>& nodes() const { return nodes_; }

  const SystemParams& params() const { return params_; }
  const SchedulerPolicy& policy() const { return policy_; }
  std::uint64_t clock() const { return clock_; }
  Trace& trace() { return trace_; }
  const Trace& trace() const { return trace_; }
  LayerCounts& counts() { return counts_; }

  PeerMask& crashed() { return crashed_; }

  Channel& channel(NodeId src, NodeId dst) {
    return channels_[static_cast<std::size_t>(src) * params_.n + dst];
  }

  // Removes every in-transit message (the recycler's channel reset).
  void drain_channels() {
    for (auto& c : channels_) {
      c.q.clear();
      c.seqs.clear();
    }
  }

  bool channels_empty() const {
    for (const auto& c : channels_)
      if (!c.q.empty()) return false;
    return true;
  }

  // One atomic step; returns progressed=false on quiescence.
  StepResult step();

  template <class Stop>
  std::pair<bool, std::uint64_t> run_until(Stop stop, std::uint64_t max_steps) {
    std::uint64_t steps = 0;
    while (steps < max_steps) {
      if (stop(*this)) return {true, steps};
      if (!step().progressed) return {stop(*this), steps};
      ++steps;
    }
    return {stop(*this), steps};
  }

  void push_message(Message m);

 private:
  struct Action {
    bool is_tick;
    NodeId node;   // tick target, or receive dst
    NodeId src;    // receive source
  };

  void enumerate_actions(std::vector<Action>& out) const;
  Action pick(const std::vector<Action>& actions);
  void execute(const Action& a);

  SystemParams params_;
  SchedulerPolicy policy_;
  Rng rng_;
  OverflowPolicy overflow_;
  std::vector<Channel> channels_;
  std::vector<NodeT> nodes_;
  std::uint64_t clock_ = 0;
  Trace trace_;
  LayerCounts counts_;
  PeerMask crashed_ = 0;
  int rr_node_ = 0;  // fifo cursor
};

template <class NodeT>
void World<NodeT>::push_message(Message m) {
  if (m.dst >= params_.n) return;
  if (crashed_ & bit(m.dst)) return;  // silently removed, the node is gone
  Channel& ch = channel(m.src, m.dst);
  std::uint32_t seq = ch.next_seq++;
  std::uint64_t digest = m.digest();
  if (static_cast<int>(ch.q.size()) >= params_.capacity) {
    if (overflow_ == OverflowPolicy::DropOldest) {
      trace_.add({clock_, -1, EventKind::Drop, m.dst, 0, m.src, m.dst, ch.seqs.front(), 0});
      ch.q.pop_front();
      ch.seqs.pop_front();
    } else {
      trace_.add({clock_, -1, EventKind::Drop, m.dst, 0, m.src, m.dst, seq, 0});
      return;
    }
  }
  counts_.messages++;
  counts_.brb_sections += m.brb.size();
  counts_.bv_sections += m.bv.size();
  counts_.bc_sections += m.bc.size();
  trace_.add({clock_, -1, EventKind::Send, m.src, 0, m.src, m.dst, seq, digest});
  ch.q.push_back(std::move(m));
  ch.seqs.push_back(seq);
}

template <class NodeT>
void World<NodeT>::enumerate_actions(std::vector<Action>& out) const {
  out.clear();
  for (int s = 0; s < params_.n; ++s)
    for (int d = 0; d < params_.n; ++d)
      if (!channels_[static_cast<std::size_t>(s) * params_.n + d].q.empty())
        out.push_back({false, static_cast<NodeId>(d), static_cast<NodeId>(s)});
  for (const auto& n : nodes_)
    if (!(crashed_ & bit(n.id())) && n.tick_enabled(clock_)) out.push_back({true, n.id(), 0});
}

template <class NodeT>
typename World<NodeT>::Action World<NodeT>::pick(const std::vector<Action>& actions) {
  bool starving = (policy_.kind == PolicyKind::AdversarialDelay ||
                   policy_.kind == PolicyKind::UnfairThenFair) &&
                  clock_ < policy_.until_step;
  std::vector<Action> pool;
  if (starving) {
    for (const auto& a : actions) {
      bool hits_victim = (policy_.victims & bit(a.node)) ||
                         (!a.is_tick && (policy_.victims & bit(a.src)));
      if (!hits_victim) pool.push_back(a);
    }
    if (pool.empty()) pool = actions;
    return pool[rng_.below(pool.size())];
  }
  if (policy_.kind == PolicyKind::Random || policy_.kind == PolicyKind::AdversarialDelay)
    return actions[rng_.below(actions.size())];

  // fifo: round-robin over nodes; drain the node's oldest pending message, tick when idle
  for (int visited = 0; visited < params_.n; ++visited) {
    NodeId nid = static_cast<NodeId>(rr_node_);
    // oldest incoming message across sources
    int best_src = -1;
    std::uint64_t best_step = ~0ULL;
    std::uint32_t best_seq = 0;
    for (int s = 0; s < params_.n; ++s) {
      const Channel& ch = channels_[static_cast<std::size_t>(s) * params_.n + nid];
      if (ch.q.empty()) continue;
      std::uint64_t st = ch.q.front().sent_step;
      std::uint32_t sq = ch.seqs.front();
      if (st < best_step || (st == best_step && (best_src < 0 || sq < best_seq))) {
        best_step = st;
        best_seq = sq;
        best_src = s;
      }
    }
    if (best_src >= 0) return {false, nid, static_cast<NodeId>(best_src)};
    if (!(crashed_ & bit(nid)) && nodes_[nid].tick_enabled(clock_)) {
      rr_node_ = (rr_node_ + 1) % params_.n;
      return {true, nid, 0};
    }
    rr_node_ = (rr_node_ + 1) % params_.n;
  }
  return actions[0];
}

template <class NodeT>
void World<NodeT>::execute(const Action& a) {
  if (a.is_tick) {
    trace_.add({clock_, -1, EventKind::Tick, a.node, 0, 0, 0, 0, 0});
    auto msgs = nodes_[a.node].tick(clock_, rng_);
    for (auto& m : msgs) {
      m.src = a.node;
      m.sent_step = clock_;
      push_message(std::move(m));
    }
  } else {
    Channel& ch = channel(a.src, a.node);
    Message m = std::move(ch.q.front());
    std::uint32_t seq = ch.seqs.front();
    ch.q.pop_front();
    ch.seqs.pop_front();
    trace_.add({clock_, -1, EventKind::Recv, a.node, 0, a.src, a.node, seq, m.digest()});
    nodes_[a.node].on_message(m, clock_);
  }
}

template <class NodeT>
StepResult World<NodeT>::step() {
  std::vector<Action> actions;
  enumerate_actions(actions);
  if (actions.empty()) return {};
  Action a = pick(actions);
  execute(a);
  ++clock_;
  return {true, a.is_tick, a.node};
}

}  // namespace ssmvc
