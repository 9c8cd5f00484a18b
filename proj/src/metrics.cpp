#include "ssmvc/metrics.hpp"

#include <array>
#include <deque>

namespace ssmvc {

std::vector<std::uint64_t> crwf_rounds(const Trace& t, PeerMask correct, int n, int n_minus_t,
                                       std::uint64_t from_step, std::uint64_t to_step) {
  std::vector<std::uint64_t> boundaries;
  std::array<bool, kMaxNodes> sent{};
  std::array<PeerMask, kMaxNodes> got{};
  auto reset = [&] {
    sent.fill(false);
    got.fill(0);
  };
  reset();
  auto complete = [&] {
    for (int i = 0; i < n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      if (!sent[i] || popcount(got[i]) < n_minus_t) return false;
    }
    return true;
  };
  for (const auto& e : t.events) {
    if (e.step < from_step || e.step >= to_step) continue;
    if (e.kind == EventKind::Tick && (correct & bit(e.node))) {
      sent[e.node] = true;
    } else if (e.kind == EventKind::Recv && (correct & bit(e.b)) && sent[e.b]) {
      got[e.b] |= bit(e.a);
    } else {
      continue;
    }
    if (complete()) {
      boundaries.push_back(e.step);
      reset();
    }
  }
  return boundaries;
}

std::vector<std::uint64_t> acaf_cycles(const Trace& t, PeerMask correct, int n,
                                       std::uint64_t fair_from) {
  std::vector<std::uint64_t> boundaries;

  // send-step lookup per channel, FIFO with drops
  struct ChanQ {
    std::deque<std::uint64_t> sent_steps;
    std::deque<std::uint32_t> seqs;
  };
  std::array<std::array<ChanQ, kMaxNodes>, kMaxNodes> chan{};

  struct Pair {
    std::int64_t leg1 = -1;  // receive step of the i->j leg, -1 while open
    bool done = false;
  };
  std::array<std::array<Pair, kMaxNodes>, kMaxNodes> pair{};

  std::uint64_t cycle_start = fair_from;
  auto reset_pairs = [&] {
    for (auto& row : pair)
      for (auto& p : row) p = Pair{};
  };
  reset_pairs();

  auto all_done = [&] {
    for (int i = 0; i < n; ++i) {
      if (!(correct & bit(static_cast<NodeId>(i)))) continue;
      for (int j = 0; j < n; ++j) {
        if (i == j || !(correct & bit(static_cast<NodeId>(j)))) continue;
        if (!pair[i][j].done) return false;
      }
    }
    return true;
  };

  for (const auto& e : t.events) {
    if (e.kind == EventKind::Send) {
      chan[e.a][e.b].sent_steps.push_back(e.step);
      chan[e.a][e.b].seqs.push_back(e.seq);
      continue;
    }
    if (e.kind == EventKind::Drop) {
      // drop-oldest removes the channel front; drop-newest never enqueued it
      auto& q = chan[e.a][e.b];
      if (!q.seqs.empty() && q.seqs.front() == e.seq) {
        q.seqs.pop_front();
        q.sent_steps.pop_front();
      }
      continue;
    }
    if (e.kind != EventKind::Recv) continue;
    auto& q = chan[e.a][e.b];
    // skip send records of messages this receive supersedes (drops already removed)
    while (!q.seqs.empty() && q.seqs.front() < e.seq) {
      q.seqs.pop_front();
      q.sent_steps.pop_front();
    }
    if (q.seqs.empty() || q.seqs.front() != e.seq) continue;
    std::uint64_t sent_step = q.sent_steps.front();
    q.seqs.pop_front();
    q.sent_steps.pop_front();

    NodeId src = e.a, dst = e.b;
    if (e.step < fair_from) continue;
    if (!(correct & bit(src)) || !(correct & bit(dst))) continue;

    // leg 1 of (src -> dst), leg 2 closes (dst -> src)'s open round-trips
    Pair& fwd = pair[src][dst];
    if (!fwd.done && fwd.leg1 < 0 && sent_step >= cycle_start)
      fwd.leg1 = static_cast<std::int64_t>(e.step);
    Pair& rev = pair[dst][src];
    if (!rev.done && rev.leg1 >= 0 && sent_step >= static_cast<std::uint64_t>(rev.leg1))
      rev.done = true;

    if (all_done()) {
      boundaries.push_back(e.step);
      cycle_start = e.step;
      reset_pairs();
    }
  }
  return boundaries;
}

int interval_index(const std::vector<std::uint64_t>& boundaries, std::uint64_t step) {
  int idx = 1;
  for (auto b : boundaries) {
    if (step > b) ++idx;
    else break;
  }
  return idx;
}

void label_cycles(Trace& t, PeerMask correct, int n, std::uint64_t fair_from) {
  auto bounds = acaf_cycles(t, correct, n, fair_from);
  for (auto& e : t.events) {
    if (e.step < fair_from) {
      e.cycle = -1;
      continue;
    }
    e.cycle = interval_index(bounds, e.step);
  }
}

}  // namespace ssmvc
