#include "ssmvc/oracle.hpp"

namespace ssmvc {

OracleNode::OracleNode(const NodeConfig& cfg, OracleMode mode)
    : cfg_(cfg), mode_(mode), th_(thresholds(cfg.params)) {
  for (int phs = 0; phs < 2; ++phs)
    for (int c = 0; c < cfg.params.n; ++c)
      brb_[phs][c].configure(cfg.id, static_cast<NodeId>(c), cfg.params.n);
  std::uint64_t salt = cfg.coin_seed ^ 0x9e3779b97f4a7c15ULL;  // same as object 0 of the stack
  bco_.configure(cfg.id, cfg.params.n, salt, cfg.round_cap);
}

Multiset OracleNode::rec() const {
  Multiset m;
  for (int l = 0; l < cfg_.params.n; ++l) {
    auto d = brb_[0][l].deliver(static_cast<NodeId>(l));
    if (!d) continue;
    if (d->body == Body::Val)
      m.add(static_cast<NodeId>(l), d->data);
    else
      m.add_error(static_cast<NodeId>(l));
  }
  return m;
}

int OracleNode::init_delivered_count() const {
  int c = 0;
  for (int l = 0; l < cfg_.params.n; ++l)
    if (brb_[0][l].deliver(static_cast<NodeId>(l))) ++c;
  return c;
}

void OracleNode::drive(std::uint64_t) {
  Value prop = cfg_.proposals[0].empty() ? 0 : cfg_.proposals[0][0];
  if (cfg_.strategy == Strategy::Collude) prop = cfg_.byz_value;

  BrbInstance& init_self = brb_[0][cfg_.id];
  BrbInstance& valid_self = brb_[1][cfg_.id];
  if (!init_self.has_broadcast()) init_self.broadcast(BrbPayload::val(cfg_.id, prop), th_);

  Multiset rc = rec();
  if (!valid_sent_ && rc.size() >= th_.n_minus_t) {
    bool x = equal(prop, rc) >= th_.n_minus_2t;
    valid_self.broadcast(BrbPayload::flag(cfg_.id, x), th_);
    valid_sent_ = true;
  }

  for (int j = 0; j < cfg_.params.n; ++j) {
    if (!delivered_[j].is_pending()) continue;
    auto ij = brb_[0][j].deliver(static_cast<NodeId>(j));
    auto vj = brb_[1][j].deliver(static_cast<NodeId>(j));
    if (!ij || !vj) continue;
    if (ij->body != Body::Val || vj->body != Body::Flag) continue;  // never satisfies the waits
    Value v = ij->data;
    bool x = vj->data != 0;
    if (x) {
      if (equal(v, rc) >= th_.n_minus_2t) delivered_[j] = DeliveryResult::decided(v);
    } else {
      if (differ(v, rc) >= th_.t_plus_1) delivered_[j] = DeliveryResult::error();
    }
  }

  if (mode_ != OracleMode::Mvc) return;

  int resolved = 0;
  for (int j = 0; j < cfg_.params.n; ++j)
    if (!delivered_[j].is_pending()) ++resolved;

  if (!bc_proposed_ && resolved >= th_.n_minus_t) {
    Multiset dm;
    for (int j = 0; j < cfg_.params.n; ++j) {
      if (delivered_[j].is_decided()) dm.add(static_cast<NodeId>(j), delivered_[j].value);
      else if (delivered_[j].is_error()) dm.add_error(static_cast<NodeId>(j));
    }
    int distinct = 0;
    bool same = false;
    for (int v = 0; v < cfg_.alphabet; ++v) {
      int c = equal(static_cast<Value>(v), dm);
      if (c > 0) ++distinct;
      if (c >= th_.n_minus_2t) same = true;
    }
    bc_proposed_ = true;
    bco_.propose(same && distinct == 1, th_);
  }
  bco_.progress(th_);

  if (bc_proposed_ && decision_.is_pending()) {
    DeliveryResult r = bco_.result();
    if (r.is_error() || (r.is_decided() && r.value == 0)) {
      decision_ = DeliveryResult::error();
    } else if (r.is_decided()) {
      Multiset dm;
      for (int j = 0; j < cfg_.params.n; ++j)
        if (delivered_[j].is_decided()) dm.add(static_cast<NodeId>(j), delivered_[j].value);
      for (int v = 0; v < cfg_.alphabet; ++v)
        if (equal(static_cast<Value>(v), dm) >= th_.n_minus_2t) {
          decision_ = DeliveryResult::decided(static_cast<Value>(v));
          break;
        }
    }
  }
}

std::vector<Message> OracleNode::tick(std::uint64_t step, Rng&) {
  if (cfg_.strategy == Strategy::Crash) return {};
  drive(step);
  if (cfg_.strategy == Strategy::DelayMax && step < cfg_.delay_until) return {};

  Message base;
  base.src = cfg_.id;
  for (int phs = 0; phs < 2; ++phs) {
    for (int c = 0; c < cfg_.params.n; ++c) {
      const BrbInstance& inst = brb_[phs][c];
      if (!inst.active()) continue;
      BrbSection s;
      s.obj = 0;
      s.phase = static_cast<Phase>(phs);
      s.column = static_cast<NodeId>(c);
      inst.fill_section(s);
      base.brb.push_back(std::move(s));
    }
  }
  if (mode_ == OracleMode::Mvc && bco_.active()) {
    BcSection s;
    s.obj = 0;
    bco_.fill_section(s);
    base.bc.push_back(std::move(s));
  }

  Value prop = cfg_.proposals[0].empty() ? 0 : cfg_.proposals[0][0];
  std::vector<Message> out;
  out.reserve(cfg_.params.n - 1);
  for (int d = 0; d < cfg_.params.n; ++d) {
    if (d == cfg_.id) continue;
    Message m = base;
    m.dst = static_cast<NodeId>(d);
    strategy_rewrite(m, cfg_, prop, m.dst);
    out.push_back(std::move(m));
  }
  return out;
}

void OracleNode::on_message(const Message& m, std::uint64_t step) {
  if (cfg_.strategy == Strategy::Crash) return;
  for (const auto& s : m.brb) {
    if (s.obj != 0 || s.column >= cfg_.params.n) continue;
    brb_[static_cast<int>(s.phase)][s.column].absorb(m.src, s, th_);
  }
  if (mode_ == OracleMode::Mvc)
    for (const auto& s : m.bc)
      if (s.obj == 0) bco_.absorb(m.src, s, th_);
  drive(step);
}

}  // namespace ssmvc
