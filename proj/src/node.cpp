#include "ssmvc/node.hpp"

namespace ssmvc {

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Correct: return "correct";
    case Strategy::Crash: return "crash";
    case Strategy::Equivocate: return "equivocate";
    case Strategy::SpamInvalid: return "spam-invalid";
    case Strategy::Collude: return "collude-value";
    case Strategy::DelayMax: return "delay-maximal";
  }
  return "?";
}

std::optional<Strategy> strategy_from(const std::string& s) {
  if (s == "correct") return Strategy::Correct;
  if (s == "crash") return Strategy::Crash;
  if (s == "equivocate") return Strategy::Equivocate;
  if (s == "spam-invalid") return Strategy::SpamInvalid;
  if (s == "collude-value") return Strategy::Collude;
  if (s == "delay-maximal") return Strategy::DelayMax;
  return std::nullopt;
}

std::uint64_t pack_outcome(const DeliveryResult& r) {
  return (static_cast<std::uint64_t>(r.kind) << 8) | r.value;
}

std::uint64_t pack_payload(const BrbPayload& p) {
  return (static_cast<std::uint64_t>(p.claimed) << 16) |
         (static_cast<std::uint64_t>(p.body) << 8) | p.data;
}

ProtocolNode::ProtocolNode(const NodeConfig& cfg) : cfg_(cfg) {
  objs_.resize(cfg.delta);
  proposed_.assign(cfg.delta, 0);
  for (int o = 0; o < cfg.delta; ++o) {
    std::uint64_t salt = cfg.coin_seed ^ (0x9e3779b97f4a7c15ULL * (o + 1));
    objs_[o].configure(cfg.id, cfg.params, cfg.alphabet, cfg.mode, salt, cfg.round_cap);
  }
}

Value ProtocolNode::proposal(int epoch, int o) const {
  const auto& per_epoch = cfg_.proposals[epoch % 2];
  const auto& v = per_epoch.empty() ? cfg_.proposals[0] : per_epoch;
  if (v.empty()) return 0;
  return v[std::min<std::size_t>(o, v.size() - 1)];
}

std::vector<Message> ProtocolNode::tick(std::uint64_t step, Rng& rng) {
  if (cfg_.strategy == Strategy::Crash) return {};

  Value prop = proposal(epoch_, cur_obj_);
  if (cfg_.strategy == Strategy::Collude) prop = cfg_.byz_value;

  if (!proposed_[cur_obj_]) {
    objs_[cur_obj_].propose(prop);
    proposed_[cur_obj_] = 1;
  }
  for (int o = 0; o <= cur_obj_; ++o) objs_[o].tick();
  if (cur_obj_ + 1 < cfg_.delta && !objs_[cur_obj_].result().is_pending()) ++cur_obj_;

  if (cfg_.strategy == Strategy::DelayMax && step < cfg_.delay_until) return {};

  Message base;
  base.src = cfg_.id;
  for (int o = 0; o <= cur_obj_; ++o)
    objs_[o].fill_sections(static_cast<std::uint8_t>(o), base.brb, base.bv, base.bc);

  std::vector<Message> out;
  out.reserve(cfg_.params.n - 1);
  for (int d = 0; d < cfg_.params.n; ++d) {
    if (d == cfg_.id) continue;
    Message m = base;
    m.dst = static_cast<NodeId>(d);
    apply_strategy(m, m.dst, rng);
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

void rewrite(std::optional<BrbPayload>& slot, const BrbPayload& from, const BrbPayload& to) {
  if (slot && *slot == from) *slot = to;
}

void rewrite_all(BrbSection& s, const BrbPayload& from, const BrbPayload& to) {
  rewrite(s.own, from, to);
  rewrite(s.echo, from, to);
  rewrite(s.ready, from, to);
}

}  // namespace

void strategy_rewrite(Message& m, const NodeConfig& cfg, Value honest_prop, NodeId dst) {
  if (cfg.strategy == Strategy::Equivocate) {
    // second half of the peers sees the alternative value on the own INIT channel
    if (dst % 2 == 1) {
      Value a = honest_prop;
      Value alt =
          cfg.byz_value != a ? cfg.byz_value : static_cast<Value>((a + 1) % cfg.alphabet);
      for (auto& s : m.brb) {
        if (s.phase != Phase::Init || s.column != cfg.id) continue;
        rewrite_all(s, BrbPayload::val(cfg.id, a), BrbPayload::val(cfg.id, alt));
      }
    }
    return;
  }
  if (cfg.strategy == Strategy::SpamInvalid) {
    int variant = static_cast<int>((cfg.coin_seed ^ cfg.id) % 4);
    BrbPayload init_honest = BrbPayload::val(cfg.id, honest_prop);
    for (auto& s : m.brb) {
      if (s.column != cfg.id) continue;
      if (s.phase == Phase::Init) {
        BrbPayload bad = init_honest;
        switch (variant) {
          case 0: bad.claimed = static_cast<NodeId>((cfg.id + 1) % cfg.params.n); break;
          case 1: bad = BrbPayload::junk(cfg.id, 0xee); break;
          case 2: bad.data = static_cast<Value>(cfg.alphabet); break;
          default: break;  // variant 3 corrupts the VALID phase instead
        }
        if (variant != 3) rewrite_all(s, init_honest, bad);
      } else if (variant == 3) {
        // VALID carrying a value where a boolean belongs
        for (auto* slot : {&s.own, &s.echo, &s.ready})
          if (*slot && (*slot)->claimed == cfg.id && (*slot)->body == Body::Flag)
            **slot = BrbPayload::val(cfg.id, honest_prop);
      }
    }
    return;
  }
}

void ProtocolNode::apply_strategy(Message& m, NodeId dst, Rng&) const {
  strategy_rewrite(m, cfg_, proposal(epoch_, cur_obj_), dst);
}

void ProtocolNode::on_message(const Message& m, std::uint64_t) {
  if (cfg_.strategy == Strategy::Crash) return;
  for (const auto& s : m.brb)
    if (s.obj < cfg_.delta) objs_[s.obj].absorb_brb(m.src, s);
  for (const auto& s : m.bv)
    if (s.obj < cfg_.delta) objs_[s.obj].absorb_bv(m.src, s.lvl_false, s.lvl_true);
  for (const auto& s : m.bc)
    if (s.obj < cfg_.delta) objs_[s.obj].absorb_bc(m.src, s);
}

void ProtocolNode::recycle_all() {
  for (auto& o : objs_) o.recycle();
  std::fill(proposed_.begin(), proposed_.end(), 0);
  cur_obj_ = 0;
  ++epoch_;
}

void ProtocolNode::serialize(std::vector<std::uint8_t>& out) const {
  for (const auto& o : objs_) o.serialize(out);
}

}  // namespace ssmvc
