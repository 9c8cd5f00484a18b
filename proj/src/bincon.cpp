#include "ssmvc/bincon.hpp"

namespace ssmvc {

void BinConInstance::configure(NodeId self, int n, std::uint64_t coin_salt, int round_cap) {
  self_ = self;
  n_ = n;
  coin_salt_ = coin_salt;
  round_cap_ = round_cap;
  coin_override_.assign(round_cap_ + 2, -1);
  rounds_.resize(round_cap_);
  for (auto& r : rounds_) r.bv.configure(self, n);
  decided_seen_.fill(-1);
}

bool BinConInstance::coin(int round) const {
  if (round >= 0 && round < static_cast<int>(coin_override_.size()) && coin_override_[round] >= 0)
    return coin_override_[round] != 0;
  std::uint64_t x = coin_salt_ + 0x632be59bd9b4e019ULL * static_cast<std::uint64_t>(round);
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return ((x ^ (x >> 31)) & 1) != 0;
}

void BinConInstance::override_coin(int round, bool value) {
  if (round >= 0 && round < static_cast<int>(coin_override_.size()))
    coin_override_[round] = value ? 1 : 0;
}

void BinConInstance::propose(bool b, const Thresholds& th) {
  if (round_ != 0) return;
  round_ = 1;
  est_ = b ? 1 : 0;
  rounds_[0].bv.bv_broadcast(b, th);
  progress(th);
}

void BinConInstance::stabilize(const Thresholds&) {
  est_ &= 1;

  // The round counter presumes a played history: a vote on record in every
  // earlier round. A counter pointing past an unplayed round is an arbitrary
  // starting state; rejoin at the first round the local history does not cover.
  // In clean runs the vote is always placed before the round advances.
  if (round_ > 1) {
    int upto = std::min<int>(round_, round_cap_ + 1);
    for (int r = 1; r < upto; ++r) {
      if (!rounds_[r - 1].my_aux) {
        round_ = static_cast<std::uint16_t>(r);
        break;
      }
    }
  }

  // Object-local invariants: any outcome presumes an invoked object, and the
  // error symbol presumes an exhausted round counter. States violating them are
  // arbitrary starting states and reset to bottom. A *consistent-looking* forced
  // decision is deliberately left standing: detecting it is the consistency
  // test's job one layer up.
  if (!result_.is_pending() && round_ == 0) result_ = DeliveryResult::pending();
  if (result_.is_error() && round_ <= round_cap_) result_ = DeliveryResult::pending();

  // A vote outside the round's delivered set can never be counted; clear it so a
  // fresh pick from real evidence replaces it. In clean runs binValues only grows
  // and votes are picked from it, so this never fires.
  int upto = std::min<int>(round_, round_cap_);
  for (int r = 1; r <= upto; ++r) {
    Round& rr = rounds_[r - 1];
    if (rr.my_aux && !(rr.bv.bin_values() & rr.my_aux)) rr.my_aux = 0;
  }
}

void BinConInstance::absorb(NodeId from, const BcSection& s, const Thresholds& th) {
  // records mirror the peer's stream wholesale; rounds it has not reached are
  // implicitly empty, which lets injected future-round garbage heal
  int upto = std::min<int>(std::min<int>(s.round, static_cast<int>(s.rounds.size())),
                           round_cap_);
  for (int r = 1; r <= upto; ++r) {
    const BcRoundWire& w = s.rounds[r - 1];
    rounds_[r - 1].bv.absorb(from, w.lvl_false, w.lvl_true, th);
    rounds_[r - 1].aux_seen[from] = w.aux;
  }
  for (int r = upto + 1; r <= round_cap_; ++r) {
    Round& rr = rounds_[r - 1];
    if (!rr.aux_seen[from] && !rr.bv.seen_any(from)) continue;
    rr.bv.absorb(from, kBvNoLevel, kBvNoLevel, th);
    rr.aux_seen[from] = 0;
  }
  decided_seen_[from] = s.decided;
  progress(th);
}

void BinConInstance::progress(const Thresholds& th) {
  stabilize(th);
  if (round_ == 0) return;

  // adopt a decision reported by t+1 distinct nodes (at least one correct)
  if (!result_.is_decided() && !result_.is_error()) {
    for (int b = 0; b <= 1; ++b) {
      int c = 0;
      for (int i = 0; i < n_; ++i)
        if (decided_seen_[i] == b) ++c;
      if (c >= th.t_plus_1) {
        result_ = DeliveryResult::decided(static_cast<Value>(b));
        est_ = static_cast<std::uint8_t>(b);
        break;
      }
    }
  }

  // the current round always carries this node's estimate, whether the object was
  // invoked here or woke up from an injected state
  if (round_ <= round_cap_) rounds_[round_ - 1].bv.bv_broadcast(est_ != 0, th);

  for (;;) {
    if (round_ > round_cap_) {
      if (result_.is_pending()) result_ = DeliveryResult::error();
      return;
    }
    Round& r = rounds_[round_ - 1];
    std::uint8_t bins = r.bv.bin_values();

    if (!r.my_aux) {
      if (!bins) return;
      if (bins == kBvFalse || bins == kBvTrue)
        r.my_aux = bins;
      else
        r.my_aux = bv_bit(est_ != 0);
    }

    // n-t distinct AUX votes whose values lie inside this round's binValues
    int votes = 0;
    std::uint8_t values = 0;
    for (int i = 0; i < n_; ++i) {
      std::uint8_t a = (i == self_) ? r.my_aux : r.aux_seen[i];
      if (a && (bins & a)) {
        ++votes;
        values |= a;
      }
    }
    if (votes < th.n_minus_t) return;

    bool c = coin(round_);
    if (values == kBvFalse || values == kBvTrue) {
      bool b = values == kBvTrue;
      est_ = b ? 1 : 0;
      if (b == c && result_.is_pending()) result_ = DeliveryResult::decided(static_cast<Value>(b));
    } else {
      est_ = c ? 1 : 0;
    }

    ++round_;
    if (round_ <= round_cap_) rounds_[round_ - 1].bv.bv_broadcast(est_ != 0, th);
  }
}

void BinConInstance::fill_section(BcSection& s) const {
  s.round = round_;
  int upto = std::min<int>(round_, round_cap_);
  s.rounds.resize(upto);
  for (int r = 1; r <= upto; ++r) {
    s.rounds[r - 1].lvl_false = rounds_[r - 1].bv.level(false);
    s.rounds[r - 1].lvl_true = rounds_[r - 1].bv.level(true);
    s.rounds[r - 1].aux = rounds_[r - 1].my_aux;
  }
  s.decided = result_.is_decided() ? static_cast<std::int8_t>(result_.value) : -1;
}

void BinConInstance::recycle() {
  round_ = 0;
  est_ = 0;
  result_ = DeliveryResult::pending();
  for (auto& r : rounds_) r.recycle();
  decided_seen_.fill(-1);
}

void BinConInstance::serialize(std::vector<std::uint8_t>& out) const {
  out.push_back(static_cast<std::uint8_t>(round_ & 0xff));
  out.push_back(static_cast<std::uint8_t>(round_ >> 8));
  out.push_back(est_);
  out.push_back(static_cast<std::uint8_t>(result_.kind));
  out.push_back(result_.value);
  for (const auto& r : rounds_) {
    r.bv.serialize(out);
    for (int i = 0; i < n_; ++i) out.push_back(r.aux_seen[i]);
    out.push_back(r.my_aux);
  }
  for (int i = 0; i < n_; ++i) out.push_back(static_cast<std::uint8_t>(decided_seen_[i] + 1));
}

}  // namespace ssmvc
