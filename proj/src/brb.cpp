#include "ssmvc/brb.hpp"

namespace ssmvc {

void BrbInstance::broadcast(const BrbPayload& p, const Thresholds& th) {
  if (!own_) own_ = p;
  if (self_ == column_) claim_ = own_;
  stabilize(th);
  amplify(th);
}

bool BrbInstance::has_terminated(const Thresholds& th) const {
  PeerMask acks = done_from_;
  if (delivered_) acks |= bit(self_);
  return popcount(acks) >= th.n_minus_t;
}

void BrbInstance::absorb(NodeId from, const BrbSection& s, const Thresholds& th) {
  // The section is a replica of the peer's slots; records mirror it wholesale,
  // absent fields included, so any corrupted record heals on the next gossip.
  // A broadcast claim is honored only from the column owner; anything else is a
  // peer trying to squat someone else's channel.
  if (from == column_) claim_ = s.own;
  if (from != self_) {
    fresh_ |= bit(from);
    echo_[from] = s.echo;
    ready_[from] = s.ready;
    if (s.done)
      done_from_ |= bit(from);
    else
      done_from_ &= ~bit(from);
  }
  stabilize(th);
  amplify(th);
}

int BrbInstance::count_echo(const BrbPayload& p) const {
  int c = 0;
  for (int i = 0; i < n_; ++i)
    if (counted(i) && echo_[i] && *echo_[i] == p) ++c;
  return c;
}

int BrbInstance::count_ready(const BrbPayload& p) const {
  int c = 0;
  for (int i = 0; i < n_; ++i)
    if (counted(i) && ready_[i] && *ready_[i] == p) ++c;
  return c;
}

int BrbInstance::count_ready_others(const BrbPayload& p) const {
  int c = 0;
  for (int i = 0; i < n_; ++i)
    if (i != self_ && counted(i) && ready_[i] && *ready_[i] == p) ++c;
  return c;
}

void BrbInstance::stabilize(const Thresholds& th) {
  // the channel owner's claim is its own slot, whatever state that slot is in
  if (self_ == column_ && own_ && (!claim_ || !(*claim_ == *own_))) claim_ = own_;

  // the own echo mirrors the recorded originator claim; with a correct originator
  // the claim is constant and this acts exactly once
  if (claim_ && (!echo_[self_] || !(*echo_[self_] == *claim_))) echo_[self_] = *claim_;

  // an own ready that fewer than t+1 echoes and fewer than t+1 other readies
  // vouch for is a leftover of an arbitrary start: real readies are grounded in
  // an echo quorum or t+1 ready records, and at least t+1 of the backers of a
  // quorum are correct nodes whose slots persist. Clear it and let amplification
  // re-derive one from the records.
  if (ready_[self_] && !delivered_) {
    const BrbPayload& p = *ready_[self_];
    bool evidence = count_echo(p) >= th.t_plus_1 || count_ready_others(p) >= th.t_plus_1;
    if (!evidence) ready_[self_].reset();
  }

  // the delivered cache is a memo of a ready quorum; a real quorum leaves at least
  // t+1 standing records (its correct members never retract), so a cache entry
  // with less backing can only be an injected state and is re-derived
  if (delivered_ && count_ready(*delivered_) < th.t_plus_1) delivered_.reset();
}

void BrbInstance::amplify(const Thresholds& th) {
  if (!ready_[self_]) {
    for (int i = 0; i < n_ && !ready_[self_]; ++i)
      if (echo_[i] && count_echo(*echo_[i]) >= th.echo_quorum) ready_[self_] = *echo_[i];
  }
  if (!ready_[self_]) {
    for (int i = 0; i < n_ && !ready_[self_]; ++i)
      if (ready_[i] && count_ready(*ready_[i]) >= th.t_plus_1) ready_[self_] = *ready_[i];
  }
  if (!delivered_) {
    for (int i = 0; i < n_ && !delivered_; ++i)
      if (ready_[i] && count_ready(*ready_[i]) >= th.two_t_plus_1) delivered_ = *ready_[i];
  }
}

bool BrbInstance::active() const {
  if (own_ || claim_ || delivered_ || done_from_ || fresh_) return true;
  for (int i = 0; i < n_; ++i)
    if (echo_[i] || ready_[i]) return true;
  return false;
}

void BrbInstance::recycle() {
  own_.reset();
  claim_.reset();
  for (auto& e : echo_) e.reset();
  for (auto& r : ready_) r.reset();
  delivered_.reset();
  done_from_ = 0;
  fresh_ = 0;
}

namespace {
void put_payload(std::vector<std::uint8_t>& out, const std::optional<BrbPayload>& p) {
  if (!p) {
    out.push_back(0);
    return;
  }
  out.push_back(1);
  out.push_back(p->claimed);
  out.push_back(static_cast<std::uint8_t>(p->body));
  out.push_back(p->data);
}
}  // namespace

void BrbInstance::serialize(std::vector<std::uint8_t>& out) const {
  put_payload(out, own_);
  put_payload(out, claim_);
  for (int i = 0; i < n_; ++i) put_payload(out, echo_[i]);
  for (int i = 0; i < n_; ++i) put_payload(out, ready_[i]);
  put_payload(out, delivered_);
  out.push_back(static_cast<std::uint8_t>(done_from_ & 0xff));
  out.push_back(static_cast<std::uint8_t>(done_from_ >> 8));
  out.push_back(static_cast<std::uint8_t>(fresh_ & 0xff));
  out.push_back(static_cast<std::uint8_t>(fresh_ >> 8));
}

}  // namespace ssmvc
