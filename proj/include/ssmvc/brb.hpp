#pragma once

#include <array>
#include <optional>

#include "ssmvc/core.hpp"
#include "ssmvc/wire.hpp"

namespace ssmvc {

/**
 * Replica-local state of one reliable-broadcast channel: a Bracha-style ECHO/READY
 * machine with a query interface. A channel belongs to one originator ("column");
 * only that node legitimately broadcasts on it. Progress is driven by absorbing the
 * continuously retransmitted state of peers, so a lost or corrupted-away message is
 * re-supplied by the next gossip.
 *
 * Stabilization from arbitrary starting states rests on three rules:
 *  - records of a peer's slots follow that peer's stream (last writer wins), so a
 *    corrupted record is corrected by the peer's next gossip;
 *  - the own echo follows the recorded originator claim, so a corrupted echo slot
 *    converges back to the channel owner's actual broadcast;
 *  - an own ready slot with no supporting evidence among the current records is
 *    cleared and re-derived; a justified ready never changes, and the delivered
 *    cache is write-once, which keeps the no-duplicity quorum argument intact;
 *  - derivation and justification only count records of peers heard from in this
 *    activation, so garbage attributed to a silent node cannot sustain itself.
 *
 * deliver() never mutates; every state change happens in broadcast() or absorb().
 */
class BrbInstance {
 public:
  BrbInstance() = default;

  void configure(NodeId self, NodeId column, int n) {
    self_ = self;
    column_ = column;
    n_ = n;
  }

  NodeId column() const { return column_; }

  // Starts (or re-asserts) the channel's broadcast. Idempotent for the same payload;
  // a later different payload is ignored, the first one stands.
  void broadcast(const BrbPayload& p, const Thresholds& th);

  // Delivered payload attributed to sender k, or nullopt while incomplete. Only the
  // column's slot is ever filled by the quorum machinery.
  std::optional<BrbPayload> deliver(NodeId k) const {
    if (k == column_) return delivered_;
    return std::nullopt;
  }

  bool has_broadcast() const { return own_.has_value(); }
  const std::optional<BrbPayload>& own() const { return own_; }

  // Sender-side termination predicate: delivery acknowledged by >= n-t distinct
  // nodes (own delivery included).
  bool has_terminated(const Thresholds& th) const;

  // Merge one peer section, then run the consistency and amplification rules.
  void absorb(NodeId from, const BrbSection& s, const Thresholds& th);

  // Do-forever hook: consistency rules also run without fresh input, so injected
  // local corruption heals even on a quiet channel.
  void tick_stabilize(const Thresholds& th) {
    stabilize(th);
    amplify(th);
  }

  // Section describing this replica's share of the channel state.
  void fill_section(BrbSection& s) const {
    s.own = own_;
    s.echo = echo_[self_];
    s.ready = ready_[self_];
    s.done = delivered_.has_value();
  }

  bool active() const;

  // Back to the post-recycling all-bottom state.
  void recycle();

  void serialize(std::vector<std::uint8_t>& out) const;

  // Direct state access for fault injection and tests.
  std::optional<BrbPayload>& own_slot() { return own_; }
  std::optional<BrbPayload>& claim_slot() { return claim_; }
  std::optional<BrbPayload>& echo_slot(NodeId i) { return echo_[i]; }
  std::optional<BrbPayload>& ready_slot(NodeId i) { return ready_[i]; }
  std::optional<BrbPayload>& delivered_slot() { return delivered_; }
  PeerMask& done_mask() { return done_from_; }
  PeerMask& fresh_mask() { return fresh_; }

 private:
  void stabilize(const Thresholds& th);
  void amplify(const Thresholds& th);
  bool counted(int i) const { return i == self_ || (fresh_ & bit(static_cast<NodeId>(i))); }
  int count_echo(const BrbPayload& p) const;
  int count_ready(const BrbPayload& p) const;
  int count_ready_others(const BrbPayload& p) const;

  NodeId self_ = 0;
  NodeId column_ = 0;
  int n_ = 0;

  std::optional<BrbPayload> own_;    // this replica's broadcast on the channel
  std::optional<BrbPayload> claim_;  // the originator's currently claimed broadcast
  std::array<std::optional<BrbPayload>, kMaxNodes> echo_;
  std::array<std::optional<BrbPayload>, kMaxNodes> ready_;
  std::optional<BrbPayload> delivered_;  // write-once within one activation
  PeerMask done_from_ = 0;
  PeerMask fresh_ = 0;  // peers whose stream has been absorbed this activation
};

}  // namespace ssmvc
