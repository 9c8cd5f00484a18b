#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ssmvc/core.hpp"

namespace ssmvc {

// All BRB-carried application payloads are (id, item) pairs. `claimed` is the id the
// broadcaster wrote into the pair, which need not match the channel it used; the VBB
// format tests inspect exactly that. Junk models ill-formatted Byzantine bytes.
enum class Body : std::uint8_t { Val, Flag, Junk };

struct BrbPayload {
  NodeId claimed = 0;
  Body body = Body::Val;
  std::uint8_t data = 0;  // Value, boolean, or raw junk byte

  static BrbPayload val(NodeId id, Value v) { return {id, Body::Val, v}; }
  static BrbPayload flag(NodeId id, bool b) { return {id, Body::Flag, static_cast<std::uint8_t>(b)}; }
  static BrbPayload junk(NodeId id, std::uint8_t raw) { return {id, Body::Junk, raw}; }

  friend bool operator==(const BrbPayload& a, const BrbPayload& b) {
    return a.claimed == b.claimed && a.body == b.body && a.data == b.data;
  }
};

enum class Phase : std::uint8_t { Init = 0, Valid = 1 };

inline const char* phase_name(Phase p) { return p == Phase::Init ? "init" : "valid"; }

// Per-channel slice of the sender's BRB state, merged into the receiver's replica.
struct BrbSection {
  std::uint8_t obj = 0;  // MVC object index (delta-batch recycling)
  Phase phase = Phase::Init;
  NodeId column = 0;  // channel originator
  std::optional<BrbPayload> own;    // sender's broadcast on this channel
  std::optional<BrbPayload> echo;   // sender's echo slot
  std::optional<BrbPayload> ready;  // sender's ready slot
  bool done = false;                // sender has delivered this channel
};

// Sender's claim levels in a BV object, one per boolean value: 0 asserts, higher
// levels forward, 0xff claims nothing.
struct BvSection {
  std::uint8_t obj = 0;
  std::uint8_t lvl_false = 0xff;
  std::uint8_t lvl_true = 0xff;
};

struct BcRoundWire {
  std::uint8_t lvl_false = 0xff;  // round-local BV claim levels
  std::uint8_t lvl_true = 0xff;
  std::uint8_t aux = 0;           // 0 none, 1 False, 2 True
};

struct BcSection {
  std::uint8_t obj = 0;
  std::uint16_t round = 0;           // sender's current round, 0 when inactive
  std::vector<BcRoundWire> rounds;   // rounds 1..round
  std::int8_t decided = -1;          // -1 undecided, else 0/1
};

// The unified MSG envelope: one state-gossip per (src,dst) per loop iteration,
// carrying every active section. Byzantine senders shape the sections arbitrarily.
struct Message {
  NodeId src = 0;
  NodeId dst = 0;
  std::uint64_t sent_step = 0;
  std::vector<BrbSection> brb;
  std::vector<BvSection> bv;
  std::vector<BcSection> bc;

  std::uint64_t digest() const;
};

}  // namespace ssmvc
