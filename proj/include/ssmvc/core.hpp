#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ssmvc {

// Node indices are plain integers in [0, n). Worlds validate against their own n.
using NodeId = std::uint8_t;

// Hard cap on the world size; peer sets fit in a 32-bit mask.
inline constexpr int kMaxNodes = 16;

using PeerMask = std::uint32_t;

inline int popcount(PeerMask m) { return __builtin_popcount(m); }
inline PeerMask bit(NodeId i) { return PeerMask{1} << i; }

/// n, t and the channel capacity of a world. Valid iff n >= 3t+1.
struct SystemParams {
  int n = 4;
  int t = 1;
  int capacity = 8;

  bool valid() const {
    return n >= 3 * t + 1 && t >= 0 && n <= kMaxNodes && capacity >= 1;
  }
};

/// Quorum arithmetic used throughout: n-t, n-2t, t+1 (and the Bracha echo bound).
struct Thresholds {
  int n_minus_t;
  int n_minus_2t;
  int t_plus_1;
  int two_t_plus_1;
  int echo_quorum;  // smallest integer strictly greater than (n+t)/2
};

// Throws std::invalid_argument when n < 3t+1.
Thresholds thresholds(const SystemParams& p);

// Proposal values are indices into a scenario-fixed finite alphabet, rendered 'A'..'Z'.
// The sentinels below live outside every alphabet.
using Value = std::uint8_t;

inline constexpr int kMaxAlphabet = 26;

std::string value_name(Value v);

enum class ResultKind : std::uint8_t {
  Pending,  // bottom: nothing delivered/decided yet
  Error,    // lightning: no decidable value / detected inconsistency
  Decided,
};

/// Three-valued outcome threaded through every query-based interface.
struct DeliveryResult {
  ResultKind kind = ResultKind::Pending;
  Value value = 0;

  static DeliveryResult pending() { return {}; }
  static DeliveryResult error() { return {ResultKind::Error, 0}; }
  static DeliveryResult decided(Value v) { return {ResultKind::Decided, v}; }

  bool is_pending() const { return kind == ResultKind::Pending; }
  bool is_error() const { return kind == ResultKind::Error; }
  bool is_decided() const { return kind == ResultKind::Decided; }

  friend bool operator==(const DeliveryResult& a, const DeliveryResult& b) {
    if (a.kind != b.kind) return false;
    return a.kind != ResultKind::Decided || a.value == b.value;
  }

  std::string str() const;
};

/// One entry of a delivery multiset: a per-node value or the error symbol.
struct MultisetEntry {
  NodeId node = 0;
  bool is_error = false;
  Value value = 0;
};

/// Counted bag of (node, value-or-error) entries; at most one entry per node.
class Multiset {
 public:
  void add(NodeId node, Value v) { entries_.push_back({node, false, v}); }
  void add_error(NodeId node) { entries_.push_back({node, true, 0}); }

  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<MultisetEntry>& entries() const { return entries_; }

 private:
  std::vector<MultisetEntry> entries_;
};

// Number of entries in rec whose value equals v (error entries never match).
int equal(Value v, const Multiset& rec);

// Number of entries not equal to v; error entries count as different.
int differ(Value v, const Multiset& rec);

// Deterministic seeded generator. std::mt19937 would also be portable, but the
// distributions are not; this keeps every derived draw reproducible bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t below(std::uint64_t bound) { return bound ? next() % bound : 0; }
  bool chance(double p) { return static_cast<double>(next() >> 11) / 9007199254740992.0 < p; }

 private:
  std::uint64_t state_;
};

// FNV-1a, used for payload digests and state hashing.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ssmvc
