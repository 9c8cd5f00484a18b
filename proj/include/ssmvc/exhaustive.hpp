#pragma once

#include <array>
#include <cstddef>

#include "ssmvc/core.hpp"

namespace ssmvc::exhaustive {

/**
 * Bounded exhaustive schedule search at n=4, t=1: breadth-first enumeration of
 * every interleaving of do-forever iterations, adversary injections and message
 * deliveries over latest-wins capacity-1 channels, with state deduplication.
 * Safety is asserted at every visited state; liveness by a deterministic fair
 * extension probe from sampled states. Byzantine nondeterminism is covered by
 * enumerating its message patterns as separate search roots.
 */
struct SearchStats {
  std::size_t visited = 0;
  std::size_t edges = 0;
  std::size_t probes = 0;
  bool exhausted = false;      // frontier emptied before the state cap
  int violations = 0;          // safety failures over all visited states
  int liveness_failures = 0;   // fair-extension probes that missed completion
};

struct BrbSearchConfig {
  bool byz_originator = false;     // node 0 equivocates instead of broadcasting
  int equivocation_pattern = 0;    // bit d: which value correct node d is told
  bool forge_ready = false;        // byzantine also forges ready slots
  bool forging_follower = false;   // node 3 vouches for a message never sent
  std::size_t max_states = 400000;
  int max_depth = 11;
  int probe_stride = 16;
};
SearchStats search_brb(const BrbSearchConfig& cfg);

struct BvSearchConfig {
  std::array<std::uint8_t, 3> inputs{1, 1, 1};  // correct nodes' booleans
  bool byz_pushes_false = false;                // node 3 pushes the unbacked value
  std::size_t max_states = 400000;
  int max_depth = 40;
  int probe_stride = 4;
};
SearchStats search_bv(const BvSearchConfig& cfg);

struct BcSearchConfig {
  std::array<std::uint8_t, 3> proposals{1, 1, 1};
  bool byz_flips = false;  // node 3 injects conflicting round state
  std::uint64_t salt = 1;
  int round_cap = 4;
  std::size_t max_states = 400000;
  int max_depth = 8;
  int probe_stride = 32;
};
SearchStats search_bc(const BcSearchConfig& cfg);

}  // namespace ssmvc::exhaustive
