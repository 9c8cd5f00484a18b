#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ssmvc/node.hpp"
#include "ssmvc/scenario.hpp"

namespace ssmvc {

/// One mutable protocol field, addressable by a stable path such as
/// node/3/obj/0/mvc/bcO/result or node/1/obj/0/vbb/init/2/echo/4.
struct FieldRef {
  std::string path;
  std::function<void(Rng&)> smash;
};

// Every mutable field of every correct node's protocol state.
std::vector<FieldRef> enumerate_fields(ProtocolWorld& world, PeerMask correct);

// Simple glob match; '*' matches one path segment, '**' the rest.
bool path_matches(const std::string& pattern, const std::string& path);

// Applies the spec before step 0: targeted presets or seeded random smashing over
// the mask, plus optional channel corruption. Emits Corrupt trace events.
void inject_transient_faults(ProtocolWorld& world, const Scenario& sc);

}  // namespace ssmvc
