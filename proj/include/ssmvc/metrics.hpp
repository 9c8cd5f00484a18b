#pragma once

#include <vector>

#include "ssmvc/core.hpp"
#include "ssmvc/transport.hpp"

namespace ssmvc {

/**
 * CRWF: communication rounds without assuming fairness. A round completes once
 * every correct node performed one send-to-all (a do-forever iteration) and then
 * received messages from n-t distinct nodes. Returns the step at which each round
 * completed, scanning events with from_step <= step < to_step.
 */
std::vector<std::uint64_t> crwf_rounds(const Trace& t, PeerMask correct, int n, int n_minus_t,
                                       std::uint64_t from_step = 0,
                                       std::uint64_t to_step = ~0ULL);

/**
 * ACAF: asynchronous cycles assuming fairness. A cycle completes once every ordered
 * pair of correct nodes completed a round-trip started inside the cycle (num_b = 1
 * round-trip per pair, recorded in the report). Only meaningful from the step the
 * policy is fair; returns completion steps.
 */
std::vector<std::uint64_t> acaf_cycles(const Trace& t, PeerMask correct, int n,
                                       std::uint64_t fair_from = 0);

// 1-based ordinal of the interval containing `step` given completion boundaries.
int interval_index(const std::vector<std::uint64_t>& boundaries, std::uint64_t step);

// Stamp every event's cycle field (events before fair_from keep -1).
void label_cycles(Trace& t, PeerMask correct, int n, std::uint64_t fair_from);

}  // namespace ssmvc
