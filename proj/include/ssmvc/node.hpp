#pragma once

#include <array>
#include <vector>

#include "ssmvc/core.hpp"
#include "ssmvc/mvc.hpp"
#include "ssmvc/transport.hpp"
#include "ssmvc/wire.hpp"

namespace ssmvc {

enum class Strategy : std::uint8_t {
  Correct,
  Crash,        // silent from step 0
  Equivocate,   // different INIT values to different peers
  SpamInvalid,  // ill-formatted payloads on the own channels
  Collude,      // protocol-faithful, but proposes the agreed-upon byzantine value
  DelayMax,     // sends nothing until the delay budget elapses
};

const char* strategy_name(Strategy s);
std::optional<Strategy> strategy_from(const std::string& s);

struct NodeConfig {
  NodeId id = 0;
  SystemParams params;
  int alphabet = 4;
  VbbEqPhase mode = VbbEqPhase::Init;
  std::uint64_t coin_seed = 1;  // identical at all nodes: the common-coin service
  int round_cap = kDefaultRoundCap;
  int delta = 1;  // objects per recycling batch
  Strategy strategy = Strategy::Correct;
  Value byz_value = 0;           // collude proposal / equivocation alternative
  std::uint64_t delay_until = 0; // DelayMax budget in steps
  // proposals[epoch][obj]; missing entries fall back to the last present one
  std::array<std::vector<Value>, 2> proposals;
};

/**
 * One node of the SSBFT stack: delta MVC objects walked in order, plus the
 * scenario-assigned behavior. Byzantine variants run the same machinery and shape
 * their outgoing sections on the way out; the adversary controls what a captured
 * node says, not what the simulator knows.
 */
class ProtocolNode {
 public:
  explicit ProtocolNode(const NodeConfig& cfg);

  NodeId id() const { return cfg_.id; }
  const NodeConfig& config() const { return cfg_; }

  bool tick_enabled(std::uint64_t) const { return cfg_.strategy != Strategy::Crash; }

  std::vector<Message> tick(std::uint64_t step, Rng& rng);
  void on_message(const Message& m, std::uint64_t step);

  MvcState& obj(int o) { return objs_[o]; }
  const MvcState& obj(int o) const { return objs_[o]; }
  int delta() const { return cfg_.delta; }
  int cur_obj() const { return cur_obj_; }
  int epoch() const { return epoch_; }
  bool proposed(int o) const { return proposed_[o]; }
  Value proposal(int epoch, int o) const;

  bool byzantine() const { return cfg_.strategy != Strategy::Correct; }

  // Recycler entry point: every object back to its post-recycling state.
  void recycle_all();

  void serialize(std::vector<std::uint8_t>& out) const;

 private:
  void apply_strategy(Message& m, NodeId dst, Rng& rng) const;

  NodeConfig cfg_;
  std::vector<MvcState> objs_;
  std::vector<std::uint8_t> proposed_;
  int cur_obj_ = 0;
  int epoch_ = 0;
};

using ProtocolWorld = World<ProtocolNode>;

// Byzantine shaping of an outgoing message, shared by every node flavor.
void strategy_rewrite(Message& m, const NodeConfig& cfg, Value honest_prop, NodeId dst);

std::uint64_t pack_outcome(const DeliveryResult& r);
std::uint64_t pack_payload(const BrbPayload& p);

}  // namespace ssmvc
