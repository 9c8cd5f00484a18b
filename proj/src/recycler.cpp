#include "ssmvc/recycler.hpp"

namespace ssmvc {

bool Recycler::poll(ProtocolWorld& world) {
  if (fired_) return false;
  if (!armed_) {
    if (!all_correct_delivered()) return false;
    Rng rng(opt_.seed ^ 0xa02bdbf7bb3c0a7ULL);
    armed_ = true;
    due_step_ = world.clock() + 1 + rng.below(opt_.window);
    return false;
  }
  if (world.clock() < due_step_) return false;

  // One atomic pass: every node back to the post-recycling state, channels empty.
  for (auto& n : world.nodes()) {
    n.recycle_all();
    for (int o = 0; o < opt_.delta; ++o)
      world.trace().add({world.clock(), -1, EventKind::Recycle, n.id(),
                         static_cast<std::uint8_t>(o), 0, 0, 0, 0});
  }
  world.drain_channels();
  std::fill(flags_.begin(), flags_.end(), 0);
  fired_ = true;
  fired_step_ = world.clock();
  return true;
}

}  // namespace ssmvc
