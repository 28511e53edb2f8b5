#pragma once

#include "vlaw/common/rng.hpp"
#include "vlaw/env/env.hpp"

namespace vlaw::env {

// Waypoint-following proportional controller toward the family's subgoal
// sequence. Emits one action chunk; the controller simulates the (exact)
// dynamics internally so later rows react to earlier ones. Additive Gaussian
// action noise of scale `noise` is drawn from rng.
ActionChunk scripted_expert(const TaskSpec& task, const EnvState& state, Rng& rng,
                            double noise = 0.005);

// Single-step controller target; exposed so tests can check row directions.
Vec2 expert_subgoal(const EnvState& state);

}  // namespace vlaw::env
