#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vlaw/common/rng.hpp"
#include "vlaw/env/env.hpp"
#include "vlaw/env/task.hpp"

namespace vlaw::data {

enum class Source : int { Real = 0, Synthetic = 1, Expert = 2 };
const char* source_name(Source s);
Source source_from_name(const std::string& name);

inline constexpr int kUnlabeled = -1;

// Unit of every dataset: per-step observations plus one action chunk per
// policy call. Synthetic trajectories carry model-predicted observations but
// always a real first frame.
struct Trajectory {
    env::TaskSpec task;
    std::vector<env::Obs> obs;
    std::vector<env::ActionChunk> chunks;
    int label = kUnlabeled;  // -1 unlabeled, else 0/1
    Source source = Source::Real;

    int chunk_count() const { return static_cast<int>(chunks.size()); }
    void validate() const;  // throws with a reason when malformed
};

// Policy interface used for rollouts: maps (state, observation) to a chunk.
// Scripted experts read the state; learned policies read the observation.
using RolloutPolicy =
    std::function<env::ActionChunk(const env::EnvState&, const env::Obs&, Rng&)>;

// Runs an episode of `chunks` policy calls in the real environment, recording
// every low-level observation. The trajectory is left unlabeled.
Trajectory rollout_real(const env::TaskSpec& task, const RolloutPolicy& policy, int chunks,
                        Rng& policy_rng, Source source = Source::Real);

// Ground-truth label from the environment success predicate.
int env_success_label(const Trajectory& traj);

std::uint64_t trajectory_hash(const Trajectory& traj);

}  // namespace vlaw::data
