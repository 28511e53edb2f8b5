#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "vlaw/data/store.hpp"
#include "vlaw/env/events.hpp"
#include "vlaw/loop/run.hpp"
#include "vlaw/policy/policy.hpp"
#include "vlaw/reward/reward.hpp"
#include "vlaw/wm/worldmodel.hpp"

namespace vlaw::eval {

inline constexpr int kClipChunks = 5;  // recorded action chunks per replay clip

// One replay clip: a mid-trajectory start observation, the five recorded
// chunks that follow, and the true future observations they produced.
struct ReplayClip {
    env::Obs start;
    std::array<env::ActionChunk, kClipChunks> chunks{};
    std::vector<env::Obs> future;  // kClipChunks * kChunkLen frames
    env::TaskSpec task;
    std::size_t traj_index = 0;
    int start_chunk = 0;
    env::EventAnnotation real_annotation;
};

// Uniform clip starts over (trajectory, chunk offset) pairs, sampled without
// replacement. interaction_only keeps clips whose recorded frames contain a
// contact step; throws when fewer than `count` clips qualify, naming the
// shortfall.
std::vector<ReplayClip> extract_clips(const data::TrajectoryStore& store, int count, Rng& rng,
                                      bool interaction_only);

// Dynamics instance per clip; the world model ignores the clip, the oracle
// replays the source episode up to the clip start.
using DynamicsFactory = std::function<wm::ChunkDynamics(const ReplayClip&)>;

DynamicsFactory model_factory(const wm::WorldModel& model);
DynamicsFactory oracle_factory(const data::TrajectoryStore& store);

struct ReplayFidelity {
    std::array<double, kClipChunks> per_horizon{};  // MSE after 1..5 chunks
    double mean = 0.0;
};

// Feeds recorded chunks autoregressively from each clip start (deterministic
// sampling) and scores mean squared observation error per horizon.
ReplayFidelity replay_fidelity(const DynamicsFactory& factory, const std::vector<ReplayClip>& clips,
                               std::uint64_t seed, int jobs = 1);

// Replays interaction clips inside the model, annotates the predicted frames
// with the family micro-predicates, and scores predicted vs real outcomes
// (positive = interaction success).
reward::ConfusionMatrix event_confusion_eval(const DynamicsFactory& factory,
                                             const std::vector<ReplayClip>& clips,
                                             std::uint64_t seed, int jobs = 1);

struct EvalRow {
    std::string tag;
    std::string metric;
    double value = 0.0;
};

struct EvalTable {
    std::vector<EvalRow> rows;

    void add(const std::string& tag, const std::string& metric, double value);
    double get(const std::string& tag, const std::string& metric) const;
    std::string to_csv() const;
    std::string to_json() const;
};

// Per-family and mean success rates over freshly seeded evaluation episodes
// (seed stream disjoint from every training tag).
EvalTable success_table(const policy::Policy& pi, const std::vector<env::Family>& families,
                        int episodes_per_family, const loop::RunConfig& cfg,
                        const std::string& tag);

// Success probability of one policy on one family (helper for ablations).
double family_success_rate(const policy::Policy& pi, env::Family family, int episodes,
                           const loop::RunConfig& cfg);

// Re-runs the final policy update under (a) half the synthetic rollouts and
// (b) no real success data, then evaluates on draw2d. Requires a completed
// run directory.
EvalTable ablation_suite(const loop::RunConfig& cfg, const std::string& run_dir);

}  // namespace vlaw::eval
