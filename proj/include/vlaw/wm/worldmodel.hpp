#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vlaw/data/store.hpp"
#include "vlaw/data/trajectory.hpp"
#include "vlaw/wm/diffusion.hpp"

namespace vlaw::wm {

// Predicted observation range; model outputs are clamped here.
inline constexpr double kObsClampLo = -0.1;
inline constexpr double kObsClampHi = 1.1;

inline constexpr int kTargetDim = env::kChunkLen * env::kObsDim;       // 96
inline constexpr int kCondDim = env::kObsDim + env::kChunkLen * 2 + 5; // 37

// Conditioning layout: [o_t (24), action chunk (8), family one-hot (5)].
std::vector<double> wm_condition(const env::Obs& obs, const env::ActionChunk& chunk,
                                 env::Family family);

// Action-conditioned dynamics model over future observation chunks.
struct WorldModel {
    Diffusion diff;

    static WorldModel init(int hidden, int t_steps, Rng& rng);
};

DiffusionRow wm_row(const data::TransitionRow& row);
std::vector<DiffusionRow> wm_rows(const data::TransitionBatch& batch);

// Eq.-1-style objective: mean over rows and dimensions of squared x0 error.
double wm_loss(const WorldModel& model, const data::TransitionBatch& batch, Rng& rng,
               nn::MlpGrad* grad_out = nullptr);

// Content hash used to derive per-row (eps, t') draws from a step seed, so a
// loss component can be recomputed independently of batch composition.
std::uint64_t wm_row_hash(const DiffusionRow& row);
std::vector<DiffusionDraw> wm_draws_for_seed(const WorldModel& model,
                                             std::span<const DiffusionRow> rows,
                                             std::uint64_t step_seed);
double wm_loss_with_seed(const WorldModel& model, const data::TransitionBatch& batch,
                         std::uint64_t step_seed, nn::MlpGrad* grad_out = nullptr);

struct WmStepLosses {
    double real = 0.0;
    double pretrain = 0.0;
};

// One optimizer step on L_real + lambda * L_pretrain. The pretrain batch may
// be empty iff lambda == 0.
WmStepLosses wm_train_step(WorldModel& model, const data::TransitionBatch& real_batch,
                           const data::TransitionBatch& pretrain_batch, double lambda,
                           nn::AdamState& opt, Rng& rng);

// Predicted future observations (kChunkLen frames) for one policy call.
std::vector<env::Obs> sample_chunk(const WorldModel& model, const env::Obs& obs,
                                   const env::ActionChunk& chunk, env::Family family, Rng& rng,
                                   SampleMode mode = SampleMode::Deterministic);

// Generic one-chunk dynamics: maps (obs, chunk, task) to the next kChunkLen
// observations. The world model provides one; tests may substitute the exact
// environment.
using ChunkDynamics = std::function<std::vector<env::Obs>(const env::Obs&, const env::ActionChunk&,
                                                          const env::TaskSpec&, Rng&)>;

// Observation-conditioned policy head used inside model rollouts.
using ChunkPolicy =
    std::function<env::ActionChunk(const env::Obs&, const env::TaskSpec&, Rng&)>;

ChunkDynamics wm_dynamics(const WorldModel& model, SampleMode mode = SampleMode::Deterministic);

// Environment-backed perfect dynamics starting from the episode's reset
// state; replays actions through the true simulator.
ChunkDynamics oracle_dynamics();

// Closed-loop imagination: alternate policy call and model sampling for
// num_calls iterations starting from a real initial observation. The last
// predicted observation of each chunk conditions the next call.
data::Trajectory rollout_in_model(const ChunkDynamics& dynamics, const ChunkPolicy& policy,
                                  const env::Obs& o0, const env::TaskSpec& task, int num_calls,
                                  Rng& policy_rng, Rng& model_rng);

// Checkpoint under names `wm.*` with the schedule stored as an explicit
// alpha_bar array.
void save_worldmodel(const WorldModel& model, const std::string& path);
WorldModel load_worldmodel(const std::string& path);

}  // namespace vlaw::wm
