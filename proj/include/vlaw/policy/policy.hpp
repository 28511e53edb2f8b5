#pragma once

#include <string>

#include "vlaw/data/store.hpp"
#include "vlaw/data/trajectory.hpp"
#include "vlaw/policy/flow.hpp"
#include "vlaw/wm/worldmodel.hpp"

namespace vlaw::policy {

inline constexpr int kActionDim = env::kChunkLen * 2;          // 8
inline constexpr int kPolicyCondDim = env::kObsDim + 5;        // 29

// Conditioning layout: [observation (24), family one-hot (5)].
std::vector<double> policy_condition(const env::Obs& obs, env::Family family);

// Flow-matching action-chunk policy.
struct Policy {
    FlowField field;
    int sample_steps = 10;

    static Policy init(int hidden, Rng& rng);
};

FlowRow policy_row(const data::TransitionRow& row);
std::vector<FlowRow> policy_rows(const data::TransitionBatch& batch);

// Flow-matching loss, mean over rows (weights ignored).
double fm_loss(const Policy& pi, const data::TransitionBatch& batch, Rng& rng,
               nn::MlpGrad* grad_out = nullptr);

// Euler-integrated action sample, clamped to the action bounds.
env::ActionChunk sample_action(const Policy& pi, const env::Obs& obs, env::Family family,
                               Rng& rng, int steps = 0 /* 0 = pi.sample_steps */);

wm::ChunkPolicy chunk_policy(const Policy& pi);

enum class WeightMode { Binary, Exponential };

struct WeightingConfig {
    WeightMode mode = WeightMode::Binary;
    double beta = 1.0;  // exponential-mode temperature
};

// Binary mode: the trajectory label itself. Exponential mode:
// exp((r - baseline)/beta) with the caller-supplied baseline (mean success of
// the task family in the batch source). Throws on unlabeled input.
double compute_weight(int label, const WeightingConfig& cfg, double baseline);

struct PolicyUpdateResult {
    double loss = 0.0;        // weighted sum / effective count
    int effective_rows = 0;   // rows with weight > 0
    bool skipped = false;     // all-zero-weight batch: no parameter change
};

// One optimizer step on the union of the two batches (real rows first). The
// loss is the weighted flow-matching sum normalized by the effective row
// count, which for binary weights equals the unweighted mean over the
// success rows.
PolicyUpdateResult policy_update_step(Policy& pi, const data::TransitionBatch& batch_real,
                                      const data::TransitionBatch& batch_syn,
                                      const WeightingConfig& cfg, nn::AdamState& opt, Rng& rng);

struct WeightedLossSums {
    double weighted_sum = 0.0;  // sum of w * L over all rows
    std::size_t rows = 0;
};

// Evaluation helper for the two readings of the weighted objective. Each
// row's (eps, s) draw is derived from the row content and `seed`, so the same
// transition gets the same loss in any enumeration.
WeightedLossSums eval_weighted_fm_loss(const Policy& pi, const data::TransitionBatch& batch,
                                       std::uint64_t seed);

void save_policy(const Policy& pi, const std::string& path);
Policy load_policy(const std::string& path);

}  // namespace vlaw::policy
