#include "vlaw/policy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vlaw/common/util.hpp"
#include "vlaw/nn/checkpoint.hpp"

namespace vlaw::policy {

std::vector<double> policy_condition(const env::Obs& obs, env::Family family) {
    std::vector<double> cond;
    cond.reserve(kPolicyCondDim);
    cond.insert(cond.end(), obs.begin(), obs.end());
    for (int i = 0; i < 5; ++i) {
        cond.push_back(i == static_cast<int>(family) ? 1.0 : 0.0);
    }
    return cond;
}

Policy Policy::init(int hidden, Rng& rng) {
    Policy pi;
    pi.field = FlowField::init(kActionDim, kPolicyCondDim, hidden, rng);
    return pi;
}

FlowRow policy_row(const data::TransitionRow& row) {
    FlowRow r;
    r.action.assign(row.chunk.v.begin(), row.chunk.v.end());
    r.cond = policy_condition(row.obs, row.family);
    r.weight = row.weight;
    return r;
}

std::vector<FlowRow> policy_rows(const data::TransitionBatch& batch) {
    std::vector<FlowRow> rows;
    rows.reserve(batch.rows.size());
    for (const auto& r : batch.rows) {
        rows.push_back(policy_row(r));
    }
    return rows;
}

double fm_loss(const Policy& pi, const data::TransitionBatch& batch, Rng& rng,
               nn::MlpGrad* grad_out) {
    const auto rows = policy_rows(batch);
    return flow_loss(pi.field, rows, rng, grad_out);
}

env::ActionChunk sample_action(const Policy& pi, const env::Obs& obs, env::Family family,
                               Rng& rng, int steps) {
    const auto cond = policy_condition(obs, family);
    const auto flat = flow_sample(pi.field, cond, rng, steps > 0 ? steps : pi.sample_steps);
    std::array<double, env::kChunkLen * 2> raw{};
    for (std::size_t i = 0; i < raw.size(); ++i) {
        raw[i] = flat[i];
    }
    return env::ActionChunk::clamped(raw);
}

wm::ChunkPolicy chunk_policy(const Policy& pi) {
    return [&pi](const env::Obs& obs, const env::TaskSpec& task, Rng& rng) {
        return sample_action(pi, obs, task.family, rng);
    };
}

double compute_weight(int label, const WeightingConfig& cfg, double baseline) {
    if (label == data::kUnlabeled) {
        throw std::invalid_argument("compute_weight: unlabeled trajectory");
    }
    if (cfg.mode == WeightMode::Binary) {
        return static_cast<double>(label);
    }
    if (!(cfg.beta > 0.0) || !std::isfinite(cfg.beta)) {
        throw std::invalid_argument("compute_weight: beta must be finite and positive");
    }
    return std::exp((static_cast<double>(label) - baseline) / cfg.beta);
}

namespace {
std::uint64_t row_content_hash(const data::TransitionRow& row) {
    std::uint64_t h = fnv1a(row.obs.data(), row.obs.size() * sizeof(double));
    return fnv1a(row.chunk.v.data(), row.chunk.v.size() * sizeof(double), h);
}
}  // namespace

PolicyUpdateResult policy_update_step(Policy& pi, const data::TransitionBatch& batch_real,
                                      const data::TransitionBatch& batch_syn,
                                      const WeightingConfig& cfg, nn::AdamState& opt, Rng& rng) {
    (void)cfg;  // weights are carried on the rows; cfg documents the mode
    // Draws are derived from (step seed, row content): a weighted batch and
    // its success-filtered counterpart see identical randomness per row.
    const std::uint64_t step_seed = rng.next_u64();
    std::vector<FlowRow> rows;
    std::vector<FlowDraw> draws;
    rows.reserve(batch_real.rows.size() + batch_syn.rows.size());
    draws.reserve(rows.capacity());
    for (const auto* batch : {&batch_real, &batch_syn}) {
        for (const auto& r : batch->rows) {
            rows.push_back(policy_row(r));
            Rng row_rng(Rng::derive({step_seed, row_content_hash(r)}));
            draws.push_back(flow_draw(pi.field.dim, row_rng));
        }
    }
    PolicyUpdateResult result;
    for (const auto& r : rows) {
        result.effective_rows += r.weight > 0.0 ? 1 : 0;
    }
    if (result.effective_rows == 0) {
        result.skipped = true;
        return result;
    }
    nn::MlpGrad grad = nn::MlpGrad::zeros_like(pi.field.net);
    const double sum = flow_loss_sum_with_draws(pi.field, rows, draws, &grad);
    const double scale = 1.0 / result.effective_rows;
    grad.scale(scale);
    result.loss = sum * scale;
    nn::adam_step(pi.field.net, grad, opt);
    return result;
}

WeightedLossSums eval_weighted_fm_loss(const Policy& pi, const data::TransitionBatch& batch,
                                       std::uint64_t seed) {
    WeightedLossSums out;
    out.rows = batch.rows.size();
    for (const auto& trow : batch.rows) {
        const FlowRow row = policy_row(trow);
        // content-derived draw: identical transitions get identical losses
        Rng rng(Rng::derive({seed, row_content_hash(trow)}));
        const FlowDraw draw = flow_draw(pi.field.dim, rng);
        FlowRow unweighted = row;
        unweighted.weight = 1.0;
        const FlowRow rows_arr[] = {unweighted};
        const FlowDraw draws_arr[] = {draw};
        const double loss = flow_loss_sum_with_draws(pi.field, rows_arr, draws_arr, nullptr);
        out.weighted_sum += row.weight * loss;
    }
    return out;
}

void save_policy(const Policy& pi, const std::string& path) {
    std::vector<nn::NamedTensor> tensors;
    nn::append_mlp_tensors(tensors, "pi", pi.field.net);
    nn::NamedTensor meta;
    meta.name = "pi.meta";
    meta.dims = {3};
    meta.values = {static_cast<double>(pi.field.dim), static_cast<double>(pi.field.cond_dim),
                   static_cast<double>(pi.sample_steps)};
    tensors.push_back(std::move(meta));
    nn::save_tensors(path, tensors);
}

Policy load_policy(const std::string& path) {
    const auto tensors = nn::load_tensors(path);
    Policy pi;
    pi.field.net = nn::mlp_from_tensors(tensors, "pi");
    const nn::NamedTensor* meta = nn::find_tensor(tensors, "pi.meta");
    if (meta == nullptr || meta->values.size() != 3) {
        throw std::runtime_error("policy checkpoint: missing meta tensor");
    }
    pi.field.dim = static_cast<int>(meta->values[0]);
    pi.field.cond_dim = static_cast<int>(meta->values[1]);
    pi.sample_steps = static_cast<int>(meta->values[2]);
    return pi;
}

}  // namespace vlaw::policy
