#include "vlaw/wm/worldmodel.hpp"

#include <memory>
#include <stdexcept>

#include "vlaw/common/util.hpp"
#include "vlaw/nn/checkpoint.hpp"

namespace vlaw::wm {

std::vector<double> wm_condition(const env::Obs& obs, const env::ActionChunk& chunk,
                                 env::Family family) {
    std::vector<double> cond;
    cond.reserve(kCondDim);
    cond.insert(cond.end(), obs.begin(), obs.end());
    cond.insert(cond.end(), chunk.v.begin(), chunk.v.end());
    for (int i = 0; i < 5; ++i) {
        cond.push_back(i == static_cast<int>(family) ? 1.0 : 0.0);
    }
    return cond;
}

WorldModel WorldModel::init(int hidden, int t_steps, Rng& rng) {
    WorldModel m;
    m.diff = Diffusion::init(kTargetDim, kCondDim, hidden, t_steps, rng);
    return m;
}

DiffusionRow wm_row(const data::TransitionRow& row) {
    DiffusionRow r;
    r.target = row.future;
    r.cond = wm_condition(row.obs, row.chunk, row.family);
    return r;
}

std::vector<DiffusionRow> wm_rows(const data::TransitionBatch& batch) {
    std::vector<DiffusionRow> rows;
    rows.reserve(batch.rows.size());
    for (const auto& r : batch.rows) {
        rows.push_back(wm_row(r));
    }
    return rows;
}

double wm_loss(const WorldModel& model, const data::TransitionBatch& batch, Rng& rng,
               nn::MlpGrad* grad_out) {
    const auto rows = wm_rows(batch);
    return diffusion_loss(model.diff, rows, rng, grad_out);
}

std::uint64_t wm_row_hash(const DiffusionRow& row) {
    std::uint64_t h = fnv1a(row.target.data(), row.target.size() * sizeof(double));
    return fnv1a(row.cond.data(), row.cond.size() * sizeof(double), h);
}

std::vector<DiffusionDraw> wm_draws_for_seed(const WorldModel& model,
                                             std::span<const DiffusionRow> rows,
                                             std::uint64_t step_seed) {
    std::vector<DiffusionDraw> draws;
    draws.reserve(rows.size());
    for (const auto& row : rows) {
        Rng row_rng(Rng::derive({step_seed, wm_row_hash(row)}));
        draws.push_back(diffusion_draw(model.diff, row_rng));
    }
    return draws;
}

double wm_loss_with_seed(const WorldModel& model, const data::TransitionBatch& batch,
                         std::uint64_t step_seed, nn::MlpGrad* grad_out) {
    const auto rows = wm_rows(batch);
    const auto draws = wm_draws_for_seed(model, rows, step_seed);
    return diffusion_loss_with_draws(model.diff, rows, draws, grad_out);
}

WmStepLosses wm_train_step(WorldModel& model, const data::TransitionBatch& real_batch,
                           const data::TransitionBatch& pretrain_batch, double lambda,
                           nn::AdamState& opt, Rng& rng) {
    if (lambda < 0.0) {
        throw std::invalid_argument("wm_train_step: lambda must be nonnegative");
    }
    // Per-row draws derive from (step seed, row content); identical batches in
    // both slots therefore see identical noise, making Eq.-2 mixing exactly
    // linear in the two gradients.
    const std::uint64_t step_seed = rng.next_u64();
    WmStepLosses losses;
    nn::MlpGrad grad = nn::MlpGrad::zeros_like(model.diff.net);
    nn::MlpGrad part = nn::MlpGrad::zeros_like(model.diff.net);
    losses.real = wm_loss_with_seed(model, real_batch, step_seed, &part);
    grad.add_scaled(part, 1.0);
    if (lambda > 0.0) {
        part = nn::MlpGrad::zeros_like(model.diff.net);
        losses.pretrain = wm_loss_with_seed(model, pretrain_batch, step_seed, &part);
        grad.add_scaled(part, lambda);
    }
    nn::adam_step(model.diff.net, grad, opt);
    return losses;
}

std::vector<env::Obs> sample_chunk(const WorldModel& model, const env::Obs& obs,
                                   const env::ActionChunk& chunk, env::Family family, Rng& rng,
                                   SampleMode mode) {
    const auto cond = wm_condition(obs, chunk, family);
    const auto flat = diffusion_sample(model.diff, cond, rng, mode,
                                       ClampRange{kObsClampLo, kObsClampHi});
    std::vector<env::Obs> frames(env::kChunkLen);
    for (int r = 0; r < env::kChunkLen; ++r) {
        for (int d = 0; d < env::kObsDim; ++d) {
            frames[static_cast<std::size_t>(r)][static_cast<std::size_t>(d)] =
                flat[static_cast<std::size_t>(r) * env::kObsDim + static_cast<std::size_t>(d)];
        }
    }
    return frames;
}

ChunkDynamics wm_dynamics(const WorldModel& model, SampleMode mode) {
    return [&model, mode](const env::Obs& obs, const env::ActionChunk& chunk,
                          const env::TaskSpec& task, Rng& rng) {
        return sample_chunk(model, obs, chunk, task.family, rng, mode);
    };
}

ChunkDynamics oracle_dynamics() {
    // keeps per-task simulator state keyed by the task spec; each rollout uses
    // a fresh instance via this factory
    struct OracleState {
        bool init = false;
        env::EnvState state;
    };
    auto shared = std::make_shared<OracleState>();
    return [shared](const env::Obs& obs, const env::ActionChunk& chunk, const env::TaskSpec& task,
                    Rng&) {
        (void)obs;
        if (!shared->init) {
            shared->state = env::reset(task);
            shared->init = true;
        }
        std::vector<env::Obs> frames;
        frames.reserve(env::kChunkLen);
        for (int r = 0; r < env::kChunkLen; ++r) {
            env::step(shared->state, chunk.dx(r), chunk.dy(r));
            frames.push_back(env::observe(shared->state));
        }
        return frames;
    };
}

data::Trajectory rollout_in_model(const ChunkDynamics& dynamics, const ChunkPolicy& policy,
                                  const env::Obs& o0, const env::TaskSpec& task, int num_calls,
                                  Rng& policy_rng, Rng& model_rng) {
    data::Trajectory traj;
    traj.task = task;
    traj.source = data::Source::Synthetic;
    traj.obs.push_back(o0);
    for (int k = 0; k < num_calls; ++k) {
        const env::ActionChunk chunk = policy(traj.obs.back(), task, policy_rng);
        traj.chunks.push_back(chunk);
        const auto frames = dynamics(traj.obs.back(), chunk, task, model_rng);
        if (frames.size() != env::kChunkLen) {
            throw std::runtime_error("rollout_in_model: dynamics returned wrong frame count");
        }
        for (const auto& f : frames) {
            traj.obs.push_back(f);
        }
    }
    return traj;
}

void save_worldmodel(const WorldModel& model, const std::string& path) {
    std::vector<nn::NamedTensor> tensors;
    nn::append_mlp_tensors(tensors, "wm", model.diff.net);
    nn::NamedTensor sched;
    sched.name = "wm.schedule.alpha_bar";
    sched.dims = {static_cast<std::uint32_t>(model.diff.sched.alpha_bar.size())};
    sched.values = model.diff.sched.alpha_bar;
    tensors.push_back(std::move(sched));
    nn::NamedTensor dims;
    dims.name = "wm.dims";
    dims.dims = {2};
    dims.values = {static_cast<double>(model.diff.dim), static_cast<double>(model.diff.cond_dim)};
    tensors.push_back(std::move(dims));
    nn::save_tensors(path, tensors);
}

WorldModel load_worldmodel(const std::string& path) {
    const auto tensors = nn::load_tensors(path);
    WorldModel m;
    m.diff.net = nn::mlp_from_tensors(tensors, "wm");
    const nn::NamedTensor* sched = nn::find_tensor(tensors, "wm.schedule.alpha_bar");
    const nn::NamedTensor* dims = nn::find_tensor(tensors, "wm.dims");
    if (sched == nullptr || dims == nullptr || dims->values.size() != 2) {
        throw std::runtime_error("worldmodel checkpoint: missing schedule or dims");
    }
    m.diff.sched = NoiseSchedule::from_values(sched->values);
    m.diff.dim = static_cast<int>(dims->values[0]);
    m.diff.cond_dim = static_cast<int>(dims->values[1]);
    return m;
}

}  // namespace vlaw::wm
