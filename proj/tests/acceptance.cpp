// Acceptance suite: one pass/fail line per criterion, exit 0 only when all
// criteria hold. Criteria 5-8 share one full-scale run fixture.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "vlaw/common/util.hpp"
#include "vlaw/data/store.hpp"
#include "vlaw/env/expert.hpp"
#include "vlaw/eval/evalkit.hpp"
#include "vlaw/loop/run.hpp"
#include "vlaw/nn/tape.hpp"
#include "vlaw/policy/policy.hpp"
#include "vlaw/reward/reward.hpp"
#include "vlaw/wm/worldmodel.hpp"

using namespace vlaw;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

struct Criterion {
    int id;
    std::string name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    Criterion(int id_, std::string name_) : id(id_), name(std::move(name_)) {}

    void finish(bool pass, const std::string& detail) const {
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d (%s): %s  [%.1fs]\n", pass ? "PASS" : "FAIL", id,
                    name.c_str(), detail.c_str(), sec);
        std::fflush(stdout);
        if (!pass) {
            ++g_failures;
        }
    }
};

// ---------------------------------------------------------------- helpers

nn::MlpGrad finite_difference(nn::MlpParams p, const std::function<double(const nn::MlpParams&)>& f,
                              double h = 1e-5) {
    nn::MlpGrad g = nn::MlpGrad::zeros_like(p);
    for (std::size_t li = 0; li < p.layers.size(); ++li) {
        for (std::size_t i = 0; i < p.layers[li].w.size(); ++i) {
            const double orig = p.layers[li].w[i];
            p.layers[li].w[i] = orig + h;
            const double up = f(p);
            p.layers[li].w[i] = orig - h;
            const double down = f(p);
            p.layers[li].w[i] = orig;
            g.layers[li].w[i] = (up - down) / (2.0 * h);
        }
        for (std::size_t i = 0; i < p.layers[li].b.size(); ++i) {
            const double orig = p.layers[li].b[i];
            p.layers[li].b[i] = orig + h;
            const double up = f(p);
            p.layers[li].b[i] = orig - h;
            const double down = f(p);
            p.layers[li].b[i] = orig;
            g.layers[li].b[i] = (up - down) / (2.0 * h);
        }
    }
    return g;
}

double max_rel_err(const nn::MlpGrad& a, const nn::MlpGrad& b) {
    double worst = 0.0;
    for (std::size_t li = 0; li < a.layers.size(); ++li) {
        auto span_err = [&](const std::vector<double>& x, const std::vector<double>& y) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double denom = std::max({std::abs(x[i]), std::abs(y[i]), 1e-6});
                worst = std::max(worst, std::abs(x[i] - y[i]) / denom);
            }
        };
        span_err(a.layers[li].w, b.layers[li].w);
        span_err(a.layers[li].b, b.layers[li].b);
    }
    return worst;
}

double wasserstein1(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t n = std::min(a.size(), b.size());
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        w += std::abs(a[i] - b[i]);
    }
    return w / static_cast<double>(n);
}

data::TrajectoryStore noisy_expert_store(env::Family family, int count, std::uint64_t seed,
                                         double noise) {
    data::TrajectoryStore store;
    for (int i = 0; i < count; ++i) {
        Rng rng(Rng::derive({seed, static_cast<std::uint64_t>(i)}));
        auto sloppy = [noise](const env::EnvState& st, const env::Obs&, Rng& r) {
            return env::scripted_expert(st.task, st, r, noise);
        };
        data::Trajectory t = data::rollout_real(
            {family, i % env::variant_count(family),
             Rng::derive({seed, 900 + static_cast<std::uint64_t>(i)})},
            sloppy, env::kHorizonChunks, rng, data::Source::Real);
        t.label = data::env_success_label(t);
        store.append(std::move(t));
    }
    return store;
}

// ---------------------------------------------------------------- criteria

void criterion_1_gradients() {
    Criterion c(1, "gradient correctness");
    double worst = 0.0;

    {  // diffusion loss on a small net
        Rng init(11);
        wm::Diffusion d = wm::Diffusion::init(6, 4, 12, 10, init);
        std::vector<wm::DiffusionRow> rows;
        std::vector<wm::DiffusionDraw> draws;
        Rng rng(3);
        for (int i = 0; i < 3; ++i) {
            wm::DiffusionRow row;
            for (int k = 0; k < 6; ++k) row.target.push_back(rng.uniform());
            for (int k = 0; k < 4; ++k) row.cond.push_back(rng.uniform());
            rows.push_back(row);
            draws.push_back(wm::diffusion_draw(d, rng));
        }
        nn::MlpGrad analytic = nn::MlpGrad::zeros_like(d.net);
        wm::diffusion_loss_with_draws(d, rows, draws, &analytic);
        const nn::MlpGrad numeric = finite_difference(d.net, [&](const nn::MlpParams& q) {
            wm::Diffusion probe = d;
            probe.net = q;
            return wm::diffusion_loss_with_draws(probe, rows, draws, nullptr);
        });
        worst = std::max(worst, max_rel_err(analytic, numeric));
    }
    {  // flow-matching loss
        Rng init(13);
        policy::FlowField f = policy::FlowField::init(4, 4, 12, init);
        std::vector<policy::FlowRow> rows;
        std::vector<policy::FlowDraw> draws;
        Rng rng(5);
        for (int i = 0; i < 3; ++i) {
            policy::FlowRow row;
            for (int k = 0; k < 4; ++k) row.action.push_back(rng.uniform(-0.05, 0.05));
            for (int k = 0; k < 4; ++k) row.cond.push_back(rng.uniform());
            row.weight = 1.0;
            rows.push_back(row);
            draws.push_back(policy::flow_draw(4, rng));
        }
        nn::MlpGrad analytic = nn::MlpGrad::zeros_like(f.net);
        policy::flow_loss_sum_with_draws(f, rows, draws, &analytic);
        const nn::MlpGrad numeric = finite_difference(f.net, [&](const nn::MlpParams& q) {
            policy::FlowField probe = f;
            probe.net = q;
            return policy::flow_loss_sum_with_draws(probe, rows, draws, nullptr);
        });
        worst = std::max(worst, max_rel_err(analytic, numeric));
    }
    std::size_t rm_params = 0;
    {  // reward-model cross entropy (net held under 5k parameters)
        Rng init(17);
        reward::RewardNet rm = reward::RewardNet::init(8, init);
        rm_params = rm.net.param_count();
        std::vector<std::vector<double>> features;
        std::vector<int> labels;
        Rng rng(7);
        for (int i = 0; i < 4; ++i) {
            std::vector<double> feat(reward::kFeatureDim);
            for (auto& v : feat) v = rng.uniform();
            features.push_back(std::move(feat));
            labels.push_back(i % 2);
        }
        nn::MlpGrad analytic = nn::MlpGrad::zeros_like(rm.net);
        reward::rm_bce_loss(rm, features, labels, &analytic);
        const nn::MlpGrad numeric = finite_difference(rm.net, [&](const nn::MlpParams& q) {
            reward::RewardNet probe;
            probe.net = q;
            return reward::rm_bce_loss(probe, features, labels, nullptr);
        });
        worst = std::max(worst, max_rel_err(analytic, numeric));
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max rel err %.2e (tolerance 1e-4), rm params %zu", worst,
                  rm_params);
    c.finish(worst < 1e-4 && rm_params <= 5000, buf);
}

void criterion_2_eq4_identity() {
    Criterion c(2, "Eq. 4 weighted/filtered identity");
    Rng init(23);
    policy::Policy pi = policy::Policy::init(16, init);
    int exact = 0;
    const int cases = 100;
    for (int trial = 0; trial < cases; ++trial) {
        Rng rng(Rng::derive({0xe44ULL, static_cast<std::uint64_t>(trial)}));
        const auto family = static_cast<env::Family>(rng.below(5));
        data::TrajectoryStore store;
        const int trajs = 2 + static_cast<int>(rng.below(4));
        for (int i = 0; i < trajs; ++i) {
            Rng er(Rng::derive({31, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(i)}));
            auto ex = [](const env::EnvState& st, const env::Obs&, Rng& r) {
                return env::scripted_expert(st.task, st, r);
            };
            data::Trajectory t = data::rollout_real(
                {family, 0, Rng::derive({32, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(i)})},
                ex, 2, er, data::Source::Real);
            t.label = static_cast<int>(rng.below(2));
            store.append(std::move(t));
        }
        data::TransitionSampler sampler(store, {});
        const data::TransitionBatch full = sampler.all();
        data::TransitionBatch filtered;
        for (const auto& row : full.rows) {
            if (row.weight > 0.0) {
                filtered.rows.push_back(row);
            }
        }
        const auto lhs = policy::eval_weighted_fm_loss(pi, full, 40 + static_cast<std::uint64_t>(trial));
        const auto rhs =
            policy::eval_weighted_fm_loss(pi, filtered, 40 + static_cast<std::uint64_t>(trial));
        // weighted mean over D times |D| against plain mean over D+ times |D+|:
        // both reduce to the same sum, compared here for exact equality
        exact += lhs.weighted_sum == rhs.weighted_sum ? 1 : 0;
    }
    char buf[120];
    std::snprintf(buf, sizeof(buf), "%d/%d randomized cases exact to machine precision", exact,
                  cases);
    c.finish(exact == cases, buf);
}

void criterion_3_diffusion() {
    Criterion c(3, "diffusion sampler oracle and bimodal recovery");
    // constant-prediction fixed point
    double fixed_point_err = 0.0;
    {
        wm::Diffusion d;
        d.dim = 5;
        d.cond_dim = 0;
        d.sched = wm::NoiseSchedule::cosine(50);
        const int dims[] = {5 + 8, 5};
        const nn::Activation acts[] = {nn::Activation::Identity};
        d.net = nn::MlpParams::make(dims, acts);
        for (auto& b : d.net.layers[0].b) b = 0.37;
        Rng rng(5);
        const auto out = wm::diffusion_sample(d, {}, rng);
        for (double v : out) {
            fixed_point_err = std::max(fixed_point_err, std::abs(v - 0.37));
        }
    }
    // 1-D bimodal target trained from scratch
    auto draw_target = [](Rng& rng) {
        return rng.uniform() < 0.35 ? 0.15 + 0.05 * rng.normal() : 0.75 + 0.05 * rng.normal();
    };
    Rng init(29);
    wm::Diffusion d = wm::Diffusion::init(1, 0, 48, 50, init);
    nn::AdamState opt = nn::AdamState::init(d.net, {2e-3, 0.9, 0.999, 1e-8});
    Rng rng(31);
    const int steps = 4000;
    for (int s = 0; s < steps; ++s) {
        opt.cfg.lr = nn::cosine_decay_lr(2e-3, 1e-4, s, steps);
        std::vector<wm::DiffusionRow> rows(64);
        for (auto& row : rows) {
            row.target = {draw_target(rng)};
        }
        nn::MlpGrad g = nn::MlpGrad::zeros_like(d.net);
        wm::diffusion_loss(d, rows, rng, &g);
        nn::adam_step(d.net, g, opt);
    }
    std::vector<double> samples;
    std::vector<double> reference;
    Rng eval_rng(33);
    for (int i = 0; i < 2000; ++i) {
        samples.push_back(wm::diffusion_sample(d, {}, eval_rng)[0]);
        reference.push_back(draw_target(eval_rng));
    }
    const double w1 = wasserstein1(samples, reference);
    char buf[140];
    std::snprintf(buf, sizeof(buf), "fixed-point err %.2e (<=1e-6), bimodal W1 %.4f (<0.1)",
                  fixed_point_err, w1);
    c.finish(fixed_point_err <= 1e-6 && w1 < 0.1, buf);
}

void criterion_4_flow_projection() {
    Criterion c(4, "flow-matching Gaussian projection");
    const std::vector<std::vector<double>> contexts = {{1.0, 0.0}, {0.0, 1.0}};
    const std::vector<std::vector<double>> mus = {{0.3, -0.2}, {-0.4, 0.1}};
    const double sigma = 0.2;
    Rng init(37);
    policy::FlowField f = policy::FlowField::init(2, 2, 64, init);
    nn::AdamState opt = nn::AdamState::init(f.net, {2e-3, 0.9, 0.999, 1e-8});
    Rng rng(39);
    const int steps = 6000;
    for (int s = 0; s < steps; ++s) {
        opt.cfg.lr = nn::cosine_decay_lr(2e-3, 1e-4, s, steps);
        std::vector<policy::FlowRow> rows(64);
        std::vector<policy::FlowDraw> draws;
        for (auto& row : rows) {
            const auto ctx = rng.below(2);
            row.cond = contexts[ctx];
            row.action = {mus[ctx][0] + sigma * rng.normal(), mus[ctx][1] + sigma * rng.normal()};
            row.weight = 1.0;
            draws.push_back(policy::flow_draw(2, rng));
        }
        nn::MlpGrad g = nn::MlpGrad::zeros_like(f.net);
        policy::flow_loss_sum_with_draws(f, rows, draws, &g);
        g.scale(1.0 / 64.0);
        nn::adam_step(f.net, g, opt);
    }
    double worst_mean_err = 0.0;
    double worst_w1 = 0.0;
    double worst_std_rel = 0.0;
    Rng eval_rng(41);
    for (std::size_t ctx = 0; ctx < contexts.size(); ++ctx) {
        std::vector<std::vector<double>> dims(2);
        for (int i = 0; i < 1500; ++i) {
            const auto a = policy::flow_sample(f, contexts[ctx], eval_rng, 20);
            dims[0].push_back(a[0]);
            dims[1].push_back(a[1]);
        }
        for (int k = 0; k < 2; ++k) {
            double mean = 0.0;
            for (double v : dims[static_cast<std::size_t>(k)]) mean += v;
            mean /= static_cast<double>(dims[static_cast<std::size_t>(k)].size());
            double var = 0.0;
            for (double v : dims[static_cast<std::size_t>(k)]) var += (v - mean) * (v - mean);
            var /= static_cast<double>(dims[static_cast<std::size_t>(k)].size());
            worst_mean_err = std::max(worst_mean_err, std::abs(mean - mus[ctx][static_cast<std::size_t>(k)]));
            worst_std_rel =
                std::max(worst_std_rel, std::abs(std::sqrt(var) - sigma) / sigma);
            std::vector<double> reference;
            for (int i = 0; i < 1500; ++i) {
                reference.push_back(mus[ctx][static_cast<std::size_t>(k)] + sigma * eval_rng.normal());
            }
            worst_w1 = std::max(worst_w1, wasserstein1(dims[static_cast<std::size_t>(k)], reference));
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "mean err %.4f (<0.02), per-coord W1 %.4f (<0.05), std rel err %.2f (<0.2)",
                  worst_mean_err, worst_w1, worst_std_rel);
    c.finish(worst_mean_err < 0.02 && worst_w1 < 0.05 && worst_std_rel < 0.2, buf);
}

// Shared full-scale fixture for criteria 5-8.
struct RunFixture {
    loop::RunConfig cfg;
    std::string ours_dir = "acceptance_runs/ours";
    std::string fbc_dir = "acceptance_runs/fbc";

    void build() {
        cfg = loop::RunConfig{};  // deployed defaults
        cfg.jobs = 2;
        cfg.seed = 1;
        if (!fs::exists(ours_dir + "/iter2/report.json")) {
            fs::remove_all(ours_dir);
            loop::run(cfg, ours_dir);
        }
        loop::RunConfig fbc = cfg;
        fbc.n_syn = 0;
        if (!fs::exists(fbc_dir + "/iter2/report.json")) {
            fs::remove_all(fbc_dir);
            loop::run(fbc, fbc_dir);
        }
    }
};

void criterion_5_over_optimism(const RunFixture& fixture) {
    Criterion c(5, "world-model over-optimism direction");
    const loop::RunPaths paths{fixture.ours_dir};
    const wm::WorldModel expert_only = wm::load_worldmodel(paths.wm_ckpt(0));
    const wm::WorldModel mixed = wm::load_worldmodel(paths.wm_ckpt(1));
    const data::TrajectoryStore real = data::load_store(paths.real_store(1));

    Rng clip_rng(1234);
    const auto clips = eval::extract_clips(real, 256, clip_rng, false);
    Rng iclip_rng(1235);
    const auto interaction_clips = eval::extract_clips(real, 50, iclip_rng, true);

    const auto fid_expert =
        eval::replay_fidelity(eval::model_factory(expert_only), clips, 77, fixture.cfg.jobs);
    const auto fid_mixed =
        eval::replay_fidelity(eval::model_factory(mixed), clips, 77, fixture.cfg.jobs);
    bool mse_better_everywhere = true;
    for (int h = 0; h < eval::kClipChunks; ++h) {
        mse_better_everywhere = mse_better_everywhere &&
                                fid_mixed.per_horizon[static_cast<std::size_t>(h)] <
                                    fid_expert.per_horizon[static_cast<std::size_t>(h)];
    }
    const auto cm_expert = eval::event_confusion_eval(eval::model_factory(expert_only),
                                                      interaction_clips, 78, fixture.cfg.jobs);
    const auto cm_mixed =
        eval::event_confusion_eval(eval::model_factory(mixed), interaction_clips, 78, fixture.cfg.jobs);
    const bool fp_direction =
        cm_mixed.fp < cm_expert.fp && cm_mixed.fp <= 0.6 * cm_expert.fp;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "FP %d -> %d (need strict drop to <=60%%), MSE mean %.4f -> %.4f, all horizons "
                  "better: %s",
                  cm_expert.fp, cm_mixed.fp, fid_expert.mean, fid_mixed.mean,
                  mse_better_everywhere ? "yes" : "no");
    c.finish(fp_direction && mse_better_everywhere, buf);
}

void criterion_6_reward_threshold(const RunFixture& fixture) {
    Criterion c(6, "reward thresholding direction");
    const loop::RunPaths paths{fixture.ours_dir};
    const reward::RewardNet rm = reward::load_reward(paths.rm_ckpt(1));
    const policy::Policy pi1 = policy::load_policy(paths.pi_ckpt(1));

    // 40 held-out labeled rollouts of the iteration-1 policy, fresh seeds
    data::TrajectoryStore held_out;
    int idx = 0;
    for (env::Family f : fixture.cfg.families) {
        for (int i = 0; i < 8; ++i, ++idx) {
            const env::TaskSpec task{f, i % env::variant_count(f),
                                     Rng::derive({0xe1dULL, static_cast<std::uint64_t>(idx)})};
            data::Trajectory t = loop::policy_rollout(
                pi1, task, Rng::derive({0xeecULL, static_cast<std::uint64_t>(idx)}));
            t.label = data::env_success_label(t);
            held_out.append(std::move(t));
        }
    }
    std::vector<int> labels;
    std::vector<int> preds_05;
    std::vector<int> preds_08;
    for (const auto& t : held_out.items()) {
        labels.push_back(t.label);
        preds_05.push_back(reward::classify(rm, t, 0.5));
        preds_08.push_back(reward::classify(rm, t, 0.8));
    }
    const reward::ConfusionMatrix m05 = reward::confusion(preds_05, labels);
    const reward::ConfusionMatrix m08 = reward::confusion(preds_08, labels);
    const int fp_gain = m05.fp - m08.fp;
    const int tp_loss = m05.tp - m08.tp;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "alpha 0.5: TP %d FP %d; alpha 0.8: TP %d FP %d (TP loss %d <= FP gain %d)",
                  m05.tp, m05.fp, m08.tp, m08.fp, tp_loss, fp_gain);
    c.finish(m08.fp < m05.fp && tp_loss <= fp_gain, buf);
}

void criterion_7_ordering(const RunFixture& fixture) {
    Criterion c(7, "end-to-end success ordering");
    const loop::RunPaths ours{fixture.ours_dir};
    const loop::RunPaths fbc{fixture.fbc_dir};
    const policy::Policy base = policy::load_policy(ours.pi_ckpt(0));
    const policy::Policy ours1 = policy::load_policy(ours.pi_ckpt(1));
    const policy::Policy ours2 = policy::load_policy(ours.pi_ckpt(2));
    const policy::Policy fbc2 = policy::load_policy(fbc.pi_ckpt(2));

    auto mean_rate = [&](const policy::Policy& pi) {
        double mean = 0.0;
        for (env::Family f : fixture.cfg.families) {
            mean += eval::family_success_rate(pi, f, fixture.cfg.eval_episodes, fixture.cfg);
        }
        return mean / static_cast<double>(fixture.cfg.families.size());
    };
    const double r_base = mean_rate(base);
    const double r_fbc2 = mean_rate(fbc2);
    const double r_ours1 = mean_rate(ours1);
    const double r_ours2 = mean_rate(ours2);
    const int episodes_per_method =
        fixture.cfg.eval_episodes * static_cast<int>(fixture.cfg.families.size());
    const bool pass = r_ours2 > r_fbc2 && r_fbc2 > r_base && r_ours2 - r_base >= 0.10 &&
                      r_ours2 > r_ours1 && episodes_per_method >= 200;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "base %.3f < fbc2 %.3f < ours2 %.3f (ours1 %.3f), gap %.3f >= 0.10, %d eps/method",
                  r_base, r_fbc2, r_ours2, r_ours1, r_ours2 - r_base, episodes_per_method);
    c.finish(pass, buf);
}

void criterion_8_ablations(const RunFixture& fixture) {
    Criterion c(8, "ablation directions on draw2d");
    const eval::EvalTable table = eval::ablation_suite(fixture.cfg, fixture.ours_dir);
    const double full = table.get("full", "draw2d_success");
    const double n_half = table.get("n_half", "draw2d_success");
    const double no_real = table.get("no_real", "draw2d_success");
    char buf[160];
    std::snprintf(buf, sizeof(buf), "full %.3f, n_half %.3f, no_real %.3f (both must be lower)",
                  full, n_half, no_real);
    c.finish(n_half < full && no_real < full, buf);
}

void criterion_9_reproducibility() {
    Criterion c(9, "bit-reproducibility across runs and jobs");
    loop::RunConfig small;
    small.families = {env::Family::Stack2d, env::Family::Wipe2d, env::Family::Draw2d};
    small.k_real = 10;
    small.n_syn = 30;
    small.k_iter = 1;
    small.wm_steps = 300;
    small.wm_pretrain_steps = 300;
    small.policy_steps = 200;
    small.policy_warmstart_steps = 300;
    small.rm_steps = 60;
    small.expert_demos = 6;
    small.pretrain_demos = 12;
    small.eval_episodes = 4;
    small.seed = 7;
    small.jobs = 1;

    const std::string dir_a = "acceptance_runs/repro_a";
    const std::string dir_b = "acceptance_runs/repro_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    loop::run(small, dir_a);
    loop::RunConfig parallel = small;
    parallel.jobs = 2;
    loop::run(parallel, dir_b);

    auto artifact_hash = [](const std::string& dir) {
        std::vector<std::string> files;
        for (const auto& entry : fs::recursive_directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().filename() != "timings.json") {
                files.push_back(fs::relative(entry.path(), dir).string());
            }
        }
        std::sort(files.begin(), files.end());
        std::uint64_t h = 1469598103934665603ULL;
        for (const auto& rel : files) {
            h = fnv1a(rel.data(), rel.size(), h);
            const std::string body = read_file(dir + "/" + rel);
            h = fnv1a(body.data(), body.size(), h);
        }
        return h;
    };
    const std::uint64_t ha = artifact_hash(dir_a);
    const std::uint64_t hb = artifact_hash(dir_b);
    char buf[120];
    std::snprintf(buf, sizeof(buf), "artifact hashes %016llx vs %016llx (jobs 1 vs 2)",
                  static_cast<unsigned long long>(ha), static_cast<unsigned long long>(hb));
    c.finish(ha == hb, buf);
}

}  // namespace

int main() {
    fs::create_directories("acceptance_runs");
    criterion_1_gradients();
    criterion_2_eq4_identity();
    criterion_3_diffusion();
    criterion_4_flow_projection();

    RunFixture fixture;
    std::printf("-- building shared run fixture (full default run + filtered-BC run) --\n");
    std::fflush(stdout);
    fixture.build();
    criterion_5_over_optimism(fixture);
    criterion_6_reward_threshold(fixture);
    criterion_7_ordering(fixture);
    criterion_8_ablations(fixture);
    criterion_9_reproducibility();

    if (g_failures > 0) {
        std::printf("ACCEPTANCE: %d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("ACCEPTANCE: all criteria passed\n");
    return 0;
}
