#include "vlaw/loop/run.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "vlaw/common/util.hpp"
#include "vlaw/env/expert.hpp"

namespace vlaw::loop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void log_line(const std::string& msg) {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&tt));
    std::cerr << buf << " " << msg << "\n";
}

json read_json_or_empty(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        return json::object();
    }
    json j;
    in >> j;
    return j;
}

void merge_into_report(const std::string& path, const json& fragment) {
    json j = read_json_or_empty(path);
    for (const auto& [key, value] : fragment.items()) {
        j[key] = value;
    }
    std::ofstream out(path, std::ios::trunc);
    out << j.dump(2) << "\n";
}

struct PhaseTimer {
    std::string path;
    std::string key;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    ~PhaseTimer() {
        const double sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json j = read_json_or_empty(path);
        j[key] = sec;
        std::ofstream out(path, std::ios::trunc);
        out << j.dump(2) << "\n";
    }
};

env::TaskSpec task_for(const RunConfig& cfg, env::Family family, SeedTag tag, int iter, int idx) {
    return env::TaskSpec{family, idx % env::variant_count(family),
                         seed_for(cfg, tag, static_cast<std::uint64_t>(iter),
                                  static_cast<std::uint64_t>(family),
                                  static_cast<std::uint64_t>(idx))};
}

data::TrajectoryStore collect_expert_set(const RunConfig& cfg, SeedTag tag, int per_family) {
    std::vector<data::Trajectory> slots(cfg.families.size() * static_cast<std::size_t>(per_family));
    parallel_for(slots.size(), cfg.jobs, [&](std::size_t slot) {
        const auto fi = slot / static_cast<std::size_t>(per_family);
        const int i = static_cast<int>(slot % static_cast<std::size_t>(per_family));
        const env::Family family = cfg.families[fi];
        const env::TaskSpec task = task_for(cfg, family, tag, 0, i);
        Rng rng(seed_for(cfg, tag, 1000, static_cast<std::uint64_t>(family),
                         static_cast<std::uint64_t>(i)));
        auto expert = [](const env::EnvState& st, const env::Obs&, Rng& r) {
            return env::scripted_expert(st.task, st, r);
        };
        data::Trajectory t =
            data::rollout_real(task, expert, env::kHorizonChunks, rng, data::Source::Expert);
        t.label = data::env_success_label(t);
        slots[slot] = std::move(t);
    });
    data::TrajectoryStore store;
    for (auto& t : slots) {
        store.append(std::move(t));
    }
    return store;
}

// Splits a batch between the real store and the pretraining corpus with
// pretrain fraction lambda/(1+lambda), the Eq.-2 mixing choice.
std::pair<int, int> batch_split(int batch, double lambda) {
    const int pre = static_cast<int>(std::lround(batch * lambda / (1.0 + lambda)));
    return {batch - pre, pre};
}

}  // namespace

std::uint64_t seed_for(const RunConfig& cfg, SeedTag tag, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
    return Rng::derive({cfg.seed, static_cast<std::uint64_t>(tag), a, b, c});
}

void require_file(const std::string& path) {
    if (!fs::exists(path)) {
        throw MissingArtifact("missing artifact: " + path);
    }
}

data::Trajectory policy_rollout(const policy::Policy& pi, const env::TaskSpec& task,
                                std::uint64_t policy_seed) {
    Rng rng(policy_seed);
    auto act = [&pi](const env::EnvState& st, const env::Obs& obs, Rng& r) {
        return policy::sample_action(pi, obs, st.task.family, r);
    };
    return data::rollout_real(task, act, env::kHorizonChunks, rng, data::Source::Real);
}

std::string policy_ckpt_before_iter(const std::string& run_dir, int iter) {
    const RunPaths paths{run_dir};
    return paths.pi_ckpt(iter - 1);
}

data::TrajectoryStore load_real_cumulative(const std::string& run_dir, int through_iter) {
    const RunPaths paths{run_dir};
    data::TrajectoryStore store;
    for (int k = 1; k <= through_iter; ++k) {
        require_file(paths.real_store(k));
        data::append_from_file(store, paths.real_store(k));
    }
    return store;
}

void warmstart(const RunConfig& cfg, const std::string& run_dir) {
    const RunPaths paths{run_dir};
    fs::create_directories(paths.warmstart_dir());
    PhaseTimer timer{paths.timings(0), "warmstart_sec"};

    log_line("warmstart: collecting expert demonstrations");
    const data::TrajectoryStore expert = collect_expert_set(cfg, SeedTag::WarmDemo, cfg.expert_demos);
    data::save_store(expert, paths.expert_store());
    const data::TrajectoryStore pretrain =
        collect_expert_set(cfg, SeedTag::PretrainDemo, cfg.pretrain_demos);
    data::save_store(pretrain, paths.pretrain_store());

    log_line("warmstart: pretraining world model on the frozen corpus");
    Rng wm_init(seed_for(cfg, SeedTag::InitWm));
    wm::WorldModel model = wm::WorldModel::init(cfg.wm_hidden, cfg.wm_t_steps, wm_init);
    {
        data::TransitionSampler sampler(pretrain, {});
        nn::AdamState opt = nn::AdamState::init(model.diff.net, {cfg.wm_lr, 0.9, 0.999, 1e-8});
        Rng rng(seed_for(cfg, SeedTag::WmPretrain));
        double last = 0.0;
        for (int s = 0; s < cfg.wm_pretrain_steps; ++s) {
            opt.cfg.lr = nn::cosine_decay_lr(cfg.wm_lr, cfg.wm_lr / 20.0, s, cfg.wm_pretrain_steps);
            const auto batch = sampler.sample(static_cast<std::size_t>(cfg.wm_batch), rng);
            nn::MlpGrad grad = nn::MlpGrad::zeros_like(model.diff.net);
            last = wm::wm_loss(model, batch, rng, &grad);
            nn::adam_step(model.diff.net, grad, opt);
        }
        merge_into_report(paths.report(0), json{{"wm_pretrain_loss", last}});
    }
    wm::save_worldmodel(model, paths.wm_ckpt(0));

    log_line("warmstart: supervised flow matching on expert demos");
    Rng pi_init(seed_for(cfg, SeedTag::InitPi));
    policy::Policy pi = policy::Policy::init(cfg.policy_hidden, pi_init);
    pi.sample_steps = cfg.policy_sample_steps;
    {
        data::TransitionSampler sampler(expert, {});
        nn::AdamState opt = nn::AdamState::init(pi.field.net, {cfg.policy_lr, 0.9, 0.999, 1e-8});
        Rng rng(seed_for(cfg, SeedTag::PiWarmTrain));
        double last = 0.0;
        for (int s = 0; s < cfg.policy_warmstart_steps; ++s) {
            opt.cfg.lr = nn::cosine_decay_lr(cfg.policy_lr, cfg.policy_lr / 20.0, s,
                                             cfg.policy_warmstart_steps);
            const auto batch = sampler.sample(static_cast<std::size_t>(cfg.policy_batch), rng);
            nn::MlpGrad grad = nn::MlpGrad::zeros_like(pi.field.net);
            last = policy::fm_loss(pi, batch, rng, &grad);
            nn::adam_step(pi.field.net, grad, opt);
        }
        merge_into_report(paths.report(0), json{{"policy_warmstart_loss", last}});
    }
    policy::save_policy(pi, paths.pi_ckpt(0));

    Rng rm_init(seed_for(cfg, SeedTag::InitRm));
    reward::RewardNet rm = reward::RewardNet::init(cfg.rm_hidden, rm_init);
    reward::save_reward(rm, paths.rm_ckpt(0));

    json fragment;
    std::map<std::string, double> expert_rate;
    for (env::Family f : cfg.families) {
        data::Selector sel;
        sel.family = f;
        const auto wins = expert.filter_success(sel).size();
        expert_rate[env::family_name(f)] =
            static_cast<double>(wins) / static_cast<double>(cfg.expert_demos);
    }
    fragment["expert_success_rate"] = expert_rate;
    fragment["seed"] = cfg.seed;
    merge_into_report(paths.report(0), fragment);
}

void phase_collect(const RunConfig& cfg, const std::string& run_dir, int iter) {
    const RunPaths paths{run_dir};
    require_file(policy_ckpt_before_iter(run_dir, iter));
    const policy::Policy pi = policy::load_policy(policy_ckpt_before_iter(run_dir, iter));
    fs::create_directories(paths.iter_dir(iter));
    PhaseTimer timer{paths.timings(iter), "collect_sec"};
    log_line("iter " + std::to_string(iter) + ": real rollouts");

    std::vector<data::Trajectory> slots(cfg.families.size() * static_cast<std::size_t>(cfg.k_real));
    parallel_for(slots.size(), cfg.jobs, [&](std::size_t slot) {
        const auto fi = slot / static_cast<std::size_t>(cfg.k_real);
        const int i = static_cast<int>(slot % static_cast<std::size_t>(cfg.k_real));
        const env::Family family = cfg.families[fi];
        const env::TaskSpec task = task_for(cfg, family, SeedTag::Collect, iter, i);
        data::Trajectory t = policy_rollout(
            pi, task,
            seed_for(cfg, SeedTag::Collect, 7000 + static_cast<std::uint64_t>(iter),
                     static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(i)));
        t.label = data::env_success_label(t);
        slots[slot] = std::move(t);
    });
    data::TrajectoryStore store;
    for (auto& t : slots) {
        store.append(std::move(t));
    }
    data::save_store(store, paths.real_store(iter));

    json fragment;
    fragment["iter"] = iter;
    fragment["seed"] = cfg.seed;
    std::map<std::string, double> rate;
    int plus = 0;
    for (env::Family f : cfg.families) {
        data::Selector sel;
        sel.family = f;
        const auto wins = store.filter_success(sel).size();
        plus += static_cast<int>(wins);
        rate[env::family_name(f)] =
            cfg.k_real > 0 ? static_cast<double>(wins) / static_cast<double>(cfg.k_real) : 0.0;
    }
    fragment["real_success_rate"] = rate;
    fragment["d_real_new"] = store.size();
    fragment["d_real_new_plus"] = plus;
    merge_into_report(paths.report(iter), fragment);
}

void phase_train_rm(const RunConfig& cfg, const std::string& run_dir, int iter) {
    const RunPaths paths{run_dir};
    fs::create_directories(paths.iter_dir(iter));
    if (iter > 1) {
        // frozen after the first iteration: carry the checkpoint through
        require_file(paths.rm_ckpt(iter - 1));
        fs::copy_file(paths.rm_ckpt(iter - 1), paths.rm_ckpt(iter),
                      fs::copy_options::overwrite_existing);
        merge_into_report(paths.report(iter), json{{"rm_frozen", true}});
        return;
    }
    require_file(paths.rm_ckpt(0));
    require_file(paths.real_store(1));
    reward::RewardNet rm = reward::load_reward(paths.rm_ckpt(0));
    const data::TrajectoryStore real = data::load_store(paths.real_store(1));
    std::vector<const data::Trajectory*> ptrs;
    for (const auto& t : real.items()) {
        ptrs.push_back(&t);
    }
    nn::AdamState opt = nn::AdamState::init(rm.net, {cfg.rm_lr, 0.9, 0.999, 1e-8});
    Rng rng(seed_for(cfg, SeedTag::RmTrain, static_cast<std::uint64_t>(iter)));
    const reward::RmTrainResult result = rm_train(rm, ptrs, cfg.rm_steps, cfg.rm_batch, opt, rng);
    if (result.single_class_warning) {
        log_line("warning: reward-model training data is single-class");
    }
    reward::save_reward(rm, paths.rm_ckpt(iter));
    merge_into_report(paths.report(iter), json{{"rm_train_accuracy", result.train_accuracy},
                                               {"rm_frozen", false}});
}

void phase_wm_update(const RunConfig& cfg, const std::string& run_dir, int iter) {
    const RunPaths paths{run_dir};
    require_file(paths.wm_ckpt(iter - 1));
    require_file(paths.pretrain_store());
    wm::WorldModel model = wm::load_worldmodel(paths.wm_ckpt(iter - 1));
    const data::TrajectoryStore real = load_real_cumulative(run_dir, iter);
    const data::TrajectoryStore pretrain = data::load_store(paths.pretrain_store());
    fs::create_directories(paths.iter_dir(iter));
    PhaseTimer timer{paths.timings(iter), "wm_update_sec"};
    log_line("iter " + std::to_string(iter) + ": world-model finetuning (" +
             std::to_string(real.size()) + " real trajectories)");

    data::TransitionSampler real_sampler(real, {});
    data::TransitionSampler pre_sampler(pretrain, {});
    const auto [n_real, n_pre] = batch_split(cfg.wm_batch, cfg.lambda);
    nn::AdamState opt = nn::AdamState::init(model.diff.net, {cfg.wm_lr, 0.9, 0.999, 1e-8});
    Rng rng(seed_for(cfg, SeedTag::WmTrain, static_cast<std::uint64_t>(iter)));
    wm::WmStepLosses last;
    for (int s = 0; s < cfg.wm_steps; ++s) {
        opt.cfg.lr = nn::cosine_decay_lr(cfg.wm_lr, cfg.wm_lr / 20.0, s, cfg.wm_steps);
        const auto real_batch = real_sampler.sample(static_cast<std::size_t>(n_real), rng);
        data::TransitionBatch pre_batch;
        if (n_pre > 0 && cfg.lambda > 0.0) {
            pre_batch = pre_sampler.sample(static_cast<std::size_t>(n_pre), rng);
        }
        last = wm::wm_train_step(model, real_batch, pre_batch, cfg.lambda, opt, rng);
    }
    wm::save_worldmodel(model, paths.wm_ckpt(iter));
    merge_into_report(paths.report(iter),
                      json{{"wm_loss_real", last.real}, {"wm_loss_pretrain", last.pretrain}});

    phase_train_rm(cfg, run_dir, iter);
}

void phase_dream(const RunConfig& cfg, const std::string& run_dir, int iter) {
    const RunPaths paths{run_dir};
    require_file(paths.wm_ckpt(iter));
    require_file(paths.rm_ckpt(iter));
    require_file(policy_ckpt_before_iter(run_dir, iter));
    const wm::WorldModel model = wm::load_worldmodel(paths.wm_ckpt(iter));
    const reward::RewardNet rm = reward::load_reward(paths.rm_ckpt(iter));
    const policy::Policy pi = policy::load_policy(policy_ckpt_before_iter(run_dir, iter));
    const data::TrajectoryStore real = load_real_cumulative(run_dir, iter);
    PhaseTimer timer{paths.timings(iter), "dream_sec"};
    log_line("iter " + std::to_string(iter) + ": imagination rollouts");

    // initial observations come from stored real trajectories of the family
    std::map<env::Family, std::vector<std::size_t>> by_family;
    for (std::size_t i = 0; i < real.size(); ++i) {
        by_family[real.at(i).task.family].push_back(i);
    }
    const auto dynamics = wm::wm_dynamics(model, wm::SampleMode::Deterministic);
    const auto act = policy::chunk_policy(pi);

    std::vector<data::Trajectory> slots(cfg.families.size() * static_cast<std::size_t>(cfg.n_syn));
    parallel_for(slots.size(), cfg.jobs, [&](std::size_t slot) {
        const auto fi = slot / static_cast<std::size_t>(cfg.n_syn);
        const int j = static_cast<int>(slot % static_cast<std::size_t>(cfg.n_syn));
        const env::Family family = cfg.families[fi];
        const auto pool_it = by_family.find(family);
        if (pool_it == by_family.end() || pool_it->second.empty()) {
            throw MissingArtifact("dream: no real trajectories for " +
                                  std::string(env::family_name(family)));
        }
        const auto& pool = pool_it->second;
        Rng pick(seed_for(cfg, SeedTag::DreamPick, static_cast<std::uint64_t>(iter),
                          static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(j)));
        const data::Trajectory& src = real.at(pool[pick.below(pool.size())]);
        Rng policy_rng(seed_for(cfg, SeedTag::DreamPolicy, static_cast<std::uint64_t>(iter),
                                static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(j)));
        Rng model_rng(seed_for(cfg, SeedTag::DreamModel, static_cast<std::uint64_t>(iter),
                               static_cast<std::uint64_t>(family), static_cast<std::uint64_t>(j)));
        data::Trajectory t = wm::rollout_in_model(dynamics, act, src.obs[0], src.task,
                                                  env::kHorizonChunks, policy_rng, model_rng);
        t.label = reward::classify(rm, t, cfg.alpha);
        slots[slot] = std::move(t);
    });
    data::TrajectoryStore syn;
    for (auto& t : slots) {
        syn.append(std::move(t));
    }
    data::save_store(syn, paths.syn_store(iter));

    json fragment;
    fragment["d_syn"] = syn.size();
    std::map<std::string, int> plus_by_family;
    int plus = 0;
    for (env::Family f : cfg.families) {
        data::Selector sel;
        sel.family = f;
        const int wins = static_cast<int>(syn.filter_success(sel).size());
        plus_by_family[env::family_name(f)] = wins;
        plus += wins;
        if (cfg.n_syn > 0 && wins == 0) {
            log_line("warning: no accepted synthetic rollouts for " +
                     std::string(env::family_name(f)) + " in iteration " + std::to_string(iter));
        }
    }
    fragment["d_syn_plus"] = plus;
    fragment["d_syn_plus_by_family"] = plus_by_family;
    merge_into_report(paths.report(iter), fragment);
}

policy::Policy train_policy_update(const RunConfig& cfg, policy::Policy pi,
                                   const data::TrajectoryStore& success_union,
                                   std::uint64_t rng_seed, double* final_loss, bool* skipped) {
    if (success_union.size() == 0) {
        if (skipped != nullptr) {
            *skipped = true;
        }
        return pi;
    }
    if (skipped != nullptr) {
        *skipped = false;
    }
    data::TransitionSampler sampler(success_union, {});
    nn::AdamState opt = nn::AdamState::init(pi.field.net, {cfg.policy_lr, 0.9, 0.999, 1e-8});
    Rng rng(rng_seed);
    policy::PolicyUpdateResult last;
    for (int s = 0; s < cfg.policy_steps; ++s) {
        opt.cfg.lr = nn::cosine_decay_lr(cfg.policy_lr, cfg.policy_lr / 20.0, s, cfg.policy_steps);
        const auto batch = sampler.sample(static_cast<std::size_t>(cfg.policy_batch), rng);
        last = policy::policy_update_step(pi, batch, {}, {}, opt, rng);
    }
    if (final_loss != nullptr) {
        *final_loss = last.loss;
    }
    return pi;
}

void phase_policy_update(const RunConfig& cfg, const std::string& run_dir, int iter) {
    const RunPaths paths{run_dir};
    require_file(policy_ckpt_before_iter(run_dir, iter));
    require_file(paths.syn_store(iter));
    policy::Policy pi = policy::load_policy(policy_ckpt_before_iter(run_dir, iter));
    const data::TrajectoryStore real = load_real_cumulative(run_dir, iter);
    const data::TrajectoryStore syn = data::load_store(paths.syn_store(iter));
    PhaseTimer timer{paths.timings(iter), "policy_update_sec"};
    log_line("iter " + std::to_string(iter) + ": policy update");

    // success-filtered union, real first then synthetic
    data::TrajectoryStore plus;
    for (const auto* t : real.filter_success({})) {
        plus.append(*t);
    }
    const int d_real_plus = static_cast<int>(plus.size());
    for (const auto* t : syn.filter_success({})) {
        plus.append(*t);
    }

    json fragment;
    fragment["d_real_total"] = real.size();
    fragment["d_real_plus_total"] = d_real_plus;
    double final_loss = 0.0;
    bool was_skipped = false;
    pi = train_policy_update(cfg, std::move(pi), plus,
                             seed_for(cfg, SeedTag::PolicyTrain, static_cast<std::uint64_t>(iter)),
                             &final_loss, &was_skipped);
    if (was_skipped) {
        log_line("warning: empty success union, policy update skipped");
    }
    policy::save_policy(pi, paths.pi_ckpt(iter));
    fragment["policy_loss"] = final_loss;
    fragment["policy_skipped"] = was_skipped;
    merge_into_report(paths.report(iter), fragment);
}

IterationReport read_report(const std::string& run_dir, int iter) {
    const RunPaths paths{run_dir};
    require_file(paths.report(iter));
    const json j = read_json_or_empty(paths.report(iter));
    IterationReport r;
    r.iter = j.value("iter", iter);
    r.seed = j.value("seed", 0ULL);
    if (j.contains("real_success_rate")) {
        for (const auto& [k, v] : j.at("real_success_rate").items()) {
            r.real_success_rate[k] = v.get<double>();
        }
    }
    r.d_real_total = j.value("d_real_total", 0);
    r.d_real_plus_total = j.value("d_real_plus_total", 0);
    r.d_syn = j.value("d_syn", 0);
    r.d_syn_plus = j.value("d_syn_plus", 0);
    if (j.contains("d_syn_plus_by_family")) {
        for (const auto& [k, v] : j.at("d_syn_plus_by_family").items()) {
            r.d_syn_plus_by_family[k] = v.get<int>();
        }
    }
    r.wm_loss_real = j.value("wm_loss_real", 0.0);
    r.wm_loss_pretrain = j.value("wm_loss_pretrain", 0.0);
    r.rm_train_accuracy = j.value("rm_train_accuracy", -1.0);
    r.rm_frozen = j.value("rm_frozen", false);
    r.policy_loss = j.value("policy_loss", 0.0);
    r.policy_skipped = j.value("policy_skipped", false);
    return r;
}

std::vector<IterationReport> run(const RunConfig& cfg, const std::string& run_dir) {
    warmstart(cfg, run_dir);
    std::vector<IterationReport> reports;
    for (int k = 1; k <= cfg.k_iter; ++k) {
        phase_collect(cfg, run_dir, k);
        phase_wm_update(cfg, run_dir, k);
        phase_dream(cfg, run_dir, k);
        phase_policy_update(cfg, run_dir, k);
        reports.push_back(read_report(run_dir, k));
    }
    return reports;
}

}  // namespace vlaw::loop
