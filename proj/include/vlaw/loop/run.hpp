#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vlaw/data/store.hpp"
#include "vlaw/loop/config.hpp"
#include "vlaw/policy/policy.hpp"
#include "vlaw/reward/reward.hpp"
#include "vlaw/wm/worldmodel.hpp"

namespace vlaw::loop {

// Run-directory layout:
//   <run>/config.snapshot
//   <run>/warmstart/{expert,pretrain}.traj.jsonl + {wm,pi,rm}.ckpt + report.json
//   <run>/iter<k>/{real,syn}.traj.jsonl + {wm,pi,rm}.ckpt + report.json + timings.json
struct RunPaths {
    std::string root;

    std::string warmstart_dir() const { return root + "/warmstart"; }
    std::string iter_dir(int k) const { return root + "/iter" + std::to_string(k); }
    std::string snapshot() const { return root + "/config.snapshot"; }
    std::string expert_store() const { return warmstart_dir() + "/expert.traj.jsonl"; }
    std::string pretrain_store() const { return warmstart_dir() + "/pretrain.traj.jsonl"; }
    std::string real_store(int k) const { return iter_dir(k) + "/real.traj.jsonl"; }
    std::string syn_store(int k) const { return iter_dir(k) + "/syn.traj.jsonl"; }
    std::string wm_ckpt(int k) const {
        return (k == 0 ? warmstart_dir() : iter_dir(k)) + "/wm.ckpt";
    }
    std::string pi_ckpt(int k) const {
        return (k == 0 ? warmstart_dir() : iter_dir(k)) + "/pi.ckpt";
    }
    std::string rm_ckpt(int k) const {
        return (k == 0 ? warmstart_dir() : iter_dir(k)) + "/rm.ckpt";
    }
    std::string report(int k) const {
        return (k == 0 ? warmstart_dir() : iter_dir(k)) + "/report.json";
    }
    std::string timings(int k) const {
        return (k == 0 ? warmstart_dir() : iter_dir(k)) + "/timings.json";
    }
};

// Seed-stream tags; every random stream derives from
// (master seed, tag, iteration, family, index).
enum class SeedTag : std::uint64_t {
    WarmDemo = 1,
    PretrainDemo = 2,
    InitWm = 3,
    InitPi = 4,
    InitRm = 5,
    Collect = 6,
    WmTrain = 7,
    RmTrain = 8,
    DreamPick = 9,
    DreamPolicy = 10,
    DreamModel = 11,
    PolicyTrain = 12,
    Eval = 13,
    WmPretrain = 14,
    PiWarmTrain = 15,
};

std::uint64_t seed_for(const RunConfig& cfg, SeedTag tag, std::uint64_t a = 0,
                       std::uint64_t b = 0, std::uint64_t c = 0);

// Everything report.json records for one iteration. Wall-clock lives in the
// sibling timings.json so reports stay byte-reproducible.
struct IterationReport {
    int iter = 0;
    std::uint64_t seed = 0;
    std::map<std::string, double> real_success_rate;
    int d_real_total = 0;
    int d_real_plus_total = 0;
    int d_syn = 0;
    int d_syn_plus = 0;
    std::map<std::string, int> d_syn_plus_by_family;
    double wm_loss_real = 0.0;
    double wm_loss_pretrain = 0.0;
    double rm_train_accuracy = -1.0;  // -1 when frozen this iteration
    bool rm_frozen = false;
    double policy_loss = 0.0;
    bool policy_skipped = false;
};

// Phase 0: expert demo collection, frozen pretraining corpus, net inits,
// world-model pretraining and the supervised policy warm start.
void warmstart(const RunConfig& cfg, const std::string& run_dir);

// Phase 1: K on-policy rollouts per family with ground-truth success labels.
void phase_collect(const RunConfig& cfg, const std::string& run_dir, int iter);

// Phase 2: world-model finetuning on D_real mixed with the pretraining
// corpus, plus reward-model finetuning (first iteration only, then frozen).
void phase_wm_update(const RunConfig& cfg, const std::string& run_dir, int iter);
void phase_train_rm(const RunConfig& cfg, const std::string& run_dir, int iter);

// Phase 3: N imagined rollouts per family, labeled by the reward model.
void phase_dream(const RunConfig& cfg, const std::string& run_dir, int iter);

// Phase 4: success-weighted policy update on D_real+ u D_syn+.
void phase_policy_update(const RunConfig& cfg, const std::string& run_dir, int iter);

// The phase-4 training loop itself, shared with the ablation suite: the
// configured budget of update steps over the success union, seeded by
// rng_seed. Returns the input policy untouched when the union is empty.
policy::Policy train_policy_update(const RunConfig& cfg, policy::Policy pi,
                                   const data::TrajectoryStore& success_union,
                                   std::uint64_t rng_seed, double* final_loss, bool* skipped);

// The full iterated loop; returns one report per completed iteration.
std::vector<IterationReport> run(const RunConfig& cfg, const std::string& run_dir);

IterationReport read_report(const std::string& run_dir, int iter);

// Cumulative D_real across iterations 1..through_iter.
data::TrajectoryStore load_real_cumulative(const std::string& run_dir, int through_iter);

// Policy checkpoint that is current *before* iteration `iter` runs.
std::string policy_ckpt_before_iter(const std::string& run_dir, int iter);

void require_file(const std::string& path);

// Observation-policy rollout helper shared by collect and evaluation.
data::Trajectory policy_rollout(const policy::Policy& pi, const env::TaskSpec& task,
                                std::uint64_t policy_seed);

}  // namespace vlaw::loop
