#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vlaw/env/task.hpp"

namespace vlaw::loop {

struct ConfigError : std::runtime_error {
    std::string key;
    ConfigError(const std::string& k, const std::string& msg)
        : std::runtime_error(msg), key(k) {}
};

struct MissingArtifact : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Every knob of the iterated co-improvement run. Defaults follow the
// deployed configuration: 50 real rollouts and 500 synthetic rollouts per
// family per iteration, two iterations, reward threshold 0.8.
struct RunConfig {
    std::vector<env::Family> families{env::Family::Stack2d, env::Family::Wipe2d,
                                      env::Family::Book2d, env::Family::Scoop2d,
                                      env::Family::Draw2d};
    int k_real = 50;
    int n_syn = 500;
    int k_iter = 2;
    double alpha = 0.8;
    double lambda = 0.5;
    double beta = 1.0;  // exponential weighting mode only; the loop runs binary
    int chunk_len = env::kChunkLen;

    int wm_steps = 5000;
    int wm_pretrain_steps = 5000;
    int wm_batch = 64;
    int wm_hidden = 64;
    int wm_t_steps = 50;
    double wm_lr = 1e-3;

    int policy_steps = 1000;
    int policy_warmstart_steps = 12000;
    int policy_batch = 64;
    int policy_hidden = 128;
    int policy_sample_steps = 10;
    double policy_lr = 1e-3;

    int rm_steps = 200;
    int rm_batch = 128;
    int rm_hidden = 32;
    double rm_lr = 1e-3;

    int expert_demos = 25;    // warm-start demonstrations per family
    int pretrain_demos = 200; // frozen pretraining corpus per family
    int eval_episodes = 50;   // per family per method

    std::uint64_t seed = 0;
    int jobs = 1;

    void validate() const;
};

// Flat dotted-key text config: `key = value` lines, '#' comments. Precedence
// defaults <- file <- overrides. Unknown keys and type mismatches raise
// ConfigError naming the key.
RunConfig config_load(const std::string& path, const std::vector<std::string>& overrides);
RunConfig config_from_entries(const std::map<std::string, std::string>& entries);

// Diffable snapshot: one sorted `key = value` line per knob.
std::string config_snapshot(const RunConfig& cfg);
void config_save(const RunConfig& cfg, const std::string& path);
RunConfig config_load_snapshot(const std::string& path);

}  // namespace vlaw::loop
