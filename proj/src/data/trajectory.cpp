#include "vlaw/data/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include "vlaw/common/util.hpp"

namespace vlaw::data {

const char* source_name(Source s) {
    switch (s) {
        case Source::Real: return "real";
        case Source::Synthetic: return "synthetic";
        case Source::Expert: return "expert";
    }
    return "?";
}

Source source_from_name(const std::string& name) {
    if (name == "real") return Source::Real;
    if (name == "synthetic") return Source::Synthetic;
    if (name == "expert") return Source::Expert;
    throw std::invalid_argument("unknown trajectory source: " + name);
}

void Trajectory::validate() const {
    if (obs.empty()) {
        throw std::invalid_argument("trajectory: no observations");
    }
    if (obs.size() != chunks.size() * env::kChunkLen + 1) {
        throw std::invalid_argument("trajectory: observation count " + std::to_string(obs.size()) +
                                    " does not match chunks*H+1 = " +
                                    std::to_string(chunks.size() * env::kChunkLen + 1));
    }
    if (label < -1 || label > 1) {
        throw std::invalid_argument("trajectory: label must be -1, 0 or 1");
    }
    if (task.variant < 0 || task.variant >= env::variant_count(task.family)) {
        throw std::invalid_argument("trajectory: variant out of range");
    }
    for (const auto& o : obs) {
        for (double v : o) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("trajectory: non-finite observation value");
            }
        }
    }
    for (const auto& c : chunks) {
        for (double v : c.v) {
            if (!std::isfinite(v) || std::abs(v) > env::kActionMax + 1e-12) {
                throw std::invalid_argument("trajectory: action outside clamp bounds");
            }
        }
    }
}

Trajectory rollout_real(const env::TaskSpec& task, const RolloutPolicy& policy, int chunks,
                        Rng& policy_rng, Source source) {
    env::EnvState state = env::reset(task);
    Trajectory traj;
    traj.task = task;
    traj.source = source;
    traj.obs.push_back(env::observe(state));
    for (int k = 0; k < chunks; ++k) {
        const env::ActionChunk chunk = policy(state, traj.obs.back(), policy_rng);
        traj.chunks.push_back(chunk);
        for (int r = 0; r < env::kChunkLen; ++r) {
            env::step(state, chunk.dx(r), chunk.dy(r));
            traj.obs.push_back(env::observe(state));
        }
    }
    return traj;
}

int env_success_label(const Trajectory& traj) {
    if (traj.obs.size() != env::kHorizonSteps + 1) {
        throw std::invalid_argument("success: trajectory incomplete (" +
                                    std::to_string(traj.obs.size()) + " frames)");
    }
    return env::success_from_obs(traj.task.family, traj.obs) ? 1 : 0;
}

std::uint64_t trajectory_hash(const Trajectory& traj) {
    std::uint64_t h = 1469598103934665603ULL;
    const auto fam = static_cast<std::uint64_t>(traj.task.family);
    h = fnv1a(&fam, sizeof(fam), h);
    h = fnv1a(&traj.task.variant, sizeof(traj.task.variant), h);
    h = fnv1a(&traj.task.seed, sizeof(traj.task.seed), h);
    h = fnv1a(&traj.label, sizeof(traj.label), h);
    for (const auto& o : traj.obs) {
        h = fnv1a(o.data(), o.size() * sizeof(double), h);
    }
    for (const auto& c : traj.chunks) {
        h = fnv1a(c.v.data(), c.v.size() * sizeof(double), h);
    }
    return h;
}

}  // namespace vlaw::data
