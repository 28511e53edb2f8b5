#include "vlaw/eval/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vlaw/common/util.hpp"

namespace vlaw::eval {

using nlohmann::json;

std::vector<ReplayClip> extract_clips(const data::TrajectoryStore& store, int count, Rng& rng,
                                      bool interaction_only) {
    std::vector<std::pair<std::size_t, int>> eligible;
    for (std::size_t ti = 0; ti < store.size(); ++ti) {
        const data::Trajectory& t = store.at(ti);
        for (int start = 0; start + kClipChunks <= t.chunk_count(); ++start) {
            if (interaction_only) {
                const auto ann = env::annotate_events(t.task.family, t.obs,
                                                      start * env::kChunkLen,
                                                      kClipChunks * env::kChunkLen);
                if (!ann.interaction) {
                    continue;
                }
            }
            eligible.emplace_back(ti, start);
        }
    }
    if (static_cast<int>(eligible.size()) < count) {
        throw std::runtime_error("extract_clips: requested " + std::to_string(count) +
                                 " clips but only " + std::to_string(eligible.size()) +
                                 " qualify (short by " +
                                 std::to_string(count - static_cast<int>(eligible.size())) + ")");
    }
    // partial Fisher-Yates: uniform sample without replacement
    for (int i = 0; i < count; ++i) {
        const auto j = static_cast<std::size_t>(i) +
                       rng.below(eligible.size() - static_cast<std::size_t>(i));
        std::swap(eligible[static_cast<std::size_t>(i)], eligible[j]);
    }
    std::vector<ReplayClip> clips;
    clips.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const auto [ti, start] = eligible[static_cast<std::size_t>(i)];
        const data::Trajectory& t = store.at(ti);
        ReplayClip clip;
        clip.task = t.task;
        clip.traj_index = ti;
        clip.start_chunk = start;
        clip.start = t.obs[static_cast<std::size_t>(start) * env::kChunkLen];
        for (int k = 0; k < kClipChunks; ++k) {
            clip.chunks[static_cast<std::size_t>(k)] = t.chunks[static_cast<std::size_t>(start + k)];
        }
        for (int f = 1; f <= kClipChunks * env::kChunkLen; ++f) {
            clip.future.push_back(t.obs[static_cast<std::size_t>(start) * env::kChunkLen +
                                        static_cast<std::size_t>(f)]);
        }
        clip.real_annotation = env::annotate_events(t.task.family, t.obs, start * env::kChunkLen,
                                                    kClipChunks * env::kChunkLen);
        clips.push_back(std::move(clip));
    }
    return clips;
}

DynamicsFactory model_factory(const wm::WorldModel& model) {
    return [&model](const ReplayClip&) { return wm::wm_dynamics(model); };
}

DynamicsFactory oracle_factory(const data::TrajectoryStore& store) {
    return [&store](const ReplayClip& clip) {
        auto state = std::make_shared<env::EnvState>(env::reset(clip.task));
        const data::Trajectory& src = store.at(clip.traj_index);
        for (int k = 0; k < clip.start_chunk; ++k) {
            const env::ActionChunk& c = src.chunks[static_cast<std::size_t>(k)];
            for (int r = 0; r < env::kChunkLen; ++r) {
                env::step(*state, c.dx(r), c.dy(r));
            }
        }
        return [state](const env::Obs&, const env::ActionChunk& chunk, const env::TaskSpec&,
                       Rng&) {
            std::vector<env::Obs> frames;
            frames.reserve(env::kChunkLen);
            for (int r = 0; r < env::kChunkLen; ++r) {
                env::step(*state, chunk.dx(r), chunk.dy(r));
                frames.push_back(env::observe(*state));
            }
            return frames;
        };
    };
}

namespace {
std::vector<env::Obs> replay_clip(const wm::ChunkDynamics& dynamics, const ReplayClip& clip,
                                  Rng& rng) {
    std::vector<env::Obs> predicted{clip.start};
    env::Obs obs = clip.start;
    for (int h = 0; h < kClipChunks; ++h) {
        const auto frames = dynamics(obs, clip.chunks[static_cast<std::size_t>(h)], clip.task, rng);
        for (const auto& f : frames) {
            predicted.push_back(f);
        }
        obs = predicted.back();
    }
    return predicted;
}
}  // namespace

ReplayFidelity replay_fidelity(const DynamicsFactory& factory, const std::vector<ReplayClip>& clips,
                               std::uint64_t seed, int jobs) {
    if (clips.empty()) {
        throw std::invalid_argument("replay_fidelity: no clips");
    }
    std::vector<std::array<double, kClipChunks>> sse(clips.size());
    parallel_for(clips.size(), jobs, [&](std::size_t i) {
        const ReplayClip& clip = clips[i];
        const auto dynamics = factory(clip);
        Rng rng(Rng::derive({seed, i}));
        const auto predicted = replay_clip(dynamics, clip, rng);
        std::array<double, kClipChunks> acc{};
        for (int h = 0; h < kClipChunks; ++h) {
            double s = 0.0;
            for (int f = 0; f < env::kChunkLen; ++f) {
                const auto idx = static_cast<std::size_t>(h * env::kChunkLen + f);
                for (int d = 0; d < env::kObsDim; ++d) {
                    const double diff = predicted[idx + 1][static_cast<std::size_t>(d)] -
                                        clip.future[idx][static_cast<std::size_t>(d)];
                    s += diff * diff;
                }
            }
            acc[static_cast<std::size_t>(h)] = s;
        }
        sse[i] = acc;
    });
    ReplayFidelity out;
    const double denom = static_cast<double>(clips.size()) * env::kChunkLen * env::kObsDim;
    for (int h = 0; h < kClipChunks; ++h) {
        double total = 0.0;
        for (const auto& acc : sse) {
            total += acc[static_cast<std::size_t>(h)];
        }
        out.per_horizon[static_cast<std::size_t>(h)] = total / denom;
        out.mean += out.per_horizon[static_cast<std::size_t>(h)] / kClipChunks;
    }
    return out;
}

reward::ConfusionMatrix event_confusion_eval(const DynamicsFactory& factory,
                                             const std::vector<ReplayClip>& clips,
                                             std::uint64_t seed, int jobs) {
    std::vector<int> preds(clips.size());
    std::vector<int> labels(clips.size());
    parallel_for(clips.size(), jobs, [&](std::size_t i) {
        const ReplayClip& clip = clips[i];
        const auto dynamics = factory(clip);
        Rng rng(Rng::derive({seed, 0x5eed, i}));
        const auto predicted = replay_clip(dynamics, clip, rng);
        const auto ann = env::annotate_events(clip.task.family, predicted, 0,
                                              kClipChunks * env::kChunkLen);
        preds[i] = ann.interaction && ann.outcome_success ? 1 : 0;
        labels[i] = clip.real_annotation.interaction && clip.real_annotation.outcome_success ? 1 : 0;
    });
    return reward::confusion(preds, labels);
}

void EvalTable::add(const std::string& tag, const std::string& metric, double value) {
    for (const auto& row : rows) {
        if (row.tag == tag && row.metric == metric) {
            throw std::invalid_argument("eval table: duplicate (tag, metric) " + tag + "," + metric);
        }
    }
    rows.push_back(EvalRow{tag, metric, value});
}

double EvalTable::get(const std::string& tag, const std::string& metric) const {
    for (const auto& row : rows) {
        if (row.tag == tag && row.metric == metric) {
            return row.value;
        }
    }
    throw std::out_of_range("eval table: missing (tag, metric) " + tag + "," + metric);
}

std::string EvalTable::to_csv() const {
    std::ostringstream ss;
    ss.precision(17);
    ss << "tag,metric,value\n";
    for (const auto& row : rows) {
        ss << row.tag << "," << row.metric << "," << row.value << "\n";
    }
    return ss.str();
}

std::string EvalTable::to_json() const {
    json arr = json::array();
    for (const auto& row : rows) {
        arr.push_back(json{{"tag", row.tag}, {"metric", row.metric}, {"value", row.value}});
    }
    return arr.dump(2) + "\n";
}

double family_success_rate(const policy::Policy& pi, env::Family family, int episodes,
                           const loop::RunConfig& cfg) {
    std::vector<int> wins(static_cast<std::size_t>(episodes));
    parallel_for(wins.size(), cfg.jobs, [&](std::size_t e) {
        const env::TaskSpec task{family, static_cast<int>(e) % env::variant_count(family),
                                 loop::seed_for(cfg, loop::SeedTag::Eval,
                                                static_cast<std::uint64_t>(family), e, 0)};
        const data::Trajectory t = loop::policy_rollout(
            pi, task,
            loop::seed_for(cfg, loop::SeedTag::Eval, static_cast<std::uint64_t>(family), e, 1));
        wins[e] = data::env_success_label(t);
    });
    int total = 0;
    for (int w : wins) {
        total += w;
    }
    return static_cast<double>(total) / static_cast<double>(episodes);
}

EvalTable success_table(const policy::Policy& pi, const std::vector<env::Family>& families,
                        int episodes_per_family, const loop::RunConfig& cfg,
                        const std::string& tag) {
    EvalTable table;
    double mean = 0.0;
    for (env::Family f : families) {
        const double rate = family_success_rate(pi, f, episodes_per_family, cfg);
        table.add(tag, env::family_name(f), rate);
        mean += rate;
    }
    table.add(tag, "mean", mean / static_cast<double>(families.size()));
    return table;
}

EvalTable ablation_suite(const loop::RunConfig& cfg, const std::string& run_dir) {
    const loop::RunPaths paths{run_dir};
    const int k = cfg.k_iter;
    if (k < 1) {
        throw std::invalid_argument("ablation_suite: run has no iterations");
    }
    if (std::find(cfg.families.begin(), cfg.families.end(), env::Family::Draw2d) ==
        cfg.families.end()) {
        throw std::invalid_argument("ablation_suite: run does not include draw2d");
    }
    loop::require_file(paths.syn_store(k));
    loop::require_file(loop::policy_ckpt_before_iter(run_dir, k));
    const policy::Policy pi_before =
        policy::load_policy(loop::policy_ckpt_before_iter(run_dir, k));
    const data::TrajectoryStore real = loop::load_real_cumulative(run_dir, k);
    const data::TrajectoryStore syn = data::load_store(paths.syn_store(k));
    const std::uint64_t train_seed =
        loop::seed_for(cfg, loop::SeedTag::PolicyTrain, static_cast<std::uint64_t>(k));

    // syn records are stored family-major in dream-index order, so the first
    // n/2 per family equal a run generated with the halved budget
    auto syn_subset = [&](int per_family) {
        data::TrajectoryStore out;
        for (std::size_t idx = 0; idx < syn.size(); ++idx) {
            if (cfg.n_syn <= 0 || static_cast<int>(idx) % cfg.n_syn < per_family) {
                out.append(syn.at(idx));
            }
        }
        return out;
    };

    struct Variant {
        std::string tag;
        bool use_real;
        int syn_per_family;
    };
    const Variant variants[] = {
        {"full", true, cfg.n_syn},
        {"n_half", true, cfg.n_syn / 2},
        {"no_real", false, cfg.n_syn},
    };

    EvalTable table;
    for (const auto& variant : variants) {
        data::TrajectoryStore plus;
        if (variant.use_real) {
            for (const auto* t : real.filter_success({})) {
                plus.append(*t);
            }
        }
        const data::TrajectoryStore chosen = syn_subset(variant.syn_per_family);
        for (const auto* t : chosen.filter_success({})) {
            plus.append(*t);
        }
        const policy::Policy pi_variant =
            loop::train_policy_update(cfg, pi_before, plus, train_seed, nullptr, nullptr);
        const double rate =
            family_success_rate(pi_variant, env::Family::Draw2d, cfg.eval_episodes, cfg);
        table.add(variant.tag, "draw2d_success", rate);
        table.add(variant.tag, "success_union_size", static_cast<double>(plus.size()));
    }
    return table;
}

}  // namespace vlaw::eval
