#include "vlaw/data/store.hpp"

#include <fstream>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "vlaw/common/util.hpp"

namespace vlaw::data {

using nlohmann::json;

bool Selector::matches(const Trajectory& t) const {
    if (source && t.source != *source) return false;
    if (family && t.task.family != *family) return false;
    if (label && t.label != *label) return false;
    return true;
}

void TrajectoryStore::append(Trajectory traj) {
    traj.validate();
    items_.push_back(std::move(traj));
}

std::vector<const Trajectory*> TrajectoryStore::filter_success(const Selector& sel) const {
    std::vector<const Trajectory*> out;
    for (const auto& t : items_) {
        Selector scope = sel;
        scope.label.reset();
        if (!scope.matches(t)) {
            continue;
        }
        if (t.label == kUnlabeled) {
            throw std::runtime_error("filter_success: unlabeled trajectory in scope");
        }
        if (t.label == 1) {
            out.push_back(&t);
        }
    }
    return out;
}

std::size_t TrajectoryStore::count(const Selector& sel) const {
    std::size_t n = 0;
    for (const auto& t : items_) {
        n += sel.matches(t) ? 1 : 0;
    }
    return n;
}

TransitionSampler::TransitionSampler(const TrajectoryStore& store, const Selector& sel)
    : store_(store) {
    for (std::size_t ti = 0; ti < store.size(); ++ti) {
        const Trajectory& t = store.at(ti);
        if (!sel.matches(t)) {
            continue;
        }
        for (int k = 0; k < t.chunk_count(); ++k) {
            index_.emplace_back(ti, k);
        }
    }
}

TransitionRow TransitionSampler::make_row(std::size_t pair) const {
    const auto [ti, k] = index_[pair];
    const Trajectory& t = store_.at(ti);
    TransitionRow row;
    row.obs = t.obs[static_cast<std::size_t>(k) * env::kChunkLen];
    row.chunk = t.chunks[static_cast<std::size_t>(k)];
    row.future.resize(static_cast<std::size_t>(env::kChunkLen) * env::kObsDim);
    for (int r = 0; r < env::kChunkLen; ++r) {
        const env::Obs& o = t.obs[static_cast<std::size_t>(k) * env::kChunkLen + 1 + static_cast<std::size_t>(r)];
        for (int d = 0; d < env::kObsDim; ++d) {
            row.future[static_cast<std::size_t>(r) * env::kObsDim + static_cast<std::size_t>(d)] = o[static_cast<std::size_t>(d)];
        }
    }
    row.weight = t.label == 1 ? 1.0 : 0.0;
    row.family = t.task.family;
    row.variant = t.task.variant;
    return row;
}

TransitionBatch TransitionSampler::sample(std::size_t batch_size, Rng& rng) const {
    if (index_.empty()) {
        throw std::runtime_error("sample_batch: empty selection");
    }
    TransitionBatch batch;
    batch.rows.reserve(batch_size);
    for (std::size_t i = 0; i < batch_size; ++i) {
        batch.rows.push_back(make_row(rng.below(index_.size())));
    }
    return batch;
}

TransitionBatch TransitionSampler::all() const {
    TransitionBatch batch;
    batch.rows.reserve(index_.size());
    for (std::size_t i = 0; i < index_.size(); ++i) {
        batch.rows.push_back(make_row(i));
    }
    return batch;
}

TransitionBatch sample_batch(const TrajectoryStore& store, const Selector& sel,
                             std::size_t batch_size, Rng& rng) {
    TransitionSampler sampler(store, sel);
    return sampler.sample(batch_size, rng);
}

namespace {
json trajectory_to_json(const Trajectory& t) {
    json j;
    j["task"] = env::task_name(t.task.family, t.task.variant);
    j["seed"] = t.task.seed;
    j["source"] = source_name(t.source);
    j["label"] = t.label;
    std::vector<double> obs_flat;
    obs_flat.reserve(t.obs.size() * env::kObsDim);
    for (const auto& o : t.obs) {
        obs_flat.insert(obs_flat.end(), o.begin(), o.end());
    }
    j["obs"] = doubles_to_base64(obs_flat);
    std::vector<double> chunk_flat;
    chunk_flat.reserve(t.chunks.size() * env::kChunkLen * 2);
    for (const auto& c : t.chunks) {
        chunk_flat.insert(chunk_flat.end(), c.v.begin(), c.v.end());
    }
    j["chunks"] = doubles_to_base64(chunk_flat);
    j["events"] = json::array();
    return j;
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory t;
    env::parse_task_name(j.at("task").get<std::string>(), t.task.family, t.task.variant);
    t.task.seed = j.at("seed").get<std::uint64_t>();
    t.source = source_from_name(j.at("source").get<std::string>());
    t.label = j.at("label").get<int>();
    const auto obs_flat = base64_to_doubles(j.at("obs").get<std::string>());
    if (obs_flat.size() % env::kObsDim != 0) {
        throw std::runtime_error("store: observation payload has wrong length");
    }
    t.obs.resize(obs_flat.size() / env::kObsDim);
    for (std::size_t i = 0; i < t.obs.size(); ++i) {
        for (int d = 0; d < env::kObsDim; ++d) {
            t.obs[i][static_cast<std::size_t>(d)] = obs_flat[i * env::kObsDim + static_cast<std::size_t>(d)];
        }
    }
    const auto chunk_flat = base64_to_doubles(j.at("chunks").get<std::string>());
    if (chunk_flat.size() % (env::kChunkLen * 2) != 0) {
        throw std::runtime_error("store: chunk payload has wrong length");
    }
    t.chunks.resize(chunk_flat.size() / (env::kChunkLen * 2));
    for (std::size_t i = 0; i < t.chunks.size(); ++i) {
        for (int d = 0; d < env::kChunkLen * 2; ++d) {
            t.chunks[i].v[static_cast<std::size_t>(d)] =
                chunk_flat[i * env::kChunkLen * 2 + static_cast<std::size_t>(d)];
        }
    }
    return t;
}
}  // namespace

void save_store(const TrajectoryStore& store, const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw std::runtime_error("store: cannot open for write: " + path);
    }
    std::map<std::string, int> manifest_counts;
    for (const auto& t : store.items()) {
        out << trajectory_to_json(t).dump() << "\n";
        const std::string key = std::string(source_name(t.source)) + "/" +
                                env::family_name(t.task.family) + "/" + std::to_string(t.label);
        manifest_counts[key] += 1;
    }
    if (!out) {
        throw std::runtime_error("store: write failed: " + path);
    }
    out.close();
    json manifest;
    manifest["total"] = store.size();
    manifest["counts"] = manifest_counts;
    std::ofstream mout(path + ".manifest.json", std::ios::trunc);
    mout << manifest.dump(2) << "\n";
}

void append_from_file(TrajectoryStore& store, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("store: cannot open: " + path);
    }
    std::vector<Trajectory> pending;  // commit only after the whole file parses
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        try {
            pending.push_back(trajectory_from_json(json::parse(line)));
            pending.back().validate();
        } catch (const std::exception& e) {
            throw std::runtime_error("store: corrupt record at " + path + ":" +
                                     std::to_string(line_no) + ": " + e.what());
        }
    }
    for (auto& t : pending) {
        store.append(std::move(t));
    }
}

TrajectoryStore load_store(const std::string& path) {
    TrajectoryStore store;
    append_from_file(store, path);
    return store;
}

}  // namespace vlaw::data
