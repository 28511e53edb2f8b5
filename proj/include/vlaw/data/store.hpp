#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vlaw/data/trajectory.hpp"

namespace vlaw::data {

// Filter over a store; unset fields match everything.
struct Selector {
    std::optional<Source> source;
    std::optional<env::Family> family;
    std::optional<int> label;

    bool matches(const Trajectory& t) const;
};

// Append-only trajectory storage.
class TrajectoryStore {
public:
    TrajectoryStore() = default;

    // Validates and appends; throws with a reason when malformed.
    void append(Trajectory traj);

    std::size_t size() const { return items_.size(); }
    const Trajectory& at(std::size_t i) const { return items_[i]; }
    const std::vector<Trajectory>& items() const { return items_; }

    // Success-filtered view in original order. Throws when an in-scope
    // trajectory is unlabeled.
    std::vector<const Trajectory*> filter_success(const Selector& sel) const;

    std::size_t count(const Selector& sel) const;

private:
    std::vector<Trajectory> items_;
};

// One transition row: conditioning observation, the chunk taken, the true
// future observations over the chunk, and a scalar weight.
struct TransitionRow {
    env::Obs obs;
    env::ActionChunk chunk;
    std::vector<double> future;  // kChunkLen * kObsDim, row-major by step
    double weight = 1.0;
    env::Family family = env::Family::Stack2d;
    int variant = 0;
};

struct TransitionBatch {
    std::vector<TransitionRow> rows;
};

// Uniform sampler over eligible (trajectory, chunk index) pairs. Snapshots
// the store's eligible indices at construction.
class TransitionSampler {
public:
    TransitionSampler(const TrajectoryStore& store, const Selector& sel);

    bool empty() const { return index_.empty(); }
    std::size_t transition_count() const { return index_.size(); }
    TransitionBatch sample(std::size_t batch_size, Rng& rng) const;

    // Deterministic enumeration of every eligible transition, store order.
    TransitionBatch all() const;

private:
    TransitionRow make_row(std::size_t pair) const;

    const TrajectoryStore& store_;
    std::vector<std::pair<std::size_t, int>> index_;  // (traj, chunk)
};

// Spec-level convenience: one-shot uniform batch. Throws on empty selection.
TransitionBatch sample_batch(const TrajectoryStore& store, const Selector& sel,
                             std::size_t batch_size, Rng& rng);

// JSONL persistence (one self-describing object per line) plus a sidecar
// manifest with counts per (source, family, label). Round-trips losslessly.
void save_store(const TrajectoryStore& store, const std::string& path);
TrajectoryStore load_store(const std::string& path);
void append_from_file(TrajectoryStore& store, const std::string& path);

}  // namespace vlaw::data
