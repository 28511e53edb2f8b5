#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "vlaw/common/util.hpp"
#include "vlaw/data/store.hpp"
#include "vlaw/data/trajectory.hpp"
#include "vlaw/env/expert.hpp"

using namespace vlaw;
using namespace vlaw::data;

namespace {

Trajectory make_traj(env::Family family, int variant, std::uint64_t seed, Source source,
                     int label, int chunks = 2) {
    Rng rng(Rng::derive({seed, 555}));
    auto policy = [](const env::EnvState& st, const env::Obs&, Rng& r) {
        return env::scripted_expert(st.task, st, r);
    };
    Trajectory t = rollout_real({family, variant, seed}, policy, chunks, rng, source);
    t.label = label;
    return t;
}

}  // namespace

TEST_CASE("append: grows by one and preserves earlier entries byte for byte") {
    TrajectoryStore store;
    CHECK(store.size() == 0);
    Trajectory t0 = make_traj(env::Family::Wipe2d, 0, 1, Source::Real, 1);
    const std::uint64_t h0 = trajectory_hash(t0);
    store.append(t0);
    CHECK(store.size() == 1);
    store.append(make_traj(env::Family::Wipe2d, 1, 2, Source::Real, 0));
    CHECK(store.size() == 2);
    CHECK(trajectory_hash(store.at(0)) == h0);
}

TEST_CASE("append: malformed trajectories are rejected with a reason") {
    TrajectoryStore store;
    Trajectory bad = make_traj(env::Family::Draw2d, 0, 3, Source::Real, 1);
    bad.obs.pop_back();
    CHECK_THROWS_WITH_AS(store.append(bad), doctest::Contains("observation count"),
                         std::invalid_argument);
    Trajectory bad_label = make_traj(env::Family::Draw2d, 0, 3, Source::Real, 1);
    bad_label.label = 7;
    CHECK_THROWS_AS(store.append(bad_label), std::invalid_argument);
}

TEST_CASE("filter_success: keeps exactly the label-1 entries in order") {
    TrajectoryStore store;
    store.append(make_traj(env::Family::Book2d, 0, 1, Source::Real, 1));
    store.append(make_traj(env::Family::Book2d, 1, 2, Source::Real, 0));
    store.append(make_traj(env::Family::Book2d, 2, 3, Source::Real, 1));
    const auto wins = store.filter_success({Source::Real, {}, {}});
    REQUIRE(wins.size() == 2);
    CHECK(wins[0]->task.seed == 1);
    CHECK(wins[1]->task.seed == 3);
}

TEST_CASE("filter_success: all-failure scope yields an empty set") {
    TrajectoryStore store;
    store.append(make_traj(env::Family::Book2d, 0, 1, Source::Synthetic, 0));
    CHECK(store.filter_success({Source::Synthetic, {}, {}}).empty());
}

TEST_CASE("filter_success: unlabeled trajectory in scope is an error") {
    TrajectoryStore store;
    store.append(make_traj(env::Family::Book2d, 0, 1, Source::Real, kUnlabeled));
    CHECK_THROWS_AS(store.filter_success({Source::Real, {}, {}}), std::runtime_error);
}

TEST_CASE("filter_success: count matches a brute-force recount on random labels") {
    TrajectoryStore store;
    Rng rng(404);
    int expect = 0;
    for (int i = 0; i < 60; ++i) {
        const int label = rng.below(2) == 0 ? 0 : 1;
        expect += label;
        store.append(make_traj(env::Family::Wipe2d, i % 3, static_cast<std::uint64_t>(i),
                               Source::Synthetic, label, 1));
    }
    CHECK(store.filter_success({Source::Synthetic, {}, {}}).size() ==
          static_cast<std::size_t>(expect));
}

TEST_CASE("sample_batch: single-transition store repeats that transition") {
    TrajectoryStore store;
    store.append(make_traj(env::Family::Draw2d, 0, 5, Source::Real, 1, 1));
    Rng rng(8);
    const TransitionBatch b = sample_batch(store, {}, 16, rng);
    REQUIRE(b.rows.size() == 16);
    for (const auto& row : b.rows) {
        CHECK(row.obs == store.at(0).obs[0]);
        CHECK(row.future[0] == store.at(0).obs[1][0]);
    }
}

TEST_CASE("sample_batch: seeded draws are identical") {
    TrajectoryStore store;
    for (int i = 0; i < 4; ++i) {
        store.append(make_traj(env::Family::Scoop2d, i % 3, static_cast<std::uint64_t>(i), Source::Real, 1));
    }
    Rng a(99);
    Rng b(99);
    const TransitionBatch ba = sample_batch(store, {}, 32, a);
    const TransitionBatch bb = sample_batch(store, {}, 32, b);
    for (std::size_t i = 0; i < ba.rows.size(); ++i) {
        CHECK(ba.rows[i].obs == bb.rows[i].obs);
        CHECK(ba.rows[i].chunk.v == bb.rows[i].chunk.v);
    }
}

TEST_CASE("sample_batch: uniform over a 4-transition store within 5 points") {
    TrajectoryStore store;
    for (int i = 0; i < 4; ++i) {
        store.append(make_traj(env::Family::Book2d, 0, 100 + static_cast<std::uint64_t>(i),
                               Source::Real, 1, 1));
    }
    TransitionSampler sampler(store, {});
    REQUIRE(sampler.transition_count() == 4);
    Rng rng(31337);
    std::array<int, 4> hits{};
    const int draws = 10000;
    const TransitionBatch batch = sampler.sample(draws, rng);
    for (const auto& row : batch.rows) {
        for (std::size_t t = 0; t < 4; ++t) {
            if (row.obs == store.at(t).obs[0]) {
                hits[t] += 1;
                break;
            }
        }
    }
    for (int h : hits) {
        CHECK(h / static_cast<double>(draws) == doctest::Approx(0.25).epsilon(0.2));
    }
}

TEST_CASE("sample_batch: empty selection is an error") {
    TrajectoryStore store;
    store.append(make_traj(env::Family::Book2d, 0, 1, Source::Real, 1));
    Rng rng(1);
    Selector sel;
    sel.source = Source::Synthetic;
    CHECK_THROWS_AS(sample_batch(store, sel, 4, rng), std::runtime_error);
}

TEST_CASE("save/load: round trip is lossless and idempotent") {
    TrajectoryStore store;
    for (int i = 0; i < 12; ++i) {
        store.append(make_traj(static_cast<env::Family>(i % 5), 0, static_cast<std::uint64_t>(i),
                               i % 2 == 0 ? Source::Real : Source::Synthetic, i % 3 == 0 ? 1 : 0));
    }
    const std::string p1 = "store_rt_1.traj.jsonl";
    const std::string p2 = "store_rt_2.traj.jsonl";
    save_store(store, p1);
    const TrajectoryStore loaded = load_store(p1);
    REQUIRE(loaded.size() == store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        CHECK(trajectory_hash(loaded.at(i)) == trajectory_hash(store.at(i)));
        CHECK(loaded.at(i).label == store.at(i).label);
        CHECK(loaded.at(i).source == store.at(i).source);
    }
    save_store(loaded, p2);
    CHECK(read_file(p1) == read_file(p2));
    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
    std::filesystem::remove(p1 + ".manifest.json");
    std::filesystem::remove(p2 + ".manifest.json");
}

TEST_CASE("load: truncated file raises a structured error and no partial store") {
    TrajectoryStore store;
    store.append(make_traj(env::Family::Wipe2d, 0, 1, Source::Real, 1));
    store.append(make_traj(env::Family::Wipe2d, 1, 2, Source::Real, 0));
    const std::string path = "store_trunc.traj.jsonl";
    save_store(store, path);
    const std::string text = read_file(path);
    {
        std::ofstream out(path, std::ios::trunc);
        out.write(text.data(), static_cast<std::streamsize>(text.size() - 40));
    }
    TrajectoryStore target;
    CHECK_THROWS_WITH_AS(append_from_file(target, path), doctest::Contains(":2"),
                         std::runtime_error);
    CHECK(target.size() == 0);
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".manifest.json");
}

TEST_CASE("save/load: larger store round-trips labels field by field") {
    TrajectoryStore store;
    Rng rng(2024);
    for (int i = 0; i < 250; ++i) {
        store.append(make_traj(static_cast<env::Family>(rng.below(5)), 0,
                               static_cast<std::uint64_t>(i), Source::Synthetic,
                               rng.below(2) == 0 ? 0 : 1, 1));
    }
    const std::string path = "store_250.traj.jsonl";
    save_store(store, path);
    const TrajectoryStore loaded = load_store(path);
    REQUIRE(loaded.size() == 250);
    for (std::size_t i = 0; i < 250; ++i) {
        CHECK(loaded.at(i).label == store.at(i).label);
        CHECK(loaded.at(i).task.seed == store.at(i).task.seed);
    }
    std::filesystem::remove(path);
    std::filesystem::remove(path + ".manifest.json");
}
