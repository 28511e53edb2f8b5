#include <doctest.h>

#include <cmath>

#include "vlaw/data/trajectory.hpp"
#include "vlaw/env/env.hpp"
#include "vlaw/env/events.hpp"
#include "vlaw/env/expert.hpp"

using namespace vlaw;
using namespace vlaw::env;

namespace {

EnvState make_stack_state(Vec2 gripper, std::array<Vec2, 4> blocks, double radius) {
    EnvState s;
    s.task = {Family::Stack2d, 0, 0};
    s.gripper = gripper;
    StackSlots slots;
    slots.block = blocks;
    slots.radius = radius;
    s.slots = slots;
    return s;
}

data::Trajectory expert_rollout(const TaskSpec& task, std::uint64_t noise_seed) {
    Rng rng(noise_seed);
    auto policy = [](const EnvState& st, const Obs&, Rng& r) {
        return scripted_expert(st.task, st, r);
    };
    return data::rollout_real(task, policy, kHorizonChunks, rng, data::Source::Expert);
}

}  // namespace

TEST_CASE("reset: identical task specs give identical states") {
    const TaskSpec t{Family::Stack2d, 0, 7};
    const EnvState a = reset(t);
    const EnvState b = reset(t);
    const Obs oa = observe(a);
    const Obs ob = observe(b);
    for (int i = 0; i < kObsDim; ++i) {
        CHECK(oa[static_cast<std::size_t>(i)] == ob[static_cast<std::size_t>(i)]);
    }
}

TEST_CASE("reset: scoop2d particles start outside the bowl, nothing carried") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const EnvState s = reset({Family::Scoop2d, 1, seed});
        const auto& sl = std::get<ScoopSlots>(s.slots);
        for (int i = 0; i < 8; ++i) {
            CHECK(dist(sl.part[static_cast<std::size_t>(i)], sl.bowl) > kBowlRadius);
            CHECK_FALSE(sl.carried[static_cast<std::size_t>(i)]);
            CHECK_FALSE(sl.banked[static_cast<std::size_t>(i)]);
        }
    }
}

TEST_CASE("reset: stack2d blocks keep pairwise separation of at least 2 radii") {
    // brute-force recheck of the rejection-sampled placement
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        for (int variant : {0, 5, 11}) {
            const EnvState s = reset({Family::Stack2d, variant, seed});
            const auto& sl = std::get<StackSlots>(s.slots);
            for (int i = 0; i < 4; ++i) {
                for (int j = i + 1; j < 4; ++j) {
                    CHECK(dist(sl.block[static_cast<std::size_t>(i)], sl.block[static_cast<std::size_t>(j)]) >=
                          2.0 * sl.radius);
                }
            }
        }
    }
}

TEST_CASE("step: zero action leaves everything in place, advances the counter") {
    EnvState s = reset({Family::Wipe2d, 2, 3});
    const Obs before = observe(s);
    step(s, 0.0, 0.0);
    const Obs after = observe(s);
    for (int i = 0; i < kObsDim; ++i) {
        CHECK(before[static_cast<std::size_t>(i)] == after[static_cast<std::size_t>(i)]);
    }
    CHECK(s.step_count == 1);
}

TEST_CASE("step: disk push projects the block to exact contact distance") {
    // gripper radius 0.03 + block radius 0.02 -> contact distance 0.05
    EnvState s = make_stack_state({0.5, 0.5}, {Vec2{0.52, 0.5}, Vec2{0.9, 0.9}, Vec2{0.1, 0.9}, Vec2{0.9, 0.1}}, 0.02);
    step(s, 0.05, 0.0);
    const auto& sl = std::get<StackSlots>(s.slots);
    CHECK(s.gripper.x == doctest::Approx(0.55));
    CHECK(dist(s.gripper, sl.block[0]) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(sl.block[0].y == doctest::Approx(0.5));
}

TEST_CASE("step: gripper clamps at the workspace boundary") {
    EnvState s = reset({Family::Draw2d, 0, 1});
    s.gripper = {0.99, 0.5};
    step(s, 0.05, 0.0);
    CHECK(s.gripper.x == doctest::Approx(1.0));
}

TEST_CASE("step: oversized and non-finite actions are clamped, never rejected") {
    EnvState s = reset({Family::Draw2d, 0, 1});
    const Vec2 before = s.gripper;
    step(s, 99.0, -99.0);
    CHECK(s.gripper.x == doctest::Approx(before.x + kActionMax));
    CHECK(s.gripper.y == doctest::Approx(before.y - kActionMax));
    CHECK_NOTHROW(step(s, std::nan(""), 0.0));
}

TEST_CASE("success: wipe2d is true exactly when every mark is erased") {
    EnvState s = reset({Family::Wipe2d, 1, 5});
    auto& sl = std::get<WipeSlots>(s.slots);
    std::vector<Obs> seq{observe(s), observe(s)};
    CHECK_FALSE(success_from_obs(Family::Wipe2d, seq));
    for (int i = 0; i < sl.mark_count; ++i) {
        sl.erased[static_cast<std::size_t>(i)] = true;
    }
    seq.push_back(observe(s));
    CHECK(success_from_obs(Family::Wipe2d, seq));
}

TEST_CASE("success: draw2d tolerates one gap but not two") {
    EnvState s = reset({Family::Draw2d, 0, 9});
    auto& sl = std::get<DrawSlots>(s.slots);
    // 11 of 12 visited in order, skipping waypoint 5
    int n = 0;
    for (int k = 0; k < 12; ++k) {
        if (k == 5) continue;
        sl.visited[static_cast<std::size_t>(k)] = true;
        sl.visit_seq[static_cast<std::size_t>(n++)] = k;
    }
    sl.visit_count = n;
    std::vector<Obs> seq{observe(s), observe(s)};
    CHECK(success_from_obs(Family::Draw2d, seq));

    EnvState s2 = reset({Family::Draw2d, 0, 9});
    auto& sl2 = std::get<DrawSlots>(s2.slots);
    n = 0;
    for (int k = 0; k < 12; ++k) {
        if (k == 5 || k == 8) continue;
        sl2.visited[static_cast<std::size_t>(k)] = true;
        sl2.visit_seq[static_cast<std::size_t>(n++)] = k;
    }
    sl2.visit_count = n;
    std::vector<Obs> seq2{observe(s2), observe(s2)};
    CHECK_FALSE(success_from_obs(Family::Draw2d, seq2));
}

TEST_CASE("success: scoop2d counts particles in the bowl by membership") {
    EnvState s = reset({Family::Scoop2d, 0, 11});
    auto& sl = std::get<ScoopSlots>(s.slots);
    for (int i = 0; i < 3; ++i) {
        sl.part[static_cast<std::size_t>(i)] = sl.bowl;
        sl.banked[static_cast<std::size_t>(i)] = true;
    }
    // brute-force point-in-disk recount agrees with the banked flags
    int in_bowl = 0;
    for (int i = 0; i < 8; ++i) {
        in_bowl += dist(sl.part[static_cast<std::size_t>(i)], sl.bowl) <= kBowlRadius ? 1 : 0;
    }
    CHECK(in_bowl == 3);
    std::vector<Obs> seq{observe(s), observe(s)};
    CHECK(success_from_obs(Family::Scoop2d, seq));
    sl.banked[2] = false;
    sl.part[2] = {0.05, 0.05};
    std::vector<Obs> seq2{observe(s), observe(s)};
    CHECK_FALSE(success_from_obs(Family::Scoop2d, seq2));
}

TEST_CASE("success: incomplete trajectories are rejected") {
    CHECK_THROWS(success_from_obs(Family::Wipe2d, std::vector<Obs>{Obs{}}));
}

TEST_CASE("expert: noise-free chunk rows point toward the subgoal") {
    const TaskSpec t{Family::Wipe2d, 0, 21};
    EnvState s = reset(t);
    const Vec2 goal = expert_subgoal(s);
    Rng rng(0);
    const ActionChunk c = scripted_expert(t, s, rng, 0.0);
    const Vec2 dir{goal.x - s.gripper.x, goal.y - s.gripper.y};
    for (int r = 0; r < kChunkLen; ++r) {
        CHECK(c.dx(r) * dir.x + c.dy(r) * dir.y > 0.0);
    }
}

TEST_CASE("expert: same task, state and seed give identical chunks") {
    const TaskSpec t{Family::Scoop2d, 1, 33};
    const EnvState s = reset(t);
    Rng a(42);
    Rng b(42);
    const ActionChunk ca = scripted_expert(t, s, a);
    const ActionChunk cb = scripted_expert(t, s, b);
    for (std::size_t i = 0; i < ca.v.size(); ++i) {
        CHECK(ca.v[i] == cb.v[i]);
    }
}

TEST_CASE("expert: success rate is at least 0.8 on every family over 100 episodes") {
    for (int fi = 0; fi < kNumFamilies; ++fi) {
        const auto family = static_cast<Family>(fi);
        int wins = 0;
        const int episodes = 100;
        for (int e = 0; e < episodes; ++e) {
            const TaskSpec task{family, e % variant_count(family),
                                Rng::derive({9001, static_cast<std::uint64_t>(fi), static_cast<std::uint64_t>(e)})};
            const data::Trajectory traj = expert_rollout(task, Rng::derive({77, static_cast<std::uint64_t>(e)}));
            wins += data::env_success_label(traj);
        }
        INFO("family ", family_name(family), " success ", wins, "/100");
        CHECK(wins >= 80);
    }
}

TEST_CASE("rollouts are bit-deterministic and contained in the unit square") {
    const TaskSpec t{Family::Stack2d, 4, 13};
    const data::Trajectory a = expert_rollout(t, 5);
    const data::Trajectory b = expert_rollout(t, 5);
    CHECK(data::trajectory_hash(a) == data::trajectory_hash(b));
    for (const auto& o : a.obs) {
        CHECK(o[0] >= 0.0);
        CHECK(o[0] <= 1.0);
        CHECK(o[1] >= 0.0);
        CHECK(o[1] <= 1.0);
    }
}

TEST_CASE("monotone flags: erased marks never revert within an episode") {
    const TaskSpec t{Family::Wipe2d, 2, 19};
    const data::Trajectory traj = expert_rollout(t, 3);
    int prev = 0;
    for (const auto& o : traj.obs) {
        int erased = 0;
        for (int i = 0; i < 3; ++i) {
            erased += o[static_cast<std::size_t>(7 + 3 * i + 2)] >= 0.5 ? 1 : 0;
        }
        CHECK(erased >= prev);
        prev = erased;
    }
}

TEST_CASE("annotate_events: clip without contact reports no interaction") {
    EnvState s = reset({Family::Stack2d, 0, 2});
    s.gripper = {0.5, 0.05};  // far from every block
    std::vector<Obs> seq;
    for (int i = 0; i < 6; ++i) {
        seq.push_back(observe(s));
        step(s, 0.0, 0.001);
    }
    seq.push_back(observe(s));
    const EventAnnotation ann = annotate_events(Family::Stack2d, seq, 0, 6);
    CHECK_FALSE(ann.interaction);
}

TEST_CASE("annotate_events: wipe clip that erases a mark is a success event") {
    EnvState s = reset({Family::Wipe2d, 1, 4});
    auto& sl = std::get<WipeSlots>(s.slots);
    s.tool_engaged = true;
    sl.erased[0] = true;  // one already gone
    std::vector<Obs> seq{observe(s)};
    // drive the gripper onto the second mark
    const Vec2 target = sl.mark[1];
    for (int i = 0; i < 12; ++i) {
        const double dx = std::clamp(target.x - s.gripper.x, -kActionMax, kActionMax);
        const double dy = std::clamp(target.y - s.gripper.y, -kActionMax, kActionMax);
        step(s, dx, dy);
        seq.push_back(observe(s));
    }
    const EventAnnotation ann = annotate_events(Family::Wipe2d, seq, 0, static_cast<int>(seq.size()) - 1);
    CHECK(ann.interaction);
    CHECK(ann.outcome_success);
}

TEST_CASE("annotate_events: stack displacement below 0.02 is a failure outcome") {
    // replay oracle: push block A only 0.015 toward B, with contact
    EnvState s = make_stack_state({0.5, 0.5}, {Vec2{0.565, 0.5}, Vec2{0.9, 0.5}, Vec2{0.2, 0.9}, Vec2{0.2, 0.1}},
                                  kBlockRadius);
    std::vector<Obs> seq{observe(s)};
    step(s, 0.05, 0.0);  // contact: gripper ends at 0.55, gap 0.065 -> push to 0.615
    seq.push_back(observe(s));
    const auto& sl = std::get<StackSlots>(s.slots);
    const double moved = sl.block[0].x - 0.565;
    CHECK(moved == doctest::Approx(0.05).epsilon(1e-9));
    // back off and recheck with a clip whose net displacement is small
    EnvState s2 = make_stack_state({0.5, 0.5}, {Vec2{0.57, 0.5}, Vec2{0.9, 0.5}, Vec2{0.2, 0.9}, Vec2{0.2, 0.1}},
                                   kBlockRadius);
    std::vector<Obs> seq2{observe(s2)};
    step(s2, 0.02, 0.0);  // gripper to 0.52, block projected to 0.585: moved 0.015
    seq2.push_back(observe(s2));
    CHECK(std::get<StackSlots>(s2.slots).block[0].x == doctest::Approx(0.585));
    const EventAnnotation ann = annotate_events(Family::Stack2d, seq2, 0, 1);
    CHECK(ann.interaction);
    CHECK_FALSE(ann.outcome_success);
}

TEST_CASE("draw order check accepts cyclic order in either direction") {
    std::array<int, 12> seq{};
    for (int i = 0; i < 12; ++i) seq[static_cast<std::size_t>(i)] = (3 + i) % 12;
    CHECK(draw_order_ok(seq, 12));
    for (int i = 0; i < 12; ++i) seq[static_cast<std::size_t>(i)] = (3 - i % 12 + 12) % 12;
    CHECK(draw_order_ok(seq, 12));
    seq = {0, 2, 1};
    CHECK_FALSE(draw_order_ok(seq, 3));
}
