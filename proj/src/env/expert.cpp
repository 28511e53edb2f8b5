#include "vlaw/env/expert.hpp"

#include <algorithm>
#include <cmath>

namespace vlaw::env {

namespace {
constexpr double kPi = 3.14159265358979323846;

Vec2 normalize(Vec2 v) {
    const double m = std::sqrt(v.x * v.x + v.y * v.y);
    if (m < 1e-12) {
        return {1.0, 0.0};
    }
    return {v.x / m, v.y / m};
}

Vec2 sub(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

// Steers around a disk obstacle when the straight path to `target` cuts
// through it.
Vec2 route_around(const Vec2& g, const Vec2& target, const Vec2& obstacle, double radius) {
    const Vec2 to_t = sub(target, g);
    const double len = std::sqrt(dot(to_t, to_t));
    if (len < 1e-9) {
        return target;
    }
    const Vec2 dir{to_t.x / len, to_t.y / len};
    const Vec2 rel = sub(obstacle, g);
    const double along = dot(rel, dir);
    if (along <= 0.0 || along >= len) {
        return target;
    }
    const Vec2 lateral{rel.x - along * dir.x, rel.y - along * dir.y};
    const double off = std::sqrt(dot(lateral, lateral));
    if (off >= radius) {
        return target;
    }
    Vec2 away = off > 1e-9 ? Vec2{lateral.x / off, lateral.y / off} : Vec2{-dir.y, dir.x};
    return {obstacle.x - away.x * (radius + 0.02), obstacle.y - away.y * (radius + 0.02)};
}

Vec2 stack_subgoal(const EnvState& s) {
    const auto& sl = std::get<StackSlots>(s.slots);
    const Vec2 a = sl.block[0];
    const Vec2 b = sl.block[1];
    const double gap = kGripperRadius + sl.radius;
    if (dist(a, b) <= 0.4 * sl.radius) {
        // done: back away so noise cannot nudge the stack apart
        const Vec2 away = normalize(sub(s.gripper, a));
        return {a.x + away.x * 0.2, a.y + away.y * 0.2};
    }
    const Vec2 push_dir = normalize(sub(b, a));
    const double behindness = dot(normalize(sub(a, s.gripper)), push_dir);
    const bool aligned = behindness > 0.92 && dist(s.gripper, a) <= gap + 0.045;
    if (aligned) {
        // push through the block toward the target; slow down near the goal
        const double step_len = std::clamp(0.8 * dist(a, b), 0.012, kActionMax);
        return {s.gripper.x + push_dir.x * step_len, s.gripper.y + push_dir.y * step_len};
    }
    const Vec2 staging{a.x - push_dir.x * (gap + 0.03), a.y - push_dir.y * (gap + 0.03)};
    return route_around(s.gripper, staging, a, gap + 0.008);
}

Vec2 wipe_subgoal(const EnvState& s) {
    const auto& sl = std::get<WipeSlots>(s.slots);
    if (!s.tool_engaged) {
        return sl.tool;
    }
    int best = -1;
    double best_d = 0.0;
    for (int i = 0; i < sl.mark_count; ++i) {
        if (sl.erased[static_cast<std::size_t>(i)]) {
            continue;
        }
        const double d = dist(s.gripper, sl.mark[static_cast<std::size_t>(i)]);
        if (best < 0 || d < best_d) {
            best = i;
            best_d = d;
        }
    }
    if (best < 0) {
        return s.gripper;  // hold
    }
    return sl.mark[static_cast<std::size_t>(best)];
}

Vec2 book_subgoal(const EnvState& s) {
    const auto& sl = std::get<BookSlots>(s.slots);
    const Vec2 handle{sl.hinge.x + sl.flap_len * std::cos(sl.angle),
                      sl.hinge.y + sl.flap_len * std::sin(sl.angle)};
    if (sl.angle >= 2.7) {
        return s.gripper;  // hold
    }
    if (dist(s.gripper, handle) > kGrabRadius * 0.9) {
        return handle;
    }
    const double next = std::min(sl.angle + 0.12, kPi);
    return {sl.hinge.x + sl.flap_len * std::cos(next), sl.hinge.y + sl.flap_len * std::sin(next)};
}

Vec2 scoop_subgoal(const EnvState& s) {
    const auto& sl = std::get<ScoopSlots>(s.slots);
    if (!s.tool_engaged) {
        return sl.tool;
    }
    bool carrying = false;
    for (bool c : sl.carried) {
        carrying = carrying || c;
    }
    if (carrying) {
        return sl.bowl;
    }
    int banked = 0;
    for (bool b : sl.banked) {
        banked += b ? 1 : 0;
    }
    int best = -1;
    double best_d = 0.0;
    for (int i = 0; i < 8; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        if (sl.carried[idx] || sl.banked[idx]) {
            continue;
        }
        const double d = dist(s.gripper, sl.part[idx]);
        if (best < 0 || d < best_d) {
            best = i;
            best_d = d;
        }
    }
    if (best < 0 || banked >= 8) {
        return s.gripper;
    }
    return sl.part[static_cast<std::size_t>(best)];
}

Vec2 draw_subgoal(const EnvState& s) {
    const auto& sl = std::get<DrawSlots>(s.slots);
    if (sl.visit_count >= 12) {
        return s.gripper;
    }
    // mirror the observation's "next expected waypoint"
    const Obs o = observe(s);
    if (o[7 + 6] < 0.5) {
        return s.gripper;
    }
    return {o[7 + 3], o[7 + 4]};
}
}  // namespace

Vec2 expert_subgoal(const EnvState& s) {
    switch (s.task.family) {
        case Family::Stack2d: return stack_subgoal(s);
        case Family::Wipe2d: return wipe_subgoal(s);
        case Family::Book2d: return book_subgoal(s);
        case Family::Scoop2d: return scoop_subgoal(s);
        case Family::Draw2d: return draw_subgoal(s);
    }
    return s.gripper;
}

ActionChunk scripted_expert(const TaskSpec& task, const EnvState& state, Rng& rng, double noise) {
    (void)task;
    // cruise below the clamp so demonstrated actions stay interior
    constexpr double kCruise = 0.04;
    EnvState sim = state;
    std::array<double, kChunkLen * 2> rows{};
    for (int r = 0; r < kChunkLen; ++r) {
        const Vec2 goal = expert_subgoal(sim);
        double dx = goal.x - sim.gripper.x;
        double dy = goal.y - sim.gripper.y;
        const double mag = std::sqrt(dx * dx + dy * dy);
        if (mag > kCruise) {
            dx *= kCruise / mag;
            dy *= kCruise / mag;
        }
        dx = std::clamp(dx + noise * rng.normal(), -kActionMax, kActionMax);
        dy = std::clamp(dy + noise * rng.normal(), -kActionMax, kActionMax);
        rows[static_cast<std::size_t>(r) * 2] = dx;
        rows[static_cast<std::size_t>(r) * 2 + 1] = dy;
        step(sim, dx, dy);
    }
    return ActionChunk::clamped(rows);
}

}  // namespace vlaw::env
