#include "vlaw/env/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vlaw::env {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kContactEps = 1e-6;
constexpr int kHoldFrames = 5;  // stack stability window (free parameter)

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

Vec2 clamp01(Vec2 v) { return {clamp01(v.x), clamp01(v.y)}; }

std::uint64_t reset_seed(const TaskSpec& t) {
    return Rng::derive({0x7265736574ULL, t.seed, static_cast<std::uint64_t>(t.family),
                        static_cast<std::uint64_t>(t.variant)});
}
}  // namespace

double dist(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

Vec2 DrawSlots::waypoint(int idx) const {
    const double a = -kPi / 2.0 + 2.0 * kPi * idx / 12.0;
    return {center.x + radius * std::cos(a), center.y + radius * std::sin(a)};
}

EnvState reset(const TaskSpec& task) {
    if (task.variant < 0 || task.variant >= variant_count(task.family)) {
        throw std::invalid_argument("reset: variant out of range for " +
                                    std::string(family_name(task.family)));
    }
    Rng rng(reset_seed(task));
    EnvState s;
    s.task = task;
    s.gripper = {0.5, 0.1};
    s.tool_engaged = false;
    s.step_count = 0;

    switch (task.family) {
        case Family::Stack2d: {
            StackSlots slots;
            std::array<Vec2, 4> placed{};
            for (int i = 0; i < 4; ++i) {
                while (true) {
                    Vec2 p{rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75)};
                    bool ok = true;
                    for (int j = 0; j < i; ++j) {
                        if (dist(p, placed[static_cast<std::size_t>(j)]) < 0.09) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) {
                        placed[static_cast<std::size_t>(i)] = p;
                        break;
                    }
                }
            }
            const int a = task.variant / 3;
            int b = -1;
            for (int cand = 0, skip = task.variant % 3; cand < 4; ++cand) {
                if (cand == a) continue;
                if (skip-- == 0) {
                    b = cand;
                    break;
                }
            }
            slots.block[0] = placed[static_cast<std::size_t>(a)];
            slots.block[1] = placed[static_cast<std::size_t>(b)];
            int slot = 2;
            for (int i = 0; i < 4; ++i) {
                if (i != a && i != b) {
                    slots.block[static_cast<std::size_t>(slot++)] = placed[static_cast<std::size_t>(i)];
                }
            }
            slots.radius = kBlockRadius;
            s.slots = slots;
            break;
        }
        case Family::Wipe2d: {
            WipeSlots slots;
            slots.mark_count = task.variant + 1;
            for (int i = 0; i < slots.mark_count; ++i) {
                while (true) {
                    Vec2 p{rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
                    bool ok = true;
                    for (int j = 0; j < i; ++j) {
                        if (dist(p, slots.mark[static_cast<std::size_t>(j)]) < 0.12) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) {
                        slots.mark[static_cast<std::size_t>(i)] = p;
                        break;
                    }
                }
            }
            for (int i = 0; i < 3; ++i) {
                slots.erased[static_cast<std::size_t>(i)] = i >= slots.mark_count;
            }
            while (true) {
                Vec2 p{rng.uniform(0.25, 0.7), rng.uniform(0.2, 0.55)};
                bool ok = true;
                for (int j = 0; j < slots.mark_count; ++j) {
                    if (dist(p, slots.mark[static_cast<std::size_t>(j)]) < 0.12) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    slots.tool = p;
                    break;
                }
            }
            s.slots = slots;
            break;
        }
        case Family::Book2d: {
            BookSlots slots;
            slots.flap_len = 0.15 + 0.03 * task.variant;
            slots.hinge = {rng.uniform(0.4, 0.6), rng.uniform(0.3, 0.5)};
            slots.angle = rng.uniform(0.05, 0.25);
            s.slots = slots;
            break;
        }
        case Family::Scoop2d: {
            ScoopSlots slots;
            slots.bowl = {rng.uniform(0.3, 0.7), rng.uniform(0.3, 0.7)};
            Vec2 cluster;
            while (true) {
                cluster = {rng.uniform(0.25, 0.75), rng.uniform(0.25, 0.75)};
                if (dist(cluster, slots.bowl) >= 0.3) {
                    break;
                }
            }
            const double spread = 0.035 + 0.005 * task.variant;
            for (int i = 0; i < 8; ++i) {
                while (true) {
                    const double r = spread * std::sqrt(rng.uniform());
                    const double a = rng.uniform(0.0, 2.0 * kPi);
                    Vec2 p{std::clamp(cluster.x + r * std::cos(a), 0.05, 0.95),
                           std::clamp(cluster.y + r * std::sin(a), 0.05, 0.95)};
                    if (dist(p, slots.bowl) > kBowlRadius + 0.02) {
                        slots.part[static_cast<std::size_t>(i)] = p;
                        break;
                    }
                }
            }
            while (true) {
                Vec2 p{rng.uniform(0.25, 0.7), rng.uniform(0.15, 0.55)};
                if (dist(p, slots.bowl) >= kBowlRadius + 0.06 && dist(p, cluster) >= 0.15) {
                    slots.tool = p;
                    break;
                }
            }
            s.slots = slots;
            break;
        }
        case Family::Draw2d: {
            DrawSlots slots;
            slots.radius = 0.13 + 0.02 * task.variant;
            slots.center = {rng.uniform(0.4, 0.6), rng.uniform(0.4, 0.6)};
            s.slots = slots;
            break;
        }
    }
    return s;
}

namespace {

// Pushes a disk of radius `r` out of the gripper disk by positional
// projection. Returns true when contact occurred.
bool push_disk(Vec2& c, double r, const Vec2& g, double move_dx, double move_dy) {
    const double gap = kGripperRadius + r;
    const double d = dist(g, c);
    if (d >= gap) {
        return false;
    }
    Vec2 n;
    if (d > 1e-12) {
        n = {(c.x - g.x) / d, (c.y - g.y) / d};
    } else {
        const double m = std::sqrt(move_dx * move_dx + move_dy * move_dy);
        n = m > 1e-12 ? Vec2{move_dx / m, move_dy / m} : Vec2{1.0, 0.0};
    }
    c = clamp01(Vec2{g.x + n.x * gap, g.y + n.y * gap});
    return true;
}

int scoop_target(const ScoopSlots& sl, const Vec2& g) {
    int best = -1;
    double best_d = 0.0;
    for (int i = 0; i < 8; ++i) {
        if (sl.carried[static_cast<std::size_t>(i)] || sl.banked[static_cast<std::size_t>(i)]) {
            continue;
        }
        const double d = dist(g, sl.part[static_cast<std::size_t>(i)]);
        if (best < 0 || d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

int draw_direction(const DrawSlots& sl) {
    if (sl.visit_count < 2) {
        return 1;
    }
    const int a = sl.visit_seq[0];
    const int b = sl.visit_seq[1];
    const int fwd = ((b - a) % 12 + 12) % 12;
    return (fwd == 1 || fwd == 2) ? 1 : -1;
}

// Next waypoint expected in cyclic order; -1 when all are visited.
int draw_next(const DrawSlots& sl, const Vec2& g) {
    if (sl.visit_count == 0) {
        int best = 0;
        double best_d = dist(g, sl.waypoint(0));
        for (int k = 1; k < 12; ++k) {
            const double d = dist(g, sl.waypoint(k));
            if (d < best_d) {
                best = k;
                best_d = d;
            }
        }
        return best;
    }
    if (sl.visit_count >= 12) {
        return -1;
    }
    const int dir = draw_direction(sl);
    const int last = sl.visit_seq[static_cast<std::size_t>(sl.visit_count - 1)];
    for (int hop = 1; hop <= 12; ++hop) {
        const int k = ((last + dir * hop) % 12 + 12) % 12;
        if (!sl.visited[static_cast<std::size_t>(k)]) {
            return k;
        }
    }
    return -1;
}

}  // namespace

bool draw_order_ok(const std::array<int, 12>& seq, int count) {
    if (count <= 1) {
        return true;
    }
    for (int dir : {1, -1}) {
        bool ok = true;
        for (int i = 0; i + 1 < count; ++i) {
            const int step = ((seq[static_cast<std::size_t>(i + 1)] - seq[static_cast<std::size_t>(i)]) * dir % 12 + 12) % 12;
            if (step != 1 && step != 2) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

StepEvent step(EnvState& s, double dx, double dy) {
    dx = std::clamp(dx, -kActionMax, kActionMax);
    dy = std::clamp(dy, -kActionMax, kActionMax);
    if (!std::isfinite(dx)) dx = 0.0;
    if (!std::isfinite(dy)) dy = 0.0;

    s.gripper = clamp01(Vec2{s.gripper.x + dx, s.gripper.y + dy});
    const Vec2 g = s.gripper;
    StepEvent ev;

    switch (s.task.family) {
        case Family::Stack2d: {
            auto& sl = std::get<StackSlots>(s.slots);
            for (auto& c : sl.block) {
                ev.contact = push_disk(c, sl.radius, g, dx, dy) || ev.contact;
            }
            break;
        }
        case Family::Wipe2d: {
            auto& sl = std::get<WipeSlots>(s.slots);
            if (!s.tool_engaged && dist(g, sl.tool) <= kGrabRadius) {
                s.tool_engaged = true;
                ev.contact = true;
            }
            if (s.tool_engaged) {
                sl.tool = g;
                for (int i = 0; i < sl.mark_count; ++i) {
                    auto& erased = sl.erased[static_cast<std::size_t>(i)];
                    if (!erased && dist(g, sl.mark[static_cast<std::size_t>(i)]) <= kGripperRadius + kMarkRadius) {
                        erased = true;
                        ev.contact = true;
                    }
                }
            }
            break;
        }
        case Family::Book2d: {
            auto& sl = std::get<BookSlots>(s.slots);
            const Vec2 handle{sl.hinge.x + sl.flap_len * std::cos(sl.angle),
                              sl.hinge.y + sl.flap_len * std::sin(sl.angle)};
            if (dist(g, handle) <= kGrabRadius) {
                ev.contact = true;
                const double desired = std::atan2(g.y - sl.hinge.y, g.x - sl.hinge.x);
                sl.angle = std::clamp(std::max(sl.angle, desired), 0.0, kPi);
            }
            break;
        }
        case Family::Scoop2d: {
            auto& sl = std::get<ScoopSlots>(s.slots);
            if (!s.tool_engaged && dist(g, sl.tool) <= kGrabRadius) {
                s.tool_engaged = true;
                ev.contact = true;
            }
            if (s.tool_engaged) {
                sl.tool = g;
                for (int i = 0; i < 8; ++i) {
                    if (sl.carried[static_cast<std::size_t>(i)]) {
                        sl.part[static_cast<std::size_t>(i)] = g;
                        ev.contact = true;
                    }
                }
                for (int i = 0; i < 8; ++i) {
                    const auto idx = static_cast<std::size_t>(i);
                    if (!sl.carried[idx] && !sl.banked[idx] && dist(g, sl.part[idx]) <= kPickupRadius) {
                        sl.carried[idx] = true;
                        sl.part[idx] = g;
                        ev.contact = true;
                    }
                }
                if (dist(g, sl.bowl) <= kBowlRadius) {
                    for (int i = 0; i < 8; ++i) {
                        const auto idx = static_cast<std::size_t>(i);
                        if (sl.carried[idx]) {
                            sl.carried[idx] = false;
                            sl.banked[idx] = true;
                            ev.contact = true;
                        }
                    }
                }
            }
            break;
        }
        case Family::Draw2d: {
            auto& sl = std::get<DrawSlots>(s.slots);
            const int next_before = draw_next(sl, g);
            for (int k = 0; k < 12; ++k) {
                const auto idx = static_cast<std::size_t>(k);
                if (!sl.visited[idx] && dist(g, sl.waypoint(k)) <= kDrawTol) {
                    sl.visited[idx] = true;
                    sl.visit_seq[static_cast<std::size_t>(sl.visit_count++)] = k;
                    ev.contact = true;
                }
            }
            if (!ev.contact && next_before >= 0 &&
                dist(g, sl.waypoint(next_before)) <= kDrawTol + kContactEps) {
                ev.contact = true;
            }
            break;
        }
    }
    s.step_count += 1;
    return ev;
}

Obs observe(const EnvState& s) {
    Obs o{};
    o[0] = s.gripper.x;
    o[1] = s.gripper.y;
    o[2 + static_cast<int>(s.task.family)] = 1.0;
    double* f = o.data() + 7;

    switch (s.task.family) {
        case Family::Stack2d: {
            const auto& sl = std::get<StackSlots>(s.slots);
            for (int i = 0; i < 4; ++i) {
                f[2 * i] = sl.block[static_cast<std::size_t>(i)].x;
                f[2 * i + 1] = sl.block[static_cast<std::size_t>(i)].y;
            }
            f[8] = sl.radius;
            f[9] = sl.block[0].x - s.gripper.x;
            f[10] = sl.block[0].y - s.gripper.y;
            f[11] = sl.block[1].x - sl.block[0].x;
            f[12] = sl.block[1].y - sl.block[0].y;
            break;
        }
        case Family::Wipe2d: {
            const auto& sl = std::get<WipeSlots>(s.slots);
            for (int i = 0; i < 3; ++i) {
                f[3 * i] = sl.mark[static_cast<std::size_t>(i)].x;
                f[3 * i + 1] = sl.mark[static_cast<std::size_t>(i)].y;
                f[3 * i + 2] = sl.erased[static_cast<std::size_t>(i)] ? 1.0 : 0.0;
            }
            f[9] = sl.tool.x;
            f[10] = sl.tool.y;
            f[11] = s.tool_engaged ? 1.0 : 0.0;
            f[12] = sl.tool.x - s.gripper.x;
            f[13] = sl.tool.y - s.gripper.y;
            int nearest = -1;
            double nearest_d = 0.0;
            for (int i = 0; i < sl.mark_count; ++i) {
                if (sl.erased[static_cast<std::size_t>(i)]) {
                    continue;
                }
                const double d = dist(s.gripper, sl.mark[static_cast<std::size_t>(i)]);
                if (nearest < 0 || d < nearest_d) {
                    nearest = i;
                    nearest_d = d;
                }
            }
            if (nearest >= 0) {
                f[14] = sl.mark[static_cast<std::size_t>(nearest)].x - s.gripper.x;
                f[15] = sl.mark[static_cast<std::size_t>(nearest)].y - s.gripper.y;
            }
            break;
        }
        case Family::Book2d: {
            const auto& sl = std::get<BookSlots>(s.slots);
            f[0] = sl.hinge.x;
            f[1] = sl.hinge.y;
            f[2] = sl.angle / kPi;
            f[3] = sl.hinge.x + sl.flap_len * std::cos(sl.angle);
            f[4] = sl.hinge.y + sl.flap_len * std::sin(sl.angle);
            f[5] = sl.flap_len;
            f[6] = f[3] - s.gripper.x;
            f[7] = f[4] - s.gripper.y;
            break;
        }
        case Family::Scoop2d: {
            const auto& sl = std::get<ScoopSlots>(s.slots);
            f[0] = sl.tool.x;
            f[1] = sl.tool.y;
            f[2] = s.tool_engaged ? 1.0 : 0.0;
            f[3] = sl.bowl.x;
            f[4] = sl.bowl.y;
            const int target = scoop_target(sl, s.gripper);
            if (target >= 0) {
                f[5] = sl.part[static_cast<std::size_t>(target)].x;
                f[6] = sl.part[static_cast<std::size_t>(target)].y;
                f[7] = 1.0;
            }
            int carried = 0;
            int banked = 0;
            for (int i = 0; i < 8; ++i) {
                carried += sl.carried[static_cast<std::size_t>(i)] ? 1 : 0;
                banked += sl.banked[static_cast<std::size_t>(i)] ? 1 : 0;
            }
            f[8] = carried / 8.0;
            f[9] = banked / 8.0;
            f[10] = sl.tool.x - s.gripper.x;
            f[11] = sl.tool.y - s.gripper.y;
            if (target >= 0) {
                f[12] = sl.part[static_cast<std::size_t>(target)].x - s.gripper.x;
                f[13] = sl.part[static_cast<std::size_t>(target)].y - s.gripper.y;
            }
            f[14] = sl.bowl.x - s.gripper.x;
            f[15] = sl.bowl.y - s.gripper.y;
            break;
        }
        case Family::Draw2d: {
            const auto& sl = std::get<DrawSlots>(s.slots);
            f[0] = sl.center.x;
            f[1] = sl.center.y;
            f[2] = sl.radius;
            const int next = draw_next(sl, s.gripper);
            if (next >= 0) {
                const Vec2 w = sl.waypoint(next);
                f[3] = w.x;
                f[4] = w.y;
                f[6] = 1.0;
                f[8] = w.x - s.gripper.x;
                f[9] = w.y - s.gripper.y;
            }
            f[5] = sl.visit_count / 12.0;
            f[7] = draw_order_ok(sl.visit_seq, sl.visit_count) ? 1.0 : 0.0;
            break;
        }
    }
    return o;
}

bool success_from_obs(Family family, const std::vector<Obs>& obs) {
    if (obs.size() < 2) {
        throw std::invalid_argument("success: trajectory has fewer than 2 observations");
    }
    const Obs& last = obs.back();
    const double* f = last.data() + 7;
    switch (family) {
        case Family::Stack2d: {
            if (obs.size() < static_cast<std::size_t>(kHoldFrames)) {
                throw std::invalid_argument("success: stack2d needs the final holding window");
            }
            for (std::size_t i = obs.size() - kHoldFrames; i < obs.size(); ++i) {
                const double* s = obs[i].data() + 7;
                const Vec2 a{s[0], s[1]};
                const Vec2 b{s[2], s[3]};
                if (dist(a, b) > s[8]) {
                    return false;
                }
            }
            return true;
        }
        case Family::Wipe2d:
            return f[2] >= 0.5 && f[5] >= 0.5 && f[8] >= 0.5;
        case Family::Book2d:
            return f[2] * kPi > 2.5;
        case Family::Scoop2d:
            return std::lround(f[9] * 8.0) >= 3;
        case Family::Draw2d:
            return std::lround(f[5] * 12.0) >= 11 && f[7] >= 0.5;
    }
    return false;
}

}  // namespace vlaw::env
