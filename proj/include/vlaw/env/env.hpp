#pragma once

#include <array>
#include <variant>
#include <vector>

#include "vlaw/common/rng.hpp"
#include "vlaw/env/task.hpp"

namespace vlaw::env {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

double dist(const Vec2& a, const Vec2& b);

// Geometry constants shared by dynamics, experts and event annotation.
inline constexpr double kGripperRadius = 0.03;
inline constexpr double kBlockRadius = 0.035;
inline constexpr double kGrabRadius = 0.06;   // tool engage / book handle
inline constexpr double kPickupRadius = 0.04; // particle attach
inline constexpr double kMarkRadius = 0.03;
inline constexpr double kBowlRadius = 0.08;
inline constexpr double kDrawTol = 0.03;

// Family slot state. Slot layouts inside the observation vector (offset 7);
// trailing rel_* entries are gripper-relative offsets (target minus gripper),
// appended after the absolute fields:
//   stack2d: A.x A.y B.x B.y C.x C.y D.x D.y block_radius
//            rel_A(2) A_to_B(2)                                      (13 used)
//            A = block to move, B = target block, C/D = distractors,
//            ordered by the task variant.
//   wipe2d:  m0.x m0.y e0 m1.x m1.y e1 m2.x m2.y e2 tool.x tool.y
//            engaged rel_tool(2) rel_mark(2)                         (16 used)
//            absent marks sit at (0,0) with erased = 1; rel_mark
//            points at the nearest unerased mark, (0,0) when none.
//   book2d:  hinge.x hinge.y angle/pi handle.x handle.y flap_len
//            rel_handle(2)                                           (8 used)
//   scoop2d: tool.x tool.y engaged bowl.x bowl.y target.x target.y
//            has_target carried/8 banked/8 rel_tool(2) rel_target(2)
//            rel_bowl(2)                                             (16 used)
//            target = nearest free particle to the gripper.
//   draw2d:  c.x c.y R next.x next.y visited/12 has_next order_ok
//            rel_next(2)                                             (10 used)
//            next = next waypoint expected in cyclic order.
struct StackSlots {
    std::array<Vec2, 4> block{};   // in task order: A, B, distractors
    double radius = kBlockRadius;
};

struct WipeSlots {
    int mark_count = 0;
    std::array<Vec2, 3> mark{};
    std::array<bool, 3> erased{};
    Vec2 tool;
};

struct BookSlots {
    Vec2 hinge;
    double angle = 0.0;  // radians in [0, pi]
    double flap_len = 0.15;
};

struct ScoopSlots {
    std::array<Vec2, 8> part{};
    std::array<bool, 8> carried{};
    std::array<bool, 8> banked{};
    Vec2 bowl;
    Vec2 tool;
};

struct DrawSlots {
    Vec2 center;
    double radius = 0.15;
    std::array<bool, 12> visited{};
    std::array<int, 12> visit_seq{};  // waypoint ids in first-visit order
    int visit_count = 0;

    Vec2 waypoint(int idx) const;
};

struct EnvState {
    TaskSpec task;
    Vec2 gripper;
    bool tool_engaged = false;
    int step_count = 0;
    std::variant<StackSlots, WipeSlots, BookSlots, ScoopSlots, DrawSlots> slots;
};

// Per-step event fragment: whether the gripper contacted a task object during
// the step. Aggregated over clips by annotate_events.
struct StepEvent {
    bool contact = false;
};

// Deterministic initial state drawn from the family's placement distribution
// using task.seed. Gripper starts at the home pose.
EnvState reset(const TaskSpec& task);

// Advances one low-level step. Action components are clamped, never rejected.
StepEvent step(EnvState& state, double dx, double dy);

// Observation as a pure function of (state, task).
Obs observe(const EnvState& state);

// Success predicate over a complete observation sequence (length
// kHorizonSteps+1 for a full episode; shorter sequences are judged as-is on
// their final frames). Pure; throws on sequences shorter than 2 frames.
bool success_from_obs(Family family, const std::vector<Obs>& obs);

// Cyclic-order check for draw2d first-visit sequences: consecutive visits may
// advance by 1 or 2 waypoints in a fixed direction (either way around).
bool draw_order_ok(const std::array<int, 12>& seq, int count);

}  // namespace vlaw::env
