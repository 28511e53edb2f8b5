#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace vlaw::env {

// Observation layout (dimension kObsDim):
//   [0..1]   gripper x, y
//   [2..6]   family one-hot (stack2d, wipe2d, book2d, scoop2d, draw2d)
//   [7..23]  family slots, zero-padded to 17 entries (see env.hpp)
inline constexpr int kObsDim = 24;
inline constexpr int kChunkLen = 4;       // H: low-level actions per policy call
inline constexpr int kHorizonChunks = 20; // policy calls per episode
inline constexpr int kHorizonSteps = kHorizonChunks * kChunkLen;
inline constexpr double kActionMax = 0.05;

enum class Family : int { Stack2d = 0, Wipe2d = 1, Book2d = 2, Scoop2d = 3, Draw2d = 4 };
inline constexpr int kNumFamilies = 5;

const char* family_name(Family f);
Family family_from_name(const std::string& name);
int variant_count(Family f);

// Task identity: which family, which variant of it (e.g. which block goes on
// which for stack2d), and the episode seed driving the initial placement.
struct TaskSpec {
    Family family = Family::Stack2d;
    int variant = 0;
    std::uint64_t seed = 0;

    bool operator==(const TaskSpec&) const = default;
};

// "family:variant" catalog strings used by the CLI and config files.
std::string task_name(Family f, int variant);
void parse_task_name(const std::string& text, Family& f, int& variant);

using Obs = std::array<double, kObsDim>;

// H x 2 rows of (dx, dy), every component clamped into [-kActionMax, kActionMax]
// at construction.
struct ActionChunk {
    std::array<double, kChunkLen * 2> v{};

    static ActionChunk clamped(const std::array<double, kChunkLen * 2>& raw);
    double dx(int row) const { return v[static_cast<std::size_t>(row) * 2]; }
    double dy(int row) const { return v[static_cast<std::size_t>(row) * 2 + 1]; }
};

}  // namespace vlaw::env
