#include "vlaw/env/task.hpp"

#include <algorithm>
#include <stdexcept>

namespace vlaw::env {

const char* family_name(Family f) {
    switch (f) {
        case Family::Stack2d: return "stack2d";
        case Family::Wipe2d: return "wipe2d";
        case Family::Book2d: return "book2d";
        case Family::Scoop2d: return "scoop2d";
        case Family::Draw2d: return "draw2d";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    for (int i = 0; i < kNumFamilies; ++i) {
        const auto f = static_cast<Family>(i);
        if (name == family_name(f)) {
            return f;
        }
    }
    throw std::invalid_argument("unknown task family: " + name);
}

int variant_count(Family f) {
    switch (f) {
        case Family::Stack2d: return 12;  // ordered (A,B) pairs over 4 blocks
        case Family::Wipe2d: return 3;    // 1..3 marks
        case Family::Book2d: return 4;    // four flap lengths
        case Family::Scoop2d: return 3;   // cluster tightness
        case Family::Draw2d: return 3;    // circle radius
    }
    return 0;
}

std::string task_name(Family f, int variant) {
    return std::string(family_name(f)) + ":" + std::to_string(variant);
}

void parse_task_name(const std::string& text, Family& f, int& variant) {
    const auto pos = text.find(':');
    if (pos == std::string::npos) {
        f = family_from_name(text);
        variant = 0;
        return;
    }
    f = family_from_name(text.substr(0, pos));
    variant = std::stoi(text.substr(pos + 1));
    if (variant < 0 || variant >= variant_count(f)) {
        throw std::invalid_argument("variant out of range in task name: " + text);
    }
}

ActionChunk ActionChunk::clamped(const std::array<double, kChunkLen * 2>& raw) {
    ActionChunk c;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        c.v[i] = std::clamp(raw[i], -kActionMax, kActionMax);
    }
    return c;
}

}  // namespace vlaw::env
