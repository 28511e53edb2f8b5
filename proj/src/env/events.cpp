#include "vlaw/env/events.hpp"

#include <cmath>
#include <stdexcept>

namespace vlaw::env {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = 1e-6;

int count_of(double normalized, int scale) {
    return static_cast<int>(std::lround(normalized * scale));
}

int wipe_erased(const Obs& o) {
    const double* f = o.data() + 7;
    int n = 0;
    for (int i = 0; i < 3; ++i) {
        n += f[3 * i + 2] >= 0.5 ? 1 : 0;
    }
    return n;
}
}  // namespace

bool contact_between(Family family, const Obs& prev, const Obs& cur) {
    const double* fp = prev.data() + 7;
    const double* fc = cur.data() + 7;
    const Vec2 g{cur[0], cur[1]};
    switch (family) {
        case Family::Stack2d: {
            const double gap = kGripperRadius + fc[8];
            for (int i = 0; i < 4; ++i) {
                if (dist(g, Vec2{fc[2 * i], fc[2 * i + 1]}) <= gap + kEps) {
                    return true;
                }
            }
            return false;
        }
        case Family::Wipe2d: {
            const bool engage = fp[11] < 0.5 && fc[11] >= 0.5;
            return engage || wipe_erased(cur) > wipe_erased(prev);
        }
        case Family::Book2d: {
            const Vec2 handle{fc[3], fc[4]};
            return dist(g, handle) <= kGrabRadius + kEps || fc[2] > fp[2] + kEps;
        }
        case Family::Scoop2d: {
            const bool engage = fp[2] < 0.5 && fc[2] >= 0.5;
            const int carried_prev = count_of(fp[8], 8);
            const int carried_cur = count_of(fc[8], 8);
            const int banked_prev = count_of(fp[9], 8);
            const int banked_cur = count_of(fc[9], 8);
            if (engage || carried_cur != carried_prev || banked_cur > banked_prev) {
                return true;
            }
            if (fc[2] >= 0.5 && carried_cur > 0) {
                return true;
            }
            return fc[2] >= 0.5 && fc[7] >= 0.5 && dist(g, Vec2{fc[5], fc[6]}) <= kPickupRadius + kEps;
        }
        case Family::Draw2d: {
            if (count_of(fc[5], 12) > count_of(fp[5], 12)) {
                return true;
            }
            return fp[6] >= 0.5 && dist(g, Vec2{fp[3], fp[4]}) <= kDrawTol + kEps;
        }
    }
    return false;
}

EventAnnotation annotate_events(Family family, const std::vector<Obs>& obs, int clip_start,
                                int clip_len) {
    if (clip_start < 0 || clip_len < 1 ||
        static_cast<std::size_t>(clip_start) + static_cast<std::size_t>(clip_len) >= obs.size()) {
        throw std::invalid_argument("annotate_events: clip out of trajectory bounds");
    }
    EventAnnotation ann;
    for (int i = clip_start; i < clip_start + clip_len; ++i) {
        if (contact_between(family, obs[static_cast<std::size_t>(i)], obs[static_cast<std::size_t>(i + 1)])) {
            ann.interaction = true;
            break;
        }
    }
    if (!ann.interaction) {
        return ann;
    }
    const Obs& a = obs[static_cast<std::size_t>(clip_start)];
    const Obs& b = obs[static_cast<std::size_t>(clip_start + clip_len)];
    const double* fa = a.data() + 7;
    const double* fb = b.data() + 7;
    switch (family) {
        case Family::Stack2d: {
            const double before = dist(Vec2{fa[0], fa[1]}, Vec2{fa[2], fa[3]});
            const double after = dist(Vec2{fb[0], fb[1]}, Vec2{fb[2], fb[3]});
            ann.outcome_success = before - after >= 0.02;
            break;
        }
        case Family::Wipe2d:
            ann.outcome_success = wipe_erased(b) > wipe_erased(a);
            break;
        case Family::Book2d:
            ann.outcome_success = (fb[2] - fa[2]) * kPi >= 0.2;
            break;
        case Family::Scoop2d: {
            const int d_carried = count_of(fb[8], 8) - count_of(fa[8], 8);
            const int d_banked = count_of(fb[9], 8) - count_of(fa[9], 8);
            ann.outcome_success = d_banked >= 1 || d_carried + d_banked >= 1;
            break;
        }
        case Family::Draw2d:
            ann.outcome_success = count_of(fb[5], 12) - count_of(fa[5], 12) >= 2;
            break;
    }
    return ann;
}

}  // namespace vlaw::env
