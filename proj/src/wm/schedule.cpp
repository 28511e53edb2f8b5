#include "vlaw/wm/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vlaw::wm {

void NoiseSchedule::validate() const {
    if (alpha_bar.size() < 2) {
        throw std::invalid_argument("schedule: needs at least one diffusion step");
    }
    if (alpha_bar.front() != 1.0) {
        throw std::invalid_argument("schedule: alpha_bar[0] must be 1");
    }
    for (std::size_t i = 0; i < alpha_bar.size(); ++i) {
        if (!(alpha_bar[i] >= 0.0 && alpha_bar[i] <= 1.0)) {
            throw std::invalid_argument("schedule: alpha_bar out of [0,1]");
        }
        if (i > 0 && alpha_bar[i] > alpha_bar[i - 1]) {
            throw std::invalid_argument("schedule: alpha_bar must be nonincreasing");
        }
    }
}

NoiseSchedule NoiseSchedule::cosine(int t_steps) {
    if (t_steps < 1) {
        throw std::invalid_argument("schedule: t_steps must be positive");
    }
    const double s = 0.008;
    const double pi_half = 1.5707963267948966;
    auto f = [&](double t) {
        const double c = std::cos((t / t_steps + s) / (1.0 + s) * pi_half);
        return c * c;
    };
    NoiseSchedule sched;
    sched.alpha_bar.resize(static_cast<std::size_t>(t_steps) + 1);
    sched.alpha_bar[0] = 1.0;
    for (int t = 1; t <= t_steps; ++t) {
        // clip per-step ratios so alpha_bar stays strictly positive
        const double ratio = std::max(f(static_cast<double>(t)) / f(t - 1.0), 1e-3);
        sched.alpha_bar[static_cast<std::size_t>(t)] =
            std::min(sched.alpha_bar[static_cast<std::size_t>(t - 1)] * ratio, 1.0);
    }
    sched.validate();
    return sched;
}

NoiseSchedule NoiseSchedule::from_values(std::vector<double> values) {
    NoiseSchedule sched;
    sched.alpha_bar = std::move(values);
    sched.validate();
    return sched;
}

std::vector<double> noising(std::span<const double> x0, std::span<const double> eps, int t,
                            const NoiseSchedule& sched) {
    if (t < 0 || t > sched.steps()) {
        throw std::invalid_argument("noising: diffusion step out of range");
    }
    if (x0.size() != eps.size()) {
        throw std::invalid_argument("noising: shape mismatch");
    }
    const double ab = sched.alpha_bar[static_cast<std::size_t>(t)];
    const double cs = std::sqrt(ab);
    const double cn = std::sqrt(1.0 - ab);
    std::vector<double> out(x0.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = cs * x0[i] + cn * eps[i];
    }
    return out;
}

}  // namespace vlaw::wm
