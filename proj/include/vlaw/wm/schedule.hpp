#pragma once

#include <span>
#include <vector>

namespace vlaw::wm {

// Cumulative noise coefficients alpha_bar[0..T'], alpha_bar[0] = 1 at the
// clean end, nonincreasing. The cosine construction keeps every entry
// strictly positive; hand-built schedules may reach 0 (the pure-noise limit).
struct NoiseSchedule {
    std::vector<double> alpha_bar;

    int steps() const { return static_cast<int>(alpha_bar.size()) - 1; }
    void validate() const;

    static NoiseSchedule cosine(int t_steps);
    static NoiseSchedule from_values(std::vector<double> values);
};

// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps. Throws when t is
// outside [0, T'] or shapes mismatch.
std::vector<double> noising(std::span<const double> x0, std::span<const double> eps, int t,
                            const NoiseSchedule& sched);

}  // namespace vlaw::wm
