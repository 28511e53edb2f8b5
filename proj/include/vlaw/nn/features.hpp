#pragma once

#include <array>
#include <cmath>

namespace vlaw::nn {

// 8-dim sinusoidal embedding of a scalar in [0,1]; frequencies pi * 2^k.
inline std::array<double, 8> sinusoidal8(double u) {
    std::array<double, 8> f{};
    double w = 3.14159265358979323846;
    for (int k = 0; k < 4; ++k) {
        f[static_cast<std::size_t>(2 * k)] = std::sin(w * u);
        f[static_cast<std::size_t>(2 * k + 1)] = std::cos(w * u);
        w *= 2.0;
    }
    return f;
}

}  // namespace vlaw::nn
