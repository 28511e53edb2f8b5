#pragma once

#include <span>
#include <vector>

#include "vlaw/common/rng.hpp"
#include "vlaw/nn/adam.hpp"
#include "vlaw/nn/mlp.hpp"

namespace vlaw::policy {

// Rectified-flow velocity field over a flat action vector.
// Net input layout: [a_s (dim), flow-time embedding (8), cond (cond_dim)].
// Interpolant a_s = (1-s) eps + s a; regression target v* = a - eps.
struct FlowField {
    nn::MlpParams net;
    int dim = 0;
    int cond_dim = 0;

    static FlowField init(int dim, int cond_dim, int hidden, Rng& rng);
};

struct FlowRow {
    std::vector<double> action;
    std::vector<double> cond;
    double weight = 1.0;
};

struct FlowDraw {
    std::vector<double> eps;
    double s = 0.0;
};

FlowDraw flow_draw(int dim, Rng& rng);

// Sum over rows of weight * ||v(a_s, s, cond) - v*||^2 under the given draws;
// the caller picks the normalization. Squared norm sums over dimensions.
double flow_loss_sum_with_draws(const FlowField& f, std::span<const FlowRow> rows,
                                std::span<const FlowDraw> draws, nn::MlpGrad* grad_out);

// Unweighted mean over rows (weights ignored), drawing (eps, s) from rng.
double flow_loss(const FlowField& f, std::span<const FlowRow> rows, Rng& rng,
                 nn::MlpGrad* grad_out);

std::vector<double> flow_velocity(const FlowField& f, std::span<const double> a_s, double s,
                                  std::span<const double> cond);

// Euler integration of the velocity field from a0 = eps ~ N(0,I) over `steps`
// uniform flow-time increments. Unclamped.
std::vector<double> flow_sample(const FlowField& f, std::span<const double> cond, Rng& rng,
                                int steps);

}  // namespace vlaw::policy
