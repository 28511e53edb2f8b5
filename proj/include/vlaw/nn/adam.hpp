#pragma once

#include "vlaw/nn/mlp.hpp"

namespace vlaw::nn {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    MlpGrad m;
    MlpGrad v;
    long t = 0;
    AdamConfig cfg;

    static AdamState init(const MlpParams& params, AdamConfig cfg = {});
};

// Bias-corrected adaptive-moment update, in place. Increments state.t by one.
void adam_step(MlpParams& params, const MlpGrad& grads, AdamState& state);

// Half-cosine ramp from `hi` at step 0 down to `lo` at `total`.
double cosine_decay_lr(double hi, double lo, int step, int total);

}  // namespace vlaw::nn
