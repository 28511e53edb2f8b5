#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vlaw/common/rng.hpp"
#include "vlaw/nn/adam.hpp"
#include "vlaw/nn/mlp.hpp"
#include "vlaw/wm/schedule.hpp"

namespace vlaw::wm {

// Conditional denoiser with x0-prediction over a flat target vector.
// Net input layout: [x_t (dim), time embedding (8), cond (cond_dim)].
struct Diffusion {
    nn::MlpParams net;
    NoiseSchedule sched;
    int dim = 0;
    int cond_dim = 0;

    static Diffusion init(int dim, int cond_dim, int hidden, int t_steps, Rng& rng);
};

struct DiffusionRow {
    std::vector<double> target;  // clean x0
    std::vector<double> cond;
};

// Per-row Monte-Carlo draw (diffusion step + noise), separable from the loss
// so tests can replay the randomness and finite-difference the deterministic
// remainder.
struct DiffusionDraw {
    int t = 1;
    std::vector<double> eps;
};

DiffusionDraw diffusion_draw(const Diffusion& d, Rng& rng);

// Mean over rows of mean squared x0 error under the given draws.
double diffusion_loss_with_draws(const Diffusion& d, std::span<const DiffusionRow> rows,
                                 std::span<const DiffusionDraw> draws, nn::MlpGrad* grad_out);

// Draws (t', eps) per row from rng, then evaluates. Throws on non-finite loss.
double diffusion_loss(const Diffusion& d, std::span<const DiffusionRow> rows, Rng& rng,
                      nn::MlpGrad* grad_out);

std::vector<double> denoise_predict(const Diffusion& d, std::span<const double> x_t, int t,
                                    std::span<const double> cond);

enum class SampleMode { Deterministic, Ancestral };

struct ClampRange {
    double lo;
    double hi;
};

// Reverse pass from pure noise. Deterministic mode runs the eta=0 recursion
// (rng only seeds the initial noise); ancestral mode injects per-step noise.
std::vector<double> diffusion_sample(const Diffusion& d, std::span<const double> cond, Rng& rng,
                                     SampleMode mode = SampleMode::Deterministic,
                                     std::optional<ClampRange> clamp = std::nullopt);

}  // namespace vlaw::wm
