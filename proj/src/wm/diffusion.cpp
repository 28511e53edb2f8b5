#include "vlaw/wm/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vlaw/nn/features.hpp"
#include "vlaw/nn/tape.hpp"

namespace vlaw::wm {

namespace {
std::vector<double> net_input(const Diffusion& d, std::span<const double> x_t, int t,
                              std::span<const double> cond) {
    std::vector<double> in;
    in.reserve(static_cast<std::size_t>(d.dim) + 8 + static_cast<std::size_t>(d.cond_dim));
    in.insert(in.end(), x_t.begin(), x_t.end());
    const auto tf = nn::sinusoidal8(static_cast<double>(t) / d.sched.steps());
    in.insert(in.end(), tf.begin(), tf.end());
    in.insert(in.end(), cond.begin(), cond.end());
    return in;
}
}  // namespace

Diffusion Diffusion::init(int dim, int cond_dim, int hidden, int t_steps, Rng& rng) {
    Diffusion d;
    d.dim = dim;
    d.cond_dim = cond_dim;
    d.sched = NoiseSchedule::cosine(t_steps);
    const int dims[] = {dim + 8 + cond_dim, hidden, hidden, dim};
    d.net = nn::MlpParams::make_default(dims, rng);
    return d;
}

DiffusionDraw diffusion_draw(const Diffusion& d, Rng& rng) {
    DiffusionDraw draw;
    draw.t = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(d.sched.steps())));
    draw.eps.resize(static_cast<std::size_t>(d.dim));
    for (auto& e : draw.eps) {
        e = rng.normal();
    }
    return draw;
}

double diffusion_loss_with_draws(const Diffusion& d, std::span<const DiffusionRow> rows,
                                 std::span<const DiffusionDraw> draws, nn::MlpGrad* grad_out) {
    if (rows.empty() || rows.size() != draws.size()) {
        throw std::invalid_argument("diffusion loss: rows/draws mismatch");
    }
    const double row_scale = 1.0 / (static_cast<double>(rows.size()) * d.dim);
    if (grad_out == nullptr) {
        double total = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto x_t = noising(rows[i].target, draws[i].eps, draws[i].t, d.sched);
            const auto pred = nn::mlp_forward(d.net, net_input(d, x_t, draws[i].t, rows[i].cond));
            double sse = 0.0;
            for (std::size_t k = 0; k < pred.size(); ++k) {
                const double diff = pred[k] - rows[i].target[k];
                sse += diff * diff;
            }
            total += sse;
        }
        const double loss = total * row_scale;
        if (!std::isfinite(loss)) {
            throw std::runtime_error("diffusion loss: non-finite value");
        }
        return loss;
    }
    nn::GradTape tape(d.net);
    nn::GradTape::NodeId total = tape.constant({0.0});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto x_t = noising(rows[i].target, draws[i].eps, draws[i].t, d.sched);
        const auto pred = tape.mlp(tape.constant(net_input(d, x_t, draws[i].t, rows[i].cond)));
        total = tape.add(total, tape.squared_error_sum(pred, rows[i].target));
    }
    const auto loss_node = tape.scale(total, row_scale);
    const double loss = tape.scalar(loss_node);
    if (!std::isfinite(loss)) {
        throw std::runtime_error("diffusion loss: non-finite value");
    }
    tape.backward(loss_node);
    *grad_out = tape.take_grads();
    return loss;
}

double diffusion_loss(const Diffusion& d, std::span<const DiffusionRow> rows, Rng& rng,
                      nn::MlpGrad* grad_out) {
    std::vector<DiffusionDraw> draws;
    draws.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        draws.push_back(diffusion_draw(d, rng));
    }
    return diffusion_loss_with_draws(d, rows, draws, grad_out);
}

std::vector<double> denoise_predict(const Diffusion& d, std::span<const double> x_t, int t,
                                    std::span<const double> cond) {
    return nn::mlp_forward(d.net, net_input(d, x_t, t, cond));
}

std::vector<double> diffusion_sample(const Diffusion& d, std::span<const double> cond, Rng& rng,
                                     SampleMode mode, std::optional<ClampRange> clamp) {
    const auto& ab = d.sched.alpha_bar;
    std::vector<double> x(static_cast<std::size_t>(d.dim));
    for (auto& v : x) {
        v = rng.normal();
    }
    for (int t = d.sched.steps(); t >= 1; --t) {
        const auto x0_hat = denoise_predict(d, x, t, cond);
        const double ab_t = ab[static_cast<std::size_t>(t)];
        const double ab_prev = ab[static_cast<std::size_t>(t - 1)];
        const double noise_t = std::sqrt(std::max(0.0, 1.0 - ab_t));
        std::vector<double> eps_hat(x.size(), 0.0);
        if (noise_t > 1e-12) {
            const double cs = std::sqrt(ab_t);
            for (std::size_t i = 0; i < x.size(); ++i) {
                eps_hat[i] = (x[i] - cs * x0_hat[i]) / noise_t;
            }
        }
        double sigma = 0.0;
        if (mode == SampleMode::Ancestral && t > 1 && ab_t > 1e-12 && 1.0 - ab_t > 1e-12) {
            const double var =
                (1.0 - ab_prev) / (1.0 - ab_t) * (1.0 - ab_t / ab_prev);
            sigma = std::sqrt(std::max(0.0, var));
        }
        const double dir = std::sqrt(std::max(0.0, 1.0 - ab_prev - sigma * sigma));
        const double cs_prev = std::sqrt(ab_prev);
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] = cs_prev * x0_hat[i] + dir * eps_hat[i];
            if (sigma > 0.0) {
                x[i] += sigma * rng.normal();
            }
        }
    }
    if (clamp) {
        for (auto& v : x) {
            v = std::clamp(v, clamp->lo, clamp->hi);
        }
    }
    return x;
}

}  // namespace vlaw::wm
