#include "vlaw/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace vlaw::nn {

AdamState AdamState::init(const MlpParams& params, AdamConfig cfg) {
    AdamState s;
    s.m = MlpGrad::zeros_like(params);
    s.v = MlpGrad::zeros_like(params);
    s.t = 0;
    s.cfg = cfg;
    return s;
}

namespace {
void update_span(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                 std::vector<double>& v, const AdamConfig& c, double bc1, double bc2) {
    for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        p[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}
}  // namespace

double cosine_decay_lr(double hi, double lo, int step, int total) {
    if (total <= 1) {
        return hi;
    }
    const double frac = std::min(1.0, static_cast<double>(step) / (total - 1));
    return lo + 0.5 * (hi - lo) * (1.0 + std::cos(3.14159265358979323846 * frac));
}

void adam_step(MlpParams& params, const MlpGrad& grads, AdamState& state) {
    if (grads.layers.size() != params.layers.size()) {
        throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.cfg.beta2, static_cast<double>(state.t));
    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        if (grads.layers[li].w.size() != params.layers[li].w.size() ||
            grads.layers[li].b.size() != params.layers[li].b.size()) {
            throw std::invalid_argument("adam_step: gradient shape mismatch");
        }
        update_span(params.layers[li].w, grads.layers[li].w, state.m.layers[li].w,
                    state.v.layers[li].w, state.cfg, bc1, bc2);
        update_span(params.layers[li].b, grads.layers[li].b, state.m.layers[li].b,
                    state.v.layers[li].b, state.cfg, bc1, bc2);
    }
}

}  // namespace vlaw::nn
