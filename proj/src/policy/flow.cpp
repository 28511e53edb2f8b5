#include "vlaw/policy/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "vlaw/nn/features.hpp"
#include "vlaw/nn/tape.hpp"

namespace vlaw::policy {

namespace {
std::vector<double> net_input(const FlowField& f, std::span<const double> a_s, double s,
                              std::span<const double> cond) {
    std::vector<double> in;
    in.reserve(static_cast<std::size_t>(f.dim) + 8 + static_cast<std::size_t>(f.cond_dim));
    in.insert(in.end(), a_s.begin(), a_s.end());
    const auto sf = nn::sinusoidal8(s);
    in.insert(in.end(), sf.begin(), sf.end());
    in.insert(in.end(), cond.begin(), cond.end());
    return in;
}
}  // namespace

FlowField FlowField::init(int dim, int cond_dim, int hidden, Rng& rng) {
    FlowField f;
    f.dim = dim;
    f.cond_dim = cond_dim;
    const int dims[] = {dim + 8 + cond_dim, hidden, hidden, dim};
    f.net = nn::MlpParams::make_default(dims, rng);
    return f;
}

FlowDraw flow_draw(int dim, Rng& rng) {
    FlowDraw d;
    d.eps.resize(static_cast<std::size_t>(dim));
    for (auto& e : d.eps) {
        e = rng.normal();
    }
    d.s = rng.uniform();
    return d;
}

double flow_loss_sum_with_draws(const FlowField& f, std::span<const FlowRow> rows,
                                std::span<const FlowDraw> draws, nn::MlpGrad* grad_out) {
    if (rows.size() != draws.size()) {
        throw std::invalid_argument("flow loss: rows/draws mismatch");
    }
    auto interpolate = [&](const FlowRow& row, const FlowDraw& draw) {
        std::vector<double> a_s(row.action.size());
        std::vector<double> v_star(row.action.size());
        for (std::size_t k = 0; k < a_s.size(); ++k) {
            a_s[k] = (1.0 - draw.s) * draw.eps[k] + draw.s * row.action[k];
            v_star[k] = row.action[k] - draw.eps[k];
        }
        return std::make_pair(a_s, v_star);
    };
    if (grad_out == nullptr) {
        double total = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].weight == 0.0) {
                continue;
            }
            auto [a_s, v_star] = interpolate(rows[i], draws[i]);
            const auto v = nn::mlp_forward(f.net, net_input(f, a_s, draws[i].s, rows[i].cond));
            double sse = 0.0;
            for (std::size_t k = 0; k < v.size(); ++k) {
                const double diff = v[k] - v_star[k];
                sse += diff * diff;
            }
            total += rows[i].weight * sse;
        }
        if (!std::isfinite(total)) {
            throw std::runtime_error("flow loss: non-finite value");
        }
        return total;
    }
    nn::GradTape tape(f.net);
    nn::GradTape::NodeId total = tape.constant({0.0});
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].weight == 0.0) {
            continue;
        }
        auto [a_s, v_star] = interpolate(rows[i], draws[i]);
        const auto v = tape.mlp(tape.constant(net_input(f, a_s, draws[i].s, rows[i].cond)));
        total = tape.add(total, tape.scale(tape.squared_error_sum(v, v_star), rows[i].weight));
    }
    const double loss = tape.scalar(total);
    if (!std::isfinite(loss)) {
        throw std::runtime_error("flow loss: non-finite value");
    }
    tape.backward(total);
    *grad_out = tape.take_grads();
    return loss;
}

double flow_loss(const FlowField& f, std::span<const FlowRow> rows, Rng& rng,
                 nn::MlpGrad* grad_out) {
    if (rows.empty()) {
        throw std::invalid_argument("flow loss: empty batch");
    }
    std::vector<FlowRow> unweighted(rows.begin(), rows.end());
    for (auto& r : unweighted) {
        r.weight = 1.0;
    }
    std::vector<FlowDraw> draws;
    draws.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        draws.push_back(flow_draw(f.dim, rng));
    }
    const double sum = flow_loss_sum_with_draws(f, unweighted, draws, grad_out);
    if (grad_out != nullptr) {
        grad_out->scale(1.0 / static_cast<double>(rows.size()));
    }
    return sum / static_cast<double>(rows.size());
}

std::vector<double> flow_velocity(const FlowField& f, std::span<const double> a_s, double s,
                                  std::span<const double> cond) {
    return nn::mlp_forward(f.net, net_input(f, a_s, s, cond));
}

std::vector<double> flow_sample(const FlowField& f, std::span<const double> cond, Rng& rng,
                                int steps) {
    if (steps < 1) {
        throw std::invalid_argument("flow_sample: steps must be positive");
    }
    std::vector<double> a(static_cast<std::size_t>(f.dim));
    for (auto& v : a) {
        v = rng.normal();
    }
    const double h = 1.0 / steps;
    for (int i = 0; i < steps; ++i) {
        const auto v = flow_velocity(f, a, i * h, cond);
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] += h * v[k];
        }
    }
    return a;
}

}  // namespace vlaw::policy
