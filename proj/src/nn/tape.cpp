#include "vlaw/nn/tape.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

namespace vlaw::nn {

GradTape::GradTape(const MlpParams& params)
    : params_(params), grads_(MlpGrad::zeros_like(params)) {}

GradTape::NodeId GradTape::push(std::vector<double> value, std::function<void()> back) {
    nodes_.push_back(Node{std::move(value), {}, std::move(back)});
    Node& n = nodes_.back();
    n.grad.assign(n.value.size(), 0.0);
    return static_cast<NodeId>(nodes_.size()) - 1;
}

GradTape::NodeId GradTape::constant(std::vector<double> value) {
    return push(std::move(value), {});
}

GradTape::NodeId GradTape::mlp(NodeId input) {
    if (static_cast<int>(nodes_[static_cast<std::size_t>(input)].value.size()) != params_.input_dim()) {
        throw std::invalid_argument("tape: mlp input dimension mismatch");
    }
    NodeId x = input;
    for (std::size_t li = 0; li < params_.layers.size(); ++li) {
        const Layer& l = params_.layers[li];
        const auto& xv = nodes_[static_cast<std::size_t>(x)].value;

        std::vector<double> pre(static_cast<std::size_t>(l.out));
        for (int o = 0; o < l.out; ++o) {
            const double* wrow = l.w.data() + static_cast<std::size_t>(o) * l.in;
            double acc = l.b[static_cast<std::size_t>(o)];
            for (int i = 0; i < l.in; ++i) {
                acc += wrow[i] * xv[static_cast<std::size_t>(i)];
            }
            pre[static_cast<std::size_t>(o)] = acc;
        }
        for (double v : pre) {
            if (!std::isfinite(v)) {
                throw std::runtime_error("tape: non-finite value at layer " + std::to_string(li));
            }
        }
        const NodeId xi = x;
        const NodeId affine = push(std::move(pre), {});
        nodes_[static_cast<std::size_t>(affine)].back = [this, xi, affine, li] {
            const Layer& layer = params_.layers[li];
            const auto& g = nodes_[static_cast<std::size_t>(affine)].grad;
            const auto& xval = nodes_[static_cast<std::size_t>(xi)].value;
            auto& gx = nodes_[static_cast<std::size_t>(xi)].grad;
            auto& gw = grads_.layers[li].w;
            auto& gb = grads_.layers[li].b;
            for (int o = 0; o < layer.out; ++o) {
                const double go = g[static_cast<std::size_t>(o)];
                if (go == 0.0) continue;
                gb[static_cast<std::size_t>(o)] += go;
                const double* wrow = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
                double* gwrow = gw.data() + static_cast<std::size_t>(o) * layer.in;
                for (int i = 0; i < layer.in; ++i) {
                    gwrow[i] += go * xval[static_cast<std::size_t>(i)];
                    gx[static_cast<std::size_t>(i)] += go * wrow[i];
                }
            }
        };

        if (l.act == Activation::Identity) {
            x = affine;
            continue;
        }
        std::vector<double> post(nodes_[static_cast<std::size_t>(affine)].value);
        if (l.act == Activation::Tanh) {
            for (auto& v : post) v = std::tanh(v);
        } else {
            for (auto& v : post) v = v > 0.0 ? v : 0.0;
        }
        const NodeId act = push(std::move(post), {});
        const Activation a = l.act;
        nodes_[static_cast<std::size_t>(act)].back = [this, affine, act, a] {
            const auto& g = nodes_[static_cast<std::size_t>(act)].grad;
            const auto& y = nodes_[static_cast<std::size_t>(act)].value;
            auto& gpre = nodes_[static_cast<std::size_t>(affine)].grad;
            for (std::size_t i = 0; i < g.size(); ++i) {
                if (a == Activation::Tanh) {
                    gpre[i] += g[i] * (1.0 - y[i] * y[i]);
                } else {
                    gpre[i] += y[i] > 0.0 ? g[i] : 0.0;
                }
            }
        };
        x = act;
    }
    return x;
}

GradTape::NodeId GradTape::squared_error_sum(NodeId y, std::vector<double> target) {
    const auto& yv = nodes_[static_cast<std::size_t>(y)].value;
    if (yv.size() != target.size()) {
        throw std::invalid_argument("tape: squared_error_sum size mismatch");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < yv.size(); ++i) {
        const double d = yv[i] - target[i];
        s += d * d;
    }
    const NodeId out = push({s}, {});
    auto t = std::make_shared<std::vector<double>>(std::move(target));
    nodes_[static_cast<std::size_t>(out)].back = [this, y, out, t] {
        const double g = nodes_[static_cast<std::size_t>(out)].grad[0];
        const auto& yval = nodes_[static_cast<std::size_t>(y)].value;
        auto& gy = nodes_[static_cast<std::size_t>(y)].grad;
        for (std::size_t i = 0; i < yval.size(); ++i) {
            gy[i] += g * 2.0 * (yval[i] - (*t)[i]);
        }
    };
    return out;
}

GradTape::NodeId GradTape::add(NodeId a, NodeId b) {
    const double s = scalar(a) + scalar(b);
    const NodeId out = push({s}, {});
    nodes_[static_cast<std::size_t>(out)].back = [this, a, b, out] {
        const double g = nodes_[static_cast<std::size_t>(out)].grad[0];
        nodes_[static_cast<std::size_t>(a)].grad[0] += g;
        nodes_[static_cast<std::size_t>(b)].grad[0] += g;
    };
    return out;
}

GradTape::NodeId GradTape::scale(NodeId a, double k) {
    const NodeId out = push({scalar(a) * k}, {});
    nodes_[static_cast<std::size_t>(out)].back = [this, a, k, out] {
        nodes_[static_cast<std::size_t>(a)].grad[0] += k * nodes_[static_cast<std::size_t>(out)].grad[0];
    };
    return out;
}

GradTape::NodeId GradTape::bce_with_logit(NodeId logit, double label) {
    const auto& lv = nodes_[static_cast<std::size_t>(logit)].value;
    if (lv.size() != 1) {
        throw std::invalid_argument("tape: bce_with_logit expects a 1-dim node");
    }
    const double z = lv[0];
    // log(1+exp(z)) computed stably: max(z,0) + log1p(exp(-|z|)).
    const double loss = std::max(z, 0.0) - z * label + std::log1p(std::exp(-std::abs(z)));
    const NodeId out = push({loss}, {});
    nodes_[static_cast<std::size_t>(out)].back = [this, logit, label, out] {
        const double g = nodes_[static_cast<std::size_t>(out)].grad[0];
        const double zz = nodes_[static_cast<std::size_t>(logit)].value[0];
        const double p = 1.0 / (1.0 + std::exp(-zz));
        nodes_[static_cast<std::size_t>(logit)].grad[0] += g * (p - label);
    };
    return out;
}

double GradTape::scalar(NodeId id) const {
    const auto& v = nodes_[static_cast<std::size_t>(id)].value;
    if (v.size() != 1) {
        throw std::invalid_argument("tape: node is not scalar");
    }
    return v[0];
}

std::span<const double> GradTape::value(NodeId id) const {
    const auto& v = nodes_[static_cast<std::size_t>(id)].value;
    return {v.data(), v.size()};
}

void GradTape::backward(NodeId loss) {
    auto& l = nodes_[static_cast<std::size_t>(loss)];
    if (l.value.size() != 1) {
        throw std::invalid_argument("tape: backward needs a scalar loss node");
    }
    l.grad[0] += 1.0;
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
        if (it->back) {
            it->back();
        }
    }
}

MlpGrad GradTape::take_grads() {
    MlpGrad out = std::move(grads_);
    grads_ = MlpGrad::zeros_like(params_);
    return out;
}

void GradTape::clear() {
    nodes_.clear();
    grads_ = MlpGrad::zeros_like(params_);
}

std::pair<double, MlpGrad> grad(const MlpParams& params,
                                const std::function<GradTape::NodeId(GradTape&)>& build) {
    GradTape tape(params);
    const GradTape::NodeId loss = build(tape);
    const double value = tape.scalar(loss);
    tape.backward(loss);
    return {value, tape.take_grads()};
}

}  // namespace vlaw::nn
