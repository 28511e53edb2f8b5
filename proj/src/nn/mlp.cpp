#include "vlaw/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "vlaw/common/util.hpp"

namespace vlaw::nn {

std::size_t MlpParams::param_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) {
        n += l.w.size() + l.b.size();
    }
    return n;
}

bool MlpParams::all_finite() const {
    for (const auto& l : layers) {
        for (double v : l.w) {
            if (!std::isfinite(v)) return false;
        }
        for (double v : l.b) {
            if (!std::isfinite(v)) return false;
        }
    }
    return true;
}

MlpParams MlpParams::make(std::span<const int> dims, std::span<const Activation> acts) {
    if (dims.size() < 2 || acts.size() != dims.size() - 1) {
        throw std::invalid_argument("mlp: dims/acts size mismatch");
    }
    MlpParams p;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.in = dims[i];
        l.out = dims[i + 1];
        l.w.assign(static_cast<std::size_t>(l.in) * l.out, 0.0);
        l.b.assign(static_cast<std::size_t>(l.out), 0.0);
        l.act = acts[i];
        p.layers.push_back(std::move(l));
    }
    return p;
}

MlpParams MlpParams::make_default(std::span<const int> dims, Rng& rng) {
    std::vector<Activation> acts(dims.size() - 1, Activation::Tanh);
    acts.back() = Activation::Identity;
    MlpParams p = make(dims, acts);
    for (auto& l : p.layers) {
        const double bound = std::sqrt(6.0 / (l.in + l.out));
        for (auto& w : l.w) {
            w = rng.uniform(-bound, bound);
        }
    }
    return p;
}

std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input) {
    if (params.layers.empty()) {
        throw std::invalid_argument("mlp_forward: empty network");
    }
    if (static_cast<int>(input.size()) != params.input_dim()) {
        throw std::invalid_argument("mlp_forward: input dimension mismatch");
    }
    for (double v : input) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("mlp_forward: non-finite input");
        }
    }
    std::vector<double> x(input.begin(), input.end());
    std::vector<double> y;
    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        const Layer& l = params.layers[li];
        if (static_cast<int>(x.size()) != l.in) {
            throw std::invalid_argument("mlp_forward: layer dimension mismatch at layer " + std::to_string(li));
        }
        y.assign(static_cast<std::size_t>(l.out), 0.0);
        for (int o = 0; o < l.out; ++o) {
            const double* wrow = l.w.data() + static_cast<std::size_t>(o) * l.in;
            double acc = l.b[static_cast<std::size_t>(o)];
            for (int i = 0; i < l.in; ++i) {
                acc += wrow[i] * x[static_cast<std::size_t>(i)];
            }
            switch (l.act) {
                case Activation::Tanh: acc = std::tanh(acc); break;
                case Activation::Relu: acc = acc > 0.0 ? acc : 0.0; break;
                case Activation::Identity: break;
            }
            y[static_cast<std::size_t>(o)] = acc;
        }
        x.swap(y);
    }
    return x;
}

MlpGrad MlpGrad::zeros_like(const MlpParams& params) {
    MlpGrad g;
    g.layers.reserve(params.layers.size());
    for (const auto& l : params.layers) {
        LayerGrad lg;
        lg.w.assign(l.w.size(), 0.0);
        lg.b.assign(l.b.size(), 0.0);
        g.layers.push_back(std::move(lg));
    }
    return g;
}

void MlpGrad::add_scaled(const MlpGrad& other, double s) {
    for (std::size_t li = 0; li < layers.size(); ++li) {
        for (std::size_t i = 0; i < layers[li].w.size(); ++i) {
            layers[li].w[i] += s * other.layers[li].w[i];
        }
        for (std::size_t i = 0; i < layers[li].b.size(); ++i) {
            layers[li].b[i] += s * other.layers[li].b[i];
        }
    }
}

void MlpGrad::scale(double f) {
    for (auto& l : layers) {
        for (auto& v : l.w) v *= f;
        for (auto& v : l.b) v *= f;
    }
}

double MlpGrad::max_abs() const {
    double m = 0.0;
    for (const auto& l : layers) {
        for (double v : l.w) m = std::max(m, std::abs(v));
        for (double v : l.b) m = std::max(m, std::abs(v));
    }
    return m;
}

std::uint64_t params_hash(const MlpParams& params) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const auto& l : params.layers) {
        h = fnv1a(l.w.data(), l.w.size() * sizeof(double), h);
        h = fnv1a(l.b.data(), l.b.size() * sizeof(double), h);
    }
    return h;
}

}  // namespace vlaw::nn
