#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vlaw/common/rng.hpp"

namespace vlaw::nn {

enum class Activation { Tanh, Relu, Identity };

struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // row-major, out x in
    std::vector<double> b;  // out
    Activation act = Activation::Identity;
};

// Dense multilayer perceptron, 64-bit throughout. Consecutive layer dims
// chain: layer i's out equals layer i+1's in.
struct MlpParams {
    std::vector<Layer> layers;

    int input_dim() const { return layers.empty() ? 0 : layers.front().in; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().out; }
    std::size_t param_count() const;
    bool all_finite() const;

    // dims = {in, h1, ..., out}; acts has dims.size()-1 entries.
    static MlpParams make(std::span<const int> dims, std::span<const Activation> acts);
    // Hidden layers tanh, identity output; scaled-uniform init from rng.
    static MlpParams make_default(std::span<const int> dims, Rng& rng);
};

// Deterministic forward pass. Throws on dimension mismatch or non-finite
// input.
std::vector<double> mlp_forward(const MlpParams& params, std::span<const double> input);

// Gradient container mirroring MlpParams shapes.
struct MlpGrad {
    struct LayerGrad {
        std::vector<double> w;
        std::vector<double> b;
    };
    std::vector<LayerGrad> layers;

    static MlpGrad zeros_like(const MlpParams& params);
    void add_scaled(const MlpGrad& other, double scale);
    void scale(double factor);
    double max_abs() const;
};

std::uint64_t params_hash(const MlpParams& params);

}  // namespace vlaw::nn
