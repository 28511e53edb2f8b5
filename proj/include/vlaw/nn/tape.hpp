#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vlaw/nn/mlp.hpp"

namespace vlaw::nn {

// Reverse-mode tape over vector-valued primitives. One tape serves one loss
// evaluation against one parameter set: record the forward pass, call
// backward() on the scalar loss node, read grads(). clear() resets the tape
// for the next evaluation while keeping the parameter binding.
//
// Primitives are recorded with a partial-derivative closure each; backward()
// replays the closures in reverse topological (= recording) order.
class GradTape {
public:
    using NodeId = int;

    explicit GradTape(const MlpParams& params);

    // Leaf with no gradient (inputs, targets).
    NodeId constant(std::vector<double> value);

    // Records affine+activation per layer of the bound parameters.
    // Throws if any intermediate is non-finite, naming the layer.
    NodeId mlp(NodeId input);

    // Scalar nodes.
    NodeId squared_error_sum(NodeId y, std::vector<double> target);  // sum_i (y_i - t_i)^2
    NodeId add(NodeId a, NodeId b);
    NodeId scale(NodeId a, double k);
    // Numerically stable binary cross-entropy on a 1-dim logit node.
    NodeId bce_with_logit(NodeId logit, double label);

    double scalar(NodeId id) const;
    std::span<const double> value(NodeId id) const;

    // Seeds d(loss)/d(loss)=1 and accumulates into the parameter gradient.
    // Gradients from successive backward() calls on the same tape add up.
    void backward(NodeId loss);

    const MlpGrad& grads() const { return grads_; }
    MlpGrad take_grads();

    void clear();

    std::size_t node_count() const { return nodes_.size(); }

private:
    struct Node {
        std::vector<double> value;
        std::vector<double> grad;
        std::function<void()> back;  // may be empty for leaves
    };

    NodeId push(std::vector<double> value, std::function<void()> back);

    const MlpParams& params_;
    MlpGrad grads_;
    std::vector<Node> nodes_;
};

// Evaluates build(tape) and returns (loss value, gradient). build must return
// a scalar node composed of recorded primitives.
std::pair<double, MlpGrad> grad(const MlpParams& params,
                                const std::function<GradTape::NodeId(GradTape&)>& build);

}  // namespace vlaw::nn
