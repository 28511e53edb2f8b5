#include "vlaw/reward/reward.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "vlaw/nn/checkpoint.hpp"
#include "vlaw/nn/tape.hpp"

namespace vlaw::reward {

RewardNet RewardNet::init(int hidden, Rng& rng) {
    RewardNet r;
    const int dims[] = {kFeatureDim, hidden, hidden, 1};
    r.net = nn::MlpParams::make_default(dims, rng);
    return r;
}

std::vector<double> featurize(const data::Trajectory& traj) {
    if (traj.obs.empty()) {
        throw std::invalid_argument("featurize: empty trajectory");
    }
    if (traj.obs.size() < 2) {
        throw std::invalid_argument("featurize: trajectory needs at least 2 observations");
    }
    const auto horizon = static_cast<double>(traj.obs.size() - 1);
    std::vector<double> features;
    features.reserve(kFeatureDim);
    for (int i = 0; i < kFrames; ++i) {
        const auto idx = static_cast<std::size_t>(std::lround(i * horizon / 15.0));
        const env::Obs& o = traj.obs[idx];
        features.insert(features.end(), o.begin(), o.end());
    }
    for (int i = 0; i < 5; ++i) {
        features.push_back(i == static_cast<int>(traj.task.family) ? 1.0 : 0.0);
    }
    return features;
}

double predict_prob(const RewardNet& net, const data::Trajectory& traj) {
    const auto logit = nn::mlp_forward(net.net, featurize(traj));
    return 1.0 / (1.0 + std::exp(-logit[0]));
}

int classify(const RewardNet& net, const data::Trajectory& traj, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) {
        throw std::invalid_argument("classify: alpha must lie in [0,1]");
    }
    return predict_prob(net, traj) > alpha ? 1 : 0;
}

ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> labels) {
    if (preds.size() != labels.size()) {
        throw std::invalid_argument("confusion: length mismatch");
    }
    ConfusionMatrix m;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (labels[i] == 1) {
            preds[i] == 1 ? ++m.tp : ++m.fn;
        } else {
            preds[i] == 1 ? ++m.fp : ++m.tn;
        }
    }
    return m;
}

std::string confusion_csv_row(const std::string& method, double alpha, const ConfusionMatrix& m) {
    std::ostringstream ss;
    ss << method << "," << alpha << "," << m.tp << "," << m.fn << "," << m.tn << "," << m.fp;
    return ss.str();
}

double rm_bce_loss(const RewardNet& net, std::span<const std::vector<double>> features,
                   std::span<const int> labels, nn::MlpGrad* grad_out) {
    if (features.empty() || features.size() != labels.size()) {
        throw std::invalid_argument("rm_bce_loss: features/labels mismatch");
    }
    const double scale = 1.0 / static_cast<double>(features.size());
    if (grad_out == nullptr) {
        double total = 0.0;
        for (std::size_t i = 0; i < features.size(); ++i) {
            const double z = nn::mlp_forward(net.net, features[i])[0];
            total += std::max(z, 0.0) - z * labels[i] + std::log1p(std::exp(-std::abs(z)));
        }
        return total * scale;
    }
    nn::GradTape tape(net.net);
    nn::GradTape::NodeId total = tape.constant({0.0});
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto logit = tape.mlp(tape.constant(features[i]));
        total = tape.add(total, tape.bce_with_logit(logit, static_cast<double>(labels[i])));
    }
    const auto loss_node = tape.scale(total, scale);
    const double loss = tape.scalar(loss_node);
    tape.backward(loss_node);
    *grad_out = tape.take_grads();
    return loss;
}

RmTrainResult rm_train(RewardNet& net, std::span<const data::Trajectory* const> trajectories,
                       int steps, int batch_size, nn::AdamState& opt, Rng& rng) {
    if (trajectories.empty()) {
        throw std::invalid_argument("rm_train: no trajectories");
    }
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    features.reserve(trajectories.size());
    for (const auto* t : trajectories) {
        if (t->label == data::kUnlabeled) {
            throw std::invalid_argument("rm_train: unlabeled trajectory");
        }
        features.push_back(featurize(*t));
        labels.push_back(t->label);
    }
    RmTrainResult result;
    const int ones = static_cast<int>(std::count(labels.begin(), labels.end(), 1));
    result.single_class_warning = ones == 0 || ones == static_cast<int>(labels.size());

    std::vector<std::vector<double>> batch_features(static_cast<std::size_t>(batch_size));
    std::vector<int> batch_labels(static_cast<std::size_t>(batch_size));
    for (int s = 0; s < steps; ++s) {
        for (int b = 0; b < batch_size; ++b) {
            const std::size_t pick = rng.below(features.size());
            batch_features[static_cast<std::size_t>(b)] = features[pick];
            batch_labels[static_cast<std::size_t>(b)] = labels[pick];
        }
        nn::MlpGrad grad = nn::MlpGrad::zeros_like(net.net);
        result.final_loss = rm_bce_loss(net, batch_features, batch_labels, &grad);
        nn::adam_step(net.net, grad, opt);
    }
    int correct = 0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double z = nn::mlp_forward(net.net, features[i])[0];
        const int pred = z > 0.0 ? 1 : 0;
        correct += pred == labels[i] ? 1 : 0;
    }
    result.train_accuracy = static_cast<double>(correct) / static_cast<double>(features.size());
    return result;
}

void save_reward(const RewardNet& net, const std::string& path) {
    std::vector<nn::NamedTensor> tensors;
    nn::append_mlp_tensors(tensors, "rm", net.net);
    nn::save_tensors(path, tensors);
}

RewardNet load_reward(const std::string& path) {
    RewardNet r;
    r.net = nn::mlp_from_tensors(nn::load_tensors(path), "rm");
    return r;
}

}  // namespace vlaw::reward
