#pragma once

#include <span>
#include <string>
#include <vector>

#include "vlaw/data/trajectory.hpp"
#include "vlaw/nn/adam.hpp"
#include "vlaw/nn/mlp.hpp"

namespace vlaw::reward {

inline constexpr int kFrames = 16;
inline constexpr int kFeatureDim = kFrames * env::kObsDim + 5;  // 389

// Trajectory-success classifier over a 16-frame temporal downsample.
struct RewardNet {
    nn::MlpParams net;  // kFeatureDim -> 1 logit

    static RewardNet init(int hidden, Rng& rng);
};

// Frame indices round(i*T/15) for i = 0..15 with T = #obs - 1; short
// trajectories repeat frames. Throws on fewer than 2 observations.
std::vector<double> featurize(const data::Trajectory& traj);

// logistic(logit); deterministic.
double predict_prob(const RewardNet& net, const data::Trajectory& traj);

// 1 iff predict_prob strictly exceeds alpha.
int classify(const RewardNet& net, const data::Trajectory& traj, double alpha);

struct ConfusionMatrix {
    int tp = 0;
    int fn = 0;
    int tn = 0;
    int fp = 0;

    int total() const { return tp + fn + tn + fp; }
};

// label = 1 means ground-truth success; pred = 1 means predicted success.
ConfusionMatrix confusion(std::span<const int> preds, std::span<const int> labels);

// CSV row "method,alpha,TP,FN,TN,FP".
std::string confusion_csv_row(const std::string& method, double alpha, const ConfusionMatrix& m);

struct RmTrainResult {
    double final_loss = 0.0;
    double train_accuracy = 0.0;
    bool single_class_warning = false;
};

// Binary cross-entropy training on labeled trajectories.
RmTrainResult rm_train(RewardNet& net, std::span<const data::Trajectory* const> trajectories,
                       int steps, int batch_size, nn::AdamState& opt, Rng& rng);

// BCE loss with gradients on a fixed set of (features, label) pairs; exposed
// for gradient checks.
double rm_bce_loss(const RewardNet& net, std::span<const std::vector<double>> features,
                   std::span<const int> labels, nn::MlpGrad* grad_out);

void save_reward(const RewardNet& net, const std::string& path);
RewardNet load_reward(const std::string& path);

}  // namespace vlaw::reward
