#pragma once

#include "vpos/data_model.hpp"

#include <cstdint>
#include <vector>

namespace vpos::svm {

/// One-vs-rest linear SVM: class k scores w_k . x + b_k.
struct LinearSVMModel {
    Eigen::MatrixXd weights; // K x I
    Eigen::VectorXd bias;    // K
    double c = 1e-3;

    int num_classes() const { return static_cast<int>(weights.rows()); }
    int dim() const { return static_cast<int>(weights.cols()); }
};

struct SvmOptions {
    double c = 1e-3;
    int epochs = 20;
    std::uint64_t seed = kDefaultSeed;
};

/// K binary hinge-loss machines trained by stochastic subgradient descent on
/// (c/2)(|w|^2 + b^2) + mean hinge, step 1/(c t). The returned weights are the
/// average of the iterates over the final epoch. `points` must be scaled;
/// labels lie in [1, num_classes]. Throws DegenerateData when N < K.
LinearSVMModel train_svm_ovr(const std::vector<LabeledPoint>& points, int num_classes,
                             const SvmOptions& opts = {});

Eigen::VectorXd decision_values(const LinearSVMModel& model, const FeatureVector& x);

/// 1-based argmax of the decision values, ties to the lower class.
int predict_svm(const LinearSVMModel& model, const FeatureVector& x);

} // namespace vpos::svm
