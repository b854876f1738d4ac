#pragma once

#include "vpos/data_model.hpp"
#include "vpos/preprocess.hpp"
#include "vpos/quantizer.hpp"

#include <vector>

namespace vpos::mlr {

/// K x I coefficient matrix; row k holds the class-k weight vector.
using ParameterMatrix = Eigen::MatrixXd;

/// Sorted 0-based feature indices a model is allowed to use.
using FeatureSubset = std::vector<int>;

FeatureSubset full_subset(int dim);

struct MLRModel {
    ParameterMatrix weights; // columns outside `subset` are exactly zero
    Eigen::VectorXd bias;    // all zero unless trained with an intercept
    FeatureSubset subset;
    QuantizationScheme scheme;
    Scaler scaler;
    double lambda = 1e-3;
    bool intercept = false;

    int num_classes() const { return static_cast<int>(weights.rows()); }
    int dim() const { return static_cast<int>(weights.cols()); }
};

/// score_k = w_k . x over the subset coordinates, plus bias_k. `x` must be
/// scaled already.
Eigen::VectorXd linear_scores(const MLRModel& model, const FeatureVector& x);

/// Softmax with the max score subtracted before exponentiation.
Eigen::VectorXd softmax_probabilities(const Eigen::VectorXd& scores);

/// log(sum(exp(scores))) evaluated with the same shift.
double log_sum_exp(const Eigen::VectorXd& scores);

/// 1-based index of the first maximal entry.
int argmax_class(const Eigen::VectorXd& values);

/// Class of a scaled feature vector.
int predict_class(const MLRModel& model, const FeatureVector& x);

/// Class center for a raw (unscaled) feature vector.
double predict_altitude(const MLRModel& model, const FeatureVector& raw_x);

/// Summed multinomial negative log-likelihood and its gradient on a fixed
/// design matrix. Labels are 0-based here.
class SoftmaxLoss {
public:
    SoftmaxLoss(FeatureMatrix x, std::vector<int> labels, int num_classes);

    double value(const Eigen::MatrixXd& w, const Eigen::VectorXd& b) const;
    double value_and_gradient(const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
                              Eigen::MatrixXd& grad_w, Eigen::VectorXd& grad_b) const;

    Eigen::Index size() const { return x_.rows(); }
    int num_classes() const { return num_classes_; }

private:
    double evaluate(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, Eigen::MatrixXd* grad_w,
                    Eigen::VectorXd* grad_b) const;

    FeatureMatrix x_;
    std::vector<int> labels_;
    int num_classes_;
};

/// f(W) = sum_n ( -w_{y_n} . x_n + log sum_k exp(w_k . x_n) ) with 1-based
/// labels in [1, K]. Throws LabelOutOfRange.
double nll_objective(const ParameterMatrix& params, const std::vector<LabeledPoint>& data);

/// Gradient of nll_objective: row k = sum_n (P(k|x_n) - [y_n = k]) x_n.
ParameterMatrix nll_gradient(const ParameterMatrix& params, const std::vector<LabeledPoint>& data);

/// Same, zeroing the columns outside `subset`.
ParameterMatrix nll_gradient(const ParameterMatrix& params, const std::vector<LabeledPoint>& data,
                             const FeatureSubset& subset);

/// Sum over selected features i of sum_k |W(k, i)|.
double group_l1_penalty(const ParameterMatrix& params, const FeatureSubset& subset);

struct SolverOptions {
    int max_iters = 5000;
    /// Stop when the gradient-mapping norm divided by max(N, 1) is below tol.
    double tol = 1e-6;
    /// Monotone FISTA momentum; plain proximal gradient when false.
    bool accelerate = true;
    bool intercept = false;
    double initial_step = 1.0;
};

struct TrainReport {
    double final_objective = 0.0;
    int iterations = 0;
    bool converged = false;
    double gradient_mapping_norm = 0.0;
    std::vector<double> objective_trace; // f + lambda * penalty at each accepted iterate
};

struct TrainResult {
    MLRModel model;
    TrainReport report;
};

/// Minimizes f(W) + lambda * group_l1_penalty(W, subset) from W = 0 by
/// proximal gradient with backtracking. Coordinates outside the subset stay
/// at zero. `points` must already be scaled with `scaler`; labels must lie in
/// [1, scheme.num_classes()]. Throws DegenerateData when N < K and
/// LabelOutOfRange for bad labels. Non-convergence is reported, not thrown.
TrainResult train(const std::vector<LabeledPoint>& points, const FeatureSubset& subset, double lambda,
                  const QuantizationScheme& scheme, const Scaler& scaler, const SolverOptions& opts = {});

} // namespace vpos::mlr
