#include "vpos/mlr.hpp"

#include "vector_exp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace vpos::mlr {

namespace {

constexpr std::string_view kModule = "mlr";

void check_subset(const FeatureSubset& subset, int dim)
{
    if (subset.empty())
        throw Error(ErrorCode::DimensionMismatch, kModule, "feature subset is empty");
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] < 0 || subset[i] >= dim)
            throw Error(ErrorCode::DimensionMismatch, kModule,
                        "feature index " + std::to_string(subset[i]) + " outside [0, " + std::to_string(dim) + ")");
        if (i > 0 && subset[i] <= subset[i - 1])
            throw Error(ErrorCode::DimensionMismatch, kModule, "feature subset must be sorted and unique");
    }
}

struct Design {
    FeatureMatrix x;
    std::vector<int> labels; // 0-based
};

Design design_from(const std::vector<LabeledPoint>& data, int num_classes, Eigen::Index dim)
{
    Design d;
    d.x.resize(static_cast<Eigen::Index>(data.size()), dim);
    d.labels.reserve(data.size());
    for (std::size_t n = 0; n < data.size(); ++n) {
        const auto& p = data[n];
        if (p.features.size() != dim)
            throw Error(ErrorCode::DimensionMismatch, kModule,
                        "point has " + std::to_string(p.features.size()) + " features, expected "
                            + std::to_string(dim));
        if (p.class_label < 1 || p.class_label > num_classes)
            throw Error(ErrorCode::LabelOutOfRange, kModule,
                        "label " + std::to_string(p.class_label) + " outside [1, " + std::to_string(num_classes) + "]");
        d.x.row(static_cast<Eigen::Index>(n)) = p.features.transpose();
        d.labels.push_back(p.class_label - 1);
    }
    return d;
}

Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, const FeatureSubset& subset)
{
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(subset.size()));
    for (std::size_t j = 0; j < subset.size(); ++j)
        out.col(static_cast<Eigen::Index>(j)) = m.col(subset[j]);
    return out;
}

void soft_threshold(Eigen::MatrixXd& w, double threshold)
{
    w = w.unaryExpr([threshold](double v) {
        if (v > threshold)
            return v - threshold;
        if (v < -threshold)
            return v + threshold;
        return 0.0;
    });
}

} // namespace

FeatureSubset full_subset(int dim)
{
    FeatureSubset s(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i)
        s[static_cast<std::size_t>(i)] = i;
    return s;
}

Eigen::VectorXd linear_scores(const MLRModel& model, const FeatureVector& x)
{
    if (x.size() != model.dim())
        throw Error(ErrorCode::DimensionMismatch, kModule,
                    "vector has " + std::to_string(x.size()) + " entries, model expects "
                        + std::to_string(model.dim()));
    Eigen::VectorXd scores = model.bias.size() == model.weights.rows()
        ? Eigen::VectorXd(model.bias)
        : Eigen::VectorXd::Zero(model.weights.rows());
    for (int i : model.subset)
        scores += model.weights.col(i) * x[i];
    return scores;
}

Eigen::VectorXd softmax_probabilities(const Eigen::VectorXd& scores)
{
    const double shift = scores.maxCoeff();
    Eigen::VectorXd p = (scores.array() - shift).exp().matrix();
    p /= p.sum();
    return p;
}

double log_sum_exp(const Eigen::VectorXd& scores)
{
    const double shift = scores.maxCoeff();
    return shift + std::log((scores.array() - shift).exp().sum());
}

int argmax_class(const Eigen::VectorXd& values)
{
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < values.size(); ++k) {
        if (values[k] > values[best])
            best = k;
    }
    return static_cast<int>(best) + 1;
}

int predict_class(const MLRModel& model, const FeatureVector& x)
{
    return argmax_class(linear_scores(model, x));
}

double predict_altitude(const MLRModel& model, const FeatureVector& raw_x)
{
    return model.scheme.predicted_altitude(predict_class(model, apply_scaler(model.scaler, raw_x)));
}

SoftmaxLoss::SoftmaxLoss(FeatureMatrix x, std::vector<int> labels, int num_classes)
    : x_(std::move(x))
    , labels_(std::move(labels))
    , num_classes_(num_classes)
{
    if (static_cast<std::size_t>(x_.rows()) != labels_.size())
        throw Error(ErrorCode::DimensionMismatch, kModule, "design rows and labels differ in count");
}

double SoftmaxLoss::evaluate(const Eigen::MatrixXd& w, const Eigen::VectorXd& b, Eigen::MatrixXd* grad_w,
                             Eigen::VectorXd* grad_b) const
{
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMajor s = x_ * w.transpose(); // N x K
    s.rowwise() += b.transpose();
    const Eigen::Index k_count = s.cols();
    double total = 0.0;
    for (Eigen::Index n = 0; n < s.rows(); ++n) {
        double* row = s.data() + n * k_count;
        const double shift = *std::max_element(row, row + k_count);
        total += shift - row[labels_[static_cast<std::size_t>(n)]];
        for (Eigen::Index k = 0; k < k_count; ++k)
            row[k] -= shift;
    }
    detail::exp_in_place(s.data(), static_cast<std::size_t>(s.size()));
    for (Eigen::Index n = 0; n < s.rows(); ++n) {
        double* row = s.data() + n * k_count;
        double z = 0.0;
        for (Eigen::Index k = 0; k < k_count; ++k)
            z += row[k];
        total += std::log(z);
        if (grad_w) {
            // The row becomes P(k | x_n) - [y_n = k].
            const double inv = 1.0 / z;
            for (Eigen::Index k = 0; k < k_count; ++k)
                row[k] *= inv;
            row[labels_[static_cast<std::size_t>(n)]] -= 1.0;
        }
    }
    if (grad_w) {
        grad_w->noalias() = s.transpose() * x_;
        *grad_b = s.colwise().sum().transpose();
    }
    return total;
}

double SoftmaxLoss::value(const Eigen::MatrixXd& w, const Eigen::VectorXd& b) const
{
    return evaluate(w, b, nullptr, nullptr);
}

double SoftmaxLoss::value_and_gradient(const Eigen::MatrixXd& w, const Eigen::VectorXd& b,
                                       Eigen::MatrixXd& grad_w, Eigen::VectorXd& grad_b) const
{
    return evaluate(w, b, &grad_w, &grad_b);
}

double nll_objective(const ParameterMatrix& params, const std::vector<LabeledPoint>& data)
{
    const auto d = design_from(data, static_cast<int>(params.rows()), params.cols());
    const SoftmaxLoss loss(d.x, d.labels, static_cast<int>(params.rows()));
    return loss.value(params, Eigen::VectorXd::Zero(params.rows()));
}

ParameterMatrix nll_gradient(const ParameterMatrix& params, const std::vector<LabeledPoint>& data)
{
    const auto d = design_from(data, static_cast<int>(params.rows()), params.cols());
    const SoftmaxLoss loss(d.x, d.labels, static_cast<int>(params.rows()));
    Eigen::MatrixXd gw;
    Eigen::VectorXd gb;
    loss.value_and_gradient(params, Eigen::VectorXd::Zero(params.rows()), gw, gb);
    return gw;
}

ParameterMatrix nll_gradient(const ParameterMatrix& params, const std::vector<LabeledPoint>& data,
                             const FeatureSubset& subset)
{
    check_subset(subset, static_cast<int>(params.cols()));
    const ParameterMatrix full = nll_gradient(params, data);
    ParameterMatrix out = ParameterMatrix::Zero(params.rows(), params.cols());
    for (int i : subset)
        out.col(i) = full.col(i);
    return out;
}

double group_l1_penalty(const ParameterMatrix& params, const FeatureSubset& subset)
{
    double total = 0.0;
    for (int i : subset)
        total += params.col(i).cwiseAbs().sum();
    return total;
}

TrainResult train(const std::vector<LabeledPoint>& points, const FeatureSubset& subset, double lambda,
                  const QuantizationScheme& scheme, const Scaler& scaler, const SolverOptions& opts)
{
    const int num_classes = scheme.num_classes();
    const int dim = scaler.dim();
    if (!(lambda > 0.0))
        throw Error(ErrorCode::InvalidConfig, kModule, "lambda must be positive");
    if (points.size() < static_cast<std::size_t>(num_classes))
        throw Error(ErrorCode::DegenerateData, kModule,
                    std::to_string(points.size()) + " training points for " + std::to_string(num_classes)
                        + " classes");
    check_subset(subset, dim);

    const auto design = design_from(points, num_classes, dim);
    const SoftmaxLoss loss(gather_columns(design.x, subset), design.labels, num_classes);
    const auto r = static_cast<Eigen::Index>(subset.size());
    const double scale = std::max<double>(1.0, static_cast<double>(points.size()));

    // Composite objective on the subset-restricted parameters.
    auto composite = [&](double smooth, const Eigen::MatrixXd& w) { return smooth + lambda * w.cwiseAbs().sum(); };

    Eigen::MatrixXd x_w = Eigen::MatrixXd::Zero(num_classes, r);
    Eigen::VectorXd x_b = Eigen::VectorXd::Zero(num_classes);
    Eigen::MatrixXd prev_w = x_w;
    Eigen::VectorXd prev_b = x_b;
    Eigen::MatrixXd y_w = x_w;
    Eigen::VectorXd y_b = x_b;
    double objective = composite(loss.value(x_w, x_b), x_w);

    TrainReport report;
    report.objective_trace.push_back(objective);

    double step = opts.initial_step;
    double momentum = 1.0;
    Eigen::MatrixXd grad_w, z_w;
    Eigen::VectorXd grad_b, z_b;

    for (int it = 1; it <= opts.max_iters; ++it) {
        const double f_y = loss.value_and_gradient(y_w, y_b, grad_w, grad_b);

        // Backtrack until the quadratic model at y majorizes f at the prox point.
        double f_z = 0.0;
        // The step carries over; every tenth iteration it may double again.
        if (it % 10 == 0)
            step = std::min(opts.initial_step, 2.0 * step);
        for (int halvings = 0;; ++halvings) {
            z_w = y_w - step * grad_w;
            soft_threshold(z_w, step * lambda);
            z_b = opts.intercept ? Eigen::VectorXd(y_b - step * grad_b) : Eigen::VectorXd(y_b);
            f_z = loss.value(z_w, z_b);
            const double lin = (grad_w.array() * (z_w - y_w).array()).sum()
                + (grad_b.array() * (z_b - y_b).array()).sum();
            const double sq = (z_w - y_w).squaredNorm() + (z_b - y_b).squaredNorm();
            const double bound = f_y + lin + sq / (2.0 * step);
            if (f_z <= bound + 1e-12 * std::max(1.0, std::fabs(f_y)) || halvings >= 100)
                break;
            step *= 0.5;
        }

        const double mapping_norm =
            std::sqrt((z_w - y_w).squaredNorm() + (z_b - y_b).squaredNorm()) / step;
        const double f_comp = composite(f_z, z_w);

        const bool improved = f_comp <= objective;
        prev_w = x_w;
        prev_b = x_b;
        if (improved) {
            x_w = z_w;
            x_b = z_b;
            objective = f_comp;
        }

        if (opts.accelerate && improved) {
            const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
            const double beta = (momentum - 1.0) / next;
            y_w = x_w + beta * (x_w - prev_w);
            y_b = x_b + beta * (x_b - prev_b);
            momentum = next;
        } else {
            // Plain step, or a momentum restart after a rejected extrapolation.
            y_w = x_w;
            y_b = x_b;
            momentum = 1.0;
        }

        report.objective_trace.push_back(objective);
        report.iterations = it;
        report.gradient_mapping_norm = mapping_norm;
        if (mapping_norm / scale < opts.tol) {
            report.converged = true;
            break;
        }
    }
    report.final_objective = objective;

    TrainResult result{MLRModel{ParameterMatrix::Zero(num_classes, dim), x_b, subset, scheme, scaler, lambda,
                                opts.intercept},
                       std::move(report)};
    for (Eigen::Index j = 0; j < r; ++j)
        result.model.weights.col(subset[static_cast<std::size_t>(j)]) = x_w.col(j);
    return result;
}

} // namespace vpos::mlr
