#include "vpos/svm.hpp"

#include "vpos/mlr.hpp"

#include <string>

namespace vpos::svm {

namespace {
constexpr std::string_view kModule = "svm";
}

LinearSVMModel train_svm_ovr(const std::vector<LabeledPoint>& points, int num_classes, const SvmOptions& opts)
{
    if (num_classes < 1 || points.size() < static_cast<std::size_t>(num_classes) || points.empty())
        throw Error(ErrorCode::DegenerateData, kModule,
                    std::to_string(points.size()) + " training points for " + std::to_string(num_classes)
                        + " classes");
    if (!(opts.c > 0.0) || opts.epochs < 1)
        throw Error(ErrorCode::InvalidConfig, kModule, "need c > 0 and at least one epoch");

    const auto dim = points.front().features.size();
    for (const auto& p : points) {
        if (p.features.size() != dim)
            throw Error(ErrorCode::DimensionMismatch, kModule, "feature vectors differ in length");
        if (p.class_label < 1 || p.class_label > num_classes)
            throw Error(ErrorCode::LabelOutOfRange, kModule, "label " + std::to_string(p.class_label));
    }

    LinearSVMModel model{Eigen::MatrixXd::Zero(num_classes, dim), Eigen::VectorXd::Zero(num_classes), opts.c};
    if (num_classes == 1)
        return model;

    const auto n = static_cast<std::uint64_t>(points.size());
    const std::uint64_t total_steps = n * static_cast<std::uint64_t>(opts.epochs);
    const std::uint64_t average_from = total_steps - n + 1;

    for (int k = 0; k < num_classes; ++k) {
        Rng rng(opts.seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(k + 1));
        Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
        double b = 0.0;
        Eigen::VectorXd w_sum = Eigen::VectorXd::Zero(dim);
        double b_sum = 0.0;
        for (std::uint64_t t = 1; t <= total_steps; ++t) {
            const auto& p = points[static_cast<std::size_t>(rng.below(n))];
            const double y = p.class_label == k + 1 ? 1.0 : -1.0;
            const double eta = 1.0 / (opts.c * static_cast<double>(t));
            const double margin = y * (w.dot(p.features) + b);
            const double shrink = 1.0 - eta * opts.c;
            w *= shrink;
            b *= shrink;
            if (margin < 1.0) {
                w += eta * y * p.features;
                b += eta * y;
            }
            if (t >= average_from) {
                w_sum += w;
                b_sum += b;
            }
        }
        model.weights.row(k) = (w_sum / static_cast<double>(n)).transpose();
        model.bias[k] = b_sum / static_cast<double>(n);
    }
    return model;
}

Eigen::VectorXd decision_values(const LinearSVMModel& model, const FeatureVector& x)
{
    if (x.size() != model.dim())
        throw Error(ErrorCode::DimensionMismatch, kModule,
                    "vector has " + std::to_string(x.size()) + " entries, model expects "
                        + std::to_string(model.dim()));
    return model.weights * x + model.bias;
}

int predict_svm(const LinearSVMModel& model, const FeatureVector& x)
{
    return mlr::argmax_class(decision_values(model, x));
}

} // namespace vpos::svm
