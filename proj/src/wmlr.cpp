#include "vpos/wmlr.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <string>

namespace vpos::wmlr {

namespace {

constexpr std::string_view kModule = "wmlr";

bool next_combination(std::vector<int>& c, int n)
{
    const int k = static_cast<int>(c.size());
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i)
        --i;
    if (i < 0)
        return false;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
        c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

} // namespace

std::string_view to_string(SubsetMode mode) noexcept
{
    return mode == SubsetMode::Enumerate ? "enumerate" : "random";
}

std::string_view to_string(Weighting weighting) noexcept
{
    return weighting == Weighting::Paper ? "paper" : "inverse";
}

std::optional<SubsetMode> parse_subset_mode(std::string_view text) noexcept
{
    if (text == "enumerate")
        return SubsetMode::Enumerate;
    if (text == "random")
        return SubsetMode::Random;
    return std::nullopt;
}

std::optional<Weighting> parse_weighting(std::string_view text) noexcept
{
    if (text == "paper")
        return Weighting::Paper;
    if (text == "inverse")
        return Weighting::Inverse;
    return std::nullopt;
}

std::int64_t binomial(int n, int k)
{
    if (k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    std::int64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays integral at every step
        if (result > std::numeric_limits<std::int64_t>::max() / (n - k + i))
            return std::numeric_limits<std::int64_t>::max();
        result = result * (n - k + i) / i;
    }
    return result;
}

std::vector<mlr::FeatureSubset> make_subsets(int dim, int r, int count, SubsetMode mode, std::uint64_t seed)
{
    if (r < 1 || r > dim)
        throw Error(ErrorCode::BadCombination, kModule,
                    "subset size " + std::to_string(r) + " outside [1, " + std::to_string(dim) + "]");
    if (count < 1)
        throw Error(ErrorCode::BadCombination, kModule, "ensemble needs at least one model");

    std::vector<mlr::FeatureSubset> subsets;
    if (mode == SubsetMode::Enumerate) {
        const auto expected = binomial(dim, r);
        if (count != expected)
            throw Error(ErrorCode::BadCombination, kModule,
                        "enumeration yields C(" + std::to_string(dim) + "," + std::to_string(r)
                            + ") = " + std::to_string(expected) + " subsets, " + std::to_string(count)
                            + " requested");
        std::vector<int> c(static_cast<std::size_t>(r));
        std::iota(c.begin(), c.end(), 0);
        do {
            subsets.push_back(c);
        } while (next_combination(c, dim));
        return subsets;
    }

    Rng rng(seed);
    for (int l = 0; l < count; ++l) {
        std::vector<int> pool(static_cast<std::size_t>(dim));
        std::iota(pool.begin(), pool.end(), 0);
        // Partial Fisher-Yates: the first r slots are a uniform r-subset.
        for (int i = 0; i < r; ++i) {
            const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(dim - i)));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        mlr::FeatureSubset s(pool.begin(), pool.begin() + r);
        std::sort(s.begin(), s.end());
        subsets.push_back(std::move(s));
    }
    return subsets;
}

std::vector<mlr::FeatureSubset> EnsembleModel::subsets() const
{
    std::vector<mlr::FeatureSubset> out;
    out.reserve(models.size());
    for (const auto& m : models)
        out.push_back(m.subset);
    return out;
}

EnsembleTrainResult train_ensemble(const std::vector<LabeledPoint>& points, const QuantizationScheme& scheme,
                                   const Scaler& scaler, double lambda,
                                   const std::vector<mlr::FeatureSubset>& subsets, const EnsembleOptions& opts)
{
    if (subsets.empty())
        throw Error(ErrorCode::EmptyEnsemble, kModule, "no feature subsets given");

    std::vector<mlr::TrainResult> results;
    results.reserve(subsets.size());
    if (opts.parallel && subsets.size() > 1) {
        std::vector<std::future<mlr::TrainResult>> jobs;
        for (const auto& s : subsets)
            jobs.push_back(std::async(std::launch::async, [&, s] {
                return mlr::train(points, s, lambda, scheme, scaler, opts.solver);
            }));
        for (auto& job : jobs)
            results.push_back(job.get());
    } else {
        for (const auto& s : subsets)
            results.push_back(mlr::train(points, s, lambda, scheme, scaler, opts.solver));
    }

    EnsembleTrainResult out{EnsembleModel{{}, scheme, scaler, opts.weighting, lambda,
                                          static_cast<int>(subsets.front().size()), opts.subset_mode, opts.seed},
                            {}};
    for (auto& r : results) {
        out.ensemble.models.push_back(std::move(r.model));
        out.reports.push_back(std::move(r.report));
    }
    return out;
}

std::vector<double> combination_weights(const std::vector<double>& errors, Weighting weighting)
{
    const auto count = errors.size();
    std::vector<double> w(count, 0.0);
    if (count == 0)
        return w;
    if (weighting == Weighting::Paper) {
        const double total = std::accumulate(errors.begin(), errors.end(), 0.0);
        if (total > 0.0) {
            for (std::size_t l = 0; l < count; ++l)
                w[l] = errors[l] / total;
            return w;
        }
        std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(count));
        return w;
    }
    double total = 0.0;
    for (std::size_t l = 0; l < count; ++l) {
        w[l] = 1.0 / (errors[l] + 1e-9);
        total += w[l];
    }
    for (auto& v : w)
        v /= total;
    return w;
}

WeightedPrediction predict_weighted(const EnsembleModel& ensemble, const FeatureVector& raw_x, double h_observed)
{
    if (ensemble.models.empty())
        throw Error(ErrorCode::EmptyEnsemble, kModule, "ensemble has no models");

    const FeatureVector x = apply_scaler(ensemble.scaler, raw_x);
    WeightedPrediction p;
    for (const auto& model : ensemble.models) {
        const int k = mlr::predict_class(model, x);
        const double h = ensemble.scheme.predicted_altitude(k);
        p.per_model_classes.push_back(k);
        p.per_model_altitudes.push_back(h);
        p.errors.push_back(std::fabs(h_observed - h));
    }
    p.weights = combination_weights(p.errors, ensemble.weighting);
    for (std::size_t l = 0; l < p.weights.size(); ++l)
        p.altitude += p.weights[l] * p.per_model_altitudes[l];
    return p;
}

CorrectedTrace correct_outliers(const EnsembleModel& ensemble, const Trace& trace,
                                const std::vector<OutlierVerdict>& verdicts)
{
    if (verdicts.size() != trace.size())
        throw Error(ErrorCode::IndexMismatch, kModule,
                    std::to_string(verdicts.size()) + " verdicts for a trace of " + std::to_string(trace.size()));
    CorrectedTrace out{trace, std::vector<std::optional<double>>(trace.size())};
    for (const auto& v : verdicts) {
        if (v.index >= trace.size())
            throw Error(ErrorCode::IndexMismatch, kModule, "verdict index " + std::to_string(v.index) + " beyond trace");
        if (!v.is_outlier)
            continue;
        auto& obs = out.trace.observations[v.index];
        if (!obs.altitude)
            throw Error(ErrorCode::MissingRequiredColumn, kModule, "flagged observation has no altitude");
        const auto prediction = predict_weighted(ensemble, features_of(obs), *obs.altitude);
        out.original_altitude[v.index] = obs.altitude;
        obs.altitude = prediction.altitude;
    }
    return out;
}

} // namespace vpos::wmlr
