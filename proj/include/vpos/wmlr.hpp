#pragma once

#include "vpos/mlr.hpp"
#include "vpos/outlier.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace vpos::wmlr {

enum class SubsetMode { Enumerate, Random };

/// `Paper` weights each model proportionally to its absolute error.
/// `Inverse` uses w ∝ 1 / (err + 1e-9) instead.
enum class Weighting { Paper, Inverse };

std::string_view to_string(SubsetMode mode) noexcept;
std::string_view to_string(Weighting weighting) noexcept;
std::optional<SubsetMode> parse_subset_mode(std::string_view text) noexcept;
std::optional<Weighting> parse_weighting(std::string_view text) noexcept;

/// n choose k, saturating at INT64_MAX.
std::int64_t binomial(int n, int k);

/// Enumerate: all size-r subsets of {0..dim-1} in lexicographic order, and
/// `count` must equal C(dim, r) (BadCombination otherwise). Random: `count`
/// seeded draws of r distinct indices, each sorted; draws may repeat.
std::vector<mlr::FeatureSubset> make_subsets(int dim, int r, int count, SubsetMode mode,
                                             std::uint64_t seed = kDefaultSeed);

struct EnsembleModel {
    std::vector<mlr::MLRModel> models;
    QuantizationScheme scheme;
    Scaler scaler;
    Weighting weighting = Weighting::Paper;

    // Manifest, carried through serialization.
    double lambda = 1e-3;
    int subset_size = 0;
    SubsetMode subset_mode = SubsetMode::Enumerate;
    std::uint64_t seed = kDefaultSeed;

    std::size_t size() const { return models.size(); }
    std::vector<mlr::FeatureSubset> subsets() const;
};

struct EnsembleOptions {
    mlr::SolverOptions solver;
    Weighting weighting = Weighting::Paper;
    SubsetMode subset_mode = SubsetMode::Enumerate;
    std::uint64_t seed = kDefaultSeed;
    /// Train models on separate threads. Results do not depend on this.
    bool parallel = true;
};

struct EnsembleTrainResult {
    EnsembleModel ensemble;
    std::vector<mlr::TrainReport> reports; // one per model, in subset order
};

/// Trains one group-l1 MLR per subset. `points` are scaled with `scaler`.
EnsembleTrainResult train_ensemble(const std::vector<LabeledPoint>& points, const QuantizationScheme& scheme,
                                   const Scaler& scaler, double lambda,
                                   const std::vector<mlr::FeatureSubset>& subsets,
                                   const EnsembleOptions& opts = {});

struct WeightedPrediction {
    std::vector<int> per_model_classes;
    std::vector<double> per_model_altitudes;
    std::vector<double> errors;
    std::vector<double> weights;
    double altitude = 0.0;
};

/// Weights and combines the per-model class centers for one raw feature
/// vector. `h_observed` is the altitude the per-model errors are measured
/// against. When every error is zero the weights fall back to 1/L.
WeightedPrediction predict_weighted(const EnsembleModel& ensemble, const FeatureVector& raw_x,
                                    double h_observed);

/// Weight rule on its own, exposed for checking.
std::vector<double> combination_weights(const std::vector<double>& errors, Weighting weighting);

struct CorrectedTrace {
    Trace trace;
    std::vector<std::optional<double>> original_altitude; // set where a correction was applied
};

/// Replaces the altitude of every flagged observation by the weighted
/// prediction made against its own recorded altitude. Throws IndexMismatch
/// when the verdicts do not line up with the trace.
CorrectedTrace correct_outliers(const EnsembleModel& ensemble, const Trace& trace,
                                const std::vector<OutlierVerdict>& verdicts);

} // namespace vpos::wmlr
