#pragma once

#include "vpos/eval.hpp"
#include "vpos/model_io.hpp"
#include "vpos/synthetic.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vpos::pipeline {

namespace fs = std::filesystem;

/// Defaults are the published experiment settings: lambda = 1e-3, delta = 4 m,
/// r = 4 of 5 features, L = C(5, 4) = 5 models, 70/30 split. Models carry a
/// class bias here; pass `solver.intercept = false` for bias-free scores.
struct RunConfig {
    double lambda = 1e-3;
    double delta = 4.0;
    int subset_size = 4;
    std::optional<int> model_count; // defaults to C(I, r)
    wmlr::SubsetMode subset_mode = wmlr::SubsetMode::Enumerate;
    double train_fraction = 0.7;
    std::uint64_t seed = kDefaultSeed;
    wmlr::Weighting weighting = wmlr::Weighting::Paper;
    double window = kDefaultTraceWindow;
    std::vector<Field> monitored = {Field::Pressure, Field::Altitude};
    std::vector<Field> required = {Field::Pressure, Field::Altitude, Field::Speed};
    ScalingMode scaling = ScalingMode::ZScore;
    mlr::SolverOptions solver = {.intercept = true};
    svm::SvmOptions svm;
    bool parallel = true;
    bool strict_convergence = false;
    CsvSchema schema = CsvSchema::default_schema();

    int resolved_model_count() const;
};

inline constexpr std::string_view kMethodMlr = "MLR";
inline constexpr std::string_view kMethodWmlr = "WMLR";
inline constexpr std::string_view kMethodSvm = "SVM";

/// Standard artifact names inside a run directory.
struct RunPaths {
    fs::path dir;

    fs::path data() const { return dir / "data.csv"; }
    fs::path truth() const { return dir / "truth.csv"; }
    fs::path cleaned() const { return dir / "cleaned.csv"; }
    fs::path rejections() const { return dir / "rejections.csv"; }
    fs::path verdicts() const { return dir / "verdicts.csv"; }
    fs::path train_split() const { return dir / "train.csv"; }
    fs::path test_split() const { return dir / "test.csv"; }
    fs::path mlr_model() const { return dir / "mlr.model"; }
    fs::path wmlr_model() const { return dir / "wmlr.model"; }
    fs::path svm_model() const { return dir / "svm.model"; }
    fs::path train_log() const { return dir / "train_log.csv"; }
    fs::path predictions() const { return dir / "predictions.csv"; }
    fs::path report() const { return dir / "report.csv"; }
    fs::path report_text() const { return dir / "report.txt"; }
    fs::path corrected() const { return dir / "corrected.csv"; }
    fs::path manifest() const { return dir / "manifest.txt"; }
};

/// Records every artifact a stage writes.
struct StageOutput {
    std::vector<fs::path> artifacts;
    std::vector<std::string> warnings;
};

StageOutput run_synth(const synth::SynthConfig& config, const fs::path& data_out,
                      const std::optional<fs::path>& truth_out);

/// Missing-field removal then the 3-sigma rule. The rejection log lists
/// parse failures, incomplete records and 3-sigma removals by input row.
StageOutput run_clean(const fs::path& input, const fs::path& cleaned_out, const fs::path& rejections_out,
                      const RunConfig& config);

StageOutput run_detect(const fs::path& cleaned, const fs::path& verdicts_out, const RunConfig& config);

enum class Algo { Mlr, Wmlr, Svm };
std::optional<Algo> parse_algo(std::string_view text) noexcept;

/// Drops flagged outliers, splits, fits the scheme and scaler on the train
/// split, and trains the requested models into `paths`.
StageOutput run_train(const fs::path& cleaned, const fs::path& verdicts, const RunPaths& paths,
                      const std::vector<Algo>& algos, const RunConfig& config);

/// Predictions for every model file present in `paths` over the test split.
/// CSV `method,row,altitude,predicted_altitude,abs_error`.
StageOutput run_predict(const RunPaths& paths, const fs::path& test_split, const fs::path& predictions_out);

/// Per-method error statistics (CSV and text) plus CDF files.
StageOutput run_evaluate(const fs::path& predictions, const fs::path& report_out,
                         const std::optional<fs::path>& text_out);

/// Replaces flagged altitudes with the ensemble's weighted prediction against
/// each point's own reading. Adds an `original_altitude` audit column.
StageOutput run_correct(const fs::path& ensemble_model, const fs::path& cleaned, const fs::path& verdicts,
                        const fs::path& corrected_out, const RunConfig& config);

void write_manifest(const fs::path& path, const RunConfig& config);

/// clean -> detect -> train -> predict -> evaluate -> correct, all inside
/// `paths.dir`. With `synth`, the input is generated first.
StageOutput run_pipeline(const RunConfig& config, const std::optional<fs::path>& input,
                         const std::optional<synth::SynthConfig>& synth, const RunPaths& paths);

} // namespace vpos::pipeline
