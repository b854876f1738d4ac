#include "vpos/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace vpos::pipeline {

namespace {

constexpr std::string_view kModule = "pipeline";

std::ofstream open_for_write(const fs::path& path)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "cannot write " + path.string());
    return out;
}

void require_file(const fs::path& path, std::string_view what)
{
    if (!fs::exists(path))
        throw Error(ErrorCode::FileNotFound, kModule,
                    std::string(what) + " not found at " + path.string());
}

std::vector<Field> union_fields(std::vector<Field> a, const std::vector<Field>& b)
{
    for (Field f : b)
        if (std::find(a.begin(), a.end(), f) == a.end())
            a.push_back(f);
    return a;
}

std::string field_list(const std::vector<Field>& fields)
{
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i)
        out += (i ? ";" : "") + std::string(field_name(fields[i]));
    return out;
}

std::string subset_text(const mlr::FeatureSubset& s)
{
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i)
        out += (i ? ";" : "") + std::string(field_name(kFeatureFields[static_cast<std::size_t>(s[i])]));
    return out;
}

void write_train_row(std::ostream& out, std::string_view name, const mlr::FeatureSubset& subset,
                     const mlr::TrainReport& r)
{
    out << name << ',' << subset_text(subset) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
        << format_double(r.final_objective) << ',' << format_double(r.gradient_mapping_norm) << '\n';
}

std::vector<LabeledPoint> raw_points(const std::vector<Observation>& obs)
{
    std::vector<LabeledPoint> points;
    points.reserve(obs.size());
    for (const auto& o : obs) {
        if (!o.altitude)
            throw Error(ErrorCode::MissingRequiredColumn, kModule, "training record without altitude");
        points.push_back({features_of(o), *o.altitude, 1});
    }
    return points;
}

} // namespace

int RunConfig::resolved_model_count() const
{
    if (model_count)
        return *model_count;
    return static_cast<int>(wmlr::binomial(kFeatureDim, subset_size));
}

std::optional<Algo> parse_algo(std::string_view text) noexcept
{
    if (text == "mlr")
        return Algo::Mlr;
    if (text == "wmlr")
        return Algo::Wmlr;
    if (text == "svm")
        return Algo::Svm;
    return std::nullopt;
}

StageOutput run_synth(const synth::SynthConfig& config, const fs::path& data_out,
                      const std::optional<fs::path>& truth_out)
{
    const auto result = synth::generate_dataset(config);
    StageOutput out;
    {
        auto f = open_for_write(data_out);
        write_dataset(f, result.dataset);
    }
    out.artifacts.push_back(data_out);
    if (truth_out) {
        synth::write_ground_truth(*truth_out, result.truth);
        out.artifacts.push_back(*truth_out);
    }
    return out;
}

StageOutput run_clean(const fs::path& input, const fs::path& cleaned_out, const fs::path& rejections_out,
                      const RunConfig& config)
{
    auto loaded = load_dataset(input, config.schema);
    const auto required = union_fields(config.required, config.monitored);

    struct Removal {
        std::size_t row;
        std::string reason;
        std::string detail;
    };
    std::vector<Removal> removed;
    for (const auto& r : loaded.rejections)
        removed.push_back({r.row, std::string(to_string(r.reason)), r.detail});

    const auto complete = complete_records(loaded.dataset, required);
    Dataset present{{}, loaded.dataset.provenance};
    std::vector<std::size_t> present_rows;
    {
        std::size_t next = 0;
        for (std::size_t i = 0; i < loaded.dataset.points.size(); ++i) {
            if (next < complete.size() && complete[next] == i) {
                present.points.push_back(loaded.dataset.points[i]);
                present_rows.push_back(loaded.rows[i]);
                ++next;
            } else {
                removed.push_back({loaded.rows[i], "MissingValue", "lacks one of " + field_list(required)});
            }
        }
    }
    if (present.points.empty())
        throw Error(ErrorCode::EmptyDataset, kModule, "no record of " + input.string() + " has " + field_list(required));

    const auto sigma = three_sigma_filter(present, config.monitored);
    Dataset cleaned{{}, present.provenance};
    for (auto i : sigma.kept)
        cleaned.points.push_back(present.points[i]);
    for (auto i : sigma.removed)
        removed.push_back({present_rows[i], "ThreeSigma", "deviates by 3 sigma or more in " + field_list(config.monitored)});
    if (cleaned.points.empty())
        throw Error(ErrorCode::EmptyDataset, kModule, "3-sigma rule removed every record");

    std::sort(removed.begin(), removed.end(), [](const Removal& a, const Removal& b) { return a.row < b.row; });

    {
        auto f = open_for_write(cleaned_out);
        write_dataset(f, cleaned, config.schema);
    }
    {
        auto f = open_for_write(rejections_out);
        f << "row,reason,detail\n";
        for (const auto& r : removed) {
            std::string detail = r.detail;
            std::replace(detail.begin(), detail.end(), ',', ';');
            f << r.row << ',' << r.reason << ',' << detail << '\n';
        }
    }
    return {{cleaned_out, rejections_out}, {}};
}

StageOutput run_detect(const fs::path& cleaned, const fs::path& verdicts_out, const RunConfig& config)
{
    require_file(cleaned, "cleaned dataset");
    const auto data = load_dataset(cleaned, config.schema).dataset;
    const auto result = detect_dataset_outliers(data, config.window);
    {
        auto f = open_for_write(verdicts_out);
        write_verdicts(f, result);
    }
    return {{verdicts_out}, {}};
}

StageOutput run_train(const fs::path& cleaned, const fs::path& verdicts, const RunPaths& paths,
                      const std::vector<Algo>& algos, const RunConfig& config)
{
    require_file(cleaned, "cleaned dataset (run `clean` first)");
    require_file(verdicts, "outlier verdicts (run `detect` first)");
    const auto data = load_dataset(cleaned, config.schema).dataset;
    const auto mask = read_outlier_mask(verdicts, data.points.size());

    std::vector<Observation> inliers;
    for (std::size_t i = 0; i < data.points.size(); ++i)
        if (!mask[i])
            inliers.push_back(data.points[i]);
    auto [train_obs, test_obs] = split_train_test(inliers, config.train_fraction, config.seed);

    StageOutput out;
    {
        auto f = open_for_write(paths.train_split());
        write_dataset(f, Dataset{train_obs, "train"}, config.schema);
        auto g = open_for_write(paths.test_split());
        write_dataset(g, Dataset{test_obs, "test"}, config.schema);
    }
    out.artifacts.push_back(paths.train_split());
    out.artifacts.push_back(paths.test_split());

    auto points = raw_points(train_obs);
    std::vector<double> altitudes;
    std::vector<FeatureVector> raw;
    for (const auto& p : points) {
        altitudes.push_back(p.altitude);
        raw.push_back(p.features);
    }
    const auto scheme = QuantizationScheme::from_altitudes(altitudes, config.delta);
    const auto scaler = fit_scaler(raw, config.scaling);
    for (auto& p : points) {
        p.class_label = scheme.class_of(p.altitude);
        p.features = apply_scaler(scaler, p.features);
    }

    auto log = open_for_write(paths.train_log());
    log << "model,subset,iterations,converged,final_objective,gradient_mapping_norm\n";
    bool all_converged = true;

    auto has = [&](Algo a) { return std::find(algos.begin(), algos.end(), a) != algos.end(); };
    if (has(Algo::Mlr)) {
        const auto subset = mlr::full_subset(kFeatureDim);
        const auto trained = mlr::train(points, subset, config.lambda, scheme, scaler, config.solver);
        io::save_mlr(paths.mlr_model(), trained.model);
        write_train_row(log, kMethodMlr, subset, trained.report);
        all_converged = all_converged && trained.report.converged;
        out.artifacts.push_back(paths.mlr_model());
    }
    if (has(Algo::Wmlr)) {
        const auto subsets = wmlr::make_subsets(kFeatureDim, config.subset_size, config.resolved_model_count(),
                                                config.subset_mode, config.seed);
        wmlr::EnsembleOptions opts;
        opts.solver = config.solver;
        opts.weighting = config.weighting;
        opts.subset_mode = config.subset_mode;
        opts.seed = config.seed;
        opts.parallel = config.parallel;
        const auto trained = wmlr::train_ensemble(points, scheme, scaler, config.lambda, subsets, opts);
        io::save_ensemble(paths.wmlr_model(), trained.ensemble);
        for (std::size_t l = 0; l < subsets.size(); ++l) {
            write_train_row(log, std::string(kMethodWmlr) + "_" + std::to_string(l + 1), subsets[l], trained.reports[l]);
            all_converged = all_converged && trained.reports[l].converged;
        }
        out.artifacts.push_back(paths.wmlr_model());
    }
    if (has(Algo::Svm)) {
        auto model = svm::train_svm_ovr(points, scheme.num_classes(), config.svm);
        io::save_svm(paths.svm_model(), io::SvmArtifact{std::move(model), scheme, scaler});
        out.artifacts.push_back(paths.svm_model());
    }
    log.close();
    out.artifacts.push_back(paths.train_log());

    if (!all_converged) {
        const std::string msg = "solver hit max_iters before the tolerance; see " + paths.train_log().string();
        if (config.strict_convergence)
            throw Error(ErrorCode::DidNotConverge, "mlr", msg);
        out.warnings.push_back(msg);
    }
    return out;
}

StageOutput run_predict(const RunPaths& paths, const fs::path& test_split, const fs::path& predictions_out)
{
    require_file(test_split, "test split (run `train` first)");
    const bool have_mlr = fs::exists(paths.mlr_model());
    const bool have_wmlr = fs::exists(paths.wmlr_model());
    const bool have_svm = fs::exists(paths.svm_model());
    if (!have_mlr && !have_wmlr && !have_svm)
        throw Error(ErrorCode::FileNotFound, kModule, "no model files in " + paths.dir.string() + " (run `train` first)");

    const auto test = load_dataset(test_split).dataset;
    auto f = open_for_write(predictions_out);
    f << "method,row,altitude,predicted_altitude,abs_error\n";
    auto emit = [&](std::string_view method, std::size_t row, double h, double predicted) {
        f << method << ',' << row << ',' << format_double(h) << ',' << format_double(predicted) << ','
          << format_double(std::fabs(predicted - h)) << '\n';
    };

    if (have_mlr) {
        const auto model = io::load_mlr(paths.mlr_model());
        for (std::size_t i = 0; i < test.points.size(); ++i)
            emit(kMethodMlr, i, *test.points[i].altitude, mlr::predict_altitude(model, features_of(test.points[i])));
    }
    if (have_wmlr) {
        const auto ensemble = io::load_ensemble(paths.wmlr_model());
        for (std::size_t i = 0; i < test.points.size(); ++i) {
            const double h = *test.points[i].altitude;
            emit(kMethodWmlr, i, h, wmlr::predict_weighted(ensemble, features_of(test.points[i]), h).altitude);
        }
    }
    if (have_svm) {
        const auto artifact = io::load_svm(paths.svm_model());
        for (std::size_t i = 0; i < test.points.size(); ++i) {
            const auto x = apply_scaler(artifact.scaler, features_of(test.points[i]));
            emit(kMethodSvm, i, *test.points[i].altitude,
                 artifact.scheme.predicted_altitude(svm::predict_svm(artifact.model, x)));
        }
    }
    return {{predictions_out}, {}};
}

StageOutput run_evaluate(const fs::path& predictions, const fs::path& report_out,
                         const std::optional<fs::path>& text_out)
{
    require_file(predictions, "predictions file (run `predict` first)");
    std::ifstream in(predictions);
    std::string line;
    std::getline(in, line);
    std::vector<std::string> order;
    std::map<std::string, std::vector<double>> errors;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(cell);
        if (cells.size() != 5)
            throw Error(ErrorCode::MalformedNumber, kModule, "bad prediction line: " + line);
        auto [it, inserted] = errors.try_emplace(cells[0]);
        if (inserted)
            order.push_back(cells[0]);
        try {
            it->second.push_back(std::stod(cells[4]));
        } catch (const std::exception&) {
            throw Error(ErrorCode::MalformedNumber, kModule, "bad error value: " + cells[4]);
        }
    }

    std::vector<eval::ErrorReport> reports;
    for (const auto& method : order)
        reports.push_back(eval::make_report(method, errors[method], eval::kSourceGroundTruth));

    StageOutput out;
    if (report_out.has_parent_path())
        fs::create_directories(report_out.parent_path());
    eval::write_report(reports, report_out, eval::ReportFormat::Csv);
    out.artifacts.push_back(report_out);
    if (text_out) {
        eval::write_report(reports, *text_out, eval::ReportFormat::Text);
        out.artifacts.push_back(*text_out);
    }
    for (const auto& r : reports)
        out.artifacts.push_back(report_out.parent_path() / (r.method_name + ".cdf.csv"));
    return out;
}

StageOutput run_correct(const fs::path& ensemble_model, const fs::path& cleaned, const fs::path& verdicts,
                        const fs::path& corrected_out, const RunConfig& config)
{
    require_file(ensemble_model, "WMLR model (run `train --algo wmlr` first)");
    require_file(cleaned, "cleaned dataset");
    require_file(verdicts, "outlier verdicts");
    const auto ensemble = io::load_ensemble(ensemble_model);
    const auto data = load_dataset(cleaned, config.schema).dataset;
    const auto rows = read_verdicts(verdicts, data.points.size());

    std::vector<Observation> corrected = data.points;
    std::vector<std::optional<double>> original(data.points.size());
    for (const auto& trace : group_traces(data, config.window)) {
        std::vector<OutlierVerdict> trace_verdicts;
        for (std::size_t i = 0; i < trace.size(); ++i) {
            const auto& v = rows[trace.source_rows[i]];
            trace_verdicts.push_back({i, v.exceed_fraction, v.is_outlier});
        }
        const auto fixed = wmlr::correct_outliers(ensemble, trace, trace_verdicts);
        for (std::size_t i = 0; i < trace.size(); ++i) {
            corrected[trace.source_rows[i]] = fixed.trace.observations[i];
            original[trace.source_rows[i]] = fixed.original_altitude[i];
        }
    }

    auto f = open_for_write(corrected_out);
    f << config.schema.header() << ",original_altitude\n";
    for (std::size_t i = 0; i < corrected.size(); ++i)
        f << format_record(corrected[i], config.schema) << ',' << (original[i] ? format_double(*original[i]) : "")
          << '\n';
    return {{corrected_out}, {}};
}

void write_manifest(const fs::path& path, const RunConfig& config)
{
    auto f = open_for_write(path);
    f << "seed=" << config.seed << '\n'
      << "lambda=" << format_double(config.lambda) << '\n'
      << "delta=" << format_double(config.delta) << '\n'
      << "r=" << config.subset_size << '\n'
      << "L=" << config.resolved_model_count() << '\n'
      << "subset_mode=" << wmlr::to_string(config.subset_mode) << '\n'
      << "weighting=" << wmlr::to_string(config.weighting) << '\n'
      << "train_fraction=" << format_double(config.train_fraction) << '\n'
      << "window=" << format_double(config.window) << '\n'
      << "monitored_3sigma=" << field_list(config.monitored) << '\n'
      << "intercept=" << (config.solver.intercept ? 1 : 0) << '\n'
      << "scaling=" << (config.scaling == ScalingMode::ZScore ? "zscore" : "minmax") << '\n'
      << "altitude_source=" << eval::kSourceGroundTruth << '\n';
}

StageOutput run_pipeline(const RunConfig& config, const std::optional<fs::path>& input,
                         const std::optional<synth::SynthConfig>& synth, const RunPaths& paths)
{
    fs::create_directories(paths.dir);
    StageOutput all;
    auto collect = [&all](StageOutput s) {
        all.artifacts.insert(all.artifacts.end(), s.artifacts.begin(), s.artifacts.end());
        all.warnings.insert(all.warnings.end(), s.warnings.begin(), s.warnings.end());
    };

    fs::path source;
    if (synth) {
        collect(run_synth(*synth, paths.data(), paths.truth()));
        source = paths.data();
    } else if (input) {
        require_file(*input, "input dataset");
        source = *input;
    } else {
        throw Error(ErrorCode::InvalidConfig, kModule, "pipeline needs an input file or synthetic data");
    }

    collect(run_clean(source, paths.cleaned(), paths.rejections(), config));
    collect(run_detect(paths.cleaned(), paths.verdicts(), config));
    collect(run_train(paths.cleaned(), paths.verdicts(), paths, {Algo::Mlr, Algo::Wmlr, Algo::Svm}, config));
    collect(run_predict(paths, paths.test_split(), paths.predictions()));
    collect(run_evaluate(paths.predictions(), paths.report(), paths.report_text()));
    collect(run_correct(paths.wmlr_model(), paths.cleaned(), paths.verdicts(), paths.corrected(), config));
    write_manifest(paths.manifest(), config);
    all.artifacts.push_back(paths.manifest());
    return all;
}

} // namespace vpos::pipeline
