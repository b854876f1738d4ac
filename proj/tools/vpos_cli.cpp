#include "vpos/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using namespace vpos;
using pipeline::RunConfig;
using pipeline::RunPaths;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitConvergence = 3;

std::vector<Field> parse_fields(const std::vector<std::string>& names)
{
    std::vector<Field> fields;
    for (const auto& n : names) {
        auto f = parse_field(n);
        if (!f)
            throw CLI::ValidationError("field", "unknown field '" + n + "'");
        fields.push_back(*f);
    }
    return fields;
}

std::vector<std::string> field_names(const std::vector<Field>& fields)
{
    std::vector<std::string> names;
    for (Field f : fields)
        names.emplace_back(field_name(f));
    return names;
}

// Holds flag values as text until parsing finishes so enums and field lists
// can be validated in one place.
struct Options {
    RunConfig config;
    synth::SynthConfig synth;
    std::string dir = ".";
    std::string weighting = "paper";
    std::string subset_mode = "enumerate";
    std::string scaling = "zscore";
    std::vector<std::string> monitored = field_names(RunConfig{}.monitored);
    std::vector<std::string> required = field_names(RunConfig{}.required);
    int model_count = 0;
    bool seed_given = false;

    void finalize()
    {
        auto w = wmlr::parse_weighting(weighting);
        if (!w)
            throw CLI::ValidationError("--weighting", "expected paper or inverse");
        config.weighting = *w;
        auto m = wmlr::parse_subset_mode(subset_mode);
        if (!m)
            throw CLI::ValidationError("--subset-mode", "expected enumerate or random");
        config.subset_mode = *m;
        if (scaling == "zscore")
            config.scaling = ScalingMode::ZScore;
        else if (scaling == "minmax")
            config.scaling = ScalingMode::MinMax;
        else
            throw CLI::ValidationError("--scaling", "expected zscore or minmax");
        config.monitored = parse_fields(monitored);
        config.required = parse_fields(required);
        if (model_count > 0)
            config.model_count = model_count;
        config.svm.seed = config.seed;
        synth.seed = config.seed;
    }
};

void add_config_file(CLI::App* app)
{
    app->add_option("--config", "key=value file; command-line flags take precedence")->check(CLI::ExistingFile);
}

// CLI11 only reads config files attached to the top-level app, so subcommand
// files are applied here. Keys name long options; options given on the
// command line are left alone.
void apply_config_file(CLI::App* cmd)
{
    const auto* path_opt = cmd->get_option("--config");
    if (path_opt->count() == 0)
        return;
    for (const auto& item : CLI::ConfigINI().from_file(path_opt->as<std::string>())) {
        if (item.name == "--" || item.name == "config")
            continue;
        auto* opt = cmd->get_option_no_throw("--" + item.name);
        if (opt == nullptr)
            throw CLI::ValidationError("--config", "unknown key '" + item.name + "'");
        if (opt->count() > 0)
            continue;
        for (const auto& value : item.inputs)
            opt->add_result(value);
        opt->run_callback();
    }
}

void add_seed(CLI::App* app, Options& o)
{
    app->add_option("--seed", o.config.seed, "seed for synthesis, splitting and random subsets")
        ->capture_default_str();
}

void add_clean_options(CLI::App* app, Options& o)
{
    app->add_option("--monitor", o.monitored, "fields checked by the 3-sigma rule")
        ->delimiter(',')
        ->capture_default_str();
    app->add_option("--require", o.required, "optional fields a record must carry")
        ->delimiter(',')
        ->capture_default_str();
}

void add_detect_options(CLI::App* app, Options& o)
{
    app->add_option("--window", o.config.window, "seconds between records that split a trace")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

void add_train_options(CLI::App* app, Options& o)
{
    auto& c = o.config;
    app->add_option("--lambda", c.lambda, "l1 regularization weight")->capture_default_str();
    app->add_option("--delta", c.delta, "altitude quantization step in meters")->capture_default_str();
    app->add_option("-r,--subset-size", c.subset_size, "features per ensemble member")->capture_default_str();
    app->add_option("-L,--models", o.model_count, "ensemble size (default: all subsets of size r)");
    app->add_option("--subset-mode", o.subset_mode, "enumerate|random")->capture_default_str();
    app->add_option("--weighting", o.weighting, "paper|inverse")->capture_default_str();
    app->add_option("--train-fraction", c.train_fraction, "share of points used for training")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--scaling", o.scaling, "zscore|minmax")->capture_default_str();
    app->add_option("--max-iters", c.solver.max_iters, "solver iteration cap")->capture_default_str();
    app->add_option("--tol", c.solver.tol, "solver stopping tolerance")->capture_default_str();
    app->add_flag("--intercept,!--no-intercept", c.solver.intercept, "fit an unpenalized class bias")
        ->capture_default_str();
    app->add_option("--svm-c", c.svm.c, "SVM regularization")->capture_default_str();
    app->add_option("--svm-epochs", c.svm.epochs, "SVM passes over the data")->capture_default_str();
    app->add_flag("--parallel,!--serial", c.parallel, "train ensemble members concurrently")
        ->capture_default_str();
    app->add_flag("--strict-convergence", c.strict_convergence,
                  "fail with exit code 3 when a solver hits its iteration cap");
}

void add_synth_options(CLI::App* app, Options& o)
{
    auto& s = o.synth;
    app->add_option("--devices", s.n_devices, "number of devices")->capture_default_str();
    app->add_option("--points", s.points_per_device, "points per device")->capture_default_str();
    app->add_option("--altitude-low", s.altitude_low, "lowest true altitude (m)")->capture_default_str();
    app->add_option("--altitude-high", s.altitude_high, "highest true altitude (m)")->capture_default_str();
    app->add_option("--terrain-relief", s.terrain_relief, "ground height change across the area (m)")
        ->capture_default_str();
    app->add_option("--altitude-noise", s.altitude_noise_sd, "recorded altitude noise sd (m)")
        ->capture_default_str();
    app->add_option("--pressure-noise", s.pressure_noise_sd, "pressure noise sd (hPa)")->capture_default_str();
    app->add_option("--device-bias", s.device_pressure_bias_sd, "per-device pressure bias sd (hPa)")
        ->capture_default_str();
    app->add_option("--outlier-fraction", s.outlier_fraction, "share of displaced points")
        ->capture_default_str();
    app->add_option("--outlier-offset", s.outlier_offset, "altitude displacement of outliers (m)")
        ->capture_default_str();
}

void report(const pipeline::StageOutput& out)
{
    for (const auto& w : out.warnings)
        std::cerr << "warning: " << w << '\n';
    for (const auto& p : out.artifacts)
        std::cout << p.string() << '\n';
}

fs::path or_default(const std::string& value, const fs::path& fallback)
{
    return value.empty() ? fallback : fs::path(value);
}

int run(int argc, char** argv)
{
    CLI::App app{"Altitude outlier correction for GPS and barometer traces"};
    app.require_subcommand(1);
    Options o;

    std::string in, out, aux, verdicts, model, test;
    std::string algo = "all";
    bool use_synth = false;

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    add_config_file(synth_cmd);
    synth_cmd->add_option("--out", out, "dataset CSV")->required();
    synth_cmd->add_option("--truth", aux, "ground-truth CSV (default: <out stem>.truth.csv)");
    add_seed(synth_cmd, o);
    add_synth_options(synth_cmd, o);

    auto* clean_cmd = app.add_subcommand("clean", "drop incomplete records and apply the 3-sigma rule");
    add_config_file(clean_cmd);
    clean_cmd->add_option("--in", in, "raw dataset CSV")->required();
    clean_cmd->add_option("--dir", o.dir, "run directory")->capture_default_str();
    clean_cmd->add_option("--out", out, "cleaned CSV (default: <dir>/cleaned.csv)");
    clean_cmd->add_option("--rejections", aux, "rejection log (default: <dir>/rejections.csv)");
    add_clean_options(clean_cmd, o);

    auto* detect_cmd = app.add_subcommand("detect", "vote on horizontal outliers per trace");
    add_config_file(detect_cmd);
    detect_cmd->add_option("--dir", o.dir, "run directory")->capture_default_str();
    detect_cmd->add_option("--in", in, "cleaned CSV (default: <dir>/cleaned.csv)");
    detect_cmd->add_option("--out", out, "verdict CSV (default: <dir>/verdicts.csv)");
    add_detect_options(detect_cmd, o);

    auto* train_cmd = app.add_subcommand("train", "fit MLR, WMLR and SVM models");
    add_config_file(train_cmd);
    train_cmd->add_option("--dir", o.dir, "run directory")->capture_default_str();
    train_cmd->add_option("--in", in, "cleaned CSV (default: <dir>/cleaned.csv)");
    train_cmd->add_option("--verdicts", verdicts, "verdict CSV (default: <dir>/verdicts.csv)");
    train_cmd->add_option("--algo", algo, "mlr|wmlr|svm|all")->capture_default_str();
    add_seed(train_cmd, o);
    add_train_options(train_cmd, o);

    auto* predict_cmd = app.add_subcommand("predict", "predict test-split altitudes with trained models");
    add_config_file(predict_cmd);
    predict_cmd->add_option("--dir", o.dir, "run directory holding the model files")->capture_default_str();
    predict_cmd->add_option("--test", test, "test split CSV (default: <dir>/test.csv)");
    predict_cmd->add_option("--out", out, "predictions CSV (default: <dir>/predictions.csv)");

    auto* eval_cmd = app.add_subcommand("evaluate", "error statistics and CDFs from predictions");
    add_config_file(eval_cmd);
    eval_cmd->add_option("--dir", o.dir, "run directory")->capture_default_str();
    eval_cmd->add_option("--in", in, "predictions CSV (default: <dir>/predictions.csv)");
    eval_cmd->add_option("--out", out, "report CSV (default: <dir>/report.csv)");
    eval_cmd->add_option("--text", aux, "aligned text report (default: <dir>/report.txt)");

    auto* correct_cmd = app.add_subcommand("correct", "replace flagged altitudes with ensemble predictions");
    add_config_file(correct_cmd);
    correct_cmd->add_option("--dir", o.dir, "run directory")->capture_default_str();
    correct_cmd->add_option("--model", model, "ensemble model (default: <dir>/wmlr.model)");
    correct_cmd->add_option("--in", in, "cleaned CSV (default: <dir>/cleaned.csv)");
    correct_cmd->add_option("--verdicts", verdicts, "verdict CSV (default: <dir>/verdicts.csv)");
    correct_cmd->add_option("--out", out, "corrected CSV (default: <dir>/corrected.csv)");

    auto* pipe_cmd = app.add_subcommand("pipeline", "run every stage into one directory");
    add_config_file(pipe_cmd);
    auto* input_opt = pipe_cmd->add_option("--input", in, "raw dataset CSV");
    auto* synth_flag = pipe_cmd->add_flag("--synth", use_synth, "generate the input instead");
    input_opt->excludes(synth_flag);
    pipe_cmd->add_option("--out-dir,--dir", o.dir, "run directory")->capture_default_str();
    add_seed(pipe_cmd, o);
    add_clean_options(pipe_cmd, o);
    add_detect_options(pipe_cmd, o);
    add_train_options(pipe_cmd, o);
    add_synth_options(pipe_cmd, o);

    try {
        app.parse(argc, argv);
        for (auto* cmd : app.get_subcommands())
            apply_config_file(cmd);
        o.finalize();
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const RunPaths paths{o.dir};
    auto ensure_dir = [&] { fs::create_directories(paths.dir); };

    if (synth_cmd->parsed()) {
        fs::path data = out;
        fs::path truth = aux.empty() ? data.parent_path() / (data.stem().string() + ".truth.csv") : fs::path(aux);
        if (!data.parent_path().empty())
            fs::create_directories(data.parent_path());
        report(pipeline::run_synth(o.synth, data, truth));
    } else if (clean_cmd->parsed()) {
        ensure_dir();
        report(pipeline::run_clean(in, or_default(out, paths.cleaned()), or_default(aux, paths.rejections()),
                                   o.config));
    } else if (detect_cmd->parsed()) {
        ensure_dir();
        report(pipeline::run_detect(or_default(in, paths.cleaned()), or_default(out, paths.verdicts()), o.config));
    } else if (train_cmd->parsed()) {
        std::vector<pipeline::Algo> algos;
        if (algo == "all") {
            algos = {pipeline::Algo::Mlr, pipeline::Algo::Wmlr, pipeline::Algo::Svm};
        } else if (auto a = pipeline::parse_algo(algo)) {
            algos = {*a};
        } else {
            std::cerr << "--algo: expected mlr, wmlr, svm or all\n";
            return kExitUsage;
        }
        ensure_dir();
        report(pipeline::run_train(or_default(in, paths.cleaned()), or_default(verdicts, paths.verdicts()), paths,
                                   algos, o.config));
    } else if (predict_cmd->parsed()) {
        report(pipeline::run_predict(paths, or_default(test, paths.test_split()),
                                     or_default(out, paths.predictions())));
    } else if (eval_cmd->parsed()) {
        report(pipeline::run_evaluate(or_default(in, paths.predictions()), or_default(out, paths.report()),
                                      or_default(aux, paths.report_text())));
    } else if (correct_cmd->parsed()) {
        report(pipeline::run_correct(or_default(model, paths.wmlr_model()), or_default(in, paths.cleaned()),
                                     or_default(verdicts, paths.verdicts()), or_default(out, paths.corrected()),
                                     o.config));
    } else if (pipe_cmd->parsed()) {
        std::optional<fs::path> input;
        std::optional<synth::SynthConfig> synth;
        if (use_synth)
            synth = o.synth;
        else if (!in.empty())
            input = fs::path(in);
        else {
            std::cerr << "pipeline: give --input <csv> or --synth\n";
            return kExitUsage;
        }
        report(pipeline::run_pipeline(o.config, input, synth, paths));
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const vpos::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        if (e.code() == vpos::ErrorCode::DidNotConverge)
            return kExitConvergence;
        if (e.code() == vpos::ErrorCode::InvalidConfig)
            return kExitUsage;
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
