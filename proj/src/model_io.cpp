#include "vpos/model_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace vpos::io {

namespace {

constexpr std::string_view kModule = "model_io";

[[noreturn]] void malformed(const std::string& what)
{
    throw Error(ErrorCode::MalformedModel, kModule, what);
}

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::string word()
    {
        std::string w;
        if (!(in_ >> w))
            malformed("unexpected end of model file");
        return w;
    }

    void expect(std::string_view keyword)
    {
        const auto w = word();
        if (w != keyword)
            malformed("expected '" + std::string(keyword) + "', found '" + w + "'");
    }

    double number()
    {
        const auto w = word();
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || ptr != w.data() + w.size())
            malformed("bad number '" + w + "'");
        return v;
    }

    long long integer()
    {
        const auto w = word();
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || ptr != w.data() + w.size())
            malformed("bad integer '" + w + "'");
        return v;
    }

    std::uint64_t unsigned_integer()
    {
        const auto w = word();
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc{} || ptr != w.data() + w.size())
            malformed("bad integer '" + w + "'");
        return v;
    }

    int count(long long lo, long long hi)
    {
        const auto v = integer();
        if (v < lo || v > hi)
            malformed("count " + std::to_string(v) + " out of range");
        return static_cast<int>(v);
    }

private:
    std::istream& in_;
};

void write_row(std::ostream& out, std::string_view key, const Eigen::VectorXd& v)
{
    out << key;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out << ' ' << format_double(v[i]);
    out << '\n';
}

Eigen::VectorXd read_row(Reader& r, std::string_view key, Eigen::Index n)
{
    r.expect(key);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = r.number();
    return v;
}

void write_scheme(std::ostream& out, const QuantizationScheme& s)
{
    out << "scheme " << format_double(s.h_min()) << ' ' << format_double(s.h_max()) << ' '
        << format_double(s.delta()) << '\n';
}

QuantizationScheme read_scheme(Reader& r)
{
    r.expect("scheme");
    const double lo = r.number();
    const double hi = r.number();
    const double delta = r.number();
    return QuantizationScheme(lo, hi, delta);
}

void write_scaler(std::ostream& out, const Scaler& s)
{
    out << "scaler " << (s.mode == ScalingMode::ZScore ? "zscore" : "minmax") << ' ' << s.dim() << '\n';
    write_row(out, "scaler_mean", s.mean);
    write_row(out, "scaler_std", s.std);
}

Scaler read_scaler(Reader& r)
{
    r.expect("scaler");
    Scaler s;
    const auto mode = r.word();
    if (mode == "zscore")
        s.mode = ScalingMode::ZScore;
    else if (mode == "minmax")
        s.mode = ScalingMode::MinMax;
    else
        malformed("unknown scaler mode '" + mode + "'");
    const int dim = r.count(1, 1 << 16);
    s.mean = read_row(r, "scaler_mean", dim);
    s.std = read_row(r, "scaler_std", dim);
    return s;
}

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m)
{
    out << "weights\n";
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        for (Eigen::Index i = 0; i < m.cols(); ++i)
            out << (i ? " " : "") << format_double(m(k, i));
        out << '\n';
    }
}

Eigen::MatrixXd read_matrix(Reader& r, int rows, int cols)
{
    r.expect("weights");
    Eigen::MatrixXd m(rows, cols);
    for (int k = 0; k < rows; ++k)
        for (int i = 0; i < cols; ++i)
            m(k, i) = r.number();
    return m;
}

void write_mlr_body(std::ostream& out, const mlr::MLRModel& model)
{
    out << "classes " << model.num_classes() << '\n';
    out << "features " << model.dim() << '\n';
    out << "subset " << model.subset.size();
    for (int i : model.subset)
        out << ' ' << i;
    out << '\n';
    out << "lambda " << format_double(model.lambda) << '\n';
    out << "intercept " << (model.intercept ? 1 : 0) << '\n';
    write_scheme(out, model.scheme);
    write_scaler(out, model.scaler);
    write_matrix(out, model.weights);
    write_row(out, "bias", model.bias);
    out << "end\n";
}

mlr::MLRModel read_mlr_body(Reader& r)
{
    r.expect("classes");
    const int classes = r.count(1, 1 << 20);
    r.expect("features");
    const int features = r.count(1, 1 << 16);
    r.expect("subset");
    const int size = r.count(1, features);
    mlr::FeatureSubset subset;
    for (int j = 0; j < size; ++j) {
        const int idx = r.count(0, features - 1);
        if (!subset.empty() && idx <= subset.back())
            malformed("subset must be sorted and unique");
        subset.push_back(idx);
    }
    r.expect("lambda");
    const double lambda = r.number();
    r.expect("intercept");
    const bool intercept = r.count(0, 1) == 1;
    auto scheme = read_scheme(r);
    auto scaler = read_scaler(r);
    if (scheme.num_classes() != classes)
        malformed("scheme has " + std::to_string(scheme.num_classes()) + " classes, header says "
                  + std::to_string(classes));
    if (scaler.dim() != features)
        malformed("scaler dimension does not match feature count");
    auto weights = read_matrix(r, classes, features);
    auto bias = read_row(r, "bias", classes);
    r.expect("end");
    return mlr::MLRModel{std::move(weights), std::move(bias), std::move(subset), scheme, std::move(scaler),
                         lambda, intercept};
}

template <typename Fn>
void save_with(const std::filesystem::path& path, Fn&& write)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "cannot write " + path.string());
    write(out);
    if (!out)
        throw Error(ErrorCode::IoFailure, kModule, "write failed for " + path.string());
}

std::ifstream open_model(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::FileNotFound, kModule, "cannot open " + path.string());
    return in;
}

} // namespace

void write_mlr(std::ostream& out, const mlr::MLRModel& model)
{
    out << "vpos-mlr 1\n";
    write_mlr_body(out, model);
}

mlr::MLRModel read_mlr(std::istream& in)
{
    Reader r(in);
    r.expect("vpos-mlr");
    r.expect("1");
    return read_mlr_body(r);
}

void write_ensemble(std::ostream& out, const wmlr::EnsembleModel& e)
{
    out << "vpos-wmlr 1\n";
    out << "seed " << e.seed << '\n';
    out << "lambda " << format_double(e.lambda) << '\n';
    out << "delta " << format_double(e.scheme.delta()) << '\n';
    out << "r " << e.subset_size << '\n';
    out << "L " << e.models.size() << '\n';
    out << "weighting " << wmlr::to_string(e.weighting) << '\n';
    out << "subset_mode " << wmlr::to_string(e.subset_mode) << '\n';
    write_scheme(out, e.scheme);
    write_scaler(out, e.scaler);
    out << "subsets\n";
    for (const auto& m : e.models) {
        for (std::size_t j = 0; j < m.subset.size(); ++j)
            out << (j ? " " : "") << m.subset[j];
        out << '\n';
    }
    for (std::size_t l = 0; l < e.models.size(); ++l) {
        out << "model " << l + 1 << '\n';
        write_mlr_body(out, e.models[l]);
    }
}

wmlr::EnsembleModel read_ensemble(std::istream& in)
{
    Reader r(in);
    r.expect("vpos-wmlr");
    r.expect("1");
    r.expect("seed");
    const auto seed = r.unsigned_integer();
    r.expect("lambda");
    const double lambda = r.number();
    r.expect("delta");
    r.number(); // repeated in the scheme line
    r.expect("r");
    const int subset_size = r.count(1, 1 << 16);
    r.expect("L");
    const int count = r.count(1, 1 << 20);
    r.expect("weighting");
    const auto weighting = wmlr::parse_weighting(r.word());
    r.expect("subset_mode");
    const auto mode = wmlr::parse_subset_mode(r.word());
    if (!weighting || !mode)
        malformed("unknown weighting or subset mode");
    auto scheme = read_scheme(r);
    auto scaler = read_scaler(r);
    r.expect("subsets");
    std::vector<mlr::FeatureSubset> subsets(static_cast<std::size_t>(count));
    for (auto& s : subsets)
        for (int j = 0; j < subset_size; ++j)
            s.push_back(r.count(0, scaler.dim() - 1));

    wmlr::EnsembleModel e{{}, scheme, scaler, *weighting, lambda, subset_size, *mode, seed};
    for (int l = 0; l < count; ++l) {
        r.expect("model");
        if (r.count(1, count) != l + 1)
            malformed("model blocks out of order");
        auto m = read_mlr_body(r);
        if (m.subset != subsets[static_cast<std::size_t>(l)])
            malformed("model subset disagrees with the subset table");
        if (!(m.scheme == scheme))
            malformed("model scheme disagrees with the ensemble scheme");
        e.models.push_back(std::move(m));
    }
    return e;
}

void write_svm(std::ostream& out, const SvmArtifact& a)
{
    out << "vpos-svm 1\n";
    out << "classes " << a.model.num_classes() << '\n';
    out << "features " << a.model.dim() << '\n';
    out << "c " << format_double(a.model.c) << '\n';
    write_scheme(out, a.scheme);
    write_scaler(out, a.scaler);
    write_matrix(out, a.model.weights);
    write_row(out, "bias", a.model.bias);
    out << "end\n";
}

SvmArtifact read_svm(std::istream& in)
{
    Reader r(in);
    r.expect("vpos-svm");
    r.expect("1");
    r.expect("classes");
    const int classes = r.count(1, 1 << 20);
    r.expect("features");
    const int features = r.count(1, 1 << 16);
    r.expect("c");
    const double c = r.number();
    auto scheme = read_scheme(r);
    auto scaler = read_scaler(r);
    auto weights = read_matrix(r, classes, features);
    auto bias = read_row(r, "bias", classes);
    r.expect("end");
    return SvmArtifact{svm::LinearSVMModel{std::move(weights), std::move(bias), c}, scheme, std::move(scaler)};
}

void save_mlr(const std::filesystem::path& path, const mlr::MLRModel& model)
{
    save_with(path, [&](std::ostream& out) { write_mlr(out, model); });
}

mlr::MLRModel load_mlr(const std::filesystem::path& path)
{
    auto in = open_model(path);
    return read_mlr(in);
}

void save_ensemble(const std::filesystem::path& path, const wmlr::EnsembleModel& ensemble)
{
    save_with(path, [&](std::ostream& out) { write_ensemble(out, ensemble); });
}

wmlr::EnsembleModel load_ensemble(const std::filesystem::path& path)
{
    auto in = open_model(path);
    return read_ensemble(in);
}

void save_svm(const std::filesystem::path& path, const SvmArtifact& artifact)
{
    save_with(path, [&](std::ostream& out) { write_svm(out, artifact); });
}

SvmArtifact load_svm(const std::filesystem::path& path)
{
    auto in = open_model(path);
    return read_svm(in);
}

} // namespace vpos::io
