#pragma once

#include "vpos/svm.hpp"
#include "vpos/wmlr.hpp"

#include <filesystem>
#include <iosfwd>

namespace vpos::io {

// Plain-text model files. Every double is written in its shortest
// round-trip decimal form, so write -> read reproduces models bit for bit.
// Subset indices are 0-based.

void write_mlr(std::ostream& out, const mlr::MLRModel& model);
mlr::MLRModel read_mlr(std::istream& in);

void write_ensemble(std::ostream& out, const wmlr::EnsembleModel& ensemble);
wmlr::EnsembleModel read_ensemble(std::istream& in);

/// The SVM file also carries the scheme and scaler it predicts with.
struct SvmArtifact {
    svm::LinearSVMModel model;
    QuantizationScheme scheme;
    Scaler scaler;
};

void write_svm(std::ostream& out, const SvmArtifact& artifact);
SvmArtifact read_svm(std::istream& in);

void save_mlr(const std::filesystem::path& path, const mlr::MLRModel& model);
mlr::MLRModel load_mlr(const std::filesystem::path& path);
void save_ensemble(const std::filesystem::path& path, const wmlr::EnsembleModel& ensemble);
wmlr::EnsembleModel load_ensemble(const std::filesystem::path& path);
void save_svm(const std::filesystem::path& path, const SvmArtifact& artifact);
SvmArtifact load_svm(const std::filesystem::path& path);

} // namespace vpos::io
