#pragma once

// Batch experiments over realizations and vertex counts, with CSV, JSON
// and SVG outputs.

#include "rsc/matrices.hpp"
#include "rsc/sampler.hpp"
#include "rsc/spectra.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace rsc {

struct ExperimentConfig {
    std::vector<std::uint32_t> n{40};
    int d = 2;
    std::vector<double> p{0.8, 0.7};
    Model model = Model::lower;
    MatrixKind matrix = MatrixKind::centered;
    bool normalize = true;
    std::size_t realizations = 10;
    std::uint64_t seed = 0;
    std::string out_dir;
    /// Any of "csv", "json", "svg".
    std::vector<std::string> formats{"csv", "json", "svg"};
    int moments = 12;
    std::size_t dense_cutoff = 4000;
    /// When positive, moments come from this many Rademacher probes and no
    /// eigenvalues are computed.
    std::size_t trace_probes = 0;
    std::size_t workers = 0;

    /// Throws InvalidArgument on an inconsistent configuration.
    void validate() const;
    ModelParams params(std::uint32_t n_value, std::uint64_t seed_value) const;
    bool wants(const std::string& format) const;

    nlohmann::json to_json() const;
    /// Missing fields keep their defaults; unknown fields are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
    void merge_json(const nlohmann::json& j);
};

struct RealizationResult {
    std::uint32_t n = 0;
    std::uint64_t seed = 0;
    std::size_t dim = 0;
    std::vector<double> eigenvalues;
    std::vector<double> moments;
    std::vector<double> moment_stderr;
    double ks_semicircle = 0.0;
    double ks_tensor = 0.0;
    double c_hat = 0.0;
    std::uint64_t f_dminus1 = 0;
    std::uint64_t maximal = 0;
    bool trace_identities_ok = true;
};

struct Aggregate {
    std::uint32_t n = 0;
    std::size_t count = 0;
    std::vector<double> mean_moments;
    std::vector<double> stderr_moments;
    double mean_c_hat = 0.0;
    double mean_maximal = 0.0;
    double median_ks_semicircle = 0.0;
    double median_ks_tensor = 0.0;
    double c = 0.0;
    double expected_c_hat = 0.0;
    double expected_maximal = 0.0;
};

struct Report {
    ExperimentConfig config;
    std::vector<RealizationResult> realizations;
    std::vector<Aggregate> aggregates;

    nlohmann::json to_json() const;
};

/// Builds the configured matrix for one realization.
SymMatrixView build_experiment_matrix(const ExperimentConfig& config, std::uint32_t n,
                                      std::uint64_t seed);

/// Runs every (n, realization) pair; realization i uses seed base + i. Writes
/// the requested outputs when out_dir is set.
Report run(const ExperimentConfig& config);

Aggregate aggregate(const ExperimentConfig& config, std::uint32_t n,
                    const std::vector<const RealizationResult*>& rows);

double median(std::vector<double> v);

/// Writes through a temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string eigenvalues_csv(const Report& report);
std::string histogram_csv(const Histogram& h);
/// Continuous part of the reference density sampled at samples + 1 evenly
/// spaced points of [lo, hi]; atoms are omitted.
std::vector<std::pair<double, double>> overlay_curve(const ReferenceLaw& ref, double lo, double hi,
                                                     std::size_t samples = 400);
/// Bar chart of h with the reference density drawn over it.
std::string histogram_svg(const Histogram& h, const ReferenceLaw& ref, const std::string& title);

/// Reference law used for a report's overlay.
ReferenceLaw overlay_law(const ExperimentConfig& config, std::uint32_t n);

void write_outputs(const Report& report);

/// Calls fn(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

} // namespace rsc
