#include "rsc/acceptance.hpp"

#include "rsc/error.hpp"
#include "rsc/experiment.hpp"
#include "rsc/matrices.hpp"
#include "rsc/sampler.hpp"
#include "rsc/spectra.hpp"
#include "rsc/words.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

namespace rsc {

using nlohmann::json;

namespace {

// Tolerances and sizes.
constexpr double kWordRuntimeLimit = 60.0;
constexpr int kStructuralInstances = 50;
constexpr std::uint64_t kInstanceSeed = 0x5EEDull;
constexpr double kFloatIdentityTol = 1e-12;
constexpr double kEigenMultisetTol = 1e-8;
constexpr double kConcentrationTol = 0.03;
constexpr double kConcentrationRuntimeLimit = 120.0;
constexpr double kStderrMultiple = 3.0;
constexpr std::size_t kMomentSeeds = 50;
constexpr std::size_t kTensorSeeds = 10;
constexpr double kTensorM2Tol = 0.08;
constexpr double kTensorM4Tol = 0.24;
constexpr double kTensorKsLimit = 0.1;
constexpr std::size_t kSemicircleSeeds = 10;
constexpr double kSemicircleM2Tol = 0.1;
constexpr double kSemicircleM4Tol = 0.3;
constexpr std::size_t kMaximalSeeds = 20;
constexpr std::size_t kMaximalMeanSeeds = 200;
constexpr int kSandwichInstances = 100;
constexpr std::size_t kSandwichDim = 40;
constexpr double kTraceIdentityTol = 1e-8;
constexpr std::size_t kProbeDim = 500;
constexpr std::size_t kProbes = 100;
constexpr int kProbeOrder = 6;
/// Floor added to the probe tolerance for moments whose estimator has no
/// spread (stderr 0), so rounding alone cannot fail the comparison.
constexpr double kProbeFloor = 1e-10;
constexpr double kResidualTol = 1e-8;

std::string fmt(double v, int digits = 6) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// Tracks trace identities for every dense solve issued by the suite.
struct SolveAudit {
    std::size_t solves = 0;
    std::size_t failures = 0;
    double worst_sum = 0.0;
    double worst_sumsq = 0.0;

    std::vector<double> solve(const SymMatrix& m, const EigenOptions& opts = {}) {
        auto eigs = eigenvalues_sym(m, opts);
        record(check_trace_identities(m, eigs, kTraceIdentityTol));
        return eigs;
    }

    void record(const TraceIdentityCheck& c) {
        ++solves;
        failures += c.ok ? 0 : 1;
        worst_sum = std::max(worst_sum, c.sum_error);
        worst_sumsq = std::max(worst_sumsq, c.sumsq_error);
    }

    void record(const Report& report) {
        for (const auto& r : report.realizations) {
            ++solves;
            failures += r.trace_identities_ok ? 0 : 1;
        }
    }
};

struct Context {
    AcceptanceOptions opts;
    SolveAudit audit;
};

std::vector<double> random_probs(std::mt19937_64& rng, int d) {
    std::uniform_real_distribution<double> u(0.3, 1.0);
    std::bernoulli_distribution one(0.2);
    std::vector<double> p(static_cast<std::size_t>(d));
    for (auto& x : p) {
        x = one(rng) ? 1.0 : std::round(u(rng) * 100.0) / 100.0;
    }
    return p;
}

// 1 ------------------------------------------------------------------------

CriterionResult word_counts(Context&) {
    CriterionResult r{1, "word-count identity", false, {}, {}, 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    struct Case { int d, k; std::uint64_t expected; };
    const Case cases[] = {{2, 2, 2}, {2, 4, 8}, {2, 6, 40}, {3, 2, 3}, {3, 4, 18}};
    bool all = true;
    std::string counts;
    json rows = json::array();
    for (const auto& c : cases) {
        const auto got = enumerate_classes(c.k, c.k / 2 + c.d, c.d).size();
        const auto formula = catalan(static_cast<unsigned>(c.k / 2)) *
                             static_cast<std::uint64_t>(std::pow(c.d, c.k / 2));
        const bool ok = got == c.expected && formula == c.expected;
        all = all && ok;
        counts += (counts.empty() ? "" : ",") + std::to_string(got);
        rows.push_back({{"d", c.d}, {"k", c.k}, {"enumerated", got}, {"expected", c.expected}});
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = all && secs < kWordRuntimeLimit;
    r.detail = "counts " + counts + " (expected 2,8,40,3,18), " + fmt(secs, 3) + " s";
    r.metrics = {{"rows", rows}, {"runtime_s", secs}};
    return r;
}

// 2 ------------------------------------------------------------------------

CriterionResult support_cardinality(Context&) {
    CriterionResult r{2, "support-cardinality identity", false, {}, {}, 0.0};
    const std::pair<int, int> cases[] = {{2, 2}, {2, 4}, {2, 6}, {3, 2}, {3, 4}};
    std::size_t checked = 0, failed = 0;
    for (const auto& [d, k] : cases) {
        for (const auto& wc : enumerate_classes(k, k / 2 + d, d)) {
            for (int u = 1; u <= d; ++u) {
                ++checked;
                failed += supp_cardinality_check(wc, u) ? 0 : 1;
            }
        }
    }
    r.passed = failed == 0 && checked > 0;
    r.detail = std::to_string(checked) + " (class, u) checks, " + std::to_string(failed) + " mismatches";
    r.metrics = {{"checked", checked}, {"failed", failed}};
    return r;
}

// 3 ------------------------------------------------------------------------

std::vector<double> padded(std::vector<double> eigs, std::size_t dim) {
    eigs.resize(dim, 0.0);
    std::sort(eigs.begin(), eigs.end());
    return eigs;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        return std::numeric_limits<double>::infinity();
    }
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

CriterionResult structural(Context& ctx) {
    CriterionResult r{3, "structural identities", false, {}, {}, 0.0};
    std::mt19937_64 rng(kInstanceSeed);
    std::size_t fail_laplacian = 0, fail_hadamard = 0, fail_product = 0, fail_centered = 0,
                fail_signed = 0, fail_eigs = 0;
    double worst_centered = 0.0, worst_eigs = 0.0;
    EigenOptions full;
    full.deflate_zero_rows = false;
    for (int t = 0; t < kStructuralInstances; ++t) {
        const int d = t % 2 ? 3 : 2;
        const auto n = static_cast<std::uint32_t>(std::uniform_int_distribution<int>(d + 2, 10)(rng));
        const auto p = random_probs(rng, d);
        const ComplexView view(OutcomeOracle(p, rng()), n, Model::lower);

        const auto signed_restricted = restricted(view, true);
        const auto parts = boundary_and_laplacian(view);
        if (max_abs_difference(signed_restricted.matrix, degree_minus_laplacian(parts)) != 0.0) {
            ++fail_laplacian;
        }

        const auto ext = extended_adjacency(view, false);
        SymMatrix chain = hadamard_factor(view, 1).matrix;
        for (int j = 2; j <= d; ++j) {
            chain = hadamard(chain, hadamard_factor(view, j).matrix);
        }
        fail_hadamard += max_abs_difference(ext.matrix, chain) != 0.0 ? 1 : 0;
        fail_product += max_abs_difference(ext.matrix, extended_unsigned(view).matrix) != 0.0 ? 1 : 0;

        const double gap = max_abs_difference(
            ext.matrix, add(centered(view, false).matrix, centered_shift(view, false).matrix));
        worst_centered = std::max(worst_centered, gap);
        fail_centered += gap > kFloatIdentityTol ? 1 : 0;

        const auto ext_signed = extended_adjacency(view, true);
        fail_signed += max_abs_difference(ext_signed.matrix,
                                          hadamard(sign_matrix(n, d).matrix, ext.matrix)) != 0.0
                           ? 1
                           : 0;

        double g = 0.0;
        for (bool s : {false, true}) {
            const auto& big = s ? ext_signed : ext;
            const auto small = restricted(view, s);
            const auto eb = ctx.audit.solve(big.matrix, full);
            const auto es = padded(ctx.audit.solve(small.matrix, full), big.dim());
            g = std::max(g, max_gap(eb, es));
        }
        worst_eigs = std::max(worst_eigs, g);
        fail_eigs += g > kEigenMultisetTol ? 1 : 0;
    }
    const std::size_t total =
        fail_laplacian + fail_hadamard + fail_product + fail_centered + fail_signed + fail_eigs;
    r.passed = total == 0;
    r.detail = std::to_string(kStructuralInstances) + " instances; failures: A+=D-L " +
               std::to_string(fail_laplacian) + ", hadamard " + std::to_string(fail_hadamard) +
               ", product " + std::to_string(fail_product) + ", B+shift " +
               std::to_string(fail_centered) + ", sign " + std::to_string(fail_signed) +
               ", padded eigs " + std::to_string(fail_eigs) + " (max gap " + fmt(worst_eigs, 3) + ")";
    r.metrics = {{"instances", kStructuralInstances},
                 {"fail_laplacian", fail_laplacian},
                 {"fail_hadamard", fail_hadamard},
                 {"fail_product", fail_product},
                 {"fail_centered", fail_centered},
                 {"fail_signed", fail_signed},
                 {"fail_eigs", fail_eigs},
                 {"worst_centered_gap", worst_centered},
                 {"worst_eig_gap", worst_eigs}};
    return r;
}

// 4 ------------------------------------------------------------------------

CriterionResult upper_identity(Context&) {
    CriterionResult r{4, "upper-model identity", false, {}, {}, 0.0};
    std::mt19937_64 rng(kInstanceSeed + 1);
    std::size_t failed = 0;
    for (int t = 0; t < kStructuralInstances; ++t) {
        const int d = t % 2 ? 3 : 2;
        const auto n = static_cast<std::uint32_t>(std::uniform_int_distribution<int>(d + 2, 10)(rng));
        const auto p = random_probs(rng, d);
        const ComplexView view(OutcomeOracle(p, rng()), n, Model::upper);
        if (max_abs_difference(extended_adjacency(view, false).matrix,
                               hadamard_factor(view, d).matrix) != 0.0) {
            ++failed;
        }
    }
    r.passed = failed == 0;
    r.detail = std::to_string(kStructuralInstances) + " instances, " + std::to_string(failed) +
               " mismatches";
    r.metrics = {{"instances", kStructuralInstances}, {"failed", failed}};
    return r;
}

// 5 ------------------------------------------------------------------------

CriterionResult concentration(Context&) {
    CriterionResult r{5, "cell-count concentration", false, {}, {}, 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint32_t n = 300;
    const std::vector<double> p{0.8, 0.5};
    const std::size_t seeds = 20;
    double sum = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) {
        const ComplexView view(OutcomeOracle(p, s), n, Model::lower);
        sum += static_cast<double>(view.count_cells(1)) / static_cast<double>(binomial(n, 2));
    }
    const double mean = sum / static_cast<double>(seeds);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.passed = std::abs(mean - 0.8) <= kConcentrationTol && secs < kConcentrationRuntimeLimit;
    r.detail = "mean f_1/C(300,2) = " + fmt(mean) + " (target 0.8 +- " + fmt(kConcentrationTol) +
               "), " + fmt(secs, 3) + " s";
    r.metrics = {{"mean", mean}, {"seeds", seeds}, {"runtime_s", secs}};
    return r;
}

// 6 ------------------------------------------------------------------------

ExperimentConfig batch(std::uint32_t n, std::vector<double> p, MatrixKind kind, std::size_t seeds,
                       const Context& ctx) {
    ExperimentConfig c;
    c.n = {n};
    c.d = 2;
    c.p = std::move(p);
    c.matrix = kind;
    c.normalize = true;
    c.realizations = seeds;
    c.seed = 0;
    c.moments = 4;
    c.workers = ctx.opts.workers;
    return c;
}

CriterionResult moment_prediction(Context& ctx) {
    CriterionResult r{6, "moment prediction", false, {}, {}, 0.0};
    const auto config = batch(40, {0.8, 0.7}, MatrixKind::centered, kMomentSeeds, ctx);
    const Report report = run(config);
    ctx.audit.record(report);
    const Aggregate& a = report.aggregates.front();
    const ModelParams params = config.params(40, 0);
    const double pred2 = predicted_moment(2, params);
    const double pred4 = predicted_moment(4, params);
    const double m2 = a.mean_moments[1], se2 = a.stderr_moments[1];
    const double m4 = a.mean_moments[3], se4 = a.stderr_moments[3];
    const bool ok2 = std::abs(m2 - pred2) <= kStderrMultiple * se2;
    const bool ok4 = std::abs(m4 - pred4) <= kStderrMultiple * se4;
    const double all4 = exact_expected_moment(4, params);
    r.passed = ok2 && ok4;
    r.detail = "m2 = " + fmt(m2) + " +- " + fmt(se2, 3) + " vs " + fmt(pred2) + (ok2 ? " ok" : " FAIL") +
               "; m4 = " + fmt(m4) + " +- " + fmt(se4, 3) + " vs " + fmt(pred4) +
               (ok4 ? " ok" : " FAIL") + " (all classes: " + fmt(all4) + ")";
    r.metrics = {{"m2", m2},
                 {"m2_stderr", se2},
                 {"predicted_m2", pred2},
                 {"m4", m4},
                 {"m4_stderr", se4},
                 {"predicted_m4", pred4},
                 {"all_class_m2", exact_expected_moment(2, params)},
                 {"all_class_m4", all4},
                 {"seeds", kMomentSeeds}};
    return r;
}

// 7 ------------------------------------------------------------------------

CriterionResult tensor_convergence(Context& ctx) {
    CriterionResult r{7, "tensor-law convergence", false, {}, {}, 0.0};
    const auto config = batch(80, {0.8, 0.5}, MatrixKind::centered, kTensorSeeds, ctx);
    const Report report = run(config);
    ctx.audit.record(report);
    const Aggregate& a = report.aggregates.front();
    std::vector<double> ks;
    for (const auto& row : report.realizations) {
        ks.push_back(ks_distance(esd(row.eigenvalues, row.dim), ReferenceLaw::tensor(0.8)));
    }
    const double ks_med = median(ks);
    const double m2 = a.mean_moments[1], m4 = a.mean_moments[3];
    const bool ok2 = std::abs(m2 - 0.8) <= kTensorM2Tol;
    const bool ok4 = std::abs(m4 - 1.6) <= kTensorM4Tol;
    const bool okks = ks_med <= kTensorKsLimit;
    r.passed = ok2 && ok4 && okks && report.realizations.front().dim == 3160;
    r.detail = "dim " + std::to_string(report.realizations.front().dim) + ", m2 = " + fmt(m2) +
               " (0.8 +- 0.08), m4 = " + fmt(m4) + " (1.6 +- 0.24), median KS = " + fmt(ks_med) +
               " (<= 0.1)";
    r.metrics = {{"m2", m2}, {"m4", m4}, {"median_ks", ks_med}, {"seeds", kTensorSeeds}};
    return r;
}

// 8 ------------------------------------------------------------------------

CriterionResult semicircle_regime(Context& ctx) {
    CriterionResult r{8, "semicircle for the normalized adjacency", false, {}, {}, 0.0};
    const std::vector<double> p{0.9, 0.25};
    std::vector<double> medians;
    double m2 = 0.0, m4 = 0.0;
    for (std::uint32_t n : {20u, 40u, 80u}) {
        const auto config = batch(n, p, MatrixKind::unsigned_adj, kSemicircleSeeds, ctx);
        const Report report = run(config);
        ctx.audit.record(report);
        medians.push_back(report.aggregates.front().median_ks_semicircle);
        if (n == 80) {
            m2 = report.aggregates.front().mean_moments[1];
            m4 = report.aggregates.front().mean_moments[3];
        }
    }
    const bool ok2 = std::abs(m2 - 1.0) <= kSemicircleM2Tol;
    const bool ok4 = std::abs(m4 - 2.0) <= kSemicircleM4Tol;
    const bool decreasing = medians[0] > medians[1] && medians[1] > medians[2];
    r.passed = ok2 && ok4 && decreasing;
    r.detail = "n=80: m2 = " + fmt(m2) + " (1 +- 0.1)" + (ok2 ? "" : " FAIL") + ", m4 = " + fmt(m4) +
               " (2 +- 0.3)" + (ok4 ? "" : " FAIL") + "; median KS n=20,40,80: " +
               fmt(medians[0], 4) + ", " + fmt(medians[1], 4) + ", " + fmt(medians[2], 4) +
               (decreasing ? " decreasing" : " not decreasing");
    r.metrics = {{"m2", m2}, {"m4", m4}, {"median_ks", medians}, {"seeds", kSemicircleSeeds}};
    return r;
}

// 9 ------------------------------------------------------------------------

CriterionResult maximal_cells(Context&) {
    CriterionResult r{9, "maximal-cell vanishing", false, {}, {}, 0.0};
    std::size_t nonzero = 0;
    for (std::size_t s = 0; s < kMaximalSeeds; ++s) {
        const ComplexView view(OutcomeOracle({0.9, 0.9}, s), 100, Model::lower);
        nonzero += count_maximal(view) != 0 ? 1 : 0;
    }
    const ModelParams params{50, 2, {1.0, 0.08}, 0};
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t s = 0; s < kMaximalMeanSeeds; ++s) {
        const ComplexView view(OutcomeOracle(params.p, s), params.n, Model::lower);
        const auto c = static_cast<double>(count_maximal(view));
        sum += c;
        sumsq += c * c;
    }
    const double cnt = static_cast<double>(kMaximalMeanSeeds);
    const double mean = sum / cnt;
    const double se = std::sqrt(std::max(0.0, (sumsq - cnt * mean * mean) / (cnt - 1.0)) / cnt);
    const double expected = expected_maximal(params);
    const bool ok_mean = std::abs(mean - expected) <= kStderrMultiple * se;
    r.passed = nonzero == 0 && ok_mean;
    r.detail = "runs with N_1 > 0 at n=100: " + std::to_string(nonzero) + "/" +
               std::to_string(kMaximalSeeds) + "; n=50 mean N_1 = " + fmt(mean) + " +- " + fmt(se, 3) +
               " vs expected " + fmt(expected);
    r.metrics = {{"nonzero_runs", nonzero}, {"mean", mean}, {"stderr", se}, {"expected", expected}};
    return r;
}

// 10 -----------------------------------------------------------------------

SymMatrix random_symmetric(std::mt19937_64& rng, std::size_t dim, double density, double sigma) {
    std::bernoulli_distribution keep(density);
    std::normal_distribution<double> g(0.0, sigma);
    std::vector<MatrixEntry> entries;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j) {
            if (!keep(rng)) {
                continue;
            }
            const double v = g(rng);
            entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), v});
            if (i != j) {
                entries.push_back({static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(i), v});
            }
        }
    }
    return SymMatrix::from_entries(dim, std::move(entries));
}

CriterionResult sandwich(Context&) {
    CriterionResult r{10, "perturbation sandwich", false, {}, {}, 0.0};
    std::mt19937_64 rng(kInstanceSeed + 10);
    std::uniform_real_distribution<double> lam(-3.0, 3.0), eps(0.02, 1.0), scale(1.0, 40.0),
        sigma(0.01, 2.0), density(0.05, 0.5);
    std::size_t failures = 0;
    for (int t = 0; t < kSandwichInstances; ++t) {
        const SymMatrix a = random_symmetric(rng, kSandwichDim, density(rng), 1.0);
        const SymMatrix b = random_symmetric(rng, kSandwichDim, density(rng), sigma(rng));
        const double s = scale(rng);
        if (!perturbation_sandwich_check(a, b, lam(rng) , eps(rng), s)) {
            ++failures;
        }
    }
    r.passed = failures == 0;
    r.detail = std::to_string(kSandwichInstances) + " instances at dim " +
               std::to_string(kSandwichDim) + ", " + std::to_string(failures) + " failures";
    r.metrics = {{"instances", kSandwichInstances}, {"failures", failures}};
    return r;
}

// 11 -----------------------------------------------------------------------

CriterionResult eigensolver_health(Context& ctx) {
    CriterionResult r{11, "eigensolver health", false, {}, {}, 0.0};
    std::mt19937_64 rng(kInstanceSeed + 11);
    const SymMatrix m =
        random_symmetric(rng, kProbeDim, 0.05, 1.0 / std::sqrt(0.05 * static_cast<double>(kProbeDim)));
    const auto eigs = ctx.audit.solve(m);
    const auto exact = empirical_moments(eigs, kProbeOrder, kProbeDim);
    const MomentEstimate est = trace_moments(m, kProbeOrder, kProbes, kInstanceSeed);
    std::size_t outside = 0;
    json rows = json::array();
    for (std::size_t k = 0; k < exact.size(); ++k) {
        const double tol = kStderrMultiple * est.stderr_[k] + kProbeFloor * std::max(1.0, std::abs(exact[k]));
        const bool ok = std::abs(est.mean[k] - exact[k]) <= tol;
        outside += ok ? 0 : 1;
        rows.push_back({{"k", k + 1}, {"eig", exact[k]}, {"probe", est.mean[k]}, {"stderr", est.stderr_[k]}});
    }

    const SymMatrix small = random_symmetric(rng, 200, 0.1, 1.0);
    const EigenPairs pairs = eigen_decompose(small);
    ctx.audit.record(check_trace_identities(small, pairs.values, kTraceIdentityTol));
    const double residual = max_residual(small, pairs);
    const double residual_limit = kResidualTol * std::sqrt(small.frobenius_sq());

    r.passed = ctx.audit.failures == 0 && outside == 0 && residual <= residual_limit;
    r.detail = "trace identities " + std::to_string(ctx.audit.solves - ctx.audit.failures) + "/" +
               std::to_string(ctx.audit.solves) + " solves; probe moments outside 3 stderr: " +
               std::to_string(outside) + "/" + std::to_string(kProbeOrder) + "; max residual " +
               fmt(residual, 3);
    r.metrics = {{"solves", ctx.audit.solves},
                 {"trace_failures", ctx.audit.failures},
                 {"worst_sum_error", ctx.audit.worst_sum},
                 {"worst_sumsq_error", ctx.audit.worst_sumsq},
                 {"probe_rows", rows},
                 {"max_residual", residual}};
    return r;
}

// 12 -----------------------------------------------------------------------

std::string read_file(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

CriterionResult determinism(Context& ctx) {
    CriterionResult r{12, "determinism", false, {}, {}, 0.0};
    std::filesystem::path base = ctx.opts.scratch_dir.empty()
                                     ? std::filesystem::temp_directory_path() /
                                           ("rsc-acceptance-" + std::to_string(::getpid()))
                                     : std::filesystem::path(ctx.opts.scratch_dir);
    auto config = batch(30, {0.8, 0.7}, MatrixKind::centered, 4, ctx);
    config.seed = 7;
    config.formats = {"csv"};
    config.out_dir = (base / "a").string();
    config.workers = 1;
    run(config);
    config.out_dir = (base / "b").string();
    config.workers = 2;
    run(config);
    const std::string a = read_file(base / "a" / "eigenvalues.csv");
    const std::string b = read_file(base / "b" / "eigenvalues.csv");
    if (ctx.opts.scratch_dir.empty()) {
        std::error_code ec;
        std::filesystem::remove_all(base, ec);
    }
    r.passed = !a.empty() && a == b;
    r.detail = "eigenvalues.csv " + std::to_string(a.size()) + " bytes, " +
               (a == b ? "identical" : "different") + " across two runs";
    r.metrics = {{"bytes", a.size()}, {"identical", a == b}};
    return r;
}

} // namespace

std::vector<CriterionResult> run_acceptance(
    const AcceptanceOptions& opts, const std::function<void(const CriterionResult&)>& on_result) {
    using Fn = CriterionResult (*)(Context&);
    const Fn table[kCriterionCount] = {word_counts,       support_cardinality, structural,
                                       upper_identity,    concentration,       moment_prediction,
                                       tensor_convergence, semicircle_regime,  maximal_cells,
                                       sandwich,          eigensolver_health,  determinism};
    for (int id : opts.only) {
        if (id < 1 || id > kCriterionCount) {
            throw InvalidArgument("no acceptance criterion " + std::to_string(id));
        }
    }
    Context ctx{opts, {}};
    std::vector<CriterionResult> results;
    for (int id = 1; id <= kCriterionCount; ++id) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), id) == opts.only.end()) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        CriterionResult res;
        try {
            res = table[id - 1](ctx);
        } catch (const std::exception& e) {
            res.id = id;
            res.name = "criterion " + std::to_string(id);
            res.passed = false;
            res.detail = std::string("error: ") + e.what();
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on_result) {
            on_result(res);
        }
        results.push_back(std::move(res));
    }
    return results;
}

std::string format_result_line(const CriterionResult& r) {
    char head[96];
    std::snprintf(head, sizeof head, "%s [%2d] %s: ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str());
    return std::string(head) + r.detail + " (" + fmt(r.seconds, 3) + " s)";
}

json acceptance_json(const std::vector<CriterionResult>& results) {
    json rows = json::array();
    bool all = true;
    for (const auto& r : results) {
        all = all && r.passed;
        rows.push_back({{"id", r.id},
                        {"name", r.name},
                        {"passed", r.passed},
                        {"detail", r.detail},
                        {"seconds", r.seconds},
                        {"metrics", r.metrics}});
    }
    return json{{"all_passed", all}, {"criteria", rows}};
}

} // namespace rsc
