#pragma once

// Eigenvalues, empirical spectral distributions, reference laws, trace
// moment estimation and distances between distributions.

#include "rsc/matrices.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace rsc {

struct EigenOptions {
    /// Largest dimension (after removing zero rows) solved densely.
    std::size_t dense_cutoff = 4000;
    /// Identically zero rows contribute exact zero eigenvalues and are
    /// removed before the dense solve.
    bool deflate_zero_rows = true;
};

/// All dim eigenvalues, ascending. Throws TooLarge past the dense cutoff.
std::vector<double> eigenvalues_sym(const SymMatrix& m, const EigenOptions& opts = {});

/// Eigenvalues of a dense column-major symmetric matrix, ascending.
std::vector<double> eigenvalues_dense(std::vector<double> a, std::size_t dim);

struct EigenPairs {
    std::vector<double> values;
    /// Column-major; column i pairs with values[i].
    std::vector<double> vectors;
};

/// Full eigendecomposition, for verification on small matrices.
EigenPairs eigen_decompose(const SymMatrix& m);

/// Largest ||M v - lambda v|| over all returned pairs.
double max_residual(const SymMatrix& m, const EigenPairs& pairs);

struct TraceIdentityCheck {
    double sum_error = 0.0;    ///< |sum lambda - trace|
    double sumsq_error = 0.0;  ///< |sum lambda^2 - ||M||_F^2| / max(1, ||M||_F^2)
    bool ok = false;
};

/// Sum of eigenvalues against the trace (tolerance tol * dim * max|entry|)
/// and sum of squares against ||M||_F^2 (relative tolerance tol).
TraceIdentityCheck check_trace_identities(const SymMatrix& m, const std::vector<double>& eigs,
                                          double tol = 1e-8);

/// Right-continuous ESD of eigenvalues scaled by 1/scale_dim. When
/// scale_dim exceeds the number of eigenvalues the remainder is an atom at 0.
class StepCdf {
public:
    StepCdf(std::vector<double> eigs, std::size_t scale_dim);

    double operator()(double x) const;
    /// F(x-).
    double left_limit(double x) const;
    /// Sorted distinct jump locations.
    std::vector<double> jumps() const;

    std::size_t scale_dim() const { return scale_dim_; }
    const std::vector<double>& eigenvalues() const { return eigs_; }

private:
    std::vector<double> eigs_;
    std::size_t scale_dim_;
    std::size_t padding_;
};

StepCdf esd(std::vector<double> eigs, std::size_t scale_dim);

/// m_k = (1/scale_dim) sum lambda^k for k = 1..K.
std::vector<double> empirical_moments(const std::vector<double>& eigs, int K, std::size_t scale_dim);

std::uint64_t catalan(unsigned m);

/// CDF of the semicircle law with density sqrt(4 - x^2) / (2 pi) on [-2, 2].
double semicircle_cdf(double x);
double semicircle_density(double x);
/// 0 for odd k, catalan(k/2) for even k.
double semicircle_moment(int k);

/// c F_sc(x) + (1 - c) 1{x >= 0}; throws InvalidArgument unless 0 < c <= 1.
double tensor_law_cdf(double c, double x);
double tensor_law_moment(double c, int k);

class ReferenceLaw {
public:
    enum class Kind { semicircle, tensor, point_mass };

    static ReferenceLaw semicircle();
    static ReferenceLaw tensor(double c);
    static ReferenceLaw point_mass(double at);

    Kind kind() const { return kind_; }
    double c() const { return c_; }

    double cdf(double x) const;
    double left_limit(double x) const;
    /// Locations of atoms.
    std::vector<double> jumps() const;
    double moment(int k) const;
    std::string name() const;

private:
    ReferenceLaw(Kind kind, double c, double at) : kind_(kind), c_(c), at_(at) {}

    Kind kind_;
    double c_;
    double at_;
};

/// sup_x |F(x) - G(x)| for an ESD and a reference law, evaluated on both
/// sides of every jump of either.
double ks_distance(const StepCdf& f, const ReferenceLaw& ref);
/// Same between two ESDs.
double ks_distance(const StepCdf& f, const StepCdf& g);

struct MomentEstimate {
    std::vector<double> mean;    ///< m_1..m_K
    std::vector<double> stderr_; ///< standard errors (0 in exact mode)
    std::size_t probes = 0;
    bool exact = false;
};

/// Hutchinson estimate of trace(M^k)/dim with Rademacher probes drawn from
/// a seeded generator. K <= 12, probes >= 1.
MomentEstimate trace_moments(const SymMatrix& m, int K, std::size_t probes, std::uint64_t seed);
/// Exact trace(M^k)/dim using the standard basis as probes.
MomentEstimate exact_trace_moments(const SymMatrix& m, int K);

/// True iff both one-sided perturbation inequalities hold for the ESDs of
/// (A + B)/sqrt(scale) against A/sqrt(scale), with shift
/// eps * sqrt(N / scale) and slack ||B||_F^2 / (eps^2 N^2).
bool perturbation_sandwich_check(const SymMatrix& a, const SymMatrix& b, double lambda, double eps,
                                 double scale);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;

    double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
    double density(std::size_t i) const;
};

/// Uniform bins over [lo, hi]; the last bin is closed. total counts every
/// eigenvalue, including those outside the range.
Histogram make_histogram(const std::vector<double>& eigs, std::size_t bins = 61, double lo = -2.5,
                         double hi = 2.5);

struct SpectralSummary {
    std::string label;
    std::vector<double> eigenvalues;
    std::size_t dim = 0;
    std::vector<double> moments;
    Histogram histogram;
};

SpectralSummary summarize(const SymMatrixView& m, int K = 12, const EigenOptions& opts = {});

} // namespace rsc
