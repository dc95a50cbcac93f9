#include "rsc/spectra.hpp"

#include "rsc/error.hpp"

#include <Eigen/Dense>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace rsc {

namespace {

void run_dsyevd(std::vector<double>& a, std::size_t dim, std::vector<double>& w) {
    w.assign(dim, 0.0);
    if (dim == 0) {
        return;
    }
    const auto n = static_cast<lapack_int>(dim);
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, a.data(), n, w.data());
    if (info != 0) {
        throw std::runtime_error("dsyevd failed with info = " + std::to_string(info));
    }
}

} // namespace

std::vector<double> eigenvalues_dense(std::vector<double> a, std::size_t dim) {
    if (a.size() != dim * dim) {
        throw InvalidArgument("dense matrix storage does not match its dimension");
    }
    std::vector<double> w;
    run_dsyevd(a, dim, w);
    return w;
}

std::vector<double> eigenvalues_sym(const SymMatrix& m, const EigenOptions& opts) {
    const std::size_t dim = m.dim();
    std::vector<std::int64_t> keep(dim, 0);
    std::size_t kept = 0;
    for (std::size_t r = 0; r < dim; ++r) {
        const bool nonzero = m.row_ptr()[r + 1] > m.row_ptr()[r];
        if (nonzero || !opts.deflate_zero_rows) {
            keep[r] = static_cast<std::int64_t>(kept++);
        } else {
            keep[r] = -1;
        }
    }
    if (kept > opts.dense_cutoff) {
        throw TooLarge("dense eigensolve of dimension " + std::to_string(kept) +
                       " exceeds the cutoff " + std::to_string(opts.dense_cutoff) +
                       "; use trace_moments for moment estimates at this size");
    }
    std::vector<double> a(kept * kept, 0.0);
    m.for_each([&](std::size_t r, std::size_t c, double v) {
        a[static_cast<std::size_t>(keep[c]) * kept + static_cast<std::size_t>(keep[r])] = v;
    });
    std::vector<double> w = eigenvalues_dense(std::move(a), kept);
    w.resize(dim, 0.0);
    std::sort(w.begin(), w.end());
    return w;
}

EigenPairs eigen_decompose(const SymMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.dim());
    std::vector<double> dense = m.to_dense();
    const Eigen::Map<const Eigen::MatrixXd> a(dense.data(), n, n);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("symmetric eigendecomposition did not converge");
    }
    EigenPairs out;
    out.values.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    out.vectors.assign(solver.eigenvectors().data(), solver.eigenvectors().data() + n * n);
    return out;
}

double max_residual(const SymMatrix& m, const EigenPairs& pairs) {
    const std::size_t dim = m.dim();
    std::vector<double> y(dim);
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs.values.size(); ++i) {
        std::span<const double> v(pairs.vectors.data() + i * dim, dim);
        m.multiply(v, y);
        double s = 0.0;
        for (std::size_t r = 0; r < dim; ++r) {
            const double e = y[r] - pairs.values[i] * v[r];
            s += e * e;
        }
        worst = std::max(worst, std::sqrt(s));
    }
    return worst;
}

TraceIdentityCheck check_trace_identities(const SymMatrix& m, const std::vector<double>& eigs,
                                          double tol) {
    TraceIdentityCheck out;
    double sum = 0.0, sumsq = 0.0;
    for (double l : eigs) {
        sum += l;
        sumsq += l * l;
    }
    const double fro = m.frobenius_sq();
    out.sum_error = std::abs(sum - m.trace());
    out.sumsq_error = std::abs(sumsq - fro) / std::max(1.0, fro);
    const double sum_tol = tol * static_cast<double>(std::max<std::size_t>(1, m.dim())) *
                           std::max(1.0, m.max_abs());
    out.ok = eigs.size() == m.dim() && out.sum_error <= sum_tol && out.sumsq_error <= tol;
    return out;
}

// ---------------------------------------------------------------------------
// Empirical distributions

StepCdf::StepCdf(std::vector<double> eigs, std::size_t scale_dim)
    : eigs_(std::move(eigs)), scale_dim_(scale_dim) {
    if (scale_dim_ == 0) {
        throw InvalidArgument("an ESD needs a positive dimension");
    }
    if (scale_dim_ < eigs_.size()) {
        throw InvalidArgument("scale dimension is smaller than the number of eigenvalues");
    }
    std::sort(eigs_.begin(), eigs_.end());
    padding_ = scale_dim_ - eigs_.size();
}

double StepCdf::operator()(double x) const {
    const auto below = std::upper_bound(eigs_.begin(), eigs_.end(), x) - eigs_.begin();
    const auto pad = x >= 0.0 ? padding_ : 0;
    return static_cast<double>(static_cast<std::size_t>(below) + pad) /
           static_cast<double>(scale_dim_);
}

double StepCdf::left_limit(double x) const {
    const auto below = std::lower_bound(eigs_.begin(), eigs_.end(), x) - eigs_.begin();
    const auto pad = x > 0.0 ? padding_ : 0;
    return static_cast<double>(static_cast<std::size_t>(below) + pad) /
           static_cast<double>(scale_dim_);
}

std::vector<double> StepCdf::jumps() const {
    std::vector<double> j = eigs_;
    if (padding_ > 0) {
        j.push_back(0.0);
        std::sort(j.begin(), j.end());
    }
    j.erase(std::unique(j.begin(), j.end()), j.end());
    return j;
}

StepCdf esd(std::vector<double> eigs, std::size_t scale_dim) {
    return StepCdf(std::move(eigs), scale_dim);
}

std::vector<double> empirical_moments(const std::vector<double>& eigs, int K, std::size_t scale_dim) {
    if (K < 1) {
        throw InvalidArgument("moment order must be at least 1");
    }
    if (scale_dim == 0) {
        throw InvalidArgument("moments need a positive dimension");
    }
    std::vector<double> m(static_cast<std::size_t>(K), 0.0);
    for (double l : eigs) {
        double pw = 1.0;
        for (int k = 0; k < K; ++k) {
            pw *= l;
            m[static_cast<std::size_t>(k)] += pw;
        }
    }
    for (double& v : m) {
        v /= static_cast<double>(scale_dim);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Reference laws

std::uint64_t catalan(unsigned m) {
    return binomial(2 * m, m) / (m + 1);
}

double semicircle_cdf(double x) {
    if (x <= -2.0) {
        return 0.0;
    }
    if (x >= 2.0) {
        return 1.0;
    }
    return 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
           std::asin(x / 2.0) / std::numbers::pi;
}

double semicircle_density(double x) {
    if (std::abs(x) >= 2.0) {
        return 0.0;
    }
    return std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
}

double semicircle_moment(int k) {
    if (k < 0) {
        throw InvalidArgument("moment order must be nonnegative");
    }
    return k % 2 ? 0.0 : static_cast<double>(catalan(static_cast<unsigned>(k / 2)));
}

namespace {

void check_c(double c) {
    if (!(c > 0.0 && c <= 1.0)) {
        throw InvalidArgument("tensor law weight c = " + std::to_string(c) + " is outside (0, 1]");
    }
}

} // namespace

double tensor_law_cdf(double c, double x) {
    check_c(c);
    return c * semicircle_cdf(x) + (x >= 0.0 ? 1.0 - c : 0.0);
}

double tensor_law_moment(double c, int k) {
    check_c(c);
    return c * semicircle_moment(k);
}

ReferenceLaw ReferenceLaw::semicircle() {
    return {Kind::semicircle, 1.0, 0.0};
}

ReferenceLaw ReferenceLaw::tensor(double c) {
    check_c(c);
    return {Kind::tensor, c, 0.0};
}

ReferenceLaw ReferenceLaw::point_mass(double at) {
    return {Kind::point_mass, 0.0, at};
}

double ReferenceLaw::cdf(double x) const {
    switch (kind_) {
    case Kind::semicircle: return semicircle_cdf(x);
    case Kind::tensor: return tensor_law_cdf(c_, x);
    case Kind::point_mass: return x >= at_ ? 1.0 : 0.0;
    }
    return 0.0;
}

double ReferenceLaw::left_limit(double x) const {
    switch (kind_) {
    case Kind::semicircle: return semicircle_cdf(x);
    case Kind::tensor: return c_ * semicircle_cdf(x) + (x > 0.0 ? 1.0 - c_ : 0.0);
    case Kind::point_mass: return x > at_ ? 1.0 : 0.0;
    }
    return 0.0;
}

std::vector<double> ReferenceLaw::jumps() const {
    switch (kind_) {
    case Kind::semicircle: return {};
    case Kind::tensor: return c_ < 1.0 ? std::vector<double>{0.0} : std::vector<double>{};
    case Kind::point_mass: return {at_};
    }
    return {};
}

double ReferenceLaw::moment(int k) const {
    switch (kind_) {
    case Kind::semicircle: return semicircle_moment(k);
    case Kind::tensor: return tensor_law_moment(c_, k);
    case Kind::point_mass: return std::pow(at_, k);
    }
    return 0.0;
}

std::string ReferenceLaw::name() const {
    switch (kind_) {
    case Kind::semicircle: return "semicircle";
    case Kind::tensor: return "tensor(c=" + std::to_string(c_) + ")";
    case Kind::point_mass: return "point_mass(" + std::to_string(at_) + ")";
    }
    return "unknown";
}

namespace {

template <typename F, typename G>
double sup_distance(const F& f, const G& g, std::vector<double> points) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    double d = 0.0;
    for (double x : points) {
        d = std::max(d, std::abs(f(x) - g(x)));
        d = std::max(d, std::abs(f.left_limit(x) - g.left_limit(x)));
    }
    return d;
}

struct LawAdapter {
    const ReferenceLaw& law;
    double operator()(double x) const { return law.cdf(x); }
    double left_limit(double x) const { return law.left_limit(x); }
};

} // namespace

double ks_distance(const StepCdf& f, const ReferenceLaw& ref) {
    auto points = f.jumps();
    for (double x : ref.jumps()) {
        points.push_back(x);
    }
    if (points.empty()) {
        return 0.0;
    }
    return sup_distance(f, LawAdapter{ref}, std::move(points));
}

double ks_distance(const StepCdf& f, const StepCdf& g) {
    auto points = f.jumps();
    for (double x : g.jumps()) {
        points.push_back(x);
    }
    return sup_distance(f, g, std::move(points));
}

// ---------------------------------------------------------------------------
// Trace moments

namespace {

constexpr int kMaxMomentOrder = 12;

void check_order(int K) {
    if (K < 1 || K > kMaxMomentOrder) {
        throw InvalidArgument("moment order must lie in [1, " + std::to_string(kMaxMomentOrder) + "]");
    }
}

/// Adds z^t M^k z for k = 1..K to acc.
void probe_powers(const SymMatrix& m, const std::vector<double>& z, int K, std::vector<double>& v,
                  std::vector<double>& w, std::vector<double>& acc) {
    v = z;
    for (int k = 0; k < K; ++k) {
        m.multiply(v, w);
        std::swap(v, w);
        double dot = 0.0;
        for (std::size_t i = 0; i < z.size(); ++i) {
            dot += z[i] * v[i];
        }
        acc[static_cast<std::size_t>(k)] = dot;
    }
}

} // namespace

MomentEstimate trace_moments(const SymMatrix& m, int K, std::size_t probes, std::uint64_t seed) {
    check_order(K);
    if (probes < 1) {
        throw InvalidArgument("at least one probe is required");
    }
    const std::size_t dim = m.dim();
    const auto k = static_cast<std::size_t>(K);
    MomentEstimate out;
    out.probes = probes;
    out.mean.assign(k, 0.0);
    out.stderr_.assign(k, 0.0);
    if (dim == 0) {
        return out;
    }
    std::mt19937_64 rng(seed);
    std::vector<double> z(dim), v, w(dim), sample(k), sumsq(k, 0.0);
    for (std::size_t p = 0; p < probes; ++p) {
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            if (i % 64 == 0) {
                bits = rng();
            }
            z[i] = (bits >> (i % 64)) & 1 ? 1.0 : -1.0;
        }
        probe_powers(m, z, K, v, w, sample);
        for (std::size_t t = 0; t < k; ++t) {
            const double s = sample[t] / static_cast<double>(dim);
            out.mean[t] += s;
            sumsq[t] += s * s;
        }
    }
    const double np = static_cast<double>(probes);
    for (std::size_t t = 0; t < k; ++t) {
        out.mean[t] /= np;
        if (probes > 1) {
            const double var = std::max(0.0, (sumsq[t] - np * out.mean[t] * out.mean[t]) / (np - 1.0));
            out.stderr_[t] = std::sqrt(var / np);
        } else {
            out.stderr_[t] = std::numeric_limits<double>::infinity();
        }
    }
    return out;
}

MomentEstimate exact_trace_moments(const SymMatrix& m, int K) {
    check_order(K);
    const std::size_t dim = m.dim();
    const auto k = static_cast<std::size_t>(K);
    MomentEstimate out;
    out.exact = true;
    out.probes = dim;
    out.mean.assign(k, 0.0);
    out.stderr_.assign(k, 0.0);
    if (dim == 0) {
        return out;
    }
    std::vector<double> z(dim, 0.0), v, w(dim), sample(k);
    for (std::size_t i = 0; i < dim; ++i) {
        z[i] = 1.0;
        probe_powers(m, z, K, v, w, sample);
        for (std::size_t t = 0; t < k; ++t) {
            out.mean[t] += sample[t];
        }
        z[i] = 0.0;
    }
    for (double& x : out.mean) {
        x /= static_cast<double>(dim);
    }
    return out;
}

// ---------------------------------------------------------------------------

bool perturbation_sandwich_check(const SymMatrix& a, const SymMatrix& b, double lambda, double eps,
                                 double scale) {
    if (a.dim() != b.dim()) {
        throw InvalidArgument("perturbation check needs matrices of equal dimension");
    }
    if (!(eps > 0.0) || !(scale > 0.0)) {
        throw InvalidArgument("eps and scale must be positive");
    }
    const std::size_t n = a.dim();
    if (n == 0) {
        return true;
    }
    const double s = std::sqrt(scale);
    const double nd = static_cast<double>(n);
    auto la = eigenvalues_sym(a);
    auto lab = eigenvalues_sym(add(a, b));
    for (double& x : la) {
        x /= s;
    }
    for (double& x : lab) {
        x /= s;
    }
    auto mass_below = [&](const std::vector<double>& eigs, double x) {
        return static_cast<double>(std::lower_bound(eigs.begin(), eigs.end(), x) - eigs.begin()) / nd;
    };
    const double shift = eps * std::sqrt(nd / scale);
    const double slack = b.frobenius_sq() / (eps * eps * nd * nd);
    const double mid = mass_below(lab, lambda);
    const bool upper = mid <= mass_below(la, lambda + shift) + slack;
    const bool lower = mid >= mass_below(la, lambda - shift) - slack;
    return upper && lower;
}

double Histogram::density(std::size_t i) const {
    if (total == 0) {
        return 0.0;
    }
    return static_cast<double>(counts[i]) / (static_cast<double>(total) * width(i));
}

Histogram make_histogram(const std::vector<double>& eigs, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) {
        throw InvalidArgument("histogram needs at least one bin and hi > lo");
    }
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    h.counts.assign(bins, 0);
    h.total = eigs.size();
    const double width = (hi - lo) / static_cast<double>(bins);
    for (double x : eigs) {
        if (x < lo || x > hi) {
            continue;
        }
        auto i = static_cast<std::size_t>((x - lo) / width);
        h.counts[std::min(i, bins - 1)] += 1;
    }
    return h;
}

SpectralSummary summarize(const SymMatrixView& m, int K, const EigenOptions& opts) {
    SpectralSummary s;
    s.label = m.label;
    s.dim = m.dim();
    s.eigenvalues = eigenvalues_sym(m.matrix, opts);
    if (s.dim > 0) {
        s.moments = empirical_moments(s.eigenvalues, K, s.dim);
    }
    s.histogram = make_histogram(s.eigenvalues);
    return s;
}

} // namespace rsc
