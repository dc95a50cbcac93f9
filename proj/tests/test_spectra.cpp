#include "rsc/error.hpp"
#include "rsc/matrices.hpp"
#include "rsc/spectra.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rsc;

namespace {

SymMatrix diagonal(const std::vector<double>& d) {
    std::vector<MatrixEntry> e;
    for (std::size_t i = 0; i < d.size(); ++i) {
        e.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), d[i]});
    }
    return SymMatrix::from_entries(d.size(), e);
}

SymMatrix random_symmetric(std::size_t dim, double density, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution keep(density);
    std::vector<MatrixEntry> e;
    for (std::uint32_t i = 0; i < dim; ++i) {
        for (std::uint32_t j = i + 1; j < dim; ++j) {
            if (keep(rng)) {
                const double x = u(rng);
                e.push_back({i, j, x});
                e.push_back({j, i, x});
            }
        }
    }
    return SymMatrix::from_entries(dim, e);
}

double simpson(double (*f)(double), double a, double b, int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i) {
        s += f(a + i * h) * (i % 2 ? 4 : 2);
    }
    return s * h / 3;
}

} // namespace

TEST_CASE("eigenvalues of small matrices") {
    CHECK(eigenvalues_sym(diagonal({3, -1, 2})) == std::vector<double>{-1, 2, 3});
    const auto swap = SymMatrix::from_entries(2, {{0, 1, 1.0}, {1, 0, 1.0}});
    const auto e = eigenvalues_sym(swap);
    CHECK(e[0] == doctest::Approx(-1.0));
    CHECK(e[1] == doctest::Approx(1.0));
    CHECK(eigenvalues_sym(SymMatrix(4)) == std::vector<double>(4, 0.0));
}

TEST_CASE("deflation of zero rows does not change the spectrum") {
    const ComplexView v(OutcomeOracle({0.6, 0.5}, 2), 9, Model::lower);
    const auto m = extended_adjacency(v, true).matrix;
    const auto a = eigenvalues_sym(m, {4000, true});
    const auto b = eigenvalues_sym(m, {4000, false});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("dense cutoff raises TooLarge") {
    std::mt19937_64 rng(1);
    const auto m = random_symmetric(50, 0.2, rng);
    CHECK_THROWS_AS(eigenvalues_sym(m, {20, true}), TooLarge);
}

TEST_CASE("trace identities and eigenvector residuals") {
    std::mt19937_64 rng(3);
    const auto m = random_symmetric(120, 0.1, rng);
    const auto eigs = eigenvalues_sym(m);
    const auto chk = check_trace_identities(m, eigs);
    CHECK(chk.ok);
    CHECK(chk.sum_error < 1e-9);
    CHECK(chk.sumsq_error < 1e-9);
    const auto pairs = eigen_decompose(m);
    CHECK(max_residual(m, pairs) < 1e-9);
    for (std::size_t i = 0; i < eigs.size(); ++i) {
        CHECK(pairs.values[i] == doctest::Approx(eigs[i]).scale(1.0));
    }
    auto wrong = eigs;
    wrong[0] += 1.0;
    CHECK_FALSE(check_trace_identities(m, wrong).ok);
}

TEST_CASE("empirical spectral distribution") {
    const auto f = esd({-1, 1}, 2);
    CHECK(f(0) == 0.5);
    CHECK(f(1) == 1.0);
    CHECK(f(-1) == 0.5);
    CHECK(f.left_limit(-1) == 0.0);
    CHECK(f(-1.5) == 0.0);

    const auto z = esd({}, 5);
    CHECK(z(-1e-9) == 0.0);
    CHECK(z(0) == 1.0);

    const auto padded = esd({-1, 1}, 4);
    CHECK(padded(-0.5) == 0.25);
    CHECK(padded(0) == 0.75);
    CHECK(padded.jumps() == std::vector<double>{-1, 0, 1});
}

TEST_CASE("padded restricted ESD equals the extended ESD") {
    const ComplexView v(OutcomeOracle({0.7, 0.6}, 12), 7, Model::lower);
    const auto r = restricted(v, false);
    const auto e = extended_adjacency(v, false);
    const auto fr = esd(eigenvalues_sym(r.matrix), e.dim());
    const auto fe = esd(eigenvalues_sym(e.matrix), e.dim());
    CHECK(ks_distance(fr, fe) < 1e-12);
}

TEST_CASE("semicircle law") {
    CHECK(semicircle_cdf(-2) == doctest::Approx(0.0).scale(1.0));
    CHECK(semicircle_cdf(0) == doctest::Approx(0.5));
    CHECK(semicircle_cdf(2) == doctest::Approx(1.0));
    CHECK(semicircle_cdf(-5) == 0.0);
    CHECK(semicircle_cdf(5) == 1.0);
    CHECK(semicircle_moment(1) == 0.0);
    CHECK(semicircle_moment(2) == 1.0);
    CHECK(semicircle_moment(4) == 2.0);
    CHECK(semicircle_moment(6) == 5.0);
    CHECK(catalan(10) == 16796);

    // Substituting x = 2 sin(t) removes the square-root endpoint singularity.
    for (int i = 0; i < 100; ++i) {
        const double x = -2.0 + 4.0 * (i + 0.5) / 100.0;
        const double t1 = std::asin(x / 2);
        const double h = (t1 + std::numbers::pi / 2) / 2000;
        double s = 0.0;
        for (int k = 0; k <= 2000; ++k) {
            const double t = -std::numbers::pi / 2 + k * h;
            const double w = (k == 0 || k == 2000) ? 1 : (k % 2 ? 4 : 2);
            s += w * semicircle_density(2 * std::sin(t)) * 2 * std::cos(t);
        }
        CHECK(std::abs(s * h / 3 - semicircle_cdf(x)) < 1e-10);
    }
    CHECK(simpson(semicircle_density, -2, 2, 20000) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("tensor law") {
    for (double x : {-2.5, -1.0, -0.1, 0.0, 0.7, 3.0}) {
        CHECK(tensor_law_cdf(1.0, x) == doctest::Approx(semicircle_cdf(x)));
    }
    CHECK(tensor_law_moment(0.8, 2) == doctest::Approx(0.8));
    CHECK(tensor_law_moment(0.8, 4) == doctest::Approx(1.6));
    CHECK(tensor_law_moment(0.8, 3) == 0.0);
    CHECK(tensor_law_cdf(0.8, 0.0) - tensor_law_cdf(0.8, -1e-12) == doctest::Approx(0.2).epsilon(1e-9));
    CHECK_THROWS_AS(tensor_law_cdf(0.0, 0.1), InvalidArgument);
    CHECK_THROWS_AS(tensor_law_cdf(1.5, 0.1), InvalidArgument);
    CHECK_THROWS_AS(ReferenceLaw::tensor(-0.2), InvalidArgument);
}

TEST_CASE("KS distance") {
    const auto delta0 = esd({0.0}, 1);
    CHECK(ks_distance(delta0, ReferenceLaw::semicircle()) == doctest::Approx(0.5));
    CHECK(ks_distance(delta0, ReferenceLaw::tensor(0.8)) == doctest::Approx(0.4));
    CHECK(ks_distance(delta0, ReferenceLaw::point_mass(0.0)) == 0.0);
    CHECK(ks_distance(esd({1.0, 2.0}, 2), esd({1.0, 2.0}, 2)) == 0.0);
    CHECK(ks_distance(esd({1.0}, 1), esd({2.0}, 1)) == 1.0);

    // Quantiles of the semicircle: the ESD at the midpoints is within 1/(2m).
    const int m = 400;
    std::vector<double> q;
    for (int i = 0; i < m; ++i) {
        const double target = (i + 0.5) / m;
        double lo = -2, hi = 2;
        for (int it = 0; it < 100; ++it) {
            const double mid = (lo + hi) / 2;
            (semicircle_cdf(mid) < target ? lo : hi) = mid;
        }
        q.push_back((lo + hi) / 2);
    }
    CHECK(ks_distance(esd(q, m), ReferenceLaw::semicircle()) == doctest::Approx(0.5 / m).epsilon(1e-6));
}

TEST_CASE("trace moments") {
    SUBCASE("exact mode on a diagonal matrix") {
        const auto m = diagonal({1, -2, 3, 0.5});
        const auto est = exact_trace_moments(m, 4);
        CHECK(est.exact);
        CHECK(est.mean[0] == doctest::Approx(2.5 / 4));
        CHECK(est.mean[1] == doctest::Approx((1 + 4 + 9 + 0.25) / 4));
        CHECK(est.mean[3] == doctest::Approx((1 + 16 + 81 + 0.0625) / 4));
    }
    SUBCASE("exact mode gives m_1 = 0 on adjacency matrices") {
        const ComplexView v(OutcomeOracle({0.8, 0.7}, 1), 12, Model::lower);
        CHECK(exact_trace_moments(centered(v, true).matrix, 2).mean[0] == 0.0);
        CHECK(exact_trace_moments(restricted(v, false).matrix, 2).mean[0] == 0.0);
    }
    SUBCASE("exact mode agrees with eigenvalue moments") {
        std::mt19937_64 rng(8);
        const auto m = random_symmetric(60, 0.2, rng);
        const auto est = exact_trace_moments(m, 6);
        const auto mom = empirical_moments(eigenvalues_sym(m), 6, m.dim());
        for (int k = 0; k < 6; ++k) {
            CHECK(est.mean[k] == doctest::Approx(mom[k]).epsilon(1e-9).scale(1.0));
        }
    }
    SUBCASE("probe estimates land within 3 standard errors on a 528x528 instance") {
        const ModelParams params{33, 2, {0.8, 0.7}, 4};
        const ComplexView v(OutcomeOracle(params), 33, Model::lower);
        const auto h = normalize(centered(v, false), params).matrix;
        REQUIRE(h.dim() == 528);
        const auto mom = empirical_moments(eigenvalues_sym(h), 6, h.dim());
        const auto est = trace_moments(h, 6, 100, 99);
        CHECK_FALSE(est.exact);
        for (int k = 1; k < 6; ++k) {
            const double se = std::max(est.stderr_[k], 1e-10);
            CHECK(std::abs(est.mean[k] - mom[k]) < 3 * se);
        }
        const auto again = trace_moments(h, 6, 100, 99);
        CHECK(again.mean == est.mean);
    }
}

TEST_CASE("perturbation sandwich") {
    std::mt19937_64 rng(17);
    SUBCASE("B = 0") {
        const auto a = random_symmetric(40, 0.3, rng);
        CHECK(perturbation_sandwich_check(a, SymMatrix(40), 0.1, 0.5, 40.0));
    }
    SUBCASE("A = 0, B = identity") {
        std::vector<double> ones(40, 1.0);
        CHECK(perturbation_sandwich_check(SymMatrix(40), diagonal(ones), 0.5, 0.01, 40.0));
    }
    SUBCASE("random pairs") {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int t = 0; t < 100; ++t) {
            const auto a = random_symmetric(40, 0.3, rng);
            const auto b = random_symmetric(40, 0.05, rng);
            const double lambda = -2.0 + 4.0 * u(rng);
            const double eps = 0.01 + u(rng);
            CHECK(perturbation_sandwich_check(a, b, lambda, eps, 40.0 * (0.5 + u(rng))));
        }
    }
}

TEST_CASE("histograms") {
    const auto h = make_histogram({-1, 1}, 2, -2, 2);
    CHECK(h.counts == std::vector<std::uint64_t>{1, 1});
    CHECK(h.total == 2);
    CHECK(h.density(0) == doctest::Approx(0.25));

    const auto edge = make_histogram({-2.5, 2.5, 7.0}, 61);
    CHECK(edge.counts.front() == 1);
    CHECK(edge.counts.back() == 1);
    CHECK(edge.total == 3);
}
