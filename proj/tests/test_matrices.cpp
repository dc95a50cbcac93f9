#include "rsc/error.hpp"
#include "rsc/matrices.hpp"
#include "rsc/spectra.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace rsc;

namespace {

bool chi_product(const OutcomeOracle& o, const Cell& tau) {
    for (int j = 1; j <= tau.dim(); ++j) {
        for (const auto& t : subcells(tau, j)) {
            if (!o.chi(t)) {
                return false;
            }
        }
    }
    return true;
}

void check_symmetric_zero_diagonal(const SymMatrix& m) {
    for (std::size_t i = 0; i < m.dim(); ++i) {
        CHECK(m.entry(i, i) == 0.0);
    }
    m.for_each([&](std::size_t r, std::size_t c, double v) { CHECK(m.entry(c, r) == v); });
}

} // namespace

TEST_CASE("SymMatrix basics") {
    const auto m = SymMatrix::from_entries(3, {{0, 1, 2.0}, {1, 0, 2.0}, {1, 2, -1.0}, {2, 1, -1.0}, {0, 0, 0.0}});
    CHECK(m.nnz() == 4);
    CHECK(m.entry(0, 1) == 2.0);
    CHECK(m.entry(2, 0) == 0.0);
    CHECK(m.trace() == 0.0);
    CHECK(m.frobenius_sq() == 10.0);
    CHECK(m.max_abs() == 2.0);
    CHECK(m.max_row_nnz() == 2);
    std::vector<double> y(3);
    m.multiply(std::vector<double>{1, 1, 1}, y);
    CHECK(y == std::vector<double>{2, 1, -1});
    CHECK(m.scaled(0.5).entry(1, 0) == 1.0);
    CHECK_THROWS_AS(SymMatrix::from_entries(2, {{0, 1, 1.0}}), InvalidArgument);

    std::ostringstream os;
    write_coordinates(m, os);
    CHECK(os.str().rfind("3 4\n", 0) == 0);
}

TEST_CASE("hadamard factors") {
    SUBCASE("p_j = 1 gives the complete adjacency") {
        const ComplexView v(OutcomeOracle({1.0, 0.5}, 3), 6, Model::lower);
        CHECK(max_abs_difference(hadamard_factor(v, 1).matrix, complete_adjacency(6, 2).matrix) == 0.0);
    }
    SUBCASE("entries are products of chi over the j-cells of the union") {
        const OutcomeOracle o({0.6, 0.5}, 11);
        const ComplexView v(o, 6, Model::lower);
        const auto a1 = hadamard_factor(v, 1);
        const auto a2 = hadamard_factor(v, 2);
        const CellIndexer idx(6, 1);
        for (const auto& s : enumerate_cells(6, 1)) {
            for (const auto& t : enumerate_cells(6, 1)) {
                const auto u = cell_union(s, t);
                double e1 = 0, e2 = 0;
                if (u.size() == 3) {
                    const auto edges = subcells(u, 1);
                    e1 = std::all_of(edges.begin(), edges.end(), [&](const Cell& e) { return o.chi(e); });
                    e2 = o.chi(u);
                }
                CHECK(a1.matrix.entry(idx.rank(s), idx.rank(t)) == e1);
                CHECK(a2.matrix.entry(idx.rank(s), idx.rank(t)) == e2);
            }
        }
    }
}

TEST_CASE("extended unsigned adjacency") {
    SUBCASE("complete complex: entry 1 iff the cells share d-1 vertices") {
        const ComplexView v(OutcomeOracle({1.0, 1.0, 1.0}, 0), 6, Model::lower);
        const auto a = extended_unsigned(v);
        const auto cells = enumerate_cells(6, 2);
        for (std::size_t i = 0; i < cells.size(); ++i) {
            for (std::size_t j = 0; j < cells.size(); ++j) {
                CHECK(a.matrix.entry(i, j) == (i != j && intersection_size(cells[i], cells[j]) == 2));
            }
        }
    }
    SUBCASE("Linial-Meshulam case equals the top factor") {
        const ComplexView v(OutcomeOracle({1.0, 0.4}, 8), 8, Model::lower);
        CHECK(max_abs_difference(extended_unsigned(v).matrix, hadamard_factor(v, 2).matrix) == 0.0);
    }
    SUBCASE("brute-force product over sub-cells and the factor identity") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const OutcomeOracle o({0.7, 0.6}, seed);
            const ComplexView v(o, 6, Model::lower);
            const auto a = extended_unsigned(v);
            check_symmetric_zero_diagonal(a.matrix);
            const auto cells = enumerate_cells(6, 1);
            for (std::size_t i = 0; i < cells.size(); ++i) {
                for (std::size_t j = 0; j < cells.size(); ++j) {
                    const auto u = cell_union(cells[i], cells[j]);
                    const double e = (u.size() == 3 && chi_product(o, u)) ? 1.0 : 0.0;
                    CHECK(a.matrix.entry(i, j) == e);
                }
            }
            const auto prod = hadamard(hadamard_factor(v, 1).matrix, hadamard_factor(v, 2).matrix);
            CHECK(max_abs_difference(a.matrix, prod) == 0.0);
        }
    }
    SUBCASE("row support is bounded by (n-d) d") {
        const ComplexView v(OutcomeOracle({1.0, 1.0, 1.0}, 0), 9, Model::lower);
        CHECK(extended_unsigned(v).matrix.max_row_nnz() == (9 - 3) * 3);
    }
}

TEST_CASE("restricted adjacency") {
    const ComplexView v(OutcomeOracle({1.0, 1.0}, 0), 3, Model::lower);
    const auto a = restricted(v, false);
    REQUIRE(a.dim() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(a.matrix.entry(i, j) == (i == j ? 0.0 : 1.0));
        }
    }
    const auto s = restricted(v, true);
    CHECK(a.rows == std::vector<Cell>{{1, 2}, {1, 3}, {2, 3}});
    CHECK(s.matrix.entry(0, 1) == +1.0);
    CHECK(s.matrix.entry(0, 2) == -1.0);
    CHECK(s.matrix.entry(1, 2) == +1.0);
}

TEST_CASE("block padding: restricted eigenvalues plus zeros give the extended spectrum") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ComplexView v(OutcomeOracle({0.7, 0.6}, seed), 7, Model::lower);
        for (bool sgn : {false, true}) {
            const auto r = restricted(v, sgn);
            const auto e = extended_adjacency(v, sgn);
            CHECK(e.dim() == binomial(7, 2));
            if (!sgn) {
                CHECK(max_abs_difference(e.matrix, extended_unsigned(v).matrix) == 0.0);
            }
            auto er = eigenvalues_dense(r.matrix.to_dense(), r.dim());
            er.resize(e.dim(), 0.0);
            std::sort(er.begin(), er.end());
            const auto ee = eigenvalues_dense(e.matrix.to_dense(), e.dim());
            for (std::size_t i = 0; i < ee.size(); ++i) {
                CHECK(std::abs(er[i] - ee[i]) < 1e-10);
            }
        }
    }
}

TEST_CASE("signed extended equals sgn(K^d) times the unsigned one") {
    const ComplexView v(OutcomeOracle({0.8, 0.6, 0.5}, 4), 7, Model::lower);
    const auto sgn = sign_matrix(7, 3);
    CHECK(max_abs_difference(extended_adjacency(v, true).matrix,
                             hadamard(sgn.matrix, extended_unsigned(v).matrix)) == 0.0);
}

TEST_CASE("centered matrix") {
    SUBCASE("p_d = 1 gives zero") {
        const ComplexView v(OutcomeOracle({0.5, 1.0}, 2), 6, Model::lower);
        CHECK(centered(v, false).matrix.nnz() == 0);
    }
    SUBCASE("extended = centered + shift, entries two-point") {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            const ComplexView v(OutcomeOracle({0.8, 0.7}, seed), 6, Model::lower);
            for (bool sgn : {false, true}) {
                const auto b = centered(v, sgn);
                const auto sum = add(b.matrix, centered_shift(v, sgn).matrix);
                CHECK(max_abs_difference(sum, extended_adjacency(v, sgn).matrix) < 1e-12);
                check_symmetric_zero_diagonal(b.matrix);
            }
            centered(v, false).matrix.for_each([](std::size_t, std::size_t, double x) {
                CHECK((std::abs(x - 0.3) < 1e-15 || std::abs(x + 0.7) < 1e-15));
            });
        }
    }
    SUBCASE("upper model is rejected") {
        const ComplexView v(OutcomeOracle({0.8, 0.7}, 0), 6, Model::upper);
        CHECK_THROWS_AS(centered(v, false), InvalidArgument);
    }
}

TEST_CASE("normalization") {
    CHECK(normalization_denominator({40, 2, {0.8, 0.7}, 0}) == doctest::Approx(std::sqrt(10.752)));
    CHECK(normalization_denominator({40, 2, {0.8, 0.7}, 0}) == doctest::Approx(3.27902).epsilon(1e-5));
    CHECK_THROWS_AS(normalization_denominator({40, 2, {0.8, 1.0}, 0}), InvalidArgument);
    const ModelParams unit{8, 2, {0.5, 0.5}, 0};
    CHECK(normalization_denominator(unit) == doctest::Approx(1.0));
    const ComplexView v(OutcomeOracle(unit), 8, Model::lower);
    const auto b = centered(v, false);
    CHECK(max_abs_difference(normalize(b, unit).matrix, b.matrix) < 1e-15);

    const ModelParams params{7, 2, {0.8, 0.7}, 1};
    const ComplexView w(OutcomeOracle(params), 7, Model::lower);
    const auto c = centered(w, true);
    const auto h = normalize(c, params);
    const double den = normalization_denominator(params);
    const auto ec = eigenvalues_sym(c.matrix);
    const auto eh = eigenvalues_sym(h.matrix);
    for (std::size_t i = 0; i < ec.size(); ++i) {
        CHECK(eh[i] == doctest::Approx(ec[i] / den));
    }
}

TEST_CASE("signed adjacency equals D - L") {
    SUBCASE("triangle") {
        const ComplexView v(OutcomeOracle({1.0, 1.0}, 0), 3, Model::lower);
        const auto parts = boundary_and_laplacian(v);
        CHECK(parts.degree == std::vector<double>{1, 1, 1});
        CHECK(max_abs_difference(degree_minus_laplacian(parts), restricted(v, true).matrix) == 0.0);
    }
    SUBCASE("no d-cells") {
        const ComplexView v(OutcomeOracle({1.0, 1e-12}, 0), 5, Model::lower);
        const auto parts = boundary_and_laplacian(v);
        CHECK(parts.laplacian.nnz() == 0);
        CHECK(restricted(v, true).matrix.nnz() == 0);
        for (double x : parts.degree) {
            CHECK(x == 0.0);
        }
    }
    SUBCASE("random instances, both models") {
        std::mt19937_64 rng(5);
        for (int t = 0; t < 50; ++t) {
            const int d = 2 + t % 2;
            const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(d + 2, 10)(rng);
            std::vector<double> p(d);
            for (auto& x : p) {
                x = std::uniform_real_distribution<double>(0.4, 1.0)(rng);
            }
            for (Model m : {Model::lower, Model::upper}) {
                const ComplexView v(OutcomeOracle(p, rng()), n, m);
                const auto parts = boundary_and_laplacian(v);
                CHECK(max_abs_difference(degree_minus_laplacian(parts), restricted(v, true).matrix) == 0.0);
            }
        }
    }
}

TEST_CASE("upper model: extended adjacency is exactly the top factor") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ComplexView v(OutcomeOracle({0.3, 0.4}, seed), 8, Model::upper);
        CHECK(max_abs_difference(extended_adjacency(v, false).matrix, hadamard_factor(v, 2).matrix) == 0.0);
    }
}

TEST_CASE("entry covariance") {
    const ModelParams params{10, 2, {0.8, 0.7}, 0};
    const std::pair<Cell, Cell> a{{1, 2}, {1, 3}};
    CHECK(entry_covariance(a, {{4, 5}, {4, 6}}, params) == 0.0);
    const double q = std::pow(0.8, 3) * 0.7;
    CHECK(entry_covariance(a, a, params) == doctest::Approx(q * (1 - q)));
    CHECK(entry_covariance(a, {{1, 3}, {2, 3}}, params) == doctest::Approx(q * (1 - q)));
    CHECK_THROWS_AS(entry_covariance({{1, 2}, {3, 4}}, a, params), InvalidArgument);

    // Unions {1,2,3} and {1,2,4}: share edge {1,2}.
    const std::pair<Cell, Cell> b{{1, 2}, {1, 4}};
    const double formula = entry_covariance(a, b, params);
    CHECK(formula == doctest::Approx(std::pow(0.8, 4) * 0.49 * 0.8 * 0.2));
    const int seeds = 100000;
    std::vector<double> xs(seeds), ys(seeds);
    double mx = 0, my = 0;
    for (int s = 0; s < seeds; ++s) {
        const OutcomeOracle o(params.p, static_cast<std::uint64_t>(s));
        xs[s] = chi_product(o, {1, 2, 3});
        ys[s] = chi_product(o, {1, 2, 4});
        mx += xs[s] / seeds;
        my += ys[s] / seeds;
    }
    double cov = 0, sq = 0;
    for (int s = 0; s < seeds; ++s) {
        const double z = (xs[s] - mx) * (ys[s] - my);
        cov += z / seeds;
        sq += z * z / seeds;
    }
    const double se = std::sqrt((sq - cov * cov) / seeds);
    CHECK(std::abs(cov - formula) < 3 * se);
}

TEST_CASE("matrix kinds") {
    for (auto k : {MatrixKind::unsigned_adj, MatrixKind::signed_adj, MatrixKind::extended,
                   MatrixKind::extended_signed, MatrixKind::centered, MatrixKind::centered_signed}) {
        CHECK(parse_matrix_kind(to_string(k)) == k);
    }
    CHECK(parse_matrix_kind("extended-signed") == MatrixKind::extended_signed);
    CHECK_THROWS_AS(parse_matrix_kind("weird"), InvalidArgument);
    CHECK(is_extended(MatrixKind::centered));
    CHECK_FALSE(is_extended(MatrixKind::signed_adj));
}
