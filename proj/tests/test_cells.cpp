#include "rsc/cells.hpp"
#include "rsc/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

using namespace rsc;

TEST_CASE("enumerate_cells lists every j-cell in colex order") {
    const auto c31 = enumerate_cells(3, 1);
    CHECK(c31 == std::vector<Cell>{{1, 2}, {1, 3}, {2, 3}});

    const auto c41 = enumerate_cells(4, 1);
    REQUIRE(c41.size() == 6);
    CHECK(c41.front() == Cell{1, 2});
    CHECK(c41.back() == Cell{3, 4});

    CHECK(enumerate_cells(5, 2).size() == 10);
    CHECK_THROWS_AS(enumerate_cells(3, 3), InvalidDimension);
}

TEST_CASE("colex rank examples") {
    CHECK(CellIndexer(4, 1).rank({1, 2}) == 0);
    CHECK(CellIndexer(4, 1).rank({3, 4}) == 5);
    for (std::uint32_t n = 3; n <= 9; ++n) {
        CHECK(CellIndexer(n, 2).rank({1, 2, 3}) == 0);
    }
    CHECK_THROWS_AS(CellIndexer(4, 1).rank({1, 5}), IndexError);
    CHECK_THROWS_AS(CellIndexer(4, 1).rank({1, 2, 3}), IndexError);
    CHECK_THROWS_AS(CellIndexer(4, 1).unrank(6), IndexError);
}

TEST_CASE("rank is a bijection onto [0, C(n, j+1)) for n <= 12, j <= 4") {
    for (std::uint32_t n = 1; n <= 12; ++n) {
        for (int j = 0; j <= 4 && j < static_cast<int>(n); ++j) {
            const CellIndexer idx(n, j);
            const auto cells = enumerate_cells(n, j);
            REQUIRE(cells.size() == binomial(n, j + 1));
            REQUIRE(idx.count() == cells.size());
            for (std::size_t r = 0; r < cells.size(); ++r) {
                CHECK(idx.rank(cells[r]) == r);
                CHECK(idx.unrank(r) == cells[r]);
                if (r > 0) {
                    CHECK(colex_less(cells[r - 1], cells[r]));
                }
            }
            Rank visited = 0;
            for_each_cell(n, j, [&](const Cell& c, Rank r) {
                CHECK(r == visited);
                CHECK(c == cells[r]);
                ++visited;
            });
            CHECK(visited == cells.size());
        }
    }
}

TEST_CASE("boundary signs") {
    const auto b = boundary_with_signs({Cell{1, 2, 3}, +1});
    REQUIRE(b.size() == 3);
    CHECK(b[0] == std::pair<Cell, int>{Cell{2, 3}, +1});
    CHECK(b[1] == std::pair<Cell, int>{Cell{1, 3}, -1});
    CHECK(b[2] == std::pair<Cell, int>{Cell{1, 2}, +1});

    const auto e = boundary_with_signs({Cell{1, 2}, -1});
    REQUIRE(e.size() == 2);
    CHECK(e[0] == std::pair<Cell, int>{Cell{2}, -1});
    CHECK(e[1] == std::pair<Cell, int>{Cell{1}, +1});

    const auto t = boundary_with_signs({Cell{1, 2, 3, 4}, +1});
    REQUIRE(t.size() == 4);
    CHECK(t[0].second == +1);
    CHECK(t[1].second == -1);
    CHECK(t[2].second == +1);
    CHECK(t[3].second == -1);

    CHECK_THROWS_AS(boundary_with_signs({Cell{3}, +1}), InvalidDimension);
}

TEST_CASE("boundary of a boundary vanishes") {
    for (std::uint32_t n = 2; n <= 7; ++n) {
        for (int j = 2; j < static_cast<int>(n) && j <= 4; ++j) {
            for (const auto& c : enumerate_cells(n, j)) {
                std::map<Cell, int> chain;
                for (const auto& [facet, s1] : boundary_with_signs({c, +1})) {
                    for (const auto& [ridge, s2] : boundary_with_signs({facet, s1})) {
                        chain[ridge] += s2;
                    }
                }
                for (const auto& [ridge, coeff] : chain) {
                    CHECK(coeff == 0);
                }
            }
        }
    }
}

TEST_CASE("sign_entry examples") {
    CHECK(sign_entry({1, 2}, {1, 3}, 2) == +1);
    CHECK(sign_entry({1, 2}, {2, 3}, 2) == -1);
    CHECK(sign_entry({1, 2}, {3, 4}, 2) == 0);
    CHECK(sign_entry({1, 2}, {1, 2}, 2) == 0);
    CHECK_THROWS_AS(sign_entry({1, 2}, {1, 2, 3}, 2), InvalidArgument);
}

TEST_CASE("sign_entry is the negated product of induced boundary signs") {
    for (int d = 2; d <= 4; ++d) {
        for (const auto& tau : enumerate_cells(7, d)) {
            const auto facets = boundary_with_signs({tau, +1});
            for (const auto& [a, sa] : facets) {
                for (const auto& [b, sb] : facets) {
                    if (a == b) {
                        continue;
                    }
                    CHECK(sign_entry(a, b, d) == -sa * sb);
                    CHECK(sign_entry(a, b, d) == sign_entry(b, a, d));
                }
            }
        }
    }
}

TEST_CASE("cell helpers") {
    CHECK(cell_union({1, 2}, {2, 5}) == Cell{1, 2, 5});
    CHECK(intersection_size({1, 2, 4}, {2, 4, 6}) == 2);
    CHECK(subcells({1, 2, 3}, 1) == std::vector<Cell>{{1, 2}, {1, 3}, {2, 3}});
    CHECK(Cell::from_unsorted(std::vector<Vertex>{4, 1, 3}) == Cell{1, 3, 4});
    CHECK_THROWS_AS(Cell({2, 2}), InvalidArgument);
    CHECK_THROWS_AS(Cell({0, 1}), IndexError);
    CHECK(binomial(5, 7) == 0);
    CHECK(binomial(40, 2) == 780);
}
