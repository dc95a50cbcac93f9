#pragma once

// Cells on the vertex set [n] = {1, ..., n}: value type, colexicographic
// ranking, and the orientation algebra behind the signed adjacency matrix.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rsc {

using Vertex = std::uint32_t;
using Rank = std::uint64_t;

/// Largest number of vertices a stored cell may carry.
inline constexpr std::size_t kMaxCellSize = 10;

/// Exact binomial coefficient C(n, k); zero when k > n.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// A j-cell: strictly increasing 1-based vertex ids, dim = size - 1.
class Cell {
public:
    Cell() = default;
    Cell(std::initializer_list<Vertex> vertices);
    explicit Cell(std::span<const Vertex> vertices);

    /// Builds from vertices in any order (duplicates rejected).
    static Cell from_unsorted(std::span<const Vertex> vertices);

    std::size_t size() const { return size_; }
    int dim() const { return static_cast<int>(size_) - 1; }
    bool empty() const { return size_ == 0; }

    Vertex operator[](std::size_t i) const { return v_[i]; }
    const Vertex* begin() const { return v_.data(); }
    const Vertex* end() const { return v_.data() + size_; }
    std::span<const Vertex> vertices() const { return {v_.data(), size_}; }
    Vertex max_vertex() const { return size_ ? v_[size_ - 1] : 0; }

    bool contains(Vertex v) const;
    /// Position of v in the sorted vertex list, or -1.
    int position(Vertex v) const;
    bool is_subset_of(const Cell& other) const;

    /// Facet obtained by dropping the vertex at sorted position i.
    Cell without_position(std::size_t i) const;
    /// Cell with one extra vertex inserted in sorted position.
    Cell with_vertex(Vertex v) const;

    std::string to_string() const;

    friend bool operator==(const Cell& a, const Cell& b) {
        return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
    }
    /// Lexicographic on the sorted vertex lists (not colex).
    friend std::strong_ordering operator<=>(const Cell& a, const Cell& b);

private:
    std::array<Vertex, kMaxCellSize> v_{};
    std::size_t size_ = 0;
};

/// Colexicographic order: compare largest vertices first.
bool colex_less(const Cell& a, const Cell& b);

Cell cell_union(const Cell& a, const Cell& b);
std::size_t intersection_size(const Cell& a, const Cell& b);

/// All cells of a given dimension inside `c` (subfaces), colex order.
std::vector<Cell> subcells(const Cell& c, int dim);

/// A cell with a parity relative to its ascending (positive) orientation.
struct OrientedCell {
    Cell cell;
    int parity = +1;

    OrientedCell opposite() const { return {cell, -parity}; }
};

/// Colex ranking of the j-cells of [n]: rank = sum_i C(v_i - 1, i).
class CellIndexer {
public:
    CellIndexer(std::uint32_t n, int j);

    std::uint32_t n() const { return n_; }
    int j() const { return j_; }
    Rank count() const { return count_; }

    Rank rank(const Cell& c) const;
    Cell unrank(Rank r) const;

private:
    std::uint32_t n_;
    int j_;
    Rank count_;
};

/// Colex rank of a cell without range checks against an ambient n.
Rank colex_rank(const Cell& c);

/// All C(n, j+1) j-cells of [n] in colex order.
std::vector<Cell> enumerate_cells(std::uint32_t n, int j);

/// Visits every j-cell of [n] in colex order as fn(cell, rank) without
/// materializing the list.
template <typename Fn>
void for_each_cell(std::uint32_t n, int j, Fn&& fn) {
    const CellIndexer indexer(n, j);
    const std::size_t r = static_cast<std::size_t>(j) + 1;
    std::array<Vertex, kMaxCellSize> v{};
    for (std::size_t i = 0; i < r; ++i) {
        v[i] = static_cast<Vertex>(i + 1);
    }
    for (Rank rank = 0;; ++rank) {
        fn(Cell(std::span<const Vertex>(v.data(), r)), rank);
        std::size_t i = 0;
        while (i < r && v[i] + 1 == (i + 1 < r ? v[i + 1] : n + 1)) {
            ++i;
        }
        if (i == r) {
            break;
        }
        ++v[i];
        for (std::size_t t = 0; t < i; ++t) {
            v[t] = static_cast<Vertex>(t + 1);
        }
    }
}

/// Facets of an oriented cell with induced signs parity * (-1)^i, where i is
/// the sorted position of the dropped vertex.
std::vector<std::pair<Cell, int>> boundary_with_signs(const OrientedCell& oc);

/// Entry of sgn(K^d) for two (d-1)-cells: 0 unless their union is a d-cell,
/// otherwise -(-1)^(i+j) with i, j the positions (in the union) of the
/// vertices missing from sigma and sigma'. Zero on the diagonal.
int sign_entry(const Cell& sigma, const Cell& sigma_prime, int d);

/// Same sign for two distinct facets of tau, given the positions in tau of
/// the vertices they omit.
inline int facet_pair_sign(std::size_t omit_a, std::size_t omit_b) {
    return ((omit_a + omit_b) % 2 == 0) ? -1 : +1;
}

} // namespace rsc

template <>
struct std::hash<rsc::Cell> {
    std::size_t operator()(const rsc::Cell& c) const noexcept;
};
