#include "rsc/cells.hpp"

#include "rsc/error.hpp"

#include <algorithm>
#include <sstream>

namespace rsc {

namespace {

constexpr std::uint64_t kTableRows = 4096;
constexpr std::uint64_t kTableCols = kMaxCellSize + 1;

const std::vector<std::uint64_t>& binomial_table() {
    static const std::vector<std::uint64_t> table = [] {
        std::vector<std::uint64_t> t(kTableRows * kTableCols, 0);
        for (std::uint64_t n = 0; n < kTableRows; ++n) {
            t[n * kTableCols] = 1;
            for (std::uint64_t k = 1; k < kTableCols && k <= n; ++k) {
                t[n * kTableCols + k] = t[(n - 1) * kTableCols + k - 1] +
                                        (k <= n - 1 ? t[(n - 1) * kTableCols + k] : 0);
            }
        }
        return t;
    }();
    return table;
}

} // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    if (n < kTableRows && k < kTableCols) {
        return binomial_table()[n * kTableCols + k];
    }
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > static_cast<unsigned __int128>(UINT64_MAX)) {
            throw InvalidArgument("binomial coefficient overflows 64 bits");
        }
    }
    return static_cast<std::uint64_t>(r);
}

Cell::Cell(std::initializer_list<Vertex> vertices)
    : Cell(std::span<const Vertex>(vertices.begin(), vertices.size())) {}

Cell::Cell(std::span<const Vertex> vertices) {
    if (vertices.size() > kMaxCellSize) {
        throw InvalidDimension("cell has more than " + std::to_string(kMaxCellSize) + " vertices");
    }
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (vertices[i] == 0) {
            throw IndexError("vertex ids are 1-based");
        }
        if (i > 0 && vertices[i] <= vertices[i - 1]) {
            throw InvalidArgument("cell vertices must be strictly increasing");
        }
        v_[i] = vertices[i];
    }
    size_ = vertices.size();
}

Cell Cell::from_unsorted(std::span<const Vertex> vertices) {
    std::array<Vertex, kMaxCellSize> buf{};
    if (vertices.size() > kMaxCellSize) {
        throw InvalidDimension("cell has more than " + std::to_string(kMaxCellSize) + " vertices");
    }
    std::copy(vertices.begin(), vertices.end(), buf.begin());
    std::sort(buf.begin(), buf.begin() + vertices.size());
    return Cell(std::span<const Vertex>(buf.data(), vertices.size()));
}

bool Cell::contains(Vertex v) const {
    return std::binary_search(begin(), end(), v);
}

int Cell::position(Vertex v) const {
    const auto* it = std::lower_bound(begin(), end(), v);
    return (it != end() && *it == v) ? static_cast<int>(it - begin()) : -1;
}

bool Cell::is_subset_of(const Cell& other) const {
    return std::includes(other.begin(), other.end(), begin(), end());
}

Cell Cell::without_position(std::size_t i) const {
    Cell out;
    std::size_t k = 0;
    for (std::size_t t = 0; t < size_; ++t) {
        if (t != i) {
            out.v_[k++] = v_[t];
        }
    }
    out.size_ = k;
    return out;
}

Cell Cell::with_vertex(Vertex v) const {
    if (size_ + 1 > kMaxCellSize) {
        throw InvalidDimension("cell would exceed the maximum size");
    }
    if (v == 0) {
        throw IndexError("vertex ids are 1-based");
    }
    Cell out;
    std::size_t k = 0;
    bool placed = false;
    for (std::size_t t = 0; t < size_; ++t) {
        if (!placed && v < v_[t]) {
            out.v_[k++] = v;
            placed = true;
        } else if (v == v_[t]) {
            throw InvalidArgument("vertex already in cell");
        }
        out.v_[k++] = v_[t];
    }
    if (!placed) {
        out.v_[k++] = v;
    }
    out.size_ = k;
    return out;
}

std::string Cell::to_string() const {
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < size_; ++i) {
        os << (i ? "," : "") << v_[i];
    }
    os << '}';
    return os.str();
}

std::strong_ordering operator<=>(const Cell& a, const Cell& b) {
    return std::lexicographical_compare_three_way(a.begin(), a.end(), b.begin(), b.end());
}

bool colex_less(const Cell& a, const Cell& b) {
    if (a.size() != b.size()) {
        return a.size() < b.size();
    }
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) {
            return a[i] < b[i];
        }
    }
    return false;
}

Cell cell_union(const Cell& a, const Cell& b) {
    std::array<Vertex, 2 * kMaxCellSize> buf{};
    auto* last = std::set_union(a.begin(), a.end(), b.begin(), b.end(), buf.begin());
    return Cell(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(last - buf.data())));
}

std::size_t intersection_size(const Cell& a, const Cell& b) {
    std::size_t i = 0, j = 0, k = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++k, ++i, ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    return k;
}

std::vector<Cell> subcells(const Cell& c, int dim) {
    std::vector<Cell> out;
    if (dim < 0 || static_cast<std::size_t>(dim) + 1 > c.size()) {
        return out;
    }
    const std::size_t m = c.size();
    const std::size_t r = static_cast<std::size_t>(dim) + 1;
    // Colex walk over index subsets of size r.
    std::array<std::size_t, kMaxCellSize> idx{};
    for (std::size_t i = 0; i < r; ++i) {
        idx[i] = i;
    }
    while (true) {
        std::array<Vertex, kMaxCellSize> buf{};
        for (std::size_t i = 0; i < r; ++i) {
            buf[i] = c[idx[i]];
        }
        out.emplace_back(std::span<const Vertex>(buf.data(), r));
        std::size_t i = 0;
        while (i < r && idx[i] + 1 == (i + 1 < r ? idx[i + 1] : m)) {
            ++i;
        }
        if (i == r) {
            break;
        }
        ++idx[i];
        for (std::size_t t = 0; t < i; ++t) {
            idx[t] = t;
        }
    }
    return out;
}

CellIndexer::CellIndexer(std::uint32_t n, int j) : n_(n), j_(j) {
    if (j < 0 || static_cast<std::uint64_t>(j) >= n) {
        throw InvalidDimension("cell dimension " + std::to_string(j) + " invalid for n = " +
                               std::to_string(n));
    }
    if (static_cast<std::size_t>(j) + 1 > kMaxCellSize) {
        throw InvalidDimension("cell dimension exceeds the supported maximum");
    }
    count_ = binomial(n, static_cast<std::uint64_t>(j) + 1);
}

Rank colex_rank(const Cell& c) {
    Rank r = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        r += binomial(c[i] - 1, i + 1);
    }
    return r;
}

Rank CellIndexer::rank(const Cell& c) const {
    if (c.dim() != j_) {
        throw IndexError("cell " + c.to_string() + " has dimension " + std::to_string(c.dim()) +
                         ", indexer expects " + std::to_string(j_));
    }
    if (c.max_vertex() > n_) {
        throw IndexError("cell " + c.to_string() + " has a vertex outside [1, " +
                         std::to_string(n_) + "]");
    }
    return colex_rank(c);
}

Cell CellIndexer::unrank(Rank r) const {
    if (r >= count_) {
        throw IndexError("rank " + std::to_string(r) + " out of range");
    }
    std::array<Vertex, kMaxCellSize> buf{};
    std::uint64_t hi = n_;
    for (std::size_t i = static_cast<std::size_t>(j_) + 1; i >= 1; --i) {
        // Largest c < hi with C(c, i) <= r; vertex is c + 1.
        std::uint64_t c = hi - 1;
        while (binomial(c, i) > r) {
            --c;
        }
        buf[i - 1] = static_cast<Vertex>(c + 1);
        r -= binomial(c, i);
        hi = c;
    }
    return Cell(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(j_) + 1));
}

std::vector<Cell> enumerate_cells(std::uint32_t n, int j) {
    std::vector<Cell> out;
    out.reserve(CellIndexer(n, j).count());
    for_each_cell(n, j, [&](const Cell& c, Rank) { out.push_back(c); });
    return out;
}

std::vector<std::pair<Cell, int>> boundary_with_signs(const OrientedCell& oc) {
    if (oc.parity != 1 && oc.parity != -1) {
        throw InvalidArgument("orientation parity must be +1 or -1");
    }
    if (oc.cell.dim() < 1) {
        throw InvalidDimension("boundary of a cell of dimension < 1 is empty");
    }
    std::vector<std::pair<Cell, int>> out;
    out.reserve(oc.cell.size());
    for (std::size_t i = 0; i < oc.cell.size(); ++i) {
        out.emplace_back(oc.cell.without_position(i), (i % 2 == 0 ? 1 : -1) * oc.parity);
    }
    return out;
}

int sign_entry(const Cell& sigma, const Cell& sigma_prime, int d) {
    if (sigma.dim() != d - 1 || sigma_prime.dim() != d - 1) {
        throw InvalidArgument("sign_entry expects two (d-1)-cells");
    }
    if (intersection_size(sigma, sigma_prime) + 1 != sigma.size()) {
        return 0;
    }
    // The union has d+1 vertices; locate the vertex each side is missing.
    const Cell tau = cell_union(sigma, sigma_prime);
    std::size_t miss_sigma = 0, miss_prime = 0;
    for (std::size_t t = 0; t < tau.size(); ++t) {
        if (!sigma.contains(tau[t])) {
            miss_sigma = t;
        }
        if (!sigma_prime.contains(tau[t])) {
            miss_prime = t;
        }
    }
    return facet_pair_sign(miss_sigma, miss_prime);
}

} // namespace rsc

std::size_t std::hash<rsc::Cell>::operator()(const rsc::Cell& c) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull ^ c.size();
    for (auto v : c) {
        h ^= v + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}
