#include "rsc/matrices.hpp"

#include "rsc/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace rsc {

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix SymMatrix::from_entries(std::size_t dim, std::vector<MatrixEntry> entries) {
    for (const auto& e : entries) {
        if (e.row >= dim || e.col >= dim) {
            throw IndexError("matrix entry (" + std::to_string(e.row) + ", " +
                             std::to_string(e.col) + ") outside dimension " +
                             std::to_string(dim));
        }
    }
    std::sort(entries.begin(), entries.end(), [](const MatrixEntry& a, const MatrixEntry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SymMatrix m(dim);
    m.cols_.reserve(entries.size());
    m.values_.reserve(entries.size());
    std::vector<std::uint32_t> rows;
    rows.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size();) {
        const auto r = entries[k].row;
        const auto c = entries[k].col;
        double v = 0.0;
        for (; k < entries.size() && entries[k].row == r && entries[k].col == c; ++k) {
            v += entries[k].value;
        }
        if (v != 0.0) {
            rows.push_back(r);
            m.cols_.push_back(c);
            m.values_.push_back(v);
        }
    }
    for (auto r : rows) {
        ++m.row_ptr_[static_cast<std::size_t>(r) + 1];
    }
    for (std::size_t r = 0; r < dim; ++r) {
        m.row_ptr_[r + 1] += m.row_ptr_[r];
    }

    for (std::size_t k = 0; k < m.cols_.size(); ++k) {
        if (m.entry(m.cols_[k], rows[k]) != m.values_[k]) {
            throw InvalidArgument("matrix entries are not symmetric at (" +
                                  std::to_string(rows[k]) + ", " + std::to_string(m.cols_[k]) +
                                  ")");
        }
    }
    return m;
}

double SymMatrix::entry(std::size_t row, std::size_t col) const {
    if (row >= dim_ || col >= dim_) {
        throw IndexError("entry (" + std::to_string(row) + ", " + std::to_string(col) +
                         ") outside dimension " + std::to_string(dim_));
    }
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(col));
    if (it == last || *it != col) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - cols_.begin())];
}

void SymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != dim_ || y.size() != dim_) {
        throw InvalidArgument("matrix-vector size mismatch");
    }
    for (std::size_t r = 0; r < dim_; ++r) {
        double acc = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            acc += values_[k] * x[cols_[k]];
        }
        y[r] = acc;
    }
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
        t += entry(r, r);
    }
    return t;
}

double SymMatrix::frobenius_sq() const {
    double s = 0.0;
    for (double v : values_) {
        s += v * v;
    }
    return s;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

std::size_t SymMatrix::max_row_nnz() const {
    std::size_t m = 0;
    for (std::size_t r = 0; r < dim_; ++r) {
        m = std::max(m, row_ptr_[r + 1] - row_ptr_[r]);
    }
    return m;
}

SymMatrix SymMatrix::scaled(double factor) const {
    SymMatrix out = *this;
    for (double& v : out.values_) {
        v *= factor;
    }
    return out;
}

std::vector<double> SymMatrix::to_dense() const {
    std::vector<double> a(dim_ * dim_, 0.0);
    for_each([&](std::size_t r, std::size_t c, double v) { a[c * dim_ + r] = v; });
    return a;
}

namespace {

void check_same_dim(const SymMatrix& a, const SymMatrix& b) {
    if (a.dim() != b.dim()) {
        throw InvalidArgument("matrix dimensions differ: " + std::to_string(a.dim()) + " vs " +
                              std::to_string(b.dim()));
    }
}

/// Walks the union of the sparsity patterns of row r of a and b.
template <typename Fn>
void merge_rows(const SymMatrix& a, const SymMatrix& b, std::size_t r, Fn&& fn) {
    auto ia = a.row_ptr()[r], ea = a.row_ptr()[r + 1];
    auto ib = b.row_ptr()[r], eb = b.row_ptr()[r + 1];
    while (ia < ea || ib < eb) {
        const auto ca = ia < ea ? a.cols()[ia] : UINT32_MAX;
        const auto cb = ib < eb ? b.cols()[ib] : UINT32_MAX;
        if (ca == cb) {
            fn(ca, a.values()[ia++], b.values()[ib++]);
        } else if (ca < cb) {
            fn(ca, a.values()[ia++], 0.0);
        } else {
            fn(cb, 0.0, b.values()[ib++]);
        }
    }
}

} // namespace

double max_abs_difference(const SymMatrix& a, const SymMatrix& b) {
    check_same_dim(a, b);
    double m = 0.0;
    for (std::size_t r = 0; r < a.dim(); ++r) {
        merge_rows(a, b, r, [&](std::uint32_t, double x, double y) {
            m = std::max(m, std::abs(x - y));
        });
    }
    return m;
}

SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b) {
    check_same_dim(a, b);
    std::vector<MatrixEntry> entries;
    for (std::size_t r = 0; r < a.dim(); ++r) {
        merge_rows(a, b, r, [&](std::uint32_t c, double x, double y) {
            if (x * y != 0.0) {
                entries.push_back({static_cast<std::uint32_t>(r), c, x * y});
            }
        });
    }
    return SymMatrix::from_entries(a.dim(), std::move(entries));
}

SymMatrix add(const SymMatrix& a, const SymMatrix& b, double b_scale) {
    check_same_dim(a, b);
    std::vector<MatrixEntry> entries;
    for (std::size_t r = 0; r < a.dim(); ++r) {
        merge_rows(a, b, r, [&](std::uint32_t c, double x, double y) {
            entries.push_back({static_cast<std::uint32_t>(r), c, x + b_scale * y});
        });
    }
    return SymMatrix::from_entries(a.dim(), std::move(entries));
}

// ---------------------------------------------------------------------------
// Assembly over d-cells

namespace {

constexpr std::int64_t kAbsent = -1;

/// Indexed by cell dimension 1..d.
using Factors = std::array<std::uint8_t, kMaxCellSize + 1>;

/// Per d-cell data shared by every assembly route.
struct TopCell {
    Cell tau;
    Rank rank = 0;
    std::array<Rank, kMaxCellSize> facet_rank{};
};

/// factor[j] = prod of chi over the j-subcells of tau, j = 1..d.
Factors hadamard_factors(const ComplexView& view, const Cell& tau) {
    Factors f{};
    for (int j = 1; j <= view.d(); ++j) {
        const auto& chi = view.chi_table(j);
        std::uint8_t prod = 1;
        for (const Cell& c : subcells(tau, j)) {
            if (!chi[colex_rank(c)]) {
                prod = 0;
                break;
            }
        }
        f[static_cast<std::size_t>(j)] = prod;
    }
    return f;
}

/// Calls value(top, a, b) for every d-cell and ordered pair of distinct facet
/// positions; nonzero results become entries at (row(a), row(b)).
template <typename ValueFn>
SymMatrix assemble(std::uint32_t n, int d, std::size_t dim, const std::vector<std::int64_t>* row_map,
                   ValueFn&& value) {
    std::vector<MatrixEntry> entries;
    TopCell top;
    for_each_cell(n, d, [&](const Cell& tau, Rank rank) {
        top.tau = tau;
        top.rank = rank;
        for (std::size_t i = 0; i < tau.size(); ++i) {
            top.facet_rank[i] = colex_rank(tau.without_position(i));
        }
                for (std::size_t a = 0; a < tau.size(); ++a) {
            for (std::size_t b = 0; b < tau.size(); ++b) {
                if (a == b) {
                    continue;
                }
                const double v = value(top, a, b);
                if (v == 0.0) {
                    continue;
                }
                std::int64_t ra = static_cast<std::int64_t>(top.facet_rank[a]);
                std::int64_t rb = static_cast<std::int64_t>(top.facet_rank[b]);
                if (row_map) {
                    ra = (*row_map)[static_cast<std::size_t>(ra)];
                    rb = (*row_map)[static_cast<std::size_t>(rb)];
                    if (ra == kAbsent || rb == kAbsent) {
                        throw InvalidArgument("d-cell " + tau.to_string() +
                                              " has a facet outside the row index");
                    }
                }
                entries.push_back({static_cast<std::uint32_t>(ra), static_cast<std::uint32_t>(rb), v});
            }
        }
    });
    return SymMatrix::from_entries(dim, std::move(entries));
}

std::vector<Cell> all_facet_cells(std::uint32_t n, int d) {
    return enumerate_cells(n, d - 1);
}

std::size_t full_dim(std::uint32_t n, int d) {
    return static_cast<std::size_t>(binomial(n, static_cast<std::uint64_t>(d)));
}

/// Computes factors of the current d-cell once per d-cell.
class FactorCache {
public:
    explicit FactorCache(const ComplexView& view) : view_(&view) {}

    const Factors& get(const TopCell& top) {
        if (!valid_ || top.rank != rank_) {
            f_ = hadamard_factors(*view_, top.tau);
            rank_ = top.rank;
            valid_ = true;
        }
        return f_;
    }

private:
    const ComplexView* view_;
    Factors f_{};
    Rank rank_ = 0;
    bool valid_ = false;
};

} // namespace

SymMatrixView hadamard_factor(const ComplexView& view, int j) {
    if (j < 1 || j > view.d()) {
        throw InvalidDimension("Hadamard factor index " + std::to_string(j) + " outside [1, d]");
    }
    FactorCache cache(view);
    const auto n = view.n();
    const int d = view.d();
    SymMatrix m = assemble(n, d, full_dim(n, d), nullptr,
                           [&](const TopCell& top, std::size_t, std::size_t) {
                               return double(cache.get(top)[static_cast<std::size_t>(j)]);
                           });
    return {"A(" + std::to_string(j) + ")", std::move(m), all_facet_cells(n, d), true};
}

SymMatrixView extended_unsigned(const ComplexView& view) {
    const auto n = view.n();
    const int d = view.d();
    // Product over every subcell of sigma u sigma', straight from chi.
    SymMatrix m = assemble(n, d, full_dim(n, d), nullptr,
                           [&](const TopCell& top, std::size_t, std::size_t) {
                               for (int j = 1; j <= d; ++j) {
                                   const auto& chi = view.chi_table(j);
                                   for (const Cell& c : subcells(top.tau, j)) {
                                       if (!chi[colex_rank(c)]) {
                                           return 0.0;
                                       }
                                   }
                               }
                               return 1.0;
                           });
    return {"extended", std::move(m), all_facet_cells(n, d), true};
}

SymMatrixView sign_matrix(std::uint32_t n, int d) {
    SymMatrix m = assemble(n, d, full_dim(n, d), nullptr,
                           [](const TopCell&, std::size_t a, std::size_t b) {
                               return double(facet_pair_sign(a, b));
                           });
    return {"sgn", std::move(m), all_facet_cells(n, d), true};
}

SymMatrixView complete_adjacency(std::uint32_t n, int d) {
    SymMatrix m = assemble(n, d, full_dim(n, d), nullptr,
                           [](const TopCell&, std::size_t, std::size_t) { return 1.0; });
    return {"complete", std::move(m), all_facet_cells(n, d), true};
}

SymMatrixView restricted(const ComplexView& view, bool signed_entries) {
    const auto n = view.n();
    const int d = view.d();
    const auto& facet_member = view.membership_table(d - 1);
    const auto& top_member = view.membership_table(d);

    std::vector<std::int64_t> row_map(facet_member.size(), kAbsent);
    std::vector<Cell> rows;
    for_each_cell(n, d - 1, [&](const Cell& c, Rank r) {
        if (facet_member[r]) {
            row_map[r] = static_cast<std::int64_t>(rows.size());
            rows.push_back(c);
        }
    });

    SymMatrix m = assemble(n, d, rows.size(), &row_map,
                           [&](const TopCell& top, std::size_t a, std::size_t b) {
                               if (!top_member[top.rank]) {
                                   return 0.0;
                               }
                               return signed_entries ? double(sign_entry(top.tau.without_position(a),
                                                                         top.tau.without_position(b), d))
                                                     : 1.0;
                           });
    return {signed_entries ? "signed" : "unsigned", std::move(m), std::move(rows), false};
}

SymMatrixView extended_adjacency(const ComplexView& view, bool signed_entries) {
    const SymMatrixView inner = restricted(view, signed_entries);
    const auto n = view.n();
    const int d = view.d();
    std::vector<Rank> full_rank(inner.rows.size());
    for (std::size_t i = 0; i < inner.rows.size(); ++i) {
        full_rank[i] = colex_rank(inner.rows[i]);
    }
    std::vector<MatrixEntry> entries;
    entries.reserve(inner.matrix.nnz());
    inner.matrix.for_each([&](std::size_t r, std::size_t c, double v) {
        entries.push_back({static_cast<std::uint32_t>(full_rank[r]),
                           static_cast<std::uint32_t>(full_rank[c]), v});
    });
    return {signed_entries ? "extended-signed" : "extended",
            SymMatrix::from_entries(full_dim(n, d), std::move(entries)), all_facet_cells(n, d), true};
}

namespace {

void require_lower(const ComplexView& view, const char* what) {
    if (view.model() != Model::lower) {
        throw InvalidArgument(std::string(what) + " is defined for the lower model only");
    }
}

/// prod_{j<d} A(j) entry for the current d-cell.
bool lower_factors_present(const Factors& f, int d) {
    return std::all_of(f.begin() + 1, f.begin() + d, [](std::uint8_t x) { return x != 0; });
}

} // namespace

SymMatrixView centered(const ComplexView& view, bool signed_entries) {
    require_lower(view, "the centered matrix");
    const auto n = view.n();
    const int d = view.d();
    const double pd = view.oracle().prob(d);
    FactorCache cache(view);
    SymMatrix m = assemble(n, d, full_dim(n, d), nullptr,
                           [&](const TopCell& top, std::size_t a, std::size_t b) {
                               const auto& f = cache.get(top);
                               if (!lower_factors_present(f, d)) {
                                   return 0.0;
                               }
                               const double v = double(f[static_cast<std::size_t>(d)]) - pd;
                               return signed_entries ? v * facet_pair_sign(a, b) : v;
                           });
    return {signed_entries ? "centered-signed" : "centered", std::move(m), all_facet_cells(n, d),
            true};
}

SymMatrixView centered_shift(const ComplexView& view, bool signed_entries) {
    require_lower(view, "the centered shift");
    const auto n = view.n();
    const int d = view.d();
    const double pd = view.oracle().prob(d);
    FactorCache cache(view);
    SymMatrix m = assemble(n, d, full_dim(n, d), nullptr,
                           [&](const TopCell& top, std::size_t a, std::size_t b) {
                               const auto& f = cache.get(top);
                               if (!lower_factors_present(f, d)) {
                                   return 0.0;
                               }
                               return signed_entries ? pd * facet_pair_sign(a, b) : pd;
                           });
    return {"shift", std::move(m), all_facet_cells(n, d), true};
}

double normalization_denominator(const ModelParams& params) {
    params.validate();
    double prod = 1.0;
    for (int r = 1; r <= params.d; ++r) {
        prod *= std::pow(params.prob(r), static_cast<double>(binomial(params.d, r)));
    }
    const double pd = params.prob(params.d);
    const double inside = static_cast<double>(params.n) * params.d * prod * (1.0 - pd);
    if (!(inside > 0.0)) {
        throw InvalidArgument("normalization denominator vanishes (p_d = 1)");
    }
    return std::sqrt(inside);
}

SymMatrixView normalize(const SymMatrixView& m, const ModelParams& params) {
    const double denom = normalization_denominator(params);
    return {m.label + "/norm", m.matrix.scaled(1.0 / denom), m.rows, m.extended};
}

LaplacianParts boundary_and_laplacian(const ComplexView& view) {
    const int d = view.d();
    LaplacianParts parts;
    auto& bd = parts.boundary;
    bd.rows = view.list_cells(d - 1);
    bd.cols = view.list_cells(d);

    const auto& facet_member = view.membership_table(d - 1);
    std::vector<std::int64_t> row_map(facet_member.size(), kAbsent);
    for (std::size_t i = 0; i < bd.rows.size(); ++i) {
        row_map[colex_rank(bd.rows[i])] = static_cast<std::int64_t>(i);
    }

    parts.degree.assign(bd.rows.size(), 0.0);
    std::vector<MatrixEntry> entries;
    bd.columns.reserve(bd.cols.size());
    for (const Cell& tau : bd.cols) {
        std::vector<std::pair<std::uint32_t, int>> column;
        for (const auto& [facet, sign] : boundary_with_signs({tau, +1})) {
            const auto row = row_map[colex_rank(facet)];
            if (row == kAbsent) {
                throw InvalidArgument("complex is not downward closed at " + facet.to_string());
            }
            column.emplace_back(static_cast<std::uint32_t>(row), sign);
            parts.degree[static_cast<std::size_t>(row)] += 1.0;
        }
        for (const auto& [ra, sa] : column) {
            for (const auto& [rb, sb] : column) {
                entries.push_back({ra, rb, double(sa * sb)});
            }
        }
        bd.columns.push_back(std::move(column));
    }
    parts.laplacian = SymMatrix::from_entries(bd.rows.size(), std::move(entries));
    return parts;
}

SymMatrix degree_minus_laplacian(const LaplacianParts& parts) {
    std::vector<MatrixEntry> diag;
    for (std::size_t i = 0; i < parts.degree.size(); ++i) {
        diag.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i), parts.degree[i]});
    }
    return add(SymMatrix::from_entries(parts.degree.size(), std::move(diag)), parts.laplacian, -1.0);
}

double entry_covariance(const std::pair<Cell, Cell>& pair1, const std::pair<Cell, Cell>& pair2,
                        const ModelParams& params) {
    params.validate();
    const int d = params.d;
    auto top_of = [&](const std::pair<Cell, Cell>& pr) {
        if (pr.first.dim() != d - 1 || pr.second.dim() != d - 1) {
            throw InvalidArgument("covariance pairs must consist of (d-1)-cells");
        }
        Cell u = cell_union(pr.first, pr.second);
        if (u.dim() != d) {
            throw InvalidArgument("pair " + pr.first.to_string() + ", " + pr.second.to_string() +
                                  " does not span a d-cell");
        }
        return u;
    };
    const Cell u1 = top_of(pair1);
    const Cell u2 = top_of(pair2);

    std::array<Vertex, kMaxCellSize> buf{};
    auto* last = std::set_intersection(u1.begin(), u1.end(), u2.begin(), u2.end(), buf.begin());
    const Cell shared(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(last - buf.data())));

    // q: probability that every cell (dim >= 1) inside the shared part is drawn.
    double q = 1.0;
    for (int j = 1; j <= shared.dim(); ++j) {
        q *= std::pow(params.prob(j), static_cast<double>(binomial(shared.size(), j + 1)));
    }
    // Cells of either union not inside the shared part.
    double rest = 1.0;
    for (const Cell& u : {u1, u2}) {
        for (int j = 1; j <= d; ++j) {
            const auto all = binomial(u.size(), j + 1);
            const auto inside = binomial(shared.size(), j + 1);
            rest *= std::pow(params.prob(j), static_cast<double>(all - inside));
        }
    }
    return rest * q * (1.0 - q);
}

std::string to_string(MatrixKind k) {
    switch (k) {
    case MatrixKind::unsigned_adj: return "unsigned";
    case MatrixKind::signed_adj: return "signed";
    case MatrixKind::extended: return "extended";
    case MatrixKind::extended_signed: return "extended-signed";
    case MatrixKind::centered: return "centered";
    case MatrixKind::centered_signed: return "centered-signed";
    }
    return "unknown";
}

MatrixKind parse_matrix_kind(const std::string& s) {
    for (auto k : {MatrixKind::unsigned_adj, MatrixKind::signed_adj, MatrixKind::extended,
                   MatrixKind::extended_signed, MatrixKind::centered, MatrixKind::centered_signed}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    throw InvalidArgument("unknown matrix kind '" + s + "'");
}

bool is_extended(MatrixKind k) {
    return k != MatrixKind::unsigned_adj && k != MatrixKind::signed_adj;
}

SymMatrixView build_matrix(const ComplexView& view, MatrixKind kind) {
    switch (kind) {
    case MatrixKind::unsigned_adj: return restricted(view, false);
    case MatrixKind::signed_adj: return restricted(view, true);
    case MatrixKind::extended: return extended_adjacency(view, false);
    case MatrixKind::extended_signed: return extended_adjacency(view, true);
    case MatrixKind::centered: return centered(view, false);
    case MatrixKind::centered_signed: return centered(view, true);
    }
    throw InvalidArgument("unknown matrix kind");
}

void write_coordinates(const SymMatrix& m, std::ostream& os) {
    os << m.dim() << ' ' << m.nnz() << '\n';
    char buf[64];
    m.for_each([&](std::size_t r, std::size_t c, double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << r << ' ' << c << ' ' << buf << '\n';
    });
}

void write_row_cells(const SymMatrixView& m, std::ostream& os) {
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        os << i << ' ';
        for (std::size_t k = 0; k < m.rows[i].size(); ++k) {
            os << (k ? "," : "") << m.rows[i][k];
        }
        os << '\n';
    }
}

} // namespace rsc
