#pragma once

// Sparse symmetric matrices indexed by (d-1)-cells and the assembly of every
// adjacency-type matrix of a random complex: restricted/extended, signed,
// Hadamard factors, centered, normalized, boundary and Laplacian.

#include "rsc/cells.hpp"
#include "rsc/sampler.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rsc {

struct MatrixEntry {
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    double value = 0.0;
};

/// Symmetric matrix in compressed-row form holding both triangles.
/// Immutable after construction.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : dim_(dim), row_ptr_(dim + 1, 0) {}

    /// Builds from a coordinate list. Repeated coordinates are summed and
    /// explicit zeros dropped. Both (r, c) and (c, r) must be supplied;
    /// throws InvalidArgument if the result is not symmetric.
    static SymMatrix from_entries(std::size_t dim, std::vector<MatrixEntry> entries);

    std::size_t dim() const { return dim_; }
    std::size_t nnz() const { return cols_.size(); }

    double entry(std::size_t row, std::size_t col) const;

    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const std::uint32_t> cols() const { return cols_; }
    std::span<const double> values() const { return values_; }

    /// y = M x.
    void multiply(std::span<const double> x, std::span<double> y) const;

    double trace() const;
    double frobenius_sq() const;
    double max_abs() const;
    /// Largest number of nonzeros in any row.
    std::size_t max_row_nnz() const;

    SymMatrix scaled(double factor) const;

    /// Column-major dense copy (dim * dim).
    std::vector<double> to_dense() const;

    /// Visits every stored nonzero as fn(row, col, value).
    template <typename Fn>
    void for_each(Fn&& fn) const {
        for (std::size_t r = 0; r < dim_; ++r) {
            for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                fn(r, static_cast<std::size_t>(cols_[k]), values_[k]);
            }
        }
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> cols_;
    std::vector<double> values_;
};

/// max |A - B| over all coordinates; throws on dimension mismatch.
double max_abs_difference(const SymMatrix& a, const SymMatrix& b);
SymMatrix hadamard(const SymMatrix& a, const SymMatrix& b);
SymMatrix add(const SymMatrix& a, const SymMatrix& b, double b_scale = 1.0);

/// A symmetric matrix together with the (d-1)-cell labelling its rows.
/// Extended matrices are indexed by all of K^{d-1} (dim = C(n, d));
/// restricted ones by the colex-sorted (d-1)-cells of the complex.
struct SymMatrixView {
    std::string label;
    SymMatrix matrix;
    std::vector<Cell> rows;
    bool extended = false;

    std::size_t dim() const { return matrix.dim(); }
};

/// A_n(j): entry prod_{tau subset of s u s', dim tau = j} chi_tau when
/// s u s' is a d-cell, else 0. Indexed by K^{d-1}.
SymMatrixView hadamard_factor(const ComplexView& view, int j);

/// Extended unsigned adjacency via the product route:
/// entry(s, s') = prod over all cells tau of s u s' (dim >= 1) of chi_tau.
SymMatrixView extended_unsigned(const ComplexView& view);

/// sgn(K^d) over K^{d-1}.
SymMatrixView sign_matrix(std::uint32_t n, int d);

/// Unsigned adjacency of the complete d-complex on [n] (the 0/1 pattern of
/// |s n s'| = d - 1), over K^{d-1}.
SymMatrixView complete_adjacency(std::uint32_t n, int d);

/// Restricted adjacency of a view: rows are its (d-1)-cells, entry nonzero
/// iff s u s' is a d-cell of the view (sign_entry when signed).
SymMatrixView restricted(const ComplexView& view, bool signed_entries);

/// Restricted adjacency padded with zero rows/columns to K^{d-1}.
SymMatrixView extended_adjacency(const ComplexView& view, bool signed_entries);

/// B = (prod_{j<d} A(j)) (A(d) - p_d * complete adjacency); signed multiplies
/// by sgn(K^d). Indexed by K^{d-1}.
SymMatrixView centered(const ComplexView& view, bool signed_entries);

/// p_d * prod_{j<d} A(j) (times sgn(K^d) when signed); the non-random-mean
/// part with Ahat = B + this.
SymMatrixView centered_shift(const ComplexView& view, bool signed_entries);

/// sqrt(n d prod_{r=1}^{d} p_r^{C(d,r)} (1 - p_d)); throws InvalidArgument
/// when it vanishes (p_d = 1).
double normalization_denominator(const ModelParams& params);

SymMatrixView normalize(const SymMatrixView& m, const ModelParams& params);

/// Signed boundary d-cells -> (d-1)-cells of a complex: column t holds the
/// d+1 facets of cols[t] with signs (+1, -1, +1, ...).
struct BoundaryMatrix {
    std::vector<Cell> rows;
    std::vector<Cell> cols;
    /// (row index, sign) per column.
    std::vector<std::vector<std::pair<std::uint32_t, int>>> columns;
};

struct LaplacianParts {
    BoundaryMatrix boundary;
    /// L = boundary * boundary^t over the (d-1)-cells.
    SymMatrix laplacian;
    /// Number of d-cells of the view containing each (d-1)-cell.
    std::vector<double> degree;
};

LaplacianParts boundary_and_laplacian(const ComplexView& view);

/// D - L as a matrix (diagonal of degrees minus the Laplacian).
SymMatrix degree_minus_laplacian(const LaplacianParts& parts);

/// Covariance of two extended-adjacency entries of the lower model, each
/// given by a pair of (d-1)-cells whose union is a d-cell.
double entry_covariance(const std::pair<Cell, Cell>& pair1, const std::pair<Cell, Cell>& pair2,
                        const ModelParams& params);

/// The matrix variants the experiment runner can build.
enum class MatrixKind {
    unsigned_adj,
    signed_adj,
    extended,
    extended_signed,
    centered,
    centered_signed,
};

std::string to_string(MatrixKind k);
MatrixKind parse_matrix_kind(const std::string& s);
bool is_extended(MatrixKind k);

SymMatrixView build_matrix(const ComplexView& view, MatrixKind kind);

/// Coordinate export: header "dim nnz", then "row col value" per stored
/// nonzero (0-based, both triangles).
void write_coordinates(const SymMatrix& m, std::ostream& os);
/// Row sidecar: "row v1,v2,..." per row.
void write_row_cells(const SymMatrixView& m, std::ostream& os);

} // namespace rsc
