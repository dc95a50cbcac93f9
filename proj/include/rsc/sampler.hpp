#pragma once

// Reproducible Bernoulli outcomes for every cell, the lower and upper
// random complexes built from them, and exact/empirical cell statistics.

#include "rsc/cells.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace rsc {

/// Parameters of the multi-parameter model: n vertices, top dimension d,
/// inclusion probabilities p_1..p_d (stored 0-based: p[0] = p_1).
struct ModelParams {
    std::uint32_t n = 0;
    int d = 2;
    std::vector<double> p;
    std::uint64_t seed = 0;

    /// Throws InvalidArgument unless d >= 2, n >= d + 1, |p| = d and
    /// every p_i lies in (0, 1].
    void validate() const;

    /// p_j for a cell dimension j in [1, d].
    double prob(int dim) const;
};

/// 64-bit avalanche finalizer (the SplitMix64 output function).
std::uint64_t mix64(std::uint64_t z);

/// Hash of (seed, dim, vertices) used to draw chi_tau:
///   h = mix64(seed ^ 0x243F6A8885A308D3)
///   h = mix64(h ^ (dim + 0x9E3779B97F4A7C15))
///   for each vertex v ascending: h = mix64(h ^ (v + 0x9E3779B97F4A7C15))
std::uint64_t cell_hash(std::uint64_t seed, const Cell& tau);

/// floor(p * 2^64); p >= 1 maps to "always" and is handled by the caller.
std::uint64_t bernoulli_threshold(double p);

/// Deterministic map cell -> chi_tau in {0, 1}. Does not depend on n, so
/// complexes on [n] and [n'] built from one oracle agree inside [min(n, n')].
class OutcomeOracle {
public:
    using Source = std::function<bool(const Cell&)>;

    /// p holds p_1..p_d; d = p.size().
    OutcomeOracle(std::vector<double> p, std::uint64_t seed);
    explicit OutcomeOracle(const ModelParams& params);

    /// Oracle whose outcomes come from `source` instead of the hash. Used to
    /// pin specific configurations in tests.
    static OutcomeOracle from_source(std::vector<double> p, Source source);

    int d() const { return static_cast<int>(p_.size()); }
    double prob(int dim) const;
    const std::vector<double>& probs() const { return p_; }
    std::uint64_t seed() const { return seed_; }

    /// chi_tau; throws InvalidDimension unless 1 <= dim(tau) <= d.
    bool chi(const Cell& tau) const;

private:
    std::vector<double> p_;
    std::vector<std::uint64_t> thresholds_;
    std::uint64_t seed_ = 0;
    Source source_;
};

enum class Model { lower, upper };

std::string to_string(Model m);
Model parse_model(const std::string& s);

/// A random complex on [n] viewed through an oracle. Membership tables are
/// filled lazily, one dimension at a time, and are safe to read from
/// concurrent callers.
class ComplexView {
public:
    ComplexView(OutcomeOracle oracle, std::uint32_t n, Model model);

    const OutcomeOracle& oracle() const { return oracle_; }
    std::uint32_t n() const { return n_; }
    int d() const { return oracle_.d(); }
    Model model() const { return model_; }

    /// Vertices are always members; dims above d throw InvalidDimension.
    bool member(const Cell& sigma) const;

    /// chi outcomes of all j-cells of [n], indexed by colex rank.
    const std::vector<std::uint8_t>& chi_table(int j) const;
    /// Membership of all j-cells of [n], indexed by colex rank (1 <= j <= d).
    const std::vector<std::uint8_t>& membership_table(int j) const;

    /// All j-cells of the complex in colex order (j = 0 gives all vertices).
    std::vector<Cell> list_cells(int j) const;
    std::uint64_t count_cells(int j) const;

private:
    struct Memo;

    void check_dim(int j) const;

    OutcomeOracle oracle_;
    std::uint32_t n_;
    Model model_;
    std::shared_ptr<Memo> memo_;
};

/// f_{d-1}: number of (d-1)-cells of a lower-model view.
std::uint64_t count_dminus1(const ComplexView& view);

/// N_{d-1}: (d-1)-cells of the view contained in no d-cell of the view.
std::uint64_t count_maximal(const ComplexView& view);

/// C(n,d) * prod_{i<d} p_i^C(d,i+1).
double expected_fdminus1(const ModelParams& params);

/// C(n,d) * prod_{i<d} p_i^C(d,i+1) * (1 - prod_{i<=d} p_i^C(d,i))^(n-d).
double expected_maximal(const ModelParams& params);

/// c = prod_{i=1}^{d-1} p_i^{C(d, i+1)}.
double dom_c_value(const ModelParams& params);

/// Probability that a fixed j-cell is in the lower model:
/// prod_{i=1}^{j} p_i^C(j+1, i+1).
double lower_membership_probability(const ModelParams& params, int j);

} // namespace rsc
