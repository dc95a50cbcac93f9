#include "rsc/sampler.hpp"

#include "rsc/error.hpp"

#include <cmath>
#include <limits>

namespace rsc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kSeedSalt = 0x243F6A8885A308D3ull;
constexpr std::uint64_t kAlways = std::numeric_limits<std::uint64_t>::max();

void check_probs(const std::vector<double>& p) {
    if (p.empty()) {
        throw InvalidArgument("probability vector is empty");
    }
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (!(p[i] > 0.0 && p[i] <= 1.0)) {
            throw InvalidArgument("p_" + std::to_string(i + 1) + " = " + std::to_string(p[i]) +
                                  " is outside (0, 1]");
        }
    }
}

} // namespace

void ModelParams::validate() const {
    if (d < 2) {
        throw InvalidArgument("d must be at least 2");
    }
    if (static_cast<std::size_t>(d) + 1 > kMaxCellSize) {
        throw InvalidArgument("d exceeds the supported maximum of " +
                              std::to_string(kMaxCellSize - 1));
    }
    if (n < static_cast<std::uint32_t>(d) + 1) {
        throw InvalidArgument("n must be at least d + 1");
    }
    if (p.size() != static_cast<std::size_t>(d)) {
        throw InvalidArgument("expected " + std::to_string(d) + " probabilities, got " +
                              std::to_string(p.size()));
    }
    check_probs(p);
}

double ModelParams::prob(int dim) const {
    if (dim < 1 || dim > d) {
        throw InvalidDimension("no probability for dimension " + std::to_string(dim));
    }
    return p[static_cast<std::size_t>(dim) - 1];
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t cell_hash(std::uint64_t seed, const Cell& tau) {
    std::uint64_t h = mix64(seed ^ kSeedSalt);
    h = mix64(h ^ (static_cast<std::uint64_t>(tau.dim()) + kGolden));
    for (Vertex v : tau) {
        h = mix64(h ^ (static_cast<std::uint64_t>(v) + kGolden));
    }
    return h;
}

std::uint64_t bernoulli_threshold(double p) {
    if (p >= 1.0) {
        return kAlways;
    }
    if (p <= 0.0) {
        return 0;
    }
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

OutcomeOracle::OutcomeOracle(std::vector<double> p, std::uint64_t seed)
    : p_(std::move(p)), seed_(seed) {
    check_probs(p_);
    for (double q : p_) {
        thresholds_.push_back(bernoulli_threshold(q));
    }
}

OutcomeOracle::OutcomeOracle(const ModelParams& params) : OutcomeOracle(params.p, params.seed) {
    params.validate();
}

OutcomeOracle OutcomeOracle::from_source(std::vector<double> p, Source source) {
    OutcomeOracle o(std::move(p), 0);
    o.source_ = std::move(source);
    return o;
}

double OutcomeOracle::prob(int dim) const {
    if (dim < 1 || dim > d()) {
        throw InvalidDimension("no probability for dimension " + std::to_string(dim));
    }
    return p_[static_cast<std::size_t>(dim) - 1];
}

bool OutcomeOracle::chi(const Cell& tau) const {
    const int j = tau.dim();
    if (j < 1 || j > d()) {
        throw InvalidDimension("chi is defined for cells of dimension 1.." + std::to_string(d()) +
                               ", got " + std::to_string(j));
    }
    if (source_) {
        return source_(tau);
    }
    const std::uint64_t t = thresholds_[static_cast<std::size_t>(j) - 1];
    if (t == kAlways) {
        return true;
    }
    return cell_hash(seed_, tau) < t;
}

std::string to_string(Model m) {
    return m == Model::lower ? "lower" : "upper";
}

Model parse_model(const std::string& s) {
    if (s == "lower") {
        return Model::lower;
    }
    if (s == "upper") {
        return Model::upper;
    }
    throw InvalidArgument("unknown model '" + s + "' (expected lower or upper)");
}

struct ComplexView::Memo {
    std::array<std::once_flag, kMaxCellSize> chi_once;
    std::array<std::once_flag, kMaxCellSize> member_once;
    std::array<std::vector<std::uint8_t>, kMaxCellSize> chi;
    std::array<std::vector<std::uint8_t>, kMaxCellSize> member;
};

ComplexView::ComplexView(OutcomeOracle oracle, std::uint32_t n, Model model)
    : oracle_(std::move(oracle)), n_(n), model_(model), memo_(std::make_shared<Memo>()) {
    if (n_ < static_cast<std::uint32_t>(oracle_.d()) + 1) {
        throw InvalidArgument("n must be at least d + 1");
    }
    if (static_cast<std::size_t>(oracle_.d()) + 1 > kMaxCellSize) {
        throw InvalidArgument("d exceeds the supported maximum");
    }
}

void ComplexView::check_dim(int j) const {
    if (j < 1 || j > d()) {
        throw InvalidDimension("dimension " + std::to_string(j) + " outside [1, " +
                               std::to_string(d()) + "]");
    }
}

const std::vector<std::uint8_t>& ComplexView::chi_table(int j) const {
    check_dim(j);
    const auto k = static_cast<std::size_t>(j);
    std::call_once(memo_->chi_once[k], [&] {
        auto& table = memo_->chi[k];
        table.resize(binomial(n_, k + 1));
        for_each_cell(n_, j, [&](const Cell& c, Rank r) { table[r] = oracle_.chi(c) ? 1 : 0; });
    });
    return memo_->chi[k];
}

const std::vector<std::uint8_t>& ComplexView::membership_table(int j) const {
    check_dim(j);
    const auto k = static_cast<std::size_t>(j);
    std::call_once(memo_->member_once[k], [&] {
        const auto& chi = chi_table(j);
        auto& table = memo_->member[k];
        if (model_ == Model::lower) {
            if (j == 1) {
                table = chi;
                return;
            }
            // Present iff its own outcome is 1 and every facet is present.
            const auto& below = membership_table(j - 1);
            table.assign(chi.size(), 0);
            for_each_cell(n_, j, [&](const Cell& c, Rank r) {
                if (!chi[r]) {
                    return;
                }
                for (std::size_t i = 0; i < c.size(); ++i) {
                    if (!below[colex_rank(c.without_position(i))]) {
                        return;
                    }
                }
                table[r] = 1;
            });
        } else {
            table = chi;
            if (j == d()) {
                return;
            }
            // Present iff drawn itself or some present cofacet exists.
            const auto& above = membership_table(j + 1);
            for_each_cell(n_, j + 1, [&](const Cell& c, Rank r) {
                if (!above[r]) {
                    return;
                }
                for (std::size_t i = 0; i < c.size(); ++i) {
                    table[colex_rank(c.without_position(i))] = 1;
                }
            });
        }
    });
    return memo_->member[k];
}

bool ComplexView::member(const Cell& sigma) const {
    if (sigma.empty()) {
        throw InvalidDimension("the empty cell is not queried");
    }
    if (sigma.max_vertex() > n_) {
        throw IndexError("cell " + sigma.to_string() + " lies outside [1, " + std::to_string(n_) +
                         "]");
    }
    if (sigma.dim() == 0) {
        return true;
    }
    if (sigma.dim() > d()) {
        throw InvalidDimension("cell " + sigma.to_string() + " has dimension above d = " +
                               std::to_string(d()));
    }
    return membership_table(sigma.dim())[colex_rank(sigma)] != 0;
}

std::vector<Cell> ComplexView::list_cells(int j) const {
    if (j == 0) {
        return enumerate_cells(n_, 0);
    }
    const auto& table = membership_table(j);
    std::vector<Cell> out;
    for_each_cell(n_, j, [&](const Cell& c, Rank r) {
        if (table[r]) {
            out.push_back(c);
        }
    });
    return out;
}

std::uint64_t ComplexView::count_cells(int j) const {
    if (j == 0) {
        return n_;
    }
    std::uint64_t count = 0;
    for (auto b : membership_table(j)) {
        count += b;
    }
    return count;
}

std::uint64_t count_dminus1(const ComplexView& view) {
    return view.count_cells(view.d() - 1);
}

std::uint64_t count_maximal(const ComplexView& view) {
    const int d = view.d();
    const auto& facets = view.membership_table(d - 1);
    const auto& tops = view.membership_table(d);
    std::vector<std::uint8_t> covered(facets.size(), 0);
    for_each_cell(view.n(), d, [&](const Cell& c, Rank r) {
        if (!tops[r]) {
            return;
        }
        for (std::size_t i = 0; i < c.size(); ++i) {
            covered[colex_rank(c.without_position(i))] = 1;
        }
    });
    std::uint64_t count = 0;
    for (std::size_t r = 0; r < facets.size(); ++r) {
        count += (facets[r] && !covered[r]) ? 1 : 0;
    }
    return count;
}

double lower_membership_probability(const ModelParams& params, int j) {
    double q = 1.0;
    for (int i = 1; i <= j; ++i) {
        q *= std::pow(params.prob(i), static_cast<double>(binomial(j + 1, i + 1)));
    }
    return q;
}

double dom_c_value(const ModelParams& params) {
    params.validate();
    double c = 1.0;
    for (int i = 1; i <= params.d - 1; ++i) {
        c *= std::pow(params.prob(i), static_cast<double>(binomial(params.d, i + 1)));
    }
    return c;
}

double expected_fdminus1(const ModelParams& params) {
    return static_cast<double>(binomial(params.n, params.d)) * dom_c_value(params);
}

double expected_maximal(const ModelParams& params) {
    double cover = 1.0;
    for (int i = 1; i <= params.d; ++i) {
        cover *= std::pow(params.prob(i), static_cast<double>(binomial(params.d, i)));
    }
    return expected_fdminus1(params) *
           std::pow(1.0 - cover, static_cast<double>(params.n - params.d));
}

} // namespace rsc
