#include "rsc/words.hpp"

#include "rsc/error.hpp"
#include "rsc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace rsc {

namespace {

constexpr int kMaxWordLength = 10;
constexpr int kMaxWordDim = 4;

void check_letters(const std::vector<Cell>& letters, int d) {
    if (d < 1) {
        throw InvalidArgument("word dimension must be positive");
    }
    if (letters.empty()) {
        throw InvalidArgument("a word needs at least one letter");
    }
    for (const Cell& c : letters) {
        if (c.dim() != d - 1) {
            throw InvalidArgument("letter " + c.to_string() + " is not a (d-1)-cell for d = " +
                                  std::to_string(d));
        }
    }
}

bool is_step(const Cell& a, const Cell& b) {
    return intersection_size(a, b) + 1 == a.size();
}

Edge make_edge(const Cell& a, const Cell& b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

unsigned __int128 falling(std::uint64_t n, std::uint64_t s) {
    unsigned __int128 r = 1;
    for (std::uint64_t i = 0; i < s; ++i) {
        r *= n - i;
    }
    return r;
}

std::uint64_t factorial(std::uint64_t n) {
    std::uint64_t r = 1;
    for (std::uint64_t i = 2; i <= n; ++i) {
        r *= i;
    }
    return r;
}

} // namespace

bool validate_word(const std::vector<Cell>& letters, int d) {
    check_letters(letters, d);
    for (std::size_t i = 0; i + 1 < letters.size(); ++i) {
        if (!is_step(letters[i], letters[i + 1])) {
            return false;
        }
    }
    return true;
}

std::set<Cell> supp(const Word& w, int u) {
    if (u < 0 || u > w.d) {
        throw InvalidDimension("support dimension " + std::to_string(u) + " outside [0, d]");
    }
    std::set<Cell> out;
    for (std::size_t i = 0; i + 1 < w.letters.size(); ++i) {
        for (const Cell& c : subcells(cell_union(w.letters[i], w.letters[i + 1]), u)) {
            out.insert(c);
        }
    }
    return out;
}

Multiplicities multiplicities(const Word& w) {
    Multiplicities m;
    for (std::size_t i = 0; i + 1 < w.letters.size(); ++i) {
        const Cell& a = w.letters[i];
        const Cell& b = w.letters[i + 1];
        if (!is_step(a, b)) {
            throw InvalidArgument("letters " + a.to_string() + " and " + b.to_string() +
                                  " do not span a d-cell");
        }
        m.cell[cell_union(a, b)] += 1;
        m.edge[make_edge(a, b)] += 1;
    }
    return m;
}

Word canonical_form(const Word& w) {
    check_letters(w.letters, w.d);
    std::unordered_map<Vertex, Vertex> label;
    Vertex next = 1;
    for (Vertex v : w.letters.front()) {
        label[v] = next++;
    }
    Word out{{}, w.d};
    out.letters.reserve(w.letters.size());
    for (const Cell& c : w.letters) {
        std::array<Vertex, kMaxCellSize> buf{};
        for (std::size_t i = 0; i < c.size(); ++i) {
            auto [it, fresh] = label.try_emplace(c[i], next);
            if (fresh) {
                ++next;
            }
            buf[i] = it->second;
        }
        out.letters.push_back(Cell::from_unsorted(std::span<const Vertex>(buf.data(), c.size())));
    }
    return out;
}

WordClass make_class(const Word& w) {
    WordClass wc;
    wc.canon = canonical_form(w);
    wc.k = static_cast<int>(w.letters.size()) - 1;
    std::set<Vertex> verts;
    for (const Cell& c : wc.canon.letters) {
        verts.insert(c.begin(), c.end());
    }
    wc.s = static_cast<int>(verts.size());
    wc.mult = multiplicities(wc.canon);
    return wc;
}

namespace {

/// Depth-first generation of canonical closed words.
class ClassSearch {
public:
    ClassSearch(int k, int s, int d) : k_(k), s_(s), d_(d) {
        std::array<Vertex, kMaxCellSize> buf{};
        for (int i = 0; i < d; ++i) {
            buf[static_cast<std::size_t>(i)] = static_cast<Vertex>(i + 1);
        }
        start_ = Cell(std::span<const Vertex>(buf.data(), static_cast<std::size_t>(d)));
        letters_.push_back(start_);
        used_ = static_cast<Vertex>(d);
    }

    std::vector<Word> run() {
        descend(0);
        return std::move(found_);
    }

private:
    void descend(int step) {
        const Cell cur = letters_.back();
        const int remaining = k_ - step;
        if (remaining == 0) {
            if (cur == start_ && static_cast<int>(used_) == s_ && singles_ == 0) {
                found_.push_back(Word{letters_, d_});
            }
            return;
        }
        const int away = static_cast<int>(start_.size() - intersection_size(cur, start_));
        if (away > remaining || singles_ > remaining || s_ - static_cast<int>(used_) > remaining) {
            return;
        }
        const Vertex top = std::min<Vertex>(used_ + 1, static_cast<Vertex>(s_));
        for (std::size_t drop = 0; drop < cur.size(); ++drop) {
            const Cell base = cur.without_position(drop);
            for (Vertex v = 1; v <= top; ++v) {
                if (cur.contains(v)) {
                    continue;
                }
                const Cell tau = cur.with_vertex(v);
                int& count = counts_[tau];
                ++count;
                singles_ += count == 1 ? 1 : (count == 2 ? -1 : 0);
                const bool fresh = v > used_;
                if (fresh) {
                    ++used_;
                }
                letters_.push_back(base.with_vertex(v));

                descend(step + 1);

                letters_.pop_back();
                if (fresh) {
                    --used_;
                }
                singles_ -= count == 1 ? 1 : (count == 2 ? -1 : 0);
                --count;
            }
        }
    }

    int k_, s_, d_;
    Cell start_;
    std::vector<Cell> letters_;
    Vertex used_ = 0;
    int singles_ = 0;
    std::map<Cell, int> counts_;
    std::vector<Word> found_;
};

} // namespace

std::vector<WordClass> enumerate_classes(int k, int s, int d) {
    if (k > kMaxWordLength || d > kMaxWordDim) {
        throw ResourceGuard("word enumeration is limited to k <= " + std::to_string(kMaxWordLength) +
                            " and d <= " + std::to_string(kMaxWordDim));
    }
    if (k < 1 || d < 1) {
        throw InvalidArgument("k and d must be positive");
    }
    std::vector<WordClass> out;
    if (s < d + 1 || s > k / 2 + d) {
        return out;
    }
    std::vector<Word> words = ClassSearch(k, s, d).run();
    std::sort(words.begin(), words.end(),
              [](const Word& a, const Word& b) { return a.letters < b.letters; });
    words.erase(std::unique(words.begin(), words.end()), words.end());
    out.reserve(words.size());
    for (const Word& w : words) {
        out.push_back(make_class(w));
    }
    return out;
}

std::uint64_t class_size(const WordClass& wc, std::uint64_t n) {
    const auto s = static_cast<std::uint64_t>(wc.s);
    if (n < s) {
        return 0;
    }
    const unsigned __int128 r = falling(n, s) / factorial(static_cast<std::uint64_t>(wc.canon.d));
    if (r > static_cast<unsigned __int128>(UINT64_MAX)) {
        throw InvalidArgument("class size overflows 64 bits");
    }
    return static_cast<std::uint64_t>(r);
}

bool supp_cardinality_check(const WordClass& wc, int u) {
    const int d = wc.canon.d;
    if (wc.s != wc.k / 2 + d) {
        throw InvalidArgument("support check applies to classes with s = k/2 + d");
    }
    const auto expected = binomial(d, u + 1) + static_cast<std::uint64_t>(wc.k / 2) * binomial(d, u);
    return supp(wc.canon, u).size() == expected;
}

int signed_weight(const WordClass& wc, bool alternate_reading) {
    const int d = wc.canon.d;
    if (!alternate_reading) {
        int sign = 1;
        const auto& l = wc.canon.letters;
        for (std::size_t i = 0; i + 1 < l.size(); ++i) {
            sign *= sign_entry(l[i], l[i + 1], d);
        }
        return sign;
    }
    std::map<Cell, int> negative_edges;
    for (const auto& [e, count] : wc.mult.edge) {
        if (sign_entry(e.first, e.second, d) < 0) {
            negative_edges[cell_union(e.first, e.second)] += 1;
        }
    }
    long exponent = 0;
    for (const auto& [tau, edges] : negative_edges) {
        exponent += static_cast<long>(edges) * wc.mult.cell.at(tau);
    }
    return exponent % 2 ? -1 : 1;
}

namespace {

double normalization_power(const ModelParams& params, int k) {
    double prod = 1.0;
    for (int r = 1; r <= params.d; ++r) {
        prod *= std::pow(params.prob(r), static_cast<double>(binomial(params.d, r)));
    }
    const double den_sq = static_cast<double>(params.n) * params.d * prod * (1.0 - params.prob(params.d));
    if (!(den_sq > 0.0)) {
        throw InvalidArgument("normalization denominator vanishes (p_d = 1)");
    }
    return std::pow(den_sq, k / 2.0);
}

} // namespace

double predicted_moment(int k, const ModelParams& params) {
    if (k <= 0 || k % 2) {
        throw InvalidArgument("moment prediction needs a positive even k");
    }
    params.validate();
    const int d = params.d;
    const int half = k / 2;
    const auto n = static_cast<std::uint64_t>(params.n);
    const auto s = static_cast<std::uint64_t>(half + d);
    if (n < s) {
        return 0.0;
    }
    const double pd = params.prob(d);
    double num = static_cast<double>(catalan(static_cast<unsigned>(half))) * std::pow(d, half) *
                 std::pow(pd * (1.0 - pd), half) * static_cast<double>(falling(n, s)) /
                 static_cast<double>(factorial(static_cast<std::uint64_t>(d)));
    for (int i = 1; i < d; ++i) {
        num *= std::pow(params.prob(i), static_cast<double>(binomial(d, i + 1) +
                                                            static_cast<std::uint64_t>(half) * binomial(d, i)));
    }
    return num / (static_cast<double>(binomial(n, static_cast<std::uint64_t>(d))) *
                  normalization_power(params, k));
}

double exact_expected_moment(int k, const ModelParams& params, bool signed_entries) {
    if (k <= 0) {
        throw InvalidArgument("moment order must be positive");
    }
    params.validate();
    const int d = params.d;
    const double pd = params.prob(d);
    double total = 0.0;
    for (int s = d + 1; s <= k / 2 + d; ++s) {
        for (const WordClass& wc : enumerate_classes(k, s, d)) {
            double term = static_cast<double>(class_size(wc, params.n));
            if (term == 0.0) {
                continue;
            }
            for (int j = 1; j < d; ++j) {
                term *= std::pow(params.prob(j), static_cast<double>(supp(wc.canon, j).size()));
            }
            for (const auto& [tau, count] : wc.mult.cell) {
                term *= pd * std::pow(1.0 - pd, count) + (1.0 - pd) * std::pow(-pd, count);
            }
            if (signed_entries) {
                term *= signed_weight(wc);
            }
            total += term;
        }
    }
    return total / (static_cast<double>(binomial(params.n, static_cast<std::uint64_t>(d))) *
                    normalization_power(params, k));
}

std::string format_word(const Word& w) {
    std::string out;
    for (std::size_t i = 0; i < w.letters.size(); ++i) {
        if (i) {
            out += '|';
        }
        for (std::size_t t = 0; t < w.letters[i].size(); ++t) {
            if (t) {
                out += ',';
            }
            out += std::to_string(w.letters[i][t]);
        }
    }
    return out;
}

Word parse_word(const std::string& text, int d) {
    Word w{{}, d};
    std::istringstream letters(text);
    std::string letter;
    while (std::getline(letters, letter, '|')) {
        std::vector<Vertex> verts;
        std::istringstream vs(letter);
        std::string tok;
        while (std::getline(vs, tok, ',')) {
            try {
                std::size_t used = 0;
                const unsigned long v = std::stoul(tok, &used);
                if (used != tok.size()) {
                    throw InvalidArgument("bad vertex '" + tok + "'");
                }
                verts.push_back(static_cast<Vertex>(v));
            } catch (const std::logic_error&) {
                throw InvalidArgument("bad vertex '" + tok + "' in word '" + text + "'");
            }
        }
        w.letters.emplace_back(std::span<const Vertex>(verts));
    }
    check_letters(w.letters, d);
    return w;
}

void write_classes(const std::vector<WordClass>& classes, std::ostream& os) {
    for (const auto& wc : classes) {
        os << format_word(wc.canon) << '\n';
    }
}

std::vector<WordCountRow> words_verify(int kmax, int d) {
    std::vector<WordCountRow> rows;
    for (int k = 2; k <= kmax; k += 2) {
        WordCountRow row;
        row.k = k;
        row.enumerated = enumerate_classes(k, k / 2 + d, d).size();
        row.expected = catalan(static_cast<unsigned>(k / 2)) *
                       static_cast<std::uint64_t>(std::pow(d, k / 2) + 0.5);
        row.match = row.enumerated == row.expected;
        rows.push_back(row);
    }
    return rows;
}

} // namespace rsc
