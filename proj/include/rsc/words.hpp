#pragma once

// Closed words of (d-1)-cells: supports, multiplicities, canonical labels,
// exhaustive class enumeration, class sizes, signs and moment predictions.

#include "rsc/cells.hpp"
#include "rsc/sampler.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rsc {

struct Word {
    std::vector<Cell> letters;
    int d = 2;

    std::size_t length() const { return letters.size(); }
    bool closed() const { return letters.size() > 1 && letters.front() == letters.back(); }

    friend bool operator==(const Word&, const Word&) = default;
};

/// Throws InvalidArgument unless every letter is a (d-1)-cell; returns true
/// iff every consecutive union is a d-cell.
bool validate_word(const std::vector<Cell>& letters, int d);

/// u-cells contained in some consecutive union sigma_i u sigma_{i+1}.
std::set<Cell> supp(const Word& w, int u);

using Edge = std::pair<Cell, Cell>;

struct Multiplicities {
    /// N_w(tau) per d-cell.
    std::map<Cell, int> cell;
    /// N_w(e) per unordered edge, stored with first < second.
    std::map<Edge, int> edge;
};

Multiplicities multiplicities(const Word& w);

/// Relabels so the first letter is {1..d} (order preserving on it) and new
/// vertices receive the next unused label in order of first appearance.
Word canonical_form(const Word& w);

struct WordClass {
    Word canon;
    int k = 0;
    int s = 0;
    Multiplicities mult;
};

/// Classes of closed words of length k+1 with |supp_0| = s and no d-cell
/// traversed exactly once, in lexicographic order of their canonical words.
/// Empty when s lies outside [d+1, k/2+d]. Throws ResourceGuard for k > 10
/// or d > 4.
std::vector<WordClass> enumerate_classes(int k, int s, int d);

WordClass make_class(const Word& w);

/// n! / ((n-s)! d!) words on [n] share a class; 0 when n < s.
std::uint64_t class_size(const WordClass& wc, std::uint64_t n);

/// |supp_u| = C(d, u+1) + (k/2) C(d, u) for a class of maximal support.
/// Throws InvalidArgument if wc does not have s = k/2 + d.
bool supp_cardinality_check(const WordClass& wc, int u);

/// Product over d-cells tau of (-1)^(sum over negative edges e of tau of
/// N_w(e)). With the alternate reading the exponent uses N_w(tau) once per
/// negative edge.
int signed_weight(const WordClass& wc, bool alternate_reading = false);

/// Dominant-class prediction of E m_k(H_n) (classes with s = k/2 + d only).
/// Throws InvalidArgument for odd or non-positive k.
double predicted_moment(int k, const ModelParams& params);

/// E m_k of the normalized centered extended matrix summed over every class
/// of every support size, using
///   P(E_w) = prod_{j<d} p_j^{|supp_j|},
///   T(w)   = prod_tau E (chi_tau - p_d)^{N_w(tau)}.
/// signed multiplies each class by signed_weight.
double exact_expected_moment(int k, const ModelParams& params, bool signed_entries = false);

/// "1,2|1,3|..." for one word.
std::string format_word(const Word& w);
/// Inverse of format_word; throws InvalidArgument on malformed text.
Word parse_word(const std::string& text, int d);
void write_classes(const std::vector<WordClass>& classes, std::ostream& os);

struct WordCountRow {
    int k = 0;
    std::uint64_t enumerated = 0;
    std::uint64_t expected = 0;
    bool match = false;
};

/// Enumerated |W_{k/2+d}^k| against catalan(k/2) d^(k/2) for even k <= kmax.
std::vector<WordCountRow> words_verify(int kmax, int d);

} // namespace rsc
