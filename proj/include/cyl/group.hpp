#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cyl/linalg.hpp"

namespace cyl {

enum class FactorKind { RealSpecialLinear, ComplexSpecialLinear2 };

struct FactorSpec {
    FactorKind kind = FactorKind::RealSpecialLinear;
    int dimension = 2;          // complex factors force dimension 2
    bool projectivized = false; // identify g with -g
    int rank() const { return dimension - 1; }
};

// One group element: one matrix per factor.
using MatrixTuple = std::vector<Mat>;

// Letters of the free group on k generators: letter = 2*gen for the
// generator, 2*gen+1 for its inverse. Inversion is letter ^ 1, and the
// natural integer order is the canonical order (gen 1 < gen 1' < gen 2 < ...).
using Letter = std::int16_t;
inline Letter inverse_letter(Letter l) { return static_cast<Letter>(l ^ 1); }

// Freely reduced word; construct through reduce_word.
struct Word {
    std::vector<Letter> letters;
    int size() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }
};

struct GroupSpec {
    std::vector<FactorSpec> factors;
    std::vector<MatrixTuple> generators;  // one tuple per generator
    double tolerance = 1e-10;
    std::map<std::string, std::string> metadata;  // user assertions (Anosov, Zariski density)

    int generator_count() const { return static_cast<int>(generators.size()); }
    int total_rank() const;
    int ambient_dim() const;  // sum of factor dimensions (flattened a-coordinates)
};

// JSON schema: {"factors":[{"kind","dimension","projectivized"}],
//               "generators":[[row-major matrix per factor, ...], ...],
//               "tolerance": t, "metadata": {...}}
// Complex entries as [re, im]; real entries as numbers or [re, 0].
GroupSpec parse_group_config(const std::string& text);
std::string serialize_group_config(const GroupSpec& spec);

Word reduce_word(const std::vector<Letter>& raw);
Word inverse_word(const Word& w);
Word concat(const Word& u, const Word& v);  // reduces at the seam

// Left-to-right product of generator matrices; empty word -> identity tuple.
// Renormalizes by the determinant root after each multiplication. Throws
// NumericError if an entry exceeds the representable guard (~1e100).
MatrixTuple evaluate_word(const GroupSpec& spec, const Word& w);

MatrixTuple identity_tuple(const GroupSpec& spec);
MatrixTuple tuple_multiply(const MatrixTuple& a, const MatrixTuple& b);
MatrixTuple tuple_inverse(const MatrixTuple& a);

// equality up to tolerance; projectivized factors compare up to global sign
bool tuples_equal(const GroupSpec& spec, const MatrixTuple& a, const MatrixTuple& b, double tol);

// text form: `a b' c` (apostrophe = inverse); generators a..z, then g26,...
std::string word_to_text(const Word& w);
Word word_from_text(const std::string& text, int generator_count);

}  // namespace cyl
