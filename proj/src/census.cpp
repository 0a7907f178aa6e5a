#include "cyl/census.hpp"

#include <algorithm>

#include "cyl/errors.hpp"

namespace cyl {

CyclicWord canonical_form(const Word& w) {
    std::vector<Letter> v = w.letters;
    // trim inverse first/last pairs until cyclically reduced
    size_t lo = 0, hi = v.size();
    while (hi - lo >= 2 && v[lo] == inverse_letter(v[hi - 1])) {
        ++lo;
        --hi;
    }
    v.assign(v.begin() + lo, v.begin() + hi);
    if (v.empty()) throw DataError("canonical_form: word is the identity class");
    int n = static_cast<int>(v.size());
    // least rotation (words are short; the quadratic scan is fine)
    int best = 0;
    for (int s = 1; s < n; ++s) {
        for (int i = 0; i < n; ++i) {
            Letter cs = v[(s + i) % n], cb = v[(best + i) % n];
            if (cs != cb) {
                if (cs < cb) best = s;
                break;
            }
        }
    }
    CyclicWord c;
    c.letters.resize(n);
    for (int i = 0; i < n; ++i) c.letters[i] = v[(best + i) % n];
    return c;
}

bool is_primitive(const CyclicWord& c) {
    int n = c.size();
    for (int d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        bool periodic = true;
        for (int i = 0; i < n && periodic; ++i)
            if (c.letters[i] != c.letters[(i + d) % n]) periodic = false;
        if (periodic) return false;
    }
    return true;
}

CyclicWord cyclic_inverse(const CyclicWord& c) {
    Word w;
    for (auto it = c.letters.rbegin(); it != c.letters.rend(); ++it)
        w.letters.push_back(inverse_letter(*it));
    return canonical_form(w);
}

int shard_of(const CyclicWord& c, int generator_count, int shard_count) {
    if (shard_count <= 1) return 0;
    int base = 2 * generator_count;
    int key = c.letters[0];
    key = key * base + (c.size() > 1 ? c.letters[1] : c.letters[0]);
    return key % shard_count;
}

namespace {

struct NecklaceGen {
    int n = 0;
    int alphabet = 0;
    bool primitive_only = false;
    int shard = 0, shard_count = 1, generator_count = 0;
    std::vector<Letter> w;  // 1-indexed
    const std::function<void(const CyclicWord&)>* emit = nullptr;

    // FKM pre-necklace recursion; p = period of w[1..t-1]. Branches that
    // would break free reduction (w[t] = inverse of w[t-1]) are skipped;
    // the wrap-around condition is checked at emission.
    void rec(int t, int p) {
        if (t > n) {
            if (n % p != 0) return;
            if (primitive_only && p != n) return;
            if (n > 1 && w[n] == inverse_letter(w[1])) return;
            CyclicWord c;
            c.letters.assign(w.begin() + 1, w.begin() + n + 1);
            if (shard_count > 1 && shard_of(c, generator_count, shard_count) != shard) return;
            (*emit)(c);
            return;
        }
        Letter lo = w[t - p];
        for (int l = lo; l < alphabet; ++l) {
            if (t > 1 && l == inverse_letter(w[t - 1])) continue;
            w[t] = static_cast<Letter>(l);
            rec(t + 1, l == lo ? p : t);
        }
    }
};

}  // namespace

void enumerate_classes(int generator_count, int max_length, bool primitive_only,
                       const std::function<void(const CyclicWord&)>& emit,
                       int shard, int shard_count) {
    if (generator_count < 2) throw ConfigError("enumerate_classes: need k >= 2 generators");
    if (max_length < 1) throw ConfigError("enumerate_classes: need max length >= 1");
    NecklaceGen gen;
    gen.alphabet = 2 * generator_count;
    gen.primitive_only = primitive_only;
    gen.shard = shard;
    gen.shard_count = shard_count;
    gen.generator_count = generator_count;
    gen.emit = &emit;
    for (int n = 1; n <= max_length; ++n) {
        gen.n = n;
        gen.w.assign(n + 1, 0);
        gen.rec(1, 1);
    }
}

std::vector<CyclicWord> enumerate_classes_vec(int generator_count, int max_length,
                                              bool primitive_only, int shard, int shard_count) {
    std::vector<CyclicWord> out;
    enumerate_classes(generator_count, max_length, primitive_only,
                      [&](const CyclicWord& c) { out.push_back(c); }, shard, shard_count);
    return out;
}

long class_count(int generator_count, int max_length, bool primitive_only) {
    long count = 0;
    enumerate_classes(generator_count, max_length, primitive_only,
                      [&](const CyclicWord&) { ++count; });
    return count;
}

}  // namespace cyl
