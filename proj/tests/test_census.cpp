#include <doctest.h>

#include <map>
#include <set>

#include "cyl/census.hpp"
#include "cyl/errors.hpp"
#include "cyl/rng.hpp"

using namespace cyl;

namespace {

// Brute-force oracle: enumerate every cyclically reduced word of length n,
// group by rotation orbit, return the canonical representatives.
std::set<std::vector<Letter>> brute_classes(int k, int n, bool primitive_only) {
    std::set<std::vector<Letter>> out;
    std::vector<Letter> w(n);
    auto canonical = [&](const std::vector<Letter>& v) {
        std::vector<Letter> best = v;
        for (int s = 1; s < n; ++s) {
            std::vector<Letter> rot(n);
            for (int i = 0; i < n; ++i) rot[i] = v[(s + i) % n];
            if (rot < best) best = rot;
        }
        return best;
    };
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == n) {
            if (n > 1 && w[n - 1] == inverse_letter(w[0])) return;
            std::vector<Letter> canon = canonical(w);
            if (primitive_only) {
                bool prim = true;
                for (int d = 1; d < n; ++d) {
                    if (n % d != 0) continue;
                    bool periodic = true;
                    for (int i = 0; i < n && periodic; ++i)
                        if (w[i] != w[(i + d) % n]) periodic = false;
                    if (periodic) {
                        prim = false;
                        break;
                    }
                }
                if (!prim) return;
            }
            out.insert(canon);
            return;
        }
        for (Letter l = 0; l < 2 * k; ++l) {
            if (pos > 0 && l == inverse_letter(w[pos - 1])) continue;
            w[pos] = l;
            self(self, pos + 1);
        }
    };
    rec(rec, 0);
    return out;
}

Word make_word(std::initializer_list<int> ls) {
    Word w;
    for (int l : ls) w.letters.push_back(static_cast<Letter>(l));
    return w;
}

}  // namespace

TEST_CASE("canonical_form rotation and cyclic reduction") {
    // "ba" -> "ab"
    CyclicWord c = canonical_form(make_word({2, 0}));
    CHECK(c.letters == std::vector<Letter>{0, 2});
    // "a b a'" -> "b"
    c = canonical_form(make_word({0, 2, 1}));
    CHECK(c.letters == std::vector<Letter>{2});
    // identity class errors
    CHECK_THROWS_AS(canonical_form(make_word({0, 1})), DataError);
    CHECK_THROWS_AS(canonical_form(Word{}), DataError);
}

TEST_CASE("200 random conjugates share one canonical form") {
    Rng rng(31);
    Word w = make_word({0, 2, 0, 0, 3});
    CyclicWord base = canonical_form(w);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Letter> g;
        int len = 1 + static_cast<int>(rng.uniform01() * 6);
        for (int i = 0; i < len; ++i) g.push_back(static_cast<Letter>(rng.uniform01() * 4));
        Word conj = reduce_word(g);
        Word inv = inverse_word(conj);
        Word full = concat(concat(conj, w), inv);
        CHECK(canonical_form(full) == base);
    }
}

TEST_CASE("is_primitive basics and exhaustive oracle to length 6") {
    CHECK(is_primitive(canonical_form(make_word({0, 2}))));
    CHECK(!is_primitive(canonical_form(make_word({0, 2, 0, 2}))));
    // exhaustive: every canonical class of length <= 6 in F2 matches the
    // divisor-based brute force
    for (int n = 1; n <= 6; ++n) {
        auto all = brute_classes(2, n, false);
        auto prim = brute_classes(2, n, true);
        for (const auto& v : all) {
            CyclicWord c;
            c.letters = v;
            CHECK(is_primitive(c) == (prim.count(v) > 0));
        }
    }
}

TEST_CASE("enumerate_classes small counts") {
    // k=2, L=1: the four single letters, all primitive
    auto v = enumerate_classes_vec(2, 1, false);
    CHECK(v.size() == 4);
    for (const auto& c : v) CHECK(is_primitive(c));
    // k=2 length exactly 2: 8 classes, 4 primitive
    auto upto2 = enumerate_classes_vec(2, 2, false);
    CHECK(upto2.size() - v.size() == 8);
    auto upto2p = enumerate_classes_vec(2, 2, true);
    CHECK(upto2p.size() - v.size() == 4);
    // length exactly 3: 12 classes, 8 primitive
    CHECK(class_count(2, 3, false) - class_count(2, 2, false) == 12);
    CHECK(class_count(2, 3, true) - class_count(2, 2, true) == 8);
}

TEST_CASE("class_count cumulative values") {
    CHECK(class_count(2, 1, false) == 4);
    CHECK(class_count(2, 2, false) == 12);
    CHECK(class_count(2, 3, true) == 16);
}

TEST_CASE("enumeration equals the brute-force oracle for k=2,3 and L<=6") {
    for (int k = 2; k <= 3; ++k) {
        int lmax = k == 2 ? 6 : 5;
        for (bool prim : {false, true}) {
            std::set<std::vector<Letter>> got;
            long count = 0;
            enumerate_classes(k, lmax, prim, [&](const CyclicWord& c) {
                got.insert(c.letters);
                ++count;
            });
            CHECK(count == static_cast<long>(got.size()));  // no duplicates
            std::set<std::vector<Letter>> want;
            for (int n = 1; n <= lmax; ++n) {
                auto cl = brute_classes(k, n, prim);
                want.insert(cl.begin(), cl.end());
            }
            CHECK(got == want);
        }
    }
}

TEST_CASE("emitted words satisfy both cyclic-word invariants") {
    enumerate_classes(2, 8, false, [&](const CyclicWord& c) {
        REQUIRE(c.size() >= 1);
        int n = c.size();
        for (int i = 0; i < n; ++i)
            CHECK(c.letters[(i + 1) % n] != inverse_letter(c.letters[i]));
        // canonical: least among rotations
        for (int s = 1; s < n; ++s) {
            std::vector<Letter> rot(n);
            for (int i = 0; i < n; ++i) rot[i] = c.letters[(s + i) % n];
            CHECK(!(rot < c.letters));
        }
    });
}

TEST_CASE("stream is deterministic, ordered, and duplicate-free at L=10") {
    std::vector<CyclicWord> a = enumerate_classes_vec(2, 10, true);
    std::vector<CyclicWord> b = enumerate_classes_vec(2, 10, true);
    CHECK(a.size() == b.size());
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
    std::set<std::vector<Letter>> seen;
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(seen.insert(a[i].letters).second);
        if (i > 0) CHECK(a[i - 1] < a[i]);  // length-ascending then lex
    }
}

TEST_CASE("sharded enumeration partitions the unsharded stream") {
    for (int shards : {2, 3, 7}) {
        std::vector<std::vector<CyclicWord>> parts(shards);
        size_t total = 0;
        for (int s = 0; s < shards; ++s) {
            parts[s] = enumerate_classes_vec(2, 7, true, s, shards);
            total += parts[s].size();
        }
        std::vector<CyclicWord> whole = enumerate_classes_vec(2, 7, true);
        CHECK(total == whole.size());
        std::set<std::vector<Letter>> uni;
        for (const auto& p : parts)
            for (const auto& c : p) CHECK(uni.insert(c.letters).second);
        std::set<std::vector<Letter>> want;
        for (const auto& c : whole) want.insert(c.letters);
        CHECK(uni == want);
    }
}

TEST_CASE("the canonical inverse of every emitted class is emitted") {
    std::set<std::vector<Letter>> got;
    enumerate_classes(2, 7, true, [&](const CyclicWord& c) { got.insert(c.letters); });
    for (const auto& v : got) {
        CyclicWord c;
        c.letters = v;
        CHECK(got.count(cyclic_inverse(c).letters) == 1);
    }
}

TEST_CASE("argument validation") {
    CHECK_THROWS_AS(class_count(1, 3, false), ConfigError);
    CHECK_THROWS_AS(class_count(2, 0, false), ConfigError);
}
