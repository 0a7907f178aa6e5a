#pragma once

#include <functional>
#include <vector>

#include "cyl/group.hpp"

namespace cyl {

// Cyclically reduced word, canonical (lexicographically least rotation) under
// the letter order gen1 < gen1' < gen2 < gen2' < ... One CyclicWord per
// free-group conjugacy class.
struct CyclicWord {
    std::vector<Letter> letters;
    int size() const { return static_cast<int>(letters.size()); }
    bool operator==(const CyclicWord& o) const { return letters == o.letters; }
    bool operator<(const CyclicWord& o) const {
        if (letters.size() != o.letters.size()) return letters.size() < o.letters.size();
        return letters < o.letters;
    }
};

// Cyclically reduce, then pick the least rotation. Two words are conjugate
// in the free group iff their canonical forms are equal. Throws DataError
// on words that reduce to the identity.
CyclicWord canonical_form(const Word& w);

// True iff the word is not a proper power: its least rotation period equals
// its length.
bool is_primitive(const CyclicWord& c);

CyclicWord cyclic_inverse(const CyclicWord& c);  // canonical form of c^{-1}

// Stable shard assignment from the first letters of the canonical word.
int shard_of(const CyclicWord& c, int generator_count, int shard_count);

// Emit every conjugacy class of cyclically-reduced length <= max_length
// exactly once, canonical, length-ascending then lexicographic. Necklace
// backtracking over the cyclically-reduced language (FKM-style pre-necklace
// recursion with the inverse-adjacency branches pruned); nothing is
// generated and filtered per rotation orbit. With shard_count > 1 only the
// classes of the given shard are emitted; the shard union over all shards
// equals the unsharded stream.
void enumerate_classes(int generator_count, int max_length, bool primitive_only,
                       const std::function<void(const CyclicWord&)>& emit,
                       int shard = 0, int shard_count = 1);

std::vector<CyclicWord> enumerate_classes_vec(int generator_count, int max_length,
                                              bool primitive_only, int shard = 0,
                                              int shard_count = 1);

long class_count(int generator_count, int max_length, bool primitive_only);

}  // namespace cyl
