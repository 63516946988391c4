#pragma once

// Free-monoid words over per-block alphabets and canonically ordered
// multi-indices (one word per block).  Letters are 1-based throughout,
// matching the JSON wire format.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace polyfock {

using Index = std::int64_t;

// A word in the free monoid on `n_block` generators.  The empty word is the
// monoid identity.  `block` is 1-based.
struct Word {
    int block = 1;
    std::vector<int> letters;  // each in 1..n_block

    int length() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }

    static Word identity(int block) { return Word{block, {}}; }

    // concatenation within the same block
    Word operator*(const Word& rhs) const;
    // letters in reverse order (the paper-style reverse, used by adjoint maps)
    Word reversed() const;

    friend bool operator==(const Word&, const Word&) = default;
};

// One word per block, blocks ordered 1..k.  Cross-block commutation makes
// this the canonical form of a product of indeterminates.
struct MultiIndex {
    std::vector<Word> words;

    explicit MultiIndex(int k);
    explicit MultiIndex(std::vector<Word> ws);

    int block_count() const { return static_cast<int>(words.size()); }
    int total_degree() const;
    bool is_identity() const { return total_degree() == 0; }

    const Word& word(int block) const { return words.at(block - 1); }
    Word& word(int block) { return words.at(block - 1); }

    // blockwise concatenation (cross-block factors commute)
    MultiIndex operator*(const MultiIndex& rhs) const;

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
};

// Graded-lexicographic rank of a word among all words of its block,
// shorter words first, then base-n lexicographic with the leftmost letter
// most significant.  The empty word has rank 0.
Index word_rank(const Word& w, int alphabet);

// Number of words of length <= maxDegree over `alphabet` letters.
Index word_count(int alphabet, int maxDegree);

// All words of the block with |alpha| <= maxDegree in graded-lex order.
// Throws on negative maxDegree.
std::vector<Word> enumerate_words(int block, int alphabet, int maxDegree);

// All words of exactly the given length whose letter multiplicities equal
// `counts` (counts[j-1] = number of occurrences of letter j).
std::vector<Word> abelian_class(int block, const std::vector<int>& counts);

struct WordHash {
    std::size_t operator()(const Word& w) const;
};
struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& m) const;
};

}  // namespace polyfock
