#include "polyfock/words.hpp"

#include <algorithm>
#include <numeric>

namespace polyfock {

Word Word::operator*(const Word& rhs) const {
    if (block != rhs.block)
        throw std::invalid_argument("Word concatenation across blocks");
    Word out{block, letters};
    out.letters.insert(out.letters.end(), rhs.letters.begin(), rhs.letters.end());
    return out;
}

Word Word::reversed() const {
    Word out{block, letters};
    std::reverse(out.letters.begin(), out.letters.end());
    return out;
}

MultiIndex::MultiIndex(int k) {
    if (k < 1) throw std::invalid_argument("MultiIndex needs at least one block");
    words.reserve(k);
    for (int i = 1; i <= k; ++i) words.push_back(Word::identity(i));
}

MultiIndex::MultiIndex(std::vector<Word> ws) : words(std::move(ws)) {
    for (int i = 0; i < static_cast<int>(words.size()); ++i)
        if (words[i].block != i + 1)
            throw std::invalid_argument("MultiIndex words must be ordered by block");
}

int MultiIndex::total_degree() const {
    int d = 0;
    for (const auto& w : words) d += w.length();
    return d;
}

MultiIndex MultiIndex::operator*(const MultiIndex& rhs) const {
    if (words.size() != rhs.words.size())
        throw std::invalid_argument("MultiIndex block count mismatch");
    std::vector<Word> out;
    out.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) out.push_back(words[i] * rhs.words[i]);
    return MultiIndex(std::move(out));
}

Index word_rank(const Word& w, int alphabet) {
    Index offset = 0, power = 1;
    for (int d = 0; d < w.length(); ++d) {
        offset += power;
        power *= alphabet;
    }
    Index rank = 0;
    for (int letter : w.letters) {
        if (letter < 1 || letter > alphabet)
            throw std::invalid_argument("word letter out of alphabet range");
        rank = rank * alphabet + (letter - 1);
    }
    return offset + rank;
}

Index word_count(int alphabet, int maxDegree) {
    if (maxDegree < 0) throw std::invalid_argument("negative maxDegree");
    Index total = 0, power = 1;
    for (int d = 0; d <= maxDegree; ++d) {
        total += power;
        power *= alphabet;
    }
    return total;
}

std::vector<Word> enumerate_words(int block, int alphabet, int maxDegree) {
    if (maxDegree < 0) throw std::invalid_argument("negative maxDegree");
    if (alphabet < 1) throw std::invalid_argument("alphabet must have at least one letter");
    std::vector<Word> out;
    out.reserve(static_cast<std::size_t>(word_count(alphabet, maxDegree)));
    out.push_back(Word::identity(block));
    // shell d is generated from shell d-1 by appending each letter; parents
    // arrive in lex order, so the output is graded-lex without sorting
    std::size_t shellBegin = 0;
    for (int d = 1; d <= maxDegree; ++d) {
        std::size_t shellEnd = out.size();
        for (std::size_t s = shellBegin; s < shellEnd; ++s) {
            for (int j = 1; j <= alphabet; ++j) {
                Word w = out[s];
                w.letters.push_back(j);
                out.push_back(std::move(w));
            }
        }
        shellBegin = shellEnd;
    }
    return out;
}

namespace {
void abelian_rec(int block, std::vector<int>& counts, Word& acc, std::vector<Word>& out) {
    bool done = std::all_of(counts.begin(), counts.end(), [](int c) { return c == 0; });
    if (done) {
        out.push_back(acc);
        return;
    }
    for (int j = 1; j <= static_cast<int>(counts.size()); ++j) {
        if (counts[j - 1] == 0) continue;
        --counts[j - 1];
        acc.letters.push_back(j);
        abelian_rec(block, counts, acc, out);
        acc.letters.pop_back();
        ++counts[j - 1];
    }
}
}  // namespace

std::vector<Word> abelian_class(int block, const std::vector<int>& counts) {
    for (int c : counts)
        if (c < 0) throw std::invalid_argument("negative letter multiplicity");
    std::vector<Word> out;
    std::vector<int> work = counts;
    Word acc = Word::identity(block);
    abelian_rec(block, work, acc, out);
    return out;
}

std::size_t WordHash::operator()(const Word& w) const {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ static_cast<std::size_t>(w.block);
    for (int l : w.letters) h = (h * 1099511628211ull) ^ static_cast<std::size_t>(l + 1);
    return h;
}

std::size_t MultiIndexHash::operator()(const MultiIndex& m) const {
    std::size_t h = 1469598103934665603ull;
    WordHash wh;
    for (const auto& w : m.words) h = (h * 1099511628211ull) ^ wh(w);
    return h;
}

}  // namespace polyfock
