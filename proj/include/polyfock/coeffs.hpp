#pragma once

// Coefficient engines for the weight family b_{i,alpha}^{(m_i)} and the
// abelianized sums gamma^{(m_i)}_k.  The b values are the word coefficients
// of the formal series 1/(1 - q_i)^{m_i}; they are computed by graded
// convolution, never by enumerating factorizations.

#include <vector>

#include "polyfock/ncpoly.hpp"
#include "polyfock/words.hpp"

namespace polyfock {

// b values for one block, aligned with the graded-lex word enumeration up
// to the table's degree cap.
class BlockCoeffTable {
  public:
    BlockCoeffTable(const PositiveRegularPolynomial& q, int multiplicity, int maxDegree);

    int max_degree() const { return maxDegree_; }
    int alphabet() const { return alphabet_; }
    double at_rank(Index rank) const { return values_[static_cast<std::size_t>(rank)]; }
    double at(const Word& w) const { return at_rank(word_rank(w, alphabet_)); }
    double at(const Letters& w) const { return at_rank(word_rank(Word{1, w}, alphabet_)); }
    const std::vector<double>& values() const { return values_; }

  private:
    int alphabet_;
    int maxDegree_;
    std::vector<double> values_;
};

// Per-block tables for a whole domain spec.
class BCoeffTable {
  public:
    BCoeffTable(const DomainSpec& spec, const std::vector<int>& maxDegrees);

    const BlockCoeffTable& block(int i) const { return blocks_.at(i - 1); }
    int block_count() const { return static_cast<int>(blocks_.size()); }

  private:
    std::vector<BlockCoeffTable> blocks_;
};

// Single b coefficient; builds a throwaway table up to |alpha|.
double b_coefficient(const PositiveRegularPolynomial& q, int multiplicity, const Word& alpha);

// gamma^{(m)}_k = sum of b over the abelianization class Lambda_k.
double gamma_coefficient(const PositiveRegularPolynomial& q, int multiplicity,
                         const std::vector<int>& k);

}  // namespace polyfock
