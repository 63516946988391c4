#pragma once

// Noncommutative polynomials in the indeterminates Z_{i,j} (free within a
// block, commuting across blocks), positive regular polynomials, and the
// domain data (n, m, q).

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "polyfock/words.hpp"

namespace polyfock {

using Complex = std::complex<double>;

// Finite linear combination of canonical multi-index monomials Z_{(alpha)}.
// Zero coefficients are never stored.
class NcPolynomial {
  public:
    explicit NcPolynomial(int blockCount);
    NcPolynomial(int blockCount, Complex constant);

    int block_count() const { return blockCount_; }
    int degree() const;  // max total degree; -1 for the zero polynomial
    bool is_zero() const { return terms_.empty(); }
    bool is_homogeneous() const;

    Complex coefficient(const MultiIndex& m) const;
    void add_term(const MultiIndex& m, Complex c);

    const std::unordered_map<MultiIndex, Complex, MultiIndexHash>& terms() const {
        return terms_;
    }

    NcPolynomial operator+(const NcPolynomial& rhs) const;
    NcPolynomial operator-(const NcPolynomial& rhs) const;
    NcPolynomial operator*(const NcPolynomial& rhs) const;
    NcPolynomial operator*(Complex c) const;

    // the monomial Z_{i,j}
    static NcPolynomial generator(int blockCount, int block, int letter);

  private:
    int blockCount_;
    std::unordered_map<MultiIndex, Complex, MultiIndexHash> terms_;

    static constexpr double kDropTol = 0.0;  // exact zero only
};

// Letter sequence of a single-block word, without the block tag.
using Letters = std::vector<int>;

// A single-block polynomial q = sum_alpha a_alpha Z_alpha with a_{g0} = 0,
// a_{g_j} > 0 for every letter, and all a_alpha >= 0.
class PositiveRegularPolynomial {
  public:
    PositiveRegularPolynomial(int blockSize, std::vector<std::pair<Letters, double>> coeffs);

    int block_size() const { return blockSize_; }
    int degree() const { return degree_; }
    double coefficient(const Letters& w) const;
    const std::vector<std::pair<Letters, double>>& support() const { return support_; }

    // q evaluated at the nonnegative reals x_j (used by scalar-point checks:
    // q(lambda conj(lambda)) substitutes x_j = |lambda_j|^2)
    double evaluate_abs(const std::vector<double>& x) const;
    // q with Z_j substituted by the complex scalars z_j
    Complex evaluate(const std::vector<Complex>& z) const;

    // q_i = Z_1 + ... + Z_n (the ball generator)
    static PositiveRegularPolynomial ball(int n);

  private:
    int blockSize_;
    int degree_;
    std::vector<std::pair<Letters, double>> support_;  // graded-lex sorted, a > 0 entries only
};

// The data (n, m, q) of an abstract polydomain D_q^m.
struct DomainSpec {
    std::vector<int> n;                          // block sizes
    std::vector<int> m;                          // multiplicities, >= 1
    std::vector<PositiveRegularPolynomial> q;    // one generator per block

    DomainSpec(std::vector<int> n, std::vector<int> m,
               std::vector<PositiveRegularPolynomial> q);

    int block_count() const { return static_cast<int>(n.size()); }
    int total_indeterminates() const;

    // Hardy--Sobolev scale presets: k copies of the ball generator on n
    // letters with all multiplicities 1.  k = 1 is Drury-Arveson, k = n the
    // Hardy-type space, k = n + 1 the Bergman-type space.
    static DomainSpec hardy_sobolev(int n, int k);
    static DomainSpec drury_arveson(int n) { return hardy_sobolev(n, 1); }
    // single block, q = Z, multiplicity m (classical weighted shift scale)
    static DomainSpec single_variable(int m);
};

}  // namespace polyfock
