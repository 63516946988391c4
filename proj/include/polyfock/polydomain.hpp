#pragma once

// Concrete matrix tuples, the completely positive maps Phi_{q_i,X_i}, the
// defect lattice Delta^p, polydomain membership, and purity.

#include <optional>
#include <vector>

#include "polyfock/linalg.hpp"
#include "polyfock/ncpoly.hpp"

namespace polyfock {

struct Tolerances {
    double psdTol = 1e-9;    // eigenvalue floor is -psdTol * (1 + ||A||)
    double commTol = 1e-10;  // cross-block commutator bound, absolute
    double rankTol = 1e-8;   // singular values below rankTol * sigma_max are zero
};

// A point of B(C^d)^{n_1} x_c ... x_c B(C^d)^{n_k}.  Construction validates
// the cross-block commutation and fails loudly instead of symmetrizing.
class OperatorTuple {
  public:
    OperatorTuple(std::vector<std::vector<Mat>> blocks, double commTol = 1e-10);

    int block_count() const { return static_cast<int>(blocks_.size()); }
    int block_size(int i) const { return static_cast<int>(blocks_.at(i - 1).size()); }
    Eigen::Index dim() const { return dim_; }
    const Mat& op(int block, int letter) const { return blocks_.at(block - 1).at(letter - 1); }
    const std::vector<Mat>& block(int i) const { return blocks_.at(i - 1); }
    double cross_commutator_defect() const { return commDefect_; }

    // X_{i,alpha}: product over the letters of a single-block word
    Mat word_operator(int block, const Letters& alpha) const;
    // X_{(alpha)} = X_{1,alpha_1} ... X_{k,alpha_k}
    Mat word_operator(const MultiIndex& alpha) const;

    // zero tuple matching a spec's shape
    static OperatorTuple zero(const DomainSpec& spec, Eigen::Index dim);
    // scalar point as a tuple of 1x1 blocks
    static OperatorTuple scalar(const DomainSpec& spec, const std::vector<std::vector<Complex>>& lambda);

  private:
    std::vector<std::vector<Mat>> blocks_;
    Eigen::Index dim_;
    double commDefect_;
};

// Phi_{q,X}(Y) = sum_alpha a_alpha X_alpha Y X_alpha^*
Mat phi_map(const PositiveRegularPolynomial& q, const std::vector<Mat>& blockOps, const Mat& y);

// Delta^p(Y) = (id - Phi_1)^{p_1} ... (id - Phi_k)^{p_k}(Y); the innermost
// factor is the last block, matching the defining composition order.
Mat defect_map(const DomainSpec& spec, const OperatorTuple& t, const std::vector<int>& p,
               const Mat& y);

// evaluate a noncommutative polynomial at the tuple
Mat evaluate_poly(const NcPolynomial& p, const OperatorTuple& t);

enum class Purity { Pure, NotPure, Unknown };

struct MembershipReport {
    bool isMember = false;
    double commutatorDefect = 0.0;
    // smallest eigenvalue of Delta^p(I) at every lattice point 0 <= p <= m
    std::vector<std::pair<std::vector<int>, double>> minEigen;
    Purity purity = Purity::Unknown;
    Eigen::Index defectRank = 0;  // numerical rank of Delta^m(I)
    double worstEigen() const;
};

MembershipReport check_membership(const DomainSpec& spec, const OperatorTuple& t,
                                  const Tolerances& tol = {});

// Iterates R_N = (id - Phi_k^N)...(id - Phi_1^N)(I) with N doubling.  Jointly
// nilpotent tuples short-circuit to Pure; a stalled iterate away from the
// identity reports NotPure; otherwise Unknown after maxIter.
Purity check_purity(const DomainSpec& spec, const OperatorTuple& t, int maxIter = 4096,
                    double tol = 1e-10);

OperatorTuple scale_tuple(const OperatorTuple& t, double r);

// Finite witness for complete non-coisometry.  The defining condition
// quantifies over all powers; at a fixed cap the iterates are monotone, so
// a trivial kernel of the final iterate certifies the condition up to that
// cap.  The report states the cap used and makes no infinite claim.
struct CncReport {
    int capUsed = 0;
    double minEigenvalue = 0.0;
    bool witness(double tol = 1e-10) const { return minEigenvalue > tol; }
};

CncReport cnc_witness(const DomainSpec& spec, const OperatorTuple& t, int cap = 16);

}  // namespace polyfock
