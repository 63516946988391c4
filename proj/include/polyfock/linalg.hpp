#pragma once

// Small shared numerics layer: Hermitian eigen utilities, numerical ranges
// and ranks, subspace measures, and seeded random matrices.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <random>
#include <vector>

namespace polyfock {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<std::complex<double>>;

inline Mat hermitize(const Mat& a) { return 0.5 * (a + a.adjoint()); }

// smallest eigenvalue of the Hermitian part
double min_eigenvalue(const Mat& a);

// scale-aware PSD test: min eig >= -tol * (1 + ||A||)
bool is_psd(const Mat& a, double psdTol);

// rank by singular values above relTol * sigma_max
Eigen::Index numerical_rank(const Mat& a, double relTol);

// Hermitian square root with tiny negative eigenvalues clamped to zero.
// Throws if an eigenvalue is below -psdTol * (1 + ||A||).  `rangeBasis`
// receives orthonormal columns spanning the numerical range (eigenvalue
// above rangeTol * max eigenvalue).
Mat sqrt_psd(const Mat& a, double psdTol, double rangeTol, Mat* rangeBasis = nullptr);

// orthonormal basis of the column space (SVD, threshold relTol * sigma_max)
Mat range_basis(const Mat& a, double relTol);

// orthonormal basis of the orthogonal complement of the span of the columns
// of `basis` (columns assumed orthonormal) inside C^ambientDim
Mat orth_complement(const Mat& basis, Eigen::Index ambientDim);

// operator norm of P_A - P_B for orthonormal-column bases; equals the sine
// of the largest principal angle when the spans have equal dimension
double subspace_gap(const Mat& a, const Mat& b);

// smallest invariant-subspace hull: orthonormal basis of the closure of
// span(seed columns) under repeated application of the given operators
Mat invariant_hull(const std::vector<Mat>& ops, const Mat& seed, double relTol);

// A (x) I_r in the layout flat = majorIndex * r + slot
Mat kron_identity(const Mat& a, Eigen::Index r);
// I_r (x) A in the layout flat = slot * rows(A) + index  (unused major form)
Mat identity_kron(Eigen::Index r, const Mat& a);

// max |entry| of a sparse matrix
double sparse_max_abs(const SpMat& a);

// seeded standard complex Gaussian matrix
Mat random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);
// Haar-ish random unitary via QR of a Gaussian
Mat random_unitary(Eigen::Index n, std::mt19937_64& rng);

}  // namespace polyfock
