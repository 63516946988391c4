#include "polyfock/linalg.hpp"

#include <stdexcept>

namespace polyfock {

double min_eigenvalue(const Mat& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool is_psd(const Mat& a, double psdTol) {
    if (a.rows() == 0) return true;
    return min_eigenvalue(a) >= -psdTol * (1.0 + a.norm());
}

Eigen::Index numerical_rank(const Mat& a, double relTol) {
    if (a.rows() == 0 || a.cols() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > relTol * s(0)) ++r;
    return r;
}

Mat sqrt_psd(const Mat& a, double psdTol, double rangeTol, Mat* rangeBasis) {
    if (a.rows() == 0) {
        if (rangeBasis) rangeBasis->resize(0, 0);
        return Mat(0, 0);
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitize(a));
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    RVec ev = es.eigenvalues();
    const double scale = 1.0 + a.norm();
    const double floor = -psdTol * scale;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev(i) < floor)
            throw std::runtime_error("matrix is not positive semidefinite within tolerance");
        if (ev(i) < 0.0) ev(i) = 0.0;
    }
    if (rangeBasis) {
        const double cut = rangeTol * (ev.size() ? ev.maxCoeff() : 0.0);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < ev.size(); ++i)
            if (ev(i) > cut && ev(i) > 0.0) keep.push_back(i);
        rangeBasis->resize(a.rows(), static_cast<Eigen::Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c)
            rangeBasis->col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
    }
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

Mat range_basis(const Mat& a, double relTol) {
    if (a.rows() == 0 || a.cols() == 0) return Mat(a.rows(), 0);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    if (s.size() > 0 && s(0) > 0.0)
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > relTol * s(0)) ++r;
    return svd.matrixU().leftCols(r);
}

Mat orth_complement(const Mat& basis, Eigen::Index ambientDim) {
    if (basis.cols() == 0) return Mat::Identity(ambientDim, ambientDim);
    Mat proj = Mat::Identity(ambientDim, ambientDim) - basis * basis.adjoint();
    return range_basis(proj, 1e-8);
}

double subspace_gap(const Mat& a, const Mat& b) {
    const Eigen::Index dim = std::max(a.rows(), b.rows());
    Mat pa = Mat::Zero(dim, dim), pb = Mat::Zero(dim, dim);
    if (a.cols() > 0) pa.topLeftCorner(a.rows(), a.rows()) = a * a.adjoint();
    if (b.cols() > 0) pb.topLeftCorner(b.rows(), b.rows()) = b * b.adjoint();
    return (pa - pb).operatorNorm();
}

Mat invariant_hull(const std::vector<Mat>& ops, const Mat& seed, double relTol) {
    Mat basis = range_basis(seed, relTol);
    while (true) {
        const Eigen::Index before = basis.cols();
        Mat stacked(basis.rows(), basis.cols() * (1 + static_cast<Eigen::Index>(ops.size())));
        stacked.leftCols(basis.cols()) = basis;
        Eigen::Index col = basis.cols();
        for (const Mat& op : ops) {
            stacked.middleCols(col, basis.cols()) = op * basis;
            col += basis.cols();
        }
        basis = range_basis(stacked, relTol);
        if (basis.cols() == before) return basis;
    }
}

Mat kron_identity(const Mat& a, Eigen::Index r) {
    Mat out = Mat::Zero(a.rows() * r, a.cols() * r);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (a(i, j) != std::complex<double>(0))
                out.block(i * r, j * r, r, r) =
                    a(i, j) * Mat::Identity(r, r);
    return out;
}

Mat identity_kron(Eigen::Index r, const Mat& a) {
    Mat out = Mat::Zero(r * a.rows(), r * a.cols());
    for (Eigen::Index s = 0; s < r; ++s)
        out.block(s * a.rows(), s * a.cols(), a.rows(), a.cols()) = a;
    return out;
}

double sparse_max_abs(const SpMat& a) {
    double best = 0.0;
    for (int k = 0; k < a.outerSize(); ++k)
        for (SpMat::InnerIterator it(a, k); it; ++it)
            best = std::max(best, std::abs(it.value()));
    return best;
}

Mat random_gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, 1.0);
    Mat out(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            out(i, j) = std::complex<double>(dist(rng), dist(rng));
    return out;
}

Mat random_unitary(Eigen::Index n, std::mt19937_64& rng) {
    Mat g = random_gaussian(n, n, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    // fix the phase so the factorization is unique-ish; keeps runs reproducible
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        std::complex<double> d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

}  // namespace polyfock
