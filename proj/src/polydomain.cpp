#include "polyfock/polydomain.hpp"

#include <stdexcept>

namespace polyfock {

OperatorTuple::OperatorTuple(std::vector<std::vector<Mat>> blocks, double commTol)
    : blocks_(std::move(blocks)), dim_(0), commDefect_(0.0) {
    if (blocks_.empty()) throw std::invalid_argument("tuple needs at least one block");
    for (const auto& blk : blocks_) {
        if (blk.empty()) throw std::invalid_argument("empty block in tuple");
        for (const Mat& x : blk) {
            if (x.rows() != x.cols()) throw std::invalid_argument("tuple entries must be square");
            if (dim_ == 0) dim_ = x.rows();
            if (x.rows() != dim_) throw std::invalid_argument("tuple entries on different spaces");
        }
    }
    if (dim_ > 0) {
        for (std::size_t s = 0; s < blocks_.size(); ++s)
            for (std::size_t t = s + 1; t < blocks_.size(); ++t)
                for (const Mat& a : blocks_[s])
                    for (const Mat& b : blocks_[t])
                        commDefect_ =
                            std::max(commDefect_, (a * b - b * a).cwiseAbs().maxCoeff());
    }
    if (commDefect_ > commTol)
        throw std::invalid_argument("cross-block commutator defect above tolerance");
}

Mat OperatorTuple::word_operator(int block, const Letters& alpha) const {
    Mat out = Mat::Identity(dim_, dim_);
    for (int l : alpha) out = out * op(block, l);
    return out;
}

Mat OperatorTuple::word_operator(const MultiIndex& alpha) const {
    Mat out = Mat::Identity(dim_, dim_);
    for (int i = 1; i <= alpha.block_count(); ++i)
        for (int l : alpha.word(i).letters) out = out * op(i, l);
    return out;
}

OperatorTuple OperatorTuple::zero(const DomainSpec& spec, Eigen::Index dim) {
    std::vector<std::vector<Mat>> blocks(static_cast<std::size_t>(spec.block_count()));
    for (int i = 0; i < spec.block_count(); ++i)
        blocks[static_cast<std::size_t>(i)].assign(static_cast<std::size_t>(spec.n[i]),
                                                   Mat::Zero(dim, dim));
    return OperatorTuple(std::move(blocks));
}

OperatorTuple OperatorTuple::scalar(const DomainSpec& spec,
                                    const std::vector<std::vector<Complex>>& lambda) {
    if (static_cast<int>(lambda.size()) != spec.block_count())
        throw std::invalid_argument("scalar point block count mismatch");
    std::vector<std::vector<Mat>> blocks(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (static_cast<int>(lambda[i].size()) != spec.n[i])
            throw std::invalid_argument("scalar point block size mismatch");
        for (Complex z : lambda[i]) {
            Mat m(1, 1);
            m(0, 0) = z;
            blocks[i].push_back(std::move(m));
        }
    }
    return OperatorTuple(std::move(blocks));
}

Mat phi_map(const PositiveRegularPolynomial& q, const std::vector<Mat>& blockOps, const Mat& y) {
    if (static_cast<int>(blockOps.size()) != q.block_size())
        throw std::invalid_argument("block size mismatch in phi_map");
    const Eigen::Index d = y.rows();
    if (y.cols() != d || (d > 0 && blockOps[0].rows() != d))
        throw std::invalid_argument("dimension mismatch in phi_map");
    Mat acc = Mat::Zero(d, d);
    for (const auto& [word, a] : q.support()) {
        Mat x = Mat::Identity(d, d);
        for (int l : word) x = x * blockOps[static_cast<std::size_t>(l - 1)];
        acc += a * (x * y * x.adjoint());
    }
    return acc;
}

Mat defect_map(const DomainSpec& spec, const OperatorTuple& t, const std::vector<int>& p,
               const Mat& y) {
    if (static_cast<int>(p.size()) != spec.block_count())
        throw std::invalid_argument("lattice point length mismatch");
    Mat out = y;
    for (int i = spec.block_count(); i >= 1; --i) {
        if (p[static_cast<std::size_t>(i - 1)] < 0)
            throw std::invalid_argument("negative defect power");
        for (int rep = 0; rep < p[static_cast<std::size_t>(i - 1)]; ++rep)
            out = out - phi_map(spec.q[static_cast<std::size_t>(i - 1)], t.block(i), out);
    }
    return out;
}

Mat evaluate_poly(const NcPolynomial& p, const OperatorTuple& t) {
    if (p.block_count() != t.block_count())
        throw std::invalid_argument("polynomial and tuple block counts differ");
    Mat acc = Mat::Zero(t.dim(), t.dim());
    for (const auto& [mi, c] : p.terms()) acc += c * t.word_operator(mi);
    return acc;
}

double MembershipReport::worstEigen() const {
    double w = 0.0;
    for (const auto& [p, e] : minEigen) w = std::min(w, e);
    return w;
}

MembershipReport check_membership(const DomainSpec& spec, const OperatorTuple& t,
                                  const Tolerances& tol) {
    MembershipReport report;
    report.commutatorDefect = t.cross_commutator_defect();
    const int k = spec.block_count();
    const Mat identity = Mat::Identity(t.dim(), t.dim());

    bool member = report.commutatorDefect <= tol.commTol;
    std::vector<int> p(static_cast<std::size_t>(k), 0);
    while (true) {
        const Mat delta = defect_map(spec, t, p, identity);
        const double lo = min_eigenvalue(delta);
        report.minEigen.emplace_back(p, lo);
        if (lo < -tol.psdTol * (1.0 + delta.norm())) member = false;

        bool top = true;
        for (int i = 0; i < k; ++i)
            if (p[static_cast<std::size_t>(i)] != spec.m[static_cast<std::size_t>(i)]) top = false;
        if (top) {
            report.defectRank = numerical_rank(delta, tol.rankTol);
            break;
        }
        int i = 0;
        while (p[static_cast<std::size_t>(i)] == spec.m[static_cast<std::size_t>(i)]) {
            p[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        ++p[static_cast<std::size_t>(i)];
    }
    report.isMember = member;
    report.purity = member ? check_purity(spec, t) : Purity::Unknown;
    return report;
}

namespace {

bool jointly_nilpotent(const DomainSpec& spec, const OperatorTuple& t) {
    if (t.dim() == 0) return true;
    const Mat identity = Mat::Identity(t.dim(), t.dim());
    for (int i = 1; i <= spec.block_count(); ++i) {
        Mat y = identity;
        for (Eigen::Index step = 0; step < t.dim(); ++step)
            y = phi_map(spec.q[static_cast<std::size_t>(i - 1)], t.block(i), y);
        if (y.cwiseAbs().maxCoeff() > 0.0) return false;
    }
    return true;
}

}  // namespace

Purity check_purity(const DomainSpec& spec, const OperatorTuple& t, int maxIter, double tol) {
    if (jointly_nilpotent(spec, t)) return Purity::Pure;
    const Mat identity = Mat::Identity(t.dim(), t.dim());
    double lastGap = -1.0;
    for (int n = 1; n <= maxIter; n *= 2) {
        Mat y = identity;
        for (int i = 1; i <= spec.block_count(); ++i) {
            Mat phiPow = y;
            for (int rep = 0; rep < n; ++rep)
                phiPow = phi_map(spec.q[static_cast<std::size_t>(i - 1)], t.block(i), phiPow);
            y = y - phiPow;
        }
        const double gap = (y - identity).norm();
        if (gap <= tol) return Purity::Pure;
        // stalled iterate bounded away from I: the monotone limit is not I
        if (lastGap >= 0.0 && std::abs(lastGap - gap) <= 1e-14 * (1.0 + gap) && gap > 1e-4)
            return Purity::NotPure;
        lastGap = gap;
    }
    return Purity::Unknown;
}

CncReport cnc_witness(const DomainSpec& spec, const OperatorTuple& t, int cap) {
    CncReport report;
    report.capUsed = cap;
    if (t.dim() == 0) return report;
    // (id - Phi_1^cap) ... (id - Phi_k^cap)(I); the paper's condition pairs
    // this against vectors h, and monotonicity reduces all smaller powers
    // to the largest one
    Mat y = Mat::Identity(t.dim(), t.dim());
    for (int i = spec.block_count(); i >= 1; --i) {
        Mat p = y;
        for (int rep = 0; rep < cap; ++rep)
            p = phi_map(spec.q[static_cast<std::size_t>(i - 1)], t.block(i), p);
        y = y - p;
    }
    report.minEigenvalue = min_eigenvalue(y);
    return report;
}

OperatorTuple scale_tuple(const OperatorTuple& t, double r) {
    std::vector<std::vector<Mat>> blocks;
    blocks.reserve(static_cast<std::size_t>(t.block_count()));
    for (int i = 1; i <= t.block_count(); ++i) {
        std::vector<Mat> blk;
        blk.reserve(t.block(i).size());
        for (const Mat& x : t.block(i)) blk.push_back(r * x);
        blocks.push_back(std::move(blk));
    }
    return OperatorTuple(std::move(blocks));
}

}  // namespace polyfock
