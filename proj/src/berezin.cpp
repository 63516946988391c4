#include "polyfock/berezin.hpp"

#include <stdexcept>

namespace polyfock {

namespace {

// T_{(beta)} for every basis multi-index, by graded recursion: prepending a
// letter to block i multiplies on the left by T_{i,j}, which commutes past
// the factors of the other blocks.
std::vector<Mat> word_products(const FockBasis& basis, const OperatorTuple& t) {
    const Eigen::Index d = t.dim();
    std::vector<Mat> products(static_cast<std::size_t>(basis.dim()));
    products[0] = Mat::Identity(d, d);
    for (Index idx = 1; idx < basis.dim(); ++idx) {
        const MultiIndex& beta = basis.at(idx);
        int block = 0;
        for (int i = 1; i <= beta.block_count(); ++i)
            if (!beta.word(i).empty()) {
                block = i;
                break;
            }
        MultiIndex parent = beta;
        const int letter = parent.word(block).letters.front();
        parent.word(block).letters.erase(parent.word(block).letters.begin());
        products[static_cast<std::size_t>(idx)] =
            t.op(block, letter) * products[static_cast<std::size_t>(basis.index_of(parent))];
    }
    return products;
}

// Frobenius mass of the kernel rows one step past the caps: for each block,
// words of length D_i + 1 against all within-cap words elsewhere.
double omitted_shell_norm(const VarietyModel& model, const OperatorTuple& t,
                          const Mat& defectRootCompressed) {
    const FockBasis& basis = model.ambient.basis;
    const DomainSpec& spec = basis.spec();
    const int k = spec.block_count();

    double mass = 0.0;
    for (int i = 1; i <= k; ++i) {
        const int cap = basis.grid().cap(i);
        BlockCoeffTable extended(spec.q[static_cast<std::size_t>(i - 1)],
                                 spec.m[static_cast<std::size_t>(i - 1)], cap + 1);
        const auto longWords = enumerate_words(i, spec.n[static_cast<std::size_t>(i - 1)], cap + 1);
        for (const Word& alpha : longWords) {
            if (alpha.length() != cap + 1) continue;
            const Mat tAlpha = t.word_operator(i, alpha.letters);
            const double bAlpha = extended.at_rank(word_rank(alpha, extended.alphabet()));
            // combine with every within-cap configuration of the other blocks
            for (Index idx = 0; idx < basis.dim(); ++idx) {
                const MultiIndex& beta = basis.at(idx);
                if (!beta.word(i).empty()) continue;  // factor through block-i vacuum only
                double bProd = bAlpha;
                for (int j = 1; j <= k; ++j)
                    if (j != i) bProd *= basis.coeffs().block(j).at(beta.word(j));
                Mat rest = t.word_operator(beta);
                Mat rows = defectRootCompressed * (tAlpha * rest).adjoint();
                mass += bProd * rows.squaredNorm();
            }
        }
    }
    return std::sqrt(mass);
}

}  // namespace

BerezinKernelData berezin_kernel(const VarietyModel& model, const OperatorTuple& t,
                                 const Tolerances& tol) {
    const FockBasis& basis = model.ambient.basis;
    const DomainSpec& spec = basis.spec();
    const Eigen::Index d = t.dim();

    const Mat delta = defect_map(spec, t, spec.m, Mat::Identity(d, d));
    BerezinKernelData data;
    try {
        data.defectRoot = sqrt_psd(delta, tol.psdTol, tol.rankTol, &data.defectRange);
    } catch (const std::runtime_error&) {
        throw std::runtime_error(
            "berezin_kernel: defect operator has a negative eigenvalue beyond tolerance "
            "(min eig " +
            std::to_string(min_eigenvalue(delta)) + ")");
    }
    data.defectRank = data.defectRange.cols();
    const Eigen::Index rd = data.defectRank;

    // compressed defect factor: rows of Delta^{1/2} in range coordinates
    const Mat rootCompressed = data.defectRange.adjoint() * data.defectRoot;

    const auto products = word_products(basis, t);
    Mat ambient(basis.dim() * rd, d);
    for (Index idx = 0; idx < basis.dim(); ++idx) {
        const double w = std::sqrt(basis.b_product(idx));
        ambient.middleRows(idx * rd, rd) =
            w * rootCompressed * products[static_cast<std::size_t>(idx)].adjoint();
    }

    data.constrained = !model.ideal.empty();
    data.modelDim = model.dimN();
    if (data.constrained)
        data.K = kron_identity(model.basisN.adjoint(), rd) * ambient;
    else
        data.K = std::move(ambient);

    data.truncationResidual = omitted_shell_norm(model, t, rootCompressed);
    return data;
}

double verify_intertwining(const BerezinKernelData& kernel, const VarietyModel& model,
                           const OperatorTuple& t) {
    double worst = 0.0;
    const Eigen::Index rd = kernel.defectRank;
    for (int i = 1; i <= model.ambient.block_count(); ++i)
        for (int j = 1; j <= model.ambient.basis.spec().n[static_cast<std::size_t>(i - 1)]; ++j) {
            const Mat lhs = kernel.K * t.op(i, j).adjoint();
            const Mat sStar = kernel.constrained
                                  ? model.op(i, j).adjoint()
                                  : Mat(model.ambient.op(i, j)).adjoint();
            const Mat rhs = kron_identity(sStar, rd) * kernel.K;
            worst = std::max(worst, (lhs - rhs).norm());
        }
    return worst;
}

Mat berezin_transform(const BerezinKernelData& kernel, const Mat& g) {
    const Eigen::Index rd = kernel.defectRank;
    if (g.rows() != kernel.modelDim && kernel.constrained)
        throw std::invalid_argument("transform argument must act on the model space");
    if (g.rows() * rd != kernel.K.rows())
        throw std::invalid_argument("transform argument dimension mismatch");
    return kernel.K.adjoint() * kron_identity(g, rd) * kernel.K;
}

Mat radial_transform(const VarietyModel& model, const OperatorTuple& t, const Mat& g,
                     double r, const Tolerances& tol) {
    if (!(r >= 0.0) || r >= 1.0)
        throw std::invalid_argument("radial parameter must lie in [0, 1)");
    if (!model.ideal.homogeneous())
        throw std::invalid_argument("radial scaling needs a homogeneous ideal");
    const OperatorTuple scaled = scale_tuple(t, r);
    const BerezinKernelData kernel = berezin_kernel(model, scaled, tol);
    return berezin_transform(kernel, g);
}

double kernel_range_defect(const VarietyModel& model, const OperatorTuple& t,
                           const Tolerances& tol) {
    // measured on the free kernel: range K_{f,T} must sit inside N (x) D
    VarietyModel freeModel{model.ambient, IdealSpec::zero(), Mat(), {}, {}, false, false, 0.0};
    freeModel.basisN = Mat::Identity(model.ambient_dim(), model.ambient_dim());
    for (Index i = 0; i < model.ambient_dim(); ++i)
        freeModel.basisDegrees.push_back(model.ambient.basis.total_degree(i));
    freeModel.graded = true;
    const BerezinKernelData freeKernel = berezin_kernel(freeModel, t, tol);
    const Mat mBasis = orth_complement(model.basisN, model.ambient_dim());
    if (mBasis.cols() == 0) return 0.0;
    return (kron_identity(mBasis.adjoint(), freeKernel.defectRank) * freeKernel.K).norm();
}

}  // namespace polyfock
