#include "polyfock/modeltheory.hpp"

#include <stdexcept>

namespace polyfock {

namespace {

std::vector<std::vector<Mat>> ampliate(const VarietyModel& model, Eigen::Index slots) {
    std::vector<std::vector<Mat>> out(model.S.size());
    for (std::size_t i = 0; i < model.S.size(); ++i)
        for (const Mat& s : model.S[i]) out[i].push_back(kron_identity(s, slots));
    return out;
}

// orthonormal columns spanning range(G^{1/2}) together with B = R* G^{1/2}
struct RootRange {
    Mat root;   // G^{1/2}
    Mat range;  // R
    Mat b;      // R* G^{1/2}, surjective onto the range coordinates
};

RootRange root_range(const Mat& g, const Tolerances& tol) {
    RootRange out;
    out.root = sqrt_psd(g, tol.psdTol, tol.rankTol, &out.range);
    out.b = out.range.adjoint() * out.root;
    return out;
}

// least squares solve for A with A B = C on the row space of B
Mat solve_on_range(const Mat& b, const Mat& c) {
    if (b.rows() == 0) return Mat(0, 0);
    // A = C B^+ ; B has full row rank by construction
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(b.adjoint());
    // solves B^H X = C^H, X = (B^+)^H C^H, so A = X^H
    return cod.solve(c.adjoint()).adjoint();
}

// (v* (x) I_slots) applied to the columns of a basis of N (x) C^slots
Mat vacuum_slot_components(const Vec& vacuumCoords, const Mat& basis, Eigen::Index slots) {
    const Eigen::Index n = vacuumCoords.size();
    Mat out(slots, basis.cols());
    for (Eigen::Index c = 0; c < basis.cols(); ++c)
        for (Eigen::Index s = 0; s < slots; ++s) {
            Complex acc = 0.0;
            for (Eigen::Index idx = 0; idx < n; ++idx)
                acc += std::conj(vacuumCoords(idx)) * basis(idx * slots + s, c);
            out(s, c) = acc;
        }
    return out;
}

// the tuple X with X*_{i,j} B = B (S*_{i,j} (x) I) from the factorization
// proof; pure variety member living on the range coordinates of G^{1/2}
OperatorTuple compressed_tuple(const VarietyModel& model, const RootRange& rr,
                               Eigen::Index slots) {
    const DomainSpec& spec = model.ambient.basis.spec();
    std::vector<std::vector<Mat>> blocks(static_cast<std::size_t>(spec.block_count()));
    for (int i = 1; i <= spec.block_count(); ++i)
        for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j) {
            const Mat sStarAmp = kron_identity(model.op(i, j).adjoint(), slots);
            const Mat a = solve_on_range(rr.b, rr.b * sStarAmp);
            blocks[static_cast<std::size_t>(i - 1)].push_back(a.adjoint());
        }
    return OperatorTuple(std::move(blocks), 1e-7);
}

// partial trace over the model factor of a (dimN*s) x (dimN*s) matrix
Mat partial_trace_model(const Mat& a, Eigen::Index s) {
    const Eigen::Index n = a.rows() / s;
    Mat out = Mat::Zero(s, s);
    for (Eigen::Index blk = 0; blk < n; ++blk)
        out += a.block(blk * s, blk * s, s, s);
    return out;
}

// unitary maximizing Re tr(U C): the adjoint polar factor of C
Mat align_unitary(const Mat& c) {
    Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
    return svd.matrixV() * svd.matrixU().adjoint();
}

}  // namespace

double multi_analytic_residual(const VarietyModel& model, const Mat& m, Eigen::Index slotIn,
                               Eigen::Index slotOut) {
    double worst = 0.0;
    const DomainSpec& spec = model.ambient.basis.spec();
    for (int i = 1; i <= spec.block_count(); ++i)
        for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j) {
            const Mat lhs = m * kron_identity(model.op(i, j), slotIn);
            const Mat rhs = kron_identity(model.op(i, j), slotOut) * m;
            worst = std::max(worst, (lhs - rhs).norm());
        }
    return worst;
}

Mat support_slot_basis(const VarietyModel& model, const MultiAnalyticOp& op, double relTol) {
    if (op.slotIn == 0) return Mat(0, 0);
    const Mat coRange = range_basis(op.M.adjoint(), relTol);
    const Mat vacBlock = vacuum_slot_components(model.vacuum_coords(), coRange, op.slotIn);
    return range_basis(vacBlock, relTol);
}

BeurlingReport beurling_criterion(const VarietyModel& model, const Mat& subspaceBasis,
                                  Eigen::Index slots, const Tolerances& tol) {
    const Eigen::Index ambient = model.dimN() * slots;
    if (subspaceBasis.rows() != ambient)
        throw std::invalid_argument("subspace basis lives on the wrong space");
    const auto amp = ampliate(model, slots);

    BeurlingReport report;
    const Mat proj = subspaceBasis * subspaceBasis.adjoint();
    for (const auto& row : amp)
        for (const Mat& op : row)
            report.invarianceResidual = std::max(
                report.invarianceResidual,
                ((Mat::Identity(ambient, ambient) - proj) * op * subspaceBasis).norm());
    if (report.invarianceResidual > 1e-10)
        throw std::invalid_argument("subspace is not invariant under the ampliated model");

    OperatorTuple ampTuple(amp, 1e-8);
    const DomainSpec& spec = model.ambient.basis.spec();
    report.satisfied = true;
    std::vector<int> p(static_cast<std::size_t>(spec.block_count()), 0);
    while (true) {
        const Mat delta = defect_map(spec, ampTuple, p, proj);
        const double lo = min_eigenvalue(delta);
        report.minEigen.emplace_back(p, lo);
        if (lo < -tol.psdTol * (1.0 + delta.norm())) {
            report.satisfied = false;
            if (report.violatingP.empty()) report.violatingP = p;
        }
        int i = 0;
        while (i < spec.block_count() &&
               p[static_cast<std::size_t>(i)] == spec.m[static_cast<std::size_t>(i)]) {
            p[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == spec.block_count()) break;
        ++p[static_cast<std::size_t>(i)];
    }
    return report;
}

std::variant<Factorization, FactorizationFailure> factorize_psd(const VarietyModel& model,
                                                                const Mat& g,
                                                                Eigen::Index slots,
                                                                const Tolerances& tol) {
    const DomainSpec& spec = model.ambient.basis.spec();
    const auto amp = ampliate(model, slots);
    OperatorTuple ampTuple(amp, 1e-8);

    // PSD of the whole lattice, nonzero p; G itself comes out as a limit
    std::vector<int> p(static_cast<std::size_t>(spec.block_count()), 0);
    while (true) {
        int i = 0;
        while (i < spec.block_count() &&
               p[static_cast<std::size_t>(i)] == spec.m[static_cast<std::size_t>(i)]) {
            p[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == spec.block_count()) break;
        ++p[static_cast<std::size_t>(i)];

        const Mat delta = defect_map(spec, ampTuple, p, hermitize(g));
        const double lo = min_eigenvalue(delta);
        if (lo < -tol.psdTol * (1.0 + delta.norm()))
            return FactorizationFailure{p, lo};
    }

    RootRange rr = root_range(hermitize(g), tol);
    OperatorTuple x = compressed_tuple(model, rr, slots);

    // the compressed tuple inherits purity and the variety equations;
    // its constrained Berezin kernel is an isometry
    BerezinKernelData kernel = berezin_kernel(model, x, tol);

    Factorization out{MultiAnalyticOp{}, 0.0, x, check_purity(spec, x)};
    out.gamma.M = rr.root * rr.range * kernel.K.adjoint();
    out.gamma.slotIn = kernel.defectRank;
    out.gamma.slotOut = slots;
    out.gamma.intertwiningResidual =
        multi_analytic_residual(model, out.gamma.M, out.gamma.slotIn, out.gamma.slotOut);
    out.factorResidual = (out.gamma.M * out.gamma.M.adjoint() - hermitize(g)).norm();
    return out;
}

CharFunctionData characteristic_function(const VarietyModel& model, const OperatorTuple& t,
                                         const Tolerances& tol) {
    CharFunctionData data;
    data.kernel = berezin_kernel(model, t, tol);
    data.defectSpace = data.kernel.defectRange;
    const Eigen::Index rows = data.kernel.K.rows();
    const Mat g = Mat::Identity(rows, rows) - data.kernel.K * data.kernel.K.adjoint();

    auto result = factorize_psd(model, g, data.kernel.defectRank, tol);
    if (std::holds_alternative<FactorizationFailure>(result)) {
        data.existsFlag = false;
        data.violatingP = std::get<FactorizationFailure>(result).p;
        return data;
    }
    auto& fact = std::get<Factorization>(result);
    data.existsFlag = true;
    data.mTuple = fact.compressedTuple;
    data.theta = fact.gamma;

    // defect range of the M_T tuple spans the dual defect space
    const DomainSpec& spec = model.ambient.basis.spec();
    const Mat deltaM =
        defect_map(spec, *data.mTuple, spec.m,
                   Mat::Identity(data.mTuple->dim(), data.mTuple->dim()));
    sqrt_psd(deltaM, tol.psdTol, tol.rankTol, &data.dualDefectRange);

    data.unitIdentityResidual =
        (data.kernel.K * data.kernel.K.adjoint() + data.theta.M * data.theta.M.adjoint() -
         Mat::Identity(rows, rows))
            .norm();
    return data;
}

PureModelData pure_model(const VarietyModel& model, const OperatorTuple& t,
                         const CharFunctionData& data, const Tolerances& tol) {
    if (!data.existsFlag)
        throw std::invalid_argument("characteristic function does not exist for this tuple");
    const Mat& k = data.kernel.K;
    const Eigen::Index d = t.dim();
    if ((k.adjoint() * k - Mat::Identity(d, d)).norm() > 1e-8)
        throw std::invalid_argument("pure_model requires a pure tuple (isometric kernel)");
    const Mat thetaGram = data.theta.M.adjoint() * data.theta.M;
    if ((thetaGram * thetaGram - thetaGram).norm() > 1e-8)
        throw std::invalid_argument("characteristic function is not inner");

    PureModelData out;
    const Eigen::Index ambient = k.rows();
    const Mat thetaRange = range_basis(data.theta.M, tol.rankTol);
    out.hBasis = orth_complement(thetaRange, ambient);

    const Eigen::Index rd = data.kernel.defectRank;
    const DomainSpec& spec = model.ambient.basis.spec();
    out.g.resize(static_cast<std::size_t>(spec.block_count()));
    for (int i = 1; i <= spec.block_count(); ++i)
        for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j)
            out.g[static_cast<std::size_t>(i - 1)].push_back(
                out.hBasis.adjoint() * kron_identity(model.op(i, j), rd) * out.hBasis);

    out.unitary = out.hBasis.adjoint() * k;
    double worst = (out.unitary.adjoint() * out.unitary - Mat::Identity(d, d)).norm();
    for (int i = 1; i <= spec.block_count(); ++i)
        for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j) {
            const Mat& gij = out.g[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)];
            worst = std::max(worst,
                             (out.unitary * t.op(i, j).adjoint() - gij.adjoint() * out.unitary)
                                 .norm());
        }
    out.equivalenceResidual = worst;
    return out;
}

DilationData dilate(const VarietyModel& model, const OperatorTuple& t, const Tolerances& tol) {
    DilationData out;
    const BerezinKernelData kernel = berezin_kernel(model, t, tol);
    const Eigen::Index d = t.dim();
    out.dilationIndex = kernel.defectRank;
    out.modelRows = kernel.K.rows();

    const Mat y = hermitize(Mat::Identity(d, d) - kernel.K.adjoint() * kernel.K);
    const DomainSpec& spec = model.ambient.basis.spec();

    if (y.norm() <= 1e-12) {
        out.isometry = kernel.K;
        out.boundaryDim = 0;
    } else {
        RootRange rr = root_range(y, tol);
        out.boundaryDim = rr.range.cols();
        // L_{i,j} Y^{1/2} = Y^{1/2} T*_{i,j}; U = L*
        std::vector<std::vector<Mat>> blocks(static_cast<std::size_t>(spec.block_count()));
        for (int i = 1; i <= spec.block_count(); ++i)
            for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j) {
                const Mat l = solve_on_range(rr.b, rr.b * t.op(i, j).adjoint());
                blocks[static_cast<std::size_t>(i - 1)].push_back(l.adjoint());
            }
        out.boundaryTuple = OperatorTuple(std::move(blocks), 1e-7);

        out.isometry.resize(kernel.K.rows() + out.boundaryDim, d);
        out.isometry.topRows(kernel.K.rows()) = kernel.K;
        out.isometry.bottomRows(out.boundaryDim) = rr.b;

        const Mat idBoundary = Mat::Identity(out.boundaryDim, out.boundaryDim);
        out.boundaryDefect =
            defect_map(spec, *out.boundaryTuple,
                       std::vector<int>(static_cast<std::size_t>(spec.block_count()), 1),
                       idBoundary)
                .norm();
        for (const auto& g : model.ideal.generators)
            out.boundaryIdealResidual = std::max(
                out.boundaryIdealResidual, evaluate_poly(g, *out.boundaryTuple).norm());
    }

    out.isometryResidual =
        (out.isometry.adjoint() * out.isometry - Mat::Identity(d, d)).norm();

    const Eigen::Index rd = kernel.defectRank;
    for (int i = 1; i <= spec.block_count(); ++i)
        for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j) {
            Mat vij = Mat::Zero(out.isometry.rows(), out.isometry.rows());
            vij.topLeftCorner(out.modelRows, out.modelRows) =
                kron_identity(model.op(i, j), rd);
            if (out.boundaryDim > 0)
                vij.bottomRightCorner(out.boundaryDim, out.boundaryDim) =
                    out.boundaryTuple->op(i, j);
            out.coInvarianceResidual =
                std::max(out.coInvarianceResidual,
                         (out.isometry * t.op(i, j).adjoint() -
                          vij.adjoint() * out.isometry)
                             .norm());
        }

    // minimality in the pure case: the model hull of V(C^d) fills N (x) D
    if (out.boundaryDim == 0 && rd > 0) {
        std::vector<Mat> ops;
        for (int i = 1; i <= spec.block_count(); ++i)
            for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j)
                ops.push_back(kron_identity(model.op(i, j), rd));
        const Mat hull = invariant_hull(ops, kernel.K, 1e-10);
        out.minimal = hull.cols() == out.modelRows;
    }
    return out;
}

WoldData wold_decompose(const DomainSpec& spec, const OperatorTuple& v,
                        const Tolerances& tol) {
    WoldData out;
    const Eigen::Index d = v.dim();
    const Mat delta = defect_map(spec, v, spec.m, Mat::Identity(d, d));
    out.multiplicity = numerical_rank(delta, tol.rankTol);

    std::vector<Mat> ops;
    for (int i = 1; i <= spec.block_count(); ++i)
        for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j)
            ops.push_back(v.op(i, j));
    out.k0Basis = delta.norm() == 0.0 ? Mat(d, 0) : invariant_hull(ops, delta, 1e-10);

    const Mat p0 = out.k0Basis.cols() == 0
                       ? Mat::Zero(d, d)
                       : Mat(out.k0Basis * out.k0Basis.adjoint());
    const Mat q0 = Mat::Identity(d, d) - p0;
    for (const Mat& op : ops) {
        out.reducingResidual = std::max(out.reducingResidual, (q0 * op * p0).norm());
        out.reducingResidual = std::max(out.reducingResidual, (p0 * op * q0).norm());
    }

    const Mat k1 = orth_complement(out.k0Basis, d);
    if (k1.cols() > 0) {
        std::vector<std::vector<Mat>> blocks(static_cast<std::size_t>(spec.block_count()));
        for (int i = 1; i <= spec.block_count(); ++i)
            for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j)
                blocks[static_cast<std::size_t>(i - 1)].push_back(k1.adjoint() * v.op(i, j) *
                                                                  k1);
        OperatorTuple restricted(std::move(blocks), 1e-6);
        out.complementDefect =
            defect_map(spec, restricted,
                       std::vector<int>(static_cast<std::size_t>(spec.block_count()), 1),
                       Mat::Identity(k1.cols(), k1.cols()))
                .norm();
    }
    return out;
}

CoincidenceResult coincidence_check(const VarietyModel& model, const MultiAnalyticOp& theta1,
                                    const MultiAnalyticOp& theta2, std::uint64_t seed,
                                    const Tolerances& tol) {
    CoincidenceResult out;
    const Mat l1 = support_slot_basis(model, theta1);
    const Mat l2 = support_slot_basis(model, theta2);
    if (l1.cols() != l2.cols() || theta1.slotOut != theta2.slotOut) {
        out.reason = "slot dimensions differ";
        return out;
    }
    const Eigen::Index l = l1.cols();
    const Eigen::Index sOut = theta1.slotOut;
    if (l == 0) {
        out.coincide = theta1.M.norm() < 1e-12 && theta2.M.norm() < 1e-12;
        out.residual = std::max(theta1.M.norm(), theta2.M.norm());
        return out;
    }

    const Eigen::Index n = model.dimN();
    const Mat a = theta1.M * identity_kron(n, l1);  // restricted to the support slots
    const Mat b = theta2.M * identity_kron(n, l2);
    const double scale = std::max(1.0, a.norm());

    // B (I (x) X) = (I (x) Y) A is linear in the pair (X, Y); nullspace
    // elements of the stacked system seed the unitary search, which the
    // alternating polar alignment then polishes
    const Eigen::Index rows = b.rows() * a.cols();
    const Eigen::Index unknowns = l * l + sOut * sOut;
    Mat system = Mat::Zero(rows, unknowns);
    for (Eigen::Index r = 0; r < b.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            const Eigen::Index eq = r * a.cols() + c;
            const Eigen::Index nbC = c / l, tC = c % l;
            const Eigen::Index nbR = r / sOut, sR = r % sOut;
            for (Eigen::Index s = 0; s < l; ++s)
                system(eq, s * l + tC) += b(r, nbC * l + s);  // coefficient of X[s, tC]
            for (Eigen::Index u = 0; u < sOut; ++u)
                system(eq, l * l + sR * sOut + u) -= a(nbR * sOut + u, c);  // of Y[sR, u]
        }
    Eigen::JacobiSVD<Mat> svd(system, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double cut = (sv.size() ? sv(0) : 0.0) * 1e-10;
    std::vector<Eigen::Index> nullCols;
    for (Eigen::Index c = 0; c < unknowns; ++c)
        if (c >= sv.size() || sv(c) <= cut) nullCols.push_back(c);

    auto polish = [&](Mat tau1, Mat tau2, double& res) {
        double prev = std::numeric_limits<double>::infinity();
        for (int it = 0; it < 200; ++it) {
            const Mat f2 = a * identity_kron(n, tau1).adjoint() * b.adjoint();
            tau2 = align_unitary(partial_trace_model(f2, sOut));
            const Mat d1 = b.adjoint() * identity_kron(n, tau2) * a;
            tau1 = align_unitary(partial_trace_model(d1, l)).adjoint();
            res = (b * identity_kron(n, tau1) - identity_kron(n, tau2) * a).norm();
            if (std::abs(prev - res) < 1e-15 * (1.0 + res)) break;
            prev = res;
        }
        return std::make_pair(tau1, tau2);
    };

    std::mt19937_64 rng(seed);
    double best = std::numeric_limits<double>::infinity();
    Mat bestTau1, bestTau2;
    auto consider = [&](const Vec& flat) {
        Mat x(l, l), y(sOut, sOut);
        for (Eigen::Index c = 0; c < l; ++c)
            for (Eigen::Index r = 0; r < l; ++r) x(r, c) = flat(r * l + c);
        for (Eigen::Index c = 0; c < sOut; ++c)
            for (Eigen::Index r = 0; r < sOut; ++r) y(r, c) = flat(l * l + r * sOut + c);
        Eigen::JacobiSVD<Mat> px(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
        Eigen::JacobiSVD<Mat> py(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
        double res;
        auto [t1, t2] = polish(px.matrixU() * px.matrixV().adjoint(),
                               py.matrixU() * py.matrixV().adjoint(), res);
        if (res < best) {
            best = res;
            bestTau1 = t1;
            bestTau2 = t2;
        }
    };

    for (Eigen::Index c : nullCols) consider(svd.matrixV().col(c));
    for (int restart = 0; restart < 10 && best > 1e-8 * scale; ++restart) {
        Vec flat = Vec::Zero(unknowns);
        if (nullCols.empty()) break;
        Vec coeff = random_gaussian(static_cast<Eigen::Index>(nullCols.size()), 1, rng);
        for (std::size_t c = 0; c < nullCols.size(); ++c)
            flat += coeff(static_cast<Eigen::Index>(c)) * svd.matrixV().col(nullCols[c]);
        consider(flat);
    }
    if (best == std::numeric_limits<double>::infinity()) {
        double res;
        auto [t1, t2] = polish(Mat::Identity(l, l), Mat::Identity(sOut, sOut), res);
        best = res;
        bestTau1 = t1;
        bestTau2 = t2;
    }

    out.residual = best;
    out.tau1 = bestTau1;
    out.tau2 = bestTau2;
    out.coincide = best <= 1e-8 * scale;
    (void)tol;
    return out;
}

RankOneReport rank_one_classify(const VarietyModel& model, const Mat& subspace1,
                                const Mat& subspace2, std::uint64_t seed,
                                const Tolerances& tol) {
    const Eigen::Index n = model.dimN();
    auto validate = [&](const Mat& basis) {
        const Mat proj = basis * basis.adjoint();
        for (const auto& row : model.S)
            for (const Mat& s : row) {
                const double r =
                    ((Mat::Identity(n, n) - proj) * s.adjoint() * basis).norm();
                if (r > 1e-10)
                    throw std::invalid_argument("subspace is not co-invariant under S");
            }
    };
    validate(subspace1);
    validate(subspace2);

    RankOneReport out;
    out.gap = subspace_gap(subspace1, subspace2);
    out.subspacesEqual = subspace1.cols() == subspace2.cols() && out.gap <= 1e-10;

    const DomainSpec& spec = model.ambient.basis.spec();
    auto compress = [&](const Mat& basis) {
        std::vector<std::vector<Mat>> blocks(static_cast<std::size_t>(spec.block_count()));
        for (int i = 1; i <= spec.block_count(); ++i)
            for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j)
                blocks[static_cast<std::size_t>(i - 1)].push_back(basis.adjoint() *
                                                                  model.op(i, j) * basis);
        return OperatorTuple(std::move(blocks), 1e-8);
    };
    OperatorTuple t1 = compress(subspace1), t2 = compress(subspace2);
    out.defectRank1 = numerical_rank(
        defect_map(spec, t1, spec.m, Mat::Identity(t1.dim(), t1.dim())), tol.rankTol);
    out.defectRank2 = numerical_rank(
        defect_map(spec, t2, spec.m, Mat::Identity(t2.dim(), t2.dim())), tol.rankTol);

    // direct unitary-equivalence check: word traces tr w(T, T*) up to the
    // Specht/Pearcy length bound 2 d^2 decide equivalence outright when the
    // word count fits the budget; otherwise verified candidates from the
    // intertwiner space give a sound (no false positive) search
    bool equivalent = false;
    if (t1.dim() == t2.dim() && t1.dim() > 0) {
        const Eigen::Index d = t1.dim();
        std::vector<Mat> ops1, ops2;
        for (int i = 1; i <= spec.block_count(); ++i)
            for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j) {
                ops1.push_back(t1.op(i, j));
                ops2.push_back(t2.op(i, j));
                ops1.push_back(t1.op(i, j).adjoint());
                ops2.push_back(t2.op(i, j).adjoint());
            }
        const int maxLen = static_cast<int>(2 * d * d);
        double budget = 0.0, pw = 1.0;
        for (int l = 0; l <= maxLen && budget < 2e5; ++l, pw *= static_cast<double>(ops1.size()))
            budget += pw;

        if (budget < 2e5) {
            struct Walker {
                const std::vector<Mat>&a, &b;
                int maxLen;
                double worst = 0.0;
                void walk(const Mat& pa, const Mat& pb, int len) {
                    worst = std::max(worst, std::abs(pa.trace() - pb.trace()));
                    if (len == maxLen) return;
                    for (std::size_t o = 0; o < a.size(); ++o)
                        walk(pa * a[o], pb * b[o], len + 1);
                }
            };
            Walker w{ops1, ops2, maxLen};
            w.walk(Mat::Identity(d, d), Mat::Identity(d, d), 0);
            equivalent = w.worst <= 1e-8;
        } else {
            // intertwiner space, then polar candidates (verified exactly)
            Mat system(static_cast<Eigen::Index>(ops1.size()) * d * d, d * d);
            for (std::size_t o = 0; o < ops1.size(); ++o) {
                Mat block = Mat::Zero(d * d, d * d);
                for (Eigen::Index i = 0; i < d; ++i)
                    for (Eigen::Index j = 0; j < d; ++j)
                        block.block(i * d, j * d, d, d) = ops1[o](j, i) * Mat::Identity(d, d);
                block -= identity_kron(d, ops2[o]);
                system.middleRows(static_cast<Eigen::Index>(o) * d * d, d * d) = block;
            }
            Eigen::JacobiSVD<Mat> svd(system, Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            const double cut = (sv.size() ? sv(0) : 0.0) * 1e-8;
            std::vector<Eigen::Index> nullCols;
            for (Eigen::Index c = 0; c < d * d; ++c)
                if (c >= sv.size() || sv(c) <= cut) nullCols.push_back(c);

            auto verify = [&](const Mat& z) {
                Eigen::JacobiSVD<Mat> pol(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
                if (pol.singularValues().size() == 0 ||
                    pol.singularValues().minCoeff() <
                        1e-8 * pol.singularValues().maxCoeff())
                    return false;
                const Mat unitary = pol.matrixU() * pol.matrixV().adjoint();
                double worst = 0.0;
                for (std::size_t o = 0; o < ops1.size(); ++o)
                    worst = std::max(worst, (unitary * ops1[o] - ops2[o] * unitary).norm());
                return worst <= 1e-8;
            };

            // project the identity onto the intertwiner space first
            Vec idFlat = Vec::Zero(d * d);
            for (Eigen::Index i = 0; i < d; ++i) idFlat(i * d + i) = 1.0;
            Vec proj = Vec::Zero(d * d);
            for (Eigen::Index c : nullCols)
                proj += svd.matrixV().col(c) * svd.matrixV().col(c).dot(idFlat);
            Mat projMat = Eigen::Map<Mat>(proj.data(), d, d);
            equivalent = verify(projMat);

            std::mt19937_64 rng(seed);
            for (int trial = 0; trial < 20 && !equivalent && !nullCols.empty(); ++trial) {
                Vec coeff =
                    random_gaussian(static_cast<Eigen::Index>(nullCols.size()), 1, rng);
                Vec flat = Vec::Zero(d * d);
                for (std::size_t c = 0; c < nullCols.size(); ++c)
                    flat +=
                        coeff(static_cast<Eigen::Index>(c)) * svd.matrixV().col(nullCols[c]);
                Mat z = Eigen::Map<Mat>(flat.data(), d, d);
                equivalent = verify(z);
            }
        }
    }
    out.unitarySearchAgrees = equivalent == out.subspacesEqual;
    return out;
}

CyclicHullData cyclic_hull(const VarietyModel& model, const Mat& subspaceBasis,
                           Eigen::Index slots, const Tolerances& tol, double coInvTol) {
    if (!model.vacuumInN)
        throw std::invalid_argument("cyclic hull requires the vacuum inside N");
    const Eigen::Index ambient = model.dimN() * slots;
    if (subspaceBasis.rows() != ambient)
        throw std::invalid_argument("subspace basis lives on the wrong space");

    const auto amp = ampliate(model, slots);
    const Mat proj = subspaceBasis * subspaceBasis.adjoint();
    for (const auto& row : amp)
        for (const Mat& op : row) {
            const double r =
                ((Mat::Identity(ambient, ambient) - proj) * op.adjoint() * subspaceBasis)
                    .norm();
            if (r > coInvTol)
                throw std::invalid_argument("subspace is not co-invariant under S (x) I");
        }

    CyclicHullData out;
    std::vector<Mat> ops;
    for (const auto& row : amp)
        for (const Mat& op : row) ops.push_back(op);
    out.hull = invariant_hull(ops, subspaceBasis, 1e-10);

    // E = (P_C (x) I) M: slot components of the vacuum block row
    const Vec vac = model.vacuum_coords();
    Mat vacuumBlock(slots, subspaceBasis.cols());
    for (Eigen::Index c = 0; c < subspaceBasis.cols(); ++c)
        for (Eigen::Index s = 0; s < slots; ++s) {
            Complex acc = 0.0;
            for (Eigen::Index nIdx = 0; nIdx < model.dimN(); ++nIdx)
                acc += std::conj(vac(nIdx)) * subspaceBasis(nIdx * slots + s, c);
            vacuumBlock(s, c) = acc;
        }
    out.slotSpace = range_basis(vacuumBlock, 1e-10);

    const Mat target = identity_kron(model.dimN(), out.slotSpace);
    out.spanGap = subspace_gap(out.hull, target);
    (void)tol;
    return out;
}

}  // namespace polyfock
