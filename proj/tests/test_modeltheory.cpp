#include <doctest.h>

#include <random>

#include "polyfock/modeltheory.hpp"
#include "polyfock/rkhs.hpp"

using namespace polyfock;

namespace {

VarietyModel free_model(const DomainSpec& spec, const TruncationGrid& grid) {
    return build_variety_model(spec, grid, IdealSpec::zero());
}

// co-invariant subspace spanned by kernel vectors of random strict points
Mat coinvariant_subspace(const VarietyModel& model, std::mt19937_64& rng, int count) {
    const Eigen::Index n = model.dimN();
    // adjoint-invariant hull of random vectors: S* applications only
    std::vector<Mat> adjoints;
    for (const auto& row : model.S)
        for (const Mat& s : row) adjoints.push_back(s.adjoint());
    Mat seed = random_gaussian(n, count, rng);
    return invariant_hull(adjoints, seed, 1e-10);
}

}  // namespace

TEST_CASE("beurling criterion on the full space and a graded corner") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{4});
    const Eigen::Index n = model.dimN();

    // full space: reduces to membership of S
    auto full = beurling_criterion(model, Mat::Identity(n, n), 1);
    CHECK(full.satisfied);

    // span{e_d : d >= 1} is invariant; Delta(P_M) is the projection onto e_1
    Mat corner = Mat::Zero(n, n - 1);
    for (Eigen::Index d = 1; d < n; ++d) corner(d, d - 1) = 1.0;
    auto report = beurling_criterion(model, corner, 1);
    CHECK(report.satisfied);

    // non-invariant input is rejected
    Mat bad = Mat::Zero(n, 1);
    bad(0, 0) = 1.0;  // the vacuum line is not S-invariant
    CHECK_THROWS_AS(beurling_criterion(model, bad, 1), std::invalid_argument);
}

TEST_CASE("factorization of the identity and of Beurling projections") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{4});
    const Eigen::Index n = model.dimN();

    auto resId = factorize_psd(model, Mat::Identity(n, n), 1);
    REQUIRE(std::holds_alternative<Factorization>(resId));
    auto& fId = std::get<Factorization>(resId);
    CHECK(fId.factorResidual < 1e-8);
    CHECK(fId.gamma.intertwiningResidual < 1e-9);

    // P_M for the degree >= 1 corner
    Mat corner = Mat::Zero(n, n - 1);
    for (Eigen::Index d = 1; d < n; ++d) corner(d, d - 1) = 1.0;
    Mat pm = corner * corner.adjoint();
    auto res = factorize_psd(model, pm, 1);
    REQUIRE(std::holds_alternative<Factorization>(res));
    auto& fact = std::get<Factorization>(res);
    CHECK(fact.factorResidual < 1e-8);
    CHECK(fact.gamma.intertwiningResidual < 1e-9);
    CHECK(fact.tuplePurity == Purity::Pure);
    // Gamma is a partial isometry onto M
    const Mat gg = fact.gamma.M * fact.gamma.M.adjoint();
    CHECK((gg - pm).norm() < 1e-8);
}

TEST_CASE("factorization refusal is sound on kernel range projections") {
    // range(K) is co-invariant, not invariant, so Delta^p(K K*) is genuinely
    // indefinite and the factorization must refuse with the witnessing
    // lattice point (exclusive-or of the Beurling equivalence)
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{3});
    Mat a = Mat::Zero(3, 3), b = Mat::Zero(3, 3);
    a(1, 0) = 0.4;
    a(2, 1) = 0.3;
    b(1, 0) = 0.2;
    b(2, 1) = 0.5;
    OperatorTuple t({{a, b}});
    auto kernel = berezin_kernel(model, t);
    const Mat g = kernel.K * kernel.K.adjoint();

    auto res = factorize_psd(model, g, kernel.defectRank);
    REQUIRE(std::holds_alternative<FactorizationFailure>(res));
    const auto& failure = std::get<FactorizationFailure>(res);
    CHECK(failure.minEigenvalue < -1e-9);

    // independent recomputation of the reported lattice point
    std::vector<std::vector<Mat>> amp(1);
    for (const Mat& s : model.S[0])
        amp[0].push_back(kron_identity(s, kernel.defectRank));
    OperatorTuple ampTuple(amp, 1e-8);
    CHECK(min_eigenvalue(defect_map(spec, ampTuple, failure.p, g)) ==
          doctest::Approx(failure.minEigenvalue).epsilon(1e-10));
}

TEST_CASE("Bergman-type multiplicity violates the criterion on some subspace") {
    // m = 2 single variable at D = 4: the one-dimensional span of e_1 + c e_2
    // is not Beurling once Delta^2 goes negative; search a small family
    DomainSpec spec = DomainSpec::single_variable(2);
    auto model = free_model(spec, TruncationGrid{4});
    const Eigen::Index n = model.dimN();

    bool foundViolation = false;
    double worstEig = 0.0;
    // invariant subspaces spanned by shifted lines: span{v, Sv, S^2 v, ...}
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50 && !foundViolation; ++trial) {
        Vec v = random_gaussian(n, 1, rng);
        v(0) = 0.0;  // keep it inside degree >= 1 so the hull is proper
        Mat hull = invariant_hull({model.op(1, 1)}, v, 1e-10);
        if (hull.cols() == n) continue;
        auto report = beurling_criterion(model, hull, 1);
        if (!report.satisfied) {
            foundViolation = true;
            for (const auto& [p, eig] : report.minEigen) worstEig = std::min(worstEig, eig);
            auto res = factorize_psd(model, Mat(hull * hull.adjoint()), 1);
            CHECK(std::holds_alternative<FactorizationFailure>(res));
        }
    }
    CHECK(foundViolation);
    CHECK(worstEig < -1e-4);
}

TEST_CASE("characteristic function of the zero tuple is the shift") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{3});
    auto t = OperatorTuple::zero(spec, 1);
    auto data = characteristic_function(model, t);

    REQUIRE(data.existsFlag);
    CHECK(data.unitIdentityResidual < 1e-10);
    // Theta maps e_j (x) slot to e_{j+1}: the degree-raising partial isometry
    const Mat& theta = data.theta.M;
    REQUIRE(data.theta.slotIn == 1);
    REQUIRE(theta.rows() == 4);
    CHECK(std::abs(theta(1, 0) - 1.0) < 1e-10);
    CHECK(std::abs(theta(2, 1) - 1.0) < 1e-10);
    CHECK(std::abs(theta(3, 2) - 1.0) < 1e-10);
    CHECK(theta.row(0).norm() < 1e-12);
    // inner: Theta* Theta idempotent
    const Mat gram = theta.adjoint() * theta;
    CHECK((gram * gram - gram).norm() < 1e-10);
}

TEST_CASE("characteristic function of the model itself vanishes") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{2});
    OperatorTuple w(model.ambient.dense());
    auto data = characteristic_function(model, w);
    REQUIRE(data.existsFlag);
    CHECK(data.theta.M.norm() < 1e-10);
    CHECK(data.unitIdentityResidual < 1e-10);
}

TEST_CASE("characteristic function of nilpotent ball tuples") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{3});
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(1, 0) = 0.5;
    b(1, 0) = 0.3;
    OperatorTuple t({{a, b}});
    auto data = characteristic_function(model, t);
    REQUIRE(data.existsFlag);
    CHECK(data.unitIdentityResidual < 1e-9);
    CHECK(data.theta.intertwiningResidual < 1e-9);

    // purity <-> inner: the tuple is pure, Theta* Theta is idempotent
    const Mat gram = data.theta.M.adjoint() * data.theta.M;
    CHECK((gram * gram - gram).norm() < 1e-8);
}

TEST_CASE("characteristic function separates pure from non-pure") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{5});

    // pure contraction: Theta inner to high accuracy (truncation tail only)
    Mat pure = 0.4 * Mat::Identity(2, 2);
    pure(0, 1) = 0.2;
    auto dPure = characteristic_function(model, OperatorTuple({{pure}}));
    REQUIRE(dPure.existsFlag);
    const Mat gPure = dPure.theta.M.adjoint() * dPure.theta.M;
    CHECK((gPure * gPure - gPure).norm() < 1e-2);  // tail-limited, see below

    // non-pure mix with a unitary summand: markedly non-inner
    Mat mixed = Mat::Zero(2, 2);
    mixed(0, 0) = 1.0;
    mixed(1, 1) = 0.5;
    auto dMixed = characteristic_function(model, OperatorTuple({{mixed}}));
    REQUIRE(dMixed.existsFlag);
    CHECK(dMixed.unitIdentityResidual < 1e-9);
    const Mat gMixed = dMixed.theta.M.adjoint() * dMixed.theta.M;
    CHECK((gMixed * gMixed - gMixed).norm() > 1e-4);

    // nilpotent pure tuples carry no tail: idempotency defect at 1e-8
    Mat nilp = Mat::Zero(3, 3);
    nilp(1, 0) = 0.5;
    nilp(2, 1) = 0.4;
    auto dNilp = characteristic_function(model, OperatorTuple({{nilp}}));
    REQUIRE(dNilp.existsFlag);
    const Mat gNilp = dNilp.theta.M.adjoint() * dNilp.theta.M;
    CHECK((gNilp * gNilp - gNilp).norm() < 1e-8);
}

TEST_CASE("characteristic function of the scalar identity emits a report") {
    // K = 0 here, so the existence test passes trivially and no refusal fires
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{3});
    Mat one = Mat::Identity(1, 1);
    auto data = characteristic_function(model, OperatorTuple({{one}}));
    CHECK(data.existsFlag);
    CHECK(data.kernel.defectRank == 0);
    CHECK(data.unitIdentityResidual < 1e-12);
}

TEST_CASE("pure model reconstructs the tuple on the Theta complement") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{4});

    // T = 0 on C^1: H is the vacuum slot, G = 0
    auto t0 = OperatorTuple::zero(spec, 1);
    auto d0 = characteristic_function(model, t0);
    auto p0 = pure_model(model, t0, d0);
    CHECK(p0.hBasis.cols() == 1);
    CHECK(p0.g[0][0].norm() < 1e-12);
    CHECK(p0.equivalenceResidual < 1e-10);

    // pure nilpotent 2x2
    Mat nilp = Mat::Zero(2, 2);
    nilp(1, 0) = 0.7;
    OperatorTuple t({{nilp}});
    auto data = characteristic_function(model, t);
    REQUIRE(data.existsFlag);
    auto pm = pure_model(model, t, data);
    CHECK(pm.equivalenceResidual < 1e-9);

    // T = truncated S: H is everything, G = S
    DomainSpec da = DomainSpec::drury_arveson(2);
    auto damodel = free_model(da, TruncationGrid{2});
    OperatorTuple w(damodel.ambient.dense());
    auto dw = characteristic_function(damodel, w);
    auto pw = pure_model(damodel, w, dw);
    CHECK(pw.hBasis.cols() == damodel.dimN());
    CHECK(pw.equivalenceResidual < 1e-9);
}

TEST_CASE("dilation of the scalar identity has a pure boundary") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{3});
    Mat one = Mat::Identity(1, 1);
    OperatorTuple t({{one}});
    auto dil = dilate(model, t);

    CHECK(dil.dilationIndex == 0);
    CHECK(dil.boundaryDim == 1);
    REQUIRE(dil.boundaryTuple.has_value());
    CHECK(std::abs(dil.boundaryTuple->op(1, 1)(0, 0) - Complex(1.0)) < 1e-12);
    CHECK(dil.boundaryDefect < 1e-12);
    CHECK(dil.isometryResidual < 1e-10);
    CHECK(dil.coInvarianceResidual < 1e-9);
}

TEST_CASE("dilation of pure tuples is the kernel itself") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{3});
    // coisometric row (0.6, 0.8): Delta(I) = diag(1, 0), defect rank one
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(1, 0) = 0.6;
    b(1, 0) = 0.8;
    OperatorTuple t({{a, b}});
    auto dil = dilate(model, t);

    CHECK(dil.boundaryDim == 0);
    CHECK(dil.dilationIndex == 1);
    CHECK(dil.isometryResidual < 1e-10);
    CHECK(dil.coInvarianceResidual < 1e-9);
    CHECK(dil.minimal);

    // dilation index equals the defect rank, also on a rank-two sample
    Mat b2 = Mat::Zero(2, 2);
    b2(1, 0) = 0.2;
    OperatorTuple t2({{a, b2}});
    auto dil2 = dilate(model, t2);
    const Mat delta2 = defect_map(spec, t2, spec.m, Mat::Identity(2, 2));
    CHECK(dil2.dilationIndex == numerical_rank(delta2, 1e-8));
    CHECK(dil2.dilationIndex == 2);
    CHECK(dil2.boundaryDim == 0);
    CHECK(dil2.minimal);
}

TEST_CASE("wold decomposition splits model and boundary summands") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{3});
    const Eigen::Index n = model.dimN();

    // V = S (x) I_2: multiplicity 2, K0 everything
    OperatorTuple doubled({{kron_identity(model.op(1, 1), 2)}});
    auto wold = wold_decompose(spec, doubled);
    CHECK(wold.multiplicity == 2);
    CHECK(wold.k0Basis.cols() == 2 * n);
    CHECK(wold.reducingResidual < 1e-9);

    // V with Delta = 0: K0 = {0}
    OperatorTuple unit({{Mat::Identity(2, 2)}});
    auto trivial = wold_decompose(spec, unit);
    CHECK(trivial.multiplicity == 0);
    CHECK(trivial.k0Basis.cols() == 0);
    CHECK(trivial.complementDefect < 1e-12);

    // V = S (+) boundary unitary: K0 is exactly the model summand
    Mat v = Mat::Zero(n + 1, n + 1);
    v.topLeftCorner(n, n) = model.op(1, 1);
    v(n, n) = 1.0;
    OperatorTuple mixed({{v}});
    auto split = wold_decompose(spec, mixed);
    CHECK(split.multiplicity == 1);
    CHECK(split.k0Basis.cols() == n);
    CHECK(split.reducingResidual < 1e-9);
    CHECK(split.complementDefect < 1e-12);
    // K0 spans the first n coordinates
    Mat expected = Mat::Zero(n + 1, n);
    expected.topLeftCorner(n, n) = Mat::Identity(n, n);
    CHECK(subspace_gap(split.k0Basis, expected) < 1e-9);
}

TEST_CASE("coincidence of characteristic functions") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{3});
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(1, 0) = 0.5;
    b(1, 0) = 0.25;
    OperatorTuple t({{a, b}});
    auto data = characteristic_function(model, t);
    REQUIRE(data.existsFlag);

    // Theta vs itself
    auto self = coincidence_check(model, data.theta, data.theta, 5);
    CHECK(self.coincide);
    CHECK(self.residual < 1e-10);

    // Theta vs (I (x) u) Theta (I (x) v*)
    std::mt19937_64 rng(77);
    const Eigen::Index n = model.dimN();
    for (int trial = 0; trial < 3; ++trial) {
        Mat u = random_unitary(data.theta.slotOut, rng);
        Mat v = random_unitary(data.theta.slotIn, rng);
        MultiAnalyticOp rotated = data.theta;
        rotated.M = identity_kron(n, u) * data.theta.M * identity_kron(n, v).adjoint();
        auto res = coincidence_check(model, data.theta, rotated, 5 + trial);
        CHECK(res.coincide);
    }

    // different slot ranks: zero tuple vs nilpotent
    DomainSpec sv = DomainSpec::single_variable(1);
    auto svmodel = free_model(sv, TruncationGrid{3});
    auto theta0 = characteristic_function(svmodel, OperatorTuple::zero(sv, 1)).theta;
    Mat nilp = Mat::Zero(2, 2);
    nilp(1, 0) = 0.4;
    auto theta1 = characteristic_function(svmodel, OperatorTuple({{nilp}})).theta;
    auto cross = coincidence_check(svmodel, theta0, theta1, 5);
    CHECK(!cross.coincide);
}

TEST_CASE("rank-one classification of co-invariant subspaces") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{3});
    std::mt19937_64 rng(111);

    Mat m1 = coinvariant_subspace(model, rng, 1);
    auto same = rank_one_classify(model, m1, m1);
    CHECK(same.subspacesEqual);
    CHECK(same.unitarySearchAgrees);
    CHECK(same.defectRank1 == 1);

    // two distinct co-invariant subspaces: never unitarily equivalent
    Mat m2 = coinvariant_subspace(model, rng, 1);
    if (subspace_gap(m1, m2) > 1e-6 && m1.cols() == m2.cols()) {
        auto diff = rank_one_classify(model, m1, m2);
        CHECK(!diff.subspacesEqual);
        CHECK(diff.unitarySearchAgrees);
    }
}

TEST_CASE("cyclic hull of co-invariant subspaces") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{2});
    const Eigen::Index n = model.dimN();

    // M = N (x) C^2: E = C^2
    auto full = cyclic_hull(model, Mat::Identity(2 * n, 2 * n), 2);
    CHECK(full.slotSpace.cols() == 2);
    CHECK(full.spanGap < 1e-10);

    // M = K(C^d) for a pure nilpotent: hull is N (x) D (minimality)
    Mat a = Mat::Zero(2, 2), b = Mat::Zero(2, 2);
    a(1, 0) = 0.5;
    b(1, 0) = 0.2;
    OperatorTuple t({{a, b}});
    auto kernel = berezin_kernel(model, t);
    auto hull = cyclic_hull(model, range_basis(kernel.K, 1e-10), kernel.defectRank);
    CHECK(hull.spanGap < 1e-9);
    CHECK(hull.hull.cols() == n * kernel.defectRank);

    // one-dimensional M = span{Gamma_lambda}: E is one-dimensional; the
    // truncated Gamma is co-invariant only up to its top-shell residual
    ScalarPoint pt{{{Complex(0.3), Complex(0.2)}}};
    auto kv = gamma_vector(model, pt);
    Mat line = kv.gamma / kv.gamma.norm();
    double slack = 0.0;
    for (const auto& r : verify_eigen(model, pt)) slack = std::max(slack, r.closedForm);
    auto lineHull = cyclic_hull(model, line, 1, Tolerances{}, 2.0 * slack);
    CHECK(lineHull.slotSpace.cols() == 1);
    CHECK(lineHull.spanGap < 1e-9);
}
