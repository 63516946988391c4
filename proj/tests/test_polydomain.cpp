#include <doctest.h>

#include <random>

#include "polyfock/fock.hpp"
#include "polyfock/polydomain.hpp"

using namespace polyfock;

namespace {
DomainSpec ball_spec(int n) { return DomainSpec::drury_arveson(n); }
}  // namespace

TEST_CASE("phi map basics") {
    auto q = PositiveRegularPolynomial::ball(1);
    Mat t(1, 1);
    t(0, 0) = Complex(0.3, 0.4);
    Mat one = Mat::Identity(1, 1);
    CHECK(std::abs(phi_map(q, {t}, one)(0, 0) - 0.25) < 1e-15);
    CHECK(phi_map(q, {t}, Mat::Zero(1, 1)).norm() == 0.0);

    auto q2 = PositiveRegularPolynomial::ball(2);
    Mat a(1, 1), b(1, 1);
    a(0, 0) = Complex(0.5, 0.0);
    b(0, 0) = Complex(0.0, 0.5);
    CHECK(std::abs(phi_map(q2, {a, b}, one)(0, 0) - 0.5) < 1e-15);
}

TEST_CASE("defect map worked examples") {
    DomainSpec spec = ball_spec(1);
    Mat nilp = Mat::Zero(2, 2);
    nilp(0, 1) = 1.0;
    OperatorTuple t({{nilp}});
    Mat identity = Mat::Identity(2, 2);

    CHECK((defect_map(spec, t, {0}, identity) - identity).norm() == 0.0);
    Mat d = defect_map(spec, t, {1}, identity);
    CHECK(std::abs(d(0, 0)) < 1e-15);
    CHECK(std::abs(d(1, 1) - 1.0) < 1e-15);

    // scalar point: Delta(1) = prod (1 - q_i(lambda lambda*))^{m_i}
    DomainSpec da2 = ball_spec(2);
    auto pt = OperatorTuple::scalar(da2, {{Complex(0.3), Complex(0.4)}});
    Mat v = defect_map(da2, pt, {1}, Mat::Identity(1, 1));
    CHECK(std::abs(v(0, 0) - 0.75) < 1e-15);
}

TEST_CASE("defect lattice recurrence") {
    // Delta^{p+e_i}(Y) = Delta^p(Y) - Phi_i(Delta^p(Y))
    DomainSpec spec({1, 1}, {2, 1},
                    {PositiveRegularPolynomial::ball(1), PositiveRegularPolynomial::ball(1)});
    std::mt19937_64 rng(7);
    Mat a = 0.3 * random_gaussian(3, 3, rng);
    Mat b = 0.3 * random_gaussian(3, 3, rng);
    // make the blocks commute: second block built from powers of the first
    OperatorTuple t({{a}, {a * a * 0.5}});
    Mat y = hermitize(random_gaussian(3, 3, rng));
    Mat lhs = defect_map(spec, t, {2, 1}, y);
    Mat base = defect_map(spec, t, {1, 1}, y);
    Mat rhs = base - phi_map(spec.q[0], t.block(1), base);
    CHECK((lhs - rhs).norm() < 1e-12);
    (void)b;
}

TEST_CASE("membership: zero tuple and row contractions") {
    DomainSpec spec = ball_spec(1);
    auto zero = OperatorTuple::zero(spec, 3);
    auto report = check_membership(spec, zero);
    CHECK(report.isMember);
    CHECK(report.defectRank == 3);
    CHECK(report.purity == Purity::Pure);

    // k=1, q=Z, m=1: member iff ||T|| <= 1
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        Mat t = random_gaussian(3, 3, rng);
        Eigen::JacobiSVD<Mat> svd(t);
        const double top = svd.singularValues()(0);
        OperatorTuple inside({{t / (top * 1.01)}});
        OperatorTuple outside({{t / (top * 0.95)}});
        CHECK(check_membership(spec, inside).isMember);
        CHECK(!check_membership(spec, outside).isMember);
    }
}

TEST_CASE("membership of the truncated universal model") {
    DomainSpec spec({2, 1}, {1, 2},
                    {PositiveRegularPolynomial::ball(2), PositiveRegularPolynomial::ball(1)});
    auto model = build_universal_model(spec, TruncationGrid{2, 2});
    OperatorTuple w(model.dense());
    auto report = check_membership(spec, w);
    CHECK(report.isMember);
    CHECK(report.purity == Purity::Pure);
    CHECK(report.defectRank == 1);  // Delta^m(I) = P_C exactly at truncation
}

TEST_CASE("purity states") {
    DomainSpec spec = ball_spec(1);
    Mat one = Mat::Identity(1, 1);
    CHECK(check_purity(spec, OperatorTuple({{one}})) == Purity::NotPure);
    CHECK(check_purity(spec, OperatorTuple({{0.5 * one}})) == Purity::Pure);
    CHECK(check_purity(spec, OperatorTuple::zero(spec, 2)) == Purity::Pure);

    Mat nilp = Mat::Zero(3, 3);
    nilp(0, 1) = 5.0;  // nilpotent shortcut holds even outside the domain
    nilp(1, 2) = 5.0;
    CHECK(check_purity(spec, OperatorTuple({{nilp}})) == Purity::Pure);
}

TEST_CASE("scaling preserves membership") {
    DomainSpec spec = ball_spec(2);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 6; ++trial) {
        Mat a = random_gaussian(3, 3, rng), b = random_gaussian(3, 3, rng);
        Mat row(3, 6);
        row << a, b;
        const double top = Eigen::JacobiSVD<Mat>(row).singularValues()(0) * 1.02;
        OperatorTuple t({{a / top, b / top}});
        REQUIRE(check_membership(spec, t).isMember);
        CHECK(check_membership(spec, scale_tuple(t, 0.7)).isMember);
        CHECK(scale_tuple(t, 0.0).op(1, 1).norm() == 0.0);
        CHECK((scale_tuple(t, 1.0).op(1, 2) - t.op(1, 2)).norm() == 0.0);
    }
}

TEST_CASE("monotone limit is squeezed between zero and the seed") {
    // nilpotent members make the iterated limit a finite computation
    DomainSpec spec = ball_spec(2);
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 6; ++trial) {
        Mat a = Mat::Zero(4, 4), b = Mat::Zero(4, 4);
        for (int r = 1; r < 4; ++r)
            for (int c = 0; c < r; ++c) {
                a(r, c) = 0.2 * Complex(std::normal_distribution<double>()(rng), 0.0);
                b(r, c) = 0.2 * Complex(std::normal_distribution<double>()(rng), 0.0);
            }
        OperatorTuple t({{a, b}});
        REQUIRE(check_membership(spec, t).isMember);

        Mat g = random_gaussian(4, 2, rng);
        Mat x = g * g.adjoint();
        bool admissible = true;
        for (int p = 0; p <= 1 && admissible; ++p)
            admissible = is_psd(defect_map(spec, t, {p}, x), 1e-9);
        if (!admissible) continue;

        // nilpotency order <= 4: the limit stabilizes at N = 4
        Mat lim = x;
        Mat phiPow = lim;
        for (int rep = 0; rep < 4; ++rep) phiPow = phi_map(spec.q[0], t.block(1), phiPow);
        lim -= phiPow;
        CHECK(is_psd(lim, 1e-9));
        CHECK(is_psd(x - lim, 1e-9));
    }
}

TEST_CASE("cnc witness at a finite cap") {
    DomainSpec spec = ball_spec(1);
    // strict contraction: iterates shrink to zero, witness positive
    Mat strict = 0.5 * Mat::Identity(2, 2);
    auto good = cnc_witness(spec, OperatorTuple({{strict}}), 16);
    CHECK(good.capUsed == 16);
    CHECK(good.witness());

    // a unitary direct summand kills the pairing on its eigenvector
    Mat mixed = Mat::Zero(2, 2);
    mixed(0, 0) = 1.0;
    mixed(1, 1) = 0.5;
    auto bad = cnc_witness(spec, OperatorTuple({{mixed}}), 16);
    CHECK(!bad.witness());
}

TEST_CASE("evaluate_poly linearity and multiplicativity") {
    DomainSpec spec({2}, {1}, {PositiveRegularPolynomial::ball(2)});
    std::mt19937_64 rng(5);
    Mat a = 0.4 * random_gaussian(3, 3, rng), b = 0.4 * random_gaussian(3, 3, rng);
    OperatorTuple t({{a, b}});

    NcPolynomial z1 = NcPolynomial::generator(1, 1, 1);
    NcPolynomial z2 = NcPolynomial::generator(1, 1, 2);
    NcPolynomial p = z1 * z2 - z2 * z1 + NcPolynomial(1, Complex(2.0));

    Mat lhs = evaluate_poly(p * p, t);
    Mat rhs = evaluate_poly(p, t) * evaluate_poly(p, t);
    CHECK((lhs - rhs).norm() < 1e-12);

    // constant polynomial evaluates to a multiple of the identity
    CHECK((evaluate_poly(NcPolynomial(1, Complex(1.0)), t) - Mat::Identity(3, 3)).norm() ==
          0.0);

    // commutator of commuting matrices vanishes
    OperatorTuple comm({{a, a * a}});
    CHECK(evaluate_poly(z1 * z2 - z2 * z1, comm).norm() < 1e-13);

    // scalar diagonal product example
    DomainSpec two({1, 1}, {1, 1},
                   {PositiveRegularPolynomial::ball(1), PositiveRegularPolynomial::ball(1)});
    auto pt = OperatorTuple::scalar(two, {{Complex(2.0)}, {Complex(3.0)}});
    NcPolynomial z11 = NcPolynomial::generator(2, 1, 1);
    NcPolynomial z21 = NcPolynomial::generator(2, 2, 1);
    CHECK(std::abs(evaluate_poly(z11 * z21, pt)(0, 0) - Complex(6.0)) < 1e-15);
}
