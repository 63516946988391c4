#include <doctest.h>

#include <random>

#include "polyfock/berezin.hpp"

using namespace polyfock;

namespace {

VarietyModel free_model(const DomainSpec& spec, const TruncationGrid& grid) {
    return build_variety_model(spec, grid, IdealSpec::zero());
}

// random jointly nilpotent tuple: strictly lower triangular blocks scaled
// into the polydomain, cross-block commutation arranged through powers
OperatorTuple random_nilpotent(const DomainSpec& spec, Eigen::Index d, std::mt19937_64& rng,
                               double scale = 0.2) {
    std::vector<std::vector<Mat>> blocks(static_cast<std::size_t>(spec.block_count()));
    Mat base = Mat::Zero(d, d);
    for (Eigen::Index r = 1; r < d; ++r)
        for (Eigen::Index c = 0; c < r; ++c)
            base(r, c) = Complex(std::normal_distribution<double>()(rng),
                                 std::normal_distribution<double>()(rng));
    for (int i = 0; i < spec.block_count(); ++i)
        for (int j = 0; j < spec.n[static_cast<std::size_t>(i)]; ++j) {
            // powers of one strictly-lower matrix commute across blocks
            Mat entry = base;
            for (int rep = 0; rep < i; ++rep) entry = entry * base;
            blocks[static_cast<std::size_t>(i)].push_back(scale * entry /
                                                          std::max(1.0, base.norm()));
        }
    return OperatorTuple(std::move(blocks), 1e-9);
}

}  // namespace

TEST_CASE("zero tuple kernel is the vacuum isometry") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{3});
    auto t = OperatorTuple::zero(spec, 3);
    auto kernel = berezin_kernel(model, t);

    CHECK(kernel.defectRank == 3);
    CHECK(kernel.truncationResidual == 0.0);
    CHECK((kernel.K.adjoint() * kernel.K - Mat::Identity(3, 3)).norm() < 1e-12);
    // rows beyond the vacuum block vanish
    CHECK(kernel.K.bottomRows(kernel.K.rows() - 3).norm() == 0.0);
    CHECK(verify_intertwining(kernel, model, t) < 1e-14);
}

TEST_CASE("scalar point kernel is the geometric column") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{4});
    Mat lam(1, 1);
    lam(0, 0) = 0.5;
    OperatorTuple t({{lam}});
    auto kernel = berezin_kernel(model, t);

    REQUIRE(kernel.defectRank == 1);
    const double root = std::sqrt(0.75);
    for (int d = 0; d <= 4; ++d)
        CHECK(std::abs(kernel.K(d, 0) - root * std::pow(0.5, d)) < 1e-14);
    const double normSq = 0.75 * (1.0 - std::pow(0.25, 5)) / (1.0 - 0.25);
    CHECK(kernel.K.squaredNorm() == doctest::Approx(normSq).epsilon(1e-12));
    CHECK(kernel.truncationResidual > 0.0);  // non-nilpotent: tail reported

    // the intertwining defect sits entirely on the omitted shell: for a
    // scalar point both equal sqrt(0.75) |lambda|^{D+1}
    const double defect = verify_intertwining(kernel, model, t);
    CHECK(defect == doctest::Approx(kernel.truncationResidual).epsilon(1e-12));
    CHECK(defect == doctest::Approx(std::sqrt(0.75) * std::pow(0.5, 5)).epsilon(1e-12));
}

TEST_CASE("the truncated model is its own isometric kernel") {
    DomainSpec spec({2}, {1}, {PositiveRegularPolynomial::ball(2)});
    auto model = free_model(spec, TruncationGrid{2});
    OperatorTuple w(model.ambient.dense());
    auto kernel = berezin_kernel(model, w);

    CHECK(kernel.truncationResidual <= 1e-14);
    CHECK((kernel.K.adjoint() * kernel.K -
           Mat::Identity(model.ambient_dim(), model.ambient_dim()))
              .norm() < 1e-10);
    CHECK(verify_intertwining(kernel, model, w) < 1e-10);
}

TEST_CASE("berezin transform reconstructs word products for pure tuples") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{3});
    std::mt19937_64 rng(42);
    auto t = random_nilpotent(spec, 3, rng);
    REQUIRE(check_membership(spec, t).isMember);

    auto kernel = berezin_kernel(model, t);
    CHECK(kernel.truncationResidual <= 1e-13);
    CHECK((kernel.K.adjoint() * kernel.K - Mat::Identity(3, 3)).norm() < 1e-10);
    CHECK(verify_intertwining(kernel, model, t) < 1e-12);

    // g = I
    CHECK((berezin_transform(kernel, Mat::Identity(model.dimN(), model.dimN())) -
           Mat::Identity(3, 3))
              .norm() < 1e-10);

    // g = S_(alpha): recovers T_(alpha); g = P_C: recovers the defect
    MultiIndex alpha(1);
    alpha.word(1) = Word{1, {1, 2}};
    CHECK((berezin_transform(kernel, model.word_operator(alpha)) - t.word_operator(alpha))
              .norm() < 1e-10);
    CHECK((berezin_transform(kernel, model.defect_target()) -
           defect_map(spec, t, spec.m, Mat::Identity(3, 3)))
              .norm() < 1e-10);

    // reconstruction for mixed words S_(a) S_(b)*
    MultiIndex beta(1);
    beta.word(1) = Word{1, {2}};
    Mat g = model.word_operator(alpha) * model.word_operator(beta).adjoint();
    CHECK((berezin_transform(kernel, g) -
           t.word_operator(alpha) * t.word_operator(beta).adjoint())
              .norm() < 1e-10);
}

TEST_CASE("constrained kernel against the commutant variety") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    TruncationGrid grid{3};
    auto model = build_variety_model(spec, grid, IdealSpec::commutant(spec));

    // commuting nilpotent pair lies in the Q_c variety
    Mat a = Mat::Zero(3, 3), b = Mat::Zero(3, 3);
    a(1, 0) = 0.4;
    a(2, 1) = 0.3;
    b = 0.5 * a * a;
    OperatorTuple t({{a, b}});
    REQUIRE(check_membership(spec, t).isMember);

    auto kernel = berezin_kernel(model, t);
    CHECK(kernel.constrained);
    CHECK(kernel.truncationResidual <= 1e-14);
    CHECK((kernel.K.adjoint() * kernel.K - Mat::Identity(3, 3)).norm() < 1e-10);
    CHECK(verify_intertwining(kernel, model, t) < 1e-10);
    CHECK(kernel_range_defect(model, t) < 1e-10);
}

TEST_CASE("K*K agrees with the iterated defect limit for nilpotent tuples") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{3});
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        auto t = random_nilpotent(spec, 4, rng, 0.5);
        auto kernel = berezin_kernel(model, t);
        // iterated limit (id - Phi^N)...(I) stabilizes at N = d for nilpotents
        Mat y = Mat::Identity(4, 4);
        for (int i = 1; i <= spec.block_count(); ++i) {
            Mat p = y;
            for (int rep = 0; rep < 4; ++rep) p = phi_map(spec.q[i - 1], t.block(i), p);
            y -= p;
        }
        CHECK((kernel.K.adjoint() * kernel.K - y).norm() < 1e-10);
    }
}

TEST_CASE("radial transform evaluates polynomials at the scaled tuple") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{4});
    Mat nilp = Mat::Zero(3, 3);
    nilp(1, 0) = 0.6;
    nilp(2, 1) = 0.5;
    OperatorTuple t({{nilp}});

    MultiIndex alpha(1);
    alpha.word(1) = Word{1, {1, 1}};
    Mat g = model.word_operator(alpha);
    for (double r : {0.5, 0.9}) {
        Mat lhs = radial_transform(model, t, g, r);
        Mat rhs = scale_tuple(t, r).word_operator(alpha);
        CHECK((lhs - rhs).norm() < 1e-12);
    }
    // r = 0 picks out the constant term
    CHECK(radial_transform(model, t, g, 0.0).norm() < 1e-14);
    CHECK((radial_transform(model, t, Mat::Identity(5, 5), 0.0) - Mat::Identity(3, 3)).norm() <
          1e-12);

    // sweep toward 1 on a strict contraction: Cauchy differences shrink
    Mat contraction = 0.8 * Mat::Identity(2, 2);
    contraction(0, 1) = 0.1;
    OperatorTuple c({{contraction}});
    double prev = -1.0;
    Mat last;
    for (double r : {0.9, 0.99, 0.999}) {
        Mat value = radial_transform(model, c, g, r);
        if (prev >= 0.0) {
            const double diff = (value - last).norm();
            CHECK(diff < prev);
            prev = diff;
        } else {
            prev = 1e9;
        }
        last = value;
    }
}

TEST_CASE("complete positivity of the transform") {
    DomainSpec spec = DomainSpec::drury_arveson(2);
    auto model = free_model(spec, TruncationGrid{2});
    std::mt19937_64 rng(99);
    auto t = random_nilpotent(spec, 3, rng);
    auto kernel = berezin_kernel(model, t);

    std::vector<Mat> gs;
    for (int s = 0; s < 3; ++s) gs.push_back(random_gaussian(model.dimN(), model.dimN(), rng));
    const Eigen::Index d = t.dim();
    Mat block(3 * d, 3 * d);
    for (int s = 0; s < 3; ++s)
        for (int u = 0; u < 3; ++u)
            block.block(s * d, u * d, d, d) =
                berezin_transform(kernel, gs[s].adjoint() * gs[u]);
    CHECK(is_psd(block, 1e-9));
}

TEST_CASE("kernel refuses a tuple with an indefinite defect") {
    DomainSpec spec = DomainSpec::single_variable(1);
    auto model = free_model(spec, TruncationGrid{2});
    Mat big(1, 1);
    big(0, 0) = 1.5;  // ||T|| > 1, defect negative
    OperatorTuple t({{big}});
    CHECK_THROWS_AS(berezin_kernel(model, t), std::runtime_error);
}
