#include "polyfock/rkhs.hpp"

#include <cmath>
#include <stdexcept>

namespace polyfock {

std::vector<double> ScalarPoint::abs_squared(int block) const {
    std::vector<double> out;
    out.reserve(lambda.at(block - 1).size());
    for (Complex z : lambda.at(block - 1)) out.push_back(std::norm(z));
    return out;
}

Complex ScalarPoint::conj_power(const MultiIndex& beta) const {
    Complex acc = 1.0;
    for (int i = 1; i <= beta.block_count(); ++i)
        for (int l : beta.word(i).letters) acc *= std::conj(at(i, l));
    return acc;
}

std::vector<double> strictness_values(const DomainSpec& spec, const ScalarPoint& pt) {
    if (static_cast<int>(pt.lambda.size()) != spec.block_count())
        throw std::invalid_argument("point block count mismatch");
    std::vector<double> out;
    for (int i = 1; i <= spec.block_count(); ++i)
        out.push_back(spec.q[static_cast<std::size_t>(i - 1)].evaluate_abs(pt.abs_squared(i)));
    return out;
}

bool is_strict(const DomainSpec& spec, const ScalarPoint& pt, double margin) {
    for (double v : strictness_values(spec, pt))
        if (v > 1.0 - margin) return false;
    return true;
}

double scalar_defect(const DomainSpec& spec, const ScalarPoint& pt) {
    double acc = 1.0;
    const auto vals = strictness_values(spec, pt);
    for (int i = 0; i < spec.block_count(); ++i)
        acc *= std::pow(1.0 - vals[static_cast<std::size_t>(i)],
                        spec.m[static_cast<std::size_t>(i)]);
    return acc;
}

Complex evaluate_at_point(const NcPolynomial& g, const ScalarPoint& pt) {
    Complex acc = 0.0;
    for (const auto& [mi, c] : g.terms()) {
        Complex term = c;
        for (int i = 1; i <= mi.block_count(); ++i)
            for (int l : mi.word(i).letters) term *= pt.at(i, l);
        acc += term;
    }
    return acc;
}

namespace {

// ambient coefficients of Gamma_lambda on the truncated basis
Vec gamma_ambient(const FockBasis& basis, const ScalarPoint& pt, double delta1) {
    Vec out(basis.dim());
    const double root = std::sqrt(delta1);
    for (Index idx = 0; idx < basis.dim(); ++idx)
        out(idx) = root * pt.conj_power(basis.at(idx)) * std::sqrt(basis.b_product(idx));
    return out;
}

}  // namespace

KernelVector gamma_vector(const VarietyModel& model, const ScalarPoint& pt,
                          const Tolerances& tol) {
    (void)tol;  // acceptance thresholds for points are fixed, not configurable
    const DomainSpec& spec = model.ambient.basis.spec();
    if (!is_strict(spec, pt))
        throw std::invalid_argument("point is not in the strict scalar polydomain");
    for (const auto& g : model.ideal.generators)
        if (std::abs(evaluate_at_point(g, pt)) > 1e-10)
            throw std::invalid_argument("point violates a variety equation");

    KernelVector kv;
    kv.delta1 = scalar_defect(spec, pt);
    const FockBasis& basis = model.ambient.basis;
    const Vec ambient = gamma_ambient(basis, pt, kv.delta1);
    kv.gamma = model.basisN.adjoint() * ambient;
    kv.projectionResidual = (ambient - model.basisN * kv.gamma).norm();
    // shells of total degree <= min cap sit completely inside the product
    // grid, so only the mass above that degree can escape N legitimately;
    // anything beyond marks a genuine variety violation
    const int interior = basis.grid().min_cap();
    double boundarySq = 0.0;
    for (Index idx = 0; idx < basis.dim(); ++idx)
        if (basis.total_degree(idx) > interior) boundarySq += std::norm(ambient(idx));
    if (kv.projectionResidual > 1e-8 * ambient.norm() + std::sqrt(boundarySq))
        throw std::invalid_argument("point is outside the variety of this model");
    kv.u = kv.gamma / std::sqrt(kv.delta1);
    kv.tailNorm = std::sqrt(std::max(0.0, 1.0 - ambient.squaredNorm()));
    return kv;
}

std::vector<EigenResidual> verify_eigen(const VarietyModel& model, const ScalarPoint& pt,
                                        const Tolerances& tol) {
    const KernelVector kv = gamma_vector(model, pt, tol);
    const FockBasis& basis = model.ambient.basis;
    const DomainSpec& spec = basis.spec();
    const Vec ambient = model.basisN * kv.gamma;

    std::vector<EigenResidual> out;
    for (int i = 1; i <= spec.block_count(); ++i) {
        // mass of the block-i top slice: components with |beta_i| = D_i
        double sliceSq = 0.0;
        for (Index idx = 0; idx < basis.dim(); ++idx)
            if (basis.at(idx).word(i).length() == basis.grid().cap(i))
                sliceSq += std::norm(ambient(idx));
        const double slice = std::sqrt(sliceSq);
        for (int j = 1; j <= spec.n[static_cast<std::size_t>(i - 1)]; ++j) {
            EigenResidual r;
            r.block = i;
            r.letter = j;
            r.residual =
                (model.op(i, j).adjoint() * kv.gamma - std::conj(pt.at(i, j)) * kv.gamma)
                    .norm();
            r.closedForm = std::abs(pt.at(i, j)) * slice;
            out.push_back(r);
        }
    }
    return out;
}

Complex kernel_value(const DomainSpec& spec, const ScalarPoint& mu, const ScalarPoint& lambda) {
    Complex acc = 1.0;
    for (int i = 1; i <= spec.block_count(); ++i) {
        std::vector<Complex> prod;
        const auto& mi = mu.lambda.at(static_cast<std::size_t>(i - 1));
        const auto& li = lambda.lambda.at(static_cast<std::size_t>(i - 1));
        if (mi.size() != li.size()) throw std::invalid_argument("point shapes differ");
        for (std::size_t j = 0; j < mi.size(); ++j) prod.push_back(mi[j] * std::conj(li[j]));
        const Complex denom = Complex(1.0) - spec.q[static_cast<std::size_t>(i - 1)].evaluate(prod);
        if (std::abs(denom) < 1e-12)
            throw std::runtime_error("kernel denominator vanishes at this pair");
        for (int rep = 0; rep < spec.m[static_cast<std::size_t>(i - 1)]; ++rep) acc /= denom;
    }
    return acc;
}

Complex kernel_value_cc(const DomainSpec& spec, const std::vector<Complex>& z,
                        const std::vector<Complex>& w) {
    ScalarPoint zp, wp;
    for (int i = 0; i < spec.block_count(); ++i) {
        zp.lambda.push_back(z);
        wp.lambda.push_back(w);
    }
    return kernel_value(spec, zp, wp);
}

GramResult gram_matrix(const DomainSpec& spec, const std::vector<ScalarPoint>& points) {
    GramResult out;
    const Eigen::Index n = static_cast<Eigen::Index>(points.size());
    out.gram.resize(n, n);
    for (Eigen::Index s = 0; s < n; ++s)
        for (Eigen::Index t = 0; t < n; ++t)
            out.gram(s, t) = kernel_value(spec, points[static_cast<std::size_t>(s)],
                                          points[static_cast<std::size_t>(t)]);
    out.minEigenvalue = min_eigenvalue(out.gram);
    return out;
}

PointValue point_evaluate(const VarietyModel& model, const Vec& phi, const ScalarPoint& pt,
                          const Tolerances& tol) {
    const KernelVector kv = gamma_vector(model, pt, tol);
    PointValue out;
    out.value = kv.u.dot(phi);  // <phi, u_lambda>, conjugate-linear in u
    out.growthBound = phi.norm() / std::sqrt(kv.delta1);
    return out;
}

FunctionalValue evaluation_functional(const VarietyModel& model, const Mat& a,
                                      const ScalarPoint& pt, const Tolerances& tol) {
    if (!model.vacuumInN)
        throw std::invalid_argument("evaluation functional requires the vacuum inside N");
    const KernelVector kv = gamma_vector(model, pt, tol);
    FunctionalValue out;
    const Vec one = model.vacuum_coords();
    out.value = kv.u.dot(a * one);
    const Complex viaGamma = kv.gamma.dot(a * kv.gamma);
    out.crossCheckResidual = std::abs(out.value - viaGamma);
    const double opNorm = a.rows() == 0 ? 0.0 : Eigen::JacobiSVD<Mat>(a).singularValues()(0);
    out.tailAllowance = opNorm * (2.0 * kv.tailNorm + kv.tailNorm * kv.tailNorm);
    return out;
}

double multiplier_check(const VarietyModel& model, const Mat& phi, const Vec& psi,
                        const std::vector<ScalarPoint>& points, const Tolerances& tol) {
    double worst = 0.0;
    for (const auto& pt : points) {
        const PointValue product = point_evaluate(model, phi * psi, pt, tol);
        const PointValue psiVal = point_evaluate(model, psi, pt, tol);
        const FunctionalValue phiVal = evaluation_functional(model, phi, pt, tol);
        worst = std::max(worst, std::abs(product.value - phiVal.value * psiVal.value));
    }
    return worst;
}

bool right_spectrum_witness(const VarietyModel& model, const ScalarPoint& pt,
                            const Tolerances& tol) {
    const DomainSpec& spec = model.ambient.basis.spec();
    if (!is_strict(spec, pt)) return false;
    try {
        // models whose quotient mixes per-block degrees (Q_cc) keep a small
        // projection residual at product caps; the eigen relation inherits it
        const double slack = 2.0 * gamma_vector(model, pt, tol).projectionResidual;
        const auto residuals = verify_eigen(model, pt, tol);
        for (const auto& r : residuals)
            if (r.residual > r.closedForm + 1e-9 + slack) return false;
        return true;
    } catch (const std::invalid_argument&) {
        return false;
    }
}

namespace {

// sum_{p >= p0} C(p+m-1, m-1) x^p for 0 <= x < 1
double negative_binomial_tail(int p0, int m, double x) {
    if (x >= 1.0) return std::numeric_limits<double>::infinity();
    double acc = 0.0, term;
    for (int p = p0; p < p0 + 100000; ++p) {
        term = 1.0;
        for (int i = 1; i <= m - 1; ++i) term *= static_cast<double>(p + i) / i;
        term *= std::pow(x, p);
        acc += term;
        if (term < 1e-18 * (acc + 1e-300)) break;
    }
    return acc;
}

// sum over all multi-indices outside the caps of prod b |lambda_beta|^2,
// bounded block by block through the negative binomial tail
double omitted_mass_bound(const DomainSpec& spec, const TruncationGrid& grid,
                          const ScalarPoint& pt) {
    const auto rho = strictness_values(spec, pt);
    double full = 1.0;
    std::vector<double> fulls(static_cast<std::size_t>(spec.block_count()));
    for (int i = 0; i < spec.block_count(); ++i) {
        fulls[static_cast<std::size_t>(i)] =
            1.0 / std::pow(1.0 - rho[static_cast<std::size_t>(i)],
                           spec.m[static_cast<std::size_t>(i)]);
        full *= fulls[static_cast<std::size_t>(i)];
    }
    double bound = 0.0;
    for (int i = 0; i < spec.block_count(); ++i) {
        const int g = spec.q[static_cast<std::size_t>(i)].degree();
        const int p0 = (grid.caps[static_cast<std::size_t>(i)] + 1 + g - 1) / g;  // ceil
        const double tail = negative_binomial_tail(p0, spec.m[static_cast<std::size_t>(i)],
                                                   rho[static_cast<std::size_t>(i)]);
        bound += tail * full / fulls[static_cast<std::size_t>(i)];
    }
    return bound;
}

}  // namespace

double kernel_tail_bound(const DomainSpec& spec, const TruncationGrid& grid,
                         const ScalarPoint& lambda, const ScalarPoint& mu) {
    return std::sqrt(omitted_mass_bound(spec, grid, lambda)) *
           std::sqrt(omitted_mass_bound(spec, grid, mu));
}

}  // namespace polyfock
