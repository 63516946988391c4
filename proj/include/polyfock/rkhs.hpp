#pragma once

// Scalar-point theory: joint eigenvectors Gamma_lambda of the adjoint model
// operators, normalized kernels u_lambda, the reproducing kernels kappa^c
// and kappa^cc, point evaluation, evaluation functionals, and multiplier
// action checks.

#include <vector>

#include "polyfock/variety.hpp"

namespace polyfock {

struct ScalarPoint {
    std::vector<std::vector<Complex>> lambda;  // lambda[i-1][j-1] = lambda_{i,j}

    const Complex& at(int block, int letter) const {
        return lambda.at(block - 1).at(letter - 1);
    }
    // |lambda_{i,j}|^2 per block, the argument of q_i for strictness
    std::vector<double> abs_squared(int block) const;
    // conj(lambda)_{(beta)} over a multi-index
    Complex conj_power(const MultiIndex& beta) const;
};

// q_i(lambda_i conj(lambda_i)) per block
std::vector<double> strictness_values(const DomainSpec& spec, const ScalarPoint& pt);
// strict membership with the acceptance margin: q_i < 1 - margin for all i
bool is_strict(const DomainSpec& spec, const ScalarPoint& pt, double margin = 1e-8);
// Delta_{f,lambda}^m(1) = prod (1 - q_i(lambda lambda*))^{m_i}
double scalar_defect(const DomainSpec& spec, const ScalarPoint& pt);
// g(lambda) for a noncommutative polynomial at a scalar point
Complex evaluate_at_point(const NcPolynomial& g, const ScalarPoint& pt);

struct KernelVector {
    Vec gamma;                 // Gamma_lambda in model (N) coordinates
    Vec u;                     // u_lambda = Delta(1)^{-1/2} Gamma
    double delta1 = 0.0;       // Delta_{f,lambda}^m(1)
    double tailNorm = 0.0;     // sqrt(1 - ||Gamma^{(D)}||^2), exact tail mass
    double projectionResidual = 0.0;  // ambient mass outside N
};

// Truncated Gamma_lambda projected into N; throws when lambda is not strict
// or violates the variety equations beyond tolerance.
KernelVector gamma_vector(const VarietyModel& model, const ScalarPoint& pt,
                          const Tolerances& tol = {});

struct EigenResidual {
    int block = 0, letter = 0;
    double residual = 0.0;    // ||S*_{i,j} Gamma - conj(lambda_{i,j}) Gamma||
    double closedForm = 0.0;  // |lambda_{i,j}| * || block-i top slice of Gamma ||
};

std::vector<EigenResidual> verify_eigen(const VarietyModel& model, const ScalarPoint& pt,
                                        const Tolerances& tol = {});

// kappa^c(mu, lambda) = 1 / prod_i (1 - q_i(mu_i conj(lambda_i)))^{m_i}
Complex kernel_value(const DomainSpec& spec, const ScalarPoint& mu, const ScalarPoint& lambda);
// diagonal-variety kernel kappa^cc(z, w); blocks share the point z
Complex kernel_value_cc(const DomainSpec& spec, const std::vector<Complex>& z,
                        const std::vector<Complex>& w);

struct GramResult {
    Mat gram;
    double minEigenvalue = 0.0;
};
GramResult gram_matrix(const DomainSpec& spec, const std::vector<ScalarPoint>& points);

// <phi, u_lambda> together with the growth bound ||phi|| / sqrt(Delta(1))
struct PointValue {
    Complex value;
    double growthBound = 0.0;
};
PointValue point_evaluate(const VarietyModel& model, const Vec& phi, const ScalarPoint& pt,
                          const Tolerances& tol = {});

// Phi_lambda(A) = <A(1), u_lambda>, cross-checked against <A Gamma, Gamma>.
// The quadratic form sees the truncation tail twice, so its deviation is
// bounded by ||A|| (2 tail + tail^2); tailAllowance carries that budget.
struct FunctionalValue {
    Complex value;
    double crossCheckResidual = 0.0;
    double tailAllowance = 0.0;
};
FunctionalValue evaluation_functional(const VarietyModel& model, const Mat& a,
                                      const ScalarPoint& pt, const Tolerances& tol = {});

// max over sample points of |(M_phi psi)(lambda) - Phi_lambda(phi) psi(lambda)|
double multiplier_check(const VarietyModel& model, const Mat& phi, const Vec& psi,
                        const std::vector<ScalarPoint>& points, const Tolerances& tol = {});

// constructive right-spectrum witness: a joint eigenvector exists at lambda
bool right_spectrum_witness(const VarietyModel& model, const ScalarPoint& pt,
                            const Tolerances& tol = {});

// Rigorous bound on |<u_lambda, u_mu>_(D) - kappa(mu, lambda)| from the
// negative binomial tail of the b series past the caps.
double kernel_tail_bound(const DomainSpec& spec, const TruncationGrid& grid,
                         const ScalarPoint& lambda, const ScalarPoint& mu);

}  // namespace polyfock
