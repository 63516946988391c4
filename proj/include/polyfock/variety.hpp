#pragma once

// Polynomial left ideals, the quotient subspace N_Q at truncation, the
// constrained universal model S_{i,j} = P_N W_{i,j}|_N, and the symmetric
// (fully commutative) specializations.

#include <optional>
#include <string>
#include <vector>

#include "polyfock/fock.hpp"
#include "polyfock/polydomain.hpp"

namespace polyfock {

struct IdealSpec {
    enum class Kind { General, CommutantQc, FullyCommutativeQcc };

    std::vector<NcPolynomial> generators;
    bool twoSided = false;
    Kind kind = Kind::General;

    bool homogeneous() const;
    bool empty() const { return generators.empty(); }

    static IdealSpec zero() { return IdealSpec{}; }
    // Q_c: within-block commutators Z_{i,j1} Z_{i,j2} - Z_{i,j2} Z_{i,j1}
    static IdealSpec commutant(const DomainSpec& spec);
    // Q_cc: Q_c plus Z_{1,j} - Z_{i,j}; requires equal block sizes
    static IdealSpec fully_commutative(const DomainSpec& spec);
};

struct VarietyModel {
    UniversalModel ambient;
    IdealSpec ideal;
    Mat basisN;      // ambient dim x dim N, orthonormal columns
    std::vector<std::vector<Mat>> S;
    std::vector<int> basisDegrees;  // total degree per N-basis column; -1 if mixed
    bool graded = false;            // true when every basis column is degree-pure
    bool vacuumInN = false;
    double leakageNorm = 0.0;  // cap leakage of generator images (non-homogeneous only)

    Eigen::Index ambient_dim() const { return ambient.basis.dim(); }
    Eigen::Index dimN() const { return basisN.cols(); }
    const Mat& op(int block, int letter) const { return S.at(block - 1).at(letter - 1); }
    // coordinates of the vacuum inside N (unit vector when vacuumInN)
    Vec vacuum_coords() const;
    // S_{(alpha)} on the N basis
    Mat word_operator(const MultiIndex& alpha) const;
    // the S tuple as a polydomain point
    OperatorTuple tuple() const;
    // rank-one defect target P_N P_C |_N in N coordinates
    Mat defect_target() const;
};

// N_Q and S at the truncation.  Generator images span M_Q; N_Q is its
// orthocomplement by rank-revealing factorization.  Throws when N_Q = {0}.
// Non-homogeneous generators are accepted; the degree leakage across the
// caps is measured against a one-step enlarged grid and reported.
VarietyModel build_variety_model(const DomainSpec& spec, const TruncationGrid& grid,
                                 const IdealSpec& ideal, const Tolerances& tol = {});

struct SymmetricBasis {
    // one column per multi-degree tuple (k_1, ..., k_k), |k_i| <= D_i,
    // ordered by total degree then lexicographically
    Mat vectors;                                // ambient coordinates, orthogonal
    std::vector<double> norms;                  // prod_i gamma_{k_i}^{-1/2}
    std::vector<std::vector<std::vector<int>>> degrees;  // per column, per block
};

SymmetricBasis symmetric_basis(const DomainSpec& spec, const TruncationGrid& grid);

struct ModelReport {
    Purity purity = Purity::Unknown;
    double maxGeneratorResidual = 0.0;   // max ||g(S)||
    double defectResidual = 0.0;         // ||Delta^m(I) - P_N P_C|_N|| on N
    double interiorDefectResidual = 0.0; // same, restricted to interior degrees
    double leakageNorm = 0.0;
    bool pass(double tol = 1e-10) const {
        return purity == Purity::Pure && maxGeneratorResidual <= tol &&
               interiorDefectResidual <= tol;
    }
};

ModelReport verify_model(const VarietyModel& model, const Tolerances& tol = {});

struct IrreducibilityReport {
    Eigen::Index commutantDimension = 0;  // 1 iff irreducible
    double rankOneResidual = 0.0;         // distance of chi(S) P_C g(S)* from rank one
    double spanResidual = 0.0;            // distance from span{S_(a) S_(b)*}
    bool irreducible() const { return commutantDimension == 1; }
};

// Finite-dimensional witness for the irreducibility of C*(S): the joint
// commutant of {S, S*} is computed by a linear solve; scalars only means
// no proper reducing subspace exists.
IrreducibilityReport irreducibility_witness(const VarietyModel& model,
                                            const Tolerances& tol = {});

}  // namespace polyfock
