#pragma once

// Beurling-type factorization over the constrained model, characteristic
// functions, pure operator models, coisometric dilations with boundary
// part, Wold decomposition, and the coincidence relation of multi-analytic
// operators.

#include <optional>
#include <variant>

#include "polyfock/berezin.hpp"

namespace polyfock {

// An operator N (x) C^a -> N (x) C^b commuting with the ampliated model.
struct MultiAnalyticOp {
    Mat M;
    Eigen::Index slotIn = 0;
    Eigen::Index slotOut = 0;
    double intertwiningResidual = 0.0;

    Eigen::Index model_dim() const { return slotIn == 0 ? 0 : M.cols() / slotIn; }
};

// max_{i,j} || M (S_{i,j} (x) I_a) - (S_{i,j} (x) I_b) M ||
double multi_analytic_residual(const VarietyModel& model, const Mat& m, Eigen::Index slotIn,
                               Eigen::Index slotOut);

// (P_C (x) I) closure(M* range): the slot-space support of a multi-analytic
// operator, as an orthonormal basis of a subspace of C^slotIn
Mat support_slot_basis(const VarietyModel& model, const MultiAnalyticOp& op,
                       double relTol = 1e-10);

struct BeurlingReport {
    bool satisfied = false;
    double invarianceResidual = 0.0;
    std::vector<std::pair<std::vector<int>, double>> minEigen;  // per lattice point
    std::vector<int> violatingP;  // first violating lattice point, when any
};

// Delta^p(P_M) over the lattice for an invariant subspace M of S (x) I_h.
// Throws when the subspace is not invariant.
BeurlingReport beurling_criterion(const VarietyModel& model, const Mat& subspaceBasis,
                                  Eigen::Index slots, const Tolerances& tol = {});

struct FactorizationFailure {
    std::vector<int> p;
    double minEigenvalue = 0.0;
};

struct Factorization {
    MultiAnalyticOp gamma;
    double factorResidual = 0.0;  // || Gamma Gamma* - G ||
    OperatorTuple compressedTuple;  // the pure variety member on range(G^{1/2})
    Purity tuplePurity = Purity::Unknown;
};

// Beurling-type factorization G = Gamma Gamma* for G Hermitian on
// N (x) C^h.  Returns the failing lattice point when some Delta^p(G) is
// not PSD.
std::variant<Factorization, FactorizationFailure> factorize_psd(const VarietyModel& model,
                                                                const Mat& g,
                                                                Eigen::Index slots,
                                                                const Tolerances& tol = {});

struct CharFunctionData {
    BerezinKernelData kernel;   // constrained kernel of T
    Mat defectSpace;            // D:  d x rank, range of Delta_T^m(I)^{1/2}
    Mat dualDefectRange;        // D_*: defect range of the M_T tuple
    std::optional<OperatorTuple> mTuple;  // M_T on range(I - K K*)
    MultiAnalyticOp theta;
    bool existsFlag = false;
    std::vector<int> violatingP;   // populated on existence failure
    double unitIdentityResidual = 0.0;  // || K K* + Theta Theta* - I ||
};

// Constrained characteristic function of a variety member.  When the
// existence criterion Delta^p(I - K K*) >= 0 fails, the data comes back
// with existsFlag = false and the violating lattice point; nothing else is
// populated.
CharFunctionData characteristic_function(const VarietyModel& model, const OperatorTuple& t,
                                         const Tolerances& tol = {});

struct PureModelData {
    Mat hBasis;       // basis of H = (N (x) D) minus range(Theta)
    std::vector<std::vector<Mat>> g;  // compressions of S (x) I to H
    Mat unitary;      // C^d -> H intertwiner, columns of K in H coordinates
    double equivalenceResidual = 0.0;  // max || U T*_{i,j} - G*_{i,j} U ||
};

// Model of a pure tuple on the orthocomplement of range(Theta).  Throws on
// non-pure input or a characteristic function that is not inner.
PureModelData pure_model(const VarietyModel& model, const OperatorTuple& t,
                         const CharFunctionData& data, const Tolerances& tol = {});

struct DilationData {
    Mat isometry;                 // V = [K; Y^{1/2}] with orthonormalized boundary rows
    Eigen::Index modelRows = 0;   // dimN * defectRank
    Eigen::Index boundaryDim = 0;
    std::optional<OperatorTuple> boundaryTuple;  // U, absent in the pure case
    Eigen::Index dilationIndex = 0;   // rank Delta^m(I)
    double isometryResidual = 0.0;    // || V* V - I ||
    double coInvarianceResidual = 0.0;  // max || V T*_{i,j} - V_{i,j}* V ||
    double boundaryDefect = 0.0;  // || (id-Phi_k)...(id-Phi_1)(I) || on the boundary
    double boundaryIdealResidual = 0.0;  // max || g(U) ||
    bool minimal = false;  // pure case: S-hull of V H equals N (x) D
};

DilationData dilate(const VarietyModel& model, const OperatorTuple& t,
                    const Tolerances& tol = {});

struct WoldData {
    Mat k0Basis;
    Eigen::Index multiplicity = 0;     // rank Delta^m(I)
    double reducingResidual = 0.0;     // K_0 reduces every V_{i,j}
    double complementDefect = 0.0;     // || (id-Phi_k)...(id-Phi_1)(I) || on K_1
};

// K_0 = span{ V_(alpha) Delta^m(I) K } and its diagnostics.
WoldData wold_decompose(const DomainSpec& spec, const OperatorTuple& v,
                        const Tolerances& tol = {});

struct CoincidenceResult {
    bool coincide = false;
    double residual = 0.0;
    Mat tau1, tau2;      // slot unitaries when found
    std::string reason;  // non-empty when dimensions already exclude coincidence
};

// Searches slot unitaries with Theta2 (I (x) tau1) = (I (x) tau2) Theta1
// after restricting both operators to their supports.  Alternating polar
// alignment with seeded random restarts.
CoincidenceResult coincidence_check(const VarietyModel& model, const MultiAnalyticOp& theta1,
                                    const MultiAnalyticOp& theta2, std::uint64_t seed = 1,
                                    const Tolerances& tol = {});

struct RankOneReport {
    bool subspacesEqual = false;
    bool unitarySearchAgrees = false;  // direct search reaches the same verdict
    Eigen::Index defectRank1 = 0, defectRank2 = 0;
    double gap = 0.0;
};

// Compressions of S to co-invariant subspaces of N are unitarily equivalent
// exactly when the subspaces agree; cross-checked by a direct search.
RankOneReport rank_one_classify(const VarietyModel& model, const Mat& subspace1,
                                const Mat& subspace2, std::uint64_t seed = 1,
                                const Tolerances& tol = {});

struct CyclicHullData {
    Mat hull;          // orthonormal basis of span{(S_(beta) (x) I) M}
    Mat slotSpace;     // E = (P_C (x) I) M, orthonormal basis in C^h
    double spanGap = 0.0;  // subspace gap between the hull and N (x) E
};

// coInvTol loosens the co-invariance gate for inputs that are co-invariant
// only up to a known truncation residual (kernel-vector spans)
CyclicHullData cyclic_hull(const VarietyModel& model, const Mat& subspaceBasis,
                           Eigen::Index slots, const Tolerances& tol = {},
                           double coInvTol = 1e-9);

}  // namespace polyfock
