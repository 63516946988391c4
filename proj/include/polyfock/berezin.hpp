#pragma once

// Free and constrained noncommutative Berezin kernels and transforms.
// For a variety member T the kernel rows are indexed by the (quotient)
// model basis tensored with an orthonormal basis of the defect range; for
// jointly nilpotent T within the caps the truncated kernel is the exact
// infinite object and every identity is asserted rather than estimated.

#include <optional>

#include "polyfock/variety.hpp"

namespace polyfock {

struct BerezinKernelData {
    Mat K;              // (dimModel * defectRank) x d
    Mat defectRoot;     // Delta^m(I)^{1/2} on C^d
    Mat defectRange;    // d x defectRank, orthonormal columns
    Eigen::Index defectRank = 0;
    double truncationResidual = 0.0;  // Frobenius mass of the first omitted shell
    bool constrained = false;
    Eigen::Index modelDim = 0;

    Eigen::Index domain_dim() const { return K.cols(); }
};

// Berezin kernel of T against the (possibly constrained) model.  The model
// must live on the same domain spec / grid the caller used for T's
// membership; pass the unconstrained model for ideal = {0}.
BerezinKernelData berezin_kernel(const VarietyModel& model, const OperatorTuple& t,
                                 const Tolerances& tol = {});

// max_{i,j} || K T*_{i,j} - (S*_{i,j} (x) I) K ||
double verify_intertwining(const BerezinKernelData& kernel, const VarietyModel& model,
                           const OperatorTuple& t);

// B_T[g] = K* (g (x) I) K for g acting on the model space
Mat berezin_transform(const BerezinKernelData& kernel, const Mat& g);

// B_{rT}[g] with the kernel rebuilt at rT; the model (and so g's space) is
// unchanged because S does not depend on r.
Mat radial_transform(const VarietyModel& model, const OperatorTuple& t, const Mat& g,
                     double r, const Tolerances& tol = {});

// range of the free kernel must be orthogonal to M_Q (x) C^rd; returns the
// overlap norm
double kernel_range_defect(const VarietyModel& model, const OperatorTuple& t,
                           const Tolerances& tol = {});

}  // namespace polyfock
