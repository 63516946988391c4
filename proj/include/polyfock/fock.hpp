#pragma once

// Truncated tensor products of full Fock spaces, the graded basis indexing,
// and the weighted creation operators of the universal model, compressed to
// the degree caps.  The capped subspace is co-invariant under every adjoint
// W*_{i,j}, so the compressed tuple is an exact pure member of the
// polydomain; downstream identities hold at finite dimension on the nose.

#include <optional>
#include <vector>

#include "polyfock/coeffs.hpp"
#include "polyfock/linalg.hpp"
#include "polyfock/ncpoly.hpp"
#include "polyfock/words.hpp"

namespace polyfock {

struct TruncationGrid {
    std::vector<int> caps;  // per-factor degree caps D_i >= 0

    explicit TruncationGrid(std::vector<int> c) : caps(std::move(c)) {}
    TruncationGrid(std::initializer_list<int> c) : caps(c) {}
    int cap(int block) const { return caps.at(block - 1); }
    int min_cap() const;
};

// dimension of the truncated tensor product; throws past `guard`
Index fock_dimension(const DomainSpec& spec, const TruncationGrid& grid,
                     Index guard = Index(1) << 40);

// Graded orthonormal basis e_{(beta)} of the truncated tensor product,
// sorted by total degree, then by per-block graded-lex word ranks.
// Index 0 is the vacuum.
class FockBasis {
  public:
    FockBasis(DomainSpec spec, TruncationGrid grid);

    Index dim() const { return static_cast<Index>(elements_.size()); }
    const MultiIndex& at(Index idx) const { return elements_.at(static_cast<std::size_t>(idx)); }
    std::optional<Index> try_index(const MultiIndex& m) const;
    Index index_of(const MultiIndex& m) const;
    Index vacuum() const { return 0; }

    int total_degree(Index idx) const { return at(idx).total_degree(); }
    int max_total_degree() const { return static_cast<int>(shells_.size()) - 1; }
    // basis indices of the given total degree
    const std::vector<Index>& shell(int degree) const { return shells_.at(degree); }

    const DomainSpec& spec() const { return spec_; }
    const TruncationGrid& grid() const { return grid_; }
    const BCoeffTable& coeffs() const { return coeffs_; }

    // product of the per-block b values at the basis element
    double b_product(Index idx) const;

  private:
    DomainSpec spec_;
    TruncationGrid grid_;
    BCoeffTable coeffs_;
    std::vector<MultiIndex> elements_;
    std::vector<Index> productToSorted_;  // mixed-radix product index -> basis index
    std::vector<Index> strides_;          // per block
    std::vector<std::vector<Index>> shells_;

    Index product_index(const MultiIndex& m) const;
};

// The compressed universal model W = {W_{i,j}} on a FockBasis.  Operators
// are stored sparse; at shift sparsity this is cheap even at 10^5 dims.
struct UniversalModel {
    FockBasis basis;
    std::vector<std::vector<SpMat>> W;  // W[i-1][j-1]

    const SpMat& op(int block, int letter) const { return W.at(block - 1).at(letter - 1); }
    int block_count() const { return static_cast<int>(W.size()); }

    // W_{(alpha)} = W_{1,alpha_1} ... W_{k,alpha_k}
    SpMat word_operator(const MultiIndex& alpha) const;
    // dense copies of all operators, ordered (i,j) row-major
    std::vector<std::vector<Mat>> dense() const;
};

UniversalModel build_universal_model(const DomainSpec& spec, const TruncationGrid& grid);

// rank-one orthogonal projection onto the vacuum
SpMat vacuum_projection(const FockBasis& basis);

// structural verification of the compressed model, feasible at large dims
struct ModelVerification {
    double maxCrossCommutator = 0.0;   // expected exactly zero
    double interiorDefectResidual = 0.0;  // ||Delta^m(I) - P_C|| below the interior degree
    double fullDefectResidual = 0.0;      // same over the whole truncation
    int interiorDegree = 0;               // min cap - max generator degree
    double minDefectEigenBound = 0.0;     // Gershgorin lower bound over the p-lattice
    bool pure = false;                     // structural joint nilpotency
    bool member() const { return minDefectEigenBound >= -1e-10; }
};

ModelVerification verify_universal_model(const UniversalModel& model);

// sparse completely positive map Phi_{q_i, W_i}(Y)
SpMat phi_map_sparse(const PositiveRegularPolynomial& q, const std::vector<SpMat>& blockOps,
                     const SpMat& y);

}  // namespace polyfock
