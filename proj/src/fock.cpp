#include "polyfock/fock.hpp"

#include <algorithm>
#include <stdexcept>

namespace polyfock {

int TruncationGrid::min_cap() const {
    if (caps.empty()) throw std::invalid_argument("empty truncation grid");
    return *std::min_element(caps.begin(), caps.end());
}

Index fock_dimension(const DomainSpec& spec, const TruncationGrid& grid, Index guard) {
    if (static_cast<int>(grid.caps.size()) != spec.block_count())
        throw std::invalid_argument("grid cap count must match the block count");
    Index dim = 1;
    for (int i = 1; i <= spec.block_count(); ++i) {
        if (grid.cap(i) < 0) throw std::invalid_argument("negative degree cap");
        const Index factor = word_count(spec.n[i - 1], grid.cap(i));
        if (factor > guard / dim)
            throw std::runtime_error("truncated Fock dimension exceeds the guard");
        dim *= factor;
    }
    return dim;
}

FockBasis::FockBasis(DomainSpec spec, TruncationGrid grid)
    : spec_(std::move(spec)),
      grid_(std::move(grid)),
      coeffs_(spec_, grid_.caps) {
    const Index dim = fock_dimension(spec_, grid_);
    const int k = spec_.block_count();

    std::vector<std::vector<Word>> perBlock(k);
    std::vector<Index> factorDims(k);
    for (int i = 0; i < k; ++i) {
        perBlock[i] = enumerate_words(i + 1, spec_.n[i], grid_.caps[i]);
        factorDims[i] = static_cast<Index>(perBlock[i].size());
    }
    strides_.assign(k, 1);
    for (int i = k - 2; i >= 0; --i) strides_[i] = strides_[i + 1] * factorDims[i + 1];

    elements_.reserve(static_cast<std::size_t>(dim));
    std::vector<std::size_t> cursor(k, 0);
    for (Index flat = 0; flat < dim; ++flat) {
        std::vector<Word> ws;
        ws.reserve(k);
        Index rem = flat;
        for (int i = 0; i < k; ++i) {
            ws.push_back(perBlock[i][static_cast<std::size_t>(rem / strides_[i])]);
            rem %= strides_[i];
        }
        elements_.emplace_back(std::move(ws));
    }

    // sort by total degree; ties keep the product (per-block graded-lex) order
    std::vector<Index> order(static_cast<std::size_t>(dim));
    for (Index i = 0; i < dim; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [this](Index a, Index b) {
        return elements_[static_cast<std::size_t>(a)].total_degree() <
               elements_[static_cast<std::size_t>(b)].total_degree();
    });

    std::vector<MultiIndex> sorted;
    sorted.reserve(elements_.size());
    productToSorted_.assign(static_cast<std::size_t>(dim), 0);
    for (Index pos = 0; pos < dim; ++pos) {
        const Index src = order[static_cast<std::size_t>(pos)];
        sorted.push_back(elements_[static_cast<std::size_t>(src)]);
        productToSorted_[static_cast<std::size_t>(src)] = pos;
    }
    elements_ = std::move(sorted);

    int maxDeg = elements_.empty() ? 0 : elements_.back().total_degree();
    shells_.assign(static_cast<std::size_t>(maxDeg) + 1, {});
    for (Index i = 0; i < dim; ++i)
        shells_[static_cast<std::size_t>(total_degree(i))].push_back(i);
}

Index FockBasis::product_index(const MultiIndex& m) const {
    Index flat = 0;
    for (int i = 0; i < spec_.block_count(); ++i) {
        const Word& w = m.words[static_cast<std::size_t>(i)];
        if (w.length() > grid_.caps[static_cast<std::size_t>(i)]) return -1;
        for (int l : w.letters)
            if (l < 1 || l > spec_.n[static_cast<std::size_t>(i)]) return -1;
        flat += word_rank(w, spec_.n[static_cast<std::size_t>(i)]) *
                strides_[static_cast<std::size_t>(i)];
    }
    return flat;
}

std::optional<Index> FockBasis::try_index(const MultiIndex& m) const {
    if (m.block_count() != spec_.block_count()) return std::nullopt;
    const Index flat = product_index(m);
    if (flat < 0) return std::nullopt;
    return productToSorted_[static_cast<std::size_t>(flat)];
}

Index FockBasis::index_of(const MultiIndex& m) const {
    auto idx = try_index(m);
    if (!idx) throw std::out_of_range("multi-index outside the truncation grid");
    return *idx;
}

double FockBasis::b_product(Index idx) const {
    const MultiIndex& m = at(idx);
    double prod = 1.0;
    for (int i = 1; i <= spec_.block_count(); ++i) prod *= coeffs_.block(i).at(m.word(i));
    return prod;
}

UniversalModel build_universal_model(const DomainSpec& spec, const TruncationGrid& grid) {
    UniversalModel model{FockBasis(spec, grid), {}};
    const FockBasis& basis = model.basis;
    const Index dim = basis.dim();
    const int k = spec.block_count();

    model.W.resize(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        const auto& table = basis.coeffs().block(i);
        auto& row = model.W[static_cast<std::size_t>(i - 1)];
        row.reserve(static_cast<std::size_t>(spec.n[i - 1]));
        for (int j = 1; j <= spec.n[i - 1]; ++j) {
            std::vector<Eigen::Triplet<std::complex<double>>> trips;
            trips.reserve(static_cast<std::size_t>(dim));
            for (Index src = 0; src < dim; ++src) {
                const MultiIndex& beta = basis.at(src);
                const Word& w = beta.word(i);
                if (w.length() + 1 > grid.cap(i)) continue;  // compression cut
                MultiIndex target = beta;
                target.word(i).letters.insert(target.word(i).letters.begin(), j);
                const double weight =
                    std::sqrt(table.at(w) / table.at(target.word(i)));
                trips.emplace_back(static_cast<int>(basis.index_of(target)),
                                   static_cast<int>(src), weight);
            }
            SpMat op(static_cast<int>(dim), static_cast<int>(dim));
            op.setFromTriplets(trips.begin(), trips.end());
            row.push_back(std::move(op));
        }
    }
    return model;
}

SpMat UniversalModel::word_operator(const MultiIndex& alpha) const {
    const Index dim = basis.dim();
    SpMat out(static_cast<int>(dim), static_cast<int>(dim));
    out.setIdentity();
    for (int i = 1; i <= block_count(); ++i)
        for (int letter : alpha.word(i).letters) out = out * op(i, letter);
    return out;
}

std::vector<std::vector<Mat>> UniversalModel::dense() const {
    std::vector<std::vector<Mat>> out;
    out.reserve(W.size());
    for (const auto& row : W) {
        std::vector<Mat> dr;
        dr.reserve(row.size());
        for (const auto& sp : row) dr.emplace_back(Mat(sp));
        out.push_back(std::move(dr));
    }
    return out;
}

SpMat vacuum_projection(const FockBasis& basis) {
    SpMat p(static_cast<int>(basis.dim()), static_cast<int>(basis.dim()));
    p.insert(0, 0) = 1.0;
    p.makeCompressed();
    return p;
}

SpMat phi_map_sparse(const PositiveRegularPolynomial& q, const std::vector<SpMat>& blockOps,
                     const SpMat& y) {
    SpMat acc(y.rows(), y.cols());
    for (const auto& [word, a] : q.support()) {
        SpMat x(y.rows(), y.cols());
        x.setIdentity();
        for (int l : word) x = x * blockOps.at(static_cast<std::size_t>(l - 1));
        acc += a * (x * y * SpMat(x.adjoint()));
    }
    return acc;
}

namespace {

// Gershgorin lower bound for the spectrum of the Hermitian part
double gershgorin_lower(const SpMat& a) {
    SpMat h = SpMat(0.5 * (a + SpMat(a.adjoint())));
    std::vector<double> diag(static_cast<std::size_t>(h.rows()), 0.0);
    std::vector<double> off(static_cast<std::size_t>(h.rows()), 0.0);
    for (int k = 0; k < h.outerSize(); ++k)
        for (SpMat::InnerIterator it(h, k); it; ++it) {
            if (it.row() == it.col())
                diag[static_cast<std::size_t>(it.row())] = it.value().real();
            else
                off[static_cast<std::size_t>(it.row())] += std::abs(it.value());
        }
    double lo = 0.0;
    for (std::size_t r = 0; r < diag.size(); ++r)
        lo = std::min(lo, diag[r] - off[r]);
    return lo;
}

}  // namespace

ModelVerification verify_universal_model(const UniversalModel& model) {
    ModelVerification out;
    const DomainSpec& spec = model.basis.spec();
    const int k = spec.block_count();
    const Index dim = model.basis.dim();

    // ampliation commutation across distinct blocks
    for (int s = 1; s <= k; ++s)
        for (int t = s + 1; t <= k; ++t)
            for (int a = 1; a <= spec.n[s - 1]; ++a)
                for (int b = 1; b <= spec.n[t - 1]; ++b) {
                    SpMat c = model.op(s, a) * model.op(t, b) -
                              model.op(t, b) * model.op(s, a);
                    out.maxCrossCommutator =
                        std::max(out.maxCrossCommutator, sparse_max_abs(c));
                }

    // defect lattice Delta^p(I) for 0 <= p <= m
    int maxGenDegree = 0;
    for (const auto& q : spec.q) maxGenDegree = std::max(maxGenDegree, q.degree());
    out.interiorDegree = model.basis.grid().min_cap() - maxGenDegree;

    std::vector<int> p(static_cast<std::size_t>(k), 0);
    SpMat identity(static_cast<int>(dim), static_cast<int>(dim));
    identity.setIdentity();
    double minBound = 0.0;
    bool first = true;
    while (true) {
        SpMat y = identity;
        for (int i = k; i >= 1; --i)
            for (int rep = 0; rep < p[static_cast<std::size_t>(i - 1)]; ++rep)
                y = y - phi_map_sparse(spec.q[static_cast<std::size_t>(i - 1)],
                                       model.W[static_cast<std::size_t>(i - 1)], y);
        const double lo = gershgorin_lower(y);
        minBound = first ? lo : std::min(minBound, lo);
        first = false;

        bool full = true;
        for (int i = 0; i < k; ++i)
            if (p[static_cast<std::size_t>(i)] != spec.m[static_cast<std::size_t>(i)]) full = false;
        if (full) {
            // Delta^m(I) - P_C residuals, full and restricted to low degrees
            SpMat diff = y - vacuum_projection(model.basis);
            out.fullDefectResidual = sparse_max_abs(diff);
            double interior = 0.0;
            for (int c = 0; c < diff.outerSize(); ++c)
                for (SpMat::InnerIterator it(diff, c); it; ++it) {
                    const int dr = model.basis.total_degree(it.row());
                    const int dc = model.basis.total_degree(it.col());
                    if (dr <= out.interiorDegree && dc <= out.interiorDegree)
                        interior = std::max(interior, std::abs(it.value()));
                }
            out.interiorDefectResidual = interior;
        }

        // next lattice point
        int i = 0;
        while (i < k && p[static_cast<std::size_t>(i)] == spec.m[static_cast<std::size_t>(i)]) {
            p[static_cast<std::size_t>(i)] = 0;
            ++i;
        }
        if (i == k) break;
        ++p[static_cast<std::size_t>(i)];
    }
    out.minDefectEigenBound = minBound;

    // strictly degree-raising entries make the tuple jointly nilpotent
    bool raising = true;
    for (const auto& row : model.W)
        for (const auto& op : row)
            for (int c = 0; c < op.outerSize() && raising; ++c)
                for (SpMat::InnerIterator it(op, c); it; ++it)
                    if (model.basis.total_degree(it.row()) <=
                        model.basis.total_degree(it.col())) {
                        raising = false;
                        break;
                    }
    out.pure = raising;
    return out;
}

}  // namespace polyfock
