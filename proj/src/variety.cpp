#include "polyfock/variety.hpp"

#include <algorithm>
#include <stdexcept>

namespace polyfock {

bool IdealSpec::homogeneous() const {
    for (const auto& g : generators)
        if (!g.is_homogeneous()) return false;
    return true;
}

IdealSpec IdealSpec::commutant(const DomainSpec& spec) {
    IdealSpec ideal;
    ideal.kind = Kind::CommutantQc;
    const int k = spec.block_count();
    for (int i = 1; i <= k; ++i)
        for (int j1 = 1; j1 <= spec.n[i - 1]; ++j1)
            for (int j2 = j1 + 1; j2 <= spec.n[i - 1]; ++j2) {
                NcPolynomial a = NcPolynomial::generator(k, i, j1) *
                                 NcPolynomial::generator(k, i, j2);
                NcPolynomial b = NcPolynomial::generator(k, i, j2) *
                                 NcPolynomial::generator(k, i, j1);
                ideal.generators.push_back(a - b);
            }
    return ideal;
}

IdealSpec IdealSpec::fully_commutative(const DomainSpec& spec) {
    for (int ni : spec.n)
        if (ni != spec.n[0])
            throw std::invalid_argument("Q_cc requires equal block sizes");
    IdealSpec ideal = commutant(spec);
    ideal.kind = Kind::FullyCommutativeQcc;
    const int k = spec.block_count();
    for (int i = 2; i <= k; ++i)
        for (int j = 1; j <= spec.n[0]; ++j)
            ideal.generators.push_back(NcPolynomial::generator(k, 1, j) -
                                       NcPolynomial::generator(k, i, j));
    return ideal;
}

Vec VarietyModel::vacuum_coords() const {
    return basisN.row(0).adjoint();
}

Mat VarietyModel::word_operator(const MultiIndex& alpha) const {
    Mat out = Mat::Identity(dimN(), dimN());
    for (int i = 1; i <= alpha.block_count(); ++i)
        for (int l : alpha.word(i).letters) out = out * op(i, l);
    return out;
}

OperatorTuple VarietyModel::tuple() const {
    return OperatorTuple(S, 1e-8);
}

Mat VarietyModel::defect_target() const {
    const Vec v = vacuum_coords();
    return v * v.adjoint();
}

namespace {

Mat evaluate_on_model(const NcPolynomial& g, const UniversalModel& model) {
    const Eigen::Index dim = model.basis.dim();
    Mat acc = Mat::Zero(dim, dim);
    for (const auto& [mi, c] : g.terms()) acc += c * Mat(model.word_operator(mi));
    return acc;
}

// generator images g(W) e_beta for every basis vector, then the smallest
// W-invariant subspace containing them
Mat ideal_span(const UniversalModel& model, const IdealSpec& ideal, double relTol) {
    const Eigen::Index dim = model.basis.dim();
    if (ideal.empty()) return Mat(dim, 0);
    Mat seed(dim, dim * static_cast<Eigen::Index>(ideal.generators.size()));
    Eigen::Index col = 0;
    for (const auto& g : ideal.generators) {
        seed.middleCols(col, dim) = evaluate_on_model(g, model);
        col += dim;
    }
    std::vector<Mat> ops;
    for (const auto& row : model.W)
        for (const auto& sp : row) ops.emplace_back(Mat(sp));
    return invariant_hull(ops, seed, relTol);
}

// Homogeneous generators keep every image degree-pure, so the span can be
// assembled shell by shell: M_d = span{deg-d generator images} + W(M_{d-1}).
// Returns one orthonormal basis block per total degree, in shell coordinates.
std::vector<Mat> ideal_span_graded(const UniversalModel& model, const IdealSpec& ideal,
                                   double relTol) {
    const FockBasis& basis = model.basis;
    const int maxDeg = basis.max_total_degree();
    std::vector<Mat> shellSpan(static_cast<std::size_t>(maxDeg) + 1);
    for (int d = 0; d <= maxDeg; ++d)
        shellSpan[static_cast<std::size_t>(d)] =
            Mat(static_cast<Eigen::Index>(basis.shell(d).size()), 0);
    if (ideal.empty()) return shellSpan;

    std::vector<Mat> images;
    std::vector<int> imageDegrees;
    for (const auto& g : ideal.generators) {
        images.push_back(evaluate_on_model(g, model));
        imageDegrees.push_back(g.degree());
    }
    std::vector<Mat> ops;
    for (const auto& row : model.W)
        for (const auto& sp : row) ops.emplace_back(Mat(sp));

    auto shellRestrict = [&](const Vec& full, int d) {
        const auto& idx = basis.shell(d);
        Vec out(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t r = 0; r < idx.size(); ++r) out(static_cast<Eigen::Index>(r)) = full(idx[r]);
        return out;
    };
    auto shellEmbed = [&](const Vec& slice, int d) {
        const auto& idx = basis.shell(d);
        Vec out = Vec::Zero(basis.dim());
        for (std::size_t r = 0; r < idx.size(); ++r) out(idx[r]) = slice(static_cast<Eigen::Index>(r));
        return out;
    };

    for (int d = 0; d <= maxDeg; ++d) {
        std::vector<Vec> raw;
        // generator images landing on this shell
        for (std::size_t g = 0; g < images.size(); ++g) {
            const int srcDeg = d - imageDegrees[g];
            if (srcDeg < 0 || srcDeg > maxDeg) continue;
            for (Index src : basis.shell(srcDeg))
                raw.push_back(shellRestrict(images[g].col(src), d));
        }
        // one-step raises of the previous shell span
        if (d > 0) {
            const Mat& prev = shellSpan[static_cast<std::size_t>(d - 1)];
            for (Eigen::Index c = 0; c < prev.cols(); ++c) {
                Vec full = shellEmbed(prev.col(c), d - 1);
                for (const Mat& op : ops) raw.push_back(shellRestrict(op * full, d));
            }
        }
        if (raw.empty()) continue;
        Mat cols(raw[0].size(), static_cast<Eigen::Index>(raw.size()));
        for (std::size_t c = 0; c < raw.size(); ++c)
            cols.col(static_cast<Eigen::Index>(c)) = raw[c];
        shellSpan[static_cast<std::size_t>(d)] = range_basis(cols, relTol);
    }
    return shellSpan;
}

// cap leakage of the generator images: components of g(W~) e_beta, computed
// on a one-step enlarged grid, that fall outside the original caps
double measure_leakage(const DomainSpec& spec, const TruncationGrid& grid,
                       const IdealSpec& ideal) {
    int maxDeg = 0;
    for (const auto& g : ideal.generators) maxDeg = std::max(maxDeg, g.degree());
    TruncationGrid enlarged = grid;
    for (int& c : enlarged.caps) c += maxDeg;
    UniversalModel big = build_universal_model(spec, enlarged);
    FockBasis small(spec, grid);

    double worst = 0.0;
    for (const auto& g : ideal.generators) {
        Mat image = evaluate_on_model(g, big);
        for (Index src = 0; src < small.dim(); ++src) {
            const Index bigSrc = big.basis.index_of(small.at(src));
            double escaped = 0.0;
            for (Index row = 0; row < big.basis.dim(); ++row) {
                if (small.try_index(big.basis.at(row))) continue;
                escaped += std::norm(image(row, bigSrc));
            }
            worst = std::max(worst, std::sqrt(escaped));
        }
    }
    return worst;
}

}  // namespace

VarietyModel build_variety_model(const DomainSpec& spec, const TruncationGrid& grid,
                                 const IdealSpec& ideal, const Tolerances& tol) {
    VarietyModel model{build_universal_model(spec, grid), ideal, {}, {}, {}, false, false, 0.0};
    const FockBasis& basis = model.ambient.basis;
    const Eigen::Index dim = basis.dim();

    double vacuumLoss = 0.0;
    if (ideal.homogeneous()) {
        const auto shellSpan = ideal_span_graded(model.ambient, ideal, 1e-10);
        std::vector<Vec> columns;
        std::vector<int> degrees;
        for (int d = 0; d <= basis.max_total_degree(); ++d) {
            const auto& shellIdx = basis.shell(d);
            const Eigen::Index s = static_cast<Eigen::Index>(shellIdx.size());
            Mat shellN = orth_complement(shellSpan[static_cast<std::size_t>(d)], s);
            for (Eigen::Index c = 0; c < shellN.cols(); ++c) {
                Vec v = Vec::Zero(dim);
                for (Eigen::Index r = 0; r < s; ++r) v(shellIdx[r]) = shellN(r, c);
                columns.push_back(std::move(v));
                degrees.push_back(d);
            }
        }
        if (columns.empty()) throw std::runtime_error("N_Q is trivial at this truncation");
        model.basisN.resize(dim, static_cast<Eigen::Index>(columns.size()));
        for (std::size_t c = 0; c < columns.size(); ++c)
            model.basisN.col(static_cast<Eigen::Index>(c)) = columns[c];
        model.basisDegrees = degrees;
        model.graded = true;
        if (shellSpan[0].cols() > 0) vacuumLoss = shellSpan[0].row(0).norm();
    } else {
        const Mat mBasis = ideal_span(model.ambient, ideal, 1e-10);
        if (mBasis.cols() == dim)
            throw std::runtime_error("N_Q is trivial at this truncation");
        model.leakageNorm = measure_leakage(spec, grid, ideal);
        model.basisN = orth_complement(mBasis, dim);
        model.basisDegrees.assign(static_cast<std::size_t>(model.basisN.cols()), -1);
        model.graded = false;
        if (mBasis.cols() > 0) vacuumLoss = mBasis.row(0).norm();
    }

    if (model.basisN.cols() == 0)
        throw std::runtime_error("N_Q is trivial at this truncation");

    const int k = spec.block_count();
    model.S.resize(static_cast<std::size_t>(k));
    for (int i = 1; i <= k; ++i) {
        auto& row = model.S[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= spec.n[i - 1]; ++j)
            row.push_back(model.basisN.adjoint() * Mat(model.ambient.op(i, j)) * model.basisN);
    }

    // vacuum survives iff the span M misses it entirely
    model.vacuumInN = vacuumLoss <= 1e-10;
    (void)tol;
    return model;
}

SymmetricBasis symmetric_basis(const DomainSpec& spec, const TruncationGrid& grid) {
    FockBasis basis(spec, grid);
    const int k = spec.block_count();

    // per-block multi-degrees |k_i| <= D_i
    std::vector<std::vector<std::vector<int>>> perBlock(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        std::vector<std::vector<int>> list;
        std::vector<int> cur(static_cast<std::size_t>(spec.n[i]), 0);
        // enumerate all count vectors with sum <= cap, lexicographically
        while (true) {
            int sum = 0;
            for (int c : cur) sum += c;
            if (sum <= grid.caps[i]) list.push_back(cur);
            int pos = spec.n[i] - 1;
            while (pos >= 0) {
                ++cur[static_cast<std::size_t>(pos)];
                int s = 0;
                for (int c : cur) s += c;
                if (s <= grid.caps[i]) break;
                cur[static_cast<std::size_t>(pos)] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
        perBlock[static_cast<std::size_t>(i)] = std::move(list);
    }

    // cartesian product over blocks
    std::vector<std::vector<std::vector<int>>> tuples;
    std::vector<std::size_t> cursor(static_cast<std::size_t>(k), 0);
    while (true) {
        std::vector<std::vector<int>> tup;
        for (int i = 0; i < k; ++i) tup.push_back(perBlock[i][cursor[i]]);
        tuples.push_back(std::move(tup));
        int i = k - 1;
        while (i >= 0 && ++cursor[static_cast<std::size_t>(i)] == perBlock[static_cast<std::size_t>(i)].size()) {
            cursor[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    auto totalDeg = [](const std::vector<std::vector<int>>& tup) {
        int d = 0;
        for (const auto& ki : tup)
            for (int c : ki) d += c;
        return d;
    };
    std::stable_sort(tuples.begin(), tuples.end(),
                     [&](const auto& a, const auto& b) { return totalDeg(a) < totalDeg(b); });

    SymmetricBasis out;
    out.vectors = Mat::Zero(basis.dim(), static_cast<Eigen::Index>(tuples.size()));
    out.degrees = tuples;
    out.norms.reserve(tuples.size());

    for (std::size_t t = 0; t < tuples.size(); ++t) {
        std::vector<double> gammas(static_cast<std::size_t>(k));
        double gammaProd = 1.0;
        for (int i = 1; i <= k; ++i) {
            gammas[static_cast<std::size_t>(i - 1)] =
                gamma_coefficient(spec.q[static_cast<std::size_t>(i - 1)],
                                  spec.m[static_cast<std::size_t>(i - 1)],
                                  tuples[t][static_cast<std::size_t>(i - 1)]);
            gammaProd *= gammas[static_cast<std::size_t>(i - 1)];
        }
        out.norms.push_back(1.0 / std::sqrt(gammaProd));

        // component at e_(beta): prod_i [beta_i in Lambda_{k_i}] sqrt(b)/gamma
        for (Index idx = 0; idx < basis.dim(); ++idx) {
            const MultiIndex& beta = basis.at(idx);
            double value = 1.0;
            bool inClass = true;
            for (int i = 1; i <= k && inClass; ++i) {
                std::vector<int> counts(static_cast<std::size_t>(spec.n[i - 1]), 0);
                for (int l : beta.word(i).letters) ++counts[static_cast<std::size_t>(l - 1)];
                if (counts != tuples[t][static_cast<std::size_t>(i - 1)]) {
                    inClass = false;
                    break;
                }
                const double b = basis.coeffs().block(i).at(beta.word(i));
                value *= std::sqrt(b) / gammas[static_cast<std::size_t>(i - 1)];
            }
            if (inClass) out.vectors(idx, static_cast<Eigen::Index>(t)) = value;
        }
    }
    return out;
}

ModelReport verify_model(const VarietyModel& model, const Tolerances& tol) {
    ModelReport report;
    report.leakageNorm = model.leakageNorm;
    const OperatorTuple s = model.tuple();
    const DomainSpec& spec = model.ambient.basis.spec();

    report.purity = check_purity(spec, s);

    for (const auto& g : model.ideal.generators)
        report.maxGeneratorResidual =
            std::max(report.maxGeneratorResidual, evaluate_poly(g, s).norm());

    const Mat delta = defect_map(spec, s, spec.m, Mat::Identity(model.dimN(), model.dimN()));
    const Mat diff = delta - model.defect_target();
    report.defectResidual = diff.norm();

    int maxGenDegree = 0;
    for (const auto& q : spec.q) maxGenDegree = std::max(maxGenDegree, q.degree());
    const int interior = model.ambient.basis.grid().min_cap() - maxGenDegree;
    if (model.graded) {
        double worst = 0.0;
        for (Eigen::Index r = 0; r < diff.rows(); ++r)
            for (Eigen::Index c = 0; c < diff.cols(); ++c)
                if (model.basisDegrees[static_cast<std::size_t>(r)] <= interior &&
                    model.basisDegrees[static_cast<std::size_t>(c)] <= interior)
                    worst = std::max(worst, std::abs(diff(r, c)));
        report.interiorDefectResidual = worst;
    } else {
        report.interiorDefectResidual = report.defectResidual;
    }
    (void)tol;
    return report;
}

IrreducibilityReport irreducibility_witness(const VarietyModel& model, const Tolerances& tol) {
    if (!model.vacuumInN)
        throw std::invalid_argument("irreducibility witness requires the vacuum inside N");
    IrreducibilityReport report;
    const Eigen::Index n = model.dimN();

    // joint commutant of {S, S*} by a vectorized linear solve
    std::vector<Mat> ops;
    for (const auto& row : model.S)
        for (const Mat& s : row) {
            ops.push_back(s);
            ops.push_back(s.adjoint());
        }
    Mat system(static_cast<Eigen::Index>(ops.size()) * n * n, n * n);
    Eigen::Index row = 0;
    const Mat id = Mat::Identity(n, n);
    for (const Mat& x : ops) {
        // vec(AX - XA) = (X^T (x) I - I (x) X) vec(A), column-major vec
        Mat block = Mat::Zero(n * n, n * n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                // (X^T (x) I): block (i,j) scale X^T(i,j) = X(j,i)
                block.block(i * n, j * n, n, n) = x(j, i) * id;
            }
        block -= identity_kron(n, x);
        system.middleRows(row, n * n) = block;
        row += n * n;
    }
    Eigen::JacobiSVD<Mat> svd(system);
    const auto& sv = svd.singularValues();
    const double cut = (sv.size() ? sv(0) : 0.0) * 1e-8;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    report.commutantDimension = n * n - rank;

    // rank-one construction chi(S) P_C g(S)^*
    const Mat pc = model.defect_target();
    Mat chi = Mat::Identity(n, n);
    Mat g = Mat::Identity(n, n);
    for (const auto& blk : model.S)
        for (const Mat& s : blk) {
            chi = chi + s;
            g = g + 0.5 * s * s;
        }
    const Mat rankOne = chi * pc * g.adjoint();
    Eigen::JacobiSVD<Mat> rsvd(rankOne);
    double tail = 0.0;
    for (Eigen::Index i = 1; i < rsvd.singularValues().size(); ++i)
        tail += rsvd.singularValues()(i) * rsvd.singularValues()(i);
    report.rankOneResidual = std::sqrt(tail);

    // membership of the rank-one operator in span{S_(a) S_(b)*}
    std::vector<MultiIndex> indices;
    for (Index idx = 0; idx < model.ambient.basis.dim(); ++idx)
        indices.push_back(model.ambient.basis.at(idx));
    std::vector<Vec> cols;
    for (const auto& a : indices)
        for (const auto& b : indices) {
            Mat prod = model.word_operator(a) * model.word_operator(b).adjoint();
            cols.push_back(Eigen::Map<Vec>(prod.data(), n * n));
        }
    Mat span(n * n, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
        span.col(static_cast<Eigen::Index>(c)) = cols[c];
    Mat basis = range_basis(span, 1e-10);
    Mat target = rankOne;
    Vec vecTarget = Eigen::Map<Vec>(target.data(), n * n);
    report.spanResidual = (vecTarget - basis * (basis.adjoint() * vecTarget)).norm();
    (void)tol;
    return report;
}

}  // namespace polyfock
