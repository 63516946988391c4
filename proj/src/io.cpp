#include "polyfock/io.hpp"

#include <sstream>

namespace polyfock::io {

namespace {

Letters letters_from_json(const Json& j) {
    Letters w;
    for (const auto& l : j) w.push_back(l.get<int>());
    return w;
}

Word word_from_json(const Json& j, int block) {
    return Word{block, letters_from_json(j)};
}

}  // namespace

Json to_json(const PositiveRegularPolynomial& q) {
    Json terms = Json::array();
    for (const auto& [w, a] : q.support())
        terms.push_back({{"word", w}, {"re", a}, {"im", 0.0}});
    return Json{{"block", q.block_size()}, {"terms", std::move(terms)}};
}

PositiveRegularPolynomial prp_from_json(const Json& j) {
    const int blockSize = j.at("block").get<int>();
    std::vector<std::pair<Letters, double>> coeffs;
    for (const auto& t : j.at("terms")) {
        const double im = t.value("im", 0.0);
        if (im != 0.0)
            throw std::invalid_argument("positive regular coefficients must be real");
        coeffs.emplace_back(letters_from_json(t.at("word")), t.at("re").get<double>());
    }
    return PositiveRegularPolynomial(blockSize, std::move(coeffs));
}

Json to_json(const NcPolynomial& p) {
    Json terms = Json::array();
    for (const auto& [mi, c] : p.terms()) {
        Json words = Json::array();
        for (const auto& w : mi.words) words.push_back(w.letters);
        terms.push_back({{"words", std::move(words)}, {"re", c.real()}, {"im", c.imag()}});
    }
    return Json{{"blocks", p.block_count()}, {"terms", std::move(terms)}};
}

NcPolynomial ncpoly_from_json(const Json& j) {
    const int k = j.at("blocks").get<int>();
    NcPolynomial p(k);
    for (const auto& t : j.at("terms")) {
        std::vector<Word> words;
        int block = 1;
        for (const auto& w : t.at("words")) words.push_back(word_from_json(w, block++));
        if (static_cast<int>(words.size()) != k)
            throw std::invalid_argument("term must carry one word per block");
        p.add_term(MultiIndex(std::move(words)),
                   Complex(t.value("re", 0.0), t.value("im", 0.0)));
    }
    return p;
}

Json to_json(const DomainSpec& spec) {
    Json q = Json::array();
    for (const auto& qi : spec.q) q.push_back(to_json(qi));
    return Json{{"n", spec.n}, {"m", spec.m}, {"q", std::move(q)}};
}

DomainSpec domain_from_json(const Json& j) {
    if (j.contains("preset")) {
        const std::string preset = j.at("preset").get<std::string>();
        const int n = j.value("letters", 1);
        if (preset == "drury-arveson") return DomainSpec::drury_arveson(n);
        if (preset == "hardy-sobolev")
            return DomainSpec::hardy_sobolev(n, j.value("copies", 1));
        if (preset == "single-variable")
            return DomainSpec::single_variable(j.value("multiplicity", 1));
        throw std::invalid_argument("unknown domain preset: " + preset);
    }
    std::vector<int> n = j.at("n").get<std::vector<int>>();
    std::vector<int> m = j.at("m").get<std::vector<int>>();
    std::vector<PositiveRegularPolynomial> q;
    for (const auto& qj : j.at("q")) q.push_back(prp_from_json(qj));
    return DomainSpec(std::move(n), std::move(m), std::move(q));
}

Json to_json(const TruncationGrid& grid) { return Json{{"caps", grid.caps}}; }

TruncationGrid grid_from_json(const Json& j) {
    if (j.is_array()) return TruncationGrid(j.get<std::vector<int>>());
    return TruncationGrid(j.at("caps").get<std::vector<int>>());
}

Json to_json(const IdealSpec& ideal) {
    Json gens = Json::array();
    for (const auto& g : ideal.generators) gens.push_back(to_json(g));
    std::string kind = "general";
    if (ideal.kind == IdealSpec::Kind::CommutantQc) kind = "commutant";
    if (ideal.kind == IdealSpec::Kind::FullyCommutativeQcc) kind = "fully-commutative";
    return Json{{"kind", kind}, {"two_sided", ideal.twoSided}, {"generators", std::move(gens)}};
}

IdealSpec ideal_from_json(const Json& j, const DomainSpec& spec) {
    const std::string kind = j.value("kind", "general");
    if (kind == "zero") return IdealSpec::zero();
    if (kind == "commutant") return IdealSpec::commutant(spec);
    if (kind == "fully-commutative") return IdealSpec::fully_commutative(spec);
    IdealSpec ideal;
    ideal.twoSided = j.value("two_sided", false);
    if (j.contains("generators"))
        for (const auto& g : j.at("generators")) ideal.generators.push_back(ncpoly_from_json(g));
    return ideal;
}

Json to_json(const Mat& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Mat mat_from_json(const Json& j) {
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = rows == 0 ? 0 : static_cast<Eigen::Index>(j.at(0).size());
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& e = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c));
            m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    return m;
}

Json to_json(const OperatorTuple& t) {
    Json blocks = Json::array();
    for (int i = 1; i <= t.block_count(); ++i) {
        Json blk = Json::array();
        for (int jj = 1; jj <= t.block_size(i); ++jj) blk.push_back(to_json(t.op(i, jj)));
        blocks.push_back(std::move(blk));
    }
    return Json{{"dim", t.dim()}, {"blocks", std::move(blocks)}};
}

OperatorTuple tuple_from_json(const Json& j, double commTol) {
    std::vector<std::vector<Mat>> blocks;
    for (const auto& blk : j.at("blocks")) {
        std::vector<Mat> row;
        for (const auto& m : blk) row.push_back(mat_from_json(m));
        blocks.push_back(std::move(row));
    }
    return OperatorTuple(std::move(blocks), commTol);
}

Json to_json(const ScalarPoint& pt) {
    Json blocks = Json::array();
    for (const auto& blk : pt.lambda) {
        Json row = Json::array();
        for (Complex z : blk) row.push_back(Json::array({z.real(), z.imag()}));
        blocks.push_back(std::move(row));
    }
    return Json{{"lambda", std::move(blocks)}};
}

ScalarPoint point_from_json(const Json& j) {
    ScalarPoint pt;
    const Json& lam = j.is_object() ? j.at("lambda") : j;
    for (const auto& blk : lam) {
        std::vector<Complex> row;
        for (const auto& z : blk) row.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
        pt.lambda.push_back(std::move(row));
    }
    return pt;
}

Json triplets_json(const Mat& m, double dropTol) {
    Json entries = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (std::abs(m(r, c)) > dropTol)
                entries.push_back(Json::array({r, c, m(r, c).real(), m(r, c).imag()}));
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

Mat mat_from_triplets(const Json& j) {
    Mat m = Mat::Zero(j.at("rows").get<Eigen::Index>(), j.at("cols").get<Eigen::Index>());
    for (const auto& e : j.at("entries"))
        m(e.at(0).get<Eigen::Index>(), e.at(1).get<Eigen::Index>()) =
            Complex(e.at(2).get<double>(), e.at(3).get<double>());
    return m;
}

Json basis_manifest(const FockBasis& basis) {
    Json out = Json::array();
    for (Index i = 0; i < basis.dim(); ++i) {
        Json words = Json::array();
        for (const auto& w : basis.at(i).words) words.push_back(w.letters);
        out.push_back(Json{{"index", i}, {"words", std::move(words)}});
    }
    return out;
}

std::string triplets_csv(const Mat& m, double dropTol) {
    std::ostringstream out;
    out.precision(17);
    out << "row,col,re,im\n";
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (std::abs(m(r, c)) > dropTol)
                out << r << ',' << c << ',' << m(r, c).real() << ',' << m(r, c).imag()
                    << '\n';
    return out.str();
}

std::string config_hash(const Json& config) {
    const std::string bytes = config.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace polyfock::io
