#include "polyfock/coeffs.hpp"

#include <numeric>
#include <stdexcept>

namespace polyfock {

namespace {

// word coefficients of 1/(1-q): b1(empty) = 1, b1(alpha) = sum over proper
// nonempty prefixes gamma in supp(q) of a_gamma * b1(gamma^{-1} alpha)
std::vector<double> geometric_series(const PositiveRegularPolynomial& q,
                                     const std::vector<Word>& words, int alphabet) {
    std::vector<double> b1(words.size(), 0.0);
    b1[0] = 1.0;
    for (std::size_t idx = 1; idx < words.size(); ++idx) {
        const Word& w = words[idx];
        double acc = 0.0;
        for (const auto& [gamma, a] : q.support()) {
            const int l = static_cast<int>(gamma.size());
            if (l > w.length()) continue;
            if (!std::equal(gamma.begin(), gamma.end(), w.letters.begin())) continue;
            Word rest{w.block, {w.letters.begin() + l, w.letters.end()}};
            acc += a * b1[static_cast<std::size_t>(word_rank(rest, alphabet))];
        }
        b1[idx] = acc;
    }
    return b1;
}

// graded convolution (f * g)(alpha) = sum over splits alpha = gamma delta
std::vector<double> convolve(const std::vector<double>& f, const std::vector<double>& g,
                             const std::vector<Word>& words, int alphabet) {
    std::vector<double> out(words.size(), 0.0);
    for (std::size_t idx = 0; idx < words.size(); ++idx) {
        const Word& w = words[idx];
        double acc = 0.0;
        for (int l = 0; l <= w.length(); ++l) {
            Word head{w.block, {w.letters.begin(), w.letters.begin() + l}};
            Word tail{w.block, {w.letters.begin() + l, w.letters.end()}};
            acc += f[static_cast<std::size_t>(word_rank(head, alphabet))] *
                   g[static_cast<std::size_t>(word_rank(tail, alphabet))];
        }
        out[idx] = acc;
    }
    return out;
}

}  // namespace

BlockCoeffTable::BlockCoeffTable(const PositiveRegularPolynomial& q, int multiplicity,
                                 int maxDegree)
    : alphabet_(q.block_size()), maxDegree_(maxDegree) {
    if (multiplicity < 1) throw std::invalid_argument("multiplicity must be >= 1");
    if (maxDegree < 0) throw std::invalid_argument("negative degree cap");
    const auto words = enumerate_words(1, alphabet_, maxDegree_);
    values_ = geometric_series(q, words, alphabet_);
    const auto b1 = values_;
    for (int j = 2; j <= multiplicity; ++j) values_ = convolve(b1, values_, words, alphabet_);
    for (double v : values_)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::runtime_error("b coefficient overflow or nonpositive value");
}

BCoeffTable::BCoeffTable(const DomainSpec& spec, const std::vector<int>& maxDegrees) {
    if (maxDegrees.size() != spec.q.size())
        throw std::invalid_argument("one degree cap per block required");
    blocks_.reserve(spec.q.size());
    for (std::size_t i = 0; i < spec.q.size(); ++i)
        blocks_.emplace_back(spec.q[i], spec.m[i], maxDegrees[i]);
}

double b_coefficient(const PositiveRegularPolynomial& q, int multiplicity, const Word& alpha) {
    BlockCoeffTable table(q, multiplicity, alpha.length());
    Word w = alpha;
    w.block = 1;
    return table.at(w);
}

double gamma_coefficient(const PositiveRegularPolynomial& q, int multiplicity,
                         const std::vector<int>& k) {
    if (static_cast<int>(k.size()) != q.block_size())
        throw std::invalid_argument("multi-degree length must equal the block size");
    const int total = std::accumulate(k.begin(), k.end(), 0);
    BlockCoeffTable table(q, multiplicity, total);
    double acc = 0.0;
    for (const Word& w : abelian_class(1, k)) acc += table.at(w);
    return acc;
}

}  // namespace polyfock
