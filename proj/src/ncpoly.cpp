#include "polyfock/ncpoly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polyfock {

NcPolynomial::NcPolynomial(int blockCount) : blockCount_(blockCount) {
    if (blockCount < 1) throw std::invalid_argument("NcPolynomial needs >= 1 block");
}

NcPolynomial::NcPolynomial(int blockCount, Complex constant) : NcPolynomial(blockCount) {
    add_term(MultiIndex(blockCount), constant);
}

int NcPolynomial::degree() const {
    int d = -1;
    for (const auto& [mi, c] : terms_) d = std::max(d, mi.total_degree());
    return d;
}

bool NcPolynomial::is_homogeneous() const {
    int d = -1;
    for (const auto& [mi, c] : terms_) {
        if (d == -1) d = mi.total_degree();
        else if (mi.total_degree() != d) return false;
    }
    return true;
}

Complex NcPolynomial::coefficient(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Complex(0) : it->second;
}

void NcPolynomial::add_term(const MultiIndex& m, Complex c) {
    if (m.block_count() != blockCount_)
        throw std::invalid_argument("term block count mismatch");
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (c != Complex(0)) terms_.emplace(m, c);
        return;
    }
    it->second += c;
    if (it->second == Complex(0)) terms_.erase(it);
}

NcPolynomial NcPolynomial::operator+(const NcPolynomial& rhs) const {
    NcPolynomial out = *this;
    for (const auto& [mi, c] : rhs.terms_) out.add_term(mi, c);
    return out;
}

NcPolynomial NcPolynomial::operator-(const NcPolynomial& rhs) const {
    NcPolynomial out = *this;
    for (const auto& [mi, c] : rhs.terms_) out.add_term(mi, -c);
    return out;
}

NcPolynomial NcPolynomial::operator*(const NcPolynomial& rhs) const {
    NcPolynomial out(blockCount_);
    for (const auto& [a, ca] : terms_)
        for (const auto& [b, cb] : rhs.terms_) out.add_term(a * b, ca * cb);
    return out;
}

NcPolynomial NcPolynomial::operator*(Complex c) const {
    NcPolynomial out(blockCount_);
    if (c == Complex(0)) return out;
    for (const auto& [mi, cc] : terms_) out.add_term(mi, cc * c);
    return out;
}

NcPolynomial NcPolynomial::generator(int blockCount, int block, int letter) {
    NcPolynomial p(blockCount);
    MultiIndex mi(blockCount);
    mi.word(block) = Word{block, {letter}};
    p.add_term(mi, Complex(1));
    return p;
}

PositiveRegularPolynomial::PositiveRegularPolynomial(
    int blockSize, std::vector<std::pair<Letters, double>> coeffs)
    : blockSize_(blockSize), degree_(0) {
    if (blockSize < 1) throw std::invalid_argument("block size must be >= 1");
    std::vector<bool> linearSeen(blockSize, false);
    for (auto& [w, a] : coeffs) {
        if (!(a >= 0.0) || !std::isfinite(a))
            throw std::invalid_argument("coefficients must be finite and nonnegative");
        if (w.empty() && a != 0.0)
            throw std::invalid_argument("constant term must vanish");
        for (int l : w)
            if (l < 1 || l > blockSize)
                throw std::invalid_argument("letter out of block alphabet");
        if (w.size() == 1 && a > 0.0) linearSeen[w[0] - 1] = true;
        if (a > 0.0) {
            support_.emplace_back(w, a);
            degree_ = std::max(degree_, static_cast<int>(w.size()));
        }
    }
    for (int j = 0; j < blockSize; ++j)
        if (!linearSeen[j])
            throw std::invalid_argument("every linear coefficient a_{g_j} must be positive");
    auto rank = [this](const Letters& w) {
        return word_rank(Word{1, w}, blockSize_);
    };
    std::sort(support_.begin(), support_.end(),
              [&](const auto& x, const auto& y) { return rank(x.first) < rank(y.first); });
    for (std::size_t s = 1; s < support_.size(); ++s)
        if (support_[s - 1].first == support_[s].first)
            throw std::invalid_argument("duplicate word in coefficient list");
}

double PositiveRegularPolynomial::coefficient(const Letters& w) const {
    for (const auto& [word, a] : support_)
        if (word == w) return a;
    return 0.0;
}

double PositiveRegularPolynomial::evaluate_abs(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != blockSize_)
        throw std::invalid_argument("point dimension mismatch");
    double v = 0.0;
    for (const auto& [w, a] : support_) {
        double t = a;
        for (int l : w) t *= x[l - 1];
        v += t;
    }
    return v;
}

Complex PositiveRegularPolynomial::evaluate(const std::vector<Complex>& z) const {
    if (static_cast<int>(z.size()) != blockSize_)
        throw std::invalid_argument("point dimension mismatch");
    Complex v = 0.0;
    for (const auto& [w, a] : support_) {
        Complex t = a;
        for (int l : w) t *= z[l - 1];
        v += t;
    }
    return v;
}

PositiveRegularPolynomial PositiveRegularPolynomial::ball(int n) {
    std::vector<std::pair<Letters, double>> coeffs;
    for (int j = 1; j <= n; ++j) coeffs.emplace_back(Letters{j}, 1.0);
    return PositiveRegularPolynomial(n, std::move(coeffs));
}

DomainSpec::DomainSpec(std::vector<int> n_, std::vector<int> m_,
                       std::vector<PositiveRegularPolynomial> q_)
    : n(std::move(n_)), m(std::move(m_)), q(std::move(q_)) {
    if (n.empty() || n.size() != m.size() || n.size() != q.size())
        throw std::invalid_argument("n, m, q must have equal nonzero length");
    for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] < 1 || m[i] < 1)
            throw std::invalid_argument("block sizes and multiplicities must be >= 1");
        if (q[i].block_size() != n[i])
            throw std::invalid_argument("generator block size mismatch");
    }
}

int DomainSpec::total_indeterminates() const {
    int t = 0;
    for (int ni : n) t += ni;
    return t;
}

DomainSpec DomainSpec::hardy_sobolev(int n, int k) {
    std::vector<int> ns(k, n), ms(k, 1);
    std::vector<PositiveRegularPolynomial> qs(k, PositiveRegularPolynomial::ball(n));
    return DomainSpec(std::move(ns), std::move(ms), std::move(qs));
}

DomainSpec DomainSpec::single_variable(int m) {
    return DomainSpec({1}, {m}, {PositiveRegularPolynomial::ball(1)});
}

}  // namespace polyfock
