#include "sigmak/symfunc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sigmak {

namespace {

void require_order(int k, int lo, int hi, const char* what) {
    if (k < lo || k > hi) {
        throw DomainError(std::string(what) + ": order " + std::to_string(k) +
                          " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}

double sigma_or_zero(const std::vector<double>& e, int j) {
    return (j < 0 || j >= static_cast<int>(e.size())) ? 0.0 : e[static_cast<std::size_t>(j)];
}

double normalized_ratio(const std::vector<double>& e, int n, int a, int b) {
    const double num = e[static_cast<std::size_t>(a)] / binomial(n, a);
    const double den = e[static_cast<std::size_t>(b)] / binomial(n, b);
    return std::pow(num / den, 1.0 / static_cast<double>(a - b));
}

}  // namespace

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(c);
}

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 3 || values_.size() > static_cast<std::size_t>(kMaxDim)) {
        throw DomainError("spectrum length " + std::to_string(values_.size()) +
                          " outside [3, " + std::to_string(kMaxDim) + "]");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("spectrum entry is not finite");
    }
}

Spectrum Spectrum::ones(int n) { return Spectrum(std::vector<double>(static_cast<std::size_t>(n), 1.0)); }

SymMatrix::SymMatrix(int n) : n_(n) {
    if (n < 1 || n > kMaxDim) throw DomainError("matrix dimension " + std::to_string(n) + " unsupported");
}

SymMatrix SymMatrix::identity(int n, double scale) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, scale);
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
    SymMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n(); ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
    return m;
}

double SymMatrix::trace() const noexcept {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += (*this)(i, i);
    return s;
}

double SymMatrix::contract(const SymMatrix& other) const noexcept {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * other(i, j);
    return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) noexcept {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) noexcept {
    for (double& v : a_) v *= s;
    return *this;
}

void SymMatrix::add_identity(double s) noexcept {
    for (int i = 0; i < n_; ++i) a_[i * kMaxDim + i] += s;
}

double sigma(const Spectrum& spec, int k) {
    require_order(k, 0, spec.n(), "sigma");
    return elementary_symmetric(spec.values(), k)[static_cast<std::size_t>(k)];
}

double sigma_minor(const Spectrum& spec, int k, int i) {
    if (i < 0 || i >= spec.n()) {
        throw DomainError("sigma_minor: index " + std::to_string(i) + " out of range");
    }
    require_order(k, 0, spec.n() - 1, "sigma_minor");
    std::vector<double> rest;
    rest.reserve(static_cast<std::size_t>(spec.n() - 1));
    for (int j = 0; j < spec.n(); ++j)
        if (j != i) rest.push_back(spec[j]);
    return elementary_symmetric(std::span<const double>(rest), k)[static_cast<std::size_t>(k)];
}

ConeReport in_gamma_sigmas(std::span<const double> sigmas_from_one, int k) {
    ConeReport r;
    r.k = k;
    r.sigmas.assign(sigmas_from_one.begin(), sigmas_from_one.begin() + k);
    r.margin = *std::min_element(r.sigmas.begin(), r.sigmas.end());
    r.inside = r.margin > 0.0;
    return r;
}

ConeReport in_gamma(const Spectrum& spec, int k) {
    require_order(k, 1, spec.n(), "in_gamma");
    const auto e = elementary_symmetric(spec.values(), k);
    return in_gamma_sigmas(std::span<const double>(e).subspan(1), k);
}

double newton_maclaurin_gap(const Spectrum& spec, int k, int l) {
    const int n = spec.n();
    if (!(0 <= l && l < k && k <= n)) {
        throw DomainError("newton_maclaurin_gap: need 0 <= l < k <= n");
    }
    const auto e = elementary_symmetric(spec.values(), k);
    const double rhs = static_cast<double>(l * (n - k + 1)) * sigma_or_zero(e, l) * sigma_or_zero(e, k - 1);
    const double lhs = static_cast<double>(k * (n - l + 1)) * sigma_or_zero(e, l - 1) * sigma_or_zero(e, k);
    return rhs - lhs;
}

double quotient_ratio_gap(const Spectrum& spec, int k, int l, int r, int s) {
    const int n = spec.n();
    if (!(k > l && l >= 0 && r > s && s >= 0 && k >= r && l >= s && k <= n)) {
        throw DomainError("quotient_ratio_gap: need k > l >= 0, r > s >= 0, k >= r, l >= s, k <= n");
    }
    const auto e = elementary_symmetric(spec.values(), k);
    if (!in_gamma_sigmas(std::span<const double>(e).subspan(1), k).inside) {
        throw DomainError("quotient_ratio_gap: spectrum outside Gamma_" + std::to_string(k));
    }
    return normalized_ratio(e, n, r, s) - normalized_ratio(e, n, k, l);
}

SigmaJet sigma_jet(const SymMatrix& m, int kmax) {
    const int n = m.n();
    require_order(kmax, 0, n, "sigma_jet");
    SigmaJet jet;
    jet.kmax = kmax;
    jet.sigmas[0] = 1.0;
    if (kmax == 0) return jet;
    jet.newton[0] = SymMatrix::identity(n);
    for (int j = 1; j <= kmax; ++j) {
        const SymMatrix& prev = jet.newton[static_cast<std::size_t>(j - 1)];
        // P = m * T_{j-1}; m and T_{j-1} commute, so P is symmetric up to rounding.
        double p[kMaxDim][kMaxDim];
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double acc = 0.0;
                for (int c = 0; c < n; ++c) acc += m(a, c) * prev(c, b);
                p[a][b] = acc;
            }
        double tr = 0.0;
        for (int a = 0; a < n; ++a) tr += p[a][a];
        const double sj = tr / static_cast<double>(j);
        jet.sigmas[static_cast<std::size_t>(j)] = sj;
        if (j == kmax) break;
        SymMatrix next(n);
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                const double sym = 0.5 * (p[a][b] + p[b][a]);
                next.set(a, b, (a == b ? sj : 0.0) - sym);
            }
        jet.newton[static_cast<std::size_t>(j)] = next;
    }
    return jet;
}

double sigma_matrix(const SymMatrix& m, int k) {
    require_order(k, 0, m.n(), "sigma_matrix");
    return sigma_jet(m, k).sigmas[static_cast<std::size_t>(k)];
}

SymMatrix dsigma_matrix(const SymMatrix& m, int k) {
    require_order(k, 1, m.n(), "dsigma_matrix");
    return sigma_jet(m, k).newton[static_cast<std::size_t>(k - 1)];
}

}  // namespace sigmak
