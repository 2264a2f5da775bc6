#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "sigmak/errors.hpp"

namespace sigmak {

inline constexpr int kMaxDim = 6;

/// Binomial coefficient C(n, k) as a double; zero outside 0 <= k <= n.
double binomial(int n, int k);

/// All elementary symmetric polynomials sigma_0..sigma_kmax of `values`,
/// read off as coefficients of prod(1 + values[i] x). sigma_j for j > size
/// is zero. Generic over the scalar so jets can flow through it.
template <class T>
std::vector<T> elementary_symmetric(std::span<const T> values, int kmax) {
    std::vector<T> e(static_cast<std::size_t>(kmax) + 1, T(0.0));
    e[0] = T(1.0);
    int filled = 0;
    for (const T& x : values) {
        filled = filled < kmax ? filled + 1 : kmax;
        for (int j = filled; j >= 1; --j) e[j] = e[j] + x * e[j - 1];
    }
    return e;
}

/// Eigenvalue vector of a (0,2)-tensor against the metric. Entries finite,
/// 3 <= n <= kMaxDim. Every operation on it is permutation invariant.
class Spectrum {
public:
    explicit Spectrum(std::vector<double> values);
    Spectrum(std::initializer_list<double> values)
        : Spectrum(std::vector<double>(values)) {}

    /// The all-ones vector e.
    static Spectrum ones(int n);

    int n() const noexcept { return static_cast<int>(values_.size()); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }

private:
    std::vector<double> values_;
};

/// Dense symmetric n x n matrix with inline storage. `set` writes both
/// triangles so entries(i,j) == entries(j,i) always holds bit for bit.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n);

    static SymMatrix identity(int n, double scale = 1.0);
    static SymMatrix diagonal(std::span<const double> d);

    int n() const noexcept { return n_; }
    double operator()(int i, int j) const noexcept { return a_[i * kMaxDim + j]; }
    void set(int i, int j, double v) noexcept {
        a_[i * kMaxDim + j] = v;
        a_[j * kMaxDim + i] = v;
    }

    double trace() const noexcept;
    /// Frobenius contraction sum_ij a_ij b_ij.
    double contract(const SymMatrix& other) const noexcept;

    SymMatrix& operator+=(const SymMatrix& o) noexcept;
    SymMatrix& operator*=(double s) noexcept;
    void add_identity(double s) noexcept;

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) noexcept { return a += b; }
    friend SymMatrix operator*(double s, SymMatrix a) noexcept { return a *= s; }

private:
    int n_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

struct ConeReport {
    int k = 0;
    std::vector<double> sigmas;  // sigma_1 .. sigma_k
    bool inside = false;
    double margin = 0.0;         // min_j sigma_j
};

/// sigma_k(spec), 0 <= k <= n.
double sigma(const Spectrum& spec, int k);

/// sigma_k of the spectrum with entry i removed, 0 <= k <= n-1.
double sigma_minor(const Spectrum& spec, int k, int i);

/// Membership of spec in the Garding cone Gamma_k, 1 <= k <= n.
ConeReport in_gamma(const Spectrum& spec, int k);
ConeReport in_gamma_sigmas(std::span<const double> sigmas_from_one, int k);

/// l(n-k+1) sigma_l sigma_{k-1} - k(n-l+1) sigma_{l-1} sigma_k for 0 <= l < k <= n.
/// Nonnegative on Gamma_k.
double newton_maclaurin_gap(const Spectrum& spec, int k, int l);

/// Normalized (r,s) ratio minus normalized (k,l) ratio, where the (a,b) ratio
/// is [ (sigma_a/C(n,a)) / (sigma_b/C(n,b)) ]^(1/(a-b)). Requires spec in Gamma_k.
double quotient_ratio_gap(const Spectrum& spec, int k, int l, int r, int s);

/// sigma_k of the eigenvalues of m, without an eigendecomposition.
double sigma_matrix(const SymMatrix& m, int k);

/// Matrix of partial derivatives d sigma_k / d m_ij, entries treated as
/// independent. Equals the Newton tensor T_{k-1}(m).
SymMatrix dsigma_matrix(const SymMatrix& m, int k);

/// sigma_0..sigma_kmax of m together with the Newton tensors T_0..T_{kmax-1},
/// where T_j = sigma_j I - m T_{j-1} and d sigma_j / dm = T_{j-1}.
struct SigmaJet {
    int kmax = 0;
    std::array<double, kMaxDim + 1> sigmas{};
    std::array<SymMatrix, kMaxDim> newton{};
};
SigmaJet sigma_jet(const SymMatrix& m, int kmax);

}  // namespace sigmak
