#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "sigmak/config.hpp"
#include "sigmak/operators.hpp"

namespace oracle {

// sigma_k by enumerating every k-subset via bitmasks.
inline double brute_sigma(const std::vector<double>& v, int k) {
    const int n = static_cast<int>(v.size());
    if (k == 0) return 1.0;
    double sum = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (__builtin_popcount(mask) != k) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= v[static_cast<std::size_t>(i)];
        sum += prod;
    }
    return sum;
}

// Same enumeration on |v|: the scale against which cancellation is judged.
inline double brute_sigma_abs(const std::vector<double>& v, int k) {
    std::vector<double> a(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) a[i] = std::fabs(v[i]);
    return brute_sigma(a, k);
}

inline std::vector<double> uniform_vector(std::mt19937_64& rng, int n, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (double& x : v) x = d(rng);
    return v;
}

inline std::vector<double> gamma_sample(std::mt19937_64& rng, int n, int k) {
    for (;;) {
        auto v = uniform_vector(rng, n, -1.0, 3.0);
        bool inside = true;
        for (int j = 1; j <= k; ++j) inside = inside && brute_sigma(v, j) > 0.0;
        if (inside) return v;
    }
}

// Smooth random field: a few low Fourier modes with amplitudes up to `amp`.
inline sigmak::ScalarField random_smooth(std::mt19937_64& rng, const sigmak::Grid& g, double amp) {
    std::uniform_real_distribution<double> a(-amp, amp), ph(0.0, 6.283185307179586);
    std::uniform_int_distribution<int> m(0, 1);
    sigmak::ScalarField u(g, 0.0);
    for (int term = 0; term < 3; ++term) {
        const double c = a(rng), phase = ph(rng);
        std::array<int, sigmak::kMaxDim> w{};
        for (int i = 0; i < g.n(); ++i) w[static_cast<std::size_t>(i)] = m(rng);
        for (std::size_t p = 0; p < g.size(); ++p) {
            const auto x = g.coordinates(p);
            double arg = phase;
            for (int i = 0; i < g.n(); ++i) arg += w[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
            u[p] += c * std::sin(arg);
        }
    }
    return u;
}

inline double rel_fd_error(const sigmak::ProblemSpec& s, const sigmak::ScalarField& u, const sigmak::ScalarField& phi, double t) {
    const double eps = 1e-5;
    sigmak::ScalarField up = u, um = u;
    for (std::size_t p = 0; p < u.size(); ++p) {
        up[p] += eps * phi[p];
        um[p] -= eps * phi[p];
    }
    const auto rp = sigmak::residual(up, t, s, sigmak::ResidualForm::Multiplied).values;
    const auto rm = sigmak::residual(um, t, s, sigmak::ResidualForm::Multiplied).values;
    const sigmak::ScalarField Lphi = sigmak::linearize(u, t, s).apply(phi);
    double num = 0.0, den = 0.0;
    for (std::size_t p = 0; p < u.size(); ++p) {
        num = std::max(num, std::fabs((rp[p] - rm[p]) / (2 * eps) - Lphi[p]));
        den = std::max(den, std::fabs(Lphi[p]));
    }
    return num / den;
}

// Parse a config from lines; tests build small configs inline.
inline sigmak::RunConfig config(const std::string& text) { return sigmak::parse_config(text); }

inline std::string canonical_a(int N = 16, const std::string& alpha = "-0.1", const std::string& f = "0.7") {
    return "spec.case = A\nspec.n = 3\nspec.k = 3\nspec.N = " + std::to_string(N) + "\nspec.alpha = \"" + alpha +
           "\"\nspec.f = \"" + f + "\"\n";
}

inline std::string canonical_b(const std::string& alpha, int N = 16) {
    return "spec.case = B\nspec.n = 3\nspec.k = 3\nspec.N = " + std::to_string(N) + "\nspec.alpha = \"" + alpha +
           "\"\nspec.f = \"0\"\n";
}

inline std::string canonical_c(double a0 = 7.0 / 6.0, int N = 16, const std::string& alpha = "-0.1",
                               const std::string& f = "1") {
    std::string s = "spec.case = C\nspec.n = 3\nspec.k = 3\nspec.N = " + std::to_string(N) + "\nspec.alpha = \"" +
                    alpha + "\"\nspec.f = \"" + f + "\"\n";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", a0);
    for (int i = 1; i <= 3; ++i)
        s += "background.schouten0.(" + std::to_string(i) + "," + std::to_string(i) + ") = \"" + buf + "\"\n";
    return s;
}

}  // namespace oracle
