#include <cmath>
#include <random>

#include "sigmak/operators.hpp"

namespace sigmak {

namespace {

/// Value with first and second derivative along a line, enough to carry
/// the sigma recurrence (only + and * are needed).
struct Jet2 {
    double v = 0.0, d1 = 0.0, d2 = 0.0;

    Jet2() = default;
    explicit Jet2(double value) : v(value) {}
    Jet2(double value, double first, double second) : v(value), d1(first), d2(second) {}

    friend Jet2 operator+(const Jet2& a, const Jet2& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
    }
};

std::vector<double> mix(std::span<const double> eta, double t) {
    double tr = 0.0;
    for (double x : eta) tr += x;
    std::vector<double> mu(eta.size());
    for (std::size_t i = 0; i < eta.size(); ++i) mu[i] = t * eta[i] + (1.0 - t) * tr;
    return mu;
}

bool in_cone(std::span<const double> x, int order) {
    const auto e = elementary_symmetric(x, order);
    for (int j = 1; j <= order; ++j)
        if (!(e[static_cast<std::size_t>(j)] > 0.0)) return false;
    return true;
}

double operator_value(std::span<const double> eta, double t, double h, int k) {
    const auto mu = mix(eta, t);
    const auto e = elementary_symmetric(std::span<const double>(mu), k);
    const double skm1 = e[static_cast<std::size_t>(k - 1)];
    return e[static_cast<std::size_t>(k)] / skm1 - h / skm1;
}

}  // namespace

ConcavityReport concavity_certificate(int n, int k, int samples, std::uint64_t seed) {
    if (n < 3 || n > kMaxDim || k < 2 || k > n) throw DomainError("concavity_certificate: need 2 <= k <= n <= 6");
    ConcavityReport rep;
    rep.n = n;
    rep.k = k;
    rep.samples = samples;
    rep.max_second_difference = -std::numeric_limits<double>::infinity();
    rep.min_hessian_bound_gap = std::numeric_limits<double>::infinity();

    std::mt19937_64 rng(seed + 1000003ULL * static_cast<std::uint64_t>(n) + 7919ULL * static_cast<std::uint64_t>(k));
    std::uniform_real_distribution<double> cube(-1.0, 3.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    const auto un = static_cast<std::size_t>(n);
    std::vector<double> eta(un), dir(un), plus(un), minus(un);
    const double s = rep.step;
    const double factor = 1.0 + 1.0 / static_cast<double>(k + 1);

    for (int sample = 0; sample < samples; ++sample) {
        double t = 0.0, h = 0.0;
        for (;;) {
            for (double& x : eta) x = cube(rng);
            double norm = 0.0;
            for (double& x : dir) {
                x = normal(rng);
                norm += x * x;
            }
            norm = std::sqrt(norm);
            for (double& x : dir) x /= norm;
            t = unit(rng);
            h = 2.0 * (1.0 - unit(rng));  // (0, 2]
            for (std::size_t i = 0; i < un; ++i) {
                plus[i] = eta[i] + s * dir[i];
                minus[i] = eta[i] - s * dir[i];
            }
            if (in_cone(eta, k - 1) && in_cone(plus, k - 1) && in_cone(minus, k - 1)) break;
        }

        const double second = operator_value(plus, t, h, k) - 2.0 * operator_value(eta, t, h, k) +
                              operator_value(minus, t, h, k);
        rep.max_second_difference = std::max(rep.max_second_difference, second);
        if (second > rep.tolerance) ++rep.concavity_violations;

        // G0 = -1/p with p(s) = sigma_{k-1}(mu(eta + s d)); mu is linear in eta.
        const auto mu = mix(eta, t);
        const auto dmu = mix(dir, t);
        std::vector<Jet2> line(un);
        for (std::size_t i = 0; i < un; ++i) line[i] = Jet2(mu[i], dmu[i], 0.0);
        const Jet2 p = elementary_symmetric(std::span<const Jet2>(line), k - 1)[static_cast<std::size_t>(k - 1)];
        const double g = -1.0 / p.v;
        const double g1 = p.d1 / (p.v * p.v);
        const double g2 = p.d2 / (p.v * p.v) - 2.0 * p.d1 * p.d1 / (p.v * p.v * p.v);
        const double lhs = -g2;
        const double rhs = -factor * (1.0 / g) * g1 * g1;
        const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
        const double gap = (lhs - rhs) / scale;
        rep.min_hessian_bound_gap = std::min(rep.min_hessian_bound_gap, gap);
        if (gap < -rep.tolerance) ++rep.hessian_bound_violations;
    }
    rep.pass = rep.concavity_violations == 0 && rep.hessian_bound_violations == 0;
    return rep;
}

}  // namespace sigmak
