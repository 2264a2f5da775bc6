#include "sigmak/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

#include "sigmak/parallel.hpp"

namespace sigmak {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class OutDir {
public:
    explicit OutDir(std::string dir) : dir_(std::move(dir)) {
        if (dir_.empty()) return;
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory '" + dir_ + "': " + ec.message());
    }

    bool enabled() const noexcept { return !dir_.empty(); }

    void write(const std::string& name, const std::string& content) const {
        if (dir_.empty()) return;
        const std::string path = (std::filesystem::path(dir_) / name).string();
        std::ofstream os(path, std::ios::binary);
        if (!os) throw IoError("cannot open '" + path + "' for writing");
        os << content;
        os.close();
        if (!os) throw IoError("write to '" + path + "' failed");
    }

private:
    std::string dir_;
};

template <typename Fn>
std::string render(Fn&& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

template <typename Fn>
int guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        std::cerr << "sigmak " << what << ": invalid config: " << e.what() << '\n';
        return kExitInvalidConfig;
    } catch (const IoError& e) {
        std::cerr << "sigmak " << what << ": I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "sigmak " << what << ": failed: " << e.what() << '\n';
        return kExitPathFailure;
    }
}

struct Line {
    std::ostringstream os;
    template <typename T>
    void add(const std::string& key, const T& v) {
        os << key << ": " << v << '\n';
    }
    void add(const std::string& key, double v) { os << key << ": " << fmt(v) << '\n'; }
    void add(const std::string& key, bool v) { os << key << ": " << (v ? "pass" : "fail") << '\n'; }
};

/// Rejection sample from [-1, 3]^n until the point lies in Gamma_k.
std::vector<double> sample_cone(std::mt19937_64& rng, int n, int k) {
    std::uniform_real_distribution<double> dist(-1.0, 3.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (;;) {
        for (double& x : v) x = dist(rng);
        const auto s = elementary_symmetric<double>(v, k);
        bool inside = true;
        for (int j = 1; j <= k; ++j) inside = inside && s[static_cast<std::size_t>(j)] > 0.0;
        if (inside) return v;
    }
}

struct SuiteResult {
    long checks = 0;
    long violations = 0;
    double worst = std::numeric_limits<double>::infinity();
};

void property_suites(const RunConfig& cfg, Line& out, bool& all_pass) {
    const int n = cfg.n;
    const int k = cfg.k;
    std::mt19937_64 rng(cfg.seed);
    SuiteResult nm, qr;
    for (int sample = 0; sample < cfg.property_samples; ++sample) {
        const std::vector<double> lam = sample_cone(rng, n, k);
        const Spectrum spec(lam);
        const auto s = elementary_symmetric<double>(lam, n);
        for (int kk = 1; kk <= k; ++kk) {
            for (int l = 0; l < kk; ++l) {
                const double gap = newton_maclaurin_gap(spec, kk, l);
                const double scale =
                    l * (n - kk + 1) * std::fabs(l > 0 ? s[static_cast<std::size_t>(l)] * s[static_cast<std::size_t>(kk - 1)] : 0.0) +
                    kk * (n - l + 1) * std::fabs((l > 0 ? s[static_cast<std::size_t>(l - 1)] : 0.0) * s[static_cast<std::size_t>(kk)]);
                const double rel = gap / std::max(1.0, scale);
                ++nm.checks;
                nm.worst = std::min(nm.worst, rel);
                if (rel < -1e-10) ++nm.violations;
                for (int r = 1; r <= kk; ++r) {
                    for (int q = 0; q < r && q <= l; ++q) {
                        if (r == kk && q == l) continue;
                        const double g = quotient_ratio_gap(spec, kk, l, r, q);
                        ++qr.checks;
                        qr.worst = std::min(qr.worst, g);
                        if (g < -1e-10) ++qr.violations;
                    }
                }
            }
        }
    }
    // Outside Gamma_k the first inequality is recorded, not asserted.
    std::uniform_real_distribution<double> box(-1.0, 3.0);
    long outside = 0, outside_negative = 0;
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int sample = 0; sample < cfg.property_samples; ++sample) {
        for (double& x : v) x = box(rng);
        const Spectrum spec(v);
        if (in_gamma(spec, k).inside) continue;
        ++outside;
        bool negative = false;
        for (int kk = 1; kk <= k; ++kk)
            for (int l = 0; l < kk; ++l) negative = negative || newton_maclaurin_gap(spec, kk, l) < -1e-10;
        if (negative) ++outside_negative;
    }
    out.add("symfunc.samples", cfg.property_samples);
    out.add("symfunc.newton_maclaurin.checks", nm.checks);
    out.add("symfunc.newton_maclaurin.violations", nm.violations);
    out.add("symfunc.newton_maclaurin.min_relative_gap", nm.worst);
    out.add("symfunc.quotient_ratio.checks", qr.checks);
    out.add("symfunc.quotient_ratio.violations", qr.violations);
    out.add("symfunc.quotient_ratio.min_gap", qr.worst);
    out.add("symfunc.outside_cone.samples", outside);
    out.add("symfunc.outside_cone.newton_maclaurin_negative", outside_negative);
    all_pass = all_pass && nm.violations == 0 && qr.violations == 0;
}

void ellipticity_block(const ProblemSpec& spec, double t, const std::string& prefix, Line& out, bool& all_pass) {
    const ScalarField zero(spec.grid, 0.0);
    const EllipticityReport e = ellipticity_certificate(zero, t, spec);
    out.add(prefix + ".t", t);
    out.add(prefix + ".min_eigenvalue", e.min_eigenvalue);
    out.add(prefix + ".min_trace", e.min_trace);
    out.add(prefix + ".trace_bound", e.trace_bound);
    out.add(prefix + ".min_operator_eigenvalue", e.min_operator_eigenvalue);
    out.add(prefix + ".min_cone_margin", e.min_cone_margin);
    out.add(prefix + ".failing_nodes", e.failing_nodes.size());
    out.add(prefix + ".status", e.pass);
    all_pass = all_pass && e.pass;
}

double max_error(const ScalarField& u, const Expr& exact) {
    const ScalarField ref = sample(exact, u.grid());
    double e = 0.0;
    for (std::size_t p = 0; p < u.size(); ++p) e = std::max(e, std::fabs(u[p] - ref[p]));
    return e;
}

}  // namespace

LocalDerivatives expression_derivatives(const Expr& e, std::span<const double> x, double step) {
    const int n = e.n();
    LocalDerivatives d;
    d.hess = SymMatrix(n);
    std::array<double, kMaxDim> p{};
    std::copy(x.begin(), x.end(), p.begin());
    const auto at = [&](int a, double da, int b, double db) {
        std::array<double, kMaxDim> q = p;
        q[static_cast<std::size_t>(a)] += da;
        q[static_cast<std::size_t>(b)] += db;
        return e.eval(std::span<const double>(q.data(), static_cast<std::size_t>(n)));
    };
    const double h = step;
    d.value = e.eval(std::span<const double>(p.data(), static_cast<std::size_t>(n)));
    static constexpr double w1[4] = {1.0, -8.0, 8.0, -1.0};  // offsets -2, -1, 1, 2
    static constexpr double off[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int a = 0; a < n; ++a) {
        double g = 0.0;
        for (int i = 0; i < 4; ++i) g += w1[i] * at(a, off[i] * h, a, 0.0);
        d.grad[static_cast<std::size_t>(a)] = g / (12.0 * h);
        const double dd = -at(a, 2 * h, a, 0.0) + 16.0 * at(a, h, a, 0.0) - 30.0 * d.value + 16.0 * at(a, -h, a, 0.0) -
                          at(a, -2 * h, a, 0.0);
        d.hess.set(a, a, dd / (12.0 * h * h));
        for (int b = a + 1; b < n; ++b) {
            double m = 0.0;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) m += w1[i] * w1[j] * at(a, off[i] * h, b, off[j] * h);
            d.hess.set(a, b, m / (144.0 * h * h));
        }
    }
    return d;
}

ScalarField manufactured_f(const ProblemSpec& spec, const Expr& u_star) {
    if (spec.kind == Case::B) throw ConfigError("verify: case B has no prescribed f to manufacture");
    const Grid& g = spec.grid;
    const int k = spec.k;
    ScalarField f(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
        const auto x = g.coordinates(p);
        LocalDerivatives d;
        try {
            d = expression_derivatives(u_star, std::span<const double>(x.data(), static_cast<std::size_t>(g.n())));
        } catch (const Error& e) {
            throw ConfigError(std::string("verify.u_star: ") + e.what());
        }
        const SymMatrix T = spec.kind == Case::C ? local_W(d, spec.background.schouten0.at(p))
                                                 : local_V(local_U(d, 1.0, spec.background.ric0.at(p)), 1.0);
        const SigmaJet jet = sigma_jet(T, k);
        for (int j = 1; j < k; ++j) {
            if (!(jet.sigmas[static_cast<std::size_t>(j)] > 0.0)) {
                throw ConfigError("verify.u_star: tensor of u* leaves Gamma_" + std::to_string(k - 1) + " at node " +
                                  std::to_string(p) + " (sigma_" + std::to_string(j) + " = " +
                                  fmt(jet.sigmas[static_cast<std::size_t>(j)]) + ")");
            }
        }
        const double sk = jet.sigmas[static_cast<std::size_t>(k)];
        const double sk1 = jet.sigmas[static_cast<std::size_t>(k - 1)];
        const double u = d.value;
        const double a = spec.alpha[p];
        f[p] = spec.kind == Case::C ? (sk + a * std::exp(-2.0 * u) * sk1) * std::exp(2.0 * k * u)
                                    : (sk + a * std::exp(2.0 * u) * sk1) * std::exp(-2.0 * k * u);
        if (!(f[p] > 0.0)) {
            throw ConfigError("verify.u_star: manufactured f is not positive at node " + std::to_string(p) + " (" +
                              fmt(f[p]) + ")");
        }
    }
    return f;
}

int run_check(const RunConfig& cfg, const std::string& out) {
    return guarded("check", [&] {
        set_workers(cfg.workers);
        const ProblemSpec spec = make_problem(cfg);
        OutDir dir(out);
        Line lines;
        bool all_pass = true;
        lines.add("case", std::string(1, case_letter(cfg.kind)));
        lines.add("n", cfg.n);
        lines.add("k", cfg.k);
        lines.add("N", cfg.N);
        lines.add("seed", cfg.seed);

        property_suites(cfg, lines, all_pass);

        const ConcavityReport c = concavity_certificate(cfg.n, cfg.k, cfg.concavity_samples, cfg.seed + 1);
        lines.add("concavity.samples", c.samples);
        lines.add("concavity.step", c.step);
        lines.add("concavity.tolerance", c.tolerance);
        lines.add("concavity.violations", c.concavity_violations);
        lines.add("concavity.max_second_difference", c.max_second_difference);
        lines.add("concavity.hessian_bound_violations", c.hessian_bound_violations);
        lines.add("concavity.min_hessian_bound_gap", c.min_hessian_bound_gap);
        lines.add("concavity.status", c.pass);
        all_pass = all_pass && c.pass;

        if (cfg.kind == Case::C) {
            ellipticity_block(spec, 1.0, "ellipticity", lines, all_pass);
        } else {
            ellipticity_block(spec, 0.0, "ellipticity.t0", lines, all_pass);
            ellipticity_block(spec, cfg.t, "ellipticity.t", lines, all_pass);
        }
        lines.add("overall", all_pass);
        const std::string text = lines.os.str();
        dir.write("certificates.txt", text);
        if (!dir.enabled()) std::cout << text;
        return all_pass ? kExitOk : kExitPathFailure;
    });
}

int run_solve(const RunConfig& cfg, const std::string& out) {
    return guarded("solve", [&] {
        set_workers(cfg.workers);
        const ProblemSpec spec = make_problem(cfg);
        OutDir dir(out);
        dir.write("config.txt", render([&](std::ostream& os) { write_config(os, cfg); }));

        ContinuationTrace trace;
        if (spec.kind == Case::C) {
            try {
                const HomotopyState s = solve_caseC(spec, ScalarField(spec.grid, 0.0), newton_options(cfg));
                trace.steps.push_back(TraceEntry{0, s.t, s.newton_iterations, s.residual_norm, s.cone_margin,
                                                 monitor(s, spec)});
                trace.final_u = s.u;
                trace.final_t = 1.0;
                trace.success = true;
            } catch (const DomainError&) {
                throw;
            } catch (const Error& e) {
                trace.failure = e.what();
            }
        } else {
            try {
                trace = continue_path(spec, schedule(cfg), newton_options(cfg));
            } catch (const PathFailure& e) {
                trace = e.trace();
            } catch (const DomainError&) {
                throw;
            } catch (const Error& e) {
                // t = 0 corrector failed: nothing accepted.
                trace.failure = e.what();
            }
        }

        dir.write("trace.csv", render([&](std::ostream& os) { write_trace_csv(os, trace); }));
        if (trace.final_u.size() == spec.grid.size()) {
            dir.write("u_final.field", render([&](std::ostream& os) { write_field(os, trace.final_u, "u"); }));
        }
        const VerificationReport rep = run_checks(trace, spec, check_config(cfg), "solve");
        dir.write("report.txt", render([&](std::ostream& os) { write_report_text(os, rep); }));
        dir.write("report.json", render([&](std::ostream& os) { write_report_json(os, rep); }));
        if (!dir.enabled()) write_report_text(std::cout, rep);
        if (!trace.success) {
            std::cerr << "sigmak solve: path failure: " << trace.failure << '\n';
            return kExitPathFailure;
        }
        return kExitOk;
    });
}

int run_verify(const RunConfig& cfg, const std::string& out) {
    return guarded("verify", [&] {
        set_workers(cfg.workers);
        if (cfg.u_star.empty()) throw ConfigError("verify.u_star is required");
        if (cfg.kind == Case::B) throw ConfigError("spec.case: verify supports cases A and C");
        const Expr u_star = Expr::parse(cfg.u_star, cfg.n);

        // Manufacture and validate both levels before any solve.
        std::array<ProblemSpec, 2> specs{make_problem(cfg, cfg.N), make_problem(cfg, 2 * cfg.N)};
        for (ProblemSpec& s : specs) {
            s.f = manufactured_f(s, u_star);
            s.f_source = "manufactured from u* = " + cfg.u_star;
        }
        OutDir dir(out);
        dir.write("config.txt", render([&](std::ostream& os) { write_config(os, cfg); }));

        Line lines;
        lines.add("case", std::string(1, case_letter(cfg.kind)));
        lines.add("u_star", cfg.u_star);
        std::array<double, 2> err{};
        for (int level = 0; level < 2; ++level) {
            const ProblemSpec& s = specs[static_cast<std::size_t>(level)];
            const int N = s.grid.points_per_axis();
            ScalarField u;
            int iterations = 0;
            if (s.kind == Case::C) {
                // The case C operator is indefinite; Newton is started from the
                // sampled u* so it converges to the discrete solution next to it.
                const HomotopyState st = solve_caseC(s, sample(u_star, s.grid), newton_options(cfg));
                u = st.u;
                iterations = st.newton_iterations;
            } else {
                const ContinuationTrace tr = continue_path(s, schedule(cfg), newton_options(cfg));
                u = tr.final_u;
                for (const TraceEntry& e : tr.steps) iterations += e.newton_iterations;
            }
            err[static_cast<std::size_t>(level)] = max_error(u, u_star);
            const std::string key = "N" + std::to_string(N);
            lines.add(key + ".newton_iterations", iterations);
            lines.add(key + ".max_error", err[static_cast<std::size_t>(level)]);
            dir.write("u_N" + std::to_string(N) + ".field",
                      render([&](std::ostream& os) { write_field(os, u, "u_N" + std::to_string(N)); }));
        }
        bool pass = false;
        if (err[0] <= 1e-10 && err[1] <= 1e-10) {
            lines.add("order", "skipped");
            lines.add("order.status", "info");
            pass = true;
        } else {
            const double order = std::log2(err[0] / err[1]);
            pass = order >= cfg.order_min && order <= cfg.order_max;
            lines.add("order", order);
            lines.add("order.range", "[" + fmt(cfg.order_min) + ", " + fmt(cfg.order_max) + "]");
            lines.add("order.status", pass);
        }
        const std::string text = lines.os.str();
        dir.write("verify.txt", text);
        if (!dir.enabled()) std::cout << text;
        return pass ? kExitOk : kExitPathFailure;
    });
}

}  // namespace sigmak
