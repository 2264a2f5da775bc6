#include "sigmak/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

namespace sigmak {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = first + value.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) throw ConfigError(key + ": cannot parse '" + value + "' as a number");
    return out;
}

std::string quoted(const std::string& s) { return "\"" + s + "\""; }

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

Key dbl(const std::string& name, double RunConfig::*m) {
    return {name, [=](RunConfig& c, const std::string& v) { c.*m = parse_number<double>(name, v); },
            [=](const RunConfig& c) { return fmt(c.*m); }};
}

Key integer(const std::string& name, int RunConfig::*m) {
    return {name, [=](RunConfig& c, const std::string& v) { c.*m = parse_number<int>(name, v); },
            [=](const RunConfig& c) { return std::to_string(c.*m); }};
}

Key text(const std::string& name, std::string RunConfig::*m) {
    return {name, [=](RunConfig& c, const std::string& v) { c.*m = v; },
            [=](const RunConfig& c) { return quoted(c.*m); }};
}

const std::vector<Key>& keys() {
    static const std::vector<Key> table = [] {
        std::vector<Key> k;
        k.push_back(text("subcommand", &RunConfig::subcommand));
        k.push_back({"spec.case",
                     [](RunConfig& c, const std::string& v) {
                         try {
                             c.kind = parse_case(v);
                         } catch (const Error& e) {
                             throw ConfigError(std::string("spec.case: ") + e.what());
                         }
                     },
                     [](const RunConfig& c) { return std::string(1, case_letter(c.kind)); }});
        k.push_back(integer("spec.n", &RunConfig::n));
        k.push_back(integer("spec.k", &RunConfig::k));
        k.push_back(integer("spec.N", &RunConfig::N));
        k.push_back(text("spec.alpha", &RunConfig::alpha));
        k.push_back(text("spec.f", &RunConfig::f));
        k.push_back(dbl("spec.t", &RunConfig::t));
        k.push_back(dbl("solver.tolerance", &RunConfig::newton_tolerance));
        k.push_back(integer("solver.max_iterations", &RunConfig::newton_max_iterations));
        k.push_back(dbl("solver.cone_margin_factor", &RunConfig::cone_margin_factor));
        k.push_back(dbl("solver.armijo_factor", &RunConfig::armijo_factor));
        k.push_back(integer("solver.max_halvings", &RunConfig::max_halvings));
        k.push_back(dbl("solver.linear_tolerance", &RunConfig::linear_tolerance));
        k.push_back(dbl("solver.dt_initial", &RunConfig::dt_initial));
        k.push_back(dbl("solver.dt_max", &RunConfig::dt_max));
        k.push_back(dbl("solver.dt_min", &RunConfig::dt_min));
        k.push_back(integer("solver.fast_iterations", &RunConfig::fast_iterations));
        k.push_back({"check.list",
                     [](RunConfig& c, const std::string& v) {
                         c.checks.clear();
                         std::stringstream ss(v);
                         std::string item;
                         while (std::getline(ss, item, ',')) {
                             item = trim(item);
                             if (!item.empty()) c.checks.push_back(item);
                         }
                     },
                     [](const RunConfig& c) {
                         std::string s;
                         for (const auto& name : c.checks) s += (s.empty() ? "" : ",") + name;
                         return quoted(s);
                     }});
        k.push_back(dbl("check.ceiling_sup_u", &RunConfig::ceiling_sup_u));
        k.push_back(dbl("check.ceiling_grad_sq", &RunConfig::ceiling_grad_sq));
        k.push_back(dbl("check.ceiling_hess", &RunConfig::ceiling_hess));
        k.push_back(dbl("check.growth_factor", &RunConfig::growth_factor));
        k.push_back(dbl("check.growth_floor", &RunConfig::growth_floor));
        k.push_back(integer("certificates.samples", &RunConfig::property_samples));
        k.push_back(integer("certificates.concavity_samples", &RunConfig::concavity_samples));
        k.push_back(text("verify.u_star", &RunConfig::u_star));
        k.push_back(dbl("verify.order_min", &RunConfig::order_min));
        k.push_back(dbl("verify.order_max", &RunConfig::order_max));
        k.push_back({"seed",
                     [](RunConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); },
                     [](const RunConfig& c) { return std::to_string(c.seed); }});
        k.push_back(integer("workers", &RunConfig::workers));
        k.push_back(text("output.dir", &RunConfig::output_dir));
        return k;
    }();
    return table;
}

// "(i,j)" with 1 <= i <= j, whitespace removed.
std::string component_key(const std::string& key, const std::string& raw) {
    std::string s;
    for (char ch : raw)
        if (ch != ' ' && ch != '\t') s += ch;
    int i = 0, j = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "(%d,%d%c", &i, &j, &tail) != 3 || tail != ')' ||
        s != "(" + std::to_string(i) + "," + std::to_string(j) + ")") {
        throw ConfigError(key + ": component must look like (i,j)");
    }
    if (i > j) std::swap(i, j);
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void check_components(const std::string& prefix, const TensorSource& src, int n) {
    for (const auto& [key, expr] : src) {
        int i = 0, j = 0;
        std::sscanf(key.c_str(), "(%d,%d)", &i, &j);
        if (i < 1 || j > n) throw ConfigError(prefix + "." + key + ": index out of range for spec.n = " + std::to_string(n));
        try {
            (void)Expr::parse(expr, n);
        } catch (const Error& e) {
            throw ConfigError(prefix + "." + key + ": " + e.what());
        }
    }
}

}  // namespace

void validate_config(const RunConfig& c) {
    const auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    require(c.subcommand == "check" || c.subcommand == "solve" || c.subcommand == "verify",
            "subcommand must be check, solve or verify");
    require(c.n >= 3 && c.n <= kMaxDim, "spec.n = " + std::to_string(c.n) + " must lie in [3, 6]");
    require(c.k >= 3, "spec.k = " + std::to_string(c.k) + " must be at least 3");
    require(c.k <= c.n, "spec.k = " + std::to_string(c.k) + " exceeds spec.n = " + std::to_string(c.n));
    require(c.N >= 8, "spec.N = " + std::to_string(c.N) + " must be at least 8");
    require(c.t >= 0.0 && c.t <= 1.0, "spec.t must lie in [0, 1]");
    for (const auto& [name, src] : {std::pair{"spec.alpha", &c.alpha}, std::pair{"spec.f", &c.f}}) {
        try {
            (void)Expr::parse(*src, c.n);
        } catch (const Error& e) {
            throw ConfigError(std::string(name) + ": " + e.what());
        }
    }
    check_components("background.ric0", c.ric0, c.n);
    check_components("background.schouten0", c.schouten0, c.n);

    require(c.newton_tolerance > 0.0, "solver.tolerance must be positive");
    require(c.newton_max_iterations >= 1, "solver.max_iterations must be at least 1");
    require(c.cone_margin_factor >= 0.0 && c.cone_margin_factor < 1.0, "solver.cone_margin_factor must lie in [0, 1)");
    require(c.armijo_factor >= 0.0 && c.armijo_factor < 1.0, "solver.armijo_factor must lie in [0, 1)");
    require(c.max_halvings >= 0 && c.max_halvings <= 60, "solver.max_halvings must lie in [0, 60]");
    require(c.linear_tolerance > 0.0 && c.linear_tolerance < 1.0, "solver.linear_tolerance must lie in (0, 1)");
    require(c.dt_min > 0.0, "solver.dt_min must be positive");
    require(c.dt_max > 0.0 && c.dt_max <= 1.0, "solver.dt_max must lie in (0, 1]");
    require(c.dt_initial > 0.0, "solver.dt_initial must be positive");
    require(c.fast_iterations >= 0, "solver.fast_iterations must be non-negative");

    const CheckConfig known;
    for (const auto& name : c.checks) {
        require(std::find(known.names.begin(), known.names.end(), name) != known.names.end(),
                "check.list: unknown check '" + name + "'");
    }
    require(c.ceiling_sup_u > 0.0 && c.ceiling_grad_sq > 0.0 && c.ceiling_hess > 0.0, "check ceilings must be positive");
    require(c.growth_factor >= 1.0, "check.growth_factor must be at least 1");
    require(c.growth_floor >= 0.0, "check.growth_floor must be non-negative");
    require(c.property_samples >= 1, "certificates.samples must be at least 1");
    require(c.concavity_samples >= 1, "certificates.concavity_samples must be at least 1");
    if (!c.u_star.empty()) {
        try {
            (void)Expr::parse(c.u_star, c.n);
        } catch (const Error& e) {
            throw ConfigError(std::string("verify.u_star: ") + e.what());
        }
    }
    require(c.order_min < c.order_max, "verify.order_min must be below verify.order_max");
    require(c.workers >= 0, "workers must be non-negative");
}

RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (value.find('"') != std::string::npos) throw ConfigError(key + ": stray quote in value");

        for (const char* prefix : {"background.ric0.", "background.schouten0."}) {
            const std::string p(prefix);
            if (key.rfind(p, 0) == 0) key = p + component_key(key, key.substr(p.size()));
        }
        if (!seen.insert(key).second) throw ConfigError(key + ": duplicate key");

        if (key.rfind("background.ric0.", 0) == 0) {
            cfg.ric0[key.substr(16)] = value;
            continue;
        }
        if (key.rfind("background.schouten0.", 0) == 0) {
            cfg.schouten0[key.substr(21)] = value;
            continue;
        }
        bool found = false;
        for (const Key& k : keys()) {
            if (k.name == key) {
                k.set(cfg, value);
                found = true;
                break;
            }
        }
        if (!found) throw ConfigError("unknown key '" + key + "'");
    }
    if (cfg.ric0.empty() && cfg.n >= 3) {
        const std::string diag = fmt(-static_cast<double>(cfg.n - 2));
        for (int i = 1; i <= cfg.n && i <= kMaxDim; ++i)
            cfg.ric0["(" + std::to_string(i) + "," + std::to_string(i) + ")"] = diag;
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void write_config(std::ostream& os, const RunConfig& cfg) {
    for (const Key& k : keys()) os << k.name << " = " << k.get(cfg) << '\n';
    for (const auto& [key, expr] : cfg.ric0) os << "background.ric0." << key << " = " << quoted(expr) << '\n';
    for (const auto& [key, expr] : cfg.schouten0) os << "background.schouten0." << key << " = " << quoted(expr) << '\n';
}

NewtonOptions newton_options(const RunConfig& cfg) {
    NewtonOptions o;
    o.tolerance = cfg.newton_tolerance;
    o.max_iterations = cfg.newton_max_iterations;
    o.cone_margin_factor = cfg.cone_margin_factor;
    o.armijo_factor = cfg.armijo_factor;
    o.max_halvings = cfg.max_halvings;
    o.linear.relative_tolerance = cfg.linear_tolerance;
    return o;
}

ContinuationSchedule schedule(const RunConfig& cfg) {
    return ContinuationSchedule{cfg.dt_initial, cfg.dt_max, cfg.dt_min, cfg.fast_iterations};
}

CheckConfig check_config(const RunConfig& cfg) {
    CheckConfig c;
    c.names = cfg.checks;
    c.ceiling_sup_u = cfg.ceiling_sup_u;
    c.ceiling_grad_sq = cfg.ceiling_grad_sq;
    c.ceiling_hess = cfg.ceiling_hess;
    c.growth_factor = cfg.growth_factor;
    c.growth_floor = cfg.growth_floor;
    return c;
}

ProblemSpec make_problem(const RunConfig& cfg, int points_per_axis) {
    validate_config(cfg);
    try {
        ProblemSpec spec;
        spec.kind = cfg.kind;
        spec.n = cfg.n;
        spec.k = cfg.k;
        spec.grid = Grid(cfg.n, points_per_axis > 0 ? points_per_axis : cfg.N);
        spec.alpha_source = cfg.alpha;
        spec.f_source = cfg.f;
        spec.alpha = sample(Expr::parse(cfg.alpha, cfg.n), spec.grid);
        spec.f = sample(Expr::parse(cfg.f, cfg.n), spec.grid);
        spec.background = make_background(spec.grid, cfg.k, cfg.ric0, cfg.schouten0);
        validate_problem(spec);
        return spec;
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace sigmak
