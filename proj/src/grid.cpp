#include "sigmak/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

namespace sigmak {

Grid::Grid(int n, int points_per_axis) : n_(n), N_(points_per_axis) {
    if (n < 3 || n > kMaxDim) throw DomainError("grid dimension " + std::to_string(n) + " outside [3, 6]");
    if (points_per_axis < 8) throw DomainError("grid needs at least 8 points per axis");
    h_ = 2.0 * std::numbers::pi / static_cast<double>(N_);
    size_ = 1;
    for (int a = n_ - 1; a >= 0; --a) {
        strides_[static_cast<std::size_t>(a)] = size_;
        size_ *= static_cast<std::size_t>(N_);
    }
}

std::array<int, kMaxDim> Grid::unflatten(std::size_t node) const noexcept {
    std::array<int, kMaxDim> idx{};
    for (int a = n_ - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(node % static_cast<std::size_t>(N_));
        node /= static_cast<std::size_t>(N_);
    }
    return idx;
}

std::size_t Grid::flatten(std::span<const int> index) const noexcept {
    std::size_t node = 0;
    for (int a = 0; a < n_; ++a) {
        const int i = ((index[static_cast<std::size_t>(a)] % N_) + N_) % N_;
        node = node * static_cast<std::size_t>(N_) + static_cast<std::size_t>(i);
    }
    return node;
}

std::size_t Grid::neighbor(std::size_t node, int axis, int offset) const noexcept {
    const std::size_t s = strides_[static_cast<std::size_t>(axis)];
    const int i = static_cast<int>((node / s) % static_cast<std::size_t>(N_));
    const int j = ((i + offset) % N_ + N_) % N_;
    return node + (static_cast<std::size_t>(j) - static_cast<std::size_t>(i)) * s;
}

std::array<double, kMaxDim> Grid::coordinates(std::size_t node) const noexcept {
    const auto idx = unflatten(node);
    std::array<double, kMaxDim> x{};
    for (int a = 0; a < n_; ++a) {
        x[static_cast<std::size_t>(a)] =
            2.0 * std::numbers::pi * static_cast<double>(idx[static_cast<std::size_t>(a)]) / static_cast<double>(N_);
    }
    return x;
}

ScalarField::ScalarField(const Grid& grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
    if (data_.size() != grid_.size()) throw DomainError("field data length does not match grid");
}

double ScalarField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

double ScalarField::min() const noexcept { return *std::min_element(data_.begin(), data_.end()); }
double ScalarField::max() const noexcept { return *std::max_element(data_.begin(), data_.end()); }

SymmetricTensorField::SymmetricTensorField(const Grid& grid)
    : grid_(grid), comps_(grid.n() * (grid.n() + 1) / 2), data_(grid.size() * static_cast<std::size_t>(comps_), 0.0) {}

int SymmetricTensorField::packed_index(int n, int i, int j) noexcept {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
}

SymMatrix SymmetricTensorField::at(std::size_t node) const {
    const int n = grid_.n();
    SymMatrix m(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) m.set(i, j, get(node, i, j));
    return m;
}

void SymmetricTensorField::store(std::size_t node, const SymMatrix& m) {
    const int n = grid_.n();
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) set(node, i, j, m(i, j));
}

ScalarField SymmetricTensorField::trace() const {
    ScalarField tr(grid_);
    for (std::size_t p = 0; p < grid_.size(); ++p) {
        double s = 0.0;
        for (int i = 0; i < grid_.n(); ++i) s += get(p, i, i);
        tr[p] = s;
    }
    return tr;
}

ScalarField SymmetricTensorField::component(int i, int j) const {
    ScalarField c(grid_);
    for (std::size_t p = 0; p < grid_.size(); ++p) c[p] = get(p, i, j);
    return c;
}

namespace {

inline double first_difference(const ScalarField& u, std::size_t p, int axis) {
    const Grid& g = u.grid();
    return (u[g.neighbor(p, axis, 1)] - u[g.neighbor(p, axis, -1)]) / (2.0 * g.spacing());
}

inline double second_difference(const ScalarField& u, std::size_t p, int axis) {
    const Grid& g = u.grid();
    const double h = g.spacing();
    return (u[g.neighbor(p, axis, 1)] - 2.0 * u[p] + u[g.neighbor(p, axis, -1)]) / (h * h);
}

inline double cross_difference(const ScalarField& u, std::size_t p, int a, int b) {
    const Grid& g = u.grid();
    const double h = g.spacing();
    const std::size_t ap = g.neighbor(p, a, 1);
    const std::size_t am = g.neighbor(p, a, -1);
    return (u[g.neighbor(ap, b, 1)] - u[g.neighbor(ap, b, -1)] - u[g.neighbor(am, b, 1)] + u[g.neighbor(am, b, -1)]) /
           (4.0 * h * h);
}

}  // namespace

std::vector<ScalarField> grad(const ScalarField& u) {
    const Grid& g = u.grid();
    std::vector<ScalarField> out(static_cast<std::size_t>(g.n()), ScalarField(g));
    for (int a = 0; a < g.n(); ++a)
        for (std::size_t p = 0; p < g.size(); ++p) out[static_cast<std::size_t>(a)][p] = first_difference(u, p, a);
    return out;
}

SymmetricTensorField hess(const ScalarField& u) {
    const Grid& g = u.grid();
    SymmetricTensorField H(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
        for (int a = 0; a < g.n(); ++a) {
            H.set(p, a, a, second_difference(u, p, a));
            for (int b = a + 1; b < g.n(); ++b) H.set(p, a, b, cross_difference(u, p, a, b));
        }
    }
    return H;
}

ScalarField laplacian(const ScalarField& u) {
    const Grid& g = u.grid();
    ScalarField out(g);
    for (std::size_t p = 0; p < g.size(); ++p) {
        double s = 0.0;
        for (int a = 0; a < g.n(); ++a) s += second_difference(u, p, a);
        out[p] = s;
    }
    return out;
}

LocalDerivatives local_derivatives(const ScalarField& u, std::size_t p) {
    const Grid& g = u.grid();
    LocalDerivatives d;
    d.value = u[p];
    d.hess = SymMatrix(g.n());
    for (int a = 0; a < g.n(); ++a) {
        d.grad[static_cast<std::size_t>(a)] = first_difference(u, p, a);
        d.hess.set(a, a, second_difference(u, p, a));
        for (int b = a + 1; b < g.n(); ++b) d.hess.set(a, b, cross_difference(u, p, a, b));
    }
    return d;
}

ScalarField sample(const Expr& expr, const Grid& grid) {
    if (expr.n() != grid.n()) {
        throw DomainError("expression dimension " + std::to_string(expr.n()) + " does not match grid dimension " +
                          std::to_string(grid.n()));
    }
    ScalarField f(grid);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto x = grid.coordinates(p);
        try {
            f[p] = expr.eval(std::span<const double>(x.data(), static_cast<std::size_t>(grid.n())));
        } catch (const EvalError& e) {
            const auto idx = grid.unflatten(p);
            std::string where = "(";
            for (int a = 0; a < grid.n(); ++a) {
                if (a) where += ",";
                where += std::to_string(idx[static_cast<std::size_t>(a)]);
            }
            where += ")";
            throw EvalError(std::string(e.what()) + " at grid index " + where, e.node());
        }
    }
    return f;
}

void write_field(std::ostream& os, const ScalarField& f, const std::string& name) {
    os << "field n=" << f.grid().n() << " N=" << f.grid().points_per_axis() << " name=" << name << '\n';
    char buf[40];
    for (double v : f.data()) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << '\n';
    }
}

ScalarField read_field(std::istream& is, std::string* name) {
    std::string header;
    if (!std::getline(is, header)) throw IoError("field dump: missing header");
    int n = 0, N = 0;
    char namebuf[256] = {0};
    if (std::sscanf(header.c_str(), "field n=%d N=%d name=%255s", &n, &N, namebuf) < 2) {
        throw IoError("field dump: malformed header '" + header + "'");
    }
    Grid grid(n, N);
    std::vector<double> data;
    data.reserve(grid.size());
    std::string line;
    while (data.size() < grid.size() && std::getline(is, line)) {
        std::istringstream ls(line);
        double v = 0.0;
        if (!(ls >> v)) throw IoError("field dump: bad value '" + line + "'");
        data.push_back(v);
    }
    if (data.size() != grid.size()) throw IoError("field dump: truncated data");
    if (name) *name = namebuf;
    return ScalarField(grid, std::move(data));
}

}  // namespace sigmak
