#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sigmak/fieldexpr.hpp"
#include "sigmak/symfunc.hpp"

namespace sigmak {

/// Uniform periodic grid on the n-torus [0, 2pi)^n with N points per axis.
/// Nodes are stored row-major: axis 0 varies slowest.
class Grid {
public:
    Grid() = default;
    Grid(int n, int points_per_axis);

    int n() const noexcept { return n_; }
    int points_per_axis() const noexcept { return N_; }
    double spacing() const noexcept { return h_; }
    std::size_t size() const noexcept { return size_; }
    std::size_t stride(int axis) const noexcept { return strides_[static_cast<std::size_t>(axis)]; }

    /// Multi-index of a flat node index.
    std::array<int, kMaxDim> unflatten(std::size_t node) const noexcept;
    std::size_t flatten(std::span<const int> index) const noexcept;
    /// Flat index of the node shifted by `offset` cells along `axis`, periodic.
    std::size_t neighbor(std::size_t node, int axis, int offset) const noexcept;
    /// Coordinates x_i = 2 pi index_i / N.
    std::array<double, kMaxDim> coordinates(std::size_t node) const noexcept;

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.n_ == b.n_ && a.N_ == b.N_; }

private:
    int n_ = 0;
    int N_ = 0;
    double h_ = 0.0;
    std::size_t size_ = 0;
    std::array<std::size_t, kMaxDim> strides_{};
};

class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const Grid& grid, double value = 0.0)
        : grid_(grid), data_(grid.size(), value) {}
    ScalarField(const Grid& grid, std::vector<double> data);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return data_.size(); }
    double operator[](std::size_t i) const noexcept { return data_[i]; }
    double& operator[](std::size_t i) noexcept { return data_[i]; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    double max_abs() const noexcept;
    double min() const noexcept;
    double max() const noexcept;

    friend bool operator==(const ScalarField&, const ScalarField&) = default;

private:
    Grid grid_;
    std::vector<double> data_;
};

/// Symmetric n x n tensor per node, upper triangle packed in the order
/// (1,1),(1,2),...,(1,n),(2,2),...,(n,n).
class SymmetricTensorField {
public:
    SymmetricTensorField() = default;
    explicit SymmetricTensorField(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    int components() const noexcept { return comps_; }
    static int packed_index(int n, int i, int j) noexcept;

    double get(std::size_t node, int i, int j) const noexcept {
        return data_[node * static_cast<std::size_t>(comps_) + static_cast<std::size_t>(packed_index(grid_.n(), i, j))];
    }
    void set(std::size_t node, int i, int j, double v) noexcept {
        data_[node * static_cast<std::size_t>(comps_) + static_cast<std::size_t>(packed_index(grid_.n(), i, j))] = v;
    }

    SymMatrix at(std::size_t node) const;
    void store(std::size_t node, const SymMatrix& m);
    ScalarField trace() const;
    ScalarField component(int i, int j) const;

    std::span<const double> data() const noexcept { return data_; }

private:
    Grid grid_;
    int comps_ = 0;
    std::vector<double> data_;
};

/// Central differences (u_{i+1} - u_{i-1}) / 2h per axis.
std::vector<ScalarField> grad(const ScalarField& u);

/// Diagonal (u_{i+1} - 2u_i + u_{i-1}) / h^2; off-diagonal four-point cross / 4h^2.
SymmetricTensorField hess(const ScalarField& u);

/// Sum of the diagonal second differences, in axis order. Bitwise equal to
/// hess(u).trace().
ScalarField laplacian(const ScalarField& u);

/// Pointwise evaluation of `expr` at the grid nodes. EvalError messages are
/// extended with the failing grid index.
ScalarField sample(const Expr& expr, const Grid& grid);

/// Per-node stencil values for a single node; used by pointwise assemblers
/// that must not allocate whole derivative fields.
struct LocalDerivatives {
    double value = 0.0;
    std::array<double, kMaxDim> grad{};
    SymMatrix hess;
};
LocalDerivatives local_derivatives(const ScalarField& u, std::size_t node);

/// Text dump: header `field n=<n> N=<N> name=<name>` then one value per line
/// with 17 significant digits.
void write_field(std::ostream& os, const ScalarField& f, const std::string& name);
ScalarField read_field(std::istream& is, std::string* name = nullptr);

}  // namespace sigmak
