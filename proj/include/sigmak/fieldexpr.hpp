#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "sigmak/errors.hpp"

namespace sigmak {

/// Closed-form scalar expression in the coordinates x1..xn.
///
/// Grammar, loosest to tightest binding:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | '+' unary | power
///   power   := primary ('^' unary)?          (right associative)
///   primary := number | 'pi' | x<i> | func '(' expr ')' | '(' expr ')'
///   func    := sin | cos | exp | log | abs | sqrt
///
/// Nodes are immutable once parsed; copies of an Expr share the tree.
class Expr {
public:
    enum class Kind { Constant, Variable, Negate, Function, Binary };
    enum class Func { Sin, Cos, Exp, Log, Abs, Sqrt };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        Kind kind;
        double value = 0.0;  // Constant
        int var = 0;         // Variable, zero based
        Func func = Func::Sin;
        char op = 0;         // Binary: + - * / ^
        NodePtr lhs;         // also the operand of Negate / Function
        NodePtr rhs;
    };

    Expr() = default;
    Expr(NodePtr root, int n) : root_(std::move(root)), n_(n) {}

    /// Parse `src` for an n-dimensional point. Throws ParseError.
    static Expr parse(std::string_view src, int n);
    static Expr constant(double v, int n);

    /// IEEE double evaluation. Throws EvalError on log/sqrt of an invalid
    /// argument, division by zero, negative base with non-integer exponent,
    /// or a non-finite result.
    double eval(std::span<const double> point) const;

    /// Canonical text form; parse(to_string()) reproduces the same tree.
    std::string to_string() const;

    int n() const noexcept { return n_; }
    const NodePtr& root() const noexcept { return root_; }
    bool empty() const noexcept { return !root_; }

private:
    NodePtr root_;
    int n_ = 0;
};

std::string to_string(const Expr::NodePtr& node);

}  // namespace sigmak
