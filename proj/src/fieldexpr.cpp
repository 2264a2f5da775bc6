#include "sigmak/fieldexpr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <utility>

namespace sigmak {

namespace {

using Node = Expr::Node;
using NodePtr = Expr::NodePtr;

NodePtr make_const(double v) {
    return std::make_shared<const Node>(Node{Expr::Kind::Constant, v, 0, Expr::Func::Sin, 0, nullptr, nullptr});
}

NodePtr make_var(int i) {
    return std::make_shared<const Node>(Node{Expr::Kind::Variable, 0.0, i, Expr::Func::Sin, 0, nullptr, nullptr});
}

NodePtr make_neg(NodePtr a) {
    return std::make_shared<const Node>(Node{Expr::Kind::Negate, 0.0, 0, Expr::Func::Sin, 0, std::move(a), nullptr});
}

NodePtr make_func(Expr::Func f, NodePtr a) {
    return std::make_shared<const Node>(Node{Expr::Kind::Function, 0.0, 0, f, 0, std::move(a), nullptr});
}

NodePtr make_bin(char op, NodePtr a, NodePtr b) {
    return std::make_shared<const Node>(Node{Expr::Kind::Binary, 0.0, 0, Expr::Func::Sin, op, std::move(a), std::move(b)});
}

const char* func_name(Expr::Func f) {
    switch (f) {
        case Expr::Func::Sin: return "sin";
        case Expr::Func::Cos: return "cos";
        case Expr::Func::Exp: return "exp";
        case Expr::Func::Log: return "log";
        case Expr::Func::Abs: return "abs";
        case Expr::Func::Sqrt: return "sqrt";
    }
    return "?";
}

class Parser {
public:
    Parser(std::string_view src, int n) : src_(src), n_(n) {}

    NodePtr parse() {
        skip_ws();
        if (pos_ == src_.size()) throw ParseError("empty expression", pos_);
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) throw ParseError("unexpected '" + std::string(1, src_[pos_]) + "'", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= src_.size()) throw ParseError(std::string("expected '") + c + "', found end of input", pos_);
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) lhs = make_bin('+', lhs, term());
            else if (accept('-')) lhs = make_bin('-', lhs, term());
            else return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) lhs = make_bin('*', lhs, unary());
            else if (accept('/')) lhs = make_bin('/', lhs, unary());
            else return lhs;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make_neg(unary());
        if (accept('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) return make_bin('^', base, unary());
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
        throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
    }

    NodePtr number() {
        double v = 0.0;
        const char* first = src_.data() + pos_;
        const char* last = src_.data() + src_.size();
        auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::general);
        if (ec != std::errc() || ptr == first) throw ParseError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(ptr - first);
        return make_const(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view id = src_.substr(start, pos_ - start);

        if (id.size() >= 2 && id[0] == 'x') {
            int idx = 0;
            auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), idx);
            if (ec == std::errc() && ptr == id.data() + id.size()) {
                if (idx < 1 || idx > n_) {
                    throw ParseError("variable " + std::string(id) + " outside x1..x" + std::to_string(n_), start);
                }
                return make_var(idx - 1);
            }
        }
        if (id == "pi") return make_const(std::numbers::pi);

        static constexpr std::pair<std::string_view, Expr::Func> funcs[] = {
            {"sin", Expr::Func::Sin}, {"cos", Expr::Func::Cos}, {"exp", Expr::Func::Exp},
            {"log", Expr::Func::Log}, {"abs", Expr::Func::Abs}, {"sqrt", Expr::Func::Sqrt},
        };
        for (const auto& [name, f] : funcs) {
            if (id == name) {
                expect('(');
                NodePtr arg = expr();
                expect(')');
                return make_func(f, arg);
            }
        }
        throw ParseError("unknown identifier '" + std::string(id) + "'", start);
    }

    std::string_view src_;
    int n_;
    std::size_t pos_ = 0;
};

double eval_node(const NodePtr& node, std::span<const double> x) {
    double r = 0.0;
    switch (node->kind) {
        case Expr::Kind::Constant: return node->value;
        case Expr::Kind::Variable: return x[static_cast<std::size_t>(node->var)];
        case Expr::Kind::Negate: return -eval_node(node->lhs, x);
        case Expr::Kind::Function: {
            const double a = eval_node(node->lhs, x);
            switch (node->func) {
                case Expr::Func::Sin: r = std::sin(a); break;
                case Expr::Func::Cos: r = std::cos(a); break;
                case Expr::Func::Exp: r = std::exp(a); break;
                case Expr::Func::Log:
                    if (!(a > 0.0)) throw EvalError("log of nonpositive argument", to_string(node));
                    r = std::log(a);
                    break;
                case Expr::Func::Abs: r = std::fabs(a); break;
                case Expr::Func::Sqrt:
                    if (a < 0.0) throw EvalError("sqrt of negative argument", to_string(node));
                    r = std::sqrt(a);
                    break;
            }
            break;
        }
        case Expr::Kind::Binary: {
            const double a = eval_node(node->lhs, x);
            const double b = eval_node(node->rhs, x);
            switch (node->op) {
                case '+': r = a + b; break;
                case '-': r = a - b; break;
                case '*': r = a * b; break;
                case '/':
                    if (b == 0.0) throw EvalError("division by zero", to_string(node));
                    r = a / b;
                    break;
                case '^':
                    if (a < 0.0 && std::trunc(b) != b) {
                        throw EvalError("negative base with non-integer exponent", to_string(node));
                    }
                    r = std::pow(a, b);
                    break;
                default: throw EvalError("unknown operator", to_string(node));
            }
            break;
        }
    }
    if (!std::isfinite(r)) throw EvalError("non-finite result", to_string(node));
    return r;
}

}  // namespace

std::string to_string(const Expr::NodePtr& node) {
    switch (node->kind) {
        case Expr::Kind::Constant: {
            char buf[40];
            if (std::signbit(node->value)) {
                std::snprintf(buf, sizeof buf, "(-%.17g)", -node->value);
            } else {
                std::snprintf(buf, sizeof buf, "%.17g", node->value);
            }
            return buf;
        }
        case Expr::Kind::Variable: return "x" + std::to_string(node->var + 1);
        case Expr::Kind::Negate: return "(-" + to_string(node->lhs) + ")";
        case Expr::Kind::Function: return std::string(func_name(node->func)) + "(" + to_string(node->lhs) + ")";
        case Expr::Kind::Binary:
            return "(" + to_string(node->lhs) + " " + node->op + " " + to_string(node->rhs) + ")";
    }
    return {};
}

Expr Expr::parse(std::string_view src, int n) { return Expr(Parser(src, n).parse(), n); }

Expr Expr::constant(double v, int n) { return Expr(make_const(v), n); }

double Expr::eval(std::span<const double> point) const {
    if (static_cast<int>(point.size()) != n_) {
        throw EvalError("point has " + std::to_string(point.size()) + " coordinates, expected " + std::to_string(n_),
                        to_string());
    }
    return eval_node(root_, point);
}

std::string Expr::to_string() const { return root_ ? sigmak::to_string(root_) : std::string(); }

}  // namespace sigmak
