#pragma once

// Symbolic scalar expressions over the coordinates of a chart.
//
// An Expr is an immutable, shareable AST. Coordinates are referenced by index,
// so the same Expr is valid on any chart whose leading coordinates agree
// (base expressions are reused verbatim on total-space and tangent charts).
//
// Constants are exact rationals when possible and fall back to doubles on
// overflow or when a float literal cannot be represented exactly.

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "morphic/chart.hpp"
#include "morphic/rational.hpp"

namespace morphic {

class Number {
public:
    Number() : exact_(Rational(0)), value_(0.0) {}
    Number(Rational q) : exact_(q), value_(q.to_double()) {}
    Number(std::int64_t v) : Number(Rational(v)) {}
    static Number real(double v);

    bool is_exact() const { return exact_.has_value(); }
    const std::optional<Rational>& exact() const { return exact_; }
    double value() const { return value_; }

    bool is_zero() const { return exact_ ? exact_->is_zero() : value_ == 0.0; }
    bool is_one() const { return exact_ ? exact_->is_one() : value_ == 1.0; }
    bool is_negative() const { return value_ < 0.0; }
    std::optional<int> as_int() const;

    friend Number operator+(const Number& a, const Number& b);
    friend Number operator*(const Number& a, const Number& b);
    friend Number operator-(const Number& a);
    friend Number operator-(const Number& a, const Number& b) { return a + (-b); }
    /// Throws std::domain_error on division by an exact zero.
    friend Number operator/(const Number& a, const Number& b);
    Number pow(int exponent) const;

    friend bool operator==(const Number& a, const Number& b);

    std::string to_string() const;

private:
    std::optional<Rational> exact_;
    double value_;
};

/// A function known only through samples (for instance a grid of parallel
/// transports). Derivatives are requested by multi-index.
class TabulatedFunction {
public:
    virtual ~TabulatedFunction() = default;
    virtual std::size_t arity() const = 0;
    virtual std::size_t components() const = 0;
    virtual double evaluate(std::size_t component, std::span<const double> x,
                            std::span<const int> orders) const = 0;
    /// Stable identifier used in printed form and canonical ordering.
    virtual std::string label() const = 0;
};

enum class ExprKind { Constant, Variable, Add, Mul, Neg, Div, Pow, Sin, Cos, Exp, Tabulated };

struct ExprNode;

class Expr {
public:
    Expr();  // literal 0
    Expr(std::int64_t v);
    Expr(int v) : Expr(static_cast<std::int64_t>(v)) {}
    Expr(Rational q);
    Expr(Number n);

    static Expr real(double v) { return Expr(Number::real(v)); }
    static Expr var(std::size_t index);

    ExprKind kind() const;
    const Number& number() const;  // Constant only
    std::size_t var_index() const; // Variable only
    int exponent() const;          // Pow only
    std::span<const Expr> args() const;

    // Tabulated only.
    const std::shared_ptr<const TabulatedFunction>& table() const;
    std::size_t component() const;
    std::span<const int> orders() const;

    bool is_constant() const { return kind() == ExprKind::Constant; }
    bool is_zero_literal() const;
    bool is_one_literal() const;

    bool same_node(const Expr& other) const { return node_ == other.node_; }

private:
    friend Expr make_node(ExprNode node);
    explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
    std::shared_ptr<const ExprNode> node_;
};

// Smart constructors fold constants and absorb 0 and 1; they never reorder.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr sum(std::span<const Expr> terms);
Expr tabulated(std::shared_ptr<const TabulatedFunction> table, std::size_t component,
               std::vector<int> orders, std::vector<Expr> args);

inline Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
inline Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
inline Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }

/// Evaluation failure: vanishing denominator or a non-finite value.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t offset, std::string identifier = {});
    std::size_t offset() const { return offset_; }
    /// Non-empty when the failure is an unknown identifier.
    const std::string& identifier() const { return identifier_; }

private:
    std::size_t offset_;
    std::string identifier_;
};

/// Exact partial derivative with respect to coordinate `coord`.
Expr diff(const Expr& e, std::size_t coord);

double eval(const Expr& e, std::span<const double> point);

/// Canonical form: expanded sum of monomials over sorted atoms with collected
/// like terms and merged integer powers. No trigonometric identities.
Expr simplify(const Expr& e);

/// Replace coordinate i by replacement[i].
Expr substitute(const Expr& e, std::span<const Expr> replacement);

bool depends_on(const Expr& e, std::size_t coord);
std::size_t max_variable(const Expr& e);  // one past the largest index referenced, 0 if none

/// Value of `e` when it simplifies to a constant.
std::optional<Number> constant_value(const Expr& e);

/// Canonical infix with explicit parentheses; re-parses to the same value.
std::string print(const Expr& e, const Chart& chart);
/// Chart-free structural form (coordinates as #i); used for ordering.
std::string structural_key(const Expr& e);

Expr parse(std::string_view text, const Chart& chart);

}  // namespace morphic
