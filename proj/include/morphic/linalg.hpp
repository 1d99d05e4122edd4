#pragma once

#include <optional>
#include <span>
#include <vector>

#include "morphic/expr.hpp"
#include "morphic/rational.hpp"

namespace morphic::linalg {

/// Row-major matrix of expressions.
using ExprMatrix = std::vector<std::vector<Expr>>;
using RationalMatrix = std::vector<std::vector<Rational>>;

// ---- numeric, pointwise ----

struct LeastSquares {
    std::vector<double> coeffs;
    double residual = 0.0;  // Euclidean norm of columns*coeffs - rhs
    std::size_t rank = 0;
    bool full_rank = true;
};

/// Solves min |C x - rhs| where `columns` holds the columns of C.
LeastSquares least_squares(const std::vector<std::vector<double>>& columns, std::span<const double> rhs);

/// Numerical rank of the matrix whose columns are given (relative cutoff 1e-10).
std::size_t numeric_rank(const std::vector<std::vector<double>>& columns);

// ---- exact rational ----

/// Entries as exact rationals when every entry simplifies to an exact constant.
std::optional<RationalMatrix> as_rational(const ExprMatrix& m);

/// Gauss-Jordan inverse; nullopt when singular or on overflow.
std::optional<RationalMatrix> inverse(const RationalMatrix& m);

// ---- symbolic ----

Expr determinant(const ExprMatrix& m);

/// Adjugate over determinant, simplified. nullopt when the determinant
/// simplifies to literal zero.
std::optional<ExprMatrix> inverse(const ExprMatrix& m);

std::vector<Expr> multiply(const ExprMatrix& m, std::span<const Expr> v);
ExprMatrix multiply(const ExprMatrix& a, const ExprMatrix& b);
ExprMatrix transpose(const ExprMatrix& m);
ExprMatrix from_columns(const std::vector<std::vector<Expr>>& columns);
ExprMatrix identity(std::size_t n);

}  // namespace morphic::linalg
