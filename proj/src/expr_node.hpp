#pragma once

#include "morphic/expr.hpp"

namespace morphic {

struct ExprNode {
    ExprKind kind = ExprKind::Constant;
    Number number;
    std::size_t index = 0;
    int exponent = 0;
    std::vector<Expr> args;
    std::shared_ptr<const TabulatedFunction> table;
    std::size_t component = 0;
    std::vector<int> orders;
};

/// Builds a node verbatim, without folding.
Expr make_node(ExprNode node);

}  // namespace morphic
