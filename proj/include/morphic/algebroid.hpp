#pragma once

// Lie algebroids over a single chart in a fixed trivializing frame {e_alpha}.
//
// A section is a vector of k component expressions a^alpha(x). The bracket is
//   [a, b]^g = a^a b^b C^g_ab + rho(a)(b^g) - rho(b)(a^g).
//
// The tangent algebroid TA -> TM lives on the tangent chart (x, xdot) with
// frame {Te_1..Te_k, ê_1..ê_k}; a section of TA is a vector of 2k components
// in that frame.

#include <vector>

#include "morphic/chart.hpp"
#include "morphic/expr.hpp"
#include "morphic/geometry.hpp"
#include "morphic/linalg.hpp"
#include "morphic/report.hpp"

namespace morphic {

using Section = std::vector<Expr>;

/// C[gamma][alpha][beta].
using StructureTensor = std::vector<linalg::ExprMatrix>;

class LieAlgebroid {
public:
    /// anchor is n x k with rho(e_alpha) = anchor[i][alpha] d_i. Throws
    /// std::invalid_argument on shape errors or when C is not antisymmetric
    /// in its lower indices.
    LieAlgebroid(ChartPtr chart, std::size_t rank, linalg::ExprMatrix anchor, StructureTensor structure);

    /// Rank-k algebroid with zero anchor and zero bracket.
    static LieAlgebroid zero(ChartPtr chart, std::size_t rank);
    /// A = TM: identity anchor, vanishing structure functions.
    static LieAlgebroid tangent_bundle(ChartPtr chart);

    const ChartPtr& chart() const { return chart_; }
    std::size_t dimension() const { return chart_->dimension(); }
    std::size_t rank() const { return rank_; }
    const linalg::ExprMatrix& anchor() const { return anchor_; }
    const Expr& anchor(std::size_t i, std::size_t alpha) const { return anchor_.at(i).at(alpha); }
    const StructureTensor& structure() const { return structure_; }
    const Expr& structure(std::size_t gamma, std::size_t alpha, std::size_t beta) const {
        return structure_.at(gamma).at(alpha).at(beta);
    }

    Section unit(std::size_t alpha) const;
    Section zero_section() const { return Section(rank_); }

private:
    ChartPtr chart_;
    std::size_t rank_;
    linalg::ExprMatrix anchor_;
    StructureTensor structure_;
};

Section bracket(const LieAlgebroid& a, const Section& x, const Section& y);
VectorField anchor_apply(const LieAlgebroid& a, const Section& x);

/// Antisymmetry, Jacobi on frame triples, Leibniz against every coordinate
/// function, and rho[e_a, e_b] = [rho e_a, rho e_b] on frame pairs.
Report check_axioms(const LieAlgebroid& a, const SampleSpec& spec);

/// The tangent algebroid TA -> TM on tangent_chart(base, velocity_box).
LieAlgebroid tangent_algebroid(const LieAlgebroid& a, Interval velocity_box = {-1.0, 1.0});

/// Ta = (a^alpha, xdot^j d_j a^alpha) in the frame {Te, ê}.
Section tangent_lift_linear(const LieAlgebroid& a, const Section& x);
/// â = (0, a^alpha).
Section tangent_lift_core(const LieAlgebroid& a, const Section& x);

/// Bracket on TA; the operands are sections of tangent_algebroid(a).
Section tangent_bracket(const LieAlgebroid& ta, const Section& u, const Section& v);

/// b^alpha(x) d_{a_alpha} on a total-space chart with the base coordinates first.
VectorField core_field(const ChartPtr& total, const LieAlgebroid& a, const Section& b);

/// Linear field X = xbar^i d_i - (D^alpha_beta a^beta) d_{a_alpha}, where the
/// table D describes D_X e_beta = D^alpha_beta e_alpha.
VectorField as_total_space_field(const ChartPtr& total, const LieAlgebroid& a, const VectorField& xbar,
                                 const linalg::ExprMatrix& d_table);

/// D_X a read off from [X, a^up] = (D_X a)^up. Throws NonLinearField when X
/// is not linear.
Section covariant_d(const LieAlgebroid& a, const VectorField& x_total, const Section& x);

}  // namespace morphic
