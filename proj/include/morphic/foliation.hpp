#pragma once

// Subbundles given by frames: membership and rank oracles, involutivity,
// the Bott connection, and the adapted-chart convention F_M = span{d_1..d_l}.
//
// Membership is decided at sampled points by least squares. When every frame
// member is an exact constant vector the test is done once, exactly, with the
// rational orthogonal projector onto the span.

#include <optional>
#include <stdexcept>
#include <vector>

#include "morphic/chart.hpp"
#include "morphic/expr.hpp"
#include "morphic/geometry.hpp"
#include "morphic/linalg.hpp"
#include "morphic/report.hpp"

namespace morphic {

/// A frame member turned out to be dependent on the others somewhere.
class FrameRankError : public std::runtime_error {
public:
    FrameRankError(const std::string& message, std::vector<double> witness = {})
        : std::runtime_error(message), witness_(std::move(witness)) {}
    const std::vector<double>& witness() const { return witness_; }

private:
    std::vector<double> witness_;
};

/// Ordered spanning list of vectors with `ambient` components over a chart:
/// vector fields (ambient = chart dimension) or algebroid sections
/// (ambient = rank).
class Frame {
public:
    Frame(ChartPtr chart, std::size_t ambient, std::vector<std::vector<Expr>> members);
    static Frame of_fields(ChartPtr chart, const std::vector<VectorField>& fields);
    /// {d_1, ..., d_l} on the chart.
    static Frame coordinate(ChartPtr chart, std::size_t l);

    const ChartPtr& chart() const { return chart_; }
    std::size_t ambient() const { return ambient_; }
    std::size_t rank() const { return members_.size(); }
    const std::vector<std::vector<Expr>>& members() const { return members_; }
    const std::vector<Expr>& member(std::size_t i) const { return members_.at(i); }

    /// This frame followed by the members of `other`.
    Frame concat(const Frame& other) const;
    /// Members as exact rationals when all are constant.
    const std::optional<linalg::RationalMatrix>& constant_members() const { return constant_; }

    std::vector<std::vector<double>> evaluate(std::span<const double> point) const;

private:
    ChartPtr chart_;
    std::size_t ambient_;
    std::vector<std::vector<Expr>> members_;
    std::optional<linalg::RationalMatrix> constant_;
};

/// Residual of projecting v onto span(F). Throws FrameRankError when F is
/// rank deficient at a sample point.
ZeroVerdict membership(std::span<const Expr> v, const Frame& f, const SampleSpec& spec);

/// Pointwise linear independence of the members (SymbolicZero for constant
/// frames, otherwise NonZero with a witness where the rank drops).
ZeroVerdict independence(const Frame& f, const SampleSpec& spec);

/// Expansion over a square frame: symbolic inverse of the member matrix.
class Expansion {
public:
    /// Throws FrameRankError when the determinant simplifies to zero.
    explicit Expansion(const Frame& basis);
    std::vector<Expr> coefficients(std::span<const Expr> v) const;
    const Frame& basis() const { return basis_; }

private:
    Frame basis_;
    linalg::ExprMatrix inverse_;
};

/// Frobenius test on a frame of vector fields: all pairwise brackets stay in
/// the span. One entry per pair, labelled "(i, j)" with 1-based indices.
Report involutive(const Frame& f, const SampleSpec& spec);

/// Q-coefficients of the class of [F_i, Y] modulo F, for every member F_i.
/// F and Q together must frame the tangent space. Result indexed [i][beta].
std::vector<std::vector<Expr>> bott(const Frame& f, const VectorField& y, const Frame& q);

/// Checks that span(F_M) = span{d_1, ..., d_l} pointwise and that F_M is
/// involutive.
Report adapted_chart_check(const Frame& fm, std::size_t l, const SampleSpec& spec);

}  // namespace morphic
