#pragma once

// Vector fields, one- and two-forms on a chart, Cartan calculus, and
// fixed-step RK4 flows.
//
// Sign convention for the interior product: (i_X w)_j = X^i w_{ij}, so
// i_{d1}(dx1 ^ dx2) = dx2.

#include <stdexcept>
#include <vector>

#include "morphic/chart.hpp"
#include "morphic/expr.hpp"
#include "morphic/linalg.hpp"
#include "morphic/report.hpp"

namespace morphic {

class Frame;

class ChartMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class VectorField {
public:
    VectorField(ChartPtr chart, std::vector<Expr> components);
    static VectorField zero(ChartPtr chart);
    static VectorField coordinate(ChartPtr chart, std::size_t i);

    const ChartPtr& chart() const { return chart_; }
    std::size_t dimension() const { return components_.size(); }
    const std::vector<Expr>& components() const { return components_; }
    const Expr& operator[](std::size_t i) const { return components_.at(i); }

private:
    ChartPtr chart_;
    std::vector<Expr> components_;
};

class OneForm {
public:
    OneForm(ChartPtr chart, std::vector<Expr> components);
    static OneForm zero(ChartPtr chart);

    const ChartPtr& chart() const { return chart_; }
    const std::vector<Expr>& components() const { return components_; }
    const Expr& operator[](std::size_t i) const { return components_.at(i); }

private:
    ChartPtr chart_;
    std::vector<Expr> components_;
};

/// Antisymmetric matrix w_{ij}; antisymmetry is checked symbolically on construction.
class TwoForm {
public:
    TwoForm(ChartPtr chart, linalg::ExprMatrix entries);

    const ChartPtr& chart() const { return chart_; }
    const linalg::ExprMatrix& entries() const { return entries_; }
    const Expr& operator()(std::size_t i, std::size_t j) const { return entries_.at(i).at(j); }

private:
    ChartPtr chart_;
    linalg::ExprMatrix entries_;
};

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& f, const VectorField& x);
OneForm operator+(const OneForm& a, const OneForm& b);
OneForm operator-(const OneForm& a, const OneForm& b);
OneForm operator*(const Expr& f, const OneForm& x);

/// X(f) = X^i d_i f.
Expr apply(const VectorField& x, const Expr& f);
VectorField lie_bracket(const VectorField& x, const VectorField& y);
VectorField simplify(const VectorField& x);

/// xi(X) = xi_i X^i.
Expr pairing(const OneForm& xi, const VectorField& x);
OneForm d0(const ChartPtr& chart, const Expr& f);
TwoForm d1(const OneForm& xi);
OneForm interior(const VectorField& x, const TwoForm& w);
/// Coordinate formula (L_X xi)_j = X^i d_i xi_j + xi_i d_j X^i.
OneForm lie_derivative_oneform(const VectorField& x, const OneForm& xi);

class FlowError : public std::runtime_error {
public:
    FlowError(const std::string& message, std::size_t step) : std::runtime_error(message), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

constexpr std::size_t kStepsPerUnitTime = 1000;

/// Classical RK4 with fixed step t/steps. steps == 0 picks
/// ceil(|t| * kStepsPerUnitTime). Throws FlowError when the trajectory leaves
/// the chart box.
std::vector<double> flow(const VectorField& x, std::span<const double> p, double t, std::size_t steps = 0);

/// Same integration, returning the states at each of the increasing `times`.
std::vector<std::vector<double>> flow_samples(const VectorField& x, std::span<const double> p,
                                              std::span<const double> times);

class NonLinearField : public std::invalid_argument {
public:
    NonLinearField(const std::string& message, std::size_t component)
        : std::invalid_argument(message), component_(component) {}
    std::size_t component() const { return component_; }

private:
    std::size_t component_;
};

/// A field on the total space (x, a) of a rank-k bundle written as
/// X = base^i(x) d_{x_i} + (offset^alpha(x) + L^alpha_beta(x) a^beta) d_{a_alpha}.
struct LinearField {
    std::vector<Expr> base;
    std::vector<Expr> offset;
    linalg::ExprMatrix matrix;  // L
};

/// Recognizes linear (fiber-affine) fields: base components must not depend
/// on fiber coordinates and fiber components must have vanishing second
/// fiber derivatives, both symbolically. Throws NonLinearField naming the
/// offending component.
LinearField decompose_linear(const VectorField& x_total, std::size_t base_dim);

/// D_X b = X(b) - L b for a linear field X and a section b of the bundle.
std::vector<Expr> covariant_d(const LinearField& x, std::span<const Expr> b);

/// (a) D_X b in span(B) for every member b; (b) flowing b(m) by the linear
/// flow stays in B over the flowed base point, at t in {0.1, 0.5, 1}.
/// B is a frame of sections over the base chart. Fiber coordinates of the
/// total-space chart are not box-limited during the flow.
Report flow_invariance_check(const VectorField& x_total, const Frame& b, const SampleSpec& spec);

}  // namespace morphic
