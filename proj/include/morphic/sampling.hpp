#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "morphic/chart.hpp"
#include "morphic/expr.hpp"
#include "morphic/report.hpp"

namespace morphic {

/// Singular evaluation persisted through every resampling attempt.
class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Deterministic uniform points in a chart box.
class Sampler {
public:
    Sampler(const Chart& chart, std::uint64_t seed) : chart_(chart), rng_(seed) {}

    std::vector<double> next();
    double uniform(double lo, double hi);

private:
    const Chart& chart_;
    std::mt19937_64 rng_;
};

/// Residual of a pointwise condition; may throw EvalError at singular points.
using PointResidual = std::function<double(std::span<const double>)>;

/// Evaluates `residual` at spec.samples points, resampling singular points a
/// bounded number of times. Tier is NumericZero when every residual <= tol.
ZeroVerdict sample_max(const Chart& chart, const SampleSpec& spec, const PointResidual& residual);

/// Zero test: SymbolicZero when simplify yields literal 0, otherwise sampled.
ZeroVerdict is_zero(const Expr& e, const Chart& chart, const SampleSpec& spec);
/// Componentwise zero test of a vector; the residual is the max-abs component.
ZeroVerdict is_zero(std::span<const Expr> components, const Chart& chart, const SampleSpec& spec);

/// Same test for a - b.
ZeroVerdict is_equal(std::span<const Expr> a, std::span<const Expr> b, const Chart& chart,
                     const SampleSpec& spec);

std::vector<double> eval_all(std::span<const Expr> components, std::span<const double> point);

}  // namespace morphic
