#include "morphic/sampling.hpp"

#include <cmath>

namespace morphic {

namespace {
constexpr int kMaxResamples = 20;
}

double Sampler::uniform(double lo, double hi) {
    double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
}

std::vector<double> Sampler::next() {
    std::vector<double> p(chart_.dimension());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = uniform(chart_.interval(i).lo, chart_.interval(i).hi);
    return p;
}

ZeroVerdict sample_max(const Chart& chart, const SampleSpec& spec, const PointResidual& residual) {
    Sampler sampler(chart, spec.seed);
    ZeroVerdict v;
    v.tier = Tier::NumericZero;
    double worst = -1.0;
    std::vector<double> worst_point;
    for (std::size_t s = 0; s < spec.samples; ++s) {
        for (int attempt = 0;; ++attempt) {
            std::vector<double> p = sampler.next();
            try {
                double r = residual(p);
                if (!std::isfinite(r)) throw EvalError("non-finite residual");
                if (r > worst) {
                    worst = r;
                    worst_point = p;
                }
                break;
            } catch (const EvalError& err) {
                if (attempt + 1 >= kMaxResamples)
                    throw SamplingError(std::string("evaluation singular at every resampled point: ") +
                                        err.what());
            }
        }
    }
    v.max_residual = std::max(worst, 0.0);
    if (v.max_residual > spec.tol) {
        v.tier = Tier::NonZero;
        v.witness = worst_point;
    }
    return v;
}

std::vector<double> eval_all(std::span<const Expr> components, std::span<const double> point) {
    std::vector<double> out;
    out.reserve(components.size());
    for (const auto& c : components) out.push_back(eval(c, point));
    return out;
}

ZeroVerdict is_zero(std::span<const Expr> components, const Chart& chart, const SampleSpec& spec) {
    std::vector<Expr> residual;
    for (const auto& c : components) {
        Expr s = simplify(c);
        if (!s.is_zero_literal()) residual.push_back(std::move(s));
    }
    if (residual.empty()) return ZeroVerdict{};
    return sample_max(chart, spec, [&residual](std::span<const double> p) {
        double m = 0.0;
        for (const auto& r : residual) m = std::max(m, std::fabs(eval(r, p)));
        return m;
    });
}

ZeroVerdict is_zero(const Expr& e, const Chart& chart, const SampleSpec& spec) {
    return is_zero(std::span<const Expr>(&e, 1), chart, spec);
}

ZeroVerdict is_equal(std::span<const Expr> a, std::span<const Expr> b, const Chart& chart,
                     const SampleSpec& spec) {
    if (a.size() != b.size()) throw std::invalid_argument("is_equal: length mismatch");
    std::vector<Expr> d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
    return is_zero(d, chart, spec);
}

}  // namespace morphic
