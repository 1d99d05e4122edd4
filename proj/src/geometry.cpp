#include "morphic/geometry.hpp"

#include <cmath>

#include "morphic/foliation.hpp"
#include "morphic/sampling.hpp"

namespace morphic {

namespace {

void same_chart(const ChartPtr& a, const ChartPtr& b) {
    if (a != b && !a->compatible(*b)) throw ChartMismatch("operands live on different charts");
}

std::vector<Expr> zeros(std::size_t n) { return std::vector<Expr>(n); }

}  // namespace

VectorField::VectorField(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (components_.size() != chart_->dimension())
        throw std::invalid_argument("vector field needs one component per coordinate");
}

VectorField VectorField::zero(ChartPtr chart) {
    auto n = chart->dimension();
    return VectorField(std::move(chart), zeros(n));
}

VectorField VectorField::coordinate(ChartPtr chart, std::size_t i) {
    auto c = zeros(chart->dimension());
    c.at(i) = Expr(1);
    return VectorField(std::move(chart), std::move(c));
}

OneForm::OneForm(ChartPtr chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (components_.size() != chart_->dimension())
        throw std::invalid_argument("one-form needs one component per coordinate");
}

OneForm OneForm::zero(ChartPtr chart) {
    auto n = chart->dimension();
    return OneForm(std::move(chart), zeros(n));
}

TwoForm::TwoForm(ChartPtr chart, linalg::ExprMatrix entries) : chart_(std::move(chart)), entries_(std::move(entries)) {
    const auto n = chart_->dimension();
    if (entries_.size() != n) throw std::invalid_argument("two-form needs an n x n matrix");
    for (const auto& row : entries_)
        if (row.size() != n) throw std::invalid_argument("two-form needs an n x n matrix");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            if (!simplify(entries_[i][j] + entries_[j][i]).is_zero_literal())
                throw std::invalid_argument("two-form is not antisymmetric");
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    same_chart(a.chart(), b.chart());
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.dimension(); ++i) c.push_back(a[i] + b[i]);
    return VectorField(a.chart(), std::move(c));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    same_chart(a.chart(), b.chart());
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.dimension(); ++i) c.push_back(a[i] - b[i]);
    return VectorField(a.chart(), std::move(c));
}

VectorField operator*(const Expr& f, const VectorField& x) {
    std::vector<Expr> c;
    for (const auto& e : x.components()) c.push_back(f * e);
    return VectorField(x.chart(), std::move(c));
}

OneForm operator+(const OneForm& a, const OneForm& b) {
    same_chart(a.chart(), b.chart());
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.components().size(); ++i) c.push_back(a[i] + b[i]);
    return OneForm(a.chart(), std::move(c));
}

OneForm operator-(const OneForm& a, const OneForm& b) {
    same_chart(a.chart(), b.chart());
    std::vector<Expr> c;
    for (std::size_t i = 0; i < a.components().size(); ++i) c.push_back(a[i] - b[i]);
    return OneForm(a.chart(), std::move(c));
}

OneForm operator*(const Expr& f, const OneForm& x) {
    std::vector<Expr> c;
    for (const auto& e : x.components()) c.push_back(f * e);
    return OneForm(x.chart(), std::move(c));
}

Expr apply(const VectorField& x, const Expr& f) {
    Expr out;
    for (std::size_t i = 0; i < x.dimension(); ++i)
        if (!x[i].is_zero_literal()) out += x[i] * diff(f, i);
    return out;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
    same_chart(x.chart(), y.chart());
    std::vector<Expr> c;
    for (std::size_t i = 0; i < x.dimension(); ++i) c.push_back(simplify(apply(x, y[i]) - apply(y, x[i])));
    return VectorField(x.chart(), std::move(c));
}

VectorField simplify(const VectorField& x) {
    std::vector<Expr> c;
    for (const auto& e : x.components()) c.push_back(simplify(e));
    return VectorField(x.chart(), std::move(c));
}

Expr pairing(const OneForm& xi, const VectorField& x) {
    same_chart(xi.chart(), x.chart());
    Expr out;
    for (std::size_t i = 0; i < x.dimension(); ++i) out += xi[i] * x[i];
    return out;
}

OneForm d0(const ChartPtr& chart, const Expr& f) {
    std::vector<Expr> c;
    for (std::size_t i = 0; i < chart->dimension(); ++i) c.push_back(simplify(diff(f, i)));
    return OneForm(chart, std::move(c));
}

TwoForm d1(const OneForm& xi) {
    const auto n = xi.chart()->dimension();
    linalg::ExprMatrix w(n, std::vector<Expr>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) w[i][j] = simplify(diff(xi[j], i) - diff(xi[i], j));
    return TwoForm(xi.chart(), std::move(w));
}

OneForm interior(const VectorField& x, const TwoForm& w) {
    same_chart(x.chart(), w.chart());
    const auto n = x.dimension();
    std::vector<Expr> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        Expr s;
        for (std::size_t i = 0; i < n; ++i) s += x[i] * w(i, j);
        c[j] = simplify(s);
    }
    return OneForm(x.chart(), std::move(c));
}

OneForm lie_derivative_oneform(const VectorField& x, const OneForm& xi) {
    same_chart(x.chart(), xi.chart());
    const auto n = x.dimension();
    std::vector<Expr> c(n);
    for (std::size_t j = 0; j < n; ++j) {
        Expr s = apply(x, xi[j]);
        for (std::size_t i = 0; i < n; ++i) s += xi[i] * diff(x[i], j);
        c[j] = simplify(s);
    }
    return OneForm(x.chart(), std::move(c));
}

namespace {

std::vector<double> rk4_step(const std::vector<Expr>& f, const std::vector<double>& y, double h) {
    const auto n = y.size();
    auto rhs = [&](const std::vector<double>& p) { return eval_all(f, p); };
    auto k1 = rhs(y);
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + 0.5 * h * k1[i];
    auto k2 = rhs(t);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + 0.5 * h * k2[i];
    auto k3 = rhs(t);
    for (std::size_t i = 0; i < n; ++i) t[i] = y[i] + h * k3[i];
    auto k4 = rhs(t);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    return out;
}

void check_inside(const Chart& chart, const std::vector<double>& y, std::size_t step) {
    // Slack absorbs roundoff when a trajectory ends exactly on the boundary.
    for (std::size_t i = 0; i < y.size(); ++i) {
        const Interval& iv = chart.interval(i);
        double slack = 1e-9 * iv.width();
        if (!(y[i] >= iv.lo - slack && y[i] <= iv.hi + slack))
            throw FlowError("trajectory left the chart box at step " + std::to_string(step), step);
    }
}

}  // namespace

std::vector<double> flow(const VectorField& x, std::span<const double> p, double t, std::size_t steps) {
    if (p.size() != x.dimension()) throw std::invalid_argument("flow: point has wrong dimension");
    std::vector<double> y(p.begin(), p.end());
    if (t == 0.0) return y;
    if (steps == 0) steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::fabs(t) * kStepsPerUnitTime)));
    const double h = t / static_cast<double>(steps);
    check_inside(*x.chart(), y, 0);
    for (std::size_t s = 1; s <= steps; ++s) {
        y = rk4_step(x.components(), y, h);
        check_inside(*x.chart(), y, s);
    }
    return y;
}

std::vector<std::vector<double>> flow_samples(const VectorField& x, std::span<const double> p,
                                              std::span<const double> times) {
    std::vector<std::vector<double>> out;
    std::vector<double> y(p.begin(), p.end());
    double now = 0.0;
    for (double t : times) {
        if (t < now) throw std::invalid_argument("flow_samples: times must increase");
        y = flow(x, y, t - now);
        now = t;
        out.push_back(y);
    }
    return out;
}

LinearField decompose_linear(const VectorField& x_total, std::size_t base_dim) {
    const auto total = x_total.dimension();
    if (base_dim > total) throw std::invalid_argument("decompose_linear: base larger than total space");
    const auto k = total - base_dim;
    LinearField out;
    std::vector<Expr> at_zero_fiber(total);
    for (std::size_t i = 0; i < base_dim; ++i) at_zero_fiber[i] = Expr::var(i);
    for (std::size_t i = 0; i < base_dim; ++i) {
        for (std::size_t a = base_dim; a < total; ++a)
            if (!simplify(diff(x_total[i], a)).is_zero_literal())
                throw NonLinearField("base component " + x_total.chart()->name(i) + " depends on fiber coordinate " +
                                         x_total.chart()->name(a),
                                     i);
        out.base.push_back(simplify(x_total[i]));
    }
    out.matrix.assign(k, std::vector<Expr>(k));
    for (std::size_t alpha = 0; alpha < k; ++alpha) {
        const Expr& c = x_total[base_dim + alpha];
        for (std::size_t beta = 0; beta < k; ++beta) {
            Expr first = diff(c, base_dim + beta);
            for (std::size_t gamma = 0; gamma < k; ++gamma)
                if (!simplify(diff(first, base_dim + gamma)).is_zero_literal())
                    throw NonLinearField("fiber component " + x_total.chart()->name(base_dim + alpha) +
                                             " is not affine in the fiber coordinates",
                                         base_dim + alpha);
            out.matrix[alpha][beta] = simplify(substitute(first, at_zero_fiber));
        }
        out.offset.push_back(simplify(substitute(c, at_zero_fiber)));
    }
    return out;
}

std::vector<Expr> covariant_d(const LinearField& x, std::span<const Expr> b) {
    const auto k = x.matrix.size();
    if (b.size() != k) throw std::invalid_argument("covariant_d: section has wrong rank");
    std::vector<Expr> out(k);
    for (std::size_t alpha = 0; alpha < k; ++alpha) {
        Expr s;
        for (std::size_t i = 0; i < x.base.size(); ++i)
            if (!x.base[i].is_zero_literal()) s += x.base[i] * diff(b[alpha], i);
        for (std::size_t beta = 0; beta < k; ++beta)
            if (!x.matrix[alpha][beta].is_zero_literal()) s -= x.matrix[alpha][beta] * b[beta];
        out[alpha] = simplify(s);
    }
    return out;
}

Report flow_invariance_check(const VectorField& x_total, const Frame& b, const SampleSpec& spec) {
    Report report("flow-invariance");
    const Chart& base = *b.chart();
    const auto n = base.dimension();
    const auto k = b.ambient();
    if (x_total.dimension() != n + k) throw std::invalid_argument("flow_invariance_check: total space dimension");
    LinearField lin = decompose_linear(x_total, n);

    bool hypothesis = true;
    for (std::size_t j = 0; j < b.rank(); ++j) {
        auto v = membership(covariant_d(lin, b.member(j)), b, spec);
        hypothesis = hypothesis && v.holds();
        report.add("(a) D_X b" + std::to_string(j + 1) + " in B", v, "b" + std::to_string(j + 1));
    }

    // Flow on a copy of the chart whose fiber directions are unbounded.
    std::vector<std::string> names = x_total.chart()->names();
    std::vector<Interval> box = x_total.chart()->box();
    for (std::size_t a = n; a < n + k; ++a) box[a] = Interval{-1e12, 1e12};
    auto flow_chart = make_chart(names, box);
    VectorField x(flow_chart, x_total.components());

    static constexpr double kTimes[] = {0.1, 0.5, 1.0};
    auto v = sample_max(base, spec, [&](std::span<const double> m) {
        std::vector<double> origin(m.begin(), m.end());
        origin.resize(n + k, 0.0);
        std::vector<std::vector<double>> zero_path;
        try {
            zero_path = flow_samples(x, origin, kTimes);
        } catch (const FlowError& e) {
            throw EvalError(e.what());
        }
        double worst = 0.0;
        for (std::size_t j = 0; j < b.rank(); ++j) {
            std::vector<double> start = origin;
            auto bj = eval_all(b.member(j), m);
            for (std::size_t a = 0; a < k; ++a) start[n + a] = bj[a];
            std::vector<std::vector<double>> path;
            try {
                path = flow_samples(x, start, kTimes);
            } catch (const FlowError& e) {
                throw EvalError(e.what());
            }
            for (std::size_t s = 0; s < path.size(); ++s) {
                std::vector<double> fiber(k);
                double norm = 0.0;
                for (std::size_t a = 0; a < k; ++a) {
                    fiber[a] = path[s][n + a] - zero_path[s][n + a];
                    norm = std::max(norm, std::fabs(fiber[a]));
                }
                std::vector<double> here(path[s].begin(), path[s].begin() + static_cast<std::ptrdiff_t>(n));
                auto ls = linalg::least_squares(b.evaluate(here), fiber);
                worst = std::max(worst, ls.residual / std::max(1.0, norm));
            }
        }
        return worst;
    });
    auto& entry = report.add("(b) flowed frame stays in B", v);
    if (!hypothesis) entry.note = "hypothesis (a) fails";
    return report;
}

}  // namespace morphic
