#include "morphic/connection.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "morphic/sampling.hpp"

namespace morphic {

PartialConnection::PartialConnection(LieAlgebroid algebroid, std::size_t l, std::vector<Section> core,
                                     std::vector<Section> complement, GammaTensor gamma)
    : algebroid_(std::move(algebroid)),
      l_(l),
      core_(std::move(core)),
      complement_(std::move(complement)),
      gamma_(std::move(gamma)) {
    const auto k = algebroid_.rank();
    const auto q = complement_.size();
    if (l_ > algebroid_.dimension()) throw std::invalid_argument("leaf count exceeds the chart dimension");
    if (core_.size() + q != k)
        throw std::invalid_argument("core and complement must together have rank " + std::to_string(k) + " members");
    for (const auto& s : core_)
        if (s.size() != k) throw std::invalid_argument("core section has wrong number of components");
    for (const auto& s : complement_)
        if (s.size() != k) throw std::invalid_argument("complement section has wrong number of components");
    if (gamma_.size() != l_) throw std::invalid_argument("connection coefficients must have shape l x q x q");
    for (const auto& m : gamma_) {
        if (m.size() != q) throw std::invalid_argument("connection coefficients must have shape l x q x q");
        for (const auto& row : m)
            if (row.size() != q) throw std::invalid_argument("connection coefficients must have shape l x q x q");
    }
    std::vector<Section> all = core_;
    all.insert(all.end(), complement_.begin(), complement_.end());
    expansion_ = std::make_shared<const Expansion>(Frame(chart(), k, std::move(all)));
}

Frame PartialConnection::core_frame() const { return Frame(chart(), algebroid_.rank(), core_); }
Frame PartialConnection::complement_frame() const { return Frame(chart(), algebroid_.rank(), complement_); }

std::vector<Expr> PartialConnection::reduce(const Section& a) const {
    auto c = expansion_->coefficients(a);
    return std::vector<Expr>(c.begin() + static_cast<std::ptrdiff_t>(core_.size()), c.end());
}

std::vector<Expr> nabla_coefficients(const PartialConnection& c, const VectorField& x, const std::vector<Expr>& f) {
    const auto q = c.quotient_rank();
    if (f.size() != q) throw std::invalid_argument("nabla: class has wrong number of coefficients");
    for (std::size_t i = c.leaves(); i < x.dimension(); ++i)
        if (!simplify(x[i]).is_zero_literal())
            throw std::invalid_argument("nabla: direction is not tangent to F_M (component " + x.chart()->name(i) + ")");
    std::vector<Expr> out(q);
    for (std::size_t al = 0; al < q; ++al) {
        Expr s = apply(x, f[al]);
        for (std::size_t i = 0; i < c.leaves(); ++i) {
            if (x[i].is_zero_literal()) continue;
            for (std::size_t be = 0; be < q; ++be)
                if (!c.gamma(i, be, al).is_zero_literal() && !f[be].is_zero_literal())
                    s += x[i] * f[be] * c.gamma(i, be, al);
        }
        out[al] = simplify(s);
    }
    return out;
}

std::vector<Expr> nabla(const PartialConnection& c, const VectorField& x, const Section& a) {
    return nabla_coefficients(c, x, c.reduce(a));
}

std::vector<std::vector<linalg::ExprMatrix>> curvature(const PartialConnection& c) {
    const auto l = c.leaves();
    const auto q = c.quotient_rank();
    std::vector<std::vector<linalg::ExprMatrix>> r(l, std::vector<linalg::ExprMatrix>(l, linalg::ExprMatrix(q, std::vector<Expr>(q))));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j)
            for (std::size_t al = 0; al < q; ++al)
                for (std::size_t be = 0; be < q; ++be) {
                    Expr s = diff(c.gamma(j, al, be), i) - diff(c.gamma(i, al, be), j);
                    for (std::size_t g = 0; g < q; ++g)
                        s += c.gamma(j, al, g) * c.gamma(i, g, be) - c.gamma(i, al, g) * c.gamma(j, g, be);
                    r[i][j][al][be] = simplify(s);
                }
    return r;
}

Report is_flat(const PartialConnection& c, const SampleSpec& spec) {
    Report report("is-flat");
    auto r = curvature(c);
    ZeroVerdict worst;
    std::string label;
    for (std::size_t i = 0; i < c.leaves(); ++i)
        for (std::size_t j = i + 1; j < c.leaves(); ++j) {
            std::vector<Expr> comps;
            for (const auto& row : r[i][j]) comps.insert(comps.end(), row.begin(), row.end());
            auto v = is_zero(comps, *c.chart(), spec);
            if (!v.holds() && (worst.holds() || v.max_residual > worst.max_residual))
                label = "(d" + std::to_string(i + 1) + ", d" + std::to_string(j + 1) + ")";
            worst.merge(v);
        }
    report.add("curvature", worst, label);
    return report;
}

namespace {

// Integrates dF/dx_d = -Gamma_d(x) F for every column of F along one segment.
void transport_segment(const PartialConnection& c, std::vector<double>& x, std::size_t d, double delta,
                       std::vector<std::vector<double>>& columns) {
    const auto q = c.quotient_rank();
    if (delta == 0.0 || q == 0) return;
    const Interval& iv = c.chart()->interval(d);
    double target = x[d] + delta;
    double slack = 1e-9 * iv.width();
    if (target < iv.lo - slack || target > iv.hi + slack || !c.chart()->contains(x))
        throw FlowError("transport segment leaves the chart box", 0);
    auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::fabs(delta) * kStepsPerUnitTime)));
    double h = delta / static_cast<double>(steps);
    const auto& g = c.gamma()[d];
    std::vector<double> m(q * q);
    auto coeffs = [&](double at) {
        double saved = x[d];
        x[d] = at;
        for (std::size_t al = 0; al < q; ++al)
            for (std::size_t be = 0; be < q; ++be) m[al * q + be] = g[be][al].is_zero_literal() ? 0.0 : eval(g[be][al], x);
        x[d] = saved;
    };
    // rhs^al = -sum_be Gamma^al_{d be} f^be, Gamma^al_{d be} = g[be][al].
    auto rhs = [&](const std::vector<double>& f) {
        std::vector<double> out(q, 0.0);
        for (std::size_t al = 0; al < q; ++al)
            for (std::size_t be = 0; be < q; ++be) out[al] -= m[al * q + be] * f[be];
        return out;
    };
    double start = x[d];
    for (std::size_t s = 0; s < steps; ++s) {
        double t0 = start + h * static_cast<double>(s);
        coeffs(t0);
        std::vector<std::vector<double>> k1;
        for (auto& f : columns) k1.push_back(rhs(f));
        coeffs(t0 + 0.5 * h);
        std::vector<std::vector<double>> k2, k3;
        for (std::size_t col = 0; col < columns.size(); ++col) {
            std::vector<double> y(q);
            for (std::size_t a = 0; a < q; ++a) y[a] = columns[col][a] + 0.5 * h * k1[col][a];
            k2.push_back(rhs(y));
        }
        for (std::size_t col = 0; col < columns.size(); ++col) {
            std::vector<double> y(q);
            for (std::size_t a = 0; a < q; ++a) y[a] = columns[col][a] + 0.5 * h * k2[col][a];
            k3.push_back(rhs(y));
        }
        coeffs(t0 + h);
        for (std::size_t col = 0; col < columns.size(); ++col) {
            std::vector<double> y(q);
            for (std::size_t a = 0; a < q; ++a) y[a] = columns[col][a] + h * k3[col][a];
            auto k4 = rhs(y);
            for (std::size_t a = 0; a < q; ++a)
                columns[col][a] += h / 6.0 * (k1[col][a] + 2 * k2[col][a] + 2 * k3[col][a] + k4[a]);
        }
    }
    x[d] = target;
}

// Parallel frame matrix Phi tabulated on a regular grid over the whole box.
// Node values are transported from the leaf-center slice, where Phi = I,
// along the highest leaf direction whose index is off center; nodes are
// computed on first use.
class GridFrame final : public TabulatedFunction {
public:
    explicit GridFrame(const PartialConnection& c) : conn_(c), n_(c.chart()->dimension()), q_(c.quotient_rank()) {
        static std::atomic<int> counter{0};
        label_ = "grid" + std::to_string(++counter);
        for (std::size_t d = 0; d < n_; ++d)
            spacing_.push_back(c.chart()->interval(d).width() / static_cast<double>(kGridPoints - 1));
    }

    std::size_t arity() const override { return n_; }
    std::size_t components() const override { return q_ * q_; }
    std::string label() const override { return label_; }

    // Transversal derivatives are central differences. Leaf derivatives use
    // d_i Phi = -G_i Phi with the Leibniz rule, so they are as accurate as
    // the interpolated values.
    double evaluate(std::size_t component, std::span<const double> x, std::span<const int> orders) const override {
        for (std::size_t d = conn_.leaves(); d < orders.size(); ++d) {
            if (orders[d] == 0) continue;
            std::vector<int> lower(orders.begin(), orders.end());
            --lower[d];
            std::vector<double> up(x.begin(), x.end()), down(x.begin(), x.end());
            up[d] += spacing_[d];
            down[d] -= spacing_[d];
            return (evaluate(component, up, lower) - evaluate(component, down, lower)) / (2 * spacing_[d]);
        }
        for (std::size_t i = 0; i < conn_.leaves() && i < orders.size(); ++i) {
            if (orders[i] == 0) continue;
            std::vector<int> lower(orders.begin(), orders.end());
            --lower[i];
            const std::size_t row = component / q_;
            const std::size_t col = component % q_;
            double total = 0.0;
            std::vector<int> part(lower.size(), 0);
            for (;;) {
                double weight = 1.0;
                std::vector<int> rest(lower.size());
                for (std::size_t d = 0; d < lower.size(); ++d) {
                    weight *= binomial(lower[d], part[d]);
                    rest[d] = lower[d] - part[d];
                }
                for (std::size_t m = 0; m < q_; ++m) {
                    const Expr& g = gamma_derivative(i, m, row, part);
                    if (g.is_zero_literal()) continue;
                    total += weight * eval(g, x) * evaluate(m * q_ + col, x, rest);
                }
                std::size_t d = 0;
                while (d < part.size() && part[d] == lower[d]) part[d++] = 0;
                if (d == part.size()) break;
                ++part[d];
            }
            return -total;
        }
        return interpolate(component, x);
    }

private:
    static constexpr std::size_t kCenter = (kGridPoints - 1) / 2;

    static double binomial(int n, int k) {
        double b = 1.0;
        for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
        return b;
    }

    // Partial derivative of G_i[a][b] = Gamma^a_{ib} by multi-index.
    const Expr& gamma_derivative(std::size_t i, std::size_t b, std::size_t a, const std::vector<int>& orders) const {
        std::string key = std::to_string(i) + ',' + std::to_string(b) + ',' + std::to_string(a);
        for (int o : orders) key += ',' + std::to_string(o);
        {
            std::lock_guard lock(mutex_);
            auto it = gamma_cache_.find(key);
            if (it != gamma_cache_.end()) return it->second;
        }
        Expr e = conn_.gamma(i, b, a);
        for (std::size_t d = 0; d < orders.size(); ++d)
            for (int o = 0; o < orders[d]; ++o) e = diff(e, d);
        e = simplify(e);
        std::lock_guard lock(mutex_);
        return gamma_cache_.emplace(key, std::move(e)).first->second;
    }

    double interpolate(std::size_t component, std::span<const double> x) const {
        std::vector<std::size_t> cell(n_);
        std::vector<double> frac(n_);
        for (std::size_t d = 0; d < n_; ++d) {
            double u = (x[d] - conn_.chart()->interval(d).lo) / spacing_[d];
            double c = std::floor(u);
            c = std::clamp(c, 0.0, static_cast<double>(kGridPoints - 2));
            cell[d] = static_cast<std::size_t>(c);
            frac[d] = u - c;
        }
        double total = 0.0;
        std::vector<std::size_t> idx(n_);
        for (std::size_t corner = 0; corner < (std::size_t{1} << n_); ++corner) {
            double w = 1.0;
            for (std::size_t d = 0; d < n_; ++d) {
                bool upper = (corner >> d) & 1u;
                idx[d] = cell[d] + (upper ? 1 : 0);
                w *= upper ? frac[d] : 1.0 - frac[d];
            }
            if (w == 0.0) continue;
            total += w * node(idx)[component];
        }
        return total;
    }

    const std::vector<double>& node(const std::vector<std::size_t>& idx) const {
        std::size_t key = 0;
        for (std::size_t d = 0; d < n_; ++d) key = key * kGridPoints + idx[d];
        {
            std::lock_guard lock(mutex_);
            auto it = cache_.find(key);
            if (it != cache_.end()) return it->second;
        }
        std::vector<double> value;
        std::size_t dir = n_;
        for (std::size_t d = conn_.leaves(); d-- > 0;)
            if (idx[d] != kCenter) {
                dir = d;
                break;
            }
        if (dir == n_) {
            value.assign(q_ * q_, 0.0);
            for (std::size_t a = 0; a < q_; ++a) value[a * q_ + a] = 1.0;
        } else {
            std::vector<std::size_t> prev = idx;
            prev[dir] = idx[dir] > kCenter ? idx[dir] - 1 : idx[dir] + 1;
            const auto& from = node(prev);
            std::vector<double> x(n_);
            for (std::size_t d = 0; d < n_; ++d) x[d] = coordinate(d, prev[d]);
            std::vector<std::vector<double>> columns(q_, std::vector<double>(q_));
            for (std::size_t col = 0; col < q_; ++col)
                for (std::size_t row = 0; row < q_; ++row) columns[col][row] = from[row * q_ + col];
            transport_segment(conn_, x, dir, coordinate(dir, idx[dir]) - coordinate(dir, prev[dir]), columns);
            value.assign(q_ * q_, 0.0);
            for (std::size_t col = 0; col < q_; ++col)
                for (std::size_t row = 0; row < q_; ++row) value[row * q_ + col] = columns[col][row];
        }
        std::lock_guard lock(mutex_);
        return cache_.emplace(key, std::move(value)).first->second;
    }

    double coordinate(std::size_t d, std::size_t i) const {
        const Interval& iv = conn_.chart()->interval(d);
        return i + 1 == kGridPoints ? iv.hi : iv.lo + spacing_[d] * static_cast<double>(i);
    }

    PartialConnection conn_;
    std::size_t n_;
    std::size_t q_;
    std::vector<double> spacing_;
    std::string label_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::size_t, std::vector<double>> cache_;
    mutable std::unordered_map<std::string, Expr> gamma_cache_;
};

std::vector<Section> combine(const PartialConnection& c, const linalg::ExprMatrix& phi) {
    const auto q = c.quotient_rank();
    const auto k = c.algebroid().rank();
    std::vector<Section> out;
    for (std::size_t al = 0; al < q; ++al) {
        Section s(k);
        for (std::size_t be = 0; be < q; ++be) {
            if (phi[be][al].is_zero_literal()) continue;
            for (std::size_t g = 0; g < k; ++g) s[g] += phi[be][al] * c.complement()[be][g];
        }
        for (auto& e : s) e = simplify(e);
        out.push_back(std::move(s));
    }
    return out;
}

// exp(-sum_i x_i G_i) for constant commuting G_i (G_i[a][b] = Gamma^a_{ib})
// that are all diagonal or all nilpotent.
std::optional<linalg::ExprMatrix> constant_exponential(const PartialConnection& c) {
    const auto l = c.leaves();
    const auto q = c.quotient_rank();
    std::vector<linalg::RationalMatrix> g(l, linalg::RationalMatrix(q, std::vector<Rational>(q)));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b) {
                auto v = constant_value(c.gamma(i, b, a));
                if (!v || !v->is_exact()) return std::nullopt;
                g[i][a][b] = *v->exact();
            }
    auto mul = [q](const linalg::RationalMatrix& x, const linalg::RationalMatrix& y) -> std::optional<linalg::RationalMatrix> {
        linalg::RationalMatrix out(q, std::vector<Rational>(q));
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b) {
                Rational s(0);
                for (std::size_t m = 0; m < q; ++m) {
                    auto t = Rational::try_mul(x[a][m], y[m][b]);
                    if (!t) return std::nullopt;
                    auto u = Rational::try_add(s, *t);
                    if (!u) return std::nullopt;
                    s = *u;
                }
                out[a][b] = s;
            }
        return out;
    };
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i + 1; j < l; ++j) {
            auto ab = mul(g[i], g[j]), ba = mul(g[j], g[i]);
            if (!ab || !ba || *ab != *ba) return std::nullopt;
        }
    bool diagonal = true, nilpotent = true;
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b)
                if (a != b && !g[i][a][b].is_zero()) diagonal = false;
        auto p = g[i];
        for (std::size_t m = 1; m < q; ++m) {
            auto next = mul(p, g[i]);
            if (!next) return std::nullopt;
            p = *next;
        }
        for (const auto& row : p)
            for (const auto& e : row)
                if (!e.is_zero()) nilpotent = false;
    }
    linalg::ExprMatrix exponent(q, std::vector<Expr>(q));  // -sum_i x_i G_i
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b)
                if (!g[i][a][b].is_zero()) exponent[a][b] -= Expr(g[i][a][b]) * Expr::var(i);
    if (diagonal) {
        linalg::ExprMatrix phi(q, std::vector<Expr>(q));
        for (std::size_t a = 0; a < q; ++a) phi[a][a] = simplify(exp(exponent[a][a]));
        return phi;
    }
    if (!nilpotent) return std::nullopt;
    linalg::ExprMatrix phi = linalg::identity(q);
    linalg::ExprMatrix power = linalg::identity(q);
    Rational factorial(1);
    for (std::size_t m = 1; m < q; ++m) {
        power = linalg::multiply(power, exponent);
        factorial = *Rational::try_mul(factorial, Rational(static_cast<std::int64_t>(m)));
        for (std::size_t a = 0; a < q; ++a)
            for (std::size_t b = 0; b < q; ++b) phi[a][b] += power[a][b] / Expr(factorial);
    }
    for (auto& row : phi)
        for (auto& e : row) e = simplify(e);
    return phi;
}

ZeroVerdict parallel_residual(const PartialConnection& c, const std::vector<Section>& frame, const SampleSpec& spec) {
    ZeroVerdict v;
    for (std::size_t i = 0; i < c.leaves(); ++i) {
        auto di = VectorField::coordinate(c.chart(), i);
        for (const auto& s : frame) v.merge(is_zero(nabla(c, di, s), *c.chart(), spec));
    }
    return v;
}

}  // namespace

std::vector<double> parallel_transport(const PartialConnection& c, std::span<const double> start,
                                       const std::vector<std::pair<std::size_t, double>>& path,
                                       std::vector<double> f0) {
    if (f0.size() != c.quotient_rank()) throw std::invalid_argument("parallel_transport: wrong number of coefficients");
    if (start.size() != c.chart()->dimension()) throw std::invalid_argument("parallel_transport: start point dimension");
    std::vector<double> x(start.begin(), start.end());
    std::vector<std::vector<double>> columns{std::move(f0)};
    for (const auto& [d, delta] : path) {
        if (d >= c.leaves()) throw std::invalid_argument("parallel_transport: segment not along a leaf direction");
        transport_segment(c, x, d, delta, columns);
    }
    return columns.front();
}

ParallelFrame parallel_frame(const PartialConnection& c, const SampleSpec& spec,
                             const std::optional<std::vector<Section>>& candidate, FrameMethod method) {
    if (!is_flat(c, spec).passed()) throw NotFlat("connection is not flat; no parallel frame exists");
    const auto q = c.quotient_rank();
    ParallelFrame out;
    if (candidate) {
        if (candidate->size() != q)
            throw std::invalid_argument("candidate parallel frame needs " + std::to_string(q) + " sections");
        std::vector<std::vector<Expr>> classes;
        for (const auto& s : *candidate) classes.push_back(c.reduce(s));
        if (!independence(Frame(c.chart(), q, classes), spec).holds())
            throw NotParallel("candidate parallel frame is not a frame of A/F_core", 0.0);
        auto v = parallel_residual(c, *candidate, spec);
        if (!v.holds()) throw NotParallel("candidate frame is not parallel", v.max_residual);
        out.sections = *candidate;
        out.method = "candidate";
        return out;
    }
    if (method == FrameMethod::Auto) {
        bool zero = true;
        for (const auto& m : c.gamma())
            for (const auto& row : m)
                for (const auto& e : row)
                    if (!simplify(e).is_zero_literal()) zero = false;
        if (zero) {
            out.sections = c.complement();
            out.method = "complement";
            return out;
        }
        if (auto phi = constant_exponential(c)) {
            out.sections = combine(c, *phi);
            out.method = "constant-exponential";
            return out;
        }
    }
    auto grid = std::make_shared<const GridFrame>(c);
    std::vector<Expr> args;
    for (std::size_t d = 0; d < c.chart()->dimension(); ++d) args.push_back(Expr::var(d));
    linalg::ExprMatrix phi(q, std::vector<Expr>(q));
    for (std::size_t a = 0; a < q; ++a)
        for (std::size_t b = 0; b < q; ++b)
            phi[a][b] = tabulated(grid, a * q + b, std::vector<int>(c.chart()->dimension(), 0), args);
    out.sections = combine(c, phi);
    out.certificate = Certificate::Numeric;
    out.method = "grid";
    return out;
}

Report holonomy_trivial(const PartialConnection& c, const SampleSpec& spec) {
    Report report("holonomy");
    const auto l = c.leaves();
    const auto q = c.quotient_rank();
    if (l == 0 || q == 0) {
        report.pass("loop defect", "no leaf directions or zero quotient");
        return report;
    }
    Sampler sampler(*c.chart(), spec.seed);
    ZeroVerdict v;
    v.tier = Tier::NumericZero;
    for (std::size_t loop = 0; loop < kHolonomyLoops; ++loop) {
        std::vector<double> p = sampler.next();
        std::vector<std::pair<std::size_t, double>> path;
        std::size_t i = l == 1 ? 0 : static_cast<std::size_t>(sampler.uniform(0, static_cast<double>(l))) % l;
        const Interval& ii = c.chart()->interval(i);
        double di = sampler.uniform(ii.lo, ii.hi) - p[i];
        if (l == 1) {
            path = {{i, di}, {i, -di}};
        } else {
            std::size_t j = (i + 1 + static_cast<std::size_t>(sampler.uniform(0, static_cast<double>(l - 1))) % (l - 1)) % l;
            const Interval& ij = c.chart()->interval(j);
            double dj = sampler.uniform(ij.lo, ij.hi) - p[j];
            path = {{i, di}, {j, dj}, {i, -di}, {j, -dj}};
        }
        double defect = 0.0;
        for (std::size_t a = 0; a < q; ++a) {
            std::vector<double> f0(q, 0.0);
            f0[a] = 1.0;
            auto f = parallel_transport(c, p, path, f0);
            for (std::size_t b = 0; b < q; ++b) defect = std::max(defect, std::fabs(f[b] - f0[b]));
        }
        if (defect > v.max_residual) {
            v.max_residual = defect;
            if (defect > spec.tol) v.witness = p;
        }
    }
    if (v.max_residual > spec.tol) v.tier = Tier::NonZero;
    report.add("loop defect", v);
    return report;
}

}  // namespace morphic
