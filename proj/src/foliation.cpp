#include "morphic/foliation.hpp"

#include <cmath>

#include "morphic/sampling.hpp"

namespace morphic {

Frame::Frame(ChartPtr chart, std::size_t ambient, std::vector<std::vector<Expr>> members)
    : chart_(std::move(chart)), ambient_(ambient), members_(std::move(members)) {
    for (const auto& m : members_)
        if (m.size() != ambient_) throw std::invalid_argument("frame member has wrong number of components");
    constant_ = linalg::as_rational(members_);
}

Frame Frame::of_fields(ChartPtr chart, const std::vector<VectorField>& fields) {
    std::vector<std::vector<Expr>> members;
    for (const auto& f : fields) {
        if (!f.chart()->compatible(*chart)) throw ChartMismatch("frame field on a different chart");
        members.push_back(f.components());
    }
    std::size_t n = chart->dimension();
    return Frame(std::move(chart), n, std::move(members));
}

Frame Frame::coordinate(ChartPtr chart, std::size_t l) {
    std::size_t n = chart->dimension();
    if (l > n) throw std::invalid_argument("more leaf directions than coordinates");
    std::vector<std::vector<Expr>> members;
    for (std::size_t i = 0; i < l; ++i) {
        std::vector<Expr> v(n);
        v[i] = Expr(1);
        members.push_back(std::move(v));
    }
    return Frame(std::move(chart), n, std::move(members));
}

Frame Frame::concat(const Frame& other) const {
    if (other.ambient_ != ambient_) throw std::invalid_argument("concat: ambient mismatch");
    auto members = members_;
    members.insert(members.end(), other.members_.begin(), other.members_.end());
    return Frame(chart_, ambient_, std::move(members));
}

std::vector<std::vector<double>> Frame::evaluate(std::span<const double> point) const {
    std::vector<std::vector<double>> out;
    out.reserve(members_.size());
    for (const auto& m : members_) out.push_back(eval_all(m, point));
    return out;
}

namespace {

std::string point_string(std::span<const double> p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) s += ", ";
        s += std::to_string(p[i]);
    }
    return s + ")";
}

// Exact orthogonal projector M (M^T M)^{-1} M^T for a constant frame.
std::optional<linalg::RationalMatrix> projector(const linalg::RationalMatrix& cols, std::size_t ambient) {
    const std::size_t r = cols.size();
    linalg::RationalMatrix gram(r, std::vector<Rational>(r));
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) {
            Rational s(0);
            for (std::size_t a = 0; a < ambient; ++a) {
                auto t = Rational::try_mul(cols[i][a], cols[j][a]);
                if (!t) return std::nullopt;
                auto u = Rational::try_add(s, *t);
                if (!u) return std::nullopt;
                s = *u;
            }
            gram[i][j] = s;
        }
    }
    auto ginv = linalg::inverse(gram);
    if (!ginv) return std::nullopt;
    linalg::RationalMatrix p(ambient, std::vector<Rational>(ambient));
    for (std::size_t a = 0; a < ambient; ++a) {
        for (std::size_t b = 0; b < ambient; ++b) {
            Rational s(0);
            for (std::size_t i = 0; i < r; ++i) {
                for (std::size_t j = 0; j < r; ++j) {
                    auto t = Rational::try_mul(cols[i][a], (*ginv)[i][j]);
                    if (!t) return std::nullopt;
                    t = Rational::try_mul(*t, cols[j][b]);
                    if (!t) return std::nullopt;
                    auto u = Rational::try_add(s, *t);
                    if (!u) return std::nullopt;
                    s = *u;
                }
            }
            p[a][b] = s;
        }
    }
    return p;
}

}  // namespace

ZeroVerdict membership(std::span<const Expr> v, const Frame& f, const SampleSpec& spec) {
    if (v.size() != f.ambient()) throw std::invalid_argument("membership: ambient mismatch");
    if (f.rank() == 0) return is_zero(v, *f.chart(), spec);
    if (const auto& cols = f.constant_members()) {
        if (linalg::numeric_rank([&] {
                std::vector<std::vector<double>> d;
                for (const auto& c : *cols) {
                    std::vector<double> col;
                    for (const auto& q : c) col.push_back(q.to_double());
                    d.push_back(std::move(col));
                }
                return d;
            }()) < f.rank())
            throw FrameRankError("constant frame is rank deficient");
        if (auto p = projector(*cols, f.ambient())) {
            std::vector<Expr> residual;
            for (std::size_t a = 0; a < f.ambient(); ++a) {
                Expr r = v[a];
                for (std::size_t b = 0; b < f.ambient(); ++b)
                    if (!(*p)[a][b].is_zero()) r -= Expr((*p)[a][b]) * v[b];
                residual.push_back(r);
            }
            return is_zero(residual, *f.chart(), spec);
        }
    }
    std::vector<Expr> simplified;
    for (const auto& e : v) simplified.push_back(simplify(e));
    return sample_max(*f.chart(), spec, [&](std::span<const double> p) {
        auto cols = f.evaluate(p);
        auto rhs = eval_all(simplified, p);
        auto ls = linalg::least_squares(cols, rhs);
        if (!ls.full_rank)
            throw FrameRankError("frame is rank deficient at " + point_string(p),
                                 std::vector<double>(p.begin(), p.end()));
        return ls.residual;
    });
}

ZeroVerdict independence(const Frame& f, const SampleSpec& spec) {
    if (f.rank() == 0) return {};
    if (f.rank() > f.ambient()) {
        ZeroVerdict v;
        v.tier = Tier::NonZero;
        v.max_residual = 1.0;
        return v;
    }
    if (const auto& cols = f.constant_members()) {
        std::vector<std::vector<double>> d;
        for (const auto& c : *cols) {
            std::vector<double> col;
            for (const auto& q : c) col.push_back(q.to_double());
            d.push_back(std::move(col));
        }
        ZeroVerdict v;
        if (linalg::numeric_rank(d) < f.rank()) {
            v.tier = Tier::NonZero;
            v.max_residual = 1.0;
        }
        return v;
    }
    SampleSpec strict = spec;
    strict.tol = 0.5;
    return sample_max(*f.chart(), strict, [&](std::span<const double> p) {
        return linalg::numeric_rank(f.evaluate(p)) < f.rank() ? 1.0 : 0.0;
    });
}

Expansion::Expansion(const Frame& basis) : basis_(basis) {
    if (basis.rank() != basis.ambient()) throw std::invalid_argument("expansion basis must be square");
    auto inv = linalg::inverse(linalg::from_columns(basis.members()));
    if (!inv) throw FrameRankError("expansion basis is singular");
    inverse_ = std::move(*inv);
}

std::vector<Expr> Expansion::coefficients(std::span<const Expr> v) const {
    auto c = linalg::multiply(inverse_, v);
    for (auto& e : c) e = simplify(e);
    return c;
}

Report involutive(const Frame& f, const SampleSpec& spec) {
    Report report("involutive");
    if (f.ambient() != f.chart()->dimension()) throw std::invalid_argument("involutive: frame of sections");
    for (std::size_t i = 0; i < f.rank(); ++i) {
        for (std::size_t j = i + 1; j < f.rank(); ++j) {
            VectorField a(f.chart(), f.member(i)), b(f.chart(), f.member(j));
            auto v = membership(lie_bracket(a, b).components(), f, spec);
            std::string label = "(" + std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")";
            report.add("bracket " + label + " in span", v, label);
        }
    }
    return report;
}

std::vector<std::vector<Expr>> bott(const Frame& f, const VectorField& y, const Frame& q) {
    Expansion basis(f.concat(q));
    std::vector<std::vector<Expr>> out;
    for (const auto& fi : f.members()) {
        auto c = basis.coefficients(lie_bracket(VectorField(f.chart(), fi), y).components());
        out.emplace_back(c.begin() + static_cast<std::ptrdiff_t>(f.rank()), c.end());
    }
    return out;
}

Report adapted_chart_check(const Frame& fm, std::size_t l, const SampleSpec& spec) {
    Report report("adapted-chart");
    Frame coord = Frame::coordinate(fm.chart(), l);
    if (fm.rank() != l) {
        report.fail("rank", "F_M has " + std::to_string(fm.rank()) + " members, expected " + std::to_string(l));
        return report;
    }
    auto indep = independence(fm, spec);
    report.add("F_M independent", indep);
    if (!indep.holds()) return report;
    for (std::size_t i = 0; i < fm.rank(); ++i)
        report.add("F_M member " + std::to_string(i + 1) + " in span{d_1..d_l}", membership(fm.member(i), coord, spec));
    for (std::size_t i = 0; i < l; ++i)
        report.add("d_" + std::to_string(i + 1) + " in span F_M", membership(coord.member(i), fm, spec));
    report.append(involutive(fm, spec), "F_M ");
    return report;
}

}  // namespace morphic
