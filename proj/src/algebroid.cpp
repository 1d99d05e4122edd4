#include "morphic/algebroid.hpp"

#include "morphic/sampling.hpp"

namespace morphic {

namespace {

std::string label(std::initializer_list<std::size_t> idx) {
    std::string s = "(";
    bool first = true;
    for (auto i : idx) {
        if (!first) s += ", ";
        first = false;
        s += "e" + std::to_string(i + 1);
    }
    return s + ")";
}

void check_section(const LieAlgebroid& a, const Section& x) {
    if (x.size() != a.rank()) throw std::invalid_argument("section has wrong number of components");
}

}  // namespace

LieAlgebroid::LieAlgebroid(ChartPtr chart, std::size_t rank, linalg::ExprMatrix anchor, StructureTensor structure)
    : chart_(std::move(chart)), rank_(rank), anchor_(std::move(anchor)), structure_(std::move(structure)) {
    const auto n = chart_->dimension();
    if (anchor_.size() != n) throw std::invalid_argument("anchor must have one row per coordinate");
    for (const auto& row : anchor_)
        if (row.size() != rank_) throw std::invalid_argument("anchor must have one column per frame section");
    if (structure_.size() != rank_) throw std::invalid_argument("structure functions must be k x k x k");
    for (const auto& m : structure_) {
        if (m.size() != rank_) throw std::invalid_argument("structure functions must be k x k x k");
        for (const auto& row : m)
            if (row.size() != rank_) throw std::invalid_argument("structure functions must be k x k x k");
    }
    for (std::size_t g = 0; g < rank_; ++g)
        for (std::size_t a = 0; a < rank_; ++a)
            for (std::size_t b = a; b < rank_; ++b)
                if (!simplify(structure_[g][a][b] + structure_[g][b][a]).is_zero_literal())
                    throw std::invalid_argument("structure functions C[" + std::to_string(g + 1) + "][" +
                                                std::to_string(a + 1) + "][" + std::to_string(b + 1) +
                                                "] are not antisymmetric");
}

LieAlgebroid LieAlgebroid::zero(ChartPtr chart, std::size_t rank) {
    auto n = chart->dimension();
    return LieAlgebroid(std::move(chart), rank, linalg::ExprMatrix(n, std::vector<Expr>(rank)),
                        StructureTensor(rank, linalg::ExprMatrix(rank, std::vector<Expr>(rank))));
}

LieAlgebroid LieAlgebroid::tangent_bundle(ChartPtr chart) {
    auto n = chart->dimension();
    return LieAlgebroid(std::move(chart), n, linalg::identity(n),
                        StructureTensor(n, linalg::ExprMatrix(n, std::vector<Expr>(n))));
}

Section LieAlgebroid::unit(std::size_t alpha) const {
    Section s(rank_);
    s.at(alpha) = Expr(1);
    return s;
}

VectorField anchor_apply(const LieAlgebroid& a, const Section& x) {
    check_section(a, x);
    std::vector<Expr> c(a.dimension());
    for (std::size_t i = 0; i < a.dimension(); ++i) {
        Expr s;
        for (std::size_t al = 0; al < a.rank(); ++al)
            if (!a.anchor(i, al).is_zero_literal()) s += a.anchor(i, al) * x[al];
        c[i] = s;
    }
    return VectorField(a.chart(), std::move(c));
}

Section bracket(const LieAlgebroid& a, const Section& x, const Section& y) {
    check_section(a, x);
    check_section(a, y);
    VectorField rx = anchor_apply(a, x), ry = anchor_apply(a, y);
    Section out(a.rank());
    for (std::size_t g = 0; g < a.rank(); ++g) {
        Expr s = apply(rx, y[g]) - apply(ry, x[g]);
        for (std::size_t al = 0; al < a.rank(); ++al) {
            if (x[al].is_zero_literal()) continue;
            for (std::size_t be = 0; be < a.rank(); ++be) {
                if (y[be].is_zero_literal() || a.structure(g, al, be).is_zero_literal()) continue;
                s += x[al] * y[be] * a.structure(g, al, be);
            }
        }
        out[g] = simplify(s);
    }
    return out;
}

Report check_axioms(const LieAlgebroid& a, const SampleSpec& spec) {
    Report report("validate");
    const auto k = a.rank();
    const Chart& chart = *a.chart();

    ZeroVerdict anti;
    std::string anti_label;
    for (std::size_t g = 0; g < k; ++g)
        for (std::size_t al = 0; al < k; ++al)
            for (std::size_t be = al; be < k; ++be) {
                auto v = is_zero(a.structure(g, al, be) + a.structure(g, be, al), chart, spec);
                if (!v.holds() && anti.holds()) anti_label = label({al, be});
                anti.merge(v);
            }
    report.add("antisymmetry", anti, anti_label);

    ZeroVerdict jacobi;
    std::string jacobi_label;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            for (std::size_t l = j + 1; l < k; ++l) {
                Section ei = a.unit(i), ej = a.unit(j), el = a.unit(l);
                Section t1 = bracket(a, bracket(a, ei, ej), el);
                Section t2 = bracket(a, bracket(a, ej, el), ei);
                Section t3 = bracket(a, bracket(a, el, ei), ej);
                Section sum(k);
                for (std::size_t g = 0; g < k; ++g) sum[g] = t1[g] + t2[g] + t3[g];
                auto v = is_zero(sum, chart, spec);
                if (!v.holds() && (jacobi.holds() || v.max_residual > jacobi.max_residual))
                    jacobi_label = label({i, j, l});
                jacobi.merge(v);
            }
    report.add("Jacobi", jacobi, jacobi_label);

    ZeroVerdict leibniz;
    std::string leibniz_label;
    for (std::size_t c = 0; c < a.dimension(); ++c) {
        Expr f = Expr::var(c);
        for (std::size_t al = 0; al < k; ++al)
            for (std::size_t be = 0; be < k; ++be) {
                Section fb = a.unit(be);
                fb[be] = f;
                Section lhs = bracket(a, a.unit(al), fb);
                Section plain = bracket(a, a.unit(al), a.unit(be));
                Expr rf = apply(anchor_apply(a, a.unit(al)), f);
                Section diff_(k);
                for (std::size_t g = 0; g < k; ++g)
                    diff_[g] = lhs[g] - f * plain[g] - (g == be ? rf : Expr(0));
                auto v = is_zero(diff_, chart, spec);
                if (!v.holds() && leibniz.holds())
                    leibniz_label = label({al, be}) + " with f = " + chart.name(c);
                leibniz.merge(v);
            }
    }
    report.add("Leibniz", leibniz, leibniz_label);

    ZeroVerdict morphism;
    std::string morphism_label;
    for (std::size_t al = 0; al < k; ++al)
        for (std::size_t be = al + 1; be < k; ++be) {
            VectorField lhs = anchor_apply(a, bracket(a, a.unit(al), a.unit(be)));
            VectorField rhs = lie_bracket(anchor_apply(a, a.unit(al)), anchor_apply(a, a.unit(be)));
            auto v = is_equal(lhs.components(), rhs.components(), chart, spec);
            if (!v.holds() && morphism.holds()) morphism_label = label({al, be});
            morphism.merge(v);
        }
    report.add("anchor morphism", morphism, morphism_label);
    return report;
}

LieAlgebroid tangent_algebroid(const LieAlgebroid& a, Interval velocity_box) {
    const auto n = a.dimension();
    const auto k = a.rank();
    auto tchart = std::make_shared<const Chart>(tangent_chart(*a.chart(), velocity_box));
    // xdot(f) = xdot^j d_j f
    auto vel = [n](const Expr& f) {
        Expr s;
        for (std::size_t j = 0; j < n; ++j) s += Expr::var(n + j) * diff(f, j);
        return simplify(s);
    };
    linalg::ExprMatrix anchor(2 * n, std::vector<Expr>(2 * k));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t al = 0; al < k; ++al) {
            anchor[i][al] = a.anchor(i, al);
            anchor[n + i][al] = vel(a.anchor(i, al));
            anchor[n + i][k + al] = a.anchor(i, al);
        }
    StructureTensor c(2 * k, linalg::ExprMatrix(2 * k, std::vector<Expr>(2 * k)));
    for (std::size_t g = 0; g < k; ++g)
        for (std::size_t al = 0; al < k; ++al)
            for (std::size_t be = 0; be < k; ++be) {
                const Expr& cab = a.structure(g, al, be);
                if (cab.is_zero_literal()) continue;
                c[g][al][be] = cab;
                c[k + g][al][be] = vel(cab);
                c[k + g][al][k + be] = cab;
                c[k + g][k + be][al] = -cab;
            }
    return LieAlgebroid(std::move(tchart), 2 * k, std::move(anchor), std::move(c));
}

Section tangent_lift_linear(const LieAlgebroid& a, const Section& x) {
    check_section(a, x);
    const auto n = a.dimension();
    Section out(2 * a.rank());
    for (std::size_t al = 0; al < a.rank(); ++al) {
        out[al] = x[al];
        Expr s;
        for (std::size_t j = 0; j < n; ++j) s += Expr::var(n + j) * diff(x[al], j);
        out[a.rank() + al] = simplify(s);
    }
    return out;
}

Section tangent_lift_core(const LieAlgebroid& a, const Section& x) {
    check_section(a, x);
    Section out(2 * a.rank());
    for (std::size_t al = 0; al < a.rank(); ++al) out[a.rank() + al] = x[al];
    return out;
}

Section tangent_bracket(const LieAlgebroid& ta, const Section& u, const Section& v) { return bracket(ta, u, v); }

VectorField core_field(const ChartPtr& total, const LieAlgebroid& a, const Section& b) {
    check_section(a, b);
    const auto n = a.dimension();
    if (total->dimension() != n + a.rank()) throw std::invalid_argument("core_field: total space dimension");
    std::vector<Expr> c(n + a.rank());
    for (std::size_t al = 0; al < a.rank(); ++al) c[n + al] = b[al];
    return VectorField(total, std::move(c));
}

VectorField as_total_space_field(const ChartPtr& total, const LieAlgebroid& a, const VectorField& xbar,
                                 const linalg::ExprMatrix& d_table) {
    const auto n = a.dimension();
    const auto k = a.rank();
    if (total->dimension() != n + k) throw std::invalid_argument("as_total_space_field: total space dimension");
    if (d_table.size() != k) throw std::invalid_argument("as_total_space_field: D table must be k x k");
    std::vector<Expr> c(n + k);
    for (std::size_t i = 0; i < n; ++i) c[i] = xbar[i];
    for (std::size_t al = 0; al < k; ++al) {
        if (d_table[al].size() != k) throw std::invalid_argument("as_total_space_field: D table must be k x k");
        Expr s;
        for (std::size_t be = 0; be < k; ++be)
            if (!d_table[al][be].is_zero_literal()) s -= d_table[al][be] * Expr::var(n + be);
        c[n + al] = s;
    }
    return VectorField(total, std::move(c));
}

Section covariant_d(const LieAlgebroid& a, const VectorField& x_total, const Section& x) {
    const auto n = a.dimension();
    const auto k = a.rank();
    decompose_linear(x_total, n);
    VectorField br = lie_bracket(x_total, core_field(x_total.chart(), a, x));
    for (std::size_t i = 0; i < n; ++i)
        if (!br[i].is_zero_literal()) throw NonLinearField("bracket with a core field has a base component", i);
    Section out(k);
    for (std::size_t al = 0; al < k; ++al) {
        for (std::size_t be = 0; be < k; ++be)
            if (!simplify(diff(br[n + al], n + be)).is_zero_literal())
                throw NonLinearField("bracket with a core field is not vertical-constant", n + al);
        out[al] = br[n + al];
    }
    return out;
}

}  // namespace morphic
