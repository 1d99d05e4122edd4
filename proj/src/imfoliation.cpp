#include "morphic/imfoliation.hpp"

#include <algorithm>

#include "morphic/sampling.hpp"

namespace morphic {

namespace {

// Worst-of accumulator that remembers which labelled case produced the worst
// failure.
struct Worst {
    ZeroVerdict verdict;
    std::string label;

    void add(const ZeroVerdict& v, const std::string& l) {
        if (!v.holds() && (verdict.holds() || v.max_residual > verdict.max_residual)) label = l;
        verdict.merge(v);
    }
};

SampleSpec tier_spec(const SampleSpec& spec, Certificate cert) {
    SampleSpec s = spec;
    if (cert == Certificate::Numeric) s.tol = std::max(s.tol, kNumericTierTol);
    return s;
}

std::string pair(const std::string& a, const std::string& b) { return "(" + a + ", " + b + ")"; }

std::vector<std::string> names(const std::vector<Section>& s, const std::string& prefix) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back(section_name(s[i], prefix + std::to_string(i + 1)));
    return out;
}

Report check_im_with(const IMFoliation& im, const SampleSpec& spec, const std::optional<ParallelFrame>& given) {
    Report report("check-im");
    const auto& conn = im.connection;
    const auto& a = conn.algebroid();
    const auto l = conn.leaves();
    Frame core = conn.core_frame();
    Frame fm = Frame::coordinate(conn.chart(), l);
    auto core_names = names(conn.core(), "c");

    auto indep = independence(core, spec);
    report.add("F_core independent", indep);
    if (!indep.holds()) return report;
    Worst rho;
    for (std::size_t j = 0; j < conn.core().size(); ++j)
        rho.add(membership(anchor_apply(a, conn.core()[j]).components(), fm, spec), core_names[j]);
    report.add("rho(F_core) in F_M", rho.verdict, rho.label);
    if (!rho.verdict.holds()) return report;

    Worst sub;
    for (std::size_t i = 0; i < conn.core().size(); ++i)
        for (std::size_t j = i + 1; j < conn.core().size(); ++j)
            sub.add(membership(bracket(a, conn.core()[i], conn.core()[j]), core, spec), pair(core_names[i], core_names[j]));
    report.add("(0) F_core is a subalgebroid", sub.verdict, sub.label);

    auto flat = is_flat(conn, spec);
    const auto& curv = flat.entries().front();
    ZeroVerdict fv{curv.tier, curv.max_residual, curv.witness};
    report.add("(1) nabla is flat", fv, curv.label);
    if (!fv.holds()) return report;

    ParallelFrame pf;
    if (given) {
        pf = *given;
    } else {
        try {
            pf = im_parallel_frame(im, spec);
        } catch (const NotParallel& e) {
            report.fail("parallel frame", e.what()).max_residual = e.residual();
            return report;
        }
    }
    report.set_certificate(pf.certificate);
    report.pass("parallel frame", pf.method).tier =
        pf.certificate == Certificate::Numeric ? Tier::NumericZero : Tier::SymbolicZero;
    SampleSpec s = tier_spec(spec, pf.certificate);
    auto p_names = names(pf.sections, "P");

    Worst ideal;
    for (std::size_t p = 0; p < pf.sections.size(); ++p)
        for (std::size_t c = 0; c < conn.core().size(); ++c)
            ideal.add(membership(bracket(a, pf.sections[p], conn.core()[c]), core, s), pair(core_names[c], p_names[p]));
    report.add("(2) [parallel, F_core] in F_core", ideal.verdict, ideal.label);

    Worst closed;
    for (std::size_t p = 0; p < pf.sections.size(); ++p)
        for (std::size_t q = p + 1; q < pf.sections.size(); ++q) {
            Section b = bracket(a, pf.sections[p], pf.sections[q]);
            for (std::size_t i = 0; i < l; ++i)
                closed.add(is_zero(nabla(conn, VectorField::coordinate(conn.chart(), i), b), *conn.chart(), s),
                           pair(p_names[p], p_names[q]));
        }
    report.add("(3) [parallel, parallel] is parallel", closed.verdict, closed.label);

    Worst anchor;
    for (std::size_t p = 0; p < pf.sections.size(); ++p)
        for (std::size_t i = 0; i < l; ++i) {
            auto v = lie_bracket(anchor_apply(a, pf.sections[p]), VectorField::coordinate(conn.chart(), i));
            anchor.add(membership(v.components(), fm, s), pair(p_names[p], "d" + std::to_string(i + 1)));
        }
    report.add("(4) rho(parallel) is F_M-parallel", anchor.verdict, anchor.label);
    return report;
}

std::string first_failure(const Report& r) {
    for (const auto& e : r.entries())
        if (!e.passed()) return e.name + (e.label.empty() ? "" : " " + e.label);
    return {};
}

MorphicFoliation construct_with(const IMFoliation& im, const ParallelFrame& pf) {
    const auto& conn = im.connection;
    const auto& a = conn.algebroid();
    const auto n = a.dimension();
    const auto k = a.rank();
    std::vector<Section> full = pf.sections;
    full.insert(full.end(), conn.core().begin(), conn.core().end());
    linalg::ExprMatrix m = linalg::from_columns(full);
    auto minv = linalg::inverse(m);
    if (!minv) throw FrameRankError("parallel frame and core do not frame A");

    MorphicFoliation fa;
    fa.total = std::make_shared<const Chart>(total_space_chart(*a.chart(), k));
    fa.base_dim = n;
    fa.rank = k;
    fa.l = conn.leaves();
    fa.provenance = Provenance::Constructed;
    fa.certificate = pf.certificate;
    fa.fiber_frame = full;
    for (std::size_t i = 0; i < conn.leaves(); ++i) {
        linalg::ExprMatrix dm(k, std::vector<Expr>(k));
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c) dm[r][c] = diff(m[r][c], i);
        auto li = linalg::multiply(dm, *minv);
        std::vector<Expr> comps(n + k);
        comps[i] = Expr(1);
        for (std::size_t al = 0; al < k; ++al) {
            Expr s;
            for (std::size_t be = 0; be < k; ++be) {
                Expr coeff = simplify(li[al][be]);
                if (!coeff.is_zero_literal()) s += coeff * Expr::var(n + be);
            }
            comps[n + al] = simplify(s);
        }
        fa.fields.emplace_back(fa.total, std::move(comps));
    }
    for (const auto& c : conn.core()) fa.fields.push_back(core_field(fa.total, a, c));
    return fa;
}

struct Generators {
    std::vector<LinearField> linear;
    std::vector<Section> core;
};

// Splits the fields of a morphic foliation into linear generators (nonzero
// base part) and core sections (vertical, fiber-constant).
Generators classify(const MorphicFoliation& fa) {
    Generators g;
    for (std::size_t f = 0; f < fa.fields.size(); ++f) {
        LinearField lin = decompose_linear(fa.fields[f], fa.base_dim);
        bool vertical = std::all_of(lin.base.begin(), lin.base.end(), [](const Expr& e) { return e.is_zero_literal(); });
        if (!vertical) {
            g.linear.push_back(std::move(lin));
            continue;
        }
        for (const auto& row : lin.matrix)
            for (const auto& e : row)
                if (!e.is_zero_literal())
                    throw NonLinearField("vertical field " + std::to_string(f + 1) + " is not a core field", f);
        g.core.push_back(lin.offset);
    }
    return g;
}

// Inverse of the l x l matrix of base parts of the linear generators.
std::optional<linalg::ExprMatrix> base_inverse(const Generators& g, std::size_t l) {
    if (g.linear.size() != l) return std::nullopt;
    linalg::ExprMatrix h(l, std::vector<Expr>(l));
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = 0; j < l; ++j) h[i][j] = g.linear[j].base[i];
    return linalg::inverse(h);
}

}  // namespace

std::string section_name(const Section& s, const std::string& fallback) {
    std::optional<std::size_t> unit;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i].is_zero_literal()) continue;
        if (!s[i].is_one_literal() || unit) return fallback;
        unit = i;
    }
    return unit ? "e" + std::to_string(*unit + 1) : fallback;
}

ParallelFrame im_parallel_frame(const IMFoliation& im, const SampleSpec& spec) {
    return parallel_frame(im.connection, spec, im.candidate, im.frame_method);
}

Report check_im(const IMFoliation& im, const SampleSpec& spec) { return check_im_with(im, spec, std::nullopt); }

MorphicFoliation construct_fa(const IMFoliation& im, const SampleSpec& spec) {
    ParallelFrame pf = im_parallel_frame(im, spec);
    Report r = check_im_with(im, spec, pf);
    if (!r.passed()) throw std::runtime_error("IM-foliation conditions fail: " + first_failure(r));
    return construct_with(im, pf);
}

Report check_morphic(const MorphicFoliation& fa, const LieAlgebroid& a, const SampleSpec& spec) {
    Report report("check-morphic");
    report.set_certificate(fa.certificate);
    SampleSpec s = tier_spec(spec, fa.certificate);
    const auto n = fa.base_dim;
    const auto k = fa.rank;
    const auto l = fa.l;
    if (a.dimension() != n || a.rank() != k) {
        report.fail("shape", "foliation does not live on the total space of this algebroid");
        return report;
    }

    Frame frame = Frame::of_fields(fa.total, fa.fields);
    auto rank = independence(frame, s);
    report.add("rank", rank);
    if (!rank.holds()) return report;

    Worst inv;
    Report brackets = involutive(frame, s);
    for (const auto& e : brackets.entries())
        inv.add(ZeroVerdict{e.tier, e.max_residual, e.witness}, e.label);
    report.add("(i) involutive", inv.verdict, inv.label);

    Generators gens;
    try {
        gens = classify(fa);
    } catch (const NonLinearField& e) {
        report.fail("(ii) TA -> TM closure", e.what());
        return report;
    }
    Worst base;
    for (std::size_t g = 0; g < gens.linear.size(); ++g) {
        std::vector<Expr> transversal(gens.linear[g].base.begin() + static_cast<std::ptrdiff_t>(std::min(l, n)),
                                      gens.linear[g].base.end());
        base.add(is_zero(transversal, *a.chart(), s), "generator " + std::to_string(g + 1));
    }
    if (!base.verdict.holds()) {
        report.add("(ii) TA -> TM closure", base.verdict, base.label).note = "base part leaves F_M";
        return report;
    }
    auto hinv = base_inverse(gens, l);
    if (!hinv) {
        report.fail("(ii) TA -> TM closure", "linear generators do not cover F_M");
        return report;
    }

    LieAlgebroid ta = tangent_algebroid(a);
    const ChartPtr& tchart = ta.chart();
    // L(xdot) = sum_g lambda_g(xdot) L_g, lambda = H^{-1} xdot_{<l}.
    linalg::ExprMatrix lx(k, std::vector<Expr>(k));
    for (std::size_t g = 0; g < l; ++g) {
        Expr lambda;
        for (std::size_t i = 0; i < l; ++i) lambda += (*hinv)[g][i] * Expr::var(n + i);
        for (std::size_t al = 0; al < k; ++al)
            for (std::size_t be = 0; be < k; ++be)
                if (!gens.linear[g].matrix[al][be].is_zero_literal()) lx[al][be] += lambda * gens.linear[g].matrix[al][be];
    }
    std::vector<Expr> restriction;
    for (std::size_t i = 0; i < 2 * n; ++i)
        restriction.push_back(i >= n + l ? Expr(0) : Expr::var(i));
    auto restrict = [&](const Section& v) {
        Section out;
        for (const auto& e : v) out.push_back(simplify(substitute(e, restriction)));
        return out;
    };

    std::vector<Section> lifts, cores;
    std::vector<std::string> lift_names, core_names;
    for (std::size_t be = 0; be < k; ++be) {
        Section sec(2 * k);
        sec[be] = Expr(1);
        for (std::size_t al = 0; al < k; ++al) sec[k + al] = simplify(lx[al][be]);
        lifts.push_back(std::move(sec));
        lift_names.push_back("S" + std::to_string(be + 1));
    }
    for (std::size_t j = 0; j < gens.core.size(); ++j) {
        cores.push_back(tangent_lift_core(a, gens.core[j]));
        core_names.push_back("c" + std::to_string(j + 1) + "^");
    }
    std::vector<Section> all;
    for (const auto& v : lifts) all.push_back(restrict(v));
    for (const auto& v : cores) all.push_back(restrict(v));
    Frame span(tchart, 2 * k, all);
    Frame core_span(tchart, 2 * k, cores);

    Worst closure;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            closure.add(membership(restrict(tangent_bracket(ta, lifts[i], lifts[j])), span, s), pair(lift_names[i], lift_names[j]));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < cores.size(); ++j)
            closure.add(membership(restrict(tangent_bracket(ta, lifts[i], cores[j])), core_span, s),
                        pair(lift_names[i], core_names[j]));
    report.add("(ii) TA -> TM closure", closure.verdict, closure.label);

    Worst tangent;
    auto check_anchor = [&](const Section& g, const std::string& name) {
        VectorField v = anchor_apply(ta, g);
        std::vector<Expr> normal;
        for (std::size_t i = n + l; i < 2 * n; ++i) normal.push_back(simplify(substitute(v[i], restriction)));
        tangent.add(is_zero(normal, *tchart, s), name);
    };
    for (std::size_t i = 0; i < k; ++i) check_anchor(lifts[i], lift_names[i]);
    for (std::size_t j = 0; j < cores.size(); ++j) check_anchor(cores[j], core_names[j]);
    report.add("(iii) anchor tangent to F_M", tangent.verdict, tangent.label);
    return report;
}

Extraction extract_nabla(const MorphicFoliation& fa, const LieAlgebroid& a, const SampleSpec& spec,
                         const std::optional<std::vector<Section>>& complement) {
    Report report("extract");
    report.set_certificate(fa.certificate);
    SampleSpec s = tier_spec(spec, fa.certificate);
    const auto n = fa.base_dim;
    const auto k = fa.rank;
    const auto l = fa.l;
    Generators gens = classify(fa);
    for (std::size_t g = 0; g < gens.linear.size(); ++g)
        for (std::size_t i = l; i < n; ++i)
            if (!gens.linear[g].base[i].is_zero_literal() && !is_zero(gens.linear[g].base[i], *a.chart(), s).holds())
                throw std::invalid_argument("linear generator " + std::to_string(g + 1) + " has a base part outside F_M");
    auto hinv = base_inverse(gens, l);
    if (!hinv) throw std::invalid_argument("linear generators do not cover the F_M directions");

    std::vector<Section> q;
    if (complement) {
        q = *complement;
    } else {
        std::vector<Section> chosen = gens.core;
        for (std::size_t al = 0; al < k && chosen.size() < k; ++al) {
            auto trial = chosen;
            trial.push_back(a.unit(al));
            if (independence(Frame(a.chart(), k, trial), s).holds()) {
                chosen = std::move(trial);
                q.push_back(a.unit(al));
            }
        }
    }
    std::vector<Section> basis = gens.core;
    basis.insert(basis.end(), q.begin(), q.end());
    Expansion expansion(Frame(a.chart(), k, basis));
    const auto r = gens.core.size();

    // Y_i = sum_g Hinv[g][i] X_g lies over d_i.
    auto combined = [&](std::size_t i, bool perturb) {
        std::vector<Expr> comps(n + k);
        comps[i] = Expr(1);
        for (std::size_t al = 0; al < k; ++al) {
            Expr sum;
            for (std::size_t g = 0; g < l; ++g) {
                if ((*hinv)[g][i].is_zero_literal()) continue;
                const auto& lin = gens.linear[g];
                Expr fiber = lin.offset[al];
                for (std::size_t be = 0; be < k; ++be) fiber += lin.matrix[al][be] * Expr::var(n + be);
                sum += (*hinv)[g][i] * fiber;
            }
            if (perturb) {
                Expr ones;
                for (std::size_t be = 0; be < k; ++be) ones += Expr::var(n + be);
                for (const auto& c : gens.core) sum += c[al] * ones;
            }
            comps[n + al] = simplify(sum);
        }
        return VectorField(fa.total, std::move(comps));
    };
    auto gamma_from = [&](bool perturb) {
        GammaTensor g(l, linalg::ExprMatrix(q.size(), std::vector<Expr>(q.size())));
        for (std::size_t i = 0; i < l; ++i) {
            VectorField y = combined(i, perturb);
            for (std::size_t al = 0; al < q.size(); ++al) {
                auto c = expansion.coefficients(covariant_d(a, y, q[al]));
                for (std::size_t be = 0; be < q.size(); ++be) g[i][al][be] = c[r + be];
            }
        }
        return g;
    };
    GammaTensor gamma = gamma_from(false);
    if (r > 0 && l > 0) {
        GammaTensor perturbed = gamma_from(true);
        std::vector<Expr> diffs;
        for (std::size_t i = 0; i < l; ++i)
            for (std::size_t al = 0; al < q.size(); ++al)
                for (std::size_t be = 0; be < q.size(); ++be) diffs.push_back(perturbed[i][al][be] - gamma[i][al][be]);
        report.add("lift independence (core-valued perturbation)", is_zero(diffs, *a.chart(), s));
    } else {
        report.pass("lift independence (core-valued perturbation)", "no core directions to perturb");
    }
    return Extraction{PartialConnection(a, l, gens.core, q, std::move(gamma)), std::move(report)};
}

Quotient quotient(const IMFoliation& im, const SampleSpec& spec) {
    Quotient out{std::nullopt, Report("quotient")};
    Report& report = out.report;
    const auto& conn = im.connection;
    const auto& a = conn.algebroid();
    const auto n = a.dimension();
    const auto l = conn.leaves();
    const auto q = conn.quotient_rank();

    ParallelFrame pf;
    try {
        pf = im_parallel_frame(im, spec);
    } catch (const NotFlat&) {
        report.append(check_im_with(im, spec, std::nullopt), "check-im: ");
        return out;
    } catch (const NotParallel& e) {
        report.append(check_im_with(im, spec, std::nullopt), "check-im: ");
        return out;
    }
    report.append(check_im_with(im, spec, pf), "check-im: ");
    report.set_certificate(pf.certificate);
    if (!report.passed()) return out;
    report.append(holonomy_trivial(conn, spec), "holonomy: ");
    if (!report.passed()) return out;
    SampleSpec s = tier_spec(spec, pf.certificate);

    std::vector<Section> full = pf.sections;
    full.insert(full.end(), conn.core().begin(), conn.core().end());
    Expansion expansion(Frame(conn.chart(), a.rank(), full));

    StructureTensor c(q, linalg::ExprMatrix(q, std::vector<Expr>(q)));
    for (std::size_t al = 0; al < q; ++al)
        for (std::size_t be = al + 1; be < q; ++be) {
            auto w = expansion.coefficients(bracket(a, pf.sections[al], pf.sections[be]));
            for (std::size_t g = 0; g < q; ++g) {
                c[g][al][be] = w[g];
                c[g][be][al] = simplify(-w[g]);
            }
        }
    linalg::ExprMatrix anchor(n - l, std::vector<Expr>(q));
    for (std::size_t al = 0; al < q; ++al) {
        auto v = anchor_apply(a, pf.sections[al]);
        for (std::size_t i = l; i < n; ++i) anchor[i - l][al] = simplify(v[i]);
    }

    Worst constancy;
    auto leaf_constant = [&](const Expr& e, const std::string& what) {
        std::vector<Expr> d;
        for (std::size_t i = 0; i < l; ++i) d.push_back(diff(e, i));
        constancy.add(is_zero(d, *conn.chart(), s), what);
    };
    for (std::size_t g = 0; g < q; ++g)
        for (std::size_t al = 0; al < q; ++al)
            for (std::size_t be = al + 1; be < q; ++be)
                leaf_constant(c[g][al][be], "C[" + std::to_string(g + 1) + "][" + std::to_string(al + 1) + "][" +
                                                std::to_string(be + 1) + "]");
    for (std::size_t i = 0; i < n - l; ++i)
        for (std::size_t al = 0; al < q; ++al)
            leaf_constant(anchor[i][al], "rho[" + std::to_string(i + 1) + "][" + std::to_string(al + 1) + "]");
    report.add("leaf-constancy", constancy.verdict, constancy.label);
    if (!constancy.verdict.holds()) return out;

    // Restrict to the transversal through the box center.
    std::vector<Expr> to_transversal(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < l) {
            double center = conn.chart()->interval(i).center();
            auto exact = Rational::from_double(center);
            to_transversal[i] = exact ? Expr(*exact) : Expr::real(center);
        } else {
            to_transversal[i] = Expr::var(i - l);
        }
    }
    std::vector<std::string> tnames;
    std::vector<Interval> tbox;
    for (std::size_t i = l; i < n; ++i) {
        tnames.push_back(conn.chart()->name(i));
        tbox.push_back(conn.chart()->interval(i));
    }
    ChartPtr transversal = l == n ? std::make_shared<const Chart>(Chart::point()) : make_chart(tnames, tbox);
    for (auto& m : c)
        for (auto& row : m)
            for (auto& e : row) e = simplify(substitute(e, to_transversal));
    for (auto& row : anchor)
        for (auto& e : row) e = simplify(substitute(e, to_transversal));
    LieAlgebroid result(transversal, q, std::move(anchor), std::move(c));
    Report axioms = check_axioms(result, s);
    for (auto e : axioms.entries()) {
        e.certificate = pf.certificate;
        e.name = "quotient " + e.name;
        report.add(std::move(e));
    }
    out.algebroid = std::move(result);
    return out;
}

Report roundtrip(const IMFoliation& im, const SampleSpec& spec) {
    Report report("roundtrip");
    ParallelFrame pf;
    try {
        pf = im_parallel_frame(im, spec);
    } catch (const std::exception&) {
        report.append(check_im_with(im, spec, std::nullopt), "check-im: ");
        if (report.passed()) report.fail("parallel frame", "unobtainable");
        return report;
    }
    report.append(check_im_with(im, spec, pf), "check-im: ");
    report.set_certificate(pf.certificate);
    if (!report.passed()) return report;
    SampleSpec s = tier_spec(spec, pf.certificate);

    MorphicFoliation fa = construct_with(im, pf);
    report.append(check_morphic(fa, im.algebroid(), spec), "check-morphic: ");
    Extraction ex = extract_nabla(fa, im.algebroid(), spec, im.connection.complement());
    report.append(ex.report, "extract: ");

    std::vector<Expr> diffs;
    const auto& want = im.connection.gamma();
    const auto& got = ex.connection.gamma();
    for (std::size_t i = 0; i < want.size(); ++i)
        for (std::size_t al = 0; al < want[i].size(); ++al)
            for (std::size_t be = 0; be < want[i][al].size(); ++be) diffs.push_back(got[i][al][be] - want[i][al][be]);
    report.add("gamma difference", is_zero(diffs, *im.algebroid().chart(), s));
    return report;
}

}  // namespace morphic
