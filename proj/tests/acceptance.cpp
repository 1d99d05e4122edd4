// Acceptance run: one PASS/FAIL line per criterion, nonzero exit when any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "morphic/cli.hpp"
#include "morphic/gallery.hpp"
#include "morphic/model.hpp"
#include "morphic/sampling.hpp"

using namespace morphic;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (passed) detail = what;
            passed = false;
        }
    }
};

struct Fixture {
    std::string name;
    IMFoliation im;
    SampleSpec spec;
};

// Every gallery model that carries an IM-foliation, directly or through a
// Dirac structure with a characteristic subframe.
std::vector<Fixture> im_fixtures() {
    std::vector<Fixture> out;
    for (const auto& g : gallery()) {
        Model m = parse_model(g.model, g.name);
        if (m.im) out.push_back({g.name, m.im_foliation(), m.sampling});
        else if (m.dirac)
            out.push_back({g.name, dirac_im(m.dirac_frame(), m.dirac->characteristic, m.sampling), m.sampling});
    }
    return out;
}

bool gamma_literally_zero(const PartialConnection& c) {
    for (const auto& gi : c.gamma())
        for (const auto& row : gi)
            for (const auto& e : row)
                if (!simplify(e).is_zero_literal()) return false;
    return true;
}

bool structure_literally_zero(const LieAlgebroid& a) {
    for (const auto& g : a.structure())
        for (const auto& row : g)
            for (const auto& e : row)
                if (!simplify(e).is_zero_literal()) return false;
    return true;
}

struct Run {
    int code;
    std::string out;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "morphic");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str() + err.str()};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "morphic-acceptance";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write_example(const std::string& name) {
    auto path = scratch(name + ".json");
    std::ofstream(path) << find_gallery(name)->model;
    return path;
}

bool is_flat_fixture(const Fixture& f) {
    return is_flat(f.im.connection, f.spec).passed();
}

Outcome roundtrip_all() {
    Outcome o;
    std::size_t count = 0;
    double slowest = 0.0;
    for (const auto& f : im_fixtures()) {
        if (!check_im(f.im, f.spec).passed()) continue;
        ++count;
        auto t0 = std::chrono::steady_clock::now();
        Report r = roundtrip(f.im, f.spec);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        slowest = std::max(slowest, secs);
        o.require(r.passed(), f.name + ": round trip failed");
        o.require(secs < 5.0, f.name + ": took " + std::to_string(secs) + " s");
        const CheckEntry* diff = r.find("gamma difference");
        o.require(diff != nullptr, f.name + ": no gamma difference entry");
        if (!diff) continue;
        if (gamma_literally_zero(f.im.connection))
            o.require(diff->tier == Tier::SymbolicZero, f.name + ": gamma == 0 but difference not symbolic");
        else
            o.require(diff->passed() && diff->max_residual <= 1e-6,
                      f.name + ": gamma residual " + std::to_string(diff->max_residual));
    }
    o.require(count >= 5, "too few passing fixtures");
    if (o.passed)
        o.detail = std::to_string(count) + " fixtures, slowest " + std::to_string(slowest).substr(0, 5) + " s";
    return o;
}

Outcome constructed_fa_valid() {
    Outcome o;
    std::size_t count = 0;
    for (const auto& f : im_fixtures()) {
        if (!check_im(f.im, f.spec).passed()) continue;
        ++count;
        MorphicFoliation fa = construct_fa(f.im, f.spec);
        double bound = fa.certificate == Certificate::Numeric ? 1e-4 : 1e-8;
        Report r = check_morphic(fa, f.im.algebroid(), f.spec);
        for (const char* name : {"(i) involutive", "(ii) TA -> TM closure", "(iii) anchor tangent to F_M"}) {
            const CheckEntry* e = r.find(name);
            o.require(e != nullptr && e->passed() && e->max_residual <= bound,
                      f.name + ": " + name + (e ? " residual " + std::to_string(e->max_residual) : " missing"));
        }
    }
    if (o.passed) o.detail = std::to_string(count) + " fixtures, three sub-reports each";
    return o;
}

Outcome counterexamples() {
    Outcome o;
    Model nonideal = parse_model(find_gallery("nonideal-counterexample")->model, "nonideal");
    Report r = check_im(nonideal.im_foliation(), nonideal.sampling);
    const CheckEntry* c2 = r.find("(2) [parallel, F_core] in F_core");
    o.require(!r.passed() && c2 && !c2->passed() && !c2->witness.empty(), "non-ideal fixture: no witness at (2)");

    Model nonflat = parse_model(find_gallery("nonflat-counterexample")->model, "nonflat");
    Report rf = check_im(nonflat.im_foliation(), nonflat.sampling);
    const CheckEntry* c1 = rf.find("(1) nabla is flat");
    o.require(c1 && !c1->passed(), "curvature fixture passes (1)");

    for (const char* name : {"nonideal-counterexample", "nonflat-counterexample"}) {
        int code = cli({"check-im", "--model", write_example(name).string()}).code;
        o.require(code == 1, std::string(name) + ": exit code " + std::to_string(code));
    }
    if (o.passed && c2) o.detail = "(2) witness label " + c2->label + ", curvature at " + c1->label + ", exit 1";
    return o;
}

Outcome lie_algebra_case() {
    Outcome o;
    Model m = parse_model(find_gallery("heisenberg-ideal")->model, "heisenberg");
    IMFoliation im = m.im_foliation();
    MorphicFoliation fa = construct_fa(im, m.sampling);
    o.require(fa.l == 0 && fa.fields.size() == 1, "expected a single core generator");
    const std::size_t dim = fa.total->dimension();
    std::vector<Expr> da3(dim);
    da3[dim - 1] = Expr(1);
    Frame fa_frame = Frame::of_fields(fa.total, fa.fields);
    Frame core = Frame::of_fields(fa.total, {VectorField(fa.total, da3)});
    ZeroVerdict v = membership(da3, fa_frame, m.sampling);
    for (const auto& f : fa.fields) v.merge(membership(f.components(), core, m.sampling));
    o.require(v.tier == Tier::SymbolicZero && v.max_residual == 0.0, "mutual membership not symbolic");
    if (o.passed) o.detail = "F_A = span{d_a3}, mutual membership symbolic";
    return o;
}

Outcome dirac_pipeline() {
    Outcome o;
    Model m = parse_model(find_gallery("presymplectic-kernel")->model, "presymplectic");
    IMFoliation im = dirac_im(m.dirac_frame(), m.dirac->characteristic, m.sampling);
    o.require(check_im(im, m.sampling).passed(), "check_im fails");
    o.require(gamma_literally_zero(im.connection), "gamma is not literally zero");
    Quotient q = quotient(im, m.sampling);
    o.require(q.algebroid.has_value(), "no quotient");
    if (!q.algebroid) return o;
    const auto& a = *q.algebroid;
    o.require(a.rank() == 2, "quotient rank " + std::to_string(a.rank()));
    o.require(a.chart()->names() == std::vector<std::string>{"x1", "x2"}, "quotient base is not (x1, x2)");
    Report axioms = check_axioms(a, m.sampling);
    for (const auto& e : axioms.entries()) o.require(e.tier == Tier::SymbolicZero, "axiom " + e.name + " not symbolic");
    if (o.passed) o.detail = "gamma = 0, quotient rank 2 over (x1, x2), axioms symbolic";
    return o;
}

Outcome quotient_examples() {
    Outcome o;
    Model h = parse_model(find_gallery("heisenberg-ideal")->model, "heisenberg");
    Quotient qh = quotient(h.im_foliation(), h.sampling);
    o.require(qh.algebroid && structure_literally_zero(*qh.algebroid), "Heisenberg quotient is not abelian");

    Model t = parse_model(find_gallery("translation-action")->model, "translation");
    Quotient qt = quotient(t.im_foliation(), t.sampling);
    o.require(qt.algebroid.has_value(), "no translation quotient");
    if (!qt.algebroid) return o;
    const auto& a = *qt.algebroid;
    o.require(a.rank() == 1 && a.chart()->names() == std::vector<std::string>{"x2"},
              "translation quotient is not rank 1 over x2");
    if (a.rank() == 1 && a.dimension() == 1) {
        auto one = constant_value(simplify(a.anchor(0, 0)));
        o.require(one && one->is_one(), "anchor is not the identity");
    }
    o.require(structure_literally_zero(a), "translation quotient bracket is not zero");
    if (o.passed) o.detail = "Heisenberg/center abelian; translation quotient = T(x2)";
    return o;
}

Outcome holonomy() {
    Outcome o;
    std::size_t flat = 0;
    double worst_flat = 0.0;
    double worst_nonflat = 0.0;
    for (const auto& f : im_fixtures()) {
        SampleSpec s = f.spec;
        s.tol = 1e-6;
        Report r = holonomy_trivial(f.im.connection, s);
        const CheckEntry* e = r.find("loop defect");
        if (!e) {
            o.require(false, f.name + ": no loop defect entry");
            continue;
        }
        if (is_flat_fixture(f)) {
            ++flat;
            worst_flat = std::max(worst_flat, e->max_residual);
            o.require(e->passed() && e->max_residual <= 1e-6, f.name + ": loop defect " + std::to_string(e->max_residual));
        } else {
            worst_nonflat = std::max(worst_nonflat, e->max_residual);
        }
    }
    o.require(worst_nonflat > 1e-3, "non-flat loop defect " + std::to_string(worst_nonflat));
    if (o.passed) {
        std::ostringstream s;
        s << flat << " flat fixtures, worst " << worst_flat << "; non-flat defect " << worst_nonflat;
        o.detail = s.str();
    }
    return o;
}

Outcome flow_invariance() {
    Outcome o;
    std::size_t cases = 0;
    for (const auto& f : im_fixtures()) {
        if (!check_im(f.im, f.spec).passed()) continue;
        MorphicFoliation fa = construct_fa(f.im, f.spec);
        SampleSpec s = f.spec;
        s.tol = 1e-6;
        if (fa.certificate == Certificate::Numeric) s.samples = 10;
        Frame b(f.im.algebroid().chart(), f.im.algebroid().rank(), fa.fiber_frame);
        for (std::size_t i = 0; i < fa.l; ++i) {
            Report r = flow_invariance_check(fa.fields[i], b, s);
            bool hypothesis = true;
            for (const auto& e : r.entries())
                if (e.name.starts_with("(a)")) hypothesis = hypothesis && e.passed();
            if (!hypothesis) continue;
            ++cases;
            const CheckEntry* e = r.find("(b) flowed frame stays in B");
            o.require(e && e->passed(), f.name + ": X" + std::to_string(i + 1) + " flow leaves B, residual " +
                                            (e ? std::to_string(e->max_residual) : "?"));
        }
    }

    // D_X b = (0, 1) for X = d_x1 and b = (1, x1): not in span{b}.
    auto base = make_chart({"x1"}, {Interval{}});
    auto total = std::make_shared<const Chart>(total_space_chart(*base, 2));
    VectorField x(total, {Expr(1), Expr(0), Expr(0)});
    Frame bad(base, 2, {{Expr(1), parse("x1", *base)}});
    Report r = flow_invariance_check(x, bad, SampleSpec{});
    const CheckEntry* a = r.find("(a) D_X b1 in B");
    o.require(a && !a->passed(), "crafted case passes (a)");
    o.require(cases >= 5, "only " + std::to_string(cases) + " cases");
    if (o.passed) o.detail = std::to_string(cases) + " fields invariant; crafted case fails (a)";
    return o;
}

Outcome derivative_oracle() {
    Outcome o;
    auto chart = make_chart({"x", "y", "z"}, {Interval{-1, 1}, Interval{-1, 1}, Interval{-1, 1}});
    const std::vector<std::string> corpus = {
        "x*y*z",
        "x^5 - 3*x^2*y + 7",
        "sin(x)*cos(y)",
        "exp(x*y) + z",
        "1/(2 + x)",
        "x/(1 + y^2)",
        "(x + y)/(3 - z)",
        "1/(1 + 1/(2 + x^2))",
        "sin(1/(2 + y))",
        "cos(x^2 + y*z)",
        "exp(sin(x))*z^3",
        "sin(x)/(2 + cos(y))",
        "(x - y)^4/(5 + z)",
        "exp(-x^2)*cos(3*y)",
        "x^(-2) * 0 + 1/(4 + x + y + z)",
        "sin(cos(exp(x)))",
        "(1 + x*y)/(1 + x^2 + y^2)",
        "exp(x/(3 + y))",
        "y*sin(x*y) - z*cos(x*z)",
        "1/((2 + x)*(2 - y)*(3 + z))",
        "sin(x)^2 + cos(x)^2",
        "x*exp(y)/(2 + sin(z))",
        "((x + 2)/(y + 2))/((z + 2)/(x + 3))",
    };
    Sampler sampler(*chart, 12345);
    const double h = 1e-5;
    double worst = 0.0;
    std::size_t checks = 0;
    for (const auto& text : corpus) {
        Expr e = parse(text, *chart);
        std::vector<Expr> d;
        for (std::size_t i = 0; i < 3; ++i) d.push_back(diff(e, i));
        for (int k = 0; k < 100; ++k) {
            auto p = sampler.next();
            for (std::size_t i = 0; i < 3; ++i) {
                auto hi = p, lo = p;
                hi[i] += h;
                lo[i] -= h;
                double fd = (eval(e, hi) - eval(e, lo)) / (2 * h);
                double sym = eval(d[i], p);
                double rel = std::fabs(sym - fd) / std::max(1.0, std::fabs(sym));
                worst = std::max(worst, rel);
                ++checks;
                o.require(rel <= 1e-6, text + ": d/d" + chart->name(i) + " off by " + std::to_string(rel));
            }
        }
    }
    if (o.passed) {
        std::ostringstream s;
        s << corpus.size() << " expressions, " << checks << " derivatives, worst relative " << worst;
        o.detail = s.str();
    }
    return o;
}

Outcome determinism() {
    Outcome o;
    std::size_t runs = 0;
    for (const auto& g : gallery()) {
        auto model = write_example(g.name);
        std::string reports[2];
        for (int k = 0; k < 2; ++k) {
            auto report = scratch(g.name + "-report-" + std::to_string(k) + ".json");
            cli({g.command, "--model", model.string(), "--seed", "42", "--report", report.string()});
            reports[k] = slurp(report);
        }
        o.require(!reports[0].empty() && reports[0] == reports[1], g.name + ": reports differ");
        ++runs;
    }
    if (o.passed) o.detail = std::to_string(runs) + " commands, byte-identical reports";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"round trip", roundtrip_all},
        {"constructed F_A passes check_morphic", constructed_fa_valid},
        {"counterexamples fail", counterexamples},
        {"Lie algebra case", lie_algebra_case},
        {"Dirac pipeline", dirac_pipeline},
        {"quotient algebroids", quotient_examples},
        {"holonomy", holonomy},
        {"flow invariance", flow_invariance},
        {"derivative oracle", derivative_oracle},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.passed = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.passed) ++failures;
        std::cout << (o.passed ? "PASS " : "FAIL ") << (i + 1) << " " << criteria[i].first << ": " << o.detail
                  << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
