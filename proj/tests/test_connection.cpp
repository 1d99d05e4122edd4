#include <cmath>

#include "doctest.h"
#include "morphic/connection.hpp"
#include "morphic/sampling.hpp"

using namespace morphic;

namespace {

ChartPtr plane() { return make_chart({"x1", "x2"}, {{-1, 1}, {-1, 1}}); }

GammaTensor zero_gamma(std::size_t l, std::size_t q) {
    return GammaTensor(l, linalg::ExprMatrix(q, std::vector<Expr>(q)));
}

std::vector<Section> units(std::size_t k) {
    std::vector<Section> out;
    for (std::size_t a = 0; a < k; ++a) {
        Section s(k);
        s[a] = Expr(1);
        out.push_back(s);
    }
    return out;
}

// Rank-1 zero algebroid over (x1, x2), l = 2, Gamma^1_{11} = x2.
PartialConnection nonflat() {
    auto g = zero_gamma(2, 1);
    g[0][0][0] = Expr::var(1);
    return PartialConnection(LieAlgebroid::zero(plane(), 1), 2, {}, units(1), g);
}

// Rank-2 zero algebroid over (x1, x2), l = 1, nabla_1 Q̄_1 = Q̄_2. Parallel
// frame: P_1 = e1 - x1 e2, P_2 = e2.
PartialConnection shear() {
    auto g = zero_gamma(1, 2);
    g[0][0][1] = Expr(1);
    return PartialConnection(LieAlgebroid::zero(plane(), 2), 1, {}, units(2), g);
}

// Rank-1 over (x1, x2), l = 1, Gamma = c constant.
PartialConnection scalar(Expr c) {
    auto g = zero_gamma(1, 1);
    g[0][0][0] = c;
    return PartialConnection(LieAlgebroid::zero(plane(), 1), 1, {}, units(1), g);
}

}  // namespace

TEST_CASE("nabla basics") {
    auto c = make_chart({"x1", "x2", "x3"}, {{-1, 1}, {-1, 1}, {-1, 1}});
    PartialConnection conn(LieAlgebroid::zero(c, 2), 2, {units(2)[1]}, {units(2)[0]}, zero_gamma(2, 1));
    auto d1 = VectorField::coordinate(c, 0);
    CHECK(nabla(conn, d1, units(2)[0])[0].is_zero_literal());
    Section xq{Expr::var(0), Expr(0)};
    CHECK(nabla(conn, d1, xq)[0].is_one_literal());
    Section core{Expr(0), parse("x1*x2", *c)};
    CHECK(nabla(conn, d1, core)[0].is_zero_literal());
    CHECK_THROWS_AS(nabla(conn, VectorField::coordinate(c, 2), xq), std::invalid_argument);
}

TEST_CASE("nabla is tensorial and Leibniz") {
    auto c = plane();
    auto g = zero_gamma(2, 1);
    g[0][0][0] = parse("x1 + x2^2", *c);
    g[1][0][0] = parse("sin(x1)", *c);
    PartialConnection conn(LieAlgebroid::zero(c, 1), 2, {}, units(1), g);
    SampleSpec spec;
    VectorField x(c, {parse("x2", *c), parse("1 + x1^2", *c)});
    Expr f = parse("exp(x1*x2)", *c);
    Section a{parse("x1^3 - x2", *c)};
    auto lhs = nabla(conn, f * x, a);
    auto rhs = nabla(conn, x, a);
    CHECK(is_equal(lhs, std::vector<Expr>{f * rhs[0]}, *c, spec).holds());
    auto lf = nabla(conn, x, Section{f * a[0]});
    CHECK(is_equal(lf, std::vector<Expr>{apply(x, f) * a[0] + f * rhs[0]}, *c, spec).holds());
}

TEST_CASE("curvature") {
    SampleSpec spec;
    CHECK(is_flat(PartialConnection(LieAlgebroid::zero(plane(), 1), 2, {}, units(1), zero_gamma(2, 1)), spec)
              .entries()[0]
              .tier == Tier::SymbolicZero);
    CHECK(is_flat(scalar(Expr::var(1)), spec).passed());
    auto r = curvature(nonflat());
    CHECK(simplify(r[0][1][0][0] + Expr(1)).is_zero_literal());
    auto report = is_flat(nonflat(), spec);
    CHECK_FALSE(report.passed());
    CHECK(report.entries()[0].label == "(d1, d2)");
    CHECK(report.entries()[0].witness.size() == 2);
}

TEST_CASE("parallel transport") {
    std::vector<double> p{-0.5, 0.2};
    auto zero = PartialConnection(LieAlgebroid::zero(plane(), 1), 1, {}, units(1), zero_gamma(1, 1));
    CHECK(parallel_transport(zero, p, {{0, 0.9}}, {2.0})[0] == 2.0);
    auto f = parallel_transport(scalar(Expr(Rational(3, 2))), p, {{0, 1.2}}, {1.0});
    CHECK(std::fabs(f[0] - std::exp(-1.5 * 1.2)) < 1e-6);

    // Flat, x-dependent: Gamma_1 = x2, Gamma_2 = x1 (= d(x1 x2)).
    auto g = zero_gamma(2, 1);
    g[0][0][0] = Expr::var(1);
    g[1][0][0] = Expr::var(0);
    PartialConnection flat(LieAlgebroid::zero(plane(), 1), 2, {}, units(1), g);
    CHECK(is_flat(flat, SampleSpec{}).passed());
    auto a = parallel_transport(flat, p, {{0, 0.7}, {1, -0.9}}, {1.0});
    auto b = parallel_transport(flat, p, {{1, -0.9}, {0, 0.7}}, {1.0});
    CHECK(std::fabs(a[0] - b[0]) < 1e-6);
    // Closed form f = exp(x1 x2 at start - x1 x2 at end).
    CHECK(std::fabs(a[0] - std::exp(p[0] * p[1] - 0.2 * -0.7)) < 1e-6);
    CHECK_THROWS_AS(parallel_transport(flat, p, {{0, 2.0}}, {1.0}), FlowError);
}

TEST_CASE("parallel frames: symbolic tiers") {
    SampleSpec spec;
    auto zero = PartialConnection(LieAlgebroid::zero(plane(), 2), 1, {}, units(2), zero_gamma(1, 2));
    auto pf = parallel_frame(zero, spec);
    CHECK(pf.certificate == Certificate::Symbolic);
    CHECK(pf.method == "complement");

    auto one = scalar(Expr(1));
    std::vector<Section> candidate{Section{parse("exp(-x1)", *plane())}};
    auto checked = parallel_frame(one, spec, candidate);
    CHECK(checked.method == "candidate");
    for (const auto& e : nabla(one, VectorField::coordinate(one.chart(), 0), checked.sections[0]))
        CHECK(e.is_zero_literal());
    std::vector<Section> wrong{Section{parse("exp(x1)", *plane())}};
    CHECK_THROWS_AS(parallel_frame(one, spec, wrong), NotParallel);

    auto closed = parallel_frame(one, spec);
    CHECK(closed.method == "constant-exponential");
    CHECK(simplify(closed.sections[0][0] - exp(-Expr::var(0))).is_zero_literal());

    auto sh = parallel_frame(shear(), spec);
    CHECK(sh.method == "constant-exponential");
    CHECK(simplify(sh.sections[0][1] + Expr::var(0)).is_zero_literal());
    CHECK(sh.sections[0][0].is_one_literal());

    CHECK_THROWS_AS(parallel_frame(nonflat(), spec), NotFlat);
}

TEST_CASE("F_M-invariant multiples of parallel sections are parallel") {
    auto conn = shear();
    auto pf = parallel_frame(conn, SampleSpec{});
    Expr f = parse("sin(x2) + x2^3", *plane());
    Section s;
    for (const auto& e : pf.sections[0]) s.push_back(f * e);
    for (const auto& e : nabla(conn, VectorField::coordinate(conn.chart(), 0), s)) CHECK(simplify(e).is_zero_literal());
}

TEST_CASE("parallel frames: grid tier") {
    SampleSpec spec;
    auto conn = shear();
    auto pf = parallel_frame(conn, spec, std::nullopt, FrameMethod::Grid);
    CHECK(pf.certificate == Certificate::Numeric);
    CHECK(pf.method == "grid");
    auto d1 = VectorField::coordinate(conn.chart(), 0);
    SampleSpec loose = spec;
    loose.tol = 1e-4;
    for (const auto& s : pf.sections) CHECK(is_zero(nabla(conn, d1, s), *conn.chart(), loose).holds());
    std::vector<double> p{0.37, -0.61};
    CHECK(eval(pf.sections[0][1], p) == doctest::Approx(-0.37).epsilon(1e-9));

    // Nonlinear transport: exact at grid nodes, O(h^2) between them.
    auto one = scalar(Expr(1));
    auto grid = parallel_frame(one, spec, std::nullopt, FrameMethod::Grid);
    std::vector<double> node{0.5, 0.25};
    CHECK(std::fabs(eval(grid.sections[0][0], node) - std::exp(-0.5)) < 1e-9);
    std::vector<double> between{0.3, 0.1};
    CHECK(std::fabs(eval(grid.sections[0][0], between) - std::exp(-0.3)) < 1e-2);
}

TEST_CASE("holonomy") {
    SampleSpec spec;
    auto flat = PartialConnection(LieAlgebroid::zero(plane(), 1), 2, {}, units(1), zero_gamma(2, 1));
    CHECK(holonomy_trivial(flat, spec).passed());
    auto g = zero_gamma(2, 1);
    g[0][0][0] = Expr::var(1);
    g[1][0][0] = Expr::var(0);
    PartialConnection exact(LieAlgebroid::zero(plane(), 1), 2, {}, units(1), g);
    auto r = holonomy_trivial(exact, spec);
    CHECK(r.passed());
    CHECK(r.entries()[0].max_residual < 1e-6);
    auto bad = holonomy_trivial(nonflat(), spec);
    CHECK_FALSE(bad.passed());
    CHECK(bad.entries()[0].max_residual > 1e-3);
    CHECK(holonomy_trivial(shear(), spec).passed());
}
