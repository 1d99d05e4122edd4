#include <cmath>

#include "doctest.h"
#include "morphic/foliation.hpp"
#include "morphic/geometry.hpp"
#include "morphic/sampling.hpp"

using namespace morphic;

namespace {

ChartPtr plane() { return make_chart({"x1", "x2"}, {{-1, 1}, {-1, 1}}); }

VectorField field(const ChartPtr& c, std::vector<std::string> comps) {
    std::vector<Expr> e;
    for (const auto& s : comps) e.push_back(parse(s, *c));
    return VectorField(c, std::move(e));
}

OneForm form(const ChartPtr& c, std::vector<std::string> comps) {
    std::vector<Expr> e;
    for (const auto& s : comps) e.push_back(parse(s, *c));
    return OneForm(c, std::move(e));
}

bool symbolic_equal(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!simplify(a[i] - b[i]).is_zero_literal()) return false;
    return true;
}

}  // namespace

TEST_CASE("lie bracket examples") {
    auto c = plane();
    CHECK(symbolic_equal(lie_bracket(field(c, {"1", "0"}), field(c, {"x1", "0"})).components(),
                         field(c, {"1", "0"}).components()));
    auto x = field(c, {"x1*x2^2", "sin(x1)"});
    CHECK(symbolic_equal(lie_bracket(x, x).components(), VectorField::zero(c).components()));
    CHECK(symbolic_equal(lie_bracket(field(c, {"0", "x1"}), field(c, {"x2", "0"})).components(),
                         field(c, {"x1", "-x2"}).components()));
}

TEST_CASE("lie bracket satisfies Jacobi") {
    auto c = make_chart({"x", "y", "z"}, {{-1, 1}, {-1, 1}, {-1, 1}});
    auto x = field(c, {"y*z", "x^2", "sin(y)"});
    auto y = field(c, {"exp(x)", "z", "x*y"});
    auto z = field(c, {"1", "y^3", "cos(x*z)"});
    auto j = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) + lie_bracket(z, lie_bracket(x, y));
    CHECK(is_zero(j.components(), *c, SampleSpec{}).holds());
}

TEST_CASE("cartan calculus") {
    auto c = plane();
    auto df = d0(c, parse("x1*x2", *c));
    CHECK(symbolic_equal(df.components(), form(c, {"x2", "x1"}).components()));
    auto ddf = d1(d0(c, parse("exp(x1)*x2", *c)));
    for (const auto& row : ddf.entries())
        for (const auto& e : row) CHECK(e.is_zero_literal());
    TwoForm w(c, {{Expr(0), Expr(1)}, {Expr(-1), Expr(0)}});
    CHECK(symbolic_equal(interior(VectorField::coordinate(c, 0), w).components(), form(c, {"0", "1"}).components()));
    CHECK_THROWS(TwoForm(c, {{Expr(0), Expr(1)}, {Expr(1), Expr(0)}}));

    auto x = field(c, {"x2^2", "sin(x1)"});
    auto xi = form(c, {"x1*x2", "exp(x2)"});
    auto lhs = lie_derivative_oneform(x, xi);
    auto rhs = interior(x, d1(xi)) + d0(c, pairing(xi, x));
    CHECK(is_equal(lhs.components(), rhs.components(), *c, SampleSpec{}).holds());

    auto f = parse("x1^2*cos(x2)", *c);
    CHECK(is_equal(lie_derivative_oneform(x, d0(c, f)).components(), d0(c, apply(x, f)).components(), *c,
                   SampleSpec{})
              .holds());
}

TEST_CASE("rk4 flows") {
    auto c = plane();
    auto p = flow(field(c, {"1", "0"}), std::vector<double>{0, 0}, 1.0);
    CHECK(p[0] == doctest::Approx(1.0));
    CHECK(p[1] == doctest::Approx(0.0));

    auto line = make_chart({"x1"}, {{0, 3}});
    auto e = flow(field(line, {"x1"}), std::vector<double>{1}, 1.0);
    CHECK(std::fabs(e[0] - std::exp(1.0)) < 1e-6);

    std::vector<double> start{0.3, -0.2};
    CHECK(flow(field(c, {"x2", "x1"}), start, 0.0) == start);

    // Rotation field: closed form (x cos t - y sin t, x sin t + y cos t).
    auto rot = field(c, {"-x2", "x1"});
    auto r = flow(rot, start, 0.4);
    CHECK(std::fabs(r[0] - (0.3 * std::cos(0.4) + 0.2 * std::sin(0.4))) < 1e-9);
    CHECK(std::fabs(r[1] - (0.3 * std::sin(0.4) - 0.2 * std::cos(0.4))) < 1e-9);

    auto back = flow(rot, r, -0.4);
    CHECK(std::fabs(back[0] - start[0]) < 1e-6);
    CHECK(std::fabs(back[1] - start[1]) < 1e-6);

    auto x = field(c, {"sin(x2)/3", "x1*x2/2"});
    auto two = flow(x, flow(x, start, 0.3), 0.2);
    auto one = flow(x, start, 0.5);
    CHECK(std::fabs(two[0] - one[0]) < 1e-6);
    CHECK(std::fabs(two[1] - one[1]) < 1e-6);

    try {
        flow(field(c, {"1", "0"}), start, 2.0);
        FAIL("expected FlowError");
    } catch (const FlowError& err) {
        CHECK(err.step() == 701);
    }
}

TEST_CASE("linear field recognition and D_X") {
    auto base = make_chart({"x"}, {{-1, 1}});
    auto total = std::make_shared<const Chart>(total_space_chart(*base, 2));
    auto x = field(total, {"1", "a1", "0"});
    auto lin = decompose_linear(x, 1);
    auto d = covariant_d(lin, std::vector<Expr>{Expr(1), Expr(0)});
    CHECK(d[0].is_one_literal() == false);
    CHECK(simplify(d[0] + Expr(1)).is_zero_literal());
    CHECK(d[1].is_zero_literal());
    CHECK_THROWS_AS(decompose_linear(field(total, {"a1", "0", "0"}), 1), NonLinearField);
    try {
        decompose_linear(field(total, {"1", "a1*a2", "0"}), 1);
        FAIL("expected NonLinearField");
    } catch (const NonLinearField& e) {
        CHECK(e.component() == 1);
    }
}

TEST_CASE("flow invariance examples") {
    auto base = make_chart({"x"}, {{-1, 1}});
    auto total = std::make_shared<const Chart>(total_space_chart(*base, 2));
    SampleSpec spec;
    spec.samples = 20;
    Frame e1(base, 2, {{Expr(1), Expr(0)}});
    Frame e2(base, 2, {{Expr(0), Expr(1)}});

    auto x = field(total, {"1", "a1", "0"});
    auto r1 = flow_invariance_check(x, e1, spec);
    CHECK(r1.passed());
    CHECK(r1.entries()[0].tier == Tier::SymbolicZero);
    CHECK(flow_invariance_check(x, e2, spec).passed());

    auto shear = field(total, {"1", "a2", "0"});
    CHECK(flow_invariance_check(shear, e1, spec).passed());
    auto bad = flow_invariance_check(shear, e2, spec);
    CHECK_FALSE(bad.entries()[0].passed());
    CHECK_FALSE(bad.entries()[1].passed());

    // Affine field with an x-dependent frame: D_X b = 0 for b = (1, x).
    auto affine = field(total, {"1", "x", "a1"});
    Frame tilted(base, 2, {{Expr(1), Expr::var(0)}});
    CHECK(flow_invariance_check(affine, tilted, spec).passed());
}
