#include <cmath>

#include "doctest.h"
#include "morphic/algebroid.hpp"
#include "morphic/sampling.hpp"

using namespace morphic;

namespace {

ChartPtr line() { return make_chart({"x1"}, {{-1, 1}}); }

StructureTensor empty_structure(std::size_t k) {
    return StructureTensor(k, linalg::ExprMatrix(k, std::vector<Expr>(k)));
}

LieAlgebroid heisenberg() {
    auto c = line();
    auto s = empty_structure(3);
    s[2][0][1] = Expr(1);
    s[2][1][0] = Expr(-1);
    return LieAlgebroid(c, 3, linalg::ExprMatrix(1, std::vector<Expr>(3)), s);
}

// [e1,e2] = x1 e3, [e2,e3] = e1, [e1,e3] = e1, zero anchor.
LieAlgebroid corrupted() {
    auto c = line();
    auto s = empty_structure(3);
    s[2][0][1] = Expr::var(0);
    s[2][1][0] = -Expr::var(0);
    s[0][1][2] = Expr(1);
    s[0][2][1] = Expr(-1);
    s[0][0][2] = Expr(1);
    s[0][2][0] = Expr(-1);
    return LieAlgebroid(c, 3, linalg::ExprMatrix(1, std::vector<Expr>(3)), s);
}

// Jacobiator of frame elements for a bundle of Lie algebras, from the
// numeric structure constants alone.
double jacobiator_norm(const LieAlgebroid& a, std::span<const double> p, std::size_t i, std::size_t j, std::size_t l) {
    const auto k = a.rank();
    auto c = [&](std::size_t g, std::size_t x, std::size_t y) { return eval(a.structure(g, x, y), p); };
    double worst = 0.0;
    for (std::size_t g = 0; g < k; ++g) {
        double s = 0.0;
        for (std::size_t m = 0; m < k; ++m)
            s += c(m, i, j) * c(g, m, l) + c(m, j, l) * c(g, m, i) + c(m, l, i) * c(g, m, j);
        worst = std::max(worst, std::fabs(s));
    }
    return worst;
}

Section sec(const Chart& c, std::vector<std::string> s) {
    Section out;
    for (const auto& t : s) out.push_back(parse(t, c));
    return out;
}

bool same(const Section& a, const Section& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!simplify(a[i] - b[i]).is_zero_literal()) return false;
    return true;
}

}  // namespace

TEST_CASE("heisenberg bracket and axioms") {
    auto h = heisenberg();
    CHECK(same(bracket(h, h.unit(0), h.unit(1)), h.unit(2)));
    auto a = sec(*h.chart(), {"x1", "2", "x1^2"});
    CHECK(same(bracket(h, a, a), h.zero_section()));
    CHECK(same(anchor_apply(h, h.unit(0)).components(), std::vector<Expr>{Expr(0)}));
    auto r = check_axioms(h, SampleSpec{});
    CHECK(r.passed());
    for (const auto& e : r.entries()) CHECK(e.tier == Tier::SymbolicZero);
}

TEST_CASE("corrupted structure functions fail Jacobi") {
    auto a = corrupted();
    std::vector<double> p{0.5};
    CHECK(jacobiator_norm(a, p, 0, 1, 2) == doctest::Approx(0.5));
    auto r = check_axioms(a, SampleSpec{});
    const auto* j = r.find("Jacobi");
    REQUIRE(j);
    CHECK(j->tier == Tier::NonZero);
    CHECK(j->label == "(e1, e2, e3)");
    REQUIRE(j->witness.size() == 1);
    CHECK(j->max_residual == doctest::Approx(jacobiator_norm(a, j->witness, 0, 1, 2)));
    CHECK(r.find("antisymmetry")->passed());
}

TEST_CASE("tangent bundle bracket matches vector field bracket") {
    auto c = make_chart({"x1", "x2"}, {{-1, 1}, {-1, 1}});
    auto tm = LieAlgebroid::tangent_bundle(c);
    auto a = sec(*c, {"0", "x1"}), b = sec(*c, {"x2", "0"});
    auto br = bracket(tm, a, b);
    CHECK(same(br, sec(*c, {"x1", "-x2"})));
    CHECK(same(br, lie_bracket(anchor_apply(tm, a), anchor_apply(tm, b)).components()));
    CHECK(check_axioms(tm, SampleSpec{}).passed());
}

TEST_CASE("non-antisymmetric structure is rejected") {
    auto s = empty_structure(2);
    s[0][0][1] = Expr(1);
    CHECK_THROWS_AS(LieAlgebroid(line(), 2, linalg::ExprMatrix(1, std::vector<Expr>(2)), s), std::invalid_argument);
}

TEST_CASE("tangent lifts") {
    auto h = heisenberg();
    auto ta = tangent_algebroid(h);
    CHECK(ta.rank() == 6);
    CHECK(ta.dimension() == 2);
    auto constant = sec(*h.chart(), {"1", "2", "0"});
    CHECK(same(tangent_lift_linear(h, constant), sec(*ta.chart(), {"1", "2", "0", "0", "0", "0"})));
    auto core = tangent_lift_core(h, sec(*h.chart(), {"x1", "1", "0"}));
    CHECK(core[0].is_zero_literal());
    CHECK(core[1].is_zero_literal());
    CHECK(core[2].is_zero_literal());
    auto lin = tangent_lift_linear(h, sec(*h.chart(), {"x1", "0", "0"}));
    CHECK(same(lin, sec(*ta.chart(), {"x1", "0", "0", "dx1", "0", "0"})));

    CHECK(same(tangent_bracket(ta, tangent_lift_linear(h, h.unit(0)), tangent_lift_linear(h, h.unit(1))),
               tangent_lift_linear(h, h.unit(2))));
    CHECK(same(tangent_bracket(ta, tangent_lift_core(h, h.unit(0)), tangent_lift_core(h, h.unit(1))),
               ta.zero_section()));
    CHECK(check_axioms(ta, SampleSpec{}).passed());
}

TEST_CASE("tangent bracket generator laws on TM") {
    auto c = make_chart({"x1", "x2"}, {{-1, 1}, {-1, 1}});
    auto tm = LieAlgebroid::tangent_bundle(c);
    auto ta = tangent_algebroid(tm);
    auto a = sec(*c, {"0", "x1"}), b = sec(*c, {"1", "0"});
    auto lhs = tangent_bracket(ta, tangent_lift_linear(tm, a), tangent_lift_core(tm, b));
    CHECK(same(lhs, tangent_lift_core(tm, sec(*c, {"0", "-1"}))));

    // [Ta, Tb] = T[a, b] for x-dependent structure functions.
    auto s = empty_structure(2);
    s[0][0][1] = parse("x1*x2", *c);
    s[0][1][0] = parse("-x1*x2", *c);
    linalg::ExprMatrix anchor{{parse("x2", *c), Expr(0)}, {Expr(1), parse("x1", *c)}};
    LieAlgebroid a2(c, 2, anchor, s);
    auto ta2 = tangent_algebroid(a2);
    auto u = sec(*c, {"x1^2", "sin(x2)"}), v = sec(*c, {"x2", "x1*x2"});
    auto lhs2 = tangent_bracket(ta2, tangent_lift_linear(a2, u), tangent_lift_linear(a2, v));
    auto rhs2 = tangent_lift_linear(a2, bracket(a2, u, v));
    CHECK(is_equal(lhs2, rhs2, *ta2.chart(), SampleSpec{}).holds());
    auto lhs3 = tangent_bracket(ta2, tangent_lift_linear(a2, u), tangent_lift_core(a2, v));
    CHECK(is_equal(lhs3, tangent_lift_core(a2, bracket(a2, u, v)), *ta2.chart(), SampleSpec{}).holds());
}

TEST_CASE("core fields and D_X") {
    auto base = make_chart({"x"}, {{-1, 1}});
    auto a = LieAlgebroid::zero(base, 2);
    auto total = std::make_shared<const Chart>(total_space_chart(*base, 2));
    auto horizontal = as_total_space_field(total, a, VectorField::coordinate(base, 0),
                                           linalg::ExprMatrix(2, std::vector<Expr>(2)));
    auto s = sec(*base, {"x^2", "sin(x)"});
    CHECK(same(covariant_d(a, horizontal, s), sec(*base, {"2*x", "cos(x)"})));

    auto x = VectorField(total, {Expr(1), Expr::var(1), Expr(0)});
    CHECK(same(covariant_d(a, x, a.unit(0)), sec(*base, {"-1", "0"})));

    auto up1 = core_field(total, a, s), up2 = core_field(total, a, sec(*base, {"x", "1"}));
    auto commutator = lie_bracket(up1, up2);
    for (const auto& e : commutator.components()) CHECK(e.is_zero_literal());

    // Leibniz of D_X.
    auto f = parse("x^3 + 1", *base);
    Section fs{f * s[0], f * s[1]};
    auto lhs = covariant_d(a, x, fs);
    auto ds = covariant_d(a, x, s);
    Section rhs{diff(f, 0) * s[0] + f * ds[0], diff(f, 0) * s[1] + f * ds[1]};
    CHECK(same(lhs, rhs));

    CHECK_THROWS_AS(covariant_d(a, VectorField(total, {Expr::var(1), Expr(0), Expr(0)}), s), NonLinearField);
}
