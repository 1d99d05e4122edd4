// Canonical form for Expr: a sum of (coefficient * monomial) where a monomial
// is a sorted product of atoms raised to nonzero integer powers. Atoms are
// coordinates, sin/cos/exp of canonical arguments, tabulated functions of
// canonical arguments, and normalized sums that could not be expanded
// (denominators, or products past the expansion cap).

#include <cmath>
#include <map>

#include "expr_node.hpp"

namespace morphic {

namespace {

constexpr std::size_t kMaxProductTerms = 20000;
constexpr int kMaxExpandedPower = 8;

struct Atom {
    Expr expr;
    std::string key;
};

struct Factor {
    Atom atom;
    int exp;
};

struct Monomial {
    std::vector<Factor> factors;  // sorted by atom key, exp != 0
    std::string key;

    void rekey() {
        key.clear();
        for (const auto& f : factors) {
            if (!key.empty()) key += '*';
            key += f.atom.key;
            key += '^';
            key += std::to_string(f.exp);
        }
    }
};

struct Term {
    Monomial mono;
    Number coeff;
};

using Poly = std::map<std::string, Term>;

Poly to_poly(const Expr& e);
Expr to_expr(const Poly& p);

Poly constant_poly(const Number& c) {
    Poly p;
    if (!c.is_zero()) p.emplace("", Term{Monomial{}, c});
    return p;
}

Poly atom_poly(Atom atom, int exp = 1) {
    Monomial m;
    m.factors.push_back(Factor{std::move(atom), exp});
    m.rekey();
    Poly p;
    std::string key = m.key;
    p.emplace(std::move(key), Term{std::move(m), Number(1)});
    return p;
}

void add_term(Poly& p, const Term& t) {
    auto it = p.find(t.mono.key);
    if (it == p.end()) {
        if (!t.coeff.is_zero()) p.emplace(t.mono.key, t);
        return;
    }
    it->second.coeff = it->second.coeff + t.coeff;
    if (it->second.coeff.is_zero()) p.erase(it);
}

Poly add(Poly a, const Poly& b) {
    for (const auto& [k, t] : b) add_term(a, t);
    return a;
}

Poly scale(const Poly& p, const Number& c) {
    if (c.is_zero()) return {};
    Poly out;
    for (const auto& [k, t] : p) {
        Term s = t;
        s.coeff = t.coeff * c;
        if (!s.coeff.is_zero()) out.emplace(k, std::move(s));
    }
    return out;
}

Monomial mul_mono(const Monomial& a, const Monomial& b) {
    Monomial m;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
        if (j == b.factors.size() || (i < a.factors.size() && a.factors[i].atom.key < b.factors[j].atom.key)) {
            m.factors.push_back(a.factors[i++]);
        } else if (i == a.factors.size() || b.factors[j].atom.key < a.factors[i].atom.key) {
            m.factors.push_back(b.factors[j++]);
        } else {
            int e = a.factors[i].exp + b.factors[j].exp;
            if (e != 0) m.factors.push_back(Factor{a.factors[i].atom, e});
            ++i;
            ++j;
        }
    }
    m.rekey();
    return m;
}

bool is_constant_poly(const Poly& p) { return p.empty() || (p.size() == 1 && p.begin()->first.empty()); }

Number constant_of(const Poly& p) { return p.empty() ? Number(0) : p.begin()->second.coeff; }

// Splits a multi-term poly into (c, S') with S = c * S' and S' having unit
// leading coefficient, and returns S' as an atom.
std::pair<Number, Atom> normalized_sum_atom(const Poly& p) {
    Number lead = p.begin()->second.coeff;
    Poly normalized = scale(p, Number(1) / lead);
    Expr e = to_expr(normalized);
    return {lead, Atom{e, structural_key(e)}};
}

Poly mul(const Poly& a, const Poly& b);

Poly wrap_as_atom(const Poly& p) {
    if (p.size() <= 1) return p;
    auto [c, atom] = normalized_sum_atom(p);
    return scale(atom_poly(std::move(atom)), c);
}

Poly mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    if (a.size() * b.size() > kMaxProductTerms) {
        if (a.size() >= b.size()) return mul(wrap_as_atom(a), b);
        return mul(a, wrap_as_atom(b));
    }
    Poly out;
    for (const auto& [ka, ta] : a) {
        for (const auto& [kb, tb] : b) {
            Term t{mul_mono(ta.mono, tb.mono), ta.coeff * tb.coeff};
            add_term(out, t);
        }
    }
    return out;
}

Poly power(const Poly& p, int n) {
    if (n == 0) return constant_poly(Number(1));
    if (p.empty()) {
        if (n < 0) throw std::domain_error("division by zero");
        return {};
    }
    if (p.size() == 1) {
        const Term& t = p.begin()->second;
        Monomial m = t.mono;
        for (auto& f : m.factors) f.exp *= n;
        m.rekey();
        Poly out;
        std::string key = m.key;
        out.emplace(std::move(key), Term{std::move(m), t.coeff.pow(n)});
        return out;
    }
    if (n > 0 && n <= kMaxExpandedPower) {
        Poly out = p;
        for (int i = 1; i < n; ++i) out = mul(out, p);
        return out;
    }
    auto [c, atom] = normalized_sum_atom(p);
    return scale(atom_poly(std::move(atom), n), c.pow(n));
}

Expr raw_unary(ExprKind kind, const Expr& a) {
    ExprNode n;
    n.kind = kind;
    n.args = {a};
    return make_node(std::move(n));
}

// Sign of a canonical poly: sign of its leading coefficient.
bool leading_negative(const Poly& p) { return !p.empty() && p.begin()->second.coeff.is_negative(); }

Poly function_poly(ExprKind kind, const Expr& arg) {
    Poly inner = to_poly(arg);
    if (inner.empty()) return constant_poly(kind == ExprKind::Sin ? Number(0) : Number(1));
    if (is_constant_poly(inner) && !constant_of(inner).is_exact()) {
        double v = constant_of(inner).value();
        double r = kind == ExprKind::Sin ? std::sin(v) : kind == ExprKind::Cos ? std::cos(v) : std::exp(v);
        return constant_poly(Number::real(r));
    }
    Number sign(1);
    if (kind != ExprKind::Exp && leading_negative(inner)) {
        inner = scale(inner, Number(-1));
        if (kind == ExprKind::Sin) sign = Number(-1);
    }
    Expr e = raw_unary(kind, to_expr(inner));
    return scale(atom_poly(Atom{e, structural_key(e)}), sign);
}

Poly to_poly(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Constant:
            return constant_poly(e.number());
        case ExprKind::Variable:
            return atom_poly(Atom{e, structural_key(e)});
        case ExprKind::Add: {
            Poly p;
            for (const auto& a : e.args()) p = add(std::move(p), to_poly(a));
            return p;
        }
        case ExprKind::Neg:
            return scale(to_poly(e.args()[0]), Number(-1));
        case ExprKind::Mul: {
            Poly p = constant_poly(Number(1));
            for (const auto& a : e.args()) {
                p = mul(p, to_poly(a));
                if (p.empty()) break;
            }
            return p;
        }
        case ExprKind::Div:
            return mul(to_poly(e.args()[0]), power(to_poly(e.args()[1]), -1));
        case ExprKind::Pow:
            return power(to_poly(e.args()[0]), e.exponent());
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::Exp:
            return function_poly(e.kind(), e.args()[0]);
        case ExprKind::Tabulated: {
            std::vector<Expr> args;
            for (const auto& a : e.args()) args.push_back(simplify(a));
            Expr t = tabulated(e.table(), e.component(),
                               std::vector<int>(e.orders().begin(), e.orders().end()), std::move(args));
            return atom_poly(Atom{t, structural_key(t)});
        }
    }
    return {};
}

Expr factor_expr(const Factor& f) {
    if (f.exp == 1) return f.atom.expr;
    ExprNode n;
    n.kind = ExprKind::Pow;
    n.exponent = f.exp;
    n.args = {f.atom.expr};
    return make_node(std::move(n));
}

Expr term_expr(const Term& t) {
    if (t.mono.factors.empty()) return Expr(t.coeff);
    std::vector<Expr> parts;
    if (!t.coeff.is_one()) parts.push_back(Expr(t.coeff));
    for (const auto& f : t.mono.factors) parts.push_back(factor_expr(f));
    if (parts.size() == 1) return parts[0];
    ExprNode n;
    n.kind = ExprKind::Mul;
    n.args = std::move(parts);
    return make_node(std::move(n));
}

Expr to_expr(const Poly& p) {
    if (p.empty()) return Expr();
    if (p.size() == 1) return term_expr(p.begin()->second);
    ExprNode n;
    n.kind = ExprKind::Add;
    for (const auto& [k, t] : p) n.args.push_back(term_expr(t));
    return make_node(std::move(n));
}

}  // namespace

Expr simplify(const Expr& e) { return to_expr(to_poly(e)); }

}  // namespace morphic
