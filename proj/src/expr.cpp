#include "morphic/expr.hpp"

#include <charconv>
#include <cmath>

#include "expr_node.hpp"

namespace morphic {

// ---------------------------------------------------------------- Number

Number Number::real(double v) {
    Number n;
    n.exact_.reset();
    n.value_ = v;
    return n;
}

std::optional<int> Number::as_int() const {
    if (exact_) {
        if (!exact_->is_integer()) return std::nullopt;
        if (exact_->num() > 1'000'000 || exact_->num() < -1'000'000) return std::nullopt;
        return static_cast<int>(exact_->num());
    }
    if (std::nearbyint(value_) == value_ && std::fabs(value_) <= 1e6) return static_cast<int>(value_);
    return std::nullopt;
}

Number operator+(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
        if (auto r = Rational::try_add(*a.exact_, *b.exact_)) return Number(*r);
    }
    return Number::real(a.value_ + b.value_);
}

Number operator*(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) {
        if (auto r = Rational::try_mul(*a.exact_, *b.exact_)) return Number(*r);
    }
    return Number::real(a.value_ * b.value_);
}

Number operator-(const Number& a) {
    if (a.exact_) {
        if (auto r = Rational::try_neg(*a.exact_)) return Number(*r);
    }
    return Number::real(-a.value_);
}

Number operator/(const Number& a, const Number& b) {
    if (b.exact_ && b.exact_->is_zero()) throw std::domain_error("division by exact zero");
    if (a.exact_ && b.exact_) {
        if (auto r = Rational::try_div(*a.exact_, *b.exact_)) return Number(*r);
    }
    return Number::real(a.value_ / b.value_);
}

Number Number::pow(int exponent) const {
    if (exact_) {
        if (exact_->is_zero() && exponent < 0) throw std::domain_error("zero to a negative power");
        if (auto r = Rational::try_pow(*exact_, exponent)) return Number(*r);
    }
    return Number::real(std::pow(value_, exponent));
}

bool operator==(const Number& a, const Number& b) {
    if (a.exact_ && b.exact_) return *a.exact_ == *b.exact_;
    return a.value_ == b.value_;
}

std::string Number::to_string() const {
    if (exact_) return exact_->to_string();
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value_);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------- nodes

Expr make_node(ExprNode node) { return Expr(std::make_shared<const ExprNode>(std::move(node))); }

namespace {

const std::shared_ptr<const ExprNode>& zero_node() {
    static const auto node = std::make_shared<const ExprNode>();
    return node;
}

Expr unary(ExprKind kind, const Expr& a) {
    ExprNode n;
    n.kind = kind;
    n.args = {a};
    return make_node(std::move(n));
}


}  // namespace

Expr::Expr() : node_(zero_node()) {}
Expr::Expr(std::int64_t v) : Expr(Number(v)) {}
Expr::Expr(Rational q) : Expr(Number(q)) {}
Expr::Expr(Number n) {
    if (n.is_exact() && n.is_zero()) {
        node_ = zero_node();
    } else {
        ExprNode node;
        node.number = n;
        node_ = std::make_shared<const ExprNode>(std::move(node));
    }
}

Expr Expr::var(std::size_t index) {
    ExprNode n;
    n.kind = ExprKind::Variable;
    n.index = index;
    return make_node(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
const Number& Expr::number() const { return node_->number; }
std::size_t Expr::var_index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::args() const { return node_->args; }
const std::shared_ptr<const TabulatedFunction>& Expr::table() const { return node_->table; }
std::size_t Expr::component() const { return node_->component; }
std::span<const int> Expr::orders() const { return node_->orders; }

bool Expr::is_zero_literal() const { return is_constant() && number().is_zero(); }
bool Expr::is_one_literal() const { return is_constant() && number().is_one(); }

// ---------------------------------------------------------------- construction

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr(a.number() + b.number());
    if (a.is_zero_literal()) return b;
    if (b.is_zero_literal()) return a;
    ExprNode n;
    n.kind = ExprKind::Add;
    auto push = [&n](const Expr& e) {
        if (e.kind() == ExprKind::Add)
            n.args.insert(n.args.end(), e.args().begin(), e.args().end());
        else
            n.args.push_back(e);
    };
    push(a);
    push(b);
    return make_node(std::move(n));
}

Expr operator-(const Expr& a) {
    if (a.is_constant()) return Expr(-a.number());
    if (a.kind() == ExprKind::Neg) return a.args()[0];
    return unary(ExprKind::Neg, a);
}

Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_constant() && b.is_constant()) return Expr(a.number() * b.number());
    if (a.is_zero_literal() || b.is_zero_literal()) return Expr();
    if (a.is_one_literal()) return b;
    if (b.is_one_literal()) return a;
    ExprNode n;
    n.kind = ExprKind::Mul;
    auto push = [&n](const Expr& e) {
        if (e.kind() == ExprKind::Mul)
            n.args.insert(n.args.end(), e.args().begin(), e.args().end());
        else
            n.args.push_back(e);
    };
    push(a);
    push(b);
    return make_node(std::move(n));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_zero_literal()) throw std::domain_error("division by literal zero");
    if (a.is_constant() && b.is_constant()) return Expr(a.number() / b.number());
    if (a.is_zero_literal()) return Expr();
    if (b.is_one_literal()) return a;
    ExprNode n;
    n.kind = ExprKind::Div;
    n.args = {a, b};
    return make_node(std::move(n));
}

Expr pow(const Expr& base, int exponent) {
    if (exponent == 0) return Expr(1);
    if (exponent == 1) return base;
    if (base.is_constant()) return Expr(base.number().pow(exponent));
    if (base.kind() == ExprKind::Pow) return pow(base.args()[0], base.exponent() * exponent);
    ExprNode n;
    n.kind = ExprKind::Pow;
    n.exponent = exponent;
    n.args = {base};
    return make_node(std::move(n));
}

Expr sin(const Expr& a) {
    if (a.is_constant()) {
        if (a.number().is_exact() && a.number().is_zero()) return Expr();
        if (!a.number().is_exact()) return Expr::real(std::sin(a.number().value()));
    }
    return unary(ExprKind::Sin, a);
}

Expr cos(const Expr& a) {
    if (a.is_constant()) {
        if (a.number().is_exact() && a.number().is_zero()) return Expr(1);
        if (!a.number().is_exact()) return Expr::real(std::cos(a.number().value()));
    }
    return unary(ExprKind::Cos, a);
}

Expr exp(const Expr& a) {
    if (a.is_constant()) {
        if (a.number().is_exact() && a.number().is_zero()) return Expr(1);
        if (!a.number().is_exact()) return Expr::real(std::exp(a.number().value()));
    }
    return unary(ExprKind::Exp, a);
}

Expr sum(std::span<const Expr> terms) {
    Expr s;
    for (const auto& t : terms) s += t;
    return s;
}

Expr tabulated(std::shared_ptr<const TabulatedFunction> table, std::size_t component,
               std::vector<int> orders, std::vector<Expr> args) {
    if (!table) throw std::invalid_argument("tabulated: null table");
    if (args.size() != table->arity() || orders.size() != table->arity())
        throw std::invalid_argument("tabulated: arity mismatch");
    if (component >= table->components()) throw std::invalid_argument("tabulated: bad component");
    ExprNode n;
    n.kind = ExprKind::Tabulated;
    n.table = std::move(table);
    n.component = component;
    n.orders = std::move(orders);
    n.args = std::move(args);
    return make_node(std::move(n));
}

ParseError::ParseError(std::string message, std::size_t offset, std::string identifier)
    : std::runtime_error(std::move(message) + " at offset " + std::to_string(offset)),
      offset_(offset),
      identifier_(std::move(identifier)) {}

// ---------------------------------------------------------------- calculus

Expr diff(const Expr& e, std::size_t coord) {
    switch (e.kind()) {
        case ExprKind::Constant:
            return Expr();
        case ExprKind::Variable:
            return e.var_index() == coord ? Expr(1) : Expr();
        case ExprKind::Add: {
            Expr s;
            for (const auto& a : e.args()) s += diff(a, coord);
            return s;
        }
        case ExprKind::Neg:
            return -diff(e.args()[0], coord);
        case ExprKind::Mul: {
            auto args = e.args();
            Expr s;
            for (std::size_t i = 0; i < args.size(); ++i) {
                Expr d = diff(args[i], coord);
                if (d.is_zero_literal()) continue;
                Expr term = d;
                for (std::size_t j = 0; j < args.size(); ++j)
                    if (j != i) term = term * args[j];
                s += term;
            }
            return s;
        }
        case ExprKind::Div: {
            const Expr& a = e.args()[0];
            const Expr& b = e.args()[1];
            Expr da = diff(a, coord);
            Expr db = diff(b, coord);
            if (db.is_zero_literal()) return da / b;
            return (da * b - a * db) / pow(b, 2);
        }
        case ExprKind::Pow: {
            const Expr& b = e.args()[0];
            Expr db = diff(b, coord);
            if (db.is_zero_literal()) return Expr();
            return Expr(e.exponent()) * pow(b, e.exponent() - 1) * db;
        }
        case ExprKind::Sin: {
            Expr du = diff(e.args()[0], coord);
            if (du.is_zero_literal()) return Expr();
            return cos(e.args()[0]) * du;
        }
        case ExprKind::Cos: {
            Expr du = diff(e.args()[0], coord);
            if (du.is_zero_literal()) return Expr();
            return -(sin(e.args()[0]) * du);
        }
        case ExprKind::Exp: {
            Expr du = diff(e.args()[0], coord);
            if (du.is_zero_literal()) return Expr();
            return e * du;
        }
        case ExprKind::Tabulated: {
            auto args = e.args();
            Expr s;
            for (std::size_t k = 0; k < args.size(); ++k) {
                Expr dk = diff(args[k], coord);
                if (dk.is_zero_literal()) continue;
                std::vector<int> orders(e.orders().begin(), e.orders().end());
                ++orders[k];
                s += tabulated(e.table(), e.component(), std::move(orders),
                               std::vector<Expr>(args.begin(), args.end())) *
                     dk;
            }
            return s;
        }
    }
    return Expr();
}

double eval(const Expr& e, std::span<const double> point) {
    double v = 0.0;
    switch (e.kind()) {
        case ExprKind::Constant:
            return e.number().value();
        case ExprKind::Variable:
            if (e.var_index() >= point.size()) throw EvalError("coordinate index out of range");
            return point[e.var_index()];
        case ExprKind::Add:
            for (const auto& a : e.args()) v += eval(a, point);
            break;
        case ExprKind::Neg:
            v = -eval(e.args()[0], point);
            break;
        case ExprKind::Mul:
            v = 1.0;
            for (const auto& a : e.args()) v *= eval(a, point);
            break;
        case ExprKind::Div: {
            double den = eval(e.args()[1], point);
            if (den == 0.0) throw EvalError("vanishing denominator");
            v = eval(e.args()[0], point) / den;
            break;
        }
        case ExprKind::Pow: {
            double b = eval(e.args()[0], point);
            if (b == 0.0 && e.exponent() < 0) throw EvalError("vanishing denominator");
            v = std::pow(b, e.exponent());
            break;
        }
        case ExprKind::Sin:
            v = std::sin(eval(e.args()[0], point));
            break;
        case ExprKind::Cos:
            v = std::cos(eval(e.args()[0], point));
            break;
        case ExprKind::Exp:
            v = std::exp(eval(e.args()[0], point));
            break;
        case ExprKind::Tabulated: {
            std::vector<double> x;
            x.reserve(e.args().size());
            for (const auto& a : e.args()) x.push_back(eval(a, point));
            v = e.table()->evaluate(e.component(), x, e.orders());
            break;
        }
    }
    if (!std::isfinite(v)) throw EvalError("non-finite value");
    return v;
}

Expr substitute(const Expr& e, std::span<const Expr> replacement) {
    switch (e.kind()) {
        case ExprKind::Constant:
            return e;
        case ExprKind::Variable:
            if (e.var_index() >= replacement.size())
                throw std::out_of_range("substitute: no replacement for coordinate " +
                                        std::to_string(e.var_index()));
            return replacement[e.var_index()];
        case ExprKind::Add: {
            Expr s;
            for (const auto& a : e.args()) s += substitute(a, replacement);
            return s;
        }
        case ExprKind::Neg:
            return -substitute(e.args()[0], replacement);
        case ExprKind::Mul: {
            Expr p(1);
            for (const auto& a : e.args()) p *= substitute(a, replacement);
            return p;
        }
        case ExprKind::Div:
            return substitute(e.args()[0], replacement) / substitute(e.args()[1], replacement);
        case ExprKind::Pow:
            return pow(substitute(e.args()[0], replacement), e.exponent());
        case ExprKind::Sin:
            return sin(substitute(e.args()[0], replacement));
        case ExprKind::Cos:
            return cos(substitute(e.args()[0], replacement));
        case ExprKind::Exp:
            return exp(substitute(e.args()[0], replacement));
        case ExprKind::Tabulated: {
            std::vector<Expr> args;
            for (const auto& a : e.args()) args.push_back(substitute(a, replacement));
            return tabulated(e.table(), e.component(),
                             std::vector<int>(e.orders().begin(), e.orders().end()), std::move(args));
        }
    }
    return e;
}

bool depends_on(const Expr& e, std::size_t coord) {
    if (e.kind() == ExprKind::Variable) return e.var_index() == coord;
    for (const auto& a : e.args())
        if (depends_on(a, coord)) return true;
    return false;
}

std::size_t max_variable(const Expr& e) {
    if (e.kind() == ExprKind::Variable) return e.var_index() + 1;
    std::size_t m = 0;
    for (const auto& a : e.args()) m = std::max(m, max_variable(a));
    return m;
}

std::optional<Number> constant_value(const Expr& e) {
    Expr s = simplify(e);
    if (s.is_constant()) return s.number();
    return std::nullopt;
}

// ---------------------------------------------------------------- printing

namespace {

std::string print_number(const Number& n) {
    std::string s = n.to_string();
    bool wrap = n.is_negative() || (n.is_exact() && !n.exact()->is_integer());
    return wrap ? "(" + s + ")" : s;
}

template <typename VarName>
std::string render(const Expr& e, const VarName& var_name) {
    auto join = [&](const char* sep) {
        std::string s = "(";
        bool first = true;
        for (const auto& a : e.args()) {
            if (!first) s += sep;
            s += render(a, var_name);
            first = false;
        }
        return s + ")";
    };
    switch (e.kind()) {
        case ExprKind::Constant:
            return print_number(e.number());
        case ExprKind::Variable:
            return var_name(e.var_index());
        case ExprKind::Add:
            return join(" + ");
        case ExprKind::Mul:
            return join(" * ");
        case ExprKind::Neg:
            return "(-" + render(e.args()[0], var_name) + ")";
        case ExprKind::Div:
            return "(" + render(e.args()[0], var_name) + " / " + render(e.args()[1], var_name) + ")";
        case ExprKind::Pow: {
            std::string ex = e.exponent() < 0 ? "(" + std::to_string(e.exponent()) + ")"
                                              : std::to_string(e.exponent());
            return "(" + render(e.args()[0], var_name) + "^" + ex + ")";
        }
        case ExprKind::Sin:
            return "sin(" + render(e.args()[0], var_name) + ")";
        case ExprKind::Cos:
            return "cos(" + render(e.args()[0], var_name) + ")";
        case ExprKind::Exp:
            return "exp(" + render(e.args()[0], var_name) + ")";
        case ExprKind::Tabulated: {
            std::string s = e.table()->label() + "." + std::to_string(e.component()) + "[";
            for (std::size_t i = 0; i < e.orders().size(); ++i) {
                if (i) s += ",";
                s += std::to_string(e.orders()[i]);
            }
            s += "]";
            return s + join(", ");
        }
    }
    return "?";
}

}  // namespace

std::string print(const Expr& e, const Chart& chart) {
    return render(e, [&chart](std::size_t i) {
        return i < chart.dimension() ? chart.name(i) : "#" + std::to_string(i);
    });
}

std::string structural_key(const Expr& e) {
    return render(e, [](std::size_t i) { return "#" + std::to_string(i); });
}

}  // namespace morphic
