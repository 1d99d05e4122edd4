// Recursive-descent parser for the expression grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          (right associative)
//   primary := number | coordinate | func '(' expr ')' | '(' expr ')'
//   func    := 'sin' | 'cos' | 'exp'
//
// Exponents must reduce to integer constants. Decimal literals become exact
// rationals when they fit in 64 bits.

#include <cctype>
#include <charconv>
#include <limits>

#include "morphic/expr.hpp"

namespace morphic {

namespace {

class Parser {
public:
    Parser(std::string_view text, const Chart& chart) : text_(text), chart_(chart) {}

    Expr parse() {
        Expr e = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    Expr expr() {
        Expr lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = lhs + term();
            else if (accept('-'))
                lhs = lhs - term();
            else
                return lhs;
        }
    }

    Expr term() {
        Expr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = lhs * unary();
            } else if (accept('/')) {
                std::size_t at = pos_;
                Expr rhs = unary();
                if (rhs.is_zero_literal()) throw ParseError("division by literal zero", at);
                lhs = lhs / rhs;
            } else {
                return lhs;
            }
        }
    }

    Expr unary() {
        if (accept('-')) return -unary();
        if (accept('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (accept('^')) {
            std::size_t at = pos_;
            Expr ex = unary();
            auto value = constant_value(ex);
            std::optional<int> n = value ? value->as_int() : std::nullopt;
            if (!n) throw ParseError("exponent must be an integer constant", at);
            if (*n < 0) {
                if (auto b = constant_value(base); b && b->is_zero())
                    throw ParseError("zero raised to a negative power", at);
            }
            return pow(base, *n);
        }
        return base;
    }

    Expr primary() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            std::string name(text_.substr(start, pos_ - start));
            if (auto idx = chart_.index_of(name)) return Expr::var(*idx);
            if (name == "sin" || name == "cos" || name == "exp") {
                expect('(');
                Expr arg = expr();
                expect(')');
                if (name == "sin") return sin(arg);
                if (name == "cos") return cos(arg);
                return exp(arg);
            }
            throw ParseError("unknown identifier '" + name + "'", start, name);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr number() {
        std::size_t start = pos_;
        std::int64_t mantissa = 0;
        int scale = 0;  // value = mantissa * 10^scale
        bool exact = true;
        bool any_digit = false;
        auto take_digit = [&](char d, bool fractional) {
            any_digit = true;
            if (!exact) return;
            if (mantissa > (std::numeric_limits<std::int64_t>::max() - 9) / 10) {
                exact = false;
                return;
            }
            mantissa = mantissa * 10 + (d - '0');
            if (fractional) --scale;
        };
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            take_digit(text_[pos_++], false);
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                take_digit(text_[pos_++], true);
        }
        if (!any_digit) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            int sign = 1;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
                if (text_[pos_] == '-') sign = -1;
                ++pos_;
            }
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                pos_ = save;
                fail("malformed exponent");
            }
            int e = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                if (e < 10000) e = e * 10 + (text_[pos_] - '0');
                ++pos_;
            }
            scale += sign * e;
        }
        if (exact && scale > -19 && scale < 19) {
            std::optional<Rational> q = Rational(mantissa);
            auto ten = Rational::try_pow(Rational(10), scale < 0 ? -scale : scale);
            if (ten) q = scale < 0 ? Rational::try_div(*q, *ten) : Rational::try_mul(*q, *ten);
            else q.reset();
            if (q) return Expr(*q);
        }
        double v = 0.0;
        std::string_view lit = text_.substr(start, pos_ - start);
        auto res = std::from_chars(lit.data(), lit.data() + lit.size(), v);
        if (res.ec != std::errc()) throw ParseError("number out of range", start);
        return Expr::real(v);
    }

    std::string_view text_;
    const Chart& chart_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const Chart& chart) { return Parser(text, chart).parse(); }

}  // namespace morphic
