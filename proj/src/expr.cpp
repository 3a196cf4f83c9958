#include "sft/expr.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "sft/errors.hpp"

namespace sft {

enum class Op { num, var, add, sub, mul, div, pow, neg, sin, cos, exp };

struct Expr::Node {
    Op op;
    double value = 0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using P = std::shared_ptr<const Expr::Node>;

P mk(Op op, P a = nullptr, P b = nullptr) {
    return std::make_shared<const Expr::Node>(Expr::Node{op, 0.0, std::move(a), std::move(b)});
}
P num(double v) {
    return std::make_shared<const Expr::Node>(Expr::Node{Op::num, v, nullptr, nullptr});
}
bool is_num(const P& p, double v) {
    return p->op == Op::num && p->value == v;
}

double eval(const P& p, double t) {
    switch (p->op) {
        case Op::num: return p->value;
        case Op::var: return t;
        case Op::add: return eval(p->a, t) + eval(p->b, t);
        case Op::sub: return eval(p->a, t) - eval(p->b, t);
        case Op::mul: return eval(p->a, t) * eval(p->b, t);
        case Op::div: return eval(p->a, t) / eval(p->b, t);
        case Op::pow: return std::pow(eval(p->a, t), eval(p->b, t));
        case Op::neg: return -eval(p->a, t);
        case Op::sin: return std::sin(eval(p->a, t));
        case Op::cos: return std::cos(eval(p->a, t));
        case Op::exp: return std::exp(eval(p->a, t));
    }
    return 0.0;
}

bool constant(const P& p) {
    if (p->op == Op::var) return false;
    if (p->op == Op::num) return true;
    return (!p->a || constant(p->a)) && (!p->b || constant(p->b));
}

P add(P a, P b) {
    if (is_num(a, 0)) return b;
    if (is_num(b, 0)) return a;
    if (a->op == Op::num && b->op == Op::num) return num(a->value + b->value);
    return mk(Op::add, a, b);
}
P sub(P a, P b) {
    if (is_num(b, 0)) return a;
    if (a->op == Op::num && b->op == Op::num) return num(a->value - b->value);
    return mk(Op::sub, a, b);
}
P mul(P a, P b) {
    if (is_num(a, 0) || is_num(b, 0)) return num(0);
    if (is_num(a, 1)) return b;
    if (is_num(b, 1)) return a;
    if (a->op == Op::num && b->op == Op::num) return num(a->value * b->value);
    return mk(Op::mul, a, b);
}
P div(P a, P b) {
    if (is_num(a, 0)) return num(0);
    if (is_num(b, 1)) return a;
    return mk(Op::div, a, b);
}
P neg(P a) {
    if (a->op == Op::num) return num(-a->value);
    return mk(Op::neg, a);
}

P diff(const P& p) {
    switch (p->op) {
        case Op::num: return num(0);
        case Op::var: return num(1);
        case Op::add: return add(diff(p->a), diff(p->b));
        case Op::sub: return sub(diff(p->a), diff(p->b));
        case Op::mul: return add(mul(diff(p->a), p->b), mul(p->a, diff(p->b)));
        case Op::div:
            return div(sub(mul(diff(p->a), p->b), mul(p->a, diff(p->b))), mul(p->b, p->b));
        case Op::pow: {
            // exponent is constant (checked at parse time)
            const double n = eval(p->b, 0.0);
            return mul(mul(num(n), mk(Op::pow, p->a, num(n - 1))), diff(p->a));
        }
        case Op::neg: return neg(diff(p->a));
        case Op::sin: return mul(mk(Op::cos, p->a), diff(p->a));
        case Op::cos: return neg(mul(mk(Op::sin, p->a), diff(p->a)));
        case Op::exp: return mul(p, diff(p->a));
    }
    return num(0);
}

std::string show(const P& p) {
    std::ostringstream os;
    os.precision(17);
    switch (p->op) {
        case Op::num: os << p->value; break;
        case Op::var: os << "t"; break;
        case Op::add: os << "(" << show(p->a) << " + " << show(p->b) << ")"; break;
        case Op::sub: os << "(" << show(p->a) << " - " << show(p->b) << ")"; break;
        case Op::mul: os << "(" << show(p->a) << " * " << show(p->b) << ")"; break;
        case Op::div: os << "(" << show(p->a) << " / " << show(p->b) << ")"; break;
        case Op::pow: os << "(" << show(p->a) << " ^ " << show(p->b) << ")"; break;
        case Op::neg: os << "(-" << show(p->a) << ")"; break;
        case Op::sin: os << "sin(" << show(p->a) << ")"; break;
        case Op::cos: os << "cos(" << show(p->a) << ")"; break;
        case Op::exp: os << "exp(" << show(p->a) << ")"; break;
    }
    return os.str();
}

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    P parse() {
        P e = expr();
        skip();
        if (i_ != s_.size()) fail("unexpected '" + std::string(1, s_[i_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& m) const {
        throw ParameterError("expression: " + m + " at position " + std::to_string(i_));
    }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }

    P expr() {
        P a = term();
        for (;;) {
            if (eat('+')) a = mk(Op::add, a, term());
            else if (eat('-')) a = mk(Op::sub, a, term());
            else return a;
        }
    }
    P term() {
        P a = unary();
        for (;;) {
            if (eat('*')) a = mk(Op::mul, a, unary());
            else if (eat('/')) a = mk(Op::div, a, unary());
            else return a;
        }
    }
    P unary() {
        if (eat('-')) return mk(Op::neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    P power() {
        P a = primary();
        if (eat('^')) {
            P b = unary();
            if (!constant(b)) fail("exponent must be constant");
            return mk(Op::pow, a, b);
        }
        return a;
    }
    P primary() {
        skip();
        if (i_ >= s_.size()) fail("unexpected end");
        const char c = s_[i_];
        if (eat('(')) {
            P e = expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(s_.substr(i_), &used);
            } catch (...) {
                fail("bad number");
            }
            i_ += used;
            return num(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            while (j < s_.size() && std::isalpha(static_cast<unsigned char>(s_[j]))) ++j;
            const std::string id = s_.substr(i_, j - i_);
            i_ = j;
            if (id == "t") return mk(Op::var);
            if (id == "pi") return num(std::numbers::pi);
            Op op;
            if (id == "sin") op = Op::sin;
            else if (id == "cos") op = Op::cos;
            else if (id == "exp") op = Op::exp;
            else fail("unknown identifier '" + id + "'");
            if (!eat('(')) fail("expected '(' after " + id);
            P e = expr();
            if (!eat(')')) fail("expected ')'");
            return mk(op, e);
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& s_;
    std::size_t i_ = 0;
};

}  // namespace

Expr Expr::parse(const std::string& text) {
    return Expr(Parser(text).parse());
}

double Expr::operator()(double t) const {
    return eval(n_, t);
}

Expr Expr::derivative() const {
    return Expr(diff(n_));
}

std::string Expr::str() const {
    return show(n_);
}

std::string load_expression(const std::string& arg) {
    std::error_code ec;
    if (!arg.empty() && std::filesystem::is_regular_file(arg, ec)) {
        std::ifstream in(arg);
        std::stringstream ss;
        ss << in.rdbuf();
        std::string s = ss.str();
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        return s;
    }
    return arg;
}

}  // namespace sft
