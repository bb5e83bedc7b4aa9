#pragma once

// Small recursive-descent parser for potential expressions such as
// "0.5*l*x^2 + 0.1*abs(x)^3". Variable x; named parameters bound at parse time.

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "error.hpp"
#include "models.hpp"

namespace wassineq {

namespace expr_detail {

enum class Op { num, var, neg, add, sub, mul, div, pow, call };

struct Node {
    Op op;
    double value = 0.0;
    double (*fn)(double) = nullptr;
    std::unique_ptr<Node> l, r;
};

inline double eval(const Node& n, double x)
{
    switch (n.op) {
    case Op::num: return n.value;
    case Op::var: return x;
    case Op::neg: return -eval(*n.l, x);
    case Op::add: return eval(*n.l, x) + eval(*n.r, x);
    case Op::sub: return eval(*n.l, x) - eval(*n.r, x);
    case Op::mul: return eval(*n.l, x) * eval(*n.r, x);
    case Op::div: return eval(*n.l, x) / eval(*n.r, x);
    case Op::pow: {
        const double b = eval(*n.l, x), e = eval(*n.r, x);
        // integer exponents keep odd/even symmetry for negative bases
        if (e == std::round(e) && std::abs(e) < 64) {
            double v = 1.0, bb = b;
            long k = std::lround(std::abs(e));
            while (k) {
                if (k & 1) v *= bb;
                bb *= bb;
                k >>= 1;
            }
            return e < 0 ? 1.0 / v : v;
        }
        return std::pow(b, e);
    }
    case Op::call: return n.fn(eval(*n.l, x));
    }
    return 0.0;
}

class Parser {
public:
    Parser(const std::string& s, const std::map<std::string, double>& params) : s_(s), params_(params) {}

    std::unique_ptr<Node> parse()
    {
        auto n = expr();
        skip();
        if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

private:
    [[noreturn]] void error(const std::string& m) const
    {
        fail(ErrorKind::config, "expression \"" + s_ + "\" column " + std::to_string(pos_ + 1) + ": " + m);
    }
    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    static std::unique_ptr<Node> make(Op op, std::unique_ptr<Node> l = {}, std::unique_ptr<Node> r = {})
    {
        auto n = std::make_unique<Node>();
        n->op = op;
        n->l = std::move(l);
        n->r = std::move(r);
        return n;
    }

    std::unique_ptr<Node> expr()
    {
        auto n = term();
        for (;;) {
            if (eat('+')) n = make(Op::add, std::move(n), term());
            else if (eat('-')) n = make(Op::sub, std::move(n), term());
            else return n;
        }
    }
    std::unique_ptr<Node> term()
    {
        auto n = unary();
        for (;;) {
            if (eat('*')) n = make(Op::mul, std::move(n), unary());
            else if (eat('/')) n = make(Op::div, std::move(n), unary());
            else return n;
        }
    }
    // -x^2 parses as -(x^2)
    std::unique_ptr<Node> unary()
    {
        if (eat('-')) return make(Op::neg, unary());
        if (eat('+')) return unary();
        return power();
    }
    std::unique_ptr<Node> power()
    {
        auto b = primary();
        if (eat('^')) return make(Op::pow, std::move(b), unary());
        return b;
    }
    std::unique_ptr<Node> primary()
    {
        skip();
        if (pos_ >= s_.size()) error("unexpected end of expression");
        const char c = s_[pos_];
        if (eat('(')) {
            auto n = expr();
            if (!eat(')')) error("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            }
            catch (...) {
                error("bad number");
            }
            pos_ += used;
            auto n = make(Op::num);
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            const std::string id = s_.substr(start, pos_ - start);
            if (id == "x") return make(Op::var);
            if (id == "pi") {
                auto n = make(Op::num);
                n->value = M_PI;
                return n;
            }
            static const std::map<std::string, double (*)(double)> fns = {
                {"abs", [](double v) { return std::abs(v); }},
                {"exp", [](double v) { return std::exp(v); }},
                {"ln", [](double v) { return std::log(v); }},
                {"log", [](double v) { return std::log(v); }},
                {"sqrt", [](double v) { return std::sqrt(v); }},
                {"sin", [](double v) { return std::sin(v); }},
                {"cos", [](double v) { return std::cos(v); }},
                {"cosh", [](double v) { return std::cosh(v); }},
            };
            if (auto f = fns.find(id); f != fns.end()) {
                if (!eat('(')) error("expected '(' after " + id);
                auto n = make(Op::call, expr());
                n->fn = f->second;
                if (!eat(')')) error("expected ')'");
                return n;
            }
            if (auto p = params_.find(id); p != params_.end()) {
                auto n = make(Op::num);
                n->value = p->second;
                return n;
            }
            pos_ = start;
            error("unknown identifier '" + id + "'");
        }
        error("unexpected '" + std::string(1, c) + "'");
    }

    std::string s_;
    const std::map<std::string, double>& params_;
    std::size_t pos_ = 0;
};

} // namespace expr_detail

inline ScalarFn parse_expression(const std::string& text, const std::map<std::string, double>& params = {})
{
    std::shared_ptr<const expr_detail::Node> root = expr_detail::Parser(text, params).parse();
    return [root](double x) { return expr_detail::eval(*root, x); };
}

inline bool expression_is_zero(const std::string& text)
{
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    return t.empty() || t == "0" || t == "0.0";
}

inline Potential potential_from_expression(const std::string& text, const std::map<std::string, double>& params = {})
{
    if (expression_is_zero(text)) return Potential::zero();
    return Potential::from(parse_expression(text, params), text);
}

} // namespace wassineq
