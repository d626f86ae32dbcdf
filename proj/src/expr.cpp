#include "attractorlab/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "attractorlab/numfmt.hpp"

namespace attractorlab {

namespace detail {

enum class Kind { number, var_x, var_y, neg, add, sub, mul, div, pow, call };

struct ExprNode {
    Kind kind = Kind::number;
    double value = 0.0;
    int func = -1;
    std::vector<std::shared_ptr<const ExprNode>> kids;
};

struct FuncDef {
    const char* name;
    int arity;
    double (*f1)(double);
    double (*f2)(double, double);
};

double fmin2(double a, double b) { return std::fmin(a, b); }
double fmax2(double a, double b) { return std::fmax(a, b); }

constexpr int kFuncCount = 8;
const std::array<FuncDef, kFuncCount>& funcs() {
    static const std::array<FuncDef, kFuncCount> table = {{
        {"sin", 1, std::sin, nullptr},
        {"cos", 1, std::cos, nullptr},
        {"exp", 1, std::exp, nullptr},
        {"abs", 1, std::fabs, nullptr},
        {"sqrt", 1, std::sqrt, nullptr},
        {"tanh", 1, std::tanh, nullptr},
        {"min", 2, nullptr, fmin2},
        {"max", 2, nullptr, fmax2},
    }};
    return table;
}

double eval_node(const ExprNode& n, double x, double y) {
    switch (n.kind) {
        case Kind::number: return n.value;
        case Kind::var_x: return x;
        case Kind::var_y: return y;
        case Kind::neg: return -eval_node(*n.kids[0], x, y);
        case Kind::add: return eval_node(*n.kids[0], x, y) + eval_node(*n.kids[1], x, y);
        case Kind::sub: return eval_node(*n.kids[0], x, y) - eval_node(*n.kids[1], x, y);
        case Kind::mul: return eval_node(*n.kids[0], x, y) * eval_node(*n.kids[1], x, y);
        case Kind::div: return eval_node(*n.kids[0], x, y) / eval_node(*n.kids[1], x, y);
        case Kind::pow:
            return std::pow(eval_node(*n.kids[0], x, y), eval_node(*n.kids[1], x, y));
        case Kind::call: {
            const FuncDef& fd = funcs()[n.func];
            if (fd.arity == 1) return fd.f1(eval_node(*n.kids[0], x, y));
            return fd.f2(eval_node(*n.kids[0], x, y), eval_node(*n.kids[1], x, y));
        }
    }
    return 0.0;
}

void print_node(const ExprNode& n, std::string& out) {
    switch (n.kind) {
        case Kind::number: out += format_double(n.value); return;
        case Kind::var_x: out += 'x'; return;
        case Kind::var_y: out += 'y'; return;
        case Kind::neg:
            out += "(-";
            print_node(*n.kids[0], out);
            out += ')';
            return;
        case Kind::call: {
            out += funcs()[n.func].name;
            out += '(';
            for (std::size_t i = 0; i < n.kids.size(); ++i) {
                if (i) out += ',';
                print_node(*n.kids[i], out);
            }
            out += ')';
            return;
        }
        default: {
            char op = n.kind == Kind::add   ? '+'
                      : n.kind == Kind::sub ? '-'
                      : n.kind == Kind::mul ? '*'
                      : n.kind == Kind::div ? '/'
                                            : '^';
            out += '(';
            print_node(*n.kids[0], out);
            out += op;
            print_node(*n.kids[1], out);
            out += ')';
            return;
        }
    }
}

bool equal_nodes(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind || a.func != b.func || a.kids.size() != b.kids.size()) return false;
    if (a.kind == Kind::number && a.value != b.value) return false;
    for (std::size_t i = 0; i < a.kids.size(); ++i)
        if (!equal_nodes(*a.kids[i], *b.kids[i])) return false;
    return true;
}

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make(Kind k, std::vector<NodePtr> kids, double value = 0.0, int func = -1) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->value = value;
    n->func = func;
    n->kids = std::move(kids);
    return n;
}

class Parser {
  public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse() {
        if (text_.empty()) throw ExprError("empty expression", 0);
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size()) throw ExprError("unexpected trailing input", pos_);
        return e;
    }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }
    bool peek_is(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    bool consume(char c) {
        if (peek_is(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (consume('+'))
                lhs = make(Kind::add, {lhs, term()});
            else if (consume('-'))
                lhs = make(Kind::sub, {lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (consume('*'))
                lhs = make(Kind::mul, {lhs, factor()});
            else if (consume('/'))
                lhs = make(Kind::div, {lhs, factor()});
            else
                return lhs;
        }
    }

    NodePtr factor() {
        NodePtr base = unary();
        if (consume('^')) return make(Kind::pow, {base, factor()});  // right-assoc
        return base;
    }

    NodePtr unary() {
        if (consume('-')) return make(Kind::neg, {atom()});
        return atom();
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw ExprError("syntax error: unexpected end", pos_);
        char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!consume(')')) throw ExprError("syntax error: expected ')'", pos_);
            return e;
        }
        throw ExprError(std::string("syntax error: unexpected '") + c + "'", pos_);
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
                pos_ = mark;  // not an exponent after all
            else
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
            throw ExprError("malformed number", start);
        return make(Kind::number, {}, value);
    }

    NodePtr identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);
        if (name == "x") return make(Kind::var_x, {});
        if (name == "y") return make(Kind::var_y, {});
        for (int fi = 0; fi < kFuncCount; ++fi) {
            if (name == funcs()[fi].name) {
                if (!consume('(')) throw ExprError("expected '(' after function name", pos_);
                std::vector<NodePtr> args;
                args.push_back(expr());
                while (consume(',')) args.push_back(expr());
                if (!consume(')')) throw ExprError("syntax error: expected ')'", pos_);
                if (static_cast<int>(args.size()) != funcs()[fi].arity)
                    throw ExprError("arity mismatch for " + std::string(name) + ": expected " +
                                        std::to_string(funcs()[fi].arity) + ", got " +
                                        std::to_string(args.size()),
                                    start);
                return make(Kind::call, std::move(args), 0.0, fi);
            }
        }
        throw ExprError("unknown identifier '" + std::string(name) + "'", start);
    }
};

}  // namespace detail

double Expr::eval(double x, double y) const {
    if (!root_) throw ConfigError("Expr: evaluating an empty expression");
    return detail::eval_node(*root_, x, y);
}

std::string Expr::print() const {
    if (!root_) return "";
    std::string out;
    detail::print_node(*root_, out);
    return out;
}

bool Expr::operator==(const Expr& other) const {
    if (!root_ || !other.root_) return root_ == other.root_;
    return detail::equal_nodes(*root_, *other.root_);
}

Expr parse_expr(std::string_view text) { return Expr(detail::Parser(text).parse()); }

Field sample_expr(const Grid& g, const Expr& e) {
    return make_field(g, [&](double x, double y) { return e.eval(x, y); });
}

StaggeredField sample_expr_staggered(const Grid& g, const Expr& e) {
    return make_staggered(g, [&](int, double x, double y) { return e.eval(x, y); });
}

}  // namespace attractorlab
