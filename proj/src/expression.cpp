// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#include "etlforge/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "etlforge/errors.hpp"

namespace etlforge {

ExprPtr make_column(std::string name) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Column;
    e->column = std::move(name);
    return e;
}

ExprPtr make_literal(Value v) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Literal;
    e->literal = std::move(v);
    return e;
}

ExprPtr make_binary(ExprOp op, ExprPtr lhs, ExprPtr rhs) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
}

ExprPtr make_not(ExprPtr operand) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Not;
    e->lhs = std::move(operand);
    return e;
}

namespace {

struct Token {
    enum Type { End, Ident, Int, Dec, Str, Sym } type = End;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }

    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

    [[noreturn]] void fail(const std::string& what, std::size_t pos) const {
        throw ConfigError("expression error at position " + std::to_string(pos) + ": " + what +
                          " in '" + std::string(src_) + "'");
    }

private:
    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        tok_.pos = i_;
        if (i_ >= src_.size()) {
            tok_ = {Token::End, "", i_};
            return;
        }
        char c = src_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
                ++j;
            tok_ = {Token::Ident, std::string(src_.substr(i_, j - i_)), i_};
            i_ = j;
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i_;
            bool dec = false;
            while (j < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[j])) || src_[j] == '.')) {
                if (src_[j] == '.') {
                    if (dec) break;
                    dec = true;
                }
                ++j;
            }
            tok_ = {dec ? Token::Dec : Token::Int, std::string(src_.substr(i_, j - i_)), i_};
            i_ = j;
            return;
        }
        if (c == '\'') {
            std::string out;
            std::size_t j = i_ + 1;
            for (;;) {
                if (j >= src_.size()) fail("unterminated string literal", i_);
                if (src_[j] == '\'') {
                    if (j + 1 < src_.size() && src_[j + 1] == '\'') { // '' escapes a quote
                        out.push_back('\'');
                        j += 2;
                        continue;
                    }
                    break;
                }
                out.push_back(src_[j]);
                ++j;
            }
            tok_ = {Token::Str, std::move(out), i_};
            i_ = j + 1;
            return;
        }
        static const char* two[] = {"<=", ">=", "<>", "!="};
        for (const char* s : two) {
            if (src_.substr(i_, 2) == s) {
                tok_ = {Token::Sym, std::string(s), i_};
                i_ += 2;
                return;
            }
        }
        if (std::string_view("+-*/()<>=").find(c) != std::string_view::npos) {
            tok_ = {Token::Sym, std::string(1, c), i_};
            ++i_;
            return;
        }
        fail(std::string("unexpected character '") + c + "'", i_);
    }

    std::string_view src_;
    std::size_t i_ = 0;
    Token tok_;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) {}

    ExprPtr parse() {
        ExprPtr e = parse_or();
        if (lex_.peek().type != Token::End) {
            lex_.fail("trailing input '" + lex_.peek().text + "'", lex_.peek().pos);
        }
        return e;
    }

private:
    bool accept_ident(std::string_view kw) {
        if (lex_.peek().type == Token::Ident && lex_.peek().text == kw) {
            lex_.take();
            return true;
        }
        return false;
    }

    bool accept_sym(std::string_view s) {
        if (lex_.peek().type == Token::Sym && lex_.peek().text == s) {
            lex_.take();
            return true;
        }
        return false;
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (accept_ident("or")) e = make_binary(ExprOp::Or, e, parse_and());
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_not();
        while (accept_ident("and")) e = make_binary(ExprOp::And, e, parse_not());
        return e;
    }

    ExprPtr parse_not() {
        if (accept_ident("not")) return make_not(parse_not());
        return parse_cmp();
    }

    ExprPtr parse_cmp() {
        ExprPtr e = parse_add();
        static const std::pair<const char*, ExprOp> ops[] = {
            {"<=", ExprOp::Le}, {">=", ExprOp::Ge}, {"<>", ExprOp::Ne}, {"!=", ExprOp::Ne},
            {"=", ExprOp::Eq},  {"<", ExprOp::Lt},  {">", ExprOp::Gt},
        };
        for (auto [sym, op] : ops) {
            if (accept_sym(sym)) return make_binary(op, e, parse_add());
        }
        return e;
    }

    ExprPtr parse_add() {
        ExprPtr e = parse_mul();
        for (;;) {
            if (accept_sym("+")) e = make_binary(ExprOp::Add, e, parse_mul());
            else if (accept_sym("-")) e = make_binary(ExprOp::Sub, e, parse_mul());
            else return e;
        }
    }

    ExprPtr parse_mul() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (accept_sym("*")) e = make_binary(ExprOp::Mul, e, parse_unary());
            else if (accept_sym("/")) e = make_binary(ExprOp::Div, e, parse_unary());
            else return e;
        }
    }

    ExprPtr parse_unary() {
        if (accept_sym("-")) {
            ExprPtr inner = parse_unary();
            // Fold a negated numeric literal.
            if (inner->op == ExprOp::Literal) {
                if (auto* i = std::get_if<std::int64_t>(&inner->literal))
                    return make_literal(Value(-*i));
                if (auto* d = std::get_if<double>(&inner->literal))
                    return make_literal(Value(-*d));
            }
            return make_binary(ExprOp::Sub, make_literal(Value(std::int64_t{0})), inner);
        }
        return parse_primary();
    }

    ExprPtr parse_primary() {
        Token t = lex_.peek();
        switch (t.type) {
        case Token::Int: {
            lex_.take();
            std::int64_t v = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc()) lex_.fail("bad integer literal '" + t.text + "'", t.pos);
            return make_literal(Value(v));
        }
        case Token::Dec: {
            lex_.take();
            double v = 0;
            auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc()) lex_.fail("bad decimal literal '" + t.text + "'", t.pos);
            return make_literal(Value(v));
        }
        case Token::Str:
            lex_.take();
            return make_literal(Value(std::move(t.text)));
        case Token::Ident:
            if (t.text == "true") { lex_.take(); return make_literal(Value(true)); }
            if (t.text == "false") { lex_.take(); return make_literal(Value(false)); }
            if (t.text == "null") { lex_.take(); return make_literal(Value{}); }
            if (t.text == "and" || t.text == "or" || t.text == "not")
                lex_.fail("misplaced keyword '" + t.text + "'", t.pos);
            lex_.take();
            return make_column(std::move(t.text));
        case Token::Sym:
            if (t.text == "(") {
                lex_.take();
                ExprPtr e = parse_or();
                if (!accept_sym(")")) lex_.fail("expected ')'", lex_.peek().pos);
                return e;
            }
            [[fallthrough]];
        default:
            lex_.fail("expected a value, column, or '('", t.pos);
        }
    }

    Lexer lex_;
};

bool numeric(ValueKind k) { return k == ValueKind::Integer || k == ValueKind::Decimal; }

double as_double(const Value& v) {
    if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
    return std::get<double>(v);
}

/// Numeric comparison that promotes integer to decimal when kinds mix.
int compare_for_predicate(const Value& a, const Value& b) {
    bool an = !is_null(a), bn = !is_null(b);
    if (an && bn && a.index() != b.index()) {
        auto ka = value_kind(a), kb = value_kind(b);
        if (numeric(*ka) && numeric(*kb)) {
            double x = as_double(a), y = as_double(b);
            return x < y ? -1 : (x > y ? 1 : 0);
        }
    }
    return compare_values(a, b);
}

} // namespace

ExprPtr parse_expression(std::string_view text) {
    return Parser(text).parse();
}

ValueKind type_check(const Expr& e, const Schema& schema) {
    switch (e.op) {
    case ExprOp::Column:
        return schema.at(schema.require(e.column)).kind;
    case ExprOp::Literal: {
        auto k = value_kind(e.literal);
        // The null literal participates in comparisons of any kind; give it
        // text so standalone checks stay total.
        return k ? *k : ValueKind::Text;
    }
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div: {
        ValueKind l = type_check(*e.lhs, schema);
        ValueKind r = type_check(*e.rhs, schema);
        if (!numeric(l) || !numeric(r)) {
            throw ConfigError("arithmetic requires numeric operands, got " +
                              std::string(kind_name(l)) + " and " + std::string(kind_name(r)) +
                              " in '" + to_string(e) + "'");
        }
        if (e.op == ExprOp::Div) return ValueKind::Decimal;
        return (l == ValueKind::Decimal || r == ValueKind::Decimal) ? ValueKind::Decimal
                                                                    : ValueKind::Integer;
    }
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge: {
        ValueKind l = type_check(*e.lhs, schema);
        ValueKind r = type_check(*e.rhs, schema);
        bool null_lit = (e.lhs->op == ExprOp::Literal && is_null(e.lhs->literal)) ||
                        (e.rhs->op == ExprOp::Literal && is_null(e.rhs->literal));
        if (l != r && !(numeric(l) && numeric(r)) && !null_lit) {
            throw ConfigError("cannot compare " + std::string(kind_name(l)) + " with " +
                              std::string(kind_name(r)) + " in '" + to_string(e) + "'");
        }
        return ValueKind::Boolean;
    }
    case ExprOp::And:
    case ExprOp::Or: {
        ValueKind l = type_check(*e.lhs, schema);
        ValueKind r = type_check(*e.rhs, schema);
        if (l != ValueKind::Boolean || r != ValueKind::Boolean) {
            throw ConfigError("logical operator requires boolean operands in '" + to_string(e) +
                              "'");
        }
        return ValueKind::Boolean;
    }
    case ExprOp::Not: {
        if (type_check(*e.lhs, schema) != ValueKind::Boolean) {
            throw ConfigError("'not' requires a boolean operand in '" + to_string(e) + "'");
        }
        return ValueKind::Boolean;
    }
    }
    throw ConfigError("unreachable expression op");
}

Value eval(const Expr& e, const Schema& schema, const Row& row) {
    switch (e.op) {
    case ExprOp::Column:
        return row[schema.require(e.column)];
    case ExprOp::Literal:
        return e.literal;
    case ExprOp::Add:
    case ExprOp::Sub:
    case ExprOp::Mul:
    case ExprOp::Div: {
        Value l = eval(*e.lhs, schema, row);
        Value r = eval(*e.rhs, schema, row);
        if (is_null(l) || is_null(r)) return Value{};
        bool dec = e.op == ExprOp::Div || l.index() == 2 || r.index() == 2;
        if (dec) {
            double x = as_double(l), y = as_double(r);
            switch (e.op) {
            case ExprOp::Add: return Value(x + y);
            case ExprOp::Sub: return Value(x - y);
            case ExprOp::Mul: return Value(x * y);
            default: return Value(x / y);
            }
        }
        std::int64_t x = std::get<std::int64_t>(l), y = std::get<std::int64_t>(r);
        switch (e.op) {
        case ExprOp::Add: return Value(x + y);
        case ExprOp::Sub: return Value(x - y);
        default: return Value(x * y);
        }
    }
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge: {
        int c = compare_for_predicate(eval(*e.lhs, schema, row), eval(*e.rhs, schema, row));
        switch (e.op) {
        case ExprOp::Eq: return Value(c == 0);
        case ExprOp::Ne: return Value(c != 0);
        case ExprOp::Lt: return Value(c < 0);
        case ExprOp::Le: return Value(c <= 0);
        case ExprOp::Gt: return Value(c > 0);
        default: return Value(c >= 0);
        }
    }
    case ExprOp::And: {
        Value l = eval(*e.lhs, schema, row);
        if (is_null(l) || !std::get<bool>(l)) return Value(false);
        Value r = eval(*e.rhs, schema, row);
        return Value(!is_null(r) && std::get<bool>(r));
    }
    case ExprOp::Or: {
        Value l = eval(*e.lhs, schema, row);
        if (!is_null(l) && std::get<bool>(l)) return Value(true);
        Value r = eval(*e.rhs, schema, row);
        return Value(!is_null(r) && std::get<bool>(r));
    }
    case ExprOp::Not: {
        Value l = eval(*e.lhs, schema, row);
        return Value(!(!is_null(l) && std::get<bool>(l)));
    }
    }
    throw ConfigError("unreachable expression op");
}

bool eval_predicate(const Expr& e, const Schema& schema, const Row& row) {
    Value v = eval(e, schema, row);
    return !is_null(v) && std::get<bool>(v);
}

namespace {

int precedence(ExprOp op) {
    switch (op) {
    case ExprOp::Or: return 1;
    case ExprOp::And: return 2;
    case ExprOp::Not: return 3;
    case ExprOp::Eq:
    case ExprOp::Ne:
    case ExprOp::Lt:
    case ExprOp::Le:
    case ExprOp::Gt:
    case ExprOp::Ge: return 4;
    case ExprOp::Add:
    case ExprOp::Sub: return 5;
    case ExprOp::Mul:
    case ExprOp::Div: return 6;
    default: return 7;
    }
}

const char* op_text(ExprOp op) {
    switch (op) {
    case ExprOp::Add: return "+";
    case ExprOp::Sub: return "-";
    case ExprOp::Mul: return "*";
    case ExprOp::Div: return "/";
    case ExprOp::Eq: return "=";
    case ExprOp::Ne: return "<>";
    case ExprOp::Lt: return "<";
    case ExprOp::Le: return "<=";
    case ExprOp::Gt: return ">";
    case ExprOp::Ge: return ">=";
    case ExprOp::And: return "and";
    case ExprOp::Or: return "or";
    default: return "?";
    }
}

std::string quote_text(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "''";
        else out.push_back(c);
    }
    out += "'";
    return out;
}

void print(const Expr& e, int parent_prec, std::string& out) {
    switch (e.op) {
    case ExprOp::Column:
        out += e.column;
        return;
    case ExprOp::Literal:
        if (is_null(e.literal)) out += "null";
        else if (e.literal.index() == 3) out += quote_text(std::get<std::string>(e.literal));
        else if (e.literal.index() == 2) {
            std::string s = value_to_string(e.literal);
            out += s;
            // keep decimal literals parseable as decimals
            if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
                s.find("inf") == std::string::npos && s.find("nan") == std::string::npos)
                out += ".0";
        } else out += value_to_string(e.literal);
        return;
    case ExprOp::Not: {
        int p = precedence(ExprOp::Not);
        if (p < parent_prec) out += "(";
        out += "not ";
        print(*e.lhs, p, out);
        if (p < parent_prec) out += ")";
        return;
    }
    default: {
        int p = precedence(e.op);
        bool cmp = p == 4; // comparisons do not chain
        if (p < parent_prec) out += "(";
        print(*e.lhs, cmp ? p + 1 : p, out);
        out += " ";
        out += op_text(e.op);
        out += " ";
        print(*e.rhs, p + 1, out); // left-associative
        if (p < parent_prec) out += ")";
        return;
    }
    }
}

} // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, 0, out);
    return out;
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
    case ExprOp::Column: return a.column == b.column;
    case ExprOp::Literal:
        return a.literal.index() == b.literal.index() && compare_values(a.literal, b.literal) == 0;
    case ExprOp::Not: return expr_equal(*a.lhs, *b.lhs);
    default: return expr_equal(*a.lhs, *b.lhs) && expr_equal(*a.rhs, *b.rhs);
    }
}

} // namespace etlforge
