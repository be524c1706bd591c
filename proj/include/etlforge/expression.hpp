// Copyright 2026 The etlforge Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "etlforge/schema.hpp"
#include "etlforge/value.hpp"

namespace etlforge {

enum class ExprOp {
    Column, Literal,
    Add, Sub, Mul, Div,
    Eq, Ne, Lt, Le, Gt, Ge,
    And, Or, Not,
};

/// Immutable expression tree over the columns of one schema.
///
/// Semantics:
///  - arithmetic over integer/decimal; any null operand yields null;
///    division always produces decimal; mixed operands promote to decimal
///  - comparisons follow the engine-wide total order (null sorts first), so
///    they always yield a boolean, never null
///  - and/or/not take booleans; a null boolean operand counts as false
struct Expr {
    ExprOp op = ExprOp::Literal;
    std::string column;                  // ExprOp::Column
    Value literal;                       // ExprOp::Literal
    std::shared_ptr<const Expr> lhs;     // binary ops; operand of Not
    std::shared_ptr<const Expr> rhs;
};

using ExprPtr = std::shared_ptr<const Expr>;

/// Grammar (lowest to highest precedence):
///   or | and | not | comparison (= <> != < <= > >=) | + - | * / | unary - |
///   primary: integer, decimal, 'single-quoted text', true, false, null,
///            column identifier, parenthesized expression
ExprPtr parse_expression(std::string_view text); // throws ConfigError with position

/// Result kind of the expression against a schema; throws ConfigError on
/// unknown columns or kind mismatches.
ValueKind type_check(const Expr& e, const Schema& schema);

Value eval(const Expr& e, const Schema& schema, const Row& row);

/// True iff the predicate evaluates to boolean true (null counts as false).
bool eval_predicate(const Expr& e, const Schema& schema, const Row& row);

/// Canonical text form; parse_expression(to_string(e)) reproduces e.
std::string to_string(const Expr& e);

ExprPtr make_column(std::string name);
ExprPtr make_literal(Value v);
ExprPtr make_binary(ExprOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_not(ExprPtr operand);

bool expr_equal(const Expr& a, const Expr& b);

} // namespace etlforge
