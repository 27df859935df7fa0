#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "fsk/field.hpp"

namespace fsk {

/// Compiled arithmetic expression in x and y.
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | x | y | pi | name '(' expr ')' | '(' expr ')'
///
/// Functions: sin cos tan exp log sqrt abs. Malformed input raises ParseError
/// with the offending column.
class Expression {
 public:
  static Expression parse(std::string_view text);

  double operator()(double x, double y) const;
  const std::string& source() const;
  BivariateFn as_function() const;

 private:
  struct Program;
  explicit Expression(std::shared_ptr<const Program> program) : program_(std::move(program)) {}
  std::shared_ptr<const Program> program_;
};

inline Expression parse_expression(std::string_view text) { return Expression::parse(text); }

}  // namespace fsk
