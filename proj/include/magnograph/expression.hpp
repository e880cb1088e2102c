#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace magnograph {

/// Closed-form scalar expression in the edge coordinate `x`.
///
/// Grammar: numbers, `x`, `pi`, `+ - * / ^` (with `^` right-associative and
/// binding tighter than unary minus), parentheses and the functions
/// `sin`, `cos`, `exp`, `sqrt`.
class Expression {
 public:
  /// Throws ParseError on malformed input.
  static Expression parse(std::string_view text);
  static Expression constant(double value);

  double operator()(double x) const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  std::shared_ptr<const Node> root_;
  std::string source_;
};

}  // namespace magnograph
