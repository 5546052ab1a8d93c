#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "algkit/errors.hpp"

namespace algkit {

// Coordinate names are presentation metadata; expressions reference
// coordinates by position.
using CoordNames = std::vector<std::string>;

CoordNames make_coords(const std::string& stem, int count, int start = 1);
CoordNames concat_coords(CoordNames a, const CoordNames& b);

/// Immutable symbolic scalar expression over positional coordinates.
///
/// The grammar is deliberately small: constants, coordinate references,
/// n-ary sums and products, negation, quotients, integer powers and the
/// natural logarithm. It covers every coefficient function used by the
/// library while keeping exact differentiation a one-screen recursion.
/// Values are shared immutable trees; copying is O(1) and thread-safe.
class Expr {
 public:
  enum class Kind { Constant, Coord, Add, Mul, Neg, Div, Pow, Ln };

  // Default-constructed Expr is the constant 0.
  Expr();

  static Expr constant(double value);
  static Expr coord(int index);
  static Expr add(std::vector<Expr> terms);
  static Expr mul(std::vector<Expr> factors);
  static Expr neg(Expr e);
  static Expr div(Expr num, Expr den);
  static Expr pow(Expr base, int exponent);
  static Expr ln(Expr arg);

  Kind kind() const;
  double constant_value() const;  // Kind::Constant only
  int coord_index() const;        // Kind::Coord only
  int exponent() const;           // Kind::Pow only
  std::span<const Expr> children() const;

  /// IEEE double value at `pt`. Deterministic: a fixed tree evaluated at a
  /// fixed point always reproduces the same bits.
  /// Throws DomainError (ln arg <= 0, zero denominator, 0 to a negative
  /// power) and DimensionError (pt shorter than the coordinates used).
  double eval(std::span<const double> pt) const;

  /// Exact symbolic partial derivative with respect to coordinate `coord`.
  /// A coordinate not appearing in the tree yields the zero expression.
  Expr diff(int coord) const;

  /// Best-effort canonicalization: constant folding, 0/1 absorption and
  /// like-term collection over the polynomial fragment (quotients, logs and
  /// sums-inside-products are treated as opaque atoms). Semantically equal
  /// polynomial inputs normalize to identical trees. Not a normal form for
  /// the full grammar; identity checks elsewhere sample numerically.
  Expr simplify() const;

  /// Replace coordinate i by replacement[i]. Every coordinate used by the
  /// tree must be covered (DimensionError otherwise).
  Expr substitute(std::span<const Expr> replacement) const;

  bool is_constant(double value) const;
  bool is_zero() const { return is_constant(0.0); }

  /// Highest coordinate index referenced, or -1 for constant trees.
  int max_coord() const;

  /// Structural equality (same tree).
  static bool identical(const Expr& a, const Expr& b);

  /// Deterministic total order used for canonical term sorting.
  static int compare(const Expr& a, const Expr& b);

  /// Prefix s-expression, e.g. "(/ (+ (^ x1 2) (^ x2 2)) 2)".
  std::string to_sexpr(const CoordNames& names) const;
  static Expr parse_sexpr(std::string_view text, const CoordNames& names);

  // Convenience arithmetic (no simplification applied).
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

  struct Node;  // opaque; defined in expr.cpp

 private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// Sum of `terms`, already simplified. Empty input gives 0.
Expr simplified_sum(std::vector<Expr> terms);
/// Product of `factors`, already simplified. Empty input gives 1.
Expr simplified_product(std::vector<Expr> factors);

}  // namespace algkit
