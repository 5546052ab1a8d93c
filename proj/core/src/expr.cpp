#include "algkit/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace algkit {

struct Expr::Node {
  Kind kind = Kind::Constant;
  double value = 0.0;  // Constant
  int index = 0;       // Coord: coordinate, Pow: exponent
  std::vector<Expr> children;
};

namespace {

std::shared_ptr<const Expr::Node> make_node(Expr::Kind kind, double value, int index,
                                            std::vector<Expr> children) {
  auto node = std::make_shared<Expr::Node>();
  node->kind = kind;
  node->value = value;
  node->index = index;
  node->children = std::move(children);
  return node;
}

int kind_rank(Expr::Kind k) { return static_cast<int>(k); }

}  // namespace

Expr::Expr() : node_(make_node(Kind::Constant, 0.0, 0, {})) {}
Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) { return Expr(make_node(Kind::Constant, value, 0, {})); }

Expr Expr::coord(int index) {
  if (index < 0) throw DimensionError("coordinate index must be nonnegative");
  return Expr(make_node(Kind::Coord, 0.0, index, {}));
}

Expr Expr::add(std::vector<Expr> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms.front();
  return Expr(make_node(Kind::Add, 0.0, 0, std::move(terms)));
}

Expr Expr::mul(std::vector<Expr> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors.front();
  return Expr(make_node(Kind::Mul, 0.0, 0, std::move(factors)));
}

Expr Expr::neg(Expr e) { return Expr(make_node(Kind::Neg, 0.0, 0, {std::move(e)})); }

Expr Expr::div(Expr num, Expr den) {
  return Expr(make_node(Kind::Div, 0.0, 0, {std::move(num), std::move(den)}));
}

Expr Expr::pow(Expr base, int exponent) {
  return Expr(make_node(Kind::Pow, 0.0, exponent, {std::move(base)}));
}

Expr Expr::ln(Expr arg) { return Expr(make_node(Kind::Ln, 0.0, 0, {std::move(arg)})); }

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::constant_value() const { return node_->value; }
int Expr::coord_index() const { return node_->index; }
int Expr::exponent() const { return node_->index; }
std::span<const Expr> Expr::children() const { return node_->children; }

bool Expr::is_constant(double value) const {
  return node_->kind == Kind::Constant && node_->value == value;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::add({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::add({a, Expr::neg(b)}); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::mul({a, b}); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::div(a, b); }
Expr operator-(const Expr& a) { return Expr::neg(a); }

// ---------------------------------------------------------------------------
// Evaluation

double Expr::eval(std::span<const double> pt) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return n.value;
    case Kind::Coord:
      if (static_cast<size_t>(n.index) >= pt.size())
        throw DimensionError("point has " + std::to_string(pt.size()) +
                             " coordinates, expression uses index " + std::to_string(n.index));
      return pt[static_cast<size_t>(n.index)];
    case Kind::Add: {
      double acc = 0.0;
      for (const Expr& c : n.children) acc += c.eval(pt);
      return acc;
    }
    case Kind::Mul: {
      double acc = 1.0;
      for (const Expr& c : n.children) acc *= c.eval(pt);
      return acc;
    }
    case Kind::Neg:
      return -n.children[0].eval(pt);
    case Kind::Div: {
      const double den = n.children[1].eval(pt);
      if (den == 0.0) throw DomainError("division by zero");
      return n.children[0].eval(pt) / den;
    }
    case Kind::Pow: {
      const double base = n.children[0].eval(pt);
      const int k = n.index;
      if (k < 0 && base == 0.0) throw DomainError("zero base with negative exponent");
      double acc = 1.0;
      for (int i = 0; i < std::abs(k); ++i) acc *= base;
      return k < 0 ? 1.0 / acc : acc;
    }
    case Kind::Ln: {
      const double arg = n.children[0].eval(pt);
      if (!(arg > 0.0)) throw DomainError("ln of non-positive argument");
      return std::log(arg);
    }
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Differentiation

Expr Expr::diff(int coord) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return constant(0.0);
    case Kind::Coord:
      return constant(n.index == coord ? 1.0 : 0.0);
    case Kind::Add: {
      std::vector<Expr> terms;
      terms.reserve(n.children.size());
      for (const Expr& c : n.children) terms.push_back(c.diff(coord));
      return add(std::move(terms));
    }
    case Kind::Mul: {
      // Product rule over the n-ary product.
      std::vector<Expr> terms;
      for (size_t i = 0; i < n.children.size(); ++i) {
        std::vector<Expr> factors;
        for (size_t j = 0; j < n.children.size(); ++j)
          factors.push_back(i == j ? n.children[j].diff(coord) : n.children[j]);
        terms.push_back(mul(std::move(factors)));
      }
      return add(std::move(terms));
    }
    case Kind::Neg:
      return neg(n.children[0].diff(coord));
    case Kind::Div: {
      const Expr& a = n.children[0];
      const Expr& b = n.children[1];
      return div(a.diff(coord) * b - a * b.diff(coord), pow(b, 2));
    }
    case Kind::Pow: {
      const Expr& a = n.children[0];
      const int k = n.index;
      if (k == 0) return constant(0.0);
      return constant(static_cast<double>(k)) * pow(a, k - 1) * a.diff(coord);
    }
    case Kind::Ln:
      return div(n.children[0].diff(coord), n.children[0]);
  }
  throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Structural comparison

int Expr::compare(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return 0;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind) return kind_rank(x.kind) < kind_rank(y.kind) ? -1 : 1;
  switch (x.kind) {
    case Kind::Constant:
      if (x.value != y.value) return x.value < y.value ? -1 : 1;
      return 0;
    case Kind::Coord:
      if (x.index != y.index) return x.index < y.index ? -1 : 1;
      return 0;
    case Kind::Pow:
      if (x.index != y.index) return x.index < y.index ? -1 : 1;
      break;
    default:
      break;
  }
  if (x.children.size() != y.children.size())
    return x.children.size() < y.children.size() ? -1 : 1;
  for (size_t i = 0; i < x.children.size(); ++i) {
    const int c = compare(x.children[i], y.children[i]);
    if (c != 0) return c;
  }
  return 0;
}

bool Expr::identical(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

int Expr::max_coord() const {
  const Node& n = *node_;
  int best = n.kind == Kind::Coord ? n.index : -1;
  for (const Expr& c : n.children) best = std::max(best, c.max_coord());
  return best;
}

// ---------------------------------------------------------------------------
// Substitution

Expr Expr::substitute(std::span<const Expr> replacement) const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Constant:
      return *this;
    case Kind::Coord:
      if (static_cast<size_t>(n.index) >= replacement.size())
        throw DimensionError("substitution list too short for coordinate " +
                             std::to_string(n.index));
      return replacement[static_cast<size_t>(n.index)];
    default: {
      std::vector<Expr> children;
      children.reserve(n.children.size());
      for (const Expr& c : n.children) children.push_back(c.substitute(replacement));
      return Expr(make_node(n.kind, n.value, n.index, std::move(children)));
    }
  }
}

// ---------------------------------------------------------------------------
// Simplification
//
// The polynomial fragment (sums, products, negation, integer powers,
// constants, coordinates) is canonicalized as a sorted sum of terms
// coefficient * monomial, where a monomial is a sorted power product of
// atoms. Atoms are coordinates or opaque simplified subtrees (quotients,
// logs, sums appearing inside products). Like terms cancel exactly.

namespace {

struct MonomialFactor {
  Expr atom;
  int exponent;
};

struct Term {
  double coeff = 1.0;
  std::vector<MonomialFactor> monomial;  // sorted by Expr::compare on atom
};

int compare_monomials(const std::vector<MonomialFactor>& a,
                      const std::vector<MonomialFactor>& b) {
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    const int c = Expr::compare(a[i].atom, b[i].atom);
    if (c != 0) return c;
    if (a[i].exponent != b[i].exponent) return a[i].exponent < b[i].exponent ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

Expr simplify_impl(const Expr& e);
Expr canonicalize_sum(const Expr& e);

void absorb_atom(Term& term, Expr atom, int exponent) {
  if (exponent == 0) return;
  auto it = std::find_if(term.monomial.begin(), term.monomial.end(),
                         [&](const MonomialFactor& f) { return Expr::identical(f.atom, atom); });
  if (it != term.monomial.end()) {
    it->exponent += exponent;
    if (it->exponent == 0) term.monomial.erase(it);
    return;
  }
  term.monomial.push_back({std::move(atom), exponent});
}

// Multiplies s^k into `term` where `s` is already canonical.
void absorb_simplified_power(Term& term, const Expr& s, int k) {
  if (k == 0) return;
  switch (s.kind()) {
    case Expr::Kind::Constant: {
      const double c = s.constant_value();
      if (c == 0.0 && k < 0) {
        absorb_atom(term, s, k);  // keep the domain error for eval
        return;
      }
      double acc = 1.0;
      for (int i = 0; i < std::abs(k); ++i) acc *= c;
      term.coeff *= k < 0 ? 1.0 / acc : acc;
      return;
    }
    case Expr::Kind::Coord:
      absorb_atom(term, s, k);
      return;
    case Expr::Kind::Neg:
      if (k % 2 != 0) term.coeff = -term.coeff;
      absorb_simplified_power(term, s.children()[0], k);
      return;
    case Expr::Kind::Mul:
      for (const Expr& c : s.children()) absorb_simplified_power(term, c, k);
      return;
    case Expr::Kind::Pow:
      absorb_atom(term, s.children()[0], s.exponent() * k);
      return;
    default:  // Add (two or more terms), Div, Ln: opaque atom
      absorb_atom(term, s, k);
      return;
  }
}

// Multiplies raw_base^k into `term`, simplifying leaves on the way.
void collect_power(Term& term, const Expr& raw_base, int k) {
  if (k == 0) return;
  switch (raw_base.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Coord:
      absorb_simplified_power(term, raw_base, k);
      return;
    case Expr::Kind::Neg:
      if (k % 2 != 0) term.coeff = -term.coeff;
      collect_power(term, raw_base.children()[0], k);
      return;
    case Expr::Kind::Mul:
      for (const Expr& c : raw_base.children()) collect_power(term, c, k);
      return;
    case Expr::Kind::Pow:
      collect_power(term, raw_base.children()[0], raw_base.exponent() * k);
      return;
    case Expr::Kind::Add:
      absorb_simplified_power(term, canonicalize_sum(raw_base), k);
      return;
    case Expr::Kind::Div:
    case Expr::Kind::Ln:
      absorb_simplified_power(term, simplify_impl(raw_base), k);
      return;
  }
}

// Accumulates summands of `e` into `terms` with sign `sign`.
void collect_terms(std::vector<Term>& terms, const Expr& e, double sign) {
  switch (e.kind()) {
    case Expr::Kind::Add:
      for (const Expr& c : e.children()) collect_terms(terms, c, sign);
      return;
    case Expr::Kind::Neg:
      collect_terms(terms, e.children()[0], -sign);
      return;
    default: {
      Term term;
      term.coeff = sign;
      collect_power(term, e, 1);
      std::sort(term.monomial.begin(), term.monomial.end(),
                [](const MonomialFactor& a, const MonomialFactor& b) {
                  const int c = Expr::compare(a.atom, b.atom);
                  return c != 0 ? c < 0 : a.exponent < b.exponent;
                });
      terms.push_back(std::move(term));
      return;
    }
  }
}

Expr rebuild_monomial(double coeff, const std::vector<MonomialFactor>& monomial) {
  std::vector<Expr> factors;
  for (const MonomialFactor& f : monomial)
    factors.push_back(f.exponent == 1 ? f.atom : Expr::pow(f.atom, f.exponent));
  if (factors.empty()) return Expr::constant(coeff);
  Expr product = Expr::mul(std::move(factors));
  if (coeff == 1.0) return product;
  if (coeff == -1.0) return Expr::neg(product);
  return Expr::mul({Expr::constant(coeff), std::move(product)});
}

// Canonical sum-of-terms for the polynomial-like fragment rooted at `e`.
// `e`'s summands are simplified during collection.
Expr canonicalize_sum(const Expr& e) {
  std::vector<Term> raw;
  collect_terms(raw, e, 1.0);

  std::sort(raw.begin(), raw.end(),
            [](const Term& a, const Term& b) { return compare_monomials(a.monomial, b.monomial) < 0; });

  std::vector<Term> combined;
  for (Term& t : raw) {
    if (!combined.empty() && compare_monomials(combined.back().monomial, t.monomial) == 0)
      combined.back().coeff += t.coeff;
    else
      combined.push_back(std::move(t));
  }

  double constant_part = 0.0;
  std::vector<Expr> out;
  for (const Term& t : combined) {
    if (t.coeff == 0.0) continue;
    if (t.monomial.empty()) {
      constant_part += t.coeff;
      continue;
    }
    out.push_back(rebuild_monomial(t.coeff, t.monomial));
  }
  if (constant_part != 0.0) out.insert(out.begin(), Expr::constant(constant_part));
  if (out.empty()) return Expr::constant(0.0);
  return Expr::add(std::move(out));
}

Expr simplify_impl(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
    case Expr::Kind::Coord:
      return e;
    case Expr::Kind::Ln: {
      Expr arg = simplify_impl(e.children()[0]);
      if (arg.is_constant(1.0)) return Expr::constant(0.0);
      return Expr::ln(std::move(arg));
    }
    case Expr::Kind::Div: {
      Expr num = simplify_impl(e.children()[0]);
      Expr den = simplify_impl(e.children()[1]);
      if (num.is_zero() && !den.is_zero()) return Expr::constant(0.0);
      if (den.is_constant(1.0)) return num;
      // Constant denominators fold into the coefficient.
      if (den.kind() == Expr::Kind::Constant && den.constant_value() != 0.0)
        return canonicalize_sum(
            Expr::mul({Expr::constant(1.0 / den.constant_value()), std::move(num)}));
      return Expr::div(std::move(num), std::move(den));
    }
    case Expr::Kind::Pow:
    case Expr::Kind::Add:
    case Expr::Kind::Mul:
    case Expr::Kind::Neg:
      return canonicalize_sum(e);
  }
  throw Error("corrupt expression node");
}

}  // namespace

Expr Expr::simplify() const { return simplify_impl(*this); }

Expr simplified_sum(std::vector<Expr> terms) { return Expr::add(std::move(terms)).simplify(); }

Expr simplified_product(std::vector<Expr> factors) {
  return Expr::mul(std::move(factors)).simplify();
}

// ---------------------------------------------------------------------------
// S-expressions

namespace {

void format_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

void print_sexpr(std::string& out, const Expr& e, const CoordNames& names) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      format_double(out, e.constant_value());
      return;
    case Expr::Kind::Coord: {
      const size_t i = static_cast<size_t>(e.coord_index());
      if (i >= names.size())
        throw DimensionError("no name bound for coordinate " + std::to_string(i));
      out += names[i];
      return;
    }
    case Expr::Kind::Add:
    case Expr::Kind::Mul: {
      out += e.kind() == Expr::Kind::Add ? "(+" : "(*";
      for (const Expr& c : e.children()) {
        out += ' ';
        print_sexpr(out, c, names);
      }
      out += ')';
      return;
    }
    case Expr::Kind::Neg:
      out += "(- ";
      print_sexpr(out, e.children()[0], names);
      out += ')';
      return;
    case Expr::Kind::Div:
      out += "(/ ";
      print_sexpr(out, e.children()[0], names);
      out += ' ';
      print_sexpr(out, e.children()[1], names);
      out += ')';
      return;
    case Expr::Kind::Pow:
      out += "(^ ";
      print_sexpr(out, e.children()[0], names);
      out += ' ';
      out += std::to_string(e.exponent());
      out += ')';
      return;
    case Expr::Kind::Ln:
      out += "(ln ";
      print_sexpr(out, e.children()[0], names);
      out += ')';
      return;
  }
}

struct SexprParser {
  std::string_view text;
  size_t pos = 0;
  const CoordNames& names;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& what) {
    throw ParseError("s-expression error at offset " + std::to_string(pos) + ": " + what);
  }

  std::string_view token() {
    const size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')')
      ++pos;
    if (pos == start) fail("expected token");
    return text.substr(start, pos - start);
  }

  Expr parse() {
    skip_ws();
    if (pos >= text.size()) fail("empty input");
    if (text[pos] != '(') return parse_atom(token());
    ++pos;  // '('
    skip_ws();
    const std::string_view op = token();
    std::vector<Expr> args;
    while (true) {
      skip_ws();
      if (pos >= text.size()) fail("unterminated list");
      if (text[pos] == ')') {
        ++pos;
        break;
      }
      args.push_back(parse());
    }
    return apply(op, std::move(args));
  }

  Expr parse_atom(std::string_view tok) {
    double value = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec == std::errc() && res.ptr == tok.data() + tok.size())
      return Expr::constant(value);
    for (size_t i = 0; i < names.size(); ++i)
      if (names[i] == tok) return Expr::coord(static_cast<int>(i));
    fail("unknown symbol '" + std::string(tok) + "'");
  }

  Expr apply(std::string_view op, std::vector<Expr> args) {
    if (op == "+") {
      if (args.empty()) fail("+ needs arguments");
      return Expr::add(std::move(args));
    }
    if (op == "*") {
      if (args.empty()) fail("* needs arguments");
      return Expr::mul(std::move(args));
    }
    if (op == "-") {
      if (args.size() == 1) return Expr::neg(std::move(args[0]));
      if (args.size() < 2) fail("- needs arguments");
      std::vector<Expr> terms{args[0]};
      for (size_t i = 1; i < args.size(); ++i) terms.push_back(Expr::neg(std::move(args[i])));
      return Expr::add(std::move(terms));
    }
    if (op == "/") {
      if (args.size() != 2) fail("/ needs exactly two arguments");
      return Expr::div(std::move(args[0]), std::move(args[1]));
    }
    if (op == "^") {
      if (args.size() != 2) fail("^ needs exactly two arguments");
      if (args[1].kind() != Expr::Kind::Constant) fail("^ exponent must be an integer literal");
      const double ev = args[1].constant_value();
      const int k = static_cast<int>(ev);
      if (static_cast<double>(k) != ev) fail("^ exponent must be an integer literal");
      return Expr::pow(std::move(args[0]), k);
    }
    if (op == "ln") {
      if (args.size() != 1) fail("ln needs exactly one argument");
      return Expr::ln(std::move(args[0]));
    }
    fail("unknown operator '" + std::string(op) + "'");
  }
};

}  // namespace

std::string Expr::to_sexpr(const CoordNames& names) const {
  std::string out;
  print_sexpr(out, *this, names);
  return out;
}

Expr Expr::parse_sexpr(std::string_view text, const CoordNames& names) {
  SexprParser parser{text, 0, names};
  Expr e = parser.parse();
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing characters");
  return e;
}

CoordNames make_coords(const std::string& stem, int count, int start) {
  CoordNames names;
  names.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count; ++i) names.push_back(stem + std::to_string(start + i));
  return names;
}

CoordNames concat_coords(CoordNames a, const CoordNames& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace algkit
