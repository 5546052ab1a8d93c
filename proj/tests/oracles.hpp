// Finite-difference oracles for the identity tests. Everything here uses
// Expr::eval only, never Expr::diff, so the symbolic-derivative path the
// library takes stays independent of the values it is checked against.
#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "algkit/algebroid.hpp"

namespace oracle {

using algkit::AlgebroidSpec;
using algkit::Expr;
using algkit::Section;

using ScalarFn = std::function<double(std::span<const double>)>;
using VecFn = std::function<std::vector<double>(std::span<const double>)>;

inline ScalarFn expr_fn(const Expr& e) {
  return [e](std::span<const double> p) { return e.eval(p); };
}

inline VecFn section_fn(const Section& s) {
  return [s](std::span<const double> p) {
    std::vector<double> out;
    out.reserve(s.coeffs.size());
    for (const Expr& c : s.coeffs) out.push_back(c.eval(p));
    return out;
  };
}

inline double central_diff(const ScalarFn& f, int coord, std::span<const double> p,
                           double h = 1e-5) {
  std::vector<double> hi(p.begin(), p.end());
  std::vector<double> lo(p.begin(), p.end());
  hi[static_cast<size_t>(coord)] += h;
  lo[static_cast<size_t>(coord)] -= h;
  return (f(hi) - f(lo)) / (2.0 * h);
}

inline double central_diff(const Expr& e, int coord, std::span<const double> p, double h = 1e-5) {
  return central_diff(expr_fn(e), coord, p, h);
}

// Vector-field commutator by finite differences:
// [X,Y]^i = X^j d_j Y^i - Y^j d_j X^i.
inline std::vector<double> numeric_vf_bracket(const VecFn& x, const VecFn& y,
                                              std::span<const double> p, double h = 1e-5) {
  const std::vector<double> xv = x(p);
  const std::vector<double> yv = y(p);
  const size_t n = xv.size();
  std::vector<double> out(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      const ScalarFn yi = [&y, i](std::span<const double> q) { return y(q)[i]; };
      const ScalarFn xi = [&x, i](std::span<const double> q) { return x(q)[i]; };
      out[i] += xv[j] * central_diff(yi, static_cast<int>(j), p, h) -
                yv[j] * central_diff(xi, static_cast<int>(j), p, h);
    }
  }
  return out;
}

// Anchor image of a section as a point function.
inline VecFn numeric_anchor(const AlgebroidSpec& a, const VecFn& s) {
  return [&a, s](std::span<const double> p) {
    const std::vector<double> sv = s(p);
    std::vector<double> out(static_cast<size_t>(a.base_dim()), 0.0);
    for (int i = 0; i < a.base_dim(); ++i)
      for (int alpha = 0; alpha < a.rank(); ++alpha)
        out[static_cast<size_t>(i)] +=
            a.anchor_coef(i, alpha).eval(p) * sv[static_cast<size_t>(alpha)];
    return out;
  };
}

// Section bracket from the coordinate formula, with every derivative taken
// by central differences.
inline VecFn numeric_bracket(const AlgebroidSpec& a, const VecFn& s1, const VecFn& s2,
                             double h = 1e-4) {
  return [&a, s1, s2, h](std::span<const double> p) {
    const std::vector<double> v1 = s1(p);
    const std::vector<double> v2 = s2(p);
    const VecFn rho1 = numeric_anchor(a, s1);
    const VecFn rho2 = numeric_anchor(a, s2);
    const std::vector<double> r1 = rho1(p);
    const std::vector<double> r2 = rho2(p);
    const int m = a.rank();
    std::vector<double> out(static_cast<size_t>(m), 0.0);
    for (int g = 0; g < m; ++g) {
      double acc = 0.0;
      for (int alpha = 0; alpha < m; ++alpha)
        for (int beta = 0; beta < m; ++beta) {
          if (alpha == beta) continue;
          acc += v1[static_cast<size_t>(alpha)] * v2[static_cast<size_t>(beta)] *
                 a.structure_coef(alpha, beta, g).eval(p);
        }
      const ScalarFn s2g = [&s2, g](std::span<const double> q) {
        return s2(q)[static_cast<size_t>(g)];
      };
      const ScalarFn s1g = [&s1, g](std::span<const double> q) {
        return s1(q)[static_cast<size_t>(g)];
      };
      for (int i = 0; i < a.base_dim(); ++i) {
        acc += r1[static_cast<size_t>(i)] * central_diff(s2g, i, p, h);
        acc -= r2[static_cast<size_t>(i)] * central_diff(s1g, i, p, h);
      }
      out[static_cast<size_t>(g)] = acc;
    }
    return out;
  };
}

// Cyclic jacobiator with nested finite-difference brackets; noisier than a
// single bracket, so compare with a tolerance around 1e-3.
inline std::vector<double> numeric_jacobiator(const AlgebroidSpec& a, const VecFn& s1,
                                              const VecFn& s2, const VecFn& s3,
                                              std::span<const double> p, double h = 1e-4) {
  const VecFn t1 = numeric_bracket(a, s1, numeric_bracket(a, s2, s3, h), h);
  const VecFn t2 = numeric_bracket(a, s2, numeric_bracket(a, s3, s1, h), h);
  const VecFn t3 = numeric_bracket(a, s3, numeric_bracket(a, s1, s2, h), h);
  const std::vector<double> a1 = t1(p);
  const std::vector<double> a2 = t2(p);
  const std::vector<double> a3 = t3(p);
  std::vector<double> out(a1.size(), 0.0);
  for (size_t i = 0; i < out.size(); ++i) out[i] = a1[i] + a2[i] + a3[i];
  return out;
}

}  // namespace oracle
