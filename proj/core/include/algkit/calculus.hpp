#pragma once

#include <vector>

#include "algkit/algebroid.hpp"

namespace algkit {

/// Increasing q-tuples from {0..m-1} in lexicographic order.
std::vector<std::vector<int>> increasing_tuples(int m, int q);

/// Alternating degree-q form on sections, components stored against the
/// dual basis e^alpha on strictly increasing index tuples (lexicographic)
/// and extended by antisymmetry. Degree 0 is a single function.
class QForm {
 public:
  QForm(int rank, int degree, std::vector<Expr> components);

  static QForm zero(int rank, int degree);
  static QForm function(int rank, Expr f);
  static QForm basis_dual(int rank, int alpha);  // e^alpha

  int rank() const { return rank_; }
  int degree() const { return degree_; }
  std::span<const Expr> components() const { return comps_; }
  Expr& component_at(size_t flat) { return comps_[flat]; }

  /// Component on an arbitrary index tuple: signed increasing-tuple value,
  /// zero on repeated indices.
  Expr component(std::span<const int> tuple) const;

  /// Multilinear evaluation on sections (Expr result).
  Expr apply(std::span<const Section> sections) const;

 private:
  int rank_;
  int degree_;
  std::vector<Expr> comps_;
};

/// Lie derivative L_s^rho of a form; degree 0 is the anchor action.
QForm lie_derivative(const AlgebroidSpec& a, const Section& s, const QForm& omega);

/// Exterior differential d_rho. Degree 0: (df)_alpha = rho_alpha^i d_i f
/// (the anchor transpose applied to the ordinary differential). Degree m
/// input yields the zero (m+1)-form.
QForm d_rho(const AlgebroidSpec& a, const QForm& omega);

/// Sampled residual of d(d omega).
VerificationReport check_d_squared(const AlgebroidSpec& a, const QForm& omega,
                                   const CheckOptions& opts = {});

/// Vector-bundle morphism psi: E -> E' over phi: M -> M', linear on fibers.
/// base_map: target base coordinates as Exprs over source base coordinates;
/// fiber_map[beta'][alpha]: matrix entries over source base coordinates.
struct BundleMorphism {
  std::vector<Expr> base_map;
  std::vector<std::vector<Expr>> fiber_map;

  int source_rank() const {
    return fiber_map.empty() ? 0 : static_cast<int>(fiber_map.front().size());
  }
  int target_rank() const { return static_cast<int>(fiber_map.size()); }
  int target_dim() const { return static_cast<int>(base_map.size()); }

  static BundleMorphism identity(int base_dim, int rank);
};

/// psi1 after psi2 (psi2's target is psi1's source).
BundleMorphism compose(const BundleMorphism& psi1, const BundleMorphism& psi2);

/// (psi* omega')(s_1..s_q) = omega'(psi s_1, .., psi s_q) at phi(x).
QForm pullback(const BundleMorphism& psi, const QForm& target_form);

/// Morphism test d_rho . psi* = psi* . d_rho' sampled on the generating
/// family of the target: all coordinate 0-forms x'^i and all basis 1-forms
/// e'^gamma. Pullback is a wedge-algebra morphism and d a derivation, so
/// agreement on generators settles every degree.
VerificationReport check_morphism(const BundleMorphism& psi, const AlgebroidSpec& source,
                                  const AlgebroidSpec& target, const CheckOptions& opts = {});

}  // namespace algkit
