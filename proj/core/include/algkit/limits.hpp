#pragma once

#include "algkit/prolongation.hpp"

namespace algkit {

/// Finite tower of algebroids E_0 -> E_1 -> ... with bonding maps: eps on
/// bases (target coordinates as Exprs over source coordinates) and lambda on
/// bundles (fiber-linear, entries over source coordinates). One-step maps
/// are stored; longer bondings compose, so the cocycle identity holds by
/// construction. Dimensions must be nondecreasing and eps injective on the
/// sample grid.
class DirectSystemSpec {
 public:
  DirectSystemSpec(std::vector<AlgebroidSpec> levels,
                   std::vector<std::vector<Expr>> base_steps,
                   std::vector<std::vector<std::vector<Expr>>> fiber_steps);

  /// Tower with canonical injections x -> (x, 0...) and block fiber
  /// injections; the default constructor of every example in scope.
  static DirectSystemSpec canonical(std::vector<AlgebroidSpec> levels);

  size_t depth() const { return levels_.size(); }
  const AlgebroidSpec& level(size_t i) const { return levels_.at(i); }
  const std::vector<Expr>& base_step(size_t i) const { return base_steps_.at(i); }
  const std::vector<std::vector<Expr>>& fiber_step(size_t i) const { return fiber_steps_.at(i); }

  /// Composed eps_i^j (i <= j); identity when i == j.
  std::vector<Expr> base_bonding(size_t i, size_t j) const;
  /// Composed lambda_i^j (entries over level-i coordinates).
  std::vector<std::vector<Expr>> fiber_bonding(size_t i, size_t j) const;

 private:
  std::vector<AlgebroidSpec> levels_;
  std::vector<std::vector<Expr>> base_steps_;
  std::vector<std::vector<std::vector<Expr>>> fiber_steps_;
};

/// Point of the direct limit represented at a finite level (zero-based).
struct IndPoint {
  size_t level;
  std::vector<double> coords;
};

/// Representative of pt at level j >= pt.level.
IndPoint push(const DirectSystemSpec& sys, const IndPoint& pt, size_t to_level);

/// Direct-limit equality: representatives agree (within `tol`, exact for
/// canonical injections) after pushing both to the higher level.
bool ind_equal(const DirectSystemSpec& sys, const IndPoint& a, const IndPoint& b,
               double tol = 1e-12);

/// Machine verification of the direct-sequence conditions on every
/// consecutive pair: (a) anchor compatibility rho_j . lambda = T eps . rho_i
/// on basis sections, (b) lambda an algebroid morphism (exterior-derivative
/// test), (c) bracket compatibility and (d) Leibniz compatibility on
/// constructed compatible section pairs with a projective function.
VerificationReport verify_direct_system(const DirectSystemSpec& sys,
                                        const CheckOptions& opts = {});

struct SectionFamily {
  std::vector<Section> per_level;
};
struct FieldFamily {
  std::vector<VectorField> per_level;
};
struct FunctionTower {
  std::vector<Expr> per_level;
};

/// Compatibility at each consecutive pair: lambda . s_i = s_j . eps for
/// sections, T eps . X_i = X_j . eps for fields, f_i = f_j . eps for
/// function towers (projective sequence).
VerificationReport verify_family(const DirectSystemSpec& sys, const SectionFamily& fam,
                                 const CheckOptions& opts = {});
VerificationReport verify_family(const DirectSystemSpec& sys, const FieldFamily& fam,
                                 const CheckOptions& opts = {});
VerificationReport verify_family(const DirectSystemSpec& sys, const FunctionTower& fam,
                                 const CheckOptions& opts = {});

/// Evaluates the level-pt.level representative, checking representative
/// independence along pt's orbit up the tower (IncompatibleFamily beyond
/// `tol`).
double limit_eval(const DirectSystemSpec& sys, const FunctionTower& fam, const IndPoint& pt,
                  double tol = 1e-9);
std::vector<double> limit_eval(const DirectSystemSpec& sys, const SectionFamily& fam,
                               const IndPoint& pt, double tol = 1e-9);
std::vector<double> limit_eval(const DirectSystemSpec& sys, const FieldFamily& fam,
                               const IndPoint& pt, double tol = 1e-9);

struct ProlongedSystem {
  DirectSystemSpec system;
  VerificationReport verification;
};

/// Prolongs every level by a trivial fibration of dimension fiber_dims[i]
/// (nondecreasing); bonding maps are T^lambda theta with theta = eps x
/// canonical fiber injection. The returned report is verify_direct_system
/// of the prolonged tower.
ProlongedSystem prolong_system(const DirectSystemSpec& sys, const std::vector<int>& fiber_dims,
                               const CheckOptions& opts = {});

}  // namespace algkit
