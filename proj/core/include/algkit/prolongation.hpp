#pragma once

#include <utility>

#include "algkit/calculus.hpp"

namespace algkit {

/// Trivial fibration P = M x F in the global chart: total coordinates
/// (x^1..x^n, u^1..u^q), projection = coordinate truncation.
struct Fibration {
  int base_dim;
  int fiber_dim;
  Box fiber_box;

  Fibration(int base_dim_, int fiber_dim_, std::optional<Box> fiber_box_ = std::nullopt)
      : base_dim(base_dim_),
        fiber_dim(fiber_dim_),
        fiber_box(fiber_box_.value_or(Box::cube(fiber_dim_))) {
    if (fiber_dim < 1) throw ShapeError("fibration fiber dimension must be >= 1");
  }

  int total_dim() const { return base_dim + fiber_dim; }
};

/// Element of the prolongation at p: (b, v) with rho(b) = T nu(v), i.e. the
/// first base_dim components of v equal the anchor image of b at nu(p).
struct ProlongedElement {
  std::vector<double> point;  // total coordinates (x, u)
  std::vector<double> b;      // fiber vector of E at nu(p)
  std::vector<double> v;      // tangent vector at p
};

/// The prolongation T^E P as an algebroid over the total space: rank m+q,
/// anchor [[rho (u-independent lift), 0], [0, Id_q]], structure functions
/// lifted on the X-block and zero elsewhere.
AlgebroidSpec prolong(const AlgebroidSpec& a, const Fibration& fib);

/// Solves the fiber constraint: v = (rho(b) at nu(p), v_fiber).
ProlongedElement make_element(const AlgebroidSpec& a, const Fibration& fib,
                              std::span<const double> p, std::span<const double> b,
                              std::span<const double> v_fiber);

/// Coefficients (z^alpha, v^A) of z against the basis {X_alpha, V_A}.
/// Throws ConstraintViolation if the element misses the fiber condition.
std::pair<std::vector<double>, std::vector<double>> decompose(const AlgebroidSpec& a,
                                                              const Fibration& fib,
                                                              const ProlongedElement& z,
                                                              double tol = 1e-9);

/// Projectable section Z(p) = (p, sigma(nu(p)), U(p)) with U projecting to
/// rho(sigma). sigma lives over base coordinates, U over total coordinates.
struct ProjectableSection {
  Section sigma;
  VectorField total_field;
};

ProjectableSection projectable_basis_x(const AlgebroidSpec& a, const Fibration& fib, int alpha);
ProjectableSection projectable_basis_v(const AlgebroidSpec& a, const Fibration& fib, int A);

/// [Z1, Z2](p) = (p, [sigma1, sigma2](nu(p)), [U1, U2](p)). Inputs are
/// checked for projectability by sampling (NotProjectable).
ProjectableSection projectable_bracket(const AlgebroidSpec& a, const Fibration& fib,
                                       const ProjectableSection& z1,
                                       const ProjectableSection& z2,
                                       const CheckOptions& opts = {});

/// Coefficients of a projectable section against {X_alpha, V_A}, as a
/// section of prolong(a, fib).
Section as_prolonged_section(const AlgebroidSpec& a, const Fibration& fib,
                             const ProjectableSection& z);

/// Fibered map P -> P': total target coordinates as Exprs over total source
/// coordinates. Must cover phi on the base block.
struct FiberedMap {
  std::vector<Expr> total_map;
};

/// Identity fibered map, and the canonical bonding map
/// (x, u) -> (epsilon(x), u, 0..) used by direct systems.
FiberedMap identity_fibered_map(const Fibration& fib);

struct ProlongedMorphism {
  BundleMorphism morphism;
  VerificationReport preconditions;
};

/// T^Phi Psi between prolong(source, fib_src) and prolong(target, fib_tgt):
/// (p, b, v) -> (Psi(p), Phi(b), T Psi(v)). Requires Psi fibered over Phi's
/// base map (NotFibered) and Phi admissible (NotAdmissible). Admissibility
/// is not defined by the construction itself; it is implemented as sampled
/// anchor compatibility rho' . Phi = T phi . rho and recorded in the report
/// as a proxy.
ProlongedMorphism prolonged_morphism(const BundleMorphism& phi, const AlgebroidSpec& source,
                                     const Fibration& fib_src, const AlgebroidSpec& target,
                                     const Fibration& fib_tgt, const FiberedMap& psi,
                                     const CheckOptions& opts = {});

}  // namespace algkit
