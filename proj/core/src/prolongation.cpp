#include "algkit/prolongation.hpp"

#include <cmath>
#include <string>

namespace algkit {

namespace {

void require_shared_base(const AlgebroidSpec& a, const Fibration& fib) {
  if (a.base_dim() != fib.base_dim)
    throw DimensionError("fibration base dimension != algebroid base dimension");
}

}  // namespace

AlgebroidSpec prolong(const AlgebroidSpec& a, const Fibration& fib) {
  require_shared_base(a, fib);
  const int n = a.base_dim();
  const int q = fib.fiber_dim;
  const int m = a.rank();

  // Anchor block matrix over total coordinates; base-coordinate Exprs lift
  // unchanged because total coordinates start with the base ones.
  std::vector<std::vector<Expr>> anchor(
      static_cast<size_t>(n + q),
      std::vector<Expr>(static_cast<size_t>(m + q), Expr::constant(0.0)));
  for (int i = 0; i < n; ++i)
    for (int alpha = 0; alpha < m; ++alpha)
      anchor[static_cast<size_t>(i)][static_cast<size_t>(alpha)] = a.anchor_coef(i, alpha);
  for (int A = 0; A < q; ++A)
    anchor[static_cast<size_t>(n + A)][static_cast<size_t>(m + A)] = Expr::constant(1.0);

  std::vector<AlgebroidSpec::StructureEntry> structure;
  for (const auto& e : a.structure_entries()) structure.push_back(e);

  return AlgebroidSpec(n + q, m + q, std::move(anchor), structure,
                       a.sample_box().extended(fib.fiber_box));
}

ProlongedElement make_element(const AlgebroidSpec& a, const Fibration& fib,
                              std::span<const double> p, std::span<const double> b,
                              std::span<const double> v_fiber) {
  require_shared_base(a, fib);
  if (static_cast<int>(p.size()) != fib.total_dim())
    throw DimensionError("point must have base_dim + fiber_dim coordinates");
  if (static_cast<int>(b.size()) != a.rank()) throw RankMismatch("fiber vector length != rank");
  if (static_cast<int>(v_fiber.size()) != fib.fiber_dim)
    throw DimensionError("vertical part length != fiber_dim");

  ProlongedElement z;
  z.point.assign(p.begin(), p.end());
  z.b.assign(b.begin(), b.end());
  const std::span<const double> base_point = p.first(static_cast<size_t>(a.base_dim()));
  for (int i = 0; i < a.base_dim(); ++i) {
    double acc = 0.0;
    for (int alpha = 0; alpha < a.rank(); ++alpha)
      acc += a.anchor_coef(i, alpha).eval(base_point) * b[static_cast<size_t>(alpha)];
    z.v.push_back(acc);
  }
  z.v.insert(z.v.end(), v_fiber.begin(), v_fiber.end());
  return z;
}

std::pair<std::vector<double>, std::vector<double>> decompose(const AlgebroidSpec& a,
                                                              const Fibration& fib,
                                                              const ProlongedElement& z,
                                                              double tol) {
  require_shared_base(a, fib);
  if (static_cast<int>(z.point.size()) != fib.total_dim() ||
      static_cast<int>(z.b.size()) != a.rank() ||
      static_cast<int>(z.v.size()) != fib.total_dim())
    throw ShapeError("prolonged element has inconsistent shapes");

  const std::span<const double> base_point =
      std::span<const double>(z.point).first(static_cast<size_t>(a.base_dim()));
  for (int i = 0; i < a.base_dim(); ++i) {
    double acc = 0.0;
    for (int alpha = 0; alpha < a.rank(); ++alpha)
      acc += a.anchor_coef(i, alpha).eval(base_point) * z.b[static_cast<size_t>(alpha)];
    const double residual = std::fabs(acc - z.v[static_cast<size_t>(i)]);
    if (!(residual < tol))
      throw ConstraintViolation("element violates rho(b) = T nu(v) at component " +
                                std::to_string(i) + " (residual " + std::to_string(residual) +
                                ")");
  }
  std::vector<double> v_fiber(z.v.begin() + a.base_dim(), z.v.end());
  return {z.b, std::move(v_fiber)};
}

ProjectableSection projectable_basis_x(const AlgebroidSpec& a, const Fibration& fib, int alpha) {
  require_shared_base(a, fib);
  ProjectableSection z;
  z.sigma = Section::basis(a.rank(), alpha);
  z.total_field = VectorField::zero(fib.total_dim());
  for (int i = 0; i < a.base_dim(); ++i)
    z.total_field.comps[static_cast<size_t>(i)] = a.anchor_coef(i, alpha);
  return z;
}

ProjectableSection projectable_basis_v(const AlgebroidSpec& a, const Fibration& fib, int A) {
  require_shared_base(a, fib);
  ProjectableSection z;
  z.sigma = Section::zero(a.rank());
  z.total_field = VectorField::zero(fib.total_dim());
  z.total_field.comps[static_cast<size_t>(a.base_dim() + A)] = Expr::constant(1.0);
  return z;
}

namespace {

// Residual of "U projects to rho(sigma)": the first base_dim components of
// the total field minus the (u-independent) anchor image.
double projectability_residual(const AlgebroidSpec& a, const Fibration& fib,
                               const ProjectableSection& z, const CheckOptions& opts) {
  const VectorField image = anchor_apply(a, z.sigma);
  std::vector<Expr> residual;
  for (int i = 0; i < a.base_dim(); ++i)
    residual.push_back(simplified_sum({z.total_field.comps[static_cast<size_t>(i)],
                                       Expr::neg(image.comps[static_cast<size_t>(i)])}));
  const auto points = sample_points(a.sample_box().extended(fib.fiber_box), opts.samples);
  return sweep_max_abs(residual, points).max_abs;
}

}  // namespace

ProjectableSection projectable_bracket(const AlgebroidSpec& a, const Fibration& fib,
                                       const ProjectableSection& z1,
                                       const ProjectableSection& z2, const CheckOptions& opts) {
  require_shared_base(a, fib);
  for (const ProjectableSection* z : {&z1, &z2}) {
    if (z->sigma.rank() != a.rank() || z->total_field.dim() != fib.total_dim())
      throw ShapeError("projectable section has inconsistent shapes");
    const double residual = projectability_residual(a, fib, *z, opts);
    if (!(residual < opts.tol))
      throw NotProjectable("total field does not project onto rho(sigma) (residual " +
                           std::to_string(residual) + ")");
  }
  ProjectableSection out;
  out.sigma = bracket(a, z1.sigma, z2.sigma);
  out.total_field = vf_bracket(z1.total_field, z2.total_field);
  return out;
}

Section as_prolonged_section(const AlgebroidSpec& a, const Fibration& fib,
                             const ProjectableSection& z) {
  Section s;
  s.coeffs = z.sigma.coeffs;  // base-coordinate Exprs lift unchanged
  for (int A = 0; A < fib.fiber_dim; ++A)
    s.coeffs.push_back(z.total_field.comps[static_cast<size_t>(a.base_dim() + A)]);
  return s;
}

FiberedMap identity_fibered_map(const Fibration& fib) {
  FiberedMap psi;
  for (int i = 0; i < fib.total_dim(); ++i) psi.total_map.push_back(Expr::coord(i));
  return psi;
}

ProlongedMorphism prolonged_morphism(const BundleMorphism& phi, const AlgebroidSpec& source,
                                     const Fibration& fib_src, const AlgebroidSpec& target,
                                     const Fibration& fib_tgt, const FiberedMap& psi,
                                     const CheckOptions& opts) {
  require_shared_base(source, fib_src);
  require_shared_base(target, fib_tgt);
  if (phi.source_rank() != source.rank() || phi.target_rank() != target.rank() ||
      phi.target_dim() != target.base_dim())
    throw ShapeError("prolonged_morphism: Phi shapes do not match the algebroids");
  if (static_cast<int>(psi.total_map.size()) != fib_tgt.total_dim())
    throw ShapeError("prolonged_morphism: Psi must produce target total coordinates");

  VerificationReport preconditions;
  preconditions.notes.push_back("admissibility: proxy (sampled anchor compatibility)");
  const Box total_box = source.sample_box().extended(fib_src.fiber_box);
  const auto total_points = sample_points(total_box, opts.samples);
  const auto base_points = sample_points(source.sample_box(), opts.samples);

  // Psi fibered over phi: base block of Psi equals phi and is u-independent.
  {
    std::vector<Expr> residual;
    for (int i = 0; i < target.base_dim(); ++i)
      residual.push_back(simplified_sum(
          {psi.total_map[static_cast<size_t>(i)], Expr::neg(phi.base_map[static_cast<size_t>(i)])}));
    const SweepResult sweep = sweep_max_abs(residual, total_points);
    preconditions.add("fibered_over_phi", "base component " + std::to_string(sweep.worst_component),
                      sweep.max_abs, opts.tol);
    if (!(sweep.max_abs < opts.tol))
      throw NotFibered("Psi does not cover phi (residual " + std::to_string(sweep.max_abs) + ")");
  }

  // Admissibility proxy: rho' . Phi = T phi . rho, sampled over the source base.
  {
    std::vector<Expr> residual;
    for (int alpha = 0; alpha < source.rank(); ++alpha)
      for (int ip = 0; ip < target.base_dim(); ++ip) {
        std::vector<Expr> terms;
        for (int beta = 0; beta < target.rank(); ++beta)
          terms.push_back(target.anchor_coef(ip, beta).substitute(phi.base_map) *
                          phi.fiber_map[static_cast<size_t>(beta)][static_cast<size_t>(alpha)]);
        for (int k = 0; k < source.base_dim(); ++k)
          terms.push_back(
              Expr::neg(phi.base_map[static_cast<size_t>(ip)].diff(k) * source.anchor_coef(k, alpha)));
        residual.push_back(simplified_sum(std::move(terms)));
      }
    const SweepResult sweep = sweep_max_abs(residual, base_points);
    preconditions.add("anchor_compatibility", "", sweep.max_abs, opts.tol);
    if (!(sweep.max_abs < opts.tol))
      throw NotAdmissible("Phi is not anchor-compatible (residual " +
                          std::to_string(sweep.max_abs) + ")");
  }

  // Fiber map in the {X_alpha, V_A} bases:
  //   X-block: Phi lifted; V-column of X_alpha: rho-weighted x-derivatives
  //   of Psi's fiber part; V-block: u-derivatives of Psi's fiber part.
  const int m = source.rank();
  const int mp = target.rank();
  const int q = fib_src.fiber_dim;
  const int qp = fib_tgt.fiber_dim;
  BundleMorphism out;
  out.base_map = psi.total_map;
  out.fiber_map.assign(static_cast<size_t>(mp + qp),
                       std::vector<Expr>(static_cast<size_t>(m + q), Expr::constant(0.0)));
  for (int bp = 0; bp < mp; ++bp)
    for (int alpha = 0; alpha < m; ++alpha)
      out.fiber_map[static_cast<size_t>(bp)][static_cast<size_t>(alpha)] =
          phi.fiber_map[static_cast<size_t>(bp)][static_cast<size_t>(alpha)];
  for (int B = 0; B < qp; ++B) {
    const Expr& psi_fiber = psi.total_map[static_cast<size_t>(target.base_dim() + B)];
    for (int alpha = 0; alpha < m; ++alpha) {
      std::vector<Expr> terms;
      for (int k = 0; k < source.base_dim(); ++k)
        terms.push_back(source.anchor_coef(k, alpha) * psi_fiber.diff(k));
      out.fiber_map[static_cast<size_t>(mp + B)][static_cast<size_t>(alpha)] =
          simplified_sum(std::move(terms));
    }
    for (int A = 0; A < q; ++A)
      out.fiber_map[static_cast<size_t>(mp + B)][static_cast<size_t>(m + A)] =
          psi_fiber.diff(source.base_dim() + A).simplify();
  }
  return {std::move(out), std::move(preconditions)};
}

}  // namespace algkit
