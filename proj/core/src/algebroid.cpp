#include "algkit/algebroid.hpp"

#include <algorithm>
#include <string>

namespace algkit {

Section Section::zero(int rank) {
  Section s;
  s.coeffs.assign(static_cast<size_t>(rank), Expr::constant(0.0));
  return s;
}

Section Section::basis(int rank, int alpha) {
  Section s = zero(rank);
  s.coeffs[static_cast<size_t>(alpha)] = Expr::constant(1.0);
  return s;
}

VectorField VectorField::zero(int dim) {
  VectorField v;
  v.comps.assign(static_cast<size_t>(dim), Expr::constant(0.0));
  return v;
}

VectorField vf_bracket(const VectorField& x, const VectorField& y) {
  if (x.dim() != y.dim()) throw ShapeError("vector field dimensions differ");
  const int n = x.dim();
  VectorField out;
  out.comps.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (int j = 0; j < n; ++j) {
      terms.push_back(x.comps[j] * y.comps[i].diff(j));
      terms.push_back(Expr::neg(y.comps[j] * x.comps[i].diff(j)));
    }
    out.comps.push_back(simplified_sum(std::move(terms)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// AlgebroidSpec

AlgebroidSpec::AlgebroidSpec(int base_dim, int rank, std::vector<std::vector<Expr>> anchor,
                             const std::vector<StructureEntry>& structure, Box sample_box)
    : base_dim_(base_dim), rank_(rank), anchor_(std::move(anchor)), box_(std::move(sample_box)) {
  if (base_dim_ < 1 || rank_ < 1)
    throw ShapeError("algebroid needs base_dim >= 1 and rank >= 1");
  if (anchor_.size() != static_cast<size_t>(base_dim_))
    throw ShapeError("anchor must have base_dim rows");
  for (const auto& row : anchor_)
    if (row.size() != static_cast<size_t>(rank_)) throw ShapeError("anchor row has wrong width");
  if (box_.dim() != base_dim_) throw ShapeError("sample box dimension != base_dim");

  const size_t pairs = static_cast<size_t>(rank_) * (rank_ - 1) / 2;
  structure_.assign(pairs, std::vector<Expr>(static_cast<size_t>(rank_), Expr::constant(0.0)));
  for (const StructureEntry& e : structure) {
    if (e.gamma < 0 || e.gamma >= rank_ || e.alpha < 0 || e.alpha >= rank_ || e.beta < 0 ||
        e.beta >= rank_ || e.alpha == e.beta)
      throw ShapeError("structure entry indices out of range");
    // Store on alpha < beta; a (beta, alpha) entry lands negated.
    const bool flip = e.alpha > e.beta;
    const int a = flip ? e.beta : e.alpha;
    const int b = flip ? e.alpha : e.beta;
    Expr value = flip ? Expr::neg(e.value) : e.value;
    auto& slot = structure_[pair_index(a, b)][static_cast<size_t>(e.gamma)];
    slot = simplified_sum({slot, std::move(value)});
  }
}

size_t AlgebroidSpec::pair_index(int alpha, int beta) const {
  // Row-major over alpha < beta.
  return static_cast<size_t>(alpha) * rank_ - static_cast<size_t>(alpha) * (alpha + 1) / 2 +
         static_cast<size_t>(beta - alpha - 1);
}

const Expr& AlgebroidSpec::anchor_coef(int i, int alpha) const {
  return anchor_[static_cast<size_t>(i)][static_cast<size_t>(alpha)];
}

Expr AlgebroidSpec::structure_coef(int alpha, int beta, int gamma) const {
  if (alpha == beta) return Expr::constant(0.0);
  if (alpha < beta) return structure_[pair_index(alpha, beta)][static_cast<size_t>(gamma)];
  return Expr::neg(structure_[pair_index(beta, alpha)][static_cast<size_t>(gamma)]).simplify();
}

std::vector<AlgebroidSpec::StructureEntry> AlgebroidSpec::structure_entries() const {
  std::vector<StructureEntry> out;
  for (int a = 0; a < rank_; ++a)
    for (int b = a + 1; b < rank_; ++b)
      for (int g = 0; g < rank_; ++g) {
        const Expr& v = structure_[pair_index(a, b)][static_cast<size_t>(g)];
        if (!v.is_zero()) out.push_back({a, b, g, v});
      }
  return out;
}

// ---------------------------------------------------------------------------
// Operations

namespace {

void require_rank(const AlgebroidSpec& a, const Section& s, const char* what) {
  if (s.rank() != a.rank())
    throw RankMismatch(std::string(what) + ": section rank " + std::to_string(s.rank()) +
                       " != algebroid rank " + std::to_string(a.rank()));
}

std::string point_site(const std::vector<double>& p) {
  std::string out = "(";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(p[i]);
  }
  out += ")";
  return out;
}

}  // namespace

VectorField anchor_apply(const AlgebroidSpec& a, const Section& s) {
  require_rank(a, s, "anchor_apply");
  VectorField v;
  v.comps.reserve(static_cast<size_t>(a.base_dim()));
  for (int i = 0; i < a.base_dim(); ++i) {
    std::vector<Expr> terms;
    for (int alpha = 0; alpha < a.rank(); ++alpha)
      terms.push_back(a.anchor_coef(i, alpha) * s.coeffs[static_cast<size_t>(alpha)]);
    v.comps.push_back(simplified_sum(std::move(terms)));
  }
  return v;
}

Expr anchor_action(const AlgebroidSpec& a, const Section& s, const Expr& f) {
  require_rank(a, s, "anchor_action");
  std::vector<Expr> terms;
  for (int i = 0; i < a.base_dim(); ++i) {
    for (int alpha = 0; alpha < a.rank(); ++alpha)
      terms.push_back(a.anchor_coef(i, alpha) * s.coeffs[static_cast<size_t>(alpha)] * f.diff(i));
  }
  return simplified_sum(std::move(terms));
}

Section bracket(const AlgebroidSpec& a, const Section& s1, const Section& s2) {
  require_rank(a, s1, "bracket");
  require_rank(a, s2, "bracket");
  const int m = a.rank();
  Section out;
  out.coeffs.reserve(static_cast<size_t>(m));
  for (int gamma = 0; gamma < m; ++gamma) {
    std::vector<Expr> terms;
    for (int alpha = 0; alpha < m; ++alpha)
      for (int beta = 0; beta < m; ++beta) {
        if (alpha == beta) continue;
        terms.push_back(s1.coeffs[static_cast<size_t>(alpha)] *
                        s2.coeffs[static_cast<size_t>(beta)] *
                        a.structure_coef(alpha, beta, gamma));
      }
    terms.push_back(anchor_action(a, s1, s2.coeffs[static_cast<size_t>(gamma)]));
    terms.push_back(Expr::neg(anchor_action(a, s2, s1.coeffs[static_cast<size_t>(gamma)])));
    out.coeffs.push_back(simplified_sum(std::move(terms)));
  }
  return out;
}

Section jacobiator(const AlgebroidSpec& a, const Section& s1, const Section& s2,
                   const Section& s3) {
  const Section t1 = bracket(a, s1, bracket(a, s2, s3));
  const Section t2 = bracket(a, s2, bracket(a, s3, s1));
  const Section t3 = bracket(a, s3, bracket(a, s1, s2));
  Section out;
  out.coeffs.reserve(static_cast<size_t>(a.rank()));
  for (int g = 0; g < a.rank(); ++g)
    out.coeffs.push_back(simplified_sum({t1.coeffs[static_cast<size_t>(g)],
                                         t2.coeffs[static_cast<size_t>(g)],
                                         t3.coeffs[static_cast<size_t>(g)]}));
  return out;
}

VerificationReport check_leibniz(const AlgebroidSpec& a, const Section& s1, const Expr& f,
                                 const Section& s2, const CheckOptions& opts) {
  require_rank(a, s1, "check_leibniz");
  require_rank(a, s2, "check_leibniz");
  Section fs2;
  for (const Expr& c : s2.coeffs) fs2.coeffs.push_back(simplified_product({f, c}));

  const Section lhs = bracket(a, s1, fs2);
  const Section br = bracket(a, s1, s2);
  const Expr action = anchor_action(a, s1, f);
  std::vector<Expr> residual;
  for (int g = 0; g < a.rank(); ++g) {
    const size_t gi = static_cast<size_t>(g);
    residual.push_back(simplified_sum({lhs.coeffs[gi], Expr::neg(f * br.coeffs[gi]),
                                       Expr::neg(action * s2.coeffs[gi])}));
  }
  const auto points = sample_points(a.sample_box(), opts.samples);
  const SweepResult sweep = sweep_max_abs(residual, points);
  VerificationReport report;
  report.add("leibniz", "component " + std::to_string(sweep.worst_component) + " @ " +
                            point_site(points[sweep.worst_point]),
             sweep.max_abs, opts.tol);
  return report;
}

VerificationReport check_jacobi(const AlgebroidSpec& a,
                                std::span<const std::array<Section, 3>> triples,
                                const CheckOptions& opts) {
  VerificationReport report;
  const auto points = sample_points(a.sample_box(), opts.samples);
  for (size_t t = 0; t < triples.size(); ++t) {
    const Section j = jacobiator(a, triples[t][0], triples[t][1], triples[t][2]);
    const SweepResult sweep = sweep_max_abs(j.coeffs, points);
    report.add("jacobi", "triple " + std::to_string(t), sweep.max_abs, opts.tol);
  }
  return report;
}

VerificationReport check_jacobi(const AlgebroidSpec& a, const CheckOptions& opts) {
  std::vector<std::array<Section, 3>> triples;
  const int m = a.rank();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      for (int k = j + 1; k < m; ++k)
        triples.push_back({Section::basis(m, i), Section::basis(m, j), Section::basis(m, k)});
  // Function-coefficient triples catch anchor-side defects that constant
  // triples cannot (for rank < 3 the basis set is empty).
  Rng rng(opts.seed);
  for (int t = 0; t < 4; ++t)
    triples.push_back({random_section(rng, a), random_section(rng, a), random_section(rng, a)});

  VerificationReport report;
  const auto points = sample_points(a.sample_box(), opts.samples);
  const size_t basis_count = triples.size() - 4;
  for (size_t t = 0; t < triples.size(); ++t) {
    const Section j = jacobiator(a, triples[t][0], triples[t][1], triples[t][2]);
    const SweepResult sweep = sweep_max_abs(j.coeffs, points);
    std::string site;
    if (t < basis_count) {
      size_t idx = t;
      int bi = 0, bj = 0, bk = 0, pos = 0;
      bool found = false;
      for (int i = 0; i < m && !found; ++i)
        for (int j2 = i + 1; j2 < m && !found; ++j2)
          for (int k = j2 + 1; k < m && !found; ++k)
            if (static_cast<size_t>(pos++) == idx) {
              bi = i;
              bj = j2;
              bk = k;
              found = true;
            }
      site = "basis triple (e" + std::to_string(bi + 1) + ", e" + std::to_string(bj + 1) +
             ", e" + std::to_string(bk + 1) + ")";
    } else {
      site = "random triple " + std::to_string(t - basis_count);
    }
    report.add("jacobi", site, sweep.max_abs, opts.tol);
  }
  return report;
}

VerificationReport check_anchor_bracket_compat(const AlgebroidSpec& a, const Section& s1,
                                               const Section& s2, const CheckOptions& opts) {
  const VectorField lhs = anchor_apply(a, bracket(a, s1, s2));
  const VectorField rhs = vf_bracket(anchor_apply(a, s1), anchor_apply(a, s2));
  std::vector<Expr> residual;
  for (int i = 0; i < a.base_dim(); ++i)
    residual.push_back(
        simplified_sum({lhs.comps[static_cast<size_t>(i)],
                        Expr::neg(rhs.comps[static_cast<size_t>(i)])}));
  const auto points = sample_points(a.sample_box(), opts.samples);
  const SweepResult sweep = sweep_max_abs(residual, points);
  VerificationReport report;
  report.add("anchor_bracket_compat",
             "component " + std::to_string(sweep.worst_component) + " @ " +
                 point_site(points[sweep.worst_point]),
             sweep.max_abs, opts.tol);
  return report;
}

VerificationReport check_anchor_bracket_compat(const AlgebroidSpec& a,
                                               const CheckOptions& opts) {
  VerificationReport report;
  const int m = a.rank();
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      VerificationReport one =
          check_anchor_bracket_compat(a, Section::basis(m, i), Section::basis(m, j), opts);
      report.merge(std::move(one),
                   "pair (e" + std::to_string(i + 1) + ", e" + std::to_string(j + 1) + ") ");
    }
  Rng rng(opts.seed);
  for (int t = 0; t < 3; ++t) {
    VerificationReport one =
        check_anchor_bracket_compat(a, random_section(rng, a), random_section(rng, a), opts);
    report.merge(std::move(one), "random pair " + std::to_string(t) + " ");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Constructors

AlgebroidSpec tangent_algebroid(int n, std::optional<Box> box) {
  std::vector<std::vector<Expr>> anchor(
      static_cast<size_t>(n), std::vector<Expr>(static_cast<size_t>(n), Expr::constant(0.0)));
  for (int i = 0; i < n; ++i) anchor[static_cast<size_t>(i)][static_cast<size_t>(i)] =
      Expr::constant(1.0);
  return AlgebroidSpec(n, n, std::move(anchor), {}, box.value_or(Box::cube(n)));
}

NijenhuisAlgebroid nijenhuis_algebroid(const std::vector<std::vector<Expr>>& n_tensor,
                                       std::optional<Box> box, const CheckOptions& opts) {
  const int n = static_cast<int>(n_tensor.size());
  if (n < 1) throw ShapeError("Nijenhuis tensor must be nonempty and square");
  for (const auto& row : n_tensor)
    if (row.size() != static_cast<size_t>(n)) throw ShapeError("Nijenhuis tensor must be square");

  // Structure functions on coordinate fields: C_{ab}^g = d_a N^g_b - d_b N^g_a.
  std::vector<AlgebroidSpec::StructureEntry> structure;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int g = 0; g < n; ++g) {
        Expr c = simplified_sum({n_tensor[static_cast<size_t>(g)][static_cast<size_t>(b)].diff(a),
                                 Expr::neg(n_tensor[static_cast<size_t>(g)][static_cast<size_t>(a)]
                                               .diff(b))});
        if (!c.is_zero()) structure.push_back({a, b, g, std::move(c)});
      }

  AlgebroidSpec spec(n, n, n_tensor, structure, box.value_or(Box::cube(n)));

  // Torsion on coordinate-field pairs:
  // T(X,Y) = [NX, NY] - N([NX, Y] + [X, NY] - N([X, Y])).
  VerificationReport report;
  const auto points = sample_points(spec.sample_box(), opts.samples);
  auto column = [&](int j) {
    VectorField v;
    for (int i = 0; i < n; ++i)
      v.comps.push_back(n_tensor[static_cast<size_t>(i)][static_cast<size_t>(j)]);
    return v;
  };
  auto apply_n = [&](const VectorField& v) {
    VectorField out;
    for (int i = 0; i < n; ++i) {
      std::vector<Expr> terms;
      for (int j = 0; j < n; ++j)
        terms.push_back(n_tensor[static_cast<size_t>(i)][static_cast<size_t>(j)] *
                        v.comps[static_cast<size_t>(j)]);
      out.comps.push_back(simplified_sum(std::move(terms)));
    }
    return out;
  };
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      VectorField ea = VectorField::zero(n), eb = VectorField::zero(n);
      ea.comps[static_cast<size_t>(a)] = Expr::constant(1.0);
      eb.comps[static_cast<size_t>(b)] = Expr::constant(1.0);
      const VectorField na = column(a), nb = column(b);
      const VectorField lhs = vf_bracket(na, nb);
      // deformed = [NX, Y] + [X, NY] - N([X, Y]); [ea, eb] = 0 for
      // coordinate fields.
      const VectorField d1 = vf_bracket(na, eb);
      const VectorField d2 = vf_bracket(ea, nb);
      VectorField deformed;
      for (int i = 0; i < n; ++i)
        deformed.comps.push_back(simplified_sum(
            {d1.comps[static_cast<size_t>(i)], d2.comps[static_cast<size_t>(i)]}));
      const VectorField rhs = apply_n(deformed);
      std::vector<Expr> residual;
      for (int i = 0; i < n; ++i)
        residual.push_back(simplified_sum({lhs.comps[static_cast<size_t>(i)],
                                           Expr::neg(rhs.comps[static_cast<size_t>(i)])}));
      const SweepResult sweep = sweep_max_abs(residual, points);
      report.add("nijenhuis_torsion",
                 "pair (d/dx" + std::to_string(a + 1) + ", d/dx" + std::to_string(b + 1) + ")",
                 sweep.max_abs, opts.tol);
    }
  return {std::move(spec), std::move(report)};
}

PoissonCotangentAlgebroid poisson_cotangent_algebroid(
    const std::vector<std::vector<Expr>>& lambda, std::optional<Box> box,
    const CheckOptions& opts) {
  const int n = static_cast<int>(lambda.size());
  if (n < 1) throw ShapeError("bivector must be nonempty and square");
  for (const auto& row : lambda)
    if (row.size() != static_cast<size_t>(n)) throw ShapeError("bivector must be square");
  // Antisymmetry as Expr.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Expr sum = simplified_sum(
          {lambda[static_cast<size_t>(a)][static_cast<size_t>(b)],
           lambda[static_cast<size_t>(b)][static_cast<size_t>(a)]});
      if (!sum.is_zero()) throw ShapeError("bivector is not antisymmetric");
    }

  // Anchor rho_a^i = Lambda^{ai}: the orientation under which
  // rho([dx^a, dx^b]) = [rho dx^a, rho dx^b] holds with
  // C_{ab}^g = d Lambda^{ab} / dx^g.
  std::vector<std::vector<Expr>> anchor(static_cast<size_t>(n),
                                        std::vector<Expr>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < n; ++a)
      anchor[static_cast<size_t>(i)][static_cast<size_t>(a)] =
          lambda[static_cast<size_t>(a)][static_cast<size_t>(i)];

  std::vector<AlgebroidSpec::StructureEntry> structure;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int g = 0; g < n; ++g) {
        Expr c = lambda[static_cast<size_t>(a)][static_cast<size_t>(b)].diff(g).simplify();
        if (!c.is_zero()) structure.push_back({a, b, g, std::move(c)});
      }

  AlgebroidSpec spec(n, n, std::move(anchor), structure, box.value_or(Box::cube(n)));
  VerificationReport jacobi = check_jacobi(spec, opts);
  return {std::move(spec), std::move(jacobi)};
}

Section random_section(Rng& rng, const AlgebroidSpec& a) {
  Section s;
  for (int alpha = 0; alpha < a.rank(); ++alpha)
    s.coeffs.push_back(random_polynomial(rng, a.base_dim()));
  return s;
}

}  // namespace algkit
