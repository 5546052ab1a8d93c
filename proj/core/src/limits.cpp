#include "algkit/limits.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

namespace algkit {

namespace {

std::string pair_site(size_t i) {
  return "pair (" + std::to_string(i) + "," + std::to_string(i + 1) + ") ";
}

}  // namespace

DirectSystemSpec::DirectSystemSpec(std::vector<AlgebroidSpec> levels,
                                   std::vector<std::vector<Expr>> base_steps,
                                   std::vector<std::vector<std::vector<Expr>>> fiber_steps)
    : levels_(std::move(levels)),
      base_steps_(std::move(base_steps)),
      fiber_steps_(std::move(fiber_steps)) {
  if (levels_.empty()) throw ShapeError("direct system needs at least one level");
  if (base_steps_.size() != levels_.size() - 1 || fiber_steps_.size() != levels_.size() - 1)
    throw ShapeError("direct system needs one bonding map per consecutive pair");
  for (size_t i = 0; i + 1 < levels_.size(); ++i) {
    const AlgebroidSpec& lo = levels_[i];
    const AlgebroidSpec& hi = levels_[i + 1];
    if (hi.base_dim() < lo.base_dim() || hi.rank() < lo.rank())
      throw ShapeError("level dimensions must be nondecreasing");
    if (base_steps_[i].size() != static_cast<size_t>(hi.base_dim()))
      throw ShapeError("base bonding must produce target coordinates");
    for (const Expr& e : base_steps_[i])
      if (e.max_coord() >= lo.base_dim())
        throw ShapeError("base bonding uses unknown source coordinates");
    if (fiber_steps_[i].size() != static_cast<size_t>(hi.rank()))
      throw ShapeError("fiber bonding must have target-rank rows");
    for (const auto& row : fiber_steps_[i])
      if (row.size() != static_cast<size_t>(lo.rank()))
        throw ShapeError("fiber bonding must have source-rank columns");

    // Injectivity of eps on the sample grid.
    const auto points = sample_points(lo.sample_box(), 32);
    std::vector<std::vector<double>> images;
    for (const auto& p : points) {
      std::vector<double> img;
      for (const Expr& e : base_steps_[i]) img.push_back(e.eval(p));
      images.push_back(std::move(img));
    }
    for (size_t p = 0; p < images.size(); ++p)
      for (size_t r = p + 1; r < images.size(); ++r) {
        double diff = 0.0;
        for (size_t c = 0; c < images[p].size(); ++c)
          diff = std::max(diff, std::fabs(images[p][c] - images[r][c]));
        if (diff <= 1e-9)
          throw ShapeError("base bonding " + std::to_string(i) +
                           " is not injective on the sample grid");
      }
  }
}

DirectSystemSpec DirectSystemSpec::canonical(std::vector<AlgebroidSpec> levels) {
  std::vector<std::vector<Expr>> base_steps;
  std::vector<std::vector<std::vector<Expr>>> fiber_steps;
  for (size_t i = 0; i + 1 < levels.size(); ++i) {
    const int n_lo = levels[i].base_dim();
    const int n_hi = levels[i + 1].base_dim();
    const int m_lo = levels[i].rank();
    const int m_hi = levels[i + 1].rank();
    std::vector<Expr> eps;
    for (int k = 0; k < n_hi; ++k)
      eps.push_back(k < n_lo ? Expr::coord(k) : Expr::constant(0.0));
    std::vector<std::vector<Expr>> lambda(
        static_cast<size_t>(m_hi), std::vector<Expr>(static_cast<size_t>(m_lo), Expr::constant(0.0)));
    for (int a = 0; a < m_lo; ++a)
      lambda[static_cast<size_t>(a)][static_cast<size_t>(a)] = Expr::constant(1.0);
    base_steps.push_back(std::move(eps));
    fiber_steps.push_back(std::move(lambda));
  }
  return DirectSystemSpec(std::move(levels), std::move(base_steps), std::move(fiber_steps));
}

std::vector<Expr> DirectSystemSpec::base_bonding(size_t i, size_t j) const {
  if (i > j || j >= levels_.size()) throw LevelError("bonding levels out of range");
  std::vector<Expr> acc;
  for (int k = 0; k < levels_[i].base_dim(); ++k) acc.push_back(Expr::coord(k));
  for (size_t l = i; l < j; ++l) {
    std::vector<Expr> next;
    for (const Expr& e : base_steps_[l]) next.push_back(e.substitute(acc).simplify());
    acc = std::move(next);
  }
  return acc;
}

std::vector<std::vector<Expr>> DirectSystemSpec::fiber_bonding(size_t i, size_t j) const {
  if (i > j || j >= levels_.size()) throw LevelError("bonding levels out of range");
  const int m_i = levels_[i].rank();
  std::vector<std::vector<Expr>> acc(static_cast<size_t>(m_i),
                                     std::vector<Expr>(static_cast<size_t>(m_i), Expr::constant(0.0)));
  for (int a = 0; a < m_i; ++a) acc[static_cast<size_t>(a)][static_cast<size_t>(a)] =
      Expr::constant(1.0);
  std::vector<Expr> eps_chain;
  for (int k = 0; k < levels_[i].base_dim(); ++k) eps_chain.push_back(Expr::coord(k));
  for (size_t l = i; l < j; ++l) {
    // lambda_l^{l+1} entries live over level-l coordinates: compose with the
    // accumulated eps_i^l, then multiply.
    const auto& step = fiber_steps_[l];
    const size_t rows = step.size();
    const size_t mid = acc.size();
    std::vector<std::vector<Expr>> next(rows, std::vector<Expr>(static_cast<size_t>(m_i)));
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < static_cast<size_t>(m_i); ++c) {
        std::vector<Expr> terms;
        for (size_t k = 0; k < mid; ++k)
          terms.push_back(step[r][k].substitute(eps_chain) * acc[k][c]);
        next[r][c] = simplified_sum(std::move(terms));
      }
    acc = std::move(next);
    std::vector<Expr> next_eps;
    for (const Expr& e : base_steps_[l]) next_eps.push_back(e.substitute(eps_chain).simplify());
    eps_chain = std::move(next_eps);
  }
  return acc;
}

IndPoint push(const DirectSystemSpec& sys, const IndPoint& pt, size_t to_level) {
  if (pt.level >= sys.depth() || to_level >= sys.depth() || to_level < pt.level)
    throw LevelError("push target level out of range");
  if (pt.coords.size() != static_cast<size_t>(sys.level(pt.level).base_dim()))
    throw ShapeError("ind-point coordinate count != level dimension");
  const auto eps = sys.base_bonding(pt.level, to_level);
  IndPoint out;
  out.level = to_level;
  for (const Expr& e : eps) out.coords.push_back(e.eval(pt.coords));
  return out;
}

bool ind_equal(const DirectSystemSpec& sys, const IndPoint& a, const IndPoint& b, double tol) {
  const size_t top = std::max(a.level, b.level);
  const IndPoint pa = push(sys, a, top);
  const IndPoint pb = push(sys, b, top);
  for (size_t i = 0; i < pa.coords.size(); ++i)
    if (!(std::fabs(pa.coords[i] - pb.coords[i]) <= tol)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Compatible section pairs
//
// Bracket compatibility quantifies over pairs satisfying
// lambda . s_i = s_j . eps. The bondings in scope are coordinate injections
// (detected structurally) where a random s_i extends to s_j by placing its
// components and zero-filling; otherwise a constant fiber bonding with a
// left inverse pulls a random s_j back and projects it onto the image.

namespace {

struct InjectionShape {
  std::vector<int> coord_placement;  // source coord c sits at target coord placement[c]
  std::vector<int> row_of_column;    // fiber column a maps to basis row row_of_column[a]
};

std::optional<InjectionShape> detect_injection(const DirectSystemSpec& sys, size_t i) {
  const auto& eps = sys.base_step(i);
  const auto& lambda = sys.fiber_step(i);
  const int n_lo = sys.level(i).base_dim();
  const int m_lo = sys.level(i).rank();
  InjectionShape shape;
  shape.coord_placement.assign(static_cast<size_t>(n_lo), -1);
  for (size_t t = 0; t < eps.size(); ++t) {
    const Expr e = eps[t].simplify();
    if (e.is_zero()) continue;
    if (e.kind() != Expr::Kind::Coord) return std::nullopt;
    const int c = e.coord_index();
    if (c >= n_lo || shape.coord_placement[static_cast<size_t>(c)] != -1) return std::nullopt;
    shape.coord_placement[static_cast<size_t>(c)] = static_cast<int>(t);
  }
  for (int c = 0; c < n_lo; ++c)
    if (shape.coord_placement[static_cast<size_t>(c)] == -1) return std::nullopt;

  shape.row_of_column.assign(static_cast<size_t>(m_lo), -1);
  std::vector<bool> row_used(lambda.size(), false);
  for (size_t r = 0; r < lambda.size(); ++r)
    for (size_t c = 0; c < lambda[r].size(); ++c) {
      const Expr e = lambda[r][c].simplify();
      if (e.is_zero()) continue;
      if (!e.is_constant(1.0)) return std::nullopt;
      if (shape.row_of_column[c] != -1 || row_used[r]) return std::nullopt;
      shape.row_of_column[c] = static_cast<int>(r);
      row_used[r] = true;
    }
  for (int c = 0; c < m_lo; ++c)
    if (shape.row_of_column[static_cast<size_t>(c)] == -1) return std::nullopt;
  return shape;
}

// Gaussian elimination with partial pivoting; A is square.
std::vector<double> solve_linear(std::vector<std::vector<double>> a, std::vector<double> b) {
  const size_t n = a.size();
  for (size_t col = 0; col < n; ++col) {
    size_t pivot = col;
    for (size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-14) throw ShapeError("singular normal matrix");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n, 0.0);
  for (size_t r = n; r-- > 0;) {
    double acc = b[r];
    for (size_t c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
    x[r] = acc / a[r][r];
  }
  return x;
}

// Left inverse of a constant full-column-rank matrix via normal equations.
std::optional<std::vector<std::vector<double>>> constant_left_inverse(
    const std::vector<std::vector<Expr>>& lambda) {
  const size_t rows = lambda.size();
  const size_t cols = lambda.front().size();
  std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) {
      const Expr e = lambda[r][c].simplify();
      if (e.kind() != Expr::Kind::Constant) return std::nullopt;
      m[r][c] = e.constant_value();
    }
  // Normal matrix N = m^T m (cols x cols).
  std::vector<std::vector<double>> normal(cols, std::vector<double>(cols, 0.0));
  for (size_t a = 0; a < cols; ++a)
    for (size_t b = 0; b < cols; ++b)
      for (size_t r = 0; r < rows; ++r) normal[a][b] += m[r][a] * m[r][b];
  // L = N^{-1} m^T, solved column by column.
  std::vector<std::vector<double>> left(cols, std::vector<double>(rows, 0.0));
  try {
    for (size_t r = 0; r < rows; ++r) {
      std::vector<double> rhs(cols, 0.0);
      for (size_t a = 0; a < cols; ++a) rhs[a] = m[r][a];
      const std::vector<double> col = solve_linear(normal, rhs);
      for (size_t a = 0; a < cols; ++a) left[a][r] = col[a];
    }
  } catch (const ShapeError&) {
    return std::nullopt;
  }
  return left;
}

struct CompatiblePair {
  Section low;
  Section high;
};

std::optional<std::vector<CompatiblePair>> compatible_section_pairs(const DirectSystemSpec& sys,
                                                                    size_t i, Rng& rng,
                                                                    int count) {
  const AlgebroidSpec& lo = sys.level(i);
  const AlgebroidSpec& hi = sys.level(i + 1);
  std::vector<CompatiblePair> out;

  if (const auto shape = detect_injection(sys, i)) {
    std::vector<Expr> remap;
    for (int c = 0; c < lo.base_dim(); ++c)
      remap.push_back(Expr::coord(shape->coord_placement[static_cast<size_t>(c)]));
    for (int t = 0; t < count; ++t) {
      CompatiblePair pair;
      pair.low = random_section(rng, lo);
      pair.high = Section::zero(hi.rank());
      for (int a = 0; a < lo.rank(); ++a)
        pair.high.coeffs[static_cast<size_t>(shape->row_of_column[static_cast<size_t>(a)])] =
            pair.low.coeffs[static_cast<size_t>(a)].substitute(remap);
      out.push_back(std::move(pair));
    }
    return out;
  }

  if (const auto left = constant_left_inverse(sys.fiber_step(i))) {
    const auto eps = sys.base_step(i);
    const auto& lambda = sys.fiber_step(i);
    for (int t = 0; t < count; ++t) {
      const Section sj = random_section(rng, hi);
      // s_i = L (s_j . eps); s_j projected onto the image: lambda L s_j.
      CompatiblePair pair;
      for (int a = 0; a < lo.rank(); ++a) {
        std::vector<Expr> terms;
        for (int g = 0; g < hi.rank(); ++g)
          terms.push_back(Expr::constant((*left)[static_cast<size_t>(a)][static_cast<size_t>(g)]) *
                          sj.coeffs[static_cast<size_t>(g)].substitute(eps));
        pair.low.coeffs.push_back(simplified_sum(std::move(terms)));
      }
      for (int r = 0; r < hi.rank(); ++r) {
        std::vector<Expr> terms;
        for (int g = 0; g < hi.rank(); ++g) {
          double entry = 0.0;
          for (int a = 0; a < lo.rank(); ++a) {
            const Expr le = lambda[static_cast<size_t>(r)][static_cast<size_t>(a)].simplify();
            entry += le.constant_value() * (*left)[static_cast<size_t>(a)][static_cast<size_t>(g)];
          }
          terms.push_back(Expr::constant(entry) * sj.coeffs[static_cast<size_t>(g)]);
        }
        pair.high.coeffs.push_back(simplified_sum(std::move(terms)));
      }
      out.push_back(std::move(pair));
    }
    return out;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// Verification

VerificationReport verify_direct_system(const DirectSystemSpec& sys, const CheckOptions& opts) {
  VerificationReport report;
  report.notes.push_back(
      "trivialization compatibility: structurally satisfied (fiber-linear bondings, single "
      "chart)");
  Rng rng(opts.seed);
  for (size_t i = 0; i + 1 < sys.depth(); ++i) {
    const AlgebroidSpec& lo = sys.level(i);
    const AlgebroidSpec& hi = sys.level(i + 1);
    const auto& eps = sys.base_step(i);
    const auto& lambda = sys.fiber_step(i);
    const auto points = sample_points(lo.sample_box(), opts.samples);

    // (a) rho_j . lambda = T eps . rho_i on basis sections.
    {
      std::vector<Expr> residual;
      for (int alpha = 0; alpha < lo.rank(); ++alpha)
        for (int k = 0; k < hi.base_dim(); ++k) {
          std::vector<Expr> terms;
          for (int beta = 0; beta < hi.rank(); ++beta)
            terms.push_back(hi.anchor_coef(k, beta).substitute(eps) *
                            lambda[static_cast<size_t>(beta)][static_cast<size_t>(alpha)]);
          for (int l = 0; l < lo.base_dim(); ++l)
            terms.push_back(Expr::neg(eps[static_cast<size_t>(k)].diff(l) * lo.anchor_coef(l, alpha)));
          residual.push_back(simplified_sum(std::move(terms)));
        }
      const SweepResult sweep = sweep_max_abs(residual, points);
      const int per_alpha = hi.base_dim();
      report.add("anchor_compat",
                 pair_site(i) + "basis e" +
                     std::to_string(sweep.worst_component / per_alpha + 1) + " component " +
                     std::to_string(sweep.worst_component % per_alpha),
                 sweep.max_abs, opts.tol);
    }

    // (b) lambda is an algebroid morphism.
    {
      BundleMorphism psi;
      psi.base_map = eps;
      psi.fiber_map = lambda;
      report.merge(check_morphism(psi, lo, hi, opts), pair_site(i));
    }

    // (c) + (d) bracket and Leibniz compatibility on compatible pairs.
    const auto pairs = compatible_section_pairs(sys, i, rng, 3);
    if (!pairs) {
      report.notes.push_back(pair_site(i) +
                             "bracket compatibility skipped: bonding is neither a coordinate "
                             "injection nor constant with a left inverse");
      continue;
    }
    for (size_t t = 0; t < pairs->size(); ++t) {
      const Section& s1_lo = (*pairs)[t].low;
      const Section& s1_hi = (*pairs)[t].high;
      const Section& s2_lo = (*pairs)[(t + 1) % pairs->size()].low;
      const Section& s2_hi = (*pairs)[(t + 1) % pairs->size()].high;

      const Section br_lo = bracket(lo, s1_lo, s2_lo);
      const Section br_hi = bracket(hi, s1_hi, s2_hi);
      std::vector<Expr> residual;
      for (int r = 0; r < hi.rank(); ++r) {
        std::vector<Expr> terms;
        for (int a = 0; a < lo.rank(); ++a)
          terms.push_back(lambda[static_cast<size_t>(r)][static_cast<size_t>(a)] *
                          br_lo.coeffs[static_cast<size_t>(a)]);
        terms.push_back(Expr::neg(br_hi.coeffs[static_cast<size_t>(r)].substitute(eps)));
        residual.push_back(simplified_sum(std::move(terms)));
      }
      const SweepResult sweep = sweep_max_abs(residual, points);
      report.add("bracket_compat", pair_site(i) + "sections " + std::to_string(t),
                 sweep.max_abs, opts.tol);

      // Leibniz with a projective function g_i = g_j . eps.
      const Expr g_hi = random_polynomial(rng, hi.base_dim());
      const Expr g_lo = g_hi.substitute(eps).simplify();
      Section gs2_lo, gs2_hi;
      for (const Expr& c : s2_lo.coeffs) gs2_lo.coeffs.push_back(simplified_product({g_lo, c}));
      for (const Expr& c : s2_hi.coeffs) gs2_hi.coeffs.push_back(simplified_product({g_hi, c}));
      const Section lbr_lo = bracket(lo, s1_lo, gs2_lo);
      const Section lbr_hi = bracket(hi, s1_hi, gs2_hi);
      std::vector<Expr> lresidual;
      for (int r = 0; r < hi.rank(); ++r) {
        std::vector<Expr> terms;
        for (int a = 0; a < lo.rank(); ++a)
          terms.push_back(lambda[static_cast<size_t>(r)][static_cast<size_t>(a)] *
                          lbr_lo.coeffs[static_cast<size_t>(a)]);
        terms.push_back(Expr::neg(lbr_hi.coeffs[static_cast<size_t>(r)].substitute(eps)));
        lresidual.push_back(simplified_sum(std::move(terms)));
      }
      const SweepResult lsweep = sweep_max_abs(lresidual, points);
      report.add("leibniz_compat", pair_site(i) + "sections " + std::to_string(t),
                 lsweep.max_abs, opts.tol);
    }
  }
  return report;
}

VerificationReport verify_family(const DirectSystemSpec& sys, const SectionFamily& fam,
                                 const CheckOptions& opts) {
  if (fam.per_level.size() != sys.depth())
    throw ShapeError("section family needs one entry per level");
  VerificationReport report;
  for (size_t i = 0; i + 1 < sys.depth(); ++i) {
    const AlgebroidSpec& lo = sys.level(i);
    const AlgebroidSpec& hi = sys.level(i + 1);
    if (fam.per_level[i].rank() != lo.rank() || fam.per_level[i + 1].rank() != hi.rank())
      throw ShapeError("section family entry rank mismatch");
    const auto& eps = sys.base_step(i);
    const auto& lambda = sys.fiber_step(i);
    std::vector<Expr> residual;
    for (int r = 0; r < hi.rank(); ++r) {
      std::vector<Expr> terms;
      for (int a = 0; a < lo.rank(); ++a)
        terms.push_back(lambda[static_cast<size_t>(r)][static_cast<size_t>(a)] *
                        fam.per_level[i].coeffs[static_cast<size_t>(a)]);
      terms.push_back(
          Expr::neg(fam.per_level[i + 1].coeffs[static_cast<size_t>(r)].substitute(eps)));
      residual.push_back(simplified_sum(std::move(terms)));
    }
    const SweepResult sweep = sweep_max_abs(residual, sample_points(lo.sample_box(), opts.samples));
    report.add("section_family", pair_site(i), sweep.max_abs, opts.tol);
  }
  return report;
}

VerificationReport verify_family(const DirectSystemSpec& sys, const FieldFamily& fam,
                                 const CheckOptions& opts) {
  if (fam.per_level.size() != sys.depth())
    throw ShapeError("field family needs one entry per level");
  VerificationReport report;
  for (size_t i = 0; i + 1 < sys.depth(); ++i) {
    const AlgebroidSpec& lo = sys.level(i);
    const AlgebroidSpec& hi = sys.level(i + 1);
    if (fam.per_level[i].dim() != lo.base_dim() || fam.per_level[i + 1].dim() != hi.base_dim())
      throw ShapeError("field family entry dimension mismatch");
    const auto& eps = sys.base_step(i);
    std::vector<Expr> residual;
    for (int k = 0; k < hi.base_dim(); ++k) {
      std::vector<Expr> terms;
      for (int l = 0; l < lo.base_dim(); ++l)
        terms.push_back(eps[static_cast<size_t>(k)].diff(l) *
                        fam.per_level[i].comps[static_cast<size_t>(l)]);
      terms.push_back(
          Expr::neg(fam.per_level[i + 1].comps[static_cast<size_t>(k)].substitute(eps)));
      residual.push_back(simplified_sum(std::move(terms)));
    }
    const SweepResult sweep = sweep_max_abs(residual, sample_points(lo.sample_box(), opts.samples));
    report.add("field_family", pair_site(i), sweep.max_abs, opts.tol);
  }
  return report;
}

VerificationReport verify_family(const DirectSystemSpec& sys, const FunctionTower& fam,
                                 const CheckOptions& opts) {
  if (fam.per_level.size() != sys.depth())
    throw ShapeError("function tower needs one entry per level");
  VerificationReport report;
  for (size_t i = 0; i + 1 < sys.depth(); ++i) {
    const auto& eps = sys.base_step(i);
    const Expr residual = simplified_sum(
        {fam.per_level[i], Expr::neg(fam.per_level[i + 1].substitute(eps))});
    const SweepResult sweep = sweep_max_abs(std::span<const Expr>(&residual, 1),
                                            sample_points(sys.level(i).sample_box(), opts.samples));
    report.add("function_tower", pair_site(i), sweep.max_abs, opts.tol);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Representative evaluation

namespace {

void check_independence(double residual, double tol, size_t level) {
  if (!(residual <= tol))
    throw IncompatibleFamily("representative independence violated at level " +
                             std::to_string(level) + " (residual " + std::to_string(residual) +
                             ")");
}

}  // namespace

double limit_eval(const DirectSystemSpec& sys, const FunctionTower& fam, const IndPoint& pt,
                  double tol) {
  if (fam.per_level.size() != sys.depth()) throw ShapeError("tower entry count != depth");
  const double value = fam.per_level[pt.level].eval(pt.coords);
  for (size_t k = pt.level; k + 1 < sys.depth(); ++k) {
    const IndPoint here = push(sys, pt, k);
    const IndPoint up = push(sys, pt, k + 1);
    const double v_lo = fam.per_level[k].eval(here.coords);
    const double v_hi = fam.per_level[k + 1].eval(up.coords);
    check_independence(std::fabs(v_hi - v_lo), tol, k + 1);
  }
  return value;
}

std::vector<double> limit_eval(const DirectSystemSpec& sys, const SectionFamily& fam,
                               const IndPoint& pt, double tol) {
  if (fam.per_level.size() != sys.depth()) throw ShapeError("family entry count != depth");
  std::vector<double> value;
  for (const Expr& c : fam.per_level[pt.level].coeffs) value.push_back(c.eval(pt.coords));
  for (size_t k = pt.level; k + 1 < sys.depth(); ++k) {
    const IndPoint here = push(sys, pt, k);
    const IndPoint up = push(sys, pt, k + 1);
    const auto& lambda = sys.fiber_step(k);
    double residual = 0.0;
    for (size_t r = 0; r < lambda.size(); ++r) {
      double pushed = 0.0;
      for (size_t a = 0; a < lambda[r].size(); ++a)
        pushed += lambda[r][a].eval(here.coords) *
                  fam.per_level[k].coeffs[a].eval(here.coords);
      const double above = fam.per_level[k + 1].coeffs[r].eval(up.coords);
      residual = std::max(residual, std::fabs(pushed - above));
    }
    check_independence(residual, tol, k + 1);
  }
  return value;
}

std::vector<double> limit_eval(const DirectSystemSpec& sys, const FieldFamily& fam,
                               const IndPoint& pt, double tol) {
  if (fam.per_level.size() != sys.depth()) throw ShapeError("family entry count != depth");
  std::vector<double> value;
  for (const Expr& c : fam.per_level[pt.level].comps) value.push_back(c.eval(pt.coords));
  for (size_t k = pt.level; k + 1 < sys.depth(); ++k) {
    const IndPoint here = push(sys, pt, k);
    const IndPoint up = push(sys, pt, k + 1);
    const auto& eps = sys.base_step(k);
    double residual = 0.0;
    for (size_t r = 0; r < eps.size(); ++r) {
      double pushed = 0.0;
      for (int l = 0; l < sys.level(k).base_dim(); ++l)
        pushed += eps[r].diff(l).eval(here.coords) *
                  fam.per_level[k].comps[static_cast<size_t>(l)].eval(here.coords);
      const double above = fam.per_level[k + 1].comps[r].eval(up.coords);
      residual = std::max(residual, std::fabs(pushed - above));
    }
    check_independence(residual, tol, k + 1);
  }
  return value;
}

// ---------------------------------------------------------------------------
// Prolonged systems

ProlongedSystem prolong_system(const DirectSystemSpec& sys, const std::vector<int>& fiber_dims,
                               const CheckOptions& opts) {
  if (fiber_dims.size() != sys.depth())
    throw ShapeError("prolong_system needs one fiber dimension per level");
  for (size_t i = 0; i + 1 < fiber_dims.size(); ++i)
    if (fiber_dims[i + 1] < fiber_dims[i])
      throw ShapeError("prolonged fiber dimensions must be nondecreasing");

  std::vector<AlgebroidSpec> levels;
  std::vector<Fibration> fibrations;
  for (size_t i = 0; i < sys.depth(); ++i) {
    fibrations.emplace_back(sys.level(i).base_dim(), fiber_dims[i]);
    levels.push_back(prolong(sys.level(i), fibrations.back()));
  }

  std::vector<std::vector<Expr>> base_steps;
  std::vector<std::vector<std::vector<Expr>>> fiber_steps;
  for (size_t i = 0; i + 1 < sys.depth(); ++i) {
    const AlgebroidSpec& lo = sys.level(i);
    const AlgebroidSpec& hi = sys.level(i + 1);
    // theta = eps x canonical fiber injection.
    FiberedMap theta;
    for (const Expr& e : sys.base_step(i)) theta.total_map.push_back(e);
    for (int B = 0; B < fiber_dims[i + 1]; ++B)
      theta.total_map.push_back(B < fiber_dims[i] ? Expr::coord(lo.base_dim() + B)
                                                  : Expr::constant(0.0));
    BundleMorphism lambda;
    lambda.base_map = sys.base_step(i);
    lambda.fiber_map = sys.fiber_step(i);
    ProlongedMorphism bonding =
        prolonged_morphism(lambda, lo, fibrations[i], hi, fibrations[i + 1], theta, opts);
    base_steps.push_back(bonding.morphism.base_map);
    fiber_steps.push_back(bonding.morphism.fiber_map);
  }

  DirectSystemSpec prolonged(std::move(levels), std::move(base_steps), std::move(fiber_steps));
  VerificationReport verification = verify_direct_system(prolonged, opts);
  return {std::move(prolonged), std::move(verification)};
}

}  // namespace algkit
