#include "algkit/calculus.hpp"

#include <algorithm>
#include <string>

namespace algkit {

std::vector<std::vector<int>> increasing_tuples(int m, int q) {
  std::vector<std::vector<int>> out;
  if (q < 0) return out;
  if (q == 0) {
    out.push_back({});
    return out;
  }
  if (q > m) return out;
  std::vector<int> tuple(static_cast<size_t>(q));
  for (int i = 0; i < q; ++i) tuple[static_cast<size_t>(i)] = i;
  while (true) {
    out.push_back(tuple);
    int i = q - 1;
    while (i >= 0 && tuple[static_cast<size_t>(i)] == m - q + i) --i;
    if (i < 0) break;
    ++tuple[static_cast<size_t>(i)];
    for (int j = i + 1; j < q; ++j)
      tuple[static_cast<size_t>(j)] = tuple[static_cast<size_t>(j - 1)] + 1;
  }
  return out;
}

namespace {

size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  size_t r = 1;
  for (int i = 0; i < k; ++i) r = r * static_cast<size_t>(n - i) / static_cast<size_t>(i + 1);
  return r;
}

// Lexicographic rank of a strictly increasing tuple among all C(m, q).
size_t tuple_rank(int m, std::span<const int> tuple) {
  const int q = static_cast<int>(tuple.size());
  size_t rank = 0;
  int prev = -1;
  for (int i = 0; i < q; ++i) {
    for (int v = prev + 1; v < tuple[static_cast<size_t>(i)]; ++v)
      rank += binomial(m - 1 - v, q - 1 - i);
    prev = tuple[static_cast<size_t>(i)];
  }
  return rank;
}

// Sorts into increasing order; returns the permutation sign, 0 on repeats.
int sort_tuple(std::vector<int>& tuple) {
  int sign = 1;
  for (size_t i = 1; i < tuple.size(); ++i) {
    size_t j = i;
    while (j > 0 && tuple[j - 1] > tuple[j]) {
      std::swap(tuple[j - 1], tuple[j]);
      sign = -sign;
      --j;
    }
  }
  for (size_t i = 1; i < tuple.size(); ++i)
    if (tuple[i - 1] == tuple[i]) return 0;
  return sign;
}

// Signed permutation products of a small square Expr matrix; flat terms so
// that sums of determinants cancel term by term under simplify.
void det_terms(const std::vector<std::vector<Expr>>& m, std::vector<int>& perm,
               std::vector<bool>& used, int sign, std::vector<Expr>& out) {
  const size_t n = m.size();
  if (perm.size() == n) {
    std::vector<Expr> factors;
    for (size_t r = 0; r < n; ++r) factors.push_back(m[r][static_cast<size_t>(perm[r])]);
    Expr product = Expr::mul(std::move(factors));
    out.push_back(sign > 0 ? product : Expr::neg(product));
    return;
  }
  for (size_t c = 0; c < n; ++c) {
    if (used[c]) continue;
    int swaps = 0;
    for (int p : perm)
      if (p > static_cast<int>(c)) ++swaps;
    used[c] = true;
    perm.push_back(static_cast<int>(c));
    det_terms(m, perm, used, swaps % 2 == 0 ? sign : -sign, out);
    perm.pop_back();
    used[c] = false;
  }
}

std::vector<Expr> det_terms(const std::vector<std::vector<Expr>>& m) {
  std::vector<Expr> out;
  if (m.empty()) {
    out.push_back(Expr::constant(1.0));
    return out;
  }
  std::vector<int> perm;
  std::vector<bool> used(m.size(), false);
  det_terms(m, perm, used, 1, out);
  return out;
}

Expr expr_det(const std::vector<std::vector<Expr>>& m) { return Expr::add(det_terms(m)); }

}  // namespace

QForm::QForm(int rank, int degree, std::vector<Expr> components)
    : rank_(rank), degree_(degree), comps_(std::move(components)) {
  if (rank_ < 1) throw ShapeError("QForm rank must be >= 1");
  if (degree_ < 0) throw DegreeError("QForm degree must be >= 0");
  if (comps_.size() != binomial(rank_, degree_))
    throw DegreeError("QForm expects C(rank, degree) components");
}

QForm QForm::zero(int rank, int degree) {
  const size_t count = degree > rank ? 0 : binomial(rank, degree);
  return QForm(rank, degree, std::vector<Expr>(count, Expr::constant(0.0)));
}

QForm QForm::function(int rank, Expr f) { return QForm(rank, 0, {std::move(f)}); }

QForm QForm::basis_dual(int rank, int alpha) {
  QForm f = zero(rank, 1);
  f.comps_[static_cast<size_t>(alpha)] = Expr::constant(1.0);
  return f;
}

Expr QForm::component(std::span<const int> tuple) const {
  if (static_cast<int>(tuple.size()) != degree_)
    throw DegreeError("component tuple length != degree");
  std::vector<int> sorted(tuple.begin(), tuple.end());
  const int sign = sort_tuple(sorted);
  if (sign == 0) return Expr::constant(0.0);
  const Expr& value = comps_[tuple_rank(rank_, sorted)];
  return sign > 0 ? value : Expr::neg(value).simplify();
}

Expr QForm::apply(std::span<const Section> sections) const {
  if (static_cast<int>(sections.size()) != degree_)
    throw DegreeError("apply expects one section per degree");
  if (degree_ == 0) return comps_[0];
  for (const Section& s : sections)
    if (s.rank() != rank_) throw RankMismatch("section rank != form rank");
  std::vector<Expr> terms;
  const auto tuples = increasing_tuples(rank_, degree_);
  for (size_t t = 0; t < tuples.size(); ++t) {
    std::vector<std::vector<Expr>> minor(static_cast<size_t>(degree_),
                                         std::vector<Expr>(static_cast<size_t>(degree_)));
    for (int i = 0; i < degree_; ++i)
      for (int j = 0; j < degree_; ++j)
        minor[static_cast<size_t>(i)][static_cast<size_t>(j)] =
            sections[static_cast<size_t>(i)].coeffs[static_cast<size_t>(tuples[t][static_cast<size_t>(j)])];
    for (Expr& term : det_terms(minor)) terms.push_back(comps_[t] * std::move(term));
  }
  return simplified_sum(std::move(terms));
}

QForm lie_derivative(const AlgebroidSpec& a, const Section& s, const QForm& omega) {
  if (omega.rank() != a.rank()) throw RankMismatch("form does not belong to the algebroid");
  if (s.rank() != a.rank()) throw RankMismatch("section does not belong to the algebroid");
  const int q = omega.degree();
  if (q == 0) return QForm::function(a.rank(), anchor_action(a, s, omega.components()[0]));

  const auto tuples = increasing_tuples(a.rank(), q);
  std::vector<Expr> comps;
  comps.reserve(tuples.size());
  for (const auto& tuple : tuples) {
    std::vector<Expr> terms;
    terms.push_back(anchor_action(a, s, omega.component(tuple)));
    for (int slot = 0; slot < q; ++slot) {
      const Section br = bracket(a, s, Section::basis(a.rank(), tuple[static_cast<size_t>(slot)]));
      for (int gamma = 0; gamma < a.rank(); ++gamma) {
        const Expr& coeff = br.coeffs[static_cast<size_t>(gamma)];
        if (coeff.is_zero()) continue;
        std::vector<int> replaced(tuple);
        replaced[static_cast<size_t>(slot)] = gamma;
        terms.push_back(Expr::neg(coeff * omega.component(replaced)));
      }
    }
    comps.push_back(simplified_sum(std::move(terms)));
  }
  return QForm(a.rank(), q, std::move(comps));
}

QForm d_rho(const AlgebroidSpec& a, const QForm& omega) {
  if (omega.rank() != a.rank()) throw RankMismatch("form does not belong to the algebroid");
  const int m = a.rank();
  const int q = omega.degree();
  if (q >= m) return QForm::zero(m, q + 1);

  if (q == 0) {
    const Expr& f = omega.components()[0];
    std::vector<Expr> comps;
    for (int alpha = 0; alpha < m; ++alpha) {
      std::vector<Expr> terms;
      for (int i = 0; i < a.base_dim(); ++i) terms.push_back(a.anchor_coef(i, alpha) * f.diff(i));
      comps.push_back(simplified_sum(std::move(terms)));
    }
    return QForm(m, 1, std::move(comps));
  }

  // (d omega)(e_{a0},..,e_{aq}) with constant basis sections: the Lie term
  // reduces to rho_{ai}^k d_k of the omitted-index component.
  const auto tuples = increasing_tuples(m, q + 1);
  std::vector<Expr> comps;
  comps.reserve(tuples.size());
  for (const auto& tuple : tuples) {
    std::vector<Expr> terms;
    for (int i = 0; i <= q; ++i) {
      std::vector<int> omitted;
      for (int j = 0; j <= q; ++j)
        if (j != i) omitted.push_back(tuple[static_cast<size_t>(j)]);
      const Expr comp = omega.component(omitted);
      std::vector<Expr> lie_terms;
      for (int k = 0; k < a.base_dim(); ++k)
        lie_terms.push_back(a.anchor_coef(k, tuple[static_cast<size_t>(i)]) * comp.diff(k));
      const Expr lie = simplified_sum(std::move(lie_terms));
      terms.push_back(i % 2 == 0 ? lie : Expr::neg(lie));
    }
    for (int i = 0; i <= q; ++i)
      for (int j = i + 1; j <= q; ++j) {
        std::vector<int> rest;
        for (int l = 0; l <= q; ++l)
          if (l != i && l != j) rest.push_back(tuple[static_cast<size_t>(l)]);
        for (int gamma = 0; gamma < m; ++gamma) {
          const Expr c = a.structure_coef(tuple[static_cast<size_t>(i)],
                                          tuple[static_cast<size_t>(j)], gamma);
          if (c.is_zero()) continue;
          std::vector<int> args{gamma};
          args.insert(args.end(), rest.begin(), rest.end());
          Expr contribution = c * omega.component(args);
          terms.push_back((i + j) % 2 == 0 ? contribution : Expr::neg(contribution));
        }
      }
    comps.push_back(simplified_sum(std::move(terms)));
  }
  return QForm(m, q + 1, std::move(comps));
}

VerificationReport check_d_squared(const AlgebroidSpec& a, const QForm& omega,
                                   const CheckOptions& opts) {
  const QForm dd = d_rho(a, d_rho(a, omega));
  VerificationReport report;
  const auto points = sample_points(a.sample_box(), opts.samples);
  if (dd.components().empty()) {
    report.add("d_squared", "degree " + std::to_string(omega.degree()), 0.0, opts.tol);
    return report;
  }
  const SweepResult sweep = sweep_max_abs(dd.components(), points);
  report.add("d_squared",
             "degree " + std::to_string(omega.degree()) + " component " +
                 std::to_string(sweep.worst_component),
             sweep.max_abs, opts.tol);
  return report;
}

BundleMorphism BundleMorphism::identity(int base_dim, int rank) {
  BundleMorphism psi;
  for (int i = 0; i < base_dim; ++i) psi.base_map.push_back(Expr::coord(i));
  psi.fiber_map.assign(static_cast<size_t>(rank),
                       std::vector<Expr>(static_cast<size_t>(rank), Expr::constant(0.0)));
  for (int i = 0; i < rank; ++i)
    psi.fiber_map[static_cast<size_t>(i)][static_cast<size_t>(i)] = Expr::constant(1.0);
  return psi;
}

BundleMorphism compose(const BundleMorphism& psi1, const BundleMorphism& psi2) {
  if (psi1.source_rank() != psi2.target_rank())
    throw ShapeError("compose: fiber ranks do not chain");
  BundleMorphism out;
  for (const Expr& e : psi1.base_map) out.base_map.push_back(e.substitute(psi2.base_map).simplify());
  const int rows = psi1.target_rank();
  const int mid = psi1.source_rank();
  const int cols = psi2.source_rank();
  out.fiber_map.assign(static_cast<size_t>(rows), std::vector<Expr>(static_cast<size_t>(cols)));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      std::vector<Expr> terms;
      for (int k = 0; k < mid; ++k)
        terms.push_back(
            psi1.fiber_map[static_cast<size_t>(r)][static_cast<size_t>(k)].substitute(psi2.base_map) *
            psi2.fiber_map[static_cast<size_t>(k)][static_cast<size_t>(c)]);
      out.fiber_map[static_cast<size_t>(r)][static_cast<size_t>(c)] =
          simplified_sum(std::move(terms));
    }
  return out;
}

QForm pullback(const BundleMorphism& psi, const QForm& target_form) {
  const int q = target_form.degree();
  const int m_src = psi.source_rank();
  const int m_tgt = psi.target_rank();
  if (target_form.rank() != m_tgt) throw ShapeError("pullback: form rank != morphism target rank");

  if (q == 0)
    return QForm::function(m_src,
                           target_form.components()[0].substitute(psi.base_map).simplify());

  const auto src_tuples = increasing_tuples(m_src, q);
  const auto tgt_tuples = increasing_tuples(m_tgt, q);
  std::vector<Expr> comps;
  comps.reserve(src_tuples.size());
  for (const auto& alpha : src_tuples) {
    std::vector<Expr> terms;
    for (size_t t = 0; t < tgt_tuples.size(); ++t) {
      const auto& beta = tgt_tuples[t];
      std::vector<std::vector<Expr>> minor(static_cast<size_t>(q),
                                           std::vector<Expr>(static_cast<size_t>(q)));
      for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
          minor[static_cast<size_t>(i)][static_cast<size_t>(j)] =
              psi.fiber_map[static_cast<size_t>(beta[static_cast<size_t>(j)])]
                           [static_cast<size_t>(alpha[static_cast<size_t>(i)])];
      terms.push_back(target_form.components()[t].substitute(psi.base_map) * expr_det(minor));
    }
    comps.push_back(simplified_sum(std::move(terms)));
  }
  return QForm(m_src, q, std::move(comps));
}

VerificationReport check_morphism(const BundleMorphism& psi, const AlgebroidSpec& source,
                                  const AlgebroidSpec& target, const CheckOptions& opts) {
  if (psi.source_rank() != source.rank() || psi.target_rank() != target.rank() ||
      psi.target_dim() != target.base_dim())
    throw ShapeError("check_morphism: morphism shapes do not match the algebroids");
  for (const Expr& e : psi.base_map)
    if (e.max_coord() >= source.base_dim())
      throw ShapeError("check_morphism: base map uses unknown source coordinates");

  VerificationReport report;
  const auto points = sample_points(source.sample_box(), opts.samples);

  auto residual_sweep = [&](const QForm& lhs, const QForm& rhs, const std::string& site) {
    std::vector<Expr> residual;
    for (size_t i = 0; i < lhs.components().size(); ++i)
      residual.push_back(
          simplified_sum({lhs.components()[i], Expr::neg(rhs.components()[i])}));
    const SweepResult sweep = sweep_max_abs(residual, points);
    report.add("morphism", site, sweep.max_abs, opts.tol);
  };

  // Degree-0 generators: target coordinates.
  for (int i = 0; i < target.base_dim(); ++i) {
    const QForm f = QForm::function(target.rank(), Expr::coord(i));
    residual_sweep(d_rho(source, pullback(psi, f)), pullback(psi, d_rho(target, f)),
                   "generator x'" + std::to_string(i + 1));
  }
  // Degree-1 generators: target dual basis.
  for (int gamma = 0; gamma < target.rank(); ++gamma) {
    const QForm e = QForm::basis_dual(target.rank(), gamma);
    residual_sweep(d_rho(source, pullback(psi, e)), pullback(psi, d_rho(target, e)),
                   "generator e'" + std::to_string(gamma + 1));
  }
  return report;
}

}  // namespace algkit
