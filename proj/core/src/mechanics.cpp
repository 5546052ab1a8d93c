#include "algkit/mechanics.hpp"

#include <cmath>

#include "algkit/algebroid.hpp"

namespace algkit {

HamiltonianSystem::HamiltonianSystem(int base_dim, int rank,
                                     std::vector<std::vector<Expr>> anchor,
                                     const std::vector<StructureEntry>& structure,
                                     Expr hamiltonian, Box domain)
    : base_dim_(base_dim),
      rank_(rank),
      anchor_(std::move(anchor)),
      hamiltonian_(std::move(hamiltonian)),
      domain_(std::move(domain)) {
  if (base_dim_ < 1 || rank_ < 1)
    throw ShapeError("Hamiltonian system needs base_dim >= 1 and rank >= 1");
  if (anchor_.size() != static_cast<size_t>(base_dim_))
    throw ShapeError("anchor must have base_dim rows");
  for (const auto& row : anchor_)
    if (row.size() != static_cast<size_t>(rank_)) throw ShapeError("anchor row has wrong width");
  if (domain_.dim() != phase_dim()) throw ShapeError("domain must cover the phase space");

  const size_t pairs = static_cast<size_t>(rank_) * (rank_ - 1) / 2;
  structure_.assign(pairs, std::vector<Expr>(static_cast<size_t>(rank_), Expr::constant(0.0)));
  for (const StructureEntry& e : structure) {
    if (e.gamma < 0 || e.gamma >= rank_ || e.alpha < 0 || e.alpha >= rank_ || e.beta < 0 ||
        e.beta >= rank_ || e.alpha == e.beta)
      throw ShapeError("structure entry indices out of range");
    const bool flip = e.alpha > e.beta;
    const int a = flip ? e.beta : e.alpha;
    const int b = flip ? e.alpha : e.beta;
    Expr value = flip ? Expr::neg(e.value) : e.value;
    auto& slot = structure_[pair_index(a, b)][static_cast<size_t>(e.gamma)];
    slot = simplified_sum({slot, std::move(value)});
  }
  monitors_.emplace_back("H", hamiltonian_);
}

size_t HamiltonianSystem::pair_index(int alpha, int beta) const {
  return static_cast<size_t>(alpha) * rank_ - static_cast<size_t>(alpha) * (alpha + 1) / 2 +
         static_cast<size_t>(beta - alpha - 1);
}

const Expr& HamiltonianSystem::anchor_coef(int i, int alpha) const {
  return anchor_[static_cast<size_t>(i)][static_cast<size_t>(alpha)];
}

Expr HamiltonianSystem::structure_coef(int alpha, int beta, int gamma) const {
  if (alpha == beta) return Expr::constant(0.0);
  if (alpha < beta) return structure_[pair_index(alpha, beta)][static_cast<size_t>(gamma)];
  return Expr::neg(structure_[pair_index(beta, alpha)][static_cast<size_t>(gamma)]).simplify();
}

CoordNames HamiltonianSystem::phase_coords() const {
  return concat_coords(make_coords("x", base_dim_), make_coords("mu", rank_));
}

void HamiltonianSystem::add_monitor(std::string name, Expr quantity) {
  monitors_.emplace_back(std::move(name), std::move(quantity));
}

std::vector<Expr> hamilton_vector_field(const HamiltonianSystem& sys) {
  const int n = sys.base_dim();
  const int m = sys.rank();
  const Expr& h = sys.hamiltonian();
  std::vector<Expr> field;
  field.reserve(static_cast<size_t>(n + m));
  for (int i = 0; i < n; ++i) {
    std::vector<Expr> terms;
    for (int alpha = 0; alpha < m; ++alpha)
      terms.push_back(sys.anchor_coef(i, alpha) * h.diff(n + alpha));
    field.push_back(simplified_sum(std::move(terms)));
  }
  for (int alpha = 0; alpha < m; ++alpha) {
    std::vector<Expr> terms;
    for (int i = 0; i < n; ++i)
      terms.push_back(Expr::neg(sys.anchor_coef(i, alpha) * h.diff(i)));
    for (int gamma = 0; gamma < m; ++gamma)
      for (int beta = 0; beta < m; ++beta) {
        if (beta == alpha) continue;
        const Expr c = sys.structure_coef(alpha, beta, gamma);
        if (c.is_zero()) continue;
        terms.push_back(Expr::neg(Expr::coord(n + gamma) * c * h.diff(n + beta)));
      }
    field.push_back(simplified_sum(std::move(terms)));
  }
  return field;
}

HamiltonianSystem harmonic_oscillator_system(int n) {
  if (n < 1) throw ShapeError("oscillator needs n >= 1");
  // Phase coordinates (x^1..x^n, mu_1..mu_n); N_n lives on the doubled
  // space with y^k read as mu_k. Build that Nijenhuis algebroid and take
  // the x-block of its structure functions (they vanish identically, which
  // is what makes the n=1 equations reduce to dx/dt = mu, dmu/dt = -x).
  std::vector<std::vector<Expr>> n_tensor(
      static_cast<size_t>(2 * n),
      std::vector<Expr>(static_cast<size_t>(2 * n), Expr::constant(0.0)));
  for (int k = 0; k < n; ++k) {
    const Expr fk = Expr::div(Expr::pow(Expr::coord(k), 2) + Expr::pow(Expr::coord(n + k), 2),
                              Expr::constant(2.0));
    n_tensor[static_cast<size_t>(k)][static_cast<size_t>(k)] = fk;
    n_tensor[static_cast<size_t>(n + k)][static_cast<size_t>(n + k)] = fk;
  }
  Box domain = Box::cube(2 * n, 0.5, 1.5);
  const NijenhuisAlgebroid doubled = nijenhuis_algebroid(n_tensor, domain);

  std::vector<std::vector<Expr>> anchor(static_cast<size_t>(n),
                                        std::vector<Expr>(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int alpha = 0; alpha < n; ++alpha)
      anchor[static_cast<size_t>(i)][static_cast<size_t>(alpha)] =
          n_tensor[static_cast<size_t>(i)][static_cast<size_t>(alpha)];

  std::vector<HamiltonianSystem::StructureEntry> structure;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int g = 0; g < n; ++g) {
        const Expr c = doubled.spec.structure_coef(a, b, g);
        if (!c.is_zero()) structure.push_back({a, b, g, c});
      }

  std::vector<Expr> factors;
  for (int i = 0; i < n; ++i)
    factors.push_back(Expr::ln(Expr::pow(Expr::coord(i), 2) + Expr::pow(Expr::coord(n + i), 2)));
  Expr h = Expr::mul(std::move(factors));

  HamiltonianSystem sys(n, n, std::move(anchor), structure, std::move(h), std::move(domain));
  for (int i = 0; i < n; ++i)
    sys.add_monitor("r" + std::to_string(i + 1) + "sq",
                    (Expr::pow(Expr::coord(i), 2) + Expr::pow(Expr::coord(n + i), 2)).simplify());
  return sys;
}

Trajectory integrate_rk4(const HamiltonianSystem& sys, std::span<const double> z0, double dt,
                         double total_time) {
  if (!(dt > 0.0)) throw ShapeError("time step must be positive");
  if (!(total_time > 0.0)) throw ShapeError("total time must be positive");
  if (static_cast<int>(z0.size()) != sys.phase_dim())
    throw ShapeError("initial state must have phase dimension");
  const std::vector<Expr> field = hamilton_vector_field(sys);
  const int dim = sys.phase_dim();

  // Uniform steps landing exactly on total_time: dt is adjusted by at most
  // half a step.
  const auto steps = static_cast<size_t>(std::max<long long>(1, std::llround(total_time / dt)));
  dt = total_time / static_cast<double>(steps);

  sys.hamiltonian().eval(z0);  // initial state must be inside the domain

  Trajectory traj;
  traj.dt = dt;
  std::vector<double> z(z0.begin(), z0.end());
  traj.times.push_back(0.0);
  traj.states.push_back(z);

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  auto eval_field = [&](const std::vector<double>& state, std::vector<double>& out, double t,
                        const std::vector<double>& last) {
    try {
      for (int i = 0; i < dim; ++i) out[static_cast<size_t>(i)] = field[static_cast<size_t>(i)].eval(state);
    } catch (const DomainError& err) {
      throw DomainExit(std::string("trajectory left the domain: ") + err.what(), t, last);
    }
  };

  for (size_t s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s) * dt;
    eval_field(z, k1, t, z);
    for (int i = 0; i < dim; ++i) tmp[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] + 0.5 * dt * k1[static_cast<size_t>(i)];
    eval_field(tmp, k2, t, z);
    for (int i = 0; i < dim; ++i) tmp[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] + 0.5 * dt * k2[static_cast<size_t>(i)];
    eval_field(tmp, k3, t, z);
    for (int i = 0; i < dim; ++i) tmp[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] + dt * k3[static_cast<size_t>(i)];
    eval_field(tmp, k4, t, z);
    std::vector<double> next = z;
    for (int i = 0; i < dim; ++i) {
      const size_t ii = static_cast<size_t>(i);
      next[ii] += dt / 6.0 * (k1[ii] + 2.0 * k2[ii] + 2.0 * k3[ii] + k4[ii]);
      if (!std::isfinite(next[ii]))
        throw NonFinite("non-finite state at t = " + std::to_string(t + dt));
    }
    // The Hamiltonian must stay evaluable along the flow; losing it means
    // the trajectory left the domain between samples.
    try {
      sys.hamiltonian().eval(next);
    } catch (const DomainError& err) {
      throw DomainExit(std::string("trajectory left the domain: ") + err.what(), t, z);
    }
    z = std::move(next);
    traj.times.push_back(static_cast<double>(s + 1) * dt);
    traj.states.push_back(z);
  }
  return traj;
}

DriftStats conserved_report(const HamiltonianSystem& sys, const Trajectory& traj,
                            const std::vector<std::pair<std::string, Expr>>& quantities) {
  (void)sys;
  if (traj.states.empty()) throw ShapeError("empty trajectory");
  DriftStats stats;
  for (const auto& [name, q] : quantities) {
    const double q0 = q.eval(traj.states.front());
    double drift = 0.0;
    for (const auto& state : traj.states) drift = std::max(drift, std::fabs(q.eval(state) - q0));
    stats.max_drift.emplace_back(name, drift);
  }
  return stats;
}

}  // namespace algkit
