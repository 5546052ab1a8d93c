#pragma once

#include <string>
#include <utility>
#include <vector>

#include "algkit/expr.hpp"
#include "algkit/report.hpp"
#include "algkit/sampling.hpp"

namespace algkit {

/// Hamiltonian mechanics on the dual of an anchored bundle, in phase
/// coordinates (x^1..x^n, mu_1..mu_m). Anchor and structure coefficients are
/// Exprs over the full phase space (the worked oscillator identifies base
/// coordinates with momenta, so plain base-only coefficients would not
/// cover it).
class HamiltonianSystem {
 public:
  struct StructureEntry {
    int alpha, beta, gamma;
    Expr value;
  };

  /// `anchor[i][alpha]` = rho_alpha^i (n rows, m columns); `structure`
  /// entries antisymmetrize as for AlgebroidSpec; `domain` is the start and
  /// sampling box in phase space (n+m intervals) avoiding singularities.
  HamiltonianSystem(int base_dim, int rank, std::vector<std::vector<Expr>> anchor,
                    const std::vector<StructureEntry>& structure, Expr hamiltonian, Box domain);

  int base_dim() const { return base_dim_; }
  int rank() const { return rank_; }
  int phase_dim() const { return base_dim_ + rank_; }
  const Expr& hamiltonian() const { return hamiltonian_; }
  const Expr& anchor_coef(int i, int alpha) const;
  Expr structure_coef(int alpha, int beta, int gamma) const;
  const Box& domain() const { return domain_; }
  CoordNames phase_coords() const;

  /// Named conserved-quantity candidates monitored along trajectories;
  /// always contains the Hamiltonian.
  const std::vector<std::pair<std::string, Expr>>& monitors() const { return monitors_; }
  void add_monitor(std::string name, Expr quantity);

 private:
  int base_dim_;
  int rank_;
  std::vector<std::vector<Expr>> anchor_;
  std::vector<std::vector<Expr>> structure_;  // pair-indexed, alpha < beta
  Expr hamiltonian_;
  Box domain_;
  std::vector<std::pair<std::string, Expr>> monitors_;

  size_t pair_index(int alpha, int beta) const;
};

/// Hamilton equations as symbolic phase-space components:
///   dx^i/dt  =  rho_alpha^i dH/dmu_alpha
///   dmu_a/dt = -rho_a^i dH/dx^i - mu_g C_{ab}^g dH/dmu_b.
std::vector<Expr> hamilton_vector_field(const HamiltonianSystem& sys);

/// The convenient harmonic oscillator: anchor rho_a^i =
/// delta_a^i (x_a^2 + mu_a^2)/2 (the Nijenhuis tensor N_n with its base
/// coordinates y^k read as the momenta mu_k), structure functions the
/// x-block of the N_n algebroid (identically zero), Hamiltonian
/// H_n = prod_i ln(x_i^2 + mu_i^2), defined away from per-pair origins.
/// Monitors: H and every squared radius r_a^2 = x_a^2 + mu_a^2.
HamiltonianSystem harmonic_oscillator_system(int n);

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
};

/// Fixed-step classical RK4 from z0 over [0, T]. Throws DomainExit (with the
/// last valid sample attached) when the flow leaves the Hamiltonian's
/// domain and NonFinite when a state stops being finite.
Trajectory integrate_rk4(const HamiltonianSystem& sys, std::span<const double> z0, double dt,
                         double total_time);

struct DriftStats {
  // (name, max |q(z_t) - q(z_0)|) per quantity.
  std::vector<std::pair<std::string, double>> max_drift;
};

DriftStats conserved_report(const HamiltonianSystem& sys, const Trajectory& traj,
                            const std::vector<std::pair<std::string, Expr>>& quantities);

}  // namespace algkit
