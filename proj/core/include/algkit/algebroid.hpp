#pragma once

#include <array>
#include <optional>
#include <vector>

#include "algkit/expr.hpp"
#include "algkit/report.hpp"
#include "algkit/sampling.hpp"

namespace algkit {

/// Section of the bundle: s = s^alpha e_alpha, one Expr per basis section,
/// over base coordinates.
struct Section {
  std::vector<Expr> coeffs;

  int rank() const { return static_cast<int>(coeffs.size()); }
  static Section zero(int rank);
  static Section basis(int rank, int alpha);
};

/// Vector field on the base: v = v^i d/dx^i.
struct VectorField {
  std::vector<Expr> comps;

  int dim() const { return static_cast<int>(comps.size()); }
  static VectorField zero(int dim);
};

/// Commutator [X, Y]^i = X^j dY^i/dx^j - Y^j dX^i/dx^j.
VectorField vf_bracket(const VectorField& x, const VectorField& y);

/// Lie algebroid in one global chart: an open box in R^n carrying a rank-m
/// anchored bundle with anchor coefficients rho_alpha^i and structure
/// functions C_{alpha beta}^gamma, all symbolic over the base coordinates.
/// Antisymmetry of C in (alpha, beta) holds by storage: only alpha < beta
/// entries exist and reads antisymmetrize.
class AlgebroidSpec {
 public:
  /// `anchor[i][alpha]` = rho_alpha^i (n rows, m columns).
  /// `structure` lists (alpha, beta, gamma, expr) entries with
  /// alpha < beta, zero-based; omitted entries are zero.
  struct StructureEntry {
    int alpha, beta, gamma;
    Expr value;
  };

  AlgebroidSpec(int base_dim, int rank, std::vector<std::vector<Expr>> anchor,
                const std::vector<StructureEntry>& structure, Box sample_box);

  int base_dim() const { return base_dim_; }
  int rank() const { return rank_; }
  const Box& sample_box() const { return box_; }
  const Expr& anchor_coef(int i, int alpha) const;
  /// C_{alpha beta}^gamma, antisymmetrized (alpha == beta gives 0).
  Expr structure_coef(int alpha, int beta, int gamma) const;
  /// Stored entries (alpha < beta, simplified); for serialization.
  std::vector<StructureEntry> structure_entries() const;

  CoordNames base_coords() const { return make_coords("x", base_dim_); }

 private:
  int base_dim_;
  int rank_;
  std::vector<std::vector<Expr>> anchor_;         // [i][alpha]
  std::vector<std::vector<Expr>> structure_;      // [pair_index][gamma]
  Box box_;

  size_t pair_index(int alpha, int beta) const;  // alpha < beta
};

/// rho(s): v^i = sum_alpha rho_alpha^i s^alpha.
VectorField anchor_apply(const AlgebroidSpec& a, const Section& s);

/// rho(s)(f): the anchor image acting on a function.
Expr anchor_action(const AlgebroidSpec& a, const Section& s, const Expr& f);

/// [s1, s2]^gamma = s1^a s2^b C_{ab}^gamma + rho(s1)(s2^gamma)
///                - rho(s2)(s1^gamma); forced by bilinearity, the Leibniz
/// rule and the basis brackets.
Section bracket(const AlgebroidSpec& a, const Section& s1, const Section& s2);

/// Cyclic sum [s1,[s2,s3]] + [s2,[s3,s1]] + [s3,[s1,s2]].
Section jacobiator(const AlgebroidSpec& a, const Section& s1, const Section& s2,
                   const Section& s3);

/// Sampled residual of [s1, f s2] - (f [s1,s2] + rho(s1)(f) s2).
VerificationReport check_leibniz(const AlgebroidSpec& a, const Section& s1, const Expr& f,
                                 const Section& s2, const CheckOptions& opts = {});

/// Jacobiator residual over basis triples plus seeded random
/// polynomial-coefficient triples (basis triples alone are vacuous below
/// rank 3 and blind to anchor defects).
VerificationReport check_jacobi(const AlgebroidSpec& a, const CheckOptions& opts = {});
VerificationReport check_jacobi(const AlgebroidSpec& a,
                                std::span<const std::array<Section, 3>> triples,
                                const CheckOptions& opts = {});

/// Sampled residual of rho([s1,s2]) - [rho(s1), rho(s2)].
VerificationReport check_anchor_bracket_compat(const AlgebroidSpec& a, const Section& s1,
                                               const Section& s2, const CheckOptions& opts = {});
/// Same check swept over basis pairs and seeded random pairs.
VerificationReport check_anchor_bracket_compat(const AlgebroidSpec& a,
                                               const CheckOptions& opts = {});

/// Tangent bundle TR^n: identity anchor, vanishing structure functions.
AlgebroidSpec tangent_algebroid(int n, std::optional<Box> box = std::nullopt);

/// Anchored bundle (TM, N) for a (1,1) tensor N (given as N[i][j] = N^i_j
/// over base coordinates) with the deformed bracket; the structure functions
/// on coordinate fields are C_{ab}^g = d_a N^g_b - d_b N^g_a. The Nijenhuis
/// torsion is sampled on coordinate-field pairs; a violation flags the
/// report but the spec is still returned.
struct NijenhuisAlgebroid {
  AlgebroidSpec spec;
  VerificationReport nijenhuis_check;
};
NijenhuisAlgebroid nijenhuis_algebroid(const std::vector<std::vector<Expr>>& n_tensor,
                                       std::optional<Box> box = std::nullopt,
                                       const CheckOptions& opts = {});

/// Cotangent algebroid T*R^n of a bivector Lambda (antisymmetric, given as
/// Lambda[a][b] over base coordinates): anchor rho_a^i = Lambda^{ai},
/// structure C_{ab}^g = d Lambda^{ab} / dx^g. Jacobi holds iff Lambda is
/// Poisson; the sampled verdict flags the report.
struct PoissonCotangentAlgebroid {
  AlgebroidSpec spec;
  VerificationReport jacobi_check;
};
PoissonCotangentAlgebroid poisson_cotangent_algebroid(
    const std::vector<std::vector<Expr>>& lambda, std::optional<Box> box = std::nullopt,
    const CheckOptions& opts = {});

/// Random polynomial-coefficient section for randomized sweeps.
Section random_section(Rng& rng, const AlgebroidSpec& a);

}  // namespace algkit
