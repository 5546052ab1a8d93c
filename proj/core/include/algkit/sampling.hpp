#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "algkit/expr.hpp"

namespace algkit {

/// Axis-aligned closed box; the sampling domain of every residual sweep.
struct Box {
  std::vector<std::array<double, 2>> ranges;

  static Box cube(int dim, double lo = -1.0, double hi = 1.0);
  Box extended(const Box& other) const;  // cartesian product
  int dim() const { return static_cast<int>(ranges.size()); }
};

/// Deterministic low-discrepancy sample of `count` points (Halton sequence,
/// one prime base per dimension). Identical inputs always reproduce the
/// identical point list.
std::vector<std::vector<double>> sample_points(const Box& box, int count);

/// Worker cap: ALGEBROID_KIT_THREADS env var, else hardware concurrency.
int worker_count();

/// Evaluates fn(i) for i in [0,n) across workers. Each index is computed
/// exactly once and results land in caller-owned slots, so output does not
/// depend on the worker count.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

struct SweepResult {
  double max_abs = 0.0;
  size_t worst_point = 0;
  int worst_component = 0;
};

/// Max of |component eval| over the points. Evaluation errors propagate.
SweepResult sweep_max_abs(std::span<const Expr> components,
                          const std::vector<std::vector<double>>& points);

/// splitmix64; tiny, seedable, stable across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}
  uint64_t next();
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);  // inclusive bounds

 private:
  uint64_t state_;
};

/// Random small-integer-coefficient polynomial in `num_coords` coordinates;
/// used by the randomized identity sweeps and the property tests.
Expr random_polynomial(Rng& rng, int num_coords, int max_degree = 2, int num_terms = 3);

}  // namespace algkit
