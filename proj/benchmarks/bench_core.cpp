#include <benchmark/benchmark.h>

#include "algkit/limits.hpp"
#include "algkit/mechanics.hpp"

using namespace algkit;

namespace {

Expr c(double v) { return Expr::constant(v); }

std::vector<std::vector<Expr>> n1_tensor() {
  const Expr f = Expr::div(Expr::pow(Expr::coord(0), 2) + Expr::pow(Expr::coord(1), 2), c(2.0));
  return {{f, c(0.0)}, {c(0.0), f}};
}

void BM_expr_eval(benchmark::State& state) {
  const HamiltonianSystem osc = harmonic_oscillator_system(3);
  const std::vector<Expr> field = hamilton_vector_field(osc);
  const std::vector<double> p{1.0, 0.9, 1.1, 0.2, 0.3, 0.1};
  for (auto _ : state) {
    double acc = 0.0;
    for (const Expr& comp : field) acc += comp.eval(p);
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_expr_eval);

void BM_expr_diff_simplify(benchmark::State& state) {
  const HamiltonianSystem osc = harmonic_oscillator_system(3);
  for (auto _ : state) {
    const Expr d = osc.hamiltonian().diff(2).simplify();
    benchmark::DoNotOptimize(&d);
  }
}
BENCHMARK(BM_expr_diff_simplify);

void BM_bracket(benchmark::State& state) {
  const auto nij = nijenhuis_algebroid(n1_tensor());
  Rng rng(1);
  const Section s1 = random_section(rng, nij.spec);
  const Section s2 = random_section(rng, nij.spec);
  for (auto _ : state) {
    const Section br = bracket(nij.spec, s1, s2);
    benchmark::DoNotOptimize(&br);
  }
}
BENCHMARK(BM_bracket);

void BM_jacobiator_prolonged(benchmark::State& state) {
  const auto nij = nijenhuis_algebroid(n1_tensor());
  const AlgebroidSpec p = prolong(nij.spec, Fibration(2, 2));
  Rng rng(2);
  const Section s1 = random_section(rng, p);
  const Section s2 = random_section(rng, p);
  const Section s3 = random_section(rng, p);
  for (auto _ : state) {
    const Section j = jacobiator(p, s1, s2, s3);
    benchmark::DoNotOptimize(&j);
  }
}
BENCHMARK(BM_jacobiator_prolonged);

void BM_d_rho_one_form(benchmark::State& state) {
  const auto nij = nijenhuis_algebroid(n1_tensor());
  const AlgebroidSpec p = prolong(nij.spec, Fibration(2, 2));
  Rng rng(3);
  QForm omega = QForm::zero(p.rank(), 1);
  for (int alpha = 0; alpha < p.rank(); ++alpha)
    omega.component_at(static_cast<size_t>(alpha)) = random_polynomial(rng, p.base_dim());
  for (auto _ : state) {
    const QForm d = d_rho(p, omega);
    benchmark::DoNotOptimize(&d);
  }
}
BENCHMARK(BM_d_rho_one_form);

void BM_rk4_oscillator(benchmark::State& state) {
  const HamiltonianSystem osc = harmonic_oscillator_system(2);
  const std::vector<double> z0{1.2, 1.0, 0.0, 0.3};
  for (auto _ : state) {
    const Trajectory traj = integrate_rk4(osc, z0, 1e-3, 1.0);
    benchmark::DoNotOptimize(&traj);
  }
}
BENCHMARK(BM_rk4_oscillator);

void BM_verify_tangent_tower(benchmark::State& state) {
  std::vector<AlgebroidSpec> levels;
  for (int n = 1; n <= 3; ++n) levels.push_back(tangent_algebroid(n));
  const DirectSystemSpec sys = DirectSystemSpec::canonical(std::move(levels));
  for (auto _ : state) {
    const VerificationReport report = verify_direct_system(sys);
    benchmark::DoNotOptimize(&report);
  }
}
BENCHMARK(BM_verify_tangent_tower);

}  // namespace

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}
