#include "algkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace algkit {

Box Box::cube(int dim, double lo, double hi) {
  Box box;
  box.ranges.assign(static_cast<size_t>(dim), {lo, hi});
  return box;
}

Box Box::extended(const Box& other) const {
  Box out = *this;
  out.ranges.insert(out.ranges.end(), other.ranges.begin(), other.ranges.end());
  return out;
}

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                           41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(int base, int index) {
  double inv = 1.0 / base;
  double result = 0.0;
  double frac = inv;
  while (index > 0) {
    result += frac * (index % base);
    index /= base;
    frac *= inv;
  }
  return result;
}

}  // namespace

std::vector<std::vector<double>> sample_points(const Box& box, int count) {
  const int dim = box.dim();
  std::vector<std::vector<double>> pts;
  pts.reserve(static_cast<size_t>(count));
  for (int k = 1; k <= count; ++k) {
    std::vector<double> p(static_cast<size_t>(dim));
    for (int d = 0; d < dim; ++d) {
      const int base = kPrimes[d % (sizeof(kPrimes) / sizeof(kPrimes[0]))];
      const double u = radical_inverse(base, k);
      const auto& [lo, hi] = box.ranges[static_cast<size_t>(d)];
      p[static_cast<size_t>(d)] = lo + (hi - lo) * u;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

int worker_count() {
  if (const char* env = std::getenv("ALGEBROID_KIT_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(size_t n, const std::function<void(size_t)>& fn) {
  const int workers = worker_count();
  if (workers <= 1 || n < 32) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const size_t used = std::min<size_t>(static_cast<size_t>(workers), n);
  std::vector<std::thread> pool;
  pool.reserve(used);
  for (size_t w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      for (size_t i = w; i < n; i += used) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

SweepResult sweep_max_abs(std::span<const Expr> components,
                          const std::vector<std::vector<double>>& points) {
  const size_t npts = points.size();
  const size_t ncomp = components.size();
  std::vector<double> values(npts * ncomp, 0.0);
  std::exception_ptr error;
  std::mutex error_mutex;
  parallel_for(npts, [&](size_t p) {
    try {
      for (size_t c = 0; c < ncomp; ++c)
        values[p * ncomp + c] = std::fabs(components[c].eval(points[p]));
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  });
  if (error) std::rethrow_exception(error);

  SweepResult result;
  for (size_t p = 0; p < npts; ++p) {
    for (size_t c = 0; c < ncomp; ++c) {
      const double v = values[p * ncomp + c];
      if (v > result.max_abs) {
        result.max_abs = v;
        result.worst_point = p;
        result.worst_component = static_cast<int>(c);
      }
    }
  }
  return result;
}

uint64_t Rng::next() {
  state_ += 0x9E3779B97F4A7C15ull;
  uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double Rng::uniform(double lo, double hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

int Rng::uniform_int(int lo, int hi) {
  const uint64_t span = static_cast<uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(next() % span);
}

Expr random_polynomial(Rng& rng, int num_coords, int max_degree, int num_terms) {
  std::vector<Expr> terms;
  for (int t = 0; t < num_terms; ++t) {
    std::vector<Expr> factors;
    factors.push_back(Expr::constant(static_cast<double>(rng.uniform_int(-3, 3))));
    const int degree = rng.uniform_int(0, max_degree);
    for (int d = 0; d < degree; ++d)
      factors.push_back(Expr::coord(rng.uniform_int(0, num_coords - 1)));
    terms.push_back(Expr::mul(std::move(factors)));
  }
  return Expr::add(std::move(terms)).simplify();
}

}  // namespace algkit
