// Serial reference vs OpenMP kernels: wall time and output equality.
//
//   bench_kernels [--n N] [--d D] [--centers K] [--reps R]

#include <CLI11.hpp>

#include <cstdio>
#include <random>
#include <vector>

#include "gheur/ann.hpp"
#include "gheur/bench.hpp"
#include "gheur/kernels.hpp"

using namespace gheur;

namespace {

template <class F>
double time_ms(std::size_t reps, F&& f) {
  std::vector<double> t;
  for (std::size_t r = 0; r < reps; ++r) {
    Stopwatch sw;
    f();
    t.push_back(sw.elapsed_ms());
  }
  return median(t);
}

void report(const char* name, double serial_ms, double omp_ms, bool equal) {
  std::printf("%-18s,%12.3f,%12.3f,%8.2f,%s\n", name, serial_ms, omp_ms, omp_ms > 0 ? serial_ms / omp_ms : 0.0,
              equal ? "identical" : "DIFFERENT");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel comparison"};
  std::size_t n = 100000, d = 8, k = 300, reps = 5;
  app.add_option("--n", n);
  app.add_option("--d", d);
  app.add_option("--centers", k);
  app.add_option("--reps", reps);
  CLI11_PARSE(app, argc, argv);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> points(n * d), centers(k * d), coef(k);
  for (auto& v : points) v = u(rng);
  for (auto& v : centers) v = u(rng);
  for (auto& v : coef) v = u(rng) - 0.5;

  std::printf("threads=%d n=%zu d=%zu centers=%zu\n", kernels::max_threads(), n, d, k);
  std::printf("%-18s,%12s,%12s,%8s,%s\n", "kernel", "serial_ms", "omp_ms", "speedup", "output");

  {
    std::vector<std::uint32_t> a(n), b(n);
    double ia = 0, ib = 0;
    const double ts = time_ms(reps, [&] { ia = kernels::serial::assign_to_centers(points, centers, d, a); });
    const double to = time_ms(reps, [&] { ib = kernels::omp::assign_to_centers(points, centers, d, b); });
    report("assign_to_centers", ts, to, a == b && ia == ib);
  }
  {
    KernelParams kp{KernelKind::rbf, 1.0 / static_cast<double>(d), 0.0, 3};
    std::vector<double> a(n), b(n);
    const std::span<const double> x(points.data(), d);
    const double ts = time_ms(reps, [&] { kernels::serial::kernel_row(kp, x, points, d, a); });
    const double to = time_ms(reps, [&] { kernels::omp::kernel_row(kp, x, points, d, b); });
    report("kernel_row_rbf", ts, to, a == b);
  }
  {
    KernelParams kp{KernelKind::rbf, 1.0 / static_cast<double>(d), 0.0, 3};
    std::vector<double> a(n), b(n);
    const double ts = time_ms(reps, [&] { kernels::serial::decision_values(kp, centers, coef, 0.1, points, d, a); });
    const double to = time_ms(reps, [&] { kernels::omp::decision_values(kp, centers, coef, 0.1, points, d, b); });
    report("decision_values", ts, to, a == b);
  }
  {
    const NNIndex idx(centers, d);
    KnnResult a, b;
    const double ts = time_ms(reps, [&] { a = idx.knn_search(points, 1, Exec::serial); });
    const double to = time_ms(reps, [&] { b = idx.knn_search(points, 1, Exec::parallel); });
    report("knn_search_k1", ts, to, a.indices == b.indices && a.dists == b.dists);
  }
  return 0;
}
