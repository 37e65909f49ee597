#include "gheur/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <vector>

namespace gheur::kernels {

double kernel_value(const KernelParams& kp, std::span<const double> a, std::span<const double> b) {
  switch (kp.kind) {
    case KernelKind::linear:
      return dot(a, b);
    case KernelKind::polynomial: {
      const double base = kp.gamma * dot(a, b) + kp.coef0;
      double r = 1.0;
      for (int i = 0; i < kp.degree; ++i) r *= base;
      return r;
    }
    case KernelKind::rbf:
      return std::exp(-kp.gamma * squared_distance(a, b));
  }
  return 0.0;
}

namespace {

inline std::uint32_t nearest_center(std::span<const double> p, std::span<const double> centers,
                                    std::size_t dim, double& best) {
  const std::size_t k = centers.size() / dim;
  best = std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double d2 = squared_distance(p, centers.subspan(c * dim, dim));
    if (d2 < best) {
      best = d2;
      arg = static_cast<std::uint32_t>(c);
    }
  }
  return arg;
}

}  // namespace

namespace serial {

double assign_to_centers(std::span<const double> points, std::span<const double> centers,
                         std::size_t dim, std::span<std::uint32_t> assignment) {
  const std::size_t n = assignment.size();
  double inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double best = 0;
    assignment[i] = nearest_center(points.subspan(i * dim, dim), centers, dim, best);
    inertia += best;
  }
  return inertia;
}

void kernel_row(const KernelParams& kp, std::span<const double> x, std::span<const double> rows,
                std::size_t dim, std::span<double> out) {
  for (std::size_t t = 0; t < out.size(); ++t) out[t] = kernel_value(kp, x, rows.subspan(t * dim, dim));
}

void decision_values(const KernelParams& kp, std::span<const double> sv,
                     std::span<const double> coef, double rho, std::span<const double> queries,
                     std::size_t dim, std::span<double> out) {
  for (std::size_t q = 0; q < out.size(); ++q) {
    auto x = queries.subspan(q * dim, dim);
    double s = 0.0;
    for (std::size_t t = 0; t < coef.size(); ++t) s += coef[t] * kernel_value(kp, x, sv.subspan(t * dim, dim));
    out[q] = s - rho;
  }
}

}  // namespace serial

namespace omp {

double assign_to_centers(std::span<const double> points, std::span<const double> centers,
                         std::size_t dim, std::span<std::uint32_t> assignment) {
  const auto n = static_cast<std::int64_t>(assignment.size());
  std::vector<double> best(assignment.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    assignment[i] = nearest_center(points.subspan(i * dim, dim), centers, dim, best[i]);
  }
  // Summed in point order so the total matches the serial reference exactly.
  double inertia = 0.0;
  for (double b : best) inertia += b;
  return inertia;
}

void kernel_row(const KernelParams& kp, std::span<const double> x, std::span<const double> rows,
                std::size_t dim, std::span<double> out) {
  const auto n = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(static) if (n > 2048)
  for (std::int64_t t = 0; t < n; ++t) out[t] = kernel_value(kp, x, rows.subspan(t * dim, dim));
}

void decision_values(const KernelParams& kp, std::span<const double> sv,
                     std::span<const double> coef, double rho, std::span<const double> queries,
                     std::size_t dim, std::span<double> out) {
  const auto nq = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t q = 0; q < nq; ++q) {
    auto x = queries.subspan(q * dim, dim);
    double s = 0.0;
    for (std::size_t t = 0; t < coef.size(); ++t) s += coef[t] * kernel_value(kp, x, sv.subspan(t * dim, dim));
    out[q] = s - rho;
  }
}

}  // namespace omp

int max_threads() { return omp_get_max_threads(); }
void set_threads(int n) { omp_set_num_threads(n); }

}  // namespace gheur::kernels
