#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version and a serial
// reference; both produce bit-identical output so that results never depend
// on the thread count.

#include <cstdint>
#include <span>

#include "gheur/common.hpp"

namespace gheur {

enum class KernelKind { linear, polynomial, rbf };

struct KernelParams {
  KernelKind kind = KernelKind::linear;
  double gamma = 0.0;  // <= 0 means 1/d
  double coef0 = 0.0;
  int degree = 3;

  bool operator==(const KernelParams&) const = default;
};

namespace kernels {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double kernel_value(const KernelParams& kp, std::span<const double> a, std::span<const double> b);

namespace serial {

// Nearest center per point, ties to the lowest center index. Returns the
// within-cluster sum of squares of the assignment.
double assign_to_centers(std::span<const double> points, std::span<const double> centers,
                         std::size_t dim, std::span<std::uint32_t> assignment);

// out[t] = K(x, rows[t]) for every row of the row-major matrix.
void kernel_row(const KernelParams& kp, std::span<const double> x, std::span<const double> rows,
                std::size_t dim, std::span<double> out);

// out[q] = sum_s coef[s] * K(queries[q], sv[s]) - rho
void decision_values(const KernelParams& kp, std::span<const double> sv,
                     std::span<const double> coef, double rho, std::span<const double> queries,
                     std::size_t dim, std::span<double> out);

}  // namespace serial

namespace omp {

double assign_to_centers(std::span<const double> points, std::span<const double> centers,
                         std::size_t dim, std::span<std::uint32_t> assignment);

void kernel_row(const KernelParams& kp, std::span<const double> x, std::span<const double> rows,
                std::size_t dim, std::span<double> out);

void decision_values(const KernelParams& kp, std::span<const double> sv,
                     std::span<const double> coef, double rho, std::span<const double> queries,
                     std::size_t dim, std::span<double> out);

}  // namespace omp

inline double assign_to_centers(Exec exec, std::span<const double> points,
                                std::span<const double> centers, std::size_t dim,
                                std::span<std::uint32_t> assignment) {
  return exec == Exec::parallel ? omp::assign_to_centers(points, centers, dim, assignment)
                                : serial::assign_to_centers(points, centers, dim, assignment);
}

inline void kernel_row(Exec exec, const KernelParams& kp, std::span<const double> x,
                       std::span<const double> rows, std::size_t dim, std::span<double> out) {
  if (exec == Exec::parallel)
    omp::kernel_row(kp, x, rows, dim, out);
  else
    serial::kernel_row(kp, x, rows, dim, out);
}

inline void decision_values(Exec exec, const KernelParams& kp, std::span<const double> sv,
                            std::span<const double> coef, double rho,
                            std::span<const double> queries, std::size_t dim,
                            std::span<double> out) {
  if (exec == Exec::parallel)
    omp::decision_values(kp, sv, coef, rho, queries, dim, out);
  else
    serial::decision_values(kp, sv, coef, rho, queries, dim, out);
}

// Threads the parallel kernels will use.
int max_threads();
void set_threads(int n);

}  // namespace kernels
}  // namespace gheur
