#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "gheur/data.hpp"
#include "gheur/kernels.hpp"

namespace gheur {

struct ClassifierSpec {
  KernelParams kernel;  // gamma <= 0 means 1/d
  double C = 1.0;
  double tol = 1e-3;
  // Iteration budget is max_passes * max(n, 100) SMO steps.
  std::size_t max_passes = 100;
  std::size_t cache_mb = 512;
  // Kernel rows may use the OpenMP kernels; the solver loop itself is serial.
  Exec exec = Exec::serial;

  void validate() const;
};

// Two-class kernel machine: f(x) = sum coef_s K(sv_s, x) - rho. A model
// without support vectors is a constant predictor with value -rho.
class TrainedModel {
 public:
  KernelParams kernel;
  std::size_t dim = 0;
  std::vector<double> support_vectors;  // row-major, positive coefficients first
  std::vector<double> coef;             // alpha_s * y_s
  double rho = 0.0;

  std::size_t sv_count() const { return coef.size(); }
  bool is_constant() const { return coef.empty(); }

  double decision(std::span<const double> x) const;
  int predict(std::span<const double> x) const { return decision(x) >= 0.0 ? 1 : -1; }
  std::vector<double> decision_values(const Dataset& ds, Exec exec = Exec::parallel) const;

  bool operator==(const TrainedModel&) const = default;
};

TrainedModel constant_model(int label, std::size_t dim);

// Solver state exposed for KKT and feasibility checks.
struct SmoTrace {
  std::vector<double> alpha;
  std::size_t iterations = 0;
  bool converged = false;
  double final_gap = 0.0;  // m(alpha) - M(alpha) at exit
};

// C-SVM by SMO with maximal-violating-pair selection and no shrinking.
// Throws when the input holds a single class.
TrainedModel train(const Dataset& ds, const ClassifierSpec& spec, SmoTrace* trace = nullptr);

// Like train(), but a single-class input yields a constant predictor.
TrainedModel train_or_constant(const Dataset& ds, const ClassifierSpec& spec);

std::vector<int> predict(const TrainedModel& model, const Dataset& ds, Exec exec = Exec::parallel);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

// LIBSVM text model format.
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);
std::string model_to_text(const TrainedModel& model);
TrainedModel model_from_text(const std::string& text);

KernelParams resolve_kernel(const KernelParams& kp, std::size_t dim);

}  // namespace gheur
