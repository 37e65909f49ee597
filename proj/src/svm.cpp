#include "gheur/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <list>
#include <sstream>
#include <unordered_map>

namespace gheur {

namespace {

constexpr double kTau = 1e-12;

// Least-recently-used cache of kernel matrix rows.
class RowCache {
 public:
  RowCache(const Dataset& ds, const KernelParams& kp, Exec exec, std::size_t budget_bytes)
      : ds_(ds), kp_(kp), exec_(exec) {
    const std::size_t row_bytes = std::max<std::size_t>(1, ds.size()) * sizeof(double);
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  const std::vector<double>& row(std::size_t i) {
    auto it = index_.find(i);
    if (it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    std::vector<double> data;
    if (lru_.size() >= capacity_) {
      auto& victim = lru_.back();
      index_.erase(victim.first);
      data = std::move(victim.second);
      lru_.pop_back();
    }
    data.resize(ds_.size());
    kernels::kernel_row(exec_, kp_, ds_.features(i), ds_.values(), ds_.dim(), data);
    lru_.emplace_front(i, std::move(data));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const Dataset& ds_;
  KernelParams kp_;
  Exec exec_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::vector<double>>>::iterator>
      index_;
};

const char* kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::linear: return "linear";
    case KernelKind::polynomial: return "polynomial";
    case KernelKind::rbf: return "rbf";
  }
  return "linear";
}

}  // namespace

void ClassifierSpec::validate() const {
  if (!(C > 0.0)) throw Error("C must be positive");
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (max_passes == 0) throw Error("max_passes must be positive");
  if (kernel.kind == KernelKind::polynomial && kernel.degree < 1)
    throw Error("polynomial degree must be at least 1");
}

KernelParams resolve_kernel(const KernelParams& kp, std::size_t dim) {
  KernelParams out = kp;
  if (out.gamma <= 0.0) out.gamma = dim > 0 ? 1.0 / static_cast<double>(dim) : 1.0;
  // Parameters the kernel ignores go back to their defaults, as a saved model would.
  const KernelParams defaults;
  if (out.kind != KernelKind::polynomial) {
    out.coef0 = defaults.coef0;
    out.degree = defaults.degree;
  }
  if (out.kind == KernelKind::linear) out.gamma = defaults.gamma;
  return out;
}

double TrainedModel::decision(std::span<const double> x) const {
  double out = 0.0;
  kernels::serial::decision_values(kernel, support_vectors, coef, rho, x, x.size(), {&out, 1});
  return out;
}

std::vector<double> TrainedModel::decision_values(const Dataset& ds, Exec exec) const {
  if (!is_constant() && ds.dim() != dim)
    throw Error("dimension mismatch: model has " + std::to_string(dim) + " features, data has " +
                std::to_string(ds.dim()));
  std::vector<double> out(ds.size());
  kernels::decision_values(exec, kernel, support_vectors, coef, rho, ds.values(), ds.dim(), out);
  return out;
}

TrainedModel constant_model(int label, std::size_t dim) {
  TrainedModel m;
  m.dim = dim;
  m.rho = label > 0 ? -1.0 : 1.0;
  return m;
}

TrainedModel train(const Dataset& ds, const ClassifierSpec& spec, SmoTrace* trace) {
  spec.validate();
  const std::size_t n = ds.size();
  const auto counts = ds.class_counts();
  if (counts[0] == 0 || counts[1] == 0)
    throw Error("training set holds a single class");

  const KernelParams kp = resolve_kernel(spec.kernel, ds.dim());
  const double C = spec.C;
  std::vector<double> y(n), alpha(n, 0.0), grad(n, -1.0), diag(n);
  for (std::size_t t = 0; t < n; ++t) {
    y[t] = ds.target(t);
    diag[t] = kernels::kernel_value(kp, ds.features(t), ds.features(t));
  }
  RowCache cache(ds, kp, spec.exec, spec.cache_mb << 20);

  const std::size_t max_iter = spec.max_passes * std::max<std::size_t>(n, 100);
  std::size_t iter = 0;
  bool converged = false;
  double gap = 0.0;
  std::vector<double> ki_copy;
  while (true) {
    // Maximal violating pair; ties go to the lowest index.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool up = y[t] > 0 ? alpha[t] < C : alpha[t] > 0.0;
      const bool low = y[t] > 0 ? alpha[t] > 0.0 : alpha[t] < C;
      if (up && v > gmax) {
        gmax = v;
        i = t;
      }
      if (low && v < gmin) {
        gmin = v;
        j = t;
      }
    }
    gap = gmax - gmin;
    if (i == n || j == n || gap < spec.tol) {
      converged = true;
      break;
    }
    if (iter >= max_iter) break;
    ++iter;

    ki_copy = cache.row(i);
    const std::vector<double>& kj = cache.row(j);
    const std::vector<double>& ki = ki_copy;
    const double old_ai = alpha[i], old_aj = alpha[j];
    const double qij = y[i] * y[j] * ki[j];

    if (y[i] != y[j]) {
      double quad = diag[i] + diag[j] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      double quad = diag[i] + diag[j] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = (alpha[i] - old_ai) * y[i];
    const double dj = (alpha[j] - old_aj) * y[j];
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (ki[t] * di + kj[t] * dj);
  }

  // Bias from free vectors, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= C) {
      if (y[t] < 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else if (alpha[t] <= 0.0) {
      if (y[t] > 0)
        ub = std::min(ub, yg);
      else
        lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }

  TrainedModel m;
  m.kernel = kp;
  m.dim = ds.dim();
  m.rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  for (int cls : {1, -1}) {
    for (std::size_t t = 0; t < n; ++t) {
      if (alpha[t] <= 0.0 || ds.target(t) != cls) continue;
      m.coef.push_back(alpha[t] * y[t]);
      auto f = ds.features(t);
      m.support_vectors.insert(m.support_vectors.end(), f.begin(), f.end());
    }
  }

  if (trace) {
    trace->alpha = std::move(alpha);
    trace->iterations = iter;
    trace->converged = converged;
    trace->final_gap = gap;
  }
  return m;
}

TrainedModel train_or_constant(const Dataset& ds, const ClassifierSpec& spec) {
  if (ds.empty()) throw Error("cannot train on an empty set");
  const auto counts = ds.class_counts();
  if (counts[0] == 0) return constant_model(1, ds.dim());
  if (counts[1] == 0) return constant_model(-1, ds.dim());
  return train(ds, spec);
}

std::vector<int> predict(const TrainedModel& model, const Dataset& ds, Exec exec) {
  const auto f = model.decision_values(ds, exec);
  std::vector<int> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i] >= 0.0 ? 1 : -1;
  return out;
}

double accuracy(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw Error("accuracy: length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += predicted[i] == truth[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::string model_to_text(const TrainedModel& m) {
  std::ostringstream os;
  os << "svm_type c_svc\n";
  os << "kernel_type " << kernel_name(m.kernel.kind) << "\n";
  if (m.kernel.kind == KernelKind::polynomial) os << "degree " << m.kernel.degree << "\n";
  if (m.kernel.kind != KernelKind::linear) os << "gamma " << format_double(m.kernel.gamma) << "\n";
  if (m.kernel.kind == KernelKind::polynomial) os << "coef0 " << format_double(m.kernel.coef0) << "\n";
  std::size_t n_pos = 0;
  for (double c : m.coef) n_pos += c > 0.0;
  os << "nr_class 2\n";
  os << "total_sv " << m.sv_count() << "\n";
  os << "rho " << format_double(m.rho) << "\n";
  os << "label 1 -1\n";
  os << "nr_sv " << n_pos << " " << m.sv_count() - n_pos << "\n";
  os << "SV\n";
  for (std::size_t s = 0; s < m.sv_count(); ++s) {
    os << format_double(m.coef[s]);
    for (std::size_t k = 0; k < m.dim; ++k)
      os << " " << k + 1 << ":" << format_double(m.support_vectors[s * m.dim + k]);
    os << "\n";
  }
  return os.str();
}

TrainedModel model_from_text(const std::string& text) {
  std::istringstream is(text);
  TrainedModel m;
  std::string line;
  std::size_t total_sv = 0;
  bool have_rho = false, in_sv = false;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t max_index = 0;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw ParseError("model parse error at line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (in_sv) {
      double c;
      if (!(ls >> c)) fail("bad coefficient");
      m.coef.push_back(c);
      rows.emplace_back();
      std::string tok;
      while (ls >> tok) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) fail("bad feature '" + tok + "'");
        std::size_t idx = 0;
        double v = 0.0;
        try {
          idx = std::stoul(tok.substr(0, colon));
          v = std::stod(tok.substr(colon + 1));
        } catch (const std::exception&) {
          fail("bad feature '" + tok + "'");
        }
        if (idx == 0) fail("feature index must be positive");
        rows.back().emplace_back(idx, v);
        max_index = std::max(max_index, idx);
      }
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "svm_type") {
      std::string v;
      ls >> v;
      if (v != "c_svc") throw UnsupportedError("unsupported svm_type " + v);
    } else if (key == "kernel_type") {
      std::string v;
      ls >> v;
      if (v == "linear")
        m.kernel.kind = KernelKind::linear;
      else if (v == "polynomial")
        m.kernel.kind = KernelKind::polynomial;
      else if (v == "rbf")
        m.kernel.kind = KernelKind::rbf;
      else
        throw UnsupportedError("unsupported kernel_type " + v);
    } else if (key == "degree") {
      ls >> m.kernel.degree;
    } else if (key == "gamma") {
      ls >> m.kernel.gamma;
    } else if (key == "coef0") {
      ls >> m.kernel.coef0;
    } else if (key == "nr_class") {
      int k = 0;
      ls >> k;
      if (k != 2) throw UnsupportedError("only two-class models are supported");
    } else if (key == "total_sv") {
      ls >> total_sv;
    } else if (key == "rho") {
      if (!(ls >> m.rho)) fail("bad rho");
      have_rho = true;
    } else if (key == "label") {
      int a = 0, b = 0;
      ls >> a >> b;
      if (a != 1 || b != -1) throw UnsupportedError("labels must be listed as 1 -1");
    } else if (key == "nr_sv" || key == "probA" || key == "probB") {
    } else if (key == "SV") {
      in_sv = true;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_rho) throw ParseError("model parse error: missing rho");
  if (m.coef.size() != total_sv) throw ParseError("model parse error: total_sv does not match SV lines");
  m.dim = max_index;
  m.support_vectors.assign(m.coef.size() * m.dim, 0.0);
  for (std::size_t s = 0; s < rows.size(); ++s)
    for (auto [idx, v] : rows[s]) m.support_vectors[s * m.dim + idx - 1] = v;
  return m;
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << model_to_text(model);
  if (!out) throw Error("write failed for " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_text(ss.str());
}

}  // namespace gheur
