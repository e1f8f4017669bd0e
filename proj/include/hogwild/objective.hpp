#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hogwild/dataset.hpp"
#include "hogwild/vectors.hpp"

namespace hogwild {

enum class ObjectiveKind { logistic_l2, least_squares_l2, toy_quadratic };
enum class RegularizationMode { support_weighted, dense };

inline const char* to_string(ObjectiveKind k) {
  switch (k) {
    case ObjectiveKind::logistic_l2: return "logistic_l2";
    case ObjectiveKind::least_squares_l2: return "least_squares_l2";
    case ObjectiveKind::toy_quadratic: return "toy_quadratic";
  }
  return "?";
}

inline const char* to_string(RegularizationMode m) {
  return m == RegularizationMode::support_weighted ? "support_weighted"
                                                   : "dense";
}

// log(1 + exp(a)) without overflow.
inline double softplus(double a) {
  return std::max(a, 0.0) + std::log1p(std::exp(-std::abs(a)));
}

// Finite-sum objective F(w) = (1/n) sum_i f_i(w). The per-sample gradient
// support is fixed (independent of w): the feature support under
// support_weighted regularization, all of [0, d) under dense.
//
// support_weighted gives sample i the regularizer
//   (lambda/2) * sum_{j in supp(x_i)} (n/n_j) w_j^2,
// whose average over i equals (lambda/2)||w||^2 exactly, so per-sample
// gradients stay sparse without biasing F. Coordinates no sample touches
// carry no regularization and sit outside every support.
class Objective {
 public:
  static Objective logistic(Dataset ds, double lambda,
                            RegularizationMode mode =
                                RegularizationMode::support_weighted) {
    return Objective(ObjectiveKind::logistic_l2, std::move(ds), lambda, mode);
  }

  static Objective least_squares(Dataset ds, double lambda,
                                 RegularizationMode mode =
                                     RegularizationMode::dense) {
    return Objective(ObjectiveKind::least_squares_l2, std::move(ds), lambda,
                     mode);
  }

  // d = 1, n = 2: f_0(w) = w^2/2 and f_1(w) = w. Strongly convex mean with
  // realizations that are merely convex.
  static Objective toy_quadratic() {
    return Objective(ObjectiveKind::toy_quadratic, Dataset{}, 0.0,
                     RegularizationMode::support_weighted);
  }

  ObjectiveKind kind() const { return kind_; }
  RegularizationMode regularization_mode() const { return mode_; }
  double lambda() const { return lambda_; }
  const Dataset& dataset() const { return dataset_; }

  std::size_t n() const {
    return kind_ == ObjectiveKind::toy_quadratic ? 2 : dataset_.n();
  }
  Index dim() const {
    return kind_ == ObjectiveKind::toy_quadratic ? 1 : dataset_.d();
  }

  // f_i(w)
  double sample_value(const DenseVector& w, std::size_t i) const;

  // grad f_i(w); support equals sample_support(i).
  SparseVector stochastic_gradient(const DenseVector& w, std::size_t i) const;

  // F(w) and grad F(w), exact finite-sum averages.
  double full_objective(const DenseVector& w) const;
  DenseVector full_gradient(const DenseVector& w) const;

  // Fixed support D of grad f_i, independent of w.
  const std::vector<Index>& sample_support(std::size_t i) const;

  // Loss-part gradient pieces, used by engines to evaluate only the
  // coordinates a filter block touches. loss_coefficient is c such that the
  // loss gradient is c * x_i; the regularizer part is reg_weight(j) * w_j.
  double loss_coefficient(double margin_or_residual, std::size_t i) const;
  double inner_product(const DenseVector& w, std::size_t i) const;
  double reg_weight(Index j) const {
    return reg_weights_.empty() ? 0.0
                                : reg_weights_[static_cast<std::size_t>(j)];
  }

  bool convex_realizations() const { return true; }

 private:
  Objective(ObjectiveKind kind, Dataset ds, double lambda,
            RegularizationMode mode)
      : kind_(kind), dataset_(std::move(ds)), lambda_(lambda), mode_(mode) {
    if (lambda < 0.0) throw std::invalid_argument("objective: lambda < 0");
    if (kind_ == ObjectiveKind::toy_quadratic) {
      toy_support_ = {0};
      return;
    }
    if (dataset_.n() == 0) {
      throw std::invalid_argument("objective: empty dataset");
    }
    const std::size_t d = static_cast<std::size_t>(dataset_.d());
    reg_weights_.assign(d, 0.0);
    if (mode_ == RegularizationMode::dense) {
      for (double& v : reg_weights_) v = lambda_;
      dense_support_.resize(d);
      std::iota(dense_support_.begin(), dense_support_.end(), Index{0});
    } else {
      const double n = static_cast<double>(dataset_.n());
      for (std::size_t j = 0; j < d; ++j) {
        const std::int64_t nj = dataset_.coordinate_counts[j];
        if (nj > 0) reg_weights_[j] = lambda_ * n / static_cast<double>(nj);
      }
    }
  }

  void check_sample(std::size_t i) const {
    if (i >= n()) {
      throw std::out_of_range("objective: sample index " + std::to_string(i) +
                              " outside [0, " + std::to_string(n()) + ")");
    }
  }

  double regularizer_value(const DenseVector& w, std::size_t i) const;

  ObjectiveKind kind_;
  Dataset dataset_;
  double lambda_;
  RegularizationMode mode_;
  std::vector<double> reg_weights_;
  std::vector<Index> dense_support_;
  std::vector<Index> toy_support_;
};

inline double Objective::inner_product(const DenseVector& w,
                                       std::size_t i) const {
  return dot(dataset_.samples[i].features, w);
}

// c with loss gradient = c * x_i, as a function of z = <x_i, w>.
inline double Objective::loss_coefficient(double z, std::size_t i) const {
  const double y = dataset_.samples[i].label;
  if (kind_ == ObjectiveKind::logistic_l2) {
    return -y / (1.0 + std::exp(y * z));
  }
  return 2.0 * (z - y);
}

inline double Objective::regularizer_value(const DenseVector& w,
                                           std::size_t i) const {
  double s = 0.0;
  if (mode_ == RegularizationMode::dense) {
    return 0.5 * lambda_ * norm_sq(w);
  }
  for (Index j : dataset_.samples[i].features.indices) {
    const double wj = w[static_cast<std::size_t>(j)];
    s += reg_weights_[static_cast<std::size_t>(j)] * wj * wj;
  }
  return 0.5 * s;
}

inline double Objective::sample_value(const DenseVector& w,
                                      std::size_t i) const {
  check_sample(i);
  check_dimension(w, static_cast<std::size_t>(dim()), "sample_value");
  if (kind_ == ObjectiveKind::toy_quadratic) {
    return i == 0 ? 0.5 * w[0] * w[0] : w[0];
  }
  const double z = inner_product(w, i);
  const double y = dataset_.samples[i].label;
  const double loss = kind_ == ObjectiveKind::logistic_l2
                          ? softplus(-y * z)
                          : (z - y) * (z - y);
  return loss + regularizer_value(w, i);
}

inline SparseVector Objective::stochastic_gradient(const DenseVector& w,
                                                   std::size_t i) const {
  check_sample(i);
  check_dimension(w, static_cast<std::size_t>(dim()), "stochastic_gradient");
  SparseVector g;
  if (kind_ == ObjectiveKind::toy_quadratic) {
    g.push_back(0, i == 0 ? w[0] : 1.0);
    return g;
  }
  const SparseVector& x = dataset_.samples[i].features;
  const double c = loss_coefficient(inner_product(w, i), i);
  if (mode_ == RegularizationMode::dense) {
    const Index d = dataset_.d();
    g.indices.resize(static_cast<std::size_t>(d));
    g.values.assign(static_cast<std::size_t>(d), 0.0);
    std::iota(g.indices.begin(), g.indices.end(), Index{0});
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      g.values[static_cast<std::size_t>(x.indices[k])] = c * x.values[k];
    }
    for (std::size_t j = 0; j < g.values.size(); ++j) {
      g.values[j] += lambda_ * w[j];
    }
  } else {
    g.indices = x.indices;
    g.values.resize(x.nnz());
    for (std::size_t k = 0; k < x.nnz(); ++k) {
      const std::size_t j = static_cast<std::size_t>(x.indices[k]);
      g.values[k] = c * x.values[k] + reg_weights_[j] * w[j];
    }
  }
  return g;
}

inline double Objective::full_objective(const DenseVector& w) const {
  check_dimension(w, static_cast<std::size_t>(dim()), "full_objective");
  double s = 0.0;
  for (std::size_t i = 0; i < n(); ++i) s += sample_value(w, i);
  return s / static_cast<double>(n());
}

inline DenseVector Objective::full_gradient(const DenseVector& w) const {
  check_dimension(w, static_cast<std::size_t>(dim()), "full_gradient");
  DenseVector g(w.size(), 0.0);
  for (std::size_t i = 0; i < n(); ++i) {
    add_scaled(g, stochastic_gradient(w, i), 1.0);
  }
  const double inv_n = 1.0 / static_cast<double>(n());
  for (double& v : g) v *= inv_n;
  return g;
}

inline const std::vector<Index>& Objective::sample_support(
    std::size_t i) const {
  check_sample(i);
  if (kind_ == ObjectiveKind::toy_quadratic) return toy_support_;
  if (mode_ == RegularizationMode::dense) return dense_support_;
  return dataset_.samples[i].features.indices;
}

// Certified problem constants. kappa = L/mu; N = 2 E||grad f(w*;xi)||^2.
struct ProblemConstants {
  double L = 0.0;
  double mu = 0.0;
  double kappa = 0.0;
  double N = 0.0;
  DenseVector w_star;
  double F_star = 0.0;
  bool convex_realizations = true;
  double solve_tolerance = 0.0;
};

// Conservative (L, mu): a single L valid for every realization, mu a valid
// strong-convexity lower bound for F. Rejects mu = 0.
inline std::pair<double, double> estimate_constants(const Objective& obj) {
  if (obj.kind() == ObjectiveKind::toy_quadratic) return {1.0, 0.5};
  if (obj.lambda() <= 0.0) {
    throw std::invalid_argument(
        "estimate_constants: lambda = 0 gives mu = 0 (F not strongly convex)");
  }
  const Dataset& ds = obj.dataset();
  const double curvature =
      obj.kind() == ObjectiveKind::logistic_l2 ? 0.25 : 2.0;
  double L = 0.0;
  for (const Sample& s : ds.samples) {
    double Li = curvature * norm_sq(s.features);
    if (obj.regularization_mode() == RegularizationMode::dense) {
      Li += obj.lambda();
    } else {
      double wmax = 0.0;
      for (Index j : s.features.indices) {
        wmax = std::max(wmax, obj.reg_weight(j));
      }
      Li += wmax;
    }
    L = std::max(L, Li);
  }
  if (L <= 0.0) {
    throw std::invalid_argument("estimate_constants: all-zero features");
  }
  return {L, obj.lambda()};
}

struct ReferenceSolution {
  DenseVector w_star;
  double F_star = 0.0;
  std::int64_t iterations = 0;
};

// Deterministic full-batch gradient descent with step 1/L from w = 0 until
// ||grad F|| <= tol.
inline ReferenceSolution solve_reference(const Objective& obj, double tol,
                                         std::int64_t max_iterations =
                                             50'000'000) {
  if (tol <= 0.0) throw std::invalid_argument("solve_reference: tol <= 0");
  const auto [L, mu] = estimate_constants(obj);
  (void)mu;
  DenseVector w(static_cast<std::size_t>(obj.dim()), 0.0);
  const double step = 1.0 / L;
  for (std::int64_t it = 0; it < max_iterations; ++it) {
    DenseVector g = obj.full_gradient(w);
    if (std::sqrt(norm_sq(g)) <= tol) {
      const double F = obj.full_objective(w);
      return {std::move(w), F, it};
    }
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= step * g[j];
  }
  throw std::runtime_error(
      "solve_reference: iteration cap exceeded before reaching tolerance");
}

// N = 2 (1/n) sum_i ||grad f_i(w*)||^2, exact finite sum.
inline double compute_variance_constant(const Objective& obj,
                                        const DenseVector& w_star) {
  check_dimension(w_star, static_cast<std::size_t>(obj.dim()),
                  "compute_variance_constant");
  double s = 0.0;
  for (std::size_t i = 0; i < obj.n(); ++i) {
    s += norm_sq(obj.stochastic_gradient(w_star, i));
  }
  return 2.0 * s / static_cast<double>(obj.n());
}

inline ProblemConstants make_problem_constants(const Objective& obj,
                                               double tol = 1e-9) {
  ProblemConstants c;
  std::tie(c.L, c.mu) = estimate_constants(obj);
  c.kappa = c.L / c.mu;
  ReferenceSolution ref = solve_reference(obj, tol);
  c.w_star = std::move(ref.w_star);
  c.F_star = ref.F_star;
  c.N = compute_variance_constant(obj, c.w_star);
  c.convex_realizations = obj.convex_realizations();
  c.solve_tolerance = tol;
  return c;
}

}  // namespace hogwild
