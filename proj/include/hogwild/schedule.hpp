#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

#include "hogwild/objective.hpp"

namespace hogwild {

// Step-size rules t -> eta_t, all certified by the convergence analysis:
//   sgd_convex         eta_t = 2/(mu(t+E)),   E = 4L/mu,      eta_0 = 1/(2L)
//   sgd_nonconvex      eta_t = 2/(mu(t+E)),   E = 4L kappa/mu, eta_0 = 1/(2L kappa)
//   hogwild            eta_t = alpha_t/(mu(t+E)), alpha_t in [4, alpha],
//                      E = max{2 tau, 4 L alpha D / mu}
//   hogwild_nonconvex  as hogwild with E = max{2 tau, 4 L kappa alpha D / mu}
//   exp_period         eta_t = 4/(mu 2^h) for t+E in [2^h, 2^{h+1});
//                      realizes alpha_t = 4(t+E)/2^h in [4, 8), alpha = 8
//   custom_diminishing eta_t = alpha/(mu(t+E)) with caller-supplied E
//   constant           eta_t = eta forever (fails the summability condition;
//                      kept so the condition validator can demonstrate that)
enum class ScheduleKind {
  sgd_convex,
  sgd_nonconvex,
  hogwild,
  hogwild_nonconvex,
  exp_period,
  custom_diminishing,
  constant,
};

inline const char* to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::sgd_convex: return "sgd_convex";
    case ScheduleKind::sgd_nonconvex: return "sgd_nonconvex";
    case ScheduleKind::hogwild: return "hogwild";
    case ScheduleKind::hogwild_nonconvex: return "hogwild_nonconvex";
    case ScheduleKind::exp_period: return "exp_period";
    case ScheduleKind::custom_diminishing: return "custom_diminishing";
    case ScheduleKind::constant: return "constant";
  }
  return "?";
}

inline ScheduleKind schedule_kind_from_string(const std::string& s) {
  if (s == "sgd_convex" || s == "sgd") return ScheduleKind::sgd_convex;
  if (s == "sgd_nonconvex") return ScheduleKind::sgd_nonconvex;
  if (s == "hogwild") return ScheduleKind::hogwild;
  if (s == "hogwild_nonconvex") return ScheduleKind::hogwild_nonconvex;
  if (s == "exp_period") return ScheduleKind::exp_period;
  if (s == "custom_diminishing") return ScheduleKind::custom_diminishing;
  if (s == "constant") return ScheduleKind::constant;
  throw std::invalid_argument("unknown schedule kind: " + s);
}

// Exact floor(log2(x)) for x > 0, robust at exact powers of two.
inline int floor_log2(double x) {
  int e;
  std::frexp(x, &e);  // x = m * 2^e with m in [0.5, 1)
  return e - 1;
}

struct StepSchedule {
  ScheduleKind kind = ScheduleKind::sgd_convex;
  double alpha = 2.0;    // envelope value plugged into E and the bounds
  double alpha_t = 2.0;  // constant alpha_t used by diminishing kinds
  double E = 0.0;
  double mu = 0.0;
  double L = 0.0;
  double kappa = 1.0;
  int D = 1;
  int tau = 0;

  double step(std::int64_t t) const {
    if (t < 0) throw std::invalid_argument("step: t < 0");
    switch (kind) {
      case ScheduleKind::constant:
        return alpha;  // alpha holds the constant step
      case ScheduleKind::exp_period: {
        const int h = floor_log2(static_cast<double>(t) + E);
        return 4.0 / (mu * std::ldexp(1.0, h));
      }
      default:
        return alpha_t / (mu * (static_cast<double>(t) + E));
    }
  }

  // alpha_t realized at t: eta_t * mu * (t+E). For exp_period this lies in
  // [4, 8) by construction.
  double implied_alpha_t(std::int64_t t) const {
    return step(t) * mu * (static_cast<double>(t) + E);
  }

  static StepSchedule constant_step(double eta, double mu, double L,
                                    double kappa) {
    StepSchedule s;
    s.kind = ScheduleKind::constant;
    s.alpha = eta;
    s.alpha_t = eta;
    s.mu = mu;
    s.L = L;
    s.kappa = kappa;
    return s;
  }
};

// Builds the certified schedule of the given kind. alpha is validated
// against the kind's legal range; pass alpha = 0 to take the kind's default.
// For the delayed-recursion kinds alpha_t picks the constant numerator in
// [4, alpha] (default 4; the growing-delay regime wants 12).
inline StepSchedule make_schedule(ScheduleKind kind,
                                  const ProblemConstants& c, int tau, int D,
                                  double alpha = 0.0,
                                  double custom_E = 0.0,
                                  double alpha_t = 0.0) {
  if (c.mu <= 0.0 || c.L <= 0.0) {
    throw std::invalid_argument("make_schedule: need mu > 0 and L > 0");
  }
  if (tau < 0) throw std::invalid_argument("make_schedule: tau < 0");
  if (D < 1) throw std::invalid_argument("make_schedule: D < 1");
  StepSchedule s;
  s.kind = kind;
  s.mu = c.mu;
  s.L = c.L;
  s.kappa = c.kappa;
  s.D = D;
  s.tau = tau;
  switch (kind) {
    case ScheduleKind::sgd_convex:
    case ScheduleKind::sgd_nonconvex: {
      if (alpha == 0.0) alpha = 2.0;
      if (alpha != 2.0) {
        throw std::invalid_argument("make_schedule: sgd kinds fix alpha = 2");
      }
      if (alpha_t != 0.0 && alpha_t != 2.0) {
        throw std::invalid_argument("make_schedule: sgd kinds fix alpha_t = 2");
      }
      const double Leff =
          kind == ScheduleKind::sgd_nonconvex ? c.L * c.kappa : c.L;
      s.alpha = 2.0;
      s.alpha_t = 2.0;
      s.E = 2.0 * s.alpha * Leff / c.mu;
      break;
    }
    case ScheduleKind::hogwild:
    case ScheduleKind::hogwild_nonconvex: {
      if (alpha == 0.0) alpha = 4.0;
      if (alpha < 4.0) {
        throw std::invalid_argument(
            "make_schedule: hogwild kinds need alpha >= 4");
      }
      const double Leff =
          kind == ScheduleKind::hogwild_nonconvex ? c.L * c.kappa : c.L;
      if (alpha_t == 0.0) alpha_t = 4.0;
      if (alpha_t < 4.0 || alpha_t > alpha) {
        throw std::invalid_argument(
            "make_schedule: alpha_t must lie in [4, alpha]");
      }
      s.alpha = alpha;
      s.alpha_t = alpha_t;
      s.E = std::max(2.0 * tau, 4.0 * Leff * alpha * D / c.mu);
      break;
    }
    case ScheduleKind::exp_period: {
      if (alpha != 0.0 && alpha != 8.0) {
        throw std::invalid_argument("make_schedule: exp_period fixes alpha = 8");
      }
      if (alpha_t != 0.0 && alpha_t != 4.0) {
        throw std::invalid_argument(
            "make_schedule: exp_period derives alpha_t from the period rule");
      }
      s.alpha = 8.0;
      s.alpha_t = 4.0;
      s.E = std::max(2.0 * tau, 4.0 * c.L * 8.0 * D / c.mu);
      break;
    }
    case ScheduleKind::custom_diminishing: {
      if (alpha <= 0.0 || custom_E <= 0.0) {
        throw std::invalid_argument(
            "make_schedule: custom_diminishing needs alpha > 0 and E > 0");
      }
      if (alpha_t != 0.0 && alpha_t != alpha) {
        throw std::invalid_argument(
            "make_schedule: custom_diminishing uses alpha_t = alpha");
      }
      s.alpha = alpha;
      s.alpha_t = alpha;
      s.E = custom_E;
      break;
    }
    case ScheduleKind::constant:
      throw std::invalid_argument(
          "make_schedule: use StepSchedule::constant_step");
  }
  return s;
}

// Almost-sure convergence needs eta_t <= 1/(2L) (or 1/(2 L kappa) without
// per-realization convexity), a divergent step sum, and a summable squared
// sum. The series facts are classified analytically per kind; the step bound
// is checked on [0, horizon].
struct ConditionReport {
  bool step_bound_ok = true;
  std::int64_t first_violation_t = -1;
  double step_bound = 0.0;
  bool sum_diverges = false;
  bool sum_sq_converges = false;

  bool pass() const { return step_bound_ok && sum_diverges && sum_sq_converges; }
};

inline ConditionReport validate_sufficient_conditions(
    const StepSchedule& s, const ProblemConstants& c, std::int64_t horizon,
    bool nonconvex = false) {
  if (horizon < 1) {
    throw std::invalid_argument("validate_sufficient_conditions: horizon < 1");
  }
  ConditionReport r;
  r.step_bound = nonconvex ? 1.0 / (2.0 * c.L * c.kappa) : 1.0 / (2.0 * c.L);
  for (std::int64_t t = 0; t <= horizon; ++t) {
    const double eta = s.step(t);
    if (!(eta > 0.0) || eta > r.step_bound) {
      r.step_bound_ok = false;
      r.first_violation_t = t;
      break;
    }
  }
  // alpha/(mu(t+E)) is harmonic-like: divergent sum, summable squares. The
  // exp_period steps are sandwiched between two such schedules. A constant
  // step has a divergent squared sum.
  r.sum_diverges = true;
  r.sum_sq_converges = s.kind != ScheduleKind::constant;
  return r;
}

// Iteration thresholds attached to the certified bounds.
//   burn_in:               T, the iterate count before the plain-SGD bound
//                          4 alpha^2 N / mu^2 / (t - T + E) applies
//   delay_dominated_after: T0, past which terms carrying tau(t) are below
//                          the leading term (growing-delay regime)
//   init_dominated_after:  T1, past which the ||w0 - w*||^2 term is below
//                          the leading term
struct BoundThresholds {
  double burn_in = 0.0;
  double delay_dominated_after = 0.0;
  double init_dominated_after = 0.0;
  double leading_constant = 0.0;  // 4 alpha^2 D N / mu^2
  bool variance_zero = false;     // N = 0: burn_in and init threshold forced 0
  std::function<double(std::int64_t)> envelope;
};

inline BoundThresholds thresholds(const ProblemConstants& c, double alpha,
                                  int D, const DenseVector& w0,
                                  double collision_probability,
                                  bool nonconvex = false) {
  if (collision_probability <= 0.0 || collision_probability > 1.0) {
    throw std::invalid_argument("thresholds: collision probability not in (0,1]");
  }
  check_dimension(w0, c.w_star.size(), "thresholds");
  BoundThresholds b;
  const double Leff = nonconvex ? c.L * c.kappa : c.L;
  const double dist0 = distance_sq(w0, c.w_star);
  b.variance_zero = c.N <= 0.0;
  if (!b.variance_zero) {
    const double inner = std::max(Leff * c.mu * dist0 / c.N, 1.0);
    b.burn_in = std::max(0.0, 4.0 * Leff / c.mu * inner - 4.0 * Leff / c.mu);
    b.init_dominated_after =
        c.mu * c.mu * dist0 / (alpha * alpha * c.N * static_cast<double>(D));
  }
  b.delay_dominated_after = std::exp(
      2.0 * std::sqrt(collision_probability) * (1.0 + (c.L + c.mu) * alpha / c.mu));
  b.leading_constant =
      4.0 * alpha * alpha * static_cast<double>(D) * c.N / (c.mu * c.mu);
  const double E = 2.0 * alpha * Leff / c.mu;
  const double T = b.burn_in;
  const double num = 4.0 * alpha * alpha * c.N / (c.mu * c.mu);
  b.envelope = [num, T, E](std::int64_t t) {
    return num / (static_cast<double>(t) - T + E);
  };
  return b;
}

// Certified upper bound on E||w_t - w*||^2 for plain SGD with the
// diminishing schedule (alpha = 2). Defined for t >= burn_in.
inline double sgd_envelope(const ProblemConstants& c, double alpha,
                           double burn_in, std::int64_t t,
                           bool nonconvex = false) {
  if (static_cast<double>(t) < burn_in) {
    throw std::invalid_argument("sgd_envelope: t < burn-in threshold");
  }
  const double Leff = nonconvex ? c.L * c.kappa : c.L;
  const double E = 2.0 * alpha * Leff / c.mu;
  return 4.0 * alpha * alpha * c.N / (c.mu * c.mu) /
         (static_cast<double>(t) - burn_in + E);
}

// Leading term of the delayed/filtered recursion bound,
// 4 alpha^2 D N / mu^2 * t / (t + E - 1)^2. The ln(t)/(t+E-1)^2 remainder
// carries an unspecified constant; see hogwild_remainder_shape.
inline double hogwild_envelope(const ProblemConstants& c, double alpha, int D,
                               double E, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("hogwild_envelope: t < 1");
  const double td = static_cast<double>(t);
  const double denom = (td + E - 1.0) * (td + E - 1.0);
  return 4.0 * alpha * alpha * static_cast<double>(D) * c.N / (c.mu * c.mu) *
         td / denom;
}

// Same bound against t' = t * padded_support / D, the expected
// single-coordinate update count: 4 alpha^2 padded_support N / mu^2 / t'.
inline double hogwild_envelope_coordinate_time(const ProblemConstants& c,
                                               double alpha,
                                               double padded_support,
                                               double t_prime) {
  if (t_prime <= 0.0) {
    throw std::invalid_argument("hogwild_envelope_coordinate_time: t' <= 0");
  }
  return 4.0 * alpha * alpha * padded_support * c.N / (c.mu * c.mu) / t_prime;
}

// Shape of the non-leading remainder, ln(t)/(t+E-1)^2, with unit constant.
// Not certified: the analysis does not pin the constant.
inline double hogwild_remainder_shape(double E, std::int64_t t) {
  const double td = static_cast<double>(t);
  return std::log(std::max(td, 1.0)) / ((td + E - 1.0) * (td + E - 1.0));
}

// Largest admissible growing delay at iteration t:
// sqrt(t * (1/ln t - 1/(ln t)^2)). Positive only for ln t > 1.
inline double tau_growth_cap(double t) {
  if (t <= 2.0) {
    throw std::invalid_argument("tau_growth_cap: requires t >= 3 (ln t > 1)");
  }
  const double lt = std::log(t);
  return std::sqrt(t * (1.0 / lt - 1.0 / (lt * lt)));
}

}  // namespace hogwild
