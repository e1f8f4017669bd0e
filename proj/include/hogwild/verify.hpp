#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hogwild/objective.hpp"
#include "hogwild/partition.hpp"
#include "hogwild/rng.hpp"
#include "hogwild/trace.hpp"

namespace hogwild {

struct CheckFailure {
  std::string context;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

// Outcome of one empirical check. All finite-sum expectations behind these
// checks are exact enumerations, never sampled, so reports are deterministic.
struct VerificationReport {
  std::string check;
  std::string population;
  bool pass = false;
  double worst_margin = 0.0;  // min over the population of rhs - lhs
  std::vector<CheckFailure> failures;
};

// Deterministic probe set: fixed pseudo-random directions scaled to norms
// {0.1, 1, 10, 100, 1000}, plus w* and w0. Large norms matter: the bounds
// are only falsifiable far from the optimum.
inline std::vector<DenseVector> make_probe_points(
    std::size_t dim, const DenseVector& w_star, const DenseVector& w0,
    std::size_t directions_per_norm = 40) {
  static constexpr double kNorms[] = {0.1, 1.0, 10.0, 100.0, 1000.0};
  std::vector<DenseVector> probes;
  probes.reserve(directions_per_norm * 5 + 2);
  probes.push_back(w_star);
  probes.push_back(w0);
  Rng rng(mix_seed(0xbeefcafeULL, dim));
  for (std::size_t k = 0; k < directions_per_norm; ++k) {
    DenseVector dir(dim);
    double nrm = 0.0;
    for (double& v : dir) {
      v = rng.next_normal();
      nrm += v * v;
    }
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) continue;
    for (double norm_target : kNorms) {
      DenseVector p(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        p[j] = dir[j] / nrm * norm_target;
      }
      probes.push_back(std::move(p));
    }
  }
  return probes;
}

namespace detail {

inline VerificationReport second_moment_report(
    const Objective& obj, const ProblemConstants& c,
    std::span<const DenseVector> probes, double smoothness_factor,
    const char* name) {
  VerificationReport rep;
  rep.check = name;
  rep.population = std::to_string(probes.size()) + " probe points, n = " +
                   std::to_string(obj.n());
  rep.pass = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const double inv_n = 1.0 / static_cast<double>(obj.n());
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const DenseVector& w = probes[p];
    double lhs = 0.0;
    for (std::size_t i = 0; i < obj.n(); ++i) {
      lhs += norm_sq(obj.stochastic_gradient(w, i));
    }
    lhs *= inv_n;
    const double rhs =
        4.0 * smoothness_factor * (obj.full_objective(w) - c.F_star) + c.N;
    const double margin = rhs - lhs;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (lhs > rhs + 1e-8 * (1.0 + std::abs(rhs))) {
      rep.pass = false;
      rep.failures.push_back({"probe " + std::to_string(p) + " (|w| = " +
                                  std::to_string(std::sqrt(norm_sq(w))) + ")",
                              lhs, rhs, margin});
    }
  }
  return rep;
}

}  // namespace detail

// E||grad f(w;xi)||^2 <= 4L [F(w) - F*] + N, exact finite-sum check.
// Requires convex realizations; otherwise use the kappa-weakened variant.
inline VerificationReport check_second_moment_bound(
    const Objective& obj, const ProblemConstants& c,
    std::span<const DenseVector> probes) {
  if (!c.convex_realizations) {
    throw std::invalid_argument(
        "check_second_moment_bound: realizations not convex; use "
        "check_second_moment_bound_nonconvex");
  }
  return detail::second_moment_report(obj, c, probes, c.L,
                                      "second-moment-bound");
}

// E||grad f(w;xi)||^2 <= 4 L kappa [F(w) - F*] + N; holds without
// per-realization convexity.
inline VerificationReport check_second_moment_bound_nonconvex(
    const Objective& obj, const ProblemConstants& c,
    std::span<const DenseVector> probes) {
  return detail::second_moment_report(obj, c, probes, c.L * c.kappa,
                                      "second-moment-bound-nonconvex");
}

// scale * (uniform average of block indicators) must equal the support
// indicator exactly, per sample. Pure counting, zero tolerance.
inline VerificationReport check_filter_unbiased(const FilterPartition& p,
                                                const Objective& obj) {
  VerificationReport rep;
  rep.check = "filter-unbiased";
  rep.population = std::to_string(p.sample_count()) + " samples, D = " +
                   std::to_string(p.num_blocks_parameter());
  rep.pass = true;
  rep.worst_margin = 0.0;
  for (std::size_t i = 0; i < p.sample_count(); ++i) {
    std::vector<Index> covered;
    for (int u = 0; u < p.block_count(i); ++u) {
      const auto blk = p.block(i, u);
      covered.insert(covered.end(), blk.begin(), blk.end());
    }
    std::sort(covered.begin(), covered.end());
    std::vector<Index> support = obj.sample_support(i);
    std::sort(support.begin(), support.end());
    const bool exact_cover =
        covered == support &&
        std::adjacent_find(covered.begin(), covered.end()) == covered.end();
    if (!exact_cover) {
      rep.pass = false;
      rep.worst_margin = -1.0;
      rep.failures.push_back({"sample " + std::to_string(i) +
                                  ": blocks do not partition the support",
                              0.0, 0.0, -1.0});
    }
  }
  return rep;
}

// E|<grad f(w1;xi1), grad f(w2;xi2)>| over independent uniform (xi1, xi2)
// against (sqrt(collision)/2)(E||grad f(w1)||^2 + E||grad f(w2)||^2),
// enumerated over all n^2 pairs.
inline VerificationReport check_collision_inequality(
    const Objective& obj, double collision_probability,
    std::span<const std::pair<DenseVector, DenseVector>> pairs) {
  VerificationReport rep;
  rep.check = "collision-inequality";
  rep.population = std::to_string(pairs.size()) + " point pairs, n^2 = " +
                   std::to_string(obj.n() * obj.n()) + " sample pairs each";
  rep.pass = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const std::size_t n = obj.n();
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::vector<SparseVector> g1(n), g2(n);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g1[i] = obj.stochastic_gradient(pairs[p].first, i);
      g2[i] = obj.stochastic_gradient(pairs[p].second, i);
      m1 += norm_sq(g1[i]);
      m2 += norm_sq(g2[i]);
    }
    m1 *= inv_n;
    m2 *= inv_n;
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        lhs += std::abs(dot(g1[i], g2[j]));
      }
    }
    lhs *= inv_n * inv_n;
    const double rhs =
        0.5 * std::sqrt(collision_probability) * (m1 + m2);
    const double margin = rhs - lhs;
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (lhs > rhs + 1e-12 * (1.0 + std::abs(rhs))) {
      rep.pass = false;
      rep.failures.push_back({"pair " + std::to_string(p), lhs, rhs, margin});
    }
  }
  return rep;
}

struct SlopeFit {
  double slope = 0.0;
  std::size_t points_used = 0;
  std::size_t excluded_nonpositive = 0;
};

// Least-squares slope of log(squared_distance) against log(t) (or log(t'))
// over the last tail_fraction of checkpoints of the seed-averaged curve.
inline SlopeFit fit_rate_slope(const std::vector<Trace>& traces,
                               double tail_fraction,
                               bool against_coordinate_time = false) {
  if (traces.empty()) {
    throw std::invalid_argument("fit_rate_slope: no traces");
  }
  if (tail_fraction <= 0.0 || tail_fraction > 1.0) {
    throw std::invalid_argument("fit_rate_slope: tail_fraction not in (0,1]");
  }
  const Trace avg = traces.size() == 1 ? traces.front() : average_traces(traces);
  const std::size_t k = avg.checkpoints.size();
  const std::size_t tail =
      static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(k)));
  const std::size_t begin = k - tail;
  SlopeFit fit;
  std::vector<double> xs, ys;
  for (std::size_t c = begin; c < k; ++c) {
    const Checkpoint& cp = avg.checkpoints[c];
    const double x = against_coordinate_time ? cp.t_prime
                                             : static_cast<double>(cp.t);
    if (x <= 0.0) continue;
    if (cp.squared_distance <= 0.0) {
      ++fit.excluded_nonpositive;
      continue;
    }
    xs.push_back(std::log(x));
    ys.push_back(std::log(cp.squared_distance));
  }
  if (xs.size() < 10) {
    throw std::invalid_argument(
        "fit_rate_slope: need >= 10 usable checkpoints in the tail window, "
        "have " + std::to_string(xs.size()));
  }
  const double m = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t c = 0; c < xs.size(); ++c) {
    sx += xs[c];
    sy += ys[c];
    sxx += xs[c] * xs[c];
    sxy += xs[c] * ys[c];
  }
  fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  fit.points_used = xs.size();
  return fit;
}

// Seed-mean squared distance minus three standard errors must stay below the
// envelope at every checkpoint t >= from_t. The envelopes bound a true
// expectation; the slack absorbs Monte-Carlo fluctuation of the mean.
inline VerificationReport check_envelope_domination(
    const std::vector<Trace>& per_seed,
    const std::function<double(std::int64_t)>& envelope, std::int64_t from_t) {
  if (per_seed.size() < 10) {
    throw std::invalid_argument(
        "check_envelope_domination: need >= 10 seeds");
  }
  VerificationReport rep;
  rep.check = "envelope-domination";
  rep.population = std::to_string(per_seed.size()) + " seeds, t >= " +
                   std::to_string(from_t);
  rep.pass = true;
  rep.worst_margin = std::numeric_limits<double>::infinity();
  const std::size_t k = per_seed.front().checkpoints.size();
  for (const Trace& tr : per_seed) {
    if (tr.checkpoints.size() != k) {
      throw std::invalid_argument(
          "check_envelope_domination: checkpoint grids differ");
    }
  }
  const double S = static_cast<double>(per_seed.size());
  for (std::size_t c = 0; c < k; ++c) {
    const std::int64_t t = per_seed.front().checkpoints[c].t;
    if (t < from_t) continue;
    double mean = 0.0;
    for (const Trace& tr : per_seed) {
      mean += tr.checkpoints[c].squared_distance;
    }
    mean /= S;
    double var = 0.0;
    for (const Trace& tr : per_seed) {
      const double dev = tr.checkpoints[c].squared_distance - mean;
      var += dev * dev;
    }
    var /= (S - 1.0);
    const double se = std::sqrt(var / S);
    const double bound = envelope(t);
    const double margin = bound - (mean - 3.0 * se);
    rep.worst_margin = std::min(rep.worst_margin, margin);
    if (margin < 0.0) {
      rep.pass = false;
      rep.failures.push_back({"t = " + std::to_string(t), mean - 3.0 * se,
                              bound, margin});
    }
  }
  return rep;
}

}  // namespace hogwild
