#include <catch2/catch.hpp>

#include <cmath>

#include "hogwild/data_io.hpp"
#include "hogwild/driver.hpp"
#include "hogwild/verify.hpp"

using namespace hogwild;

namespace {

ProblemConstants toy_constants() {
  ProblemConstants c;
  c.L = 1.0;
  c.mu = 0.5;
  c.kappa = 2.0;
  c.N = 2.0;
  c.w_star = {-1.0};
  c.F_star = -0.25;
  c.convex_realizations = true;
  return c;
}

}  // namespace

TEST_CASE("second-moment bound on the toy problem") {
  const Objective toy = Objective::toy_quadratic();
  const ProblemConstants c = toy_constants();

  SECTION("worked margins") {
    std::vector<DenseVector> probes{{0.0}, {-1.0}};
    const VerificationReport rep =
        check_second_moment_bound(toy, c, probes);
    CHECK(rep.pass);
    // at w = 0: lhs = 1/2, rhs = 4*1*(0.25) + 2 = 3, margin 2.5;
    // at w = w*: lhs = N/2 = 1 <= rhs = N = 2, margin 1
    CHECK(rep.worst_margin == Approx(1.0));
  }

  SECTION("kappa-weakened variant has larger margins") {
    std::vector<DenseVector> probes{{0.0}};
    const VerificationReport strong =
        check_second_moment_bound(toy, c, probes);
    const VerificationReport weak =
        check_second_moment_bound_nonconvex(toy, c, probes);
    CHECK(weak.pass);
    // rhs = 4 L kappa (F - F*) + N = 4*1*2*0.25 + 2 = 4 versus lhs = 0.5
    CHECK(weak.worst_margin == Approx(3.5));
    CHECK(weak.worst_margin >= strong.worst_margin);
  }

  SECTION("nonconvex realizations are routed to the weakened check") {
    ProblemConstants nc = c;
    nc.convex_realizations = false;
    std::vector<DenseVector> probes{{0.0}};
    CHECK_THROWS_AS(check_second_moment_bound(toy, nc, probes),
                    std::invalid_argument);
    CHECK(check_second_moment_bound_nonconvex(toy, nc, probes).pass);
  }
}

TEST_CASE("second-moment bound across the probe grid on synthetic logistic") {
  SyntheticSpec spec;
  spec.n = 120;
  spec.d = 16;
  spec.support_size = 4;
  spec.noise_p = 0.1;
  spec.seed = 9;
  const Objective obj =
      Objective::logistic(generate_synthetic(spec), 1.0 / 120.0);
  const ProblemConstants c = make_problem_constants(obj, 1e-9);
  const std::vector<DenseVector> probes = make_probe_points(
      16, c.w_star, DenseVector(16, 0.0), 10);
  const VerificationReport rep = check_second_moment_bound(obj, c, probes);
  CHECK(rep.pass);
  CHECK(rep.failures.empty());

  SECTION("an understated L is falsified at large-norm probes") {
    ProblemConstants corrupted = c;
    corrupted.L *= 0.002;
    const VerificationReport bad =
        check_second_moment_bound(obj, corrupted, probes);
    CHECK_FALSE(bad.pass);
    CHECK(bad.worst_margin < 0.0);
  }
}

TEST_CASE("filter unbiasedness report") {
  SyntheticSpec spec;
  spec.n = 40;
  spec.d = 12;
  spec.support_size = 5;
  spec.noise_p = 0.0;
  spec.seed = 2;
  const Objective obj =
      Objective::logistic(generate_synthetic(spec), 0.025);
  for (int D : {1, 2, 3, 5}) {
    const FilterPartition p = FilterPartition::build(obj, D, 77);
    const VerificationReport rep = check_filter_unbiased(p, obj);
    CHECK(rep.pass);
    CHECK(rep.worst_margin == 0.0);
  }
}

TEST_CASE("collision inequality") {
  SECTION("scalar problem reduces to the arithmetic-geometric mean bound") {
    const Objective toy = Objective::toy_quadratic();
    std::vector<std::pair<DenseVector, DenseVector>> pairs{
        {{0.5}, {-2.0}}, {{1.0}, {1.0}}};
    const VerificationReport rep =
        check_collision_inequality(toy, 1.0, pairs);
    CHECK(rep.pass);
  }

  SECTION("disjoint supports get credit from a small collision probability") {
    // four samples on disjoint coordinates: collision = 1/4
    std::vector<Sample> samples(4);
    for (Index i = 0; i < 4; ++i) {
      samples[static_cast<std::size_t>(i)].features.push_back(i, 1.0 + i);
      samples[static_cast<std::size_t>(i)].label = i % 2 ? 1.0 : -1.0;
    }
    const Objective obj =
        Objective::least_squares(Dataset::build(std::move(samples), 4), 0.0,
                                 RegularizationMode::support_weighted);
    const double delta = sparsity_stats(obj, 1).collision_probability;
    CHECK(delta == Approx(0.25));
    Rng rng(5);
    std::vector<std::pair<DenseVector, DenseVector>> pairs;
    for (int k = 0; k < 4; ++k) {
      DenseVector a(4), b(4);
      for (double& v : a) v = rng.next_normal();
      for (double& v : b) v = rng.next_normal();
      pairs.push_back({std::move(a), std::move(b)});
    }
    const VerificationReport rep =
        check_collision_inequality(obj, delta, pairs);
    CHECK(rep.pass);
  }

  SECTION("zero gradients at a shared optimum give 0 <= 0") {
    // two samples interpolated exactly at w = (1, 1), no regularizer
    std::vector<Sample> samples(2);
    samples[0].features.push_back(0, 1.0);
    samples[0].label = 1.0;
    samples[1].features.push_back(1, 1.0);
    samples[1].label = 1.0;
    const Objective obj =
        Objective::least_squares(Dataset::build(std::move(samples), 2), 0.0,
                                 RegularizationMode::support_weighted);
    std::vector<std::pair<DenseVector, DenseVector>> pairs{
        {{1.0, 1.0}, {1.0, 1.0}}};
    const VerificationReport rep =
        check_collision_inequality(obj, 0.5, pairs);
    CHECK(rep.pass);
    CHECK(rep.worst_margin == 0.0);
  }
}

TEST_CASE("rate-slope fits recover synthetic power laws") {
  auto power_law_trace = [](double exponent) {
    Trace tr;
    tr.seed = 1;
    for (int k = 0; k < 40; ++k) {
      Checkpoint cp;
      cp.t = static_cast<std::int64_t>(10.0 * std::pow(1.3, k));
      const double t = static_cast<double>(cp.t);
      cp.t_prime = 3.0 * t;
      cp.squared_distance = 2.5 * std::pow(t, exponent);
      cp.objective_gap = cp.squared_distance;
      tr.checkpoints.push_back(cp);
    }
    return tr;
  };

  SECTION("exact 1/t") {
    const SlopeFit fit = fit_rate_slope({power_law_trace(-1.0)}, 0.5);
    CHECK(fit.slope == Approx(-1.0).margin(1e-6));
  }
  SECTION("exact 1/sqrt(t)") {
    const SlopeFit fit = fit_rate_slope({power_law_trace(-0.5)}, 0.5);
    CHECK(fit.slope == Approx(-0.5).margin(1e-6));
  }
  SECTION("slope against coordinate time matches (same exponent)") {
    const SlopeFit fit = fit_rate_slope({power_law_trace(-1.0)}, 0.5, true);
    CHECK(fit.slope == Approx(-1.0).margin(1e-6));
  }
  SECTION("non-positive distances are excluded and counted") {
    Trace tr = power_law_trace(-1.0);
    tr.checkpoints[35].squared_distance = 0.0;
    const SlopeFit fit = fit_rate_slope({tr}, 0.5);
    CHECK(fit.excluded_nonpositive == 1);
    CHECK(fit.slope == Approx(-1.0).margin(1e-3));
  }
  SECTION("too few points is an error") {
    Trace tr = power_law_trace(-1.0);
    tr.checkpoints.resize(8);
    CHECK_THROWS_AS(fit_rate_slope({tr}, 0.5), std::invalid_argument);
  }
}

TEST_CASE("delayed-recursion envelope dominates past its thresholds") {
  // A well-conditioned problem so that max(T1, 10 E) sits inside an
  // affordable horizon: unit-norm features give L = 2 + lambda exactly for
  // the squared loss, and lambda = 1 gives mu = 1.
  SyntheticSpec spec;
  spec.n = 60;
  spec.d = 12;
  spec.support_size = 3;
  spec.noise_p = 0.1;
  spec.seed = 33;
  const Objective obj = Objective::least_squares(
      normalize_l2(generate_synthetic(spec)), 1.0,
      RegularizationMode::support_weighted);
  const ProblemConstants c = make_problem_constants(obj, 1e-10);
  const int D = 1;
  const int tau = 10;
  const FilterPartition partition = FilterPartition::build(obj, D, 3);
  const SparsityStats stats = sparsity_stats(obj, D);
  const StepSchedule schedule =
      make_schedule(ScheduleKind::hogwild, c, tau, D, 4.0);
  const BoundThresholds th = thresholds(
      c, 4.0, D, DenseVector(12, 0.0), stats.collision_probability);

  const std::int64_t iterations = 20000;
  const auto from_t = static_cast<std::int64_t>(
      std::max(th.init_dominated_after, 10.0 * schedule.E));
  REQUIRE(from_t < iterations);

  DelayModel delay;
  delay.tau = tau;
  const auto cps = make_checkpoints({}, iterations);
  std::vector<Trace> traces;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SequentialRunConfig cfg;
    cfg.iterations = iterations;
    cfg.checkpoints = cps;
    cfg.seed = seed;
    traces.push_back(run_sequential(obj, partition, schedule, delay,
                                    DenseVector(12, 0.0), cfg, c, stats));
  }
  const auto envelope = [&c, &schedule, D](std::int64_t t) {
    return hogwild_envelope(c, 4.0, D, schedule.E, t);
  };
  const VerificationReport rep =
      check_envelope_domination(traces, envelope, from_t);
  CHECK(rep.pass);
  CHECK(rep.worst_margin > 0.0);
}

TEST_CASE("envelope domination checker") {
  auto noisy_traces = [](double level, std::size_t seeds) {
    std::vector<Trace> traces;
    Rng rng(17);
    for (std::size_t s = 0; s < seeds; ++s) {
      Trace tr;
      tr.seed = static_cast<std::int64_t>(s);
      for (int k = 1; k <= 30; ++k) {
        Checkpoint cp;
        cp.t = 10 * k;
        cp.squared_distance =
            level / cp.t * (1.0 + 0.1 * rng.next_normal());
        tr.checkpoints.push_back(cp);
      }
      traces.push_back(std::move(tr));
    }
    return traces;
  };

  SECTION("a generous envelope dominates") {
    const auto traces = noisy_traces(1.0, 12);
    const VerificationReport rep = check_envelope_domination(
        traces, [](std::int64_t t) { return 4.0 / static_cast<double>(t); },
        10);
    CHECK(rep.pass);
  }

  SECTION("a zero envelope against a noisy trace fails with negative margin") {
    const auto traces = noisy_traces(1.0, 12);
    const VerificationReport rep = check_envelope_domination(
        traces, [](std::int64_t) { return 0.0; }, 10);
    CHECK_FALSE(rep.pass);
    CHECK(rep.worst_margin < 0.0);
    CHECK_FALSE(rep.failures.empty());
  }

  SECTION("too few seeds is an error") {
    const auto traces = noisy_traces(1.0, 5);
    CHECK_THROWS_AS(
        check_envelope_domination(
            traces, [](std::int64_t) { return 1.0; }, 10),
        std::invalid_argument);
  }
}
