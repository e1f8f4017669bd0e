#include <catch2/catch.hpp>

#include <cmath>

#include "hogwild/objective.hpp"
#include "hogwild/rng.hpp"

using namespace hogwild;

namespace {

Dataset make_dataset(std::vector<std::pair<SparseVector, double>> rows,
                     Index d) {
  std::vector<Sample> samples;
  for (auto& [x, y] : rows) samples.push_back({std::move(x), y});
  return Dataset::build(std::move(samples), d);
}

SparseVector sv(std::vector<Index> idx, std::vector<double> val) {
  SparseVector x;
  x.indices = std::move(idx);
  x.values = std::move(val);
  return x;
}

DenseVector random_point(Rng& rng, std::size_t d, double scale) {
  DenseVector w(d);
  for (double& v : w) v = scale * rng.next_normal();
  return w;
}

}  // namespace

TEST_CASE("toy quadratic closed forms") {
  const Objective toy = Objective::toy_quadratic();
  REQUIRE(toy.n() == 2);
  REQUIRE(toy.dim() == 1);

  SECTION("stochastic gradients at zero") {
    const DenseVector w{0.0};
    const SparseVector g0 = toy.stochastic_gradient(w, 0);
    REQUIRE(g0.indices == std::vector<Index>{0});
    CHECK(g0.values[0] == 0.0);
    const SparseVector g1 = toy.stochastic_gradient(w, 1);
    CHECK(g1.values[0] == 1.0);
  }

  SECTION("full objective and gradient") {
    CHECK(toy.full_objective({0.0}) == 0.0);
    CHECK(toy.full_gradient({0.0})[0] == 0.5);
    CHECK(toy.full_objective({-1.0}) == -0.25);
    CHECK(toy.full_gradient({-1.0})[0] == 0.0);
  }

  SECTION("support is the single coordinate") {
    CHECK(toy.sample_support(0) == std::vector<Index>{0});
    CHECK(toy.sample_support(1) == std::vector<Index>{0});
  }

  SECTION("constants and reference solution") {
    const auto [L, mu] = estimate_constants(toy);
    CHECK(L == 1.0);
    CHECK(mu == 0.5);
    const ReferenceSolution ref = solve_reference(toy, 1e-10);
    CHECK(ref.w_star[0] == Approx(-1.0).margin(1e-9));
    CHECK(ref.F_star == Approx(-0.25).margin(1e-12));
    CHECK(compute_variance_constant(toy, {-1.0}) == 2.0);
  }

  SECTION("index and dimension errors") {
    CHECK_THROWS_AS(toy.stochastic_gradient({0.0}, 2), std::out_of_range);
    CHECK_THROWS_AS(toy.full_objective({0.0, 1.0}), std::invalid_argument);
  }
}

TEST_CASE("logistic gradient closed form on a single sample") {
  Dataset ds = make_dataset({{sv({0}, {1.0}), 1.0}}, 2);
  const Objective obj = Objective::logistic(std::move(ds), 0.0);
  const SparseVector g = obj.stochastic_gradient({0.0, 0.0}, 0);
  REQUIRE(g.indices == std::vector<Index>{0});
  CHECK(g.values[0] == Approx(-0.5));
  CHECK(obj.sample_support(0) == std::vector<Index>{0});
}

TEST_CASE("sample support by regularization mode") {
  Dataset ds = make_dataset({{sv({2, 5, 9}, {1.0, -2.0, 0.5}), 1.0}}, 10);
  SECTION("support_weighted keeps the feature support") {
    const Objective obj = Objective::logistic(std::move(ds), 0.01);
    CHECK(obj.sample_support(0) == std::vector<Index>{2, 5, 9});
  }
  SECTION("dense mode touches every coordinate") {
    Dataset small = make_dataset({{sv({1}, {1.0}), 1.0}}, 4);
    const Objective obj =
        Objective::logistic(std::move(small), 0.01, RegularizationMode::dense);
    CHECK(obj.sample_support(0) == std::vector<Index>{0, 1, 2, 3});
  }
}

TEST_CASE("estimate_constants") {
  SECTION("logistic dense closed form") {
    Dataset ds = make_dataset({{sv({0}, {2.0}), 1.0}}, 2);
    const Objective obj =
        Objective::logistic(std::move(ds), 0.1, RegularizationMode::dense);
    const auto [L, mu] = estimate_constants(obj);
    CHECK(L == Approx(1.1));
    CHECK(mu == 0.1);
  }
  SECTION("lambda = 0 is rejected") {
    Dataset ds = make_dataset({{sv({0}, {1.0}), 1.0}}, 1);
    const Objective obj = Objective::logistic(std::move(ds), 0.0);
    CHECK_THROWS_AS(estimate_constants(obj), std::invalid_argument);
  }
}

TEST_CASE("solve_reference on least squares") {
  // minimize (w - 1)^2 + w^2: derivative 2(w-1) + 2w = 0 at w = 1/2
  Dataset ds = make_dataset({{sv({0}, {1.0}), 1.0}}, 1);
  const Objective obj =
      Objective::least_squares(std::move(ds), 2.0, RegularizationMode::dense);
  const ReferenceSolution ref = solve_reference(obj, 1e-12);
  CHECK(ref.w_star[0] == Approx(0.5).margin(1e-10));
  const DenseVector g = obj.full_gradient(ref.w_star);
  CHECK(std::sqrt(norm_sq(g)) <= 1e-12);
}

TEST_CASE("variance constant vanishes when every sample is stationary") {
  // two identical samples: grad f_i(w) = 4w - 2, zero at w = 1/2 for both
  Dataset ds = make_dataset(
      {{sv({0}, {1.0}), 1.0}, {sv({0}, {1.0}), 1.0}}, 1);
  const Objective obj =
      Objective::least_squares(std::move(ds), 2.0, RegularizationMode::dense);
  CHECK(compute_variance_constant(obj, {0.5}) == 0.0);

  // single-sample problem: N = 2 ||grad F(w*)||^2 <= 2 tol^2
  Dataset one = make_dataset({{sv({0}, {1.0}), 1.0}}, 1);
  const Objective single =
      Objective::least_squares(std::move(one), 2.0, RegularizationMode::dense);
  const ReferenceSolution ref = solve_reference(single, 1e-10);
  CHECK(compute_variance_constant(single, ref.w_star) <= 2e-20);
}

TEST_CASE("least-squares invariants and constants") {
  Rng data_rng(23);
  std::vector<std::pair<SparseVector, double>> rows;
  for (int i = 0; i < 25; ++i) {
    SparseVector x;
    Index prev = -1;
    for (int k = 0; k < 2; ++k) {
      prev = static_cast<Index>(prev + 1 +
                                static_cast<Index>(data_rng.next_index(3)));
      x.push_back(prev, data_rng.next_normal());
    }
    rows.push_back({std::move(x), data_rng.next_normal()});
  }
  Dataset ds = make_dataset(std::move(rows), 8);
  const double lambda = 0.2;

  for (RegularizationMode mode :
       {RegularizationMode::support_weighted, RegularizationMode::dense}) {
    Dataset copy = ds;
    const Objective obj =
        Objective::least_squares(std::move(copy), lambda, mode);
    const auto [L, mu] = estimate_constants(obj);
    CHECK(mu == lambda);
    Rng rng(3);
    for (int rep = 0; rep < 4; ++rep) {
      DenseVector w = random_point(rng, 8, 2.0);
      DenseVector v = random_point(rng, 8, 2.0);
      const double dist = std::sqrt(distance_sq(w, v));
      for (std::size_t i = 0; i < obj.n(); ++i) {
        // convexity of every realization
        const SparseVector gv = obj.stochastic_gradient(v, i);
        double inner = 0.0;
        for (std::size_t k = 0; k < gv.nnz(); ++k) {
          const std::size_t j = static_cast<std::size_t>(gv.indices[k]);
          inner += gv.values[k] * (w[j] - v[j]);
        }
        CHECK(obj.sample_value(w, i) - obj.sample_value(v, i) >=
              inner - 1e-9 * (1.0 + std::abs(inner)));
        // smoothness with the certified L
        const SparseVector gw = obj.stochastic_gradient(w, i);
        double diff_sq = 0.0;
        for (std::size_t k = 0; k < gw.nnz(); ++k) {
          const double delta = gw.values[k] - gv.values[k];
          diff_sq += delta * delta;
        }
        CHECK(std::sqrt(diff_sq) <= L * dist * (1.0 + 1e-12));
      }
    }
  }
}

TEST_CASE("finite-sum invariants on a synthetic logistic problem") {
  Rng data_rng(7);
  std::vector<std::pair<SparseVector, double>> rows;
  for (int i = 0; i < 40; ++i) {
    SparseVector x;
    Index prev = -1;
    for (int k = 0; k < 3; ++k) {
      prev = static_cast<Index>(prev + 1 +
                                static_cast<Index>(data_rng.next_index(3)));
      x.push_back(prev, data_rng.next_normal());
    }
    rows.push_back({std::move(x), data_rng.next_bernoulli(0.5) ? 1.0 : -1.0});
  }
  const Index d = 12;
  Dataset ds = make_dataset(std::move(rows), d);
  const double lambda = 0.05;

  for (RegularizationMode mode :
       {RegularizationMode::support_weighted, RegularizationMode::dense}) {
    Dataset copy = ds;
    const Objective obj = Objective::logistic(std::move(copy), lambda, mode);
    const auto [L, mu] = estimate_constants(obj);
    Rng rng(11);

    SECTION(std::string("unbiasedness: mean sample gradient is the full "
                        "gradient, mode ") +
            to_string(mode)) {
      for (int rep = 0; rep < 5; ++rep) {
        const DenseVector w = random_point(rng, d, 2.0);
        DenseVector mean(d, 0.0);
        for (std::size_t i = 0; i < obj.n(); ++i) {
          add_scaled(mean, obj.stochastic_gradient(w, i), 1.0);
        }
        for (double& v : mean) v /= static_cast<double>(obj.n());
        const DenseVector full = obj.full_gradient(w);
        for (std::size_t j = 0; j < mean.size(); ++j) {
          CHECK(mean[j] ==
                Approx(full[j]).margin(1e-10 * (1.0 + std::abs(full[j]))));
        }
      }
    }

    SECTION(std::string("smoothness certificate, mode ") + to_string(mode)) {
      for (int rep = 0; rep < 5; ++rep) {
        const DenseVector w = random_point(rng, d, 3.0);
        const DenseVector v = random_point(rng, d, 3.0);
        const double dist = std::sqrt(distance_sq(w, v));
        for (std::size_t i = 0; i < obj.n(); ++i) {
          SparseVector gw = obj.stochastic_gradient(w, i);
          const SparseVector gv = obj.stochastic_gradient(v, i);
          double diff_sq = 0.0;
          for (std::size_t k = 0; k < gw.nnz(); ++k) {
            const double delta = gw.values[k] - gv.values[k];
            diff_sq += delta * delta;
          }
          CHECK(std::sqrt(diff_sq) <= L * dist * (1.0 + 1e-12));
        }
      }
    }

    SECTION(std::string("convexity of realizations, mode ") + to_string(mode)) {
      for (int rep = 0; rep < 5; ++rep) {
        const DenseVector w = random_point(rng, d, 2.0);
        const DenseVector v = random_point(rng, d, 2.0);
        for (std::size_t i = 0; i < obj.n(); ++i) {
          const SparseVector gv = obj.stochastic_gradient(v, i);
          double inner = 0.0;
          for (std::size_t k = 0; k < gv.nnz(); ++k) {
            const std::size_t j = static_cast<std::size_t>(gv.indices[k]);
            inner += gv.values[k] * (w[j] - v[j]);
          }
          const double lhs = obj.sample_value(w, i) - obj.sample_value(v, i);
          CHECK(lhs >= inner - 1e-9 * (1.0 + std::abs(inner)));
        }
      }
    }
  }

  SECTION("strong convexity certificate") {
    Dataset copy = ds;
    const Objective obj = Objective::logistic(std::move(copy), lambda);
    const ProblemConstants c = make_problem_constants(obj, 1e-10);
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
      const DenseVector w = random_point(rng, d, 4.0);
      const double lhs = 2.0 * c.mu * (obj.full_objective(w) - c.F_star);
      const double rhs = norm_sq(obj.full_gradient(w));
      CHECK(lhs <= rhs + 1e-7 * (1.0 + rhs));
    }
    const DenseVector gstar = obj.full_gradient(c.w_star);
    CHECK(std::sqrt(norm_sq(gstar)) <= c.solve_tolerance);
  }

  SECTION("support-weighted regularizer averages to the plain penalty") {
    Dataset copy = ds;
    Dataset copy0 = ds;
    const Objective with_reg = Objective::logistic(std::move(copy), lambda);
    const Objective no_reg = Objective::logistic(std::move(copy0), 0.0);
    Rng rng(17);
    for (int rep = 0; rep < 5; ++rep) {
      const DenseVector w = random_point(rng, d, 2.0);
      double reg_mean = 0.0;
      for (std::size_t i = 0; i < with_reg.n(); ++i) {
        reg_mean += with_reg.sample_value(w, i) - no_reg.sample_value(w, i);
      }
      reg_mean /= static_cast<double>(with_reg.n());
      // identity holds over the covered coordinates; untouched coordinates
      // carry no regularization by convention
      double expected = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        if (with_reg.dataset().coordinate_counts[j] > 0) {
          expected += w[j] * w[j];
        }
      }
      expected *= 0.5 * lambda;
      CHECK(reg_mean == Approx(expected).epsilon(1e-10));
    }
  }
}
