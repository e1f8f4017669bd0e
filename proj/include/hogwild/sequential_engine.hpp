#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hogwild/delay.hpp"
#include "hogwild/objective.hpp"
#include "hogwild/partition.hpp"
#include "hogwild/rng.hpp"
#include "hogwild/schedule.hpp"
#include "hogwild/trace.hpp"

namespace hogwild {

// Single-threaded state for the filtered recursion under bounded staleness.
// history holds the updates a future read may still exclude.
struct EngineState {
  DenseVector w;
  std::deque<UpdateRecord> history;
  std::int64_t t = 0;
};

// Per-record inclusion decisions; test instrumentation.
struct MaskDecisions {
  struct Record {
    std::int64_t iteration;
    std::vector<bool> included;  // parallel to the record's delta entries
  };
  std::vector<Record> records;
};

// Synthesizes the read vector for iteration t: the iterate as of t - tau(t)
// plus a masked subset of the deltas applied during [t - tau(t), t).
// With all_included this is exactly the current iterate; with none_included
// it is exactly the delayed iterate.
inline DenseVector read_inconsistent(const EngineState& state, std::int64_t t,
                                     const DelayModel& delay, Rng& rng,
                                     MaskDecisions* decisions = nullptr) {
  const std::int64_t tau_t = delay.delay_at(t);
  const std::int64_t window_begin = std::max<std::int64_t>(0, t - tau_t);
  DenseVector w_hat = state.w;
  if (window_begin >= t) return w_hat;
  if (state.history.empty() || state.history.front().iteration > window_begin) {
    throw std::runtime_error(
        "read_inconsistent: history underflow at iteration " +
        std::to_string(t) + " (records evicted too early)");
  }
  for (const UpdateRecord& rec : state.history) {
    if (rec.iteration < window_begin) continue;
    if (rec.iteration >= t) break;
    MaskDecisions::Record* dec = nullptr;
    if (decisions) {
      decisions->records.push_back({rec.iteration, {}});
      dec = &decisions->records.back();
      dec->included.resize(rec.delta.nnz());
    }
    switch (delay.mask_policy) {
      case MaskPolicy::all_included:
        if (dec) dec->included.assign(rec.delta.nnz(), true);
        break;
      case MaskPolicy::none_included:
        for (std::size_t k = 0; k < rec.delta.nnz(); ++k) {
          w_hat[static_cast<std::size_t>(rec.delta.indices[k])] -=
              rec.delta.values[k];
        }
        break;
      case MaskPolicy::per_coordinate_bernoulli:
        for (std::size_t k = 0; k < rec.delta.nnz(); ++k) {
          const bool included = rng.next_bernoulli(delay.mask_p);
          if (dec) dec->included[k] = included;
          if (!included) {
            w_hat[static_cast<std::size_t>(rec.delta.indices[k])] -=
                rec.delta.values[k];
          }
        }
        break;
    }
  }
  return w_hat;
}

// w[h] <- w[h] - eta * scale * grad[h] over the block; returns the applied
// delta (zero entries dropped) for the update history. Aborts on non-finite
// values.
inline SparseVector apply_update(EngineState& state,
                                 std::span<const Index> block, int scale,
                                 std::span<const double> grad_block,
                                 double eta) {
  if (block.size() != grad_block.size()) {
    throw std::invalid_argument("apply_update: block/gradient size mismatch");
  }
  SparseVector delta;
  const double coef = -eta * static_cast<double>(scale);
  for (std::size_t k = 0; k < block.size(); ++k) {
    const double g = grad_block[k];
    if (g == 0.0) continue;
    const double dv = coef * g;
    if (!std::isfinite(dv)) {
      throw std::runtime_error("apply_update: non-finite update at iteration " +
                               std::to_string(state.t));
    }
    state.w[static_cast<std::size_t>(block[k])] += dv;
    delta.push_back(block[k], dv);
  }
  return delta;
}

// Gradient of f_i at w_hat restricted to a sorted coordinate block. The
// regularizer part touches only block coordinates; the loss part needs one
// inner product over the sample's features and is then masked to the block.
inline void block_gradient(const Objective& obj, const DenseVector& w_hat,
                           std::size_t i, std::span<const Index> block_sorted,
                           std::vector<double>& out) {
  out.resize(block_sorted.size());
  if (obj.kind() == ObjectiveKind::toy_quadratic) {
    out[0] = i == 0 ? w_hat[0] : 1.0;
    return;
  }
  const SparseVector& x = obj.dataset().samples[i].features;
  const double c = obj.loss_coefficient(obj.inner_product(w_hat, i), i);
  for (std::size_t k = 0; k < block_sorted.size(); ++k) {
    const Index h = block_sorted[k];
    const std::size_t hj = static_cast<std::size_t>(h);
    out[k] = c * x.value_at(h) + obj.reg_weight(h) * w_hat[hj];
  }
}

struct SequentialRunConfig {
  std::int64_t iterations = 0;
  std::vector<std::int64_t> checkpoints;
  std::uint64_t seed = 0;
};

// Deterministic simulator of the filtered recursion
//   w_{t+1} = w_t - eta_t * scale_t * [grad f(w_hat_t; xi_t)]_{block_t}.
// tau = 0 with a single block reproduces plain SGD exactly. Identical inputs
// and seed give a bit-identical trace.
inline Trace run_sequential(const Objective& obj,
                            const FilterPartition& partition,
                            const StepSchedule& schedule,
                            const DelayModel& delay, const DenseVector& w0,
                            const SequentialRunConfig& config,
                            const ProblemConstants& constants,
                            const SparsityStats& stats) {
  if (config.iterations < 1) {
    throw std::invalid_argument("run_sequential: iterations < 1");
  }
  check_dimension(w0, static_cast<std::size_t>(obj.dim()), "run_sequential");
  if (partition.sample_count() != obj.n()) {
    throw std::invalid_argument("run_sequential: partition built for a "
                                "different objective");
  }
  if (schedule.kind != ScheduleKind::constant &&
      (schedule.mu != constants.mu || schedule.L != constants.L)) {
    throw std::invalid_argument(
        "run_sequential: schedule constants do not match the objective's");
  }

  EngineState state{w0, {}, 0};
  Rng rng_sample(mix_seed(config.seed, kStreamSamples));
  Rng rng_mask(mix_seed(config.seed, kStreamMasks));
  Rng rng_filter(mix_seed(config.seed, kStreamFilters));

  Trace trace;
  trace.seed = static_cast<std::int64_t>(config.seed);
  const double updates_per_iter =
      stats.padded_support / static_cast<double>(stats.block_parameter);
  auto record = [&](std::int64_t t) {
    Checkpoint cp;
    cp.t = t;
    cp.t_prime = static_cast<double>(t) * updates_per_iter;
    cp.objective_gap = obj.full_objective(state.w) - constants.F_star;
    cp.squared_distance = distance_sq(state.w, constants.w_star);
    trace.checkpoints.push_back(cp);
  };

  std::size_t next_cp = 0;
  const auto& cps = config.checkpoints;
  if (next_cp < cps.size() && cps[next_cp] == 0) {
    record(0);
    ++next_cp;
  }

  std::vector<Index> block_sorted;
  std::vector<double> grad;
  const std::size_t n = obj.n();
  for (std::int64_t t = 0; t < config.iterations; ++t) {
    const std::int64_t tau_t = delay.delay_at(t);
    while (!state.history.empty() &&
           state.history.front().iteration < t - tau_t) {
      state.history.pop_front();
    }
    const bool stale = tau_t > 0 && t > 0;
    DenseVector w_hat_storage;
    const DenseVector* w_hat = &state.w;
    if (stale) {
      w_hat_storage = read_inconsistent(state, t, delay, rng_mask);
      w_hat = &w_hat_storage;
    }

    const std::size_t i = rng_sample.next_index(n);
    const FilterPartition::Draw draw = partition.sample_filter(i, rng_filter);
    block_sorted.assign(draw.block.begin(), draw.block.end());
    std::sort(block_sorted.begin(), block_sorted.end());
    block_gradient(obj, *w_hat, i, block_sorted, grad);

    const double eta = schedule.step(t);
    SparseVector delta = apply_update(state, block_sorted, draw.scale, grad, eta);
    state.history.push_back({t, block_sorted, std::move(delta)});
    state.t = t + 1;

    if (next_cp < cps.size() && cps[next_cp] == t + 1) {
      record(t + 1);
      ++next_cp;
    }
  }
  return trace;
}

}  // namespace hogwild
