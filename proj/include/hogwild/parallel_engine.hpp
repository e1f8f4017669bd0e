#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hogwild/objective.hpp"
#include "hogwild/partition.hpp"
#include "hogwild/rng.hpp"
#include "hogwild/schedule.hpp"
#include "hogwild/trace.hpp"

namespace hogwild {

// Shared parameter vector with per-cell atomic loads and read-modify-write
// adds. No cross-coordinate consistency: snapshots may be torn, which is the
// model's contract. Adds use a relaxed compare-and-swap loop on the cell.
class AtomicParameterVector {
 public:
  explicit AtomicParameterVector(const DenseVector& init)
      : size_(init.size()),
        cells_(std::make_unique<std::atomic<double>[]>(init.size())) {
    for (std::size_t i = 0; i < size_; ++i) {
      cells_[i].store(init[i], std::memory_order_relaxed);
    }
  }

  std::size_t size() const { return size_; }

  double load(std::size_t i) const {
    return cells_[i].load(std::memory_order_relaxed);
  }

  // The cell's final value reflects this add and every concurrent add
  // exactly once.
  void add(std::size_t i, double delta) {
    std::atomic<double>& cell = cells_[i];
    double cur = cell.load(std::memory_order_relaxed);
    while (!cell.compare_exchange_weak(cur, cur + delta,
                                       std::memory_order_relaxed)) {
    }
  }

  DenseVector snapshot() const {
    DenseVector w(size_);
    for (std::size_t i = 0; i < size_; ++i) w[i] = load(i);
    return w;
  }

 private:
  std::size_t size_;
  std::unique_ptr<std::atomic<double>[]> cells_;
};

inline void atomic_coordinate_add(AtomicParameterVector& v, std::size_t index,
                                  double delta) {
  if (index >= v.size()) {
    throw std::out_of_range("atomic_coordinate_add: index out of range");
  }
  if (!std::isfinite(delta)) {
    throw std::invalid_argument("atomic_coordinate_add: non-finite delta");
  }
  v.add(index, delta);
}

// How workers learn the iteration count that parameterizes the step size:
// from the shared allocation counter, or from their own processed count
// scaled by P (adequate for exp_period steps, which change rarely).
enum class CounterMode { shared_atomic, local_estimate };

inline const char* to_string(CounterMode m) {
  return m == CounterMode::shared_atomic ? "shared_atomic" : "local_estimate";
}

struct ParallelConfig {
  int threads = 1;
  StepSchedule schedule;
  std::int64_t total_iterations = 0;
  std::uint64_t seed_base = 0;
  CounterMode counter_mode = CounterMode::shared_atomic;
  std::vector<std::int64_t> checkpoints;
};

// P workers share one parameter vector; a shared atomic counter allocates
// iteration numbers. Reads are coordinate-wise atomic (snapshots may mix
// updates); updates are per-coordinate atomic adds. Checkpoints are taken by
// a sampler thread from (possibly torn) snapshots at the nominal grid
// points; the final checkpoint is taken after all workers have joined and is
// consistent. The trace records the largest observed gap between an
// allocated iteration and the completed-update watermark as observed_delay.
inline Trace run_parallel(const Objective& obj,
                          const FilterPartition& partition,
                          const ParallelConfig& config, const DenseVector& w0,
                          const ProblemConstants& constants,
                          const SparsityStats& stats) {
  if (config.threads < 1) {
    throw std::invalid_argument("run_parallel: threads < 1");
  }
  if (config.total_iterations < config.threads) {
    throw std::invalid_argument("run_parallel: need total_iterations >= P");
  }
  check_dimension(w0, static_cast<std::size_t>(obj.dim()), "run_parallel");
  if (partition.sample_count() != obj.n()) {
    throw std::invalid_argument("run_parallel: partition built for a "
                                "different objective");
  }
  if (config.schedule.kind != ScheduleKind::constant &&
      (config.schedule.mu != constants.mu ||
       config.schedule.L != constants.L)) {
    throw std::invalid_argument(
        "run_parallel: schedule constants do not match the objective's");
  }

  AtomicParameterVector shared(w0);
  std::atomic<std::int64_t> next_iteration{0};
  std::atomic<std::int64_t> completed{0};
  std::atomic<std::int64_t> observed_delay{0};
  std::atomic<bool> failed{false};
  std::atomic<std::int64_t> failed_at{-1};

  const std::size_t n = obj.n();
  const std::int64_t total = config.total_iterations;
  const bool local_counter = config.counter_mode == CounterMode::local_estimate;
  const auto& schedule = config.schedule;
  const std::int64_t threads = config.threads;

  auto worker = [&](int worker_id) {
    Rng rng_sample(
        mix_seed(config.seed_base + static_cast<std::uint64_t>(worker_id),
                 kStreamSamples));
    Rng rng_filter(
        mix_seed(config.seed_base + static_cast<std::uint64_t>(worker_id),
                 kStreamFilters));
    std::vector<Index> block_sorted;
    std::int64_t processed = 0;
    while (!failed.load(std::memory_order_relaxed)) {
      const std::int64_t t =
          next_iteration.fetch_add(1, std::memory_order_relaxed);
      if (t >= total) break;

      const std::int64_t gap = t - completed.load(std::memory_order_relaxed);
      std::int64_t seen = observed_delay.load(std::memory_order_relaxed);
      while (gap > seen && !observed_delay.compare_exchange_weak(
                               seen, gap, std::memory_order_relaxed)) {
      }

      const std::size_t i = rng_sample.next_index(n);
      const FilterPartition::Draw draw = partition.sample_filter(i, rng_filter);
      block_sorted.assign(draw.block.begin(), draw.block.end());
      std::sort(block_sorted.begin(), block_sorted.end());

      const std::int64_t step_t = local_counter ? processed * threads : t;
      const double eta = schedule.step(step_t);
      const double coef = -eta * static_cast<double>(draw.scale);

      if (obj.kind() == ObjectiveKind::toy_quadratic) {
        const double g = i == 0 ? shared.load(0) : 1.0;
        if (g != 0.0) shared.add(0, coef * g);
      } else {
        const SparseVector& x = obj.dataset().samples[i].features;
        // Inconsistent read: each coordinate fetched atomically on its own.
        double z = 0.0;
        for (std::size_t k = 0; k < x.nnz(); ++k) {
          z += x.values[k] * shared.load(static_cast<std::size_t>(x.indices[k]));
        }
        const double c = obj.loss_coefficient(z, i);
        for (Index h : block_sorted) {
          const std::size_t hj = static_cast<std::size_t>(h);
          const double g = c * x.value_at(h) + obj.reg_weight(h) * shared.load(hj);
          if (g == 0.0) continue;
          const double dv = coef * g;
          if (!std::isfinite(dv)) {
            failed.store(true, std::memory_order_relaxed);
            failed_at.store(t, std::memory_order_relaxed);
            break;
          }
          shared.add(hj, dv);
        }
      }
      completed.fetch_add(1, std::memory_order_relaxed);
      ++processed;
    }
  };

  Trace trace;
  trace.seed = static_cast<std::int64_t>(config.seed_base);
  const double updates_per_iter =
      stats.padded_support / static_cast<double>(stats.block_parameter);
  auto record = [&](std::int64_t t, const DenseVector& w) {
    Checkpoint cp;
    cp.t = t;
    cp.t_prime = static_cast<double>(t) * updates_per_iter;
    cp.objective_gap = obj.full_objective(w) - constants.F_star;
    cp.squared_distance = distance_sq(w, constants.w_star);
    trace.checkpoints.push_back(cp);
  };

  std::atomic<bool> workers_done{false};
  std::thread sampler([&] {
    std::size_t next_cp = 0;
    const auto& cps = config.checkpoints;
    if (next_cp < cps.size() && cps[next_cp] == 0) {
      record(0, w0);
      ++next_cp;
    }
    while (!workers_done.load(std::memory_order_relaxed)) {
      const std::int64_t done = completed.load(std::memory_order_relaxed);
      while (next_cp < cps.size() && cps[next_cp] < total &&
             cps[next_cp] <= done) {
        record(cps[next_cp], shared.snapshot());
        ++next_cp;
      }
      std::this_thread::sleep_for(std::chrono::microseconds(200));
    }
    // Workers outran the sampler: drain pending grid points from the final
    // state so every trace shares the same checkpoint grid.
    while (next_cp < cps.size() && cps[next_cp] < total) {
      record(cps[next_cp], shared.snapshot());
      ++next_cp;
    }
  });

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(config.threads));
  for (int p = 0; p < config.threads; ++p) pool.emplace_back(worker, p);
  for (std::thread& th : pool) th.join();
  workers_done.store(true, std::memory_order_relaxed);
  sampler.join();

  if (failed.load()) {
    throw std::runtime_error(
        "run_parallel: non-finite update at iteration " +
        std::to_string(failed_at.load()));
  }

  // Consistent final checkpoint: all updates are applied and workers joined.
  record(total, shared.snapshot());
  trace.observed_delay = observed_delay.load();
  return trace;
}

}  // namespace hogwild
