#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hogwild/data_io.hpp"
#include "hogwild/dataset.hpp"
#include "hogwild/delay.hpp"
#include "hogwild/objective.hpp"
#include "hogwild/parallel_engine.hpp"
#include "hogwild/partition.hpp"
#include "hogwild/schedule.hpp"
#include "hogwild/sequential_engine.hpp"
#include "hogwild/trace.hpp"
#include "hogwild/verify.hpp"

namespace hogwild {

inline constexpr const char* kVersion = "0.1.0";

enum class EngineKind { sequential, parallel };

inline const char* to_string(EngineKind e) {
  return e == EngineKind::sequential ? "sequential" : "parallel";
}

// Everything needed to reproduce a run. Serializes to/from a Manifest;
// for sequential engines the reproduction is bit-exact.
struct RunSpec {
  // objective
  ObjectiveKind objective = ObjectiveKind::logistic_l2;
  RegularizationMode reg_mode = RegularizationMode::support_weighted;
  double lambda = 0.0;
  bool lambda_auto = false;  // lambda = 1/n
  // data source
  enum class Source { synthetic, file, toy } source = Source::synthetic;
  SyntheticSpec synthetic;
  std::string dataset_path;
  std::int64_t subsample_rows = 0;  // 0 = use all rows
  std::uint64_t subsample_seed = 0;
  bool normalize = false;  // per-sample l2 normalization
  Index dimension_override = 0;
  // partition
  int blocks = 1;          // D
  double fraction = 0.0;   // v; when > 0, D = round(1/v)
  std::uint64_t partition_seed = 0;
  // schedule
  ScheduleKind schedule = ScheduleKind::hogwild;
  double alpha = 0.0;    // 0 = kind default
  double alpha_t = 0.0;  // 0 = kind default; [4, alpha] for delayed kinds
  double custom_E = 0.0;
  // delay model (sequential engine)
  int tau = 0;
  bool tau_growing = false;
  int tau_cap = 0;
  MaskPolicy mask_policy = MaskPolicy::per_coordinate_bernoulli;
  double mask_p = 0.5;
  // engine
  EngineKind engine = EngineKind::sequential;
  int threads = 1;
  CounterMode counter_mode = CounterMode::shared_atomic;
  // run shape
  std::int64_t iterations = 0;
  CheckpointSpec checkpoint_spec;
  std::vector<std::uint64_t> seeds = {1};
  double solve_tolerance = 1e-9;
};

// Immutable run inputs assembled from a RunSpec: data, constants, partition,
// schedule. Building this is the expensive part (reference solve), so it is
// shared across seeds and grid cells where possible.
struct PreparedProblem {
  Objective objective;
  ProblemConstants constants;
  FilterPartition partition;
  SparsityStats stats;
  StepSchedule schedule;
  DenseVector w0;
  int blocks = 1;
  std::string label_rule = "none";
  std::uint64_t dataset_hash = 0;
};

inline int blocks_from_fraction(double v) {
  if (v <= 0.0 || v > 1.0) {
    throw std::invalid_argument("fraction v must be in (0, 1]");
  }
  return static_cast<int>(std::lround(1.0 / v));
}

inline Dataset load_dataset(const RunSpec& spec, std::string* label_rule) {
  Dataset ds;
  if (spec.source == RunSpec::Source::synthetic) {
    ds = generate_synthetic(spec.synthetic);
    if (label_rule) *label_rule = "none";
  } else {
    LibsvmParseResult parsed =
        parse_libsvm_file(spec.dataset_path, spec.dimension_override);
    ds = std::move(parsed.dataset);
    if (label_rule) *label_rule = parsed.label_rule;
  }
  if (spec.subsample_rows > 0 &&
      static_cast<std::size_t>(spec.subsample_rows) < ds.n()) {
    ds = subsample(ds, static_cast<std::size_t>(spec.subsample_rows),
                   spec.subsample_seed);
  }
  if (spec.normalize) ds = normalize_l2(ds);
  return ds;
}

inline PreparedProblem prepare(const RunSpec& spec) {
  const RunSpec& s = spec;
  std::string label_rule = "none";
  Objective obj = [&]() -> Objective {
    if (s.source == RunSpec::Source::toy ||
        s.objective == ObjectiveKind::toy_quadratic) {
      return Objective::toy_quadratic();
    }
    Dataset ds = load_dataset(s, &label_rule);
    const double lambda =
        s.lambda_auto ? 1.0 / static_cast<double>(ds.n()) : s.lambda;
    if (s.objective == ObjectiveKind::logistic_l2) {
      return Objective::logistic(std::move(ds), lambda, s.reg_mode);
    }
    return Objective::least_squares(std::move(ds), lambda, s.reg_mode);
  }();

  const int blocks =
      s.fraction > 0.0 ? blocks_from_fraction(s.fraction) : s.blocks;
  ProblemConstants constants = make_problem_constants(obj, s.solve_tolerance);
  FilterPartition partition =
      FilterPartition::build(obj, blocks, s.partition_seed);
  SparsityStats stats = sparsity_stats(obj, blocks);
  StepSchedule schedule = make_schedule(s.schedule, constants, s.tau, blocks,
                                        s.alpha, s.custom_E, s.alpha_t);
  PreparedProblem prep{std::move(obj),
                       std::move(constants),
                       std::move(partition),
                       stats,
                       schedule,
                       DenseVector(),
                       blocks,
                       label_rule,
                       0};
  prep.w0.assign(static_cast<std::size_t>(prep.objective.dim()), 0.0);
  if (prep.objective.kind() != ObjectiveKind::toy_quadratic) {
    prep.dataset_hash = fingerprint(prep.objective.dataset());
  }
  return prep;
}

inline Manifest make_manifest(const RunSpec& spec, const PreparedProblem& p) {
  Manifest m;
  auto set = [&m](const std::string& k, const std::string& v) {
    manifest_set(m, k, v);
  };
  set("format", "hogwild-run-manifest-v1");
  set("code.version", kVersion);
  set("objective", to_string(spec.objective));
  set("objective.regularization", to_string(spec.reg_mode));
  set("objective.lambda",
      format_double(spec.lambda_auto
                        ? 1.0 / static_cast<double>(p.objective.n())
                        : spec.lambda));
  set("objective.lambda_auto", spec.lambda_auto ? "1" : "0");
  switch (spec.source) {
    case RunSpec::Source::synthetic:
      set("dataset.kind", "synthetic");
      set("dataset.synthetic", spec.synthetic.to_string());
      break;
    case RunSpec::Source::file:
      set("dataset.kind", "file");
      set("dataset.path", spec.dataset_path);
      break;
    case RunSpec::Source::toy:
      set("dataset.kind", "toy");
      break;
  }
  set("dataset.subsample", std::to_string(spec.subsample_rows));
  set("dataset.subsample_seed", std::to_string(spec.subsample_seed));
  set("dataset.normalize", spec.normalize ? "l2" : "none");
  set("dataset.dimension_override", std::to_string(spec.dimension_override));
  set("dataset.n", std::to_string(p.objective.n()));
  set("dataset.d", std::to_string(p.objective.dim()));
  set("dataset.label_rule", p.label_rule);
  {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(p.dataset_hash));
    set("dataset.hash", buf);
  }
  set("partition.blocks", std::to_string(p.blocks));
  set("partition.fraction", format_double(spec.fraction));
  set("partition.seed", std::to_string(spec.partition_seed));
  set("schedule.kind", to_string(spec.schedule));
  set("schedule.alpha", format_double(p.schedule.alpha));
  set("schedule.alpha_t", format_double(p.schedule.alpha_t));
  set("schedule.E", format_double(p.schedule.E));
  set("schedule.custom_E", format_double(spec.custom_E));
  set("delay.tau", std::to_string(spec.tau));
  set("delay.growing", spec.tau_growing ? "1" : "0");
  set("delay.cap", std::to_string(spec.tau_cap));
  set("delay.mask", to_string(spec.mask_policy));
  set("delay.mask_p", format_double(spec.mask_p));
  set("engine", to_string(spec.engine));
  set("engine.threads", std::to_string(spec.threads));
  set("engine.counter_mode", to_string(spec.counter_mode));
  set("engine.snapshots",
      spec.engine == EngineKind::parallel ? "inconsistent" : "exact");
  set("run.iterations", std::to_string(spec.iterations));
  set("run.checkpoints", spec.checkpoint_spec.to_string());
  {
    std::string seeds;
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) {
      if (i) seeds += ",";
      seeds += std::to_string(spec.seeds[i]);
    }
    set("run.seeds", seeds);
  }
  set("solve.tolerance", format_double(spec.solve_tolerance));
  set("constants.L", format_double(p.constants.L));
  set("constants.mu", format_double(p.constants.mu));
  set("constants.kappa", format_double(p.constants.kappa));
  set("constants.N", format_double(p.constants.N));
  set("constants.F_star", format_double(p.constants.F_star));
  set("stats.max_support_size", std::to_string(p.stats.max_support_size));
  set("stats.padded_support", format_double(p.stats.padded_support));
  set("stats.mean_support", format_double(p.stats.mean_support));
  set("stats.collision_probability",
      format_double(p.stats.collision_probability));
  return m;
}

// Inverse of make_manifest for the fields that define the run.
inline RunSpec run_spec_from_manifest(const Manifest& m) {
  RunSpec s;
  auto get = [&m](const std::string& k) -> const std::string& {
    return manifest_get(m, k);
  };
  const std::string obj = get("objective");
  if (obj == "logistic_l2") s.objective = ObjectiveKind::logistic_l2;
  else if (obj == "least_squares_l2") s.objective = ObjectiveKind::least_squares_l2;
  else if (obj == "toy_quadratic") s.objective = ObjectiveKind::toy_quadratic;
  else throw std::runtime_error("manifest: unknown objective " + obj);
  s.reg_mode = get("objective.regularization") == std::string("dense")
                   ? RegularizationMode::dense
                   : RegularizationMode::support_weighted;
  s.lambda = parse_double(get("objective.lambda"), "lambda");
  s.lambda_auto = get("objective.lambda_auto") == "1";
  const std::string kind = get("dataset.kind");
  if (kind == "synthetic") {
    s.source = RunSpec::Source::synthetic;
    s.synthetic = SyntheticSpec::from_string(get("dataset.synthetic"));
  } else if (kind == "file") {
    s.source = RunSpec::Source::file;
    s.dataset_path = get("dataset.path");
  } else {
    s.source = RunSpec::Source::toy;
  }
  s.subsample_rows = parse_int(get("dataset.subsample"), "subsample");
  s.subsample_seed = static_cast<std::uint64_t>(
      parse_int(get("dataset.subsample_seed"), "subsample_seed"));
  s.normalize = get("dataset.normalize") == std::string("l2");
  s.dimension_override = static_cast<Index>(
      parse_int(get("dataset.dimension_override"), "dimension_override"));
  s.blocks = static_cast<int>(parse_int(get("partition.blocks"), "blocks"));
  s.fraction = parse_double(get("partition.fraction"), "fraction");
  s.partition_seed = static_cast<std::uint64_t>(
      parse_int(get("partition.seed"), "partition seed"));
  s.schedule = schedule_kind_from_string(get("schedule.kind"));
  s.alpha = parse_double(get("schedule.alpha"), "alpha");
  s.alpha_t = parse_double(get("schedule.alpha_t"), "alpha_t");
  s.custom_E = parse_double(get("schedule.custom_E"), "custom_E");
  s.tau = static_cast<int>(parse_int(get("delay.tau"), "tau"));
  s.tau_growing = get("delay.growing") == "1";
  s.tau_cap = static_cast<int>(parse_int(get("delay.cap"), "tau cap"));
  s.mask_policy = mask_policy_from_string(get("delay.mask"));
  s.mask_p = parse_double(get("delay.mask_p"), "mask_p");
  s.engine = get("engine") == std::string("parallel") ? EngineKind::parallel
                                                      : EngineKind::sequential;
  s.threads = static_cast<int>(parse_int(get("engine.threads"), "threads"));
  s.counter_mode = get("engine.counter_mode") == std::string("local_estimate")
                       ? CounterMode::local_estimate
                       : CounterMode::shared_atomic;
  s.iterations = parse_int(get("run.iterations"), "iterations");
  s.checkpoint_spec = CheckpointSpec::from_string(get("run.checkpoints"));
  s.seeds.clear();
  {
    std::stringstream ss(get("run.seeds"));
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      s.seeds.push_back(static_cast<std::uint64_t>(parse_int(tok, "seed")));
    }
  }
  s.solve_tolerance = parse_double(get("solve.tolerance"), "solve tolerance");
  return s;
}

inline Trace run_one_seed(const RunSpec& spec, const PreparedProblem& p,
                          std::uint64_t seed) {
  const std::vector<std::int64_t> cps =
      make_checkpoints(spec.checkpoint_spec, spec.iterations);
  Trace trace;
  if (spec.engine == EngineKind::sequential) {
    DelayModel delay;
    delay.tau = spec.tau;
    delay.growing = spec.tau_growing;
    delay.growth_cap = spec.tau_cap;
    delay.mask_policy = spec.mask_policy;
    delay.mask_p = spec.mask_p;
    SequentialRunConfig cfg;
    cfg.iterations = spec.iterations;
    cfg.checkpoints = cps;
    cfg.seed = seed;
    trace = run_sequential(p.objective, p.partition, p.schedule, delay, p.w0,
                           cfg, p.constants, p.stats);
  } else {
    ParallelConfig cfg;
    cfg.threads = spec.threads;
    cfg.schedule = p.schedule;
    cfg.total_iterations = spec.iterations;
    cfg.seed_base = seed;
    cfg.counter_mode = spec.counter_mode;
    cfg.checkpoints = cps;
    trace = run_parallel(p.objective, p.partition, cfg, p.w0, p.constants,
                         p.stats);
  }
  trace.manifest = make_manifest(spec, p);
  manifest_set(trace.manifest, "run.this_seed", std::to_string(seed));
  if (spec.engine == EngineKind::parallel) {
    manifest_set(trace.manifest, "engine.observed_tau",
                 std::to_string(trace.observed_delay));
    manifest_set(trace.manifest, "engine.configured_tau",
                 std::to_string(spec.tau));
  }
  return trace;
}

inline std::vector<Trace> run_all_seeds(const RunSpec& spec,
                                        const PreparedProblem& p) {
  std::vector<Trace> traces;
  traces.reserve(spec.seeds.size());
  for (std::uint64_t seed : spec.seeds) {
    traces.push_back(run_one_seed(spec, p, seed));
  }
  return traces;
}

}  // namespace hogwild
