// Command-line harness: run experiments, print certified bounds, execute the
// verification battery, and sweep fraction/delay grids.
//
// Exit codes: 0 success, 1 usage error, 2 runtime error, 3 verification
// failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hogwild/hogwild.hpp"

namespace fs = std::filesystem;
using namespace hogwild;

namespace {

struct CliOptions {
  std::string synthetic_spec;
  std::string dataset_path;
  std::string objective = "logistic";
  std::string lambda = "auto";
  std::string reg_mode = "support_weighted";
  std::string normalize = "none";
  std::int64_t subsample = 0;
  std::uint64_t subsample_seed = 1;
  hogwild::Index dimension_override = 0;
  std::string schedule = "hogwild";
  double alpha = 0.0;
  double alpha_t = 0.0;
  double custom_E = 0.0;
  int tau = -1;  // unset: 0 for the simulator, 2P for the parallel engine
  bool tau_growing = false;
  int tau_cap = 0;
  int blocks = 0;
  double fraction = 0.0;
  std::string mask = "bernoulli";
  double mask_p = 0.5;
  std::string engine = "sequential";
  int threads = 1;
  std::string counter_mode = "shared_atomic";
  std::int64_t iterations = 0;
  std::int64_t epochs = 0;
  std::string checkpoints = "geometric:1.3";
  std::string seeds = "1";
  std::uint64_t partition_seed = 1;
  double solve_tol = 1e-9;
  std::string output;
};

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const std::int64_t lo = parse_int(text.substr(0, dots), "seed range");
    const std::int64_t hi = parse_int(text.substr(dots + 2), "seed range");
    if (hi < lo) throw std::invalid_argument("seed range: hi < lo");
    for (std::int64_t s = lo; s <= hi; ++s) {
      seeds.push_back(static_cast<std::uint64_t>(s));
    }
    return seeds;
  }
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    seeds.push_back(static_cast<std::uint64_t>(parse_int(tok, "seed")));
  }
  if (seeds.empty()) throw std::invalid_argument("empty seed list");
  return seeds;
}

void add_common_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--synthetic", o.synthetic_spec,
                  "synthetic dataset spec n=..,d=..,s=..,p=..,seed=..");
  cmd->add_option("--dataset", o.dataset_path, "LIBSVM text file");
  cmd->add_option("--subsample", o.subsample, "random row subsample size");
  cmd->add_option("--subsample-seed", o.subsample_seed, "subsample seed");
  cmd->add_option("--dimension", o.dimension_override,
                  "raise d above the largest index seen in the file");
  cmd->add_option("--objective", o.objective,
                  "logistic | least_squares | toy");
  cmd->add_option("--lambda", o.lambda, "regularization, number or 'auto' (1/n)");
  cmd->add_option("--reg-mode", o.reg_mode, "support_weighted | dense");
  cmd->add_option("--normalize", o.normalize, "none | l2 (per-sample)");
  cmd->add_option("--solve-tol", o.solve_tol, "reference solve tolerance");
}

void add_run_shape_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--schedule", o.schedule,
                  "sgd | sgd_nonconvex | hogwild | hogwild_nonconvex | "
                  "exp_period | custom_diminishing");
  cmd->add_option("--alpha", o.alpha, "schedule alpha (0 = kind default)");
  cmd->add_option("--alpha-t", o.alpha_t,
                  "constant alpha_t in [4, alpha] for delayed kinds "
                  "(0 = default 4; the growing-delay regime wants 12)");
  cmd->add_option("--custom-E", o.custom_E, "E for custom_diminishing");
  cmd->add_option("--tau", o.tau,
                  "delay bound (default: 0 sequential, 2*threads parallel)");
  cmd->add_flag("--tau-growing", o.tau_growing, "grow tau(t) up to --tau-cap");
  cmd->add_option("--tau-cap", o.tau_cap, "cap for the growing delay");
  cmd->add_option("--blocks,-D", o.blocks, "partition parameter D");
  cmd->add_option("--fraction", o.fraction, "filter fraction v; D = round(1/v)");
  cmd->add_option("--mask-policy", o.mask, "all | bernoulli | none");
  cmd->add_option("--mask-p", o.mask_p, "per-coordinate inclusion probability");
  cmd->add_option("--engine", o.engine, "sequential | parallel");
  cmd->add_option("--threads", o.threads, "worker count (parallel engine)");
  cmd->add_option("--counter-mode", o.counter_mode,
                  "shared_atomic | local_estimate");
  cmd->add_option("--iterations", o.iterations, "total iterations");
  cmd->add_option("--epochs", o.epochs, "epochs (n iterations each)");
  cmd->add_option("--checkpoints", o.checkpoints,
                  "geometric:<ratio> | every:<stride>");
  cmd->add_option("--seeds", o.seeds, "seed list 1,2,3 or range 1..10");
  cmd->add_option("--partition-seed", o.partition_seed, "block shuffle seed");
}

RunSpec to_run_spec(const CliOptions& o) {
  RunSpec s;
  if (o.objective == "toy" || o.objective == "toy_quadratic") {
    s.objective = ObjectiveKind::toy_quadratic;
    s.source = RunSpec::Source::toy;
  } else {
    if (o.objective == "logistic") {
      s.objective = ObjectiveKind::logistic_l2;
    } else if (o.objective == "least_squares") {
      s.objective = ObjectiveKind::least_squares_l2;
    } else {
      throw CLI::ValidationError("--objective", "unknown objective " + o.objective);
    }
    if (!o.synthetic_spec.empty()) {
      s.source = RunSpec::Source::synthetic;
      s.synthetic = SyntheticSpec::from_string(o.synthetic_spec);
    } else if (!o.dataset_path.empty()) {
      s.source = RunSpec::Source::file;
      s.dataset_path = o.dataset_path;
    } else {
      throw CLI::ValidationError("--synthetic/--dataset",
                                 "need a data source for this objective");
    }
  }
  s.reg_mode = o.reg_mode == "dense" ? RegularizationMode::dense
                                     : RegularizationMode::support_weighted;
  if (o.lambda == "auto") {
    s.lambda_auto = true;
  } else {
    s.lambda = parse_double(o.lambda, "--lambda");
  }
  s.normalize = o.normalize == "l2";
  s.subsample_rows = o.subsample;
  s.subsample_seed = o.subsample_seed;
  s.dimension_override = o.dimension_override;
  s.schedule = schedule_kind_from_string(o.schedule);
  s.alpha = o.alpha;
  s.alpha_t = o.alpha_t;
  s.custom_E = o.custom_E;
  s.tau_growing = o.tau_growing;
  s.tau_cap = o.tau_cap;
  s.mask_policy = mask_policy_from_string(o.mask);
  s.mask_p = o.mask_p;
  s.engine = o.engine == "parallel" ? EngineKind::parallel
                                    : EngineKind::sequential;
  s.threads = o.threads;
  s.counter_mode = o.counter_mode == "local_estimate"
                       ? CounterMode::local_estimate
                       : CounterMode::shared_atomic;
  if (s.engine == EngineKind::parallel) {
    if (o.mask != "bernoulli" || o.mask_p != 0.5) {
      throw CLI::ValidationError(
          "--mask-policy", "the parallel engine provides real inconsistency; "
                           "mask policies apply to the simulator only");
    }
    // the schedule's E needs an a-priori delay bound; default to 2P and
    // compare against the observed delay after the run
    s.tau = o.tau >= 0 ? o.tau : 2 * o.threads;
  } else {
    s.tau = o.tau >= 0 ? o.tau : 0;
  }
  if (o.fraction > 0.0) {
    s.fraction = o.fraction;
  } else {
    s.blocks = o.blocks > 0 ? o.blocks : 1;
  }
  s.partition_seed = o.partition_seed;
  s.checkpoint_spec = CheckpointSpec::from_string(o.checkpoints);
  s.seeds = parse_seed_list(o.seeds);
  s.solve_tolerance = o.solve_tol;
  return s;
}

void resolve_iterations(RunSpec& spec, const CliOptions& o,
                        const PreparedProblem& prep) {
  if (o.iterations > 0) {
    spec.iterations = o.iterations;
  } else if (o.epochs > 0) {
    spec.iterations =
        o.epochs * static_cast<std::int64_t>(prep.objective.n());
  } else {
    throw CLI::ValidationError("--iterations/--epochs", "no run length given");
  }
}

void print_constants_table(const PreparedProblem& p) {
  const auto& c = p.constants;
  std::printf("n        = %zu\n", p.objective.n());
  std::printf("d        = %d\n", p.objective.dim());
  std::printf("lambda   = %s\n", format_double(p.objective.lambda()).c_str());
  std::printf("L        = %s\n", format_double(c.L).c_str());
  std::printf("mu       = %s\n", format_double(c.mu).c_str());
  std::printf("kappa    = %s\n", format_double(c.kappa).c_str());
  std::printf("N        = %s\n", format_double(c.N).c_str());
  std::printf("F_star   = %s\n", format_double(c.F_star).c_str());
  std::printf("max_support_size      = %lld\n",
              static_cast<long long>(p.stats.max_support_size));
  std::printf("padded_support (D=%d) = %s\n", p.blocks,
              format_double(p.stats.padded_support).c_str());
  std::printf("mean_support          = %s\n",
              format_double(p.stats.mean_support).c_str());
  std::printf("collision_probability = %s\n",
              format_double(p.stats.collision_probability).c_str());
}

struct RunOutputs {
  std::vector<Trace> traces;
  Trace mean;
  double final_gap = 0.0;
  double slope = 0.0;
  bool slope_valid = false;
  bool envelope_pass = false;
  bool envelope_checked = false;
};

RunOutputs execute_run(const RunSpec& spec, const PreparedProblem& prep) {
  RunOutputs out;
  out.traces = run_all_seeds(spec, prep);
  out.mean = average_traces(out.traces);
  out.final_gap = out.mean.final_checkpoint().objective_gap;
  try {
    out.slope = fit_rate_slope(out.traces, 0.5).slope;
    out.slope_valid = true;
  } catch (const std::invalid_argument&) {
  }
  if (out.traces.size() >= 10) {
    const double alpha = prep.schedule.alpha;
    const ProblemConstants& c = prep.constants;
    const double E = prep.schedule.E;
    const int D = prep.blocks;
    const auto env = [&c, alpha, D, E](std::int64_t t) {
      return hogwild_envelope(c, alpha, D, E, t);
    };
    const auto from_t =
        static_cast<std::int64_t>(10.0 * E);
    if (from_t < spec.iterations) {
      out.envelope_pass =
          check_envelope_domination(out.traces, env, from_t).pass;
      out.envelope_checked = true;
    }
  }
  return out;
}

void write_run_outputs(const RunSpec& spec, const PreparedProblem& prep,
                       const RunOutputs& out, const std::string& dir) {
  fs::create_directories(dir);
  for (const Trace& tr : out.traces) {
    write_trace_csv_file(tr,
                         dir + "/trace_seed" + std::to_string(tr.seed) + ".csv");
  }
  write_trace_csv_file(out.mean, dir + "/trace_mean.csv");
  write_manifest_file(make_manifest(spec, prep), dir + "/manifest.txt");
  std::ofstream summary(dir + "/summary.txt");
  summary << "final_gap = " << format_double(out.final_gap) << '\n';
  summary << "final_squared_distance = "
          << format_double(out.mean.final_checkpoint().squared_distance)
          << '\n';
  if (out.slope_valid) {
    summary << "slope = " << format_double(out.slope) << '\n';
  }
  if (out.envelope_checked) {
    summary << "envelope_pass = " << (out.envelope_pass ? "1" : "0") << '\n';
  }
  for (const Trace& tr : out.traces) {
    if (tr.observed_delay > 0) {
      summary << "observed_tau_seed" << tr.seed << " = " << tr.observed_delay
              << '\n';
    }
  }
}

int cmd_run(const CliOptions& o) {
  RunSpec spec = to_run_spec(o);
  const PreparedProblem prep = prepare(spec);
  resolve_iterations(spec, o, prep);
  const RunOutputs out = execute_run(spec, prep);
  const std::string dir = o.output.empty() ? "run_output" : o.output;
  write_run_outputs(spec, prep, out, dir);
  std::printf("wrote %zu seed traces + mean + manifest to %s\n",
              out.traces.size(), dir.c_str());
  std::printf("final gap %s", format_double(out.final_gap).c_str());
  if (out.slope_valid) std::printf(", slope %.3f", out.slope);
  if (out.envelope_checked) {
    std::printf(", envelope %s", out.envelope_pass ? "pass" : "FAIL");
  }
  std::printf("\n");
  for (const Trace& tr : out.traces) {
    if (spec.engine == EngineKind::parallel &&
        tr.observed_delay > spec.tau) {
      std::printf("warning: observed tau %lld exceeded configured tau %d "
                  "(seed %lld)\n",
                  static_cast<long long>(tr.observed_delay), spec.tau,
                  static_cast<long long>(tr.seed));
    }
  }
  return 0;
}

int cmd_constants(const CliOptions& o) {
  RunSpec spec = to_run_spec(o);
  const PreparedProblem prep = prepare(spec);
  print_constants_table(prep);
  return 0;
}

int cmd_bounds(const CliOptions& o, const std::vector<double>& cap_ts,
               std::int64_t grid_iterations) {
  RunSpec spec = to_run_spec(o);
  const PreparedProblem prep = prepare(spec);
  print_constants_table(prep);
  const ProblemConstants& c = prep.constants;
  const double alpha = prep.schedule.alpha;
  std::printf("schedule = %s, alpha = %s, E = %s\n",
              to_string(spec.schedule), format_double(alpha).c_str(),
              format_double(prep.schedule.E).c_str());
  const BoundThresholds th =
      thresholds(c, alpha, prep.blocks, prep.w0,
                 prep.stats.collision_probability,
                 spec.schedule == ScheduleKind::sgd_nonconvex ||
                     spec.schedule == ScheduleKind::hogwild_nonconvex);
  std::printf("T  (burn-in)                = %s%s\n",
              format_double(th.burn_in).c_str(),
              th.variance_zero ? " (N = 0, flagged)" : "");
  std::printf("T0 (delay terms dominated)  = %s\n",
              format_double(th.delay_dominated_after).c_str());
  std::printf("T1 (w0 term dominated)      = %s\n",
              format_double(th.init_dominated_after).c_str());
  std::printf("leading constant 4a^2DN/mu^2 = %s\n",
              format_double(th.leading_constant).c_str());
  for (double t : cap_ts) {
    std::printf("tau_growth_cap(%s) = %s\n", format_double(t).c_str(),
                format_double(tau_growth_cap(t)).c_str());
  }
  if (grid_iterations > 0) {
    std::printf("t,envelope\n");
    for (std::int64_t t :
         make_checkpoints(CheckpointSpec{}, grid_iterations)) {
      double env;
      if (spec.schedule == ScheduleKind::sgd_convex ||
          spec.schedule == ScheduleKind::sgd_nonconvex) {
        if (static_cast<double>(t) < th.burn_in) continue;
        env = sgd_envelope(c, alpha, th.burn_in, t,
                           spec.schedule == ScheduleKind::sgd_nonconvex);
      } else {
        if (t < 1) continue;
        env = hogwild_envelope(c, alpha, prep.blocks, prep.schedule.E, t);
      }
      std::printf("%lld,%s\n", static_cast<long long>(t),
                  format_double(env).c_str());
    }
  }
  return 0;
}

int cmd_verify(const CliOptions& o, std::size_t probe_directions,
               double scale_L) {
  RunSpec spec = to_run_spec(o);
  const PreparedProblem prep = prepare(spec);
  ProblemConstants c = prep.constants;
  c.L *= scale_L;  // deliberate falsification hook
  c.kappa = c.L / c.mu;

  std::vector<VerificationReport> reports;
  const std::vector<DenseVector> probes = make_probe_points(
      static_cast<std::size_t>(prep.objective.dim()), c.w_star, prep.w0,
      probe_directions);
  if (c.convex_realizations) {
    reports.push_back(check_second_moment_bound(prep.objective, c, probes));
  }
  reports.push_back(
      check_second_moment_bound_nonconvex(prep.objective, c, probes));
  const auto max_support = prep.stats.max_support_size;
  for (int D : {1, 2, 3, static_cast<int>(max_support)}) {
    const FilterPartition p =
        FilterPartition::build(prep.objective, D, spec.partition_seed);
    reports.push_back(check_filter_unbiased(p, prep.objective));
  }
  {
    std::vector<std::pair<DenseVector, DenseVector>> pairs;
    for (std::size_t k = 0; k + 1 < std::min<std::size_t>(probes.size(), 9);
         k += 2) {
      pairs.push_back({probes[k], probes[k + 1]});
    }
    reports.push_back(check_collision_inequality(
        prep.objective, prep.stats.collision_probability, pairs));
  }

  bool all_pass = true;
  for (const VerificationReport& r : reports) {
    std::printf("[%s] %s (%s): worst margin %s\n", r.pass ? "pass" : "FAIL",
                r.check.c_str(), r.population.c_str(),
                format_double(r.worst_margin).c_str());
    for (std::size_t k = 0; k < std::min<std::size_t>(r.failures.size(), 5);
         ++k) {
      const CheckFailure& f = r.failures[k];
      std::printf("    %s: lhs %s > rhs %s\n", f.context.c_str(),
                  format_double(f.lhs).c_str(), format_double(f.rhs).c_str());
    }
    all_pass = all_pass && r.pass;
  }
  if (!o.output.empty()) {
    fs::create_directories(o.output);
    Manifest doc;
    for (std::size_t i = 0; i < reports.size(); ++i) {
      const VerificationReport& r = reports[i];
      const std::string key = "check" + std::to_string(i + 1) + "." + r.check;
      manifest_set(doc, key + ".pass", r.pass ? "1" : "0");
      manifest_set(doc, key + ".worst_margin", format_double(r.worst_margin));
      manifest_set(doc, key + ".population", r.population);
    }
    write_manifest_file(doc, o.output + "/verify_report.txt");
  }
  return all_pass ? 0 : 3;
}

// Rebuild the per-cell pieces while reusing the base constants/objective.
PreparedProblem prep_cell(const PreparedProblem& base, const RunSpec& cell) {
  return PreparedProblem{base.objective,
                         base.constants,
                         FilterPartition::build(base.objective, cell.blocks,
                                                cell.partition_seed),
                         sparsity_stats(base.objective, cell.blocks),
                         make_schedule(cell.schedule, base.constants, cell.tau,
                                       cell.blocks, cell.alpha, cell.custom_E),
                         base.w0,
                         cell.blocks,
                         base.label_rule,
                         base.dataset_hash};
}

int cmd_sweep(const CliOptions& o, const std::string& fractions_text,
              const std::string& taus_text) {
  if (fractions_text.empty() && taus_text.empty()) {
    throw CLI::ValidationError("--fractions/--taus", "empty sweep grid");
  }
  std::vector<double> fractions;
  if (!fractions_text.empty()) {
    std::stringstream fs_(fractions_text);
    std::string tok;
    while (std::getline(fs_, tok, ',')) {
      fractions.push_back(parse_double(tok, "fraction"));
    }
  } else {
    fractions.push_back(o.fraction > 0.0 ? o.fraction : 1.0);
  }
  RunSpec base = to_run_spec(o);
  std::vector<int> taus;
  if (!taus_text.empty()) {
    std::stringstream ts(taus_text);
    std::string tok;
    while (std::getline(ts, tok, ',')) {
      taus.push_back(static_cast<int>(parse_int(tok, "tau")));
    }
  } else {
    taus.push_back(base.tau);
  }

  // constants are shared across cells; prepare once on the base spec
  PreparedProblem base_prep = prepare(base);
  resolve_iterations(base, o, base_prep);

  const std::string dir = o.output.empty() ? "sweep_output" : o.output;
  fs::create_directories(dir);
  std::ofstream long_csv(dir + "/sweep_long.csv");
  long_csv << "cell_id,v,D,tau,P,t,t_prime,objective_gap,squared_distance\n";
  std::ofstream summary(dir + "/summary.csv");
  summary << "cell_id,v,D,tau,P,final_gap,slope,envelope_pass\n";

  int cell_id = 0;
  bool any_failed = false;
  for (double v : fractions) {
    for (int tau : taus) {
      RunSpec cell = base;
      cell.fraction = 0.0;
      cell.blocks = blocks_from_fraction(v);
      cell.tau = tau;
      std::string label = "cell" + std::to_string(cell_id);
      try {
        const PreparedProblem prep = prep_cell(base_prep, cell);
        const RunOutputs out = execute_run(cell, prep);
        for (const Checkpoint& cp : out.mean.checkpoints) {
          long_csv << label << ',' << format_double(v) << ',' << cell.blocks
                   << ',' << tau << ',' << cell.threads << ',' << cp.t << ','
                   << format_double(cp.t_prime) << ','
                   << format_double(cp.objective_gap) << ','
                   << format_double(cp.squared_distance) << '\n';
        }
        summary << label << ',' << format_double(v) << ',' << cell.blocks
                << ',' << tau << ',' << cell.threads << ','
                << format_double(out.final_gap) << ','
                << (out.slope_valid ? format_double(out.slope) : "nan") << ','
                << (out.envelope_checked ? (out.envelope_pass ? "1" : "0")
                                         : "na")
                << '\n';
        std::printf("%s: v=%s D=%d tau=%d final gap %s slope %s\n",
                    label.c_str(), format_double(v).c_str(), cell.blocks, tau,
                    format_double(out.final_gap).c_str(),
                    out.slope_valid ? format_double(out.slope).c_str() : "na");
      } catch (const std::exception& e) {
        any_failed = true;
        summary << label << ',' << format_double(v) << ',' << cell.blocks
                << ',' << tau << ',' << cell.threads << ",failed,failed,0\n";
        std::fprintf(stderr, "%s failed: %s\n", label.c_str(), e.what());
      }
      ++cell_id;
    }
  }
  std::printf("sweep wrote %s/sweep_long.csv and %s/summary.csv\n",
              dir.c_str(), dir.c_str());
  return any_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous/filtered SGD simulators, certified schedules, "
               "and verification suite"};
  app.require_subcommand(1);
  CliOptions o;

  CLI::App* run = app.add_subcommand("run", "run an experiment");
  add_common_options(run, o);
  add_run_shape_options(run, o);
  run->add_option("--out", o.output, "output directory");

  CLI::App* constants =
      app.add_subcommand("constants", "print problem constants");
  add_common_options(constants, o);
  constants->add_option("--blocks,-D", o.blocks, "partition parameter D");
  constants->add_option("--fraction", o.fraction, "filter fraction v");

  CLI::App* bounds =
      app.add_subcommand("bounds", "print thresholds and envelope values");
  add_common_options(bounds, o);
  add_run_shape_options(bounds, o);
  std::vector<double> cap_ts;
  bounds->add_option("--cap-t", cap_ts, "evaluate tau_growth_cap at t");
  std::int64_t grid_iterations = 0;
  bounds->add_option("--envelope-grid", grid_iterations,
                     "print envelope over a checkpoint grid up to t");

  CLI::App* verify =
      app.add_subcommand("verify", "run the verification battery");
  add_common_options(verify, o);
  verify->add_option("--partition-seed", o.partition_seed,
                     "block shuffle seed");
  std::size_t probe_directions = 40;
  verify->add_option("--probe-directions", probe_directions,
                     "directions per probe norm");
  double scale_L = 1.0;
  verify->add_option("--scale-L", scale_L,
                     "multiply the certified L (falsification aid)");
  verify->add_option("--out", o.output, "report output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "fraction x delay grid");
  add_common_options(sweep, o);
  add_run_shape_options(sweep, o);
  std::string fractions_text, taus_text;
  sweep->add_option("--fractions", fractions_text,
                    "comma list of fractions v");
  sweep->add_option("--taus", taus_text, "comma list of delays");
  sweep->add_option("--out", o.output, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (constants->parsed()) return cmd_constants(o);
    if (bounds->parsed()) return cmd_bounds(o, cap_ts, grid_iterations);
    if (verify->parsed()) return cmd_verify(o, probe_directions, scale_L);
    if (sweep->parsed()) return cmd_sweep(o, fractions_text, taus_text);
  } catch (const CLI::ValidationError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
