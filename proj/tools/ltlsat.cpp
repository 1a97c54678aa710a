// Command-line front end: serial and parallel satisfiability checking, the
// pseudo-random formula generator, trace profiling, and the benchmark
// harness.  The solve subcommand honors the JOB_NO environment protocol
// (<job>/<jobs>@<split_depth>) and the 0/5/1 exit-code contract, so it can
// be driven directly from shell-level parallel runners.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "partab/bench.hpp"
#include "partab/gen.hpp"
#include "partab/jobs.hpp"
#include "partab/oracle.hpp"
#include "partab/parse.hpp"
#include "partab/process.hpp"
#include "partab/profile.hpp"
#include "partab/tableau.hpp"
#include "partab/trace.hpp"

namespace {

using namespace partab;

std::chrono::nanoseconds parse_duration(const std::string& text) {
  std::size_t pos = 0;
  double value = std::stod(text, &pos);
  std::string unit = text.substr(pos);
  if (unit.empty() || unit == "s") return std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double>(value));
  if (unit == "ms")
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double, std::milli>(value));
  if (unit == "m")
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double, std::ratio<60>>(value));
  throw CLI::ValidationError("duration", "unknown unit '" + unit + "' (use s, ms or m)");
}

std::vector<std::uint32_t> parse_u32_list(const std::string& text) {
  std::vector<std::uint32_t> out;
  std::size_t lo = 0;
  while (lo <= text.size()) {
    std::size_t hi = text.find(',', lo);
    if (hi == std::string::npos) hi = text.size();
    if (hi > lo) out.push_back(static_cast<std::uint32_t>(std::stoul(text.substr(lo, hi - lo))));
    lo = hi + 1;
  }
  if (out.empty()) throw CLI::ValidationError("list", "expected comma-separated integers");
  return out;
}

struct BudgetFlags {
  std::uint64_t max_vertices = 0;
  std::string timeout;

  Budget to_budget() const {
    Budget b;
    if (max_vertices > 0) b.max_vertices = max_vertices;
    if (!timeout.empty()) b.max_time = parse_duration(timeout);
    return b;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-vertices", max_vertices, "vertex budget (0 = unlimited)");
    cmd->add_option("--timeout,--budget", timeout, "wall-clock budget, e.g. 60s, 500ms, 2m");
  }
};

int cmd_solve(const std::string& formula_text, const std::string& trace_path,
              std::uint32_t trace_depth, const BudgetFlags& budget_flags) {
  Formula f = parse(formula_text);
  Budget budget = budget_flags.to_budget();

  std::optional<JobSpec> job;
  if (const char* env = std::getenv("JOB_NO")) job = parse_job_env(env);

  std::optional<FileTraceSink> trace;
  RunJobHooks hooks;
  if (!trace_path.empty()) {
    trace.emplace(trace_path);
    hooks.trace = &*trace;
  }

  JobOutcome outcome;
  if (job) {
    outcome = run_job(f, *job, budget, hooks);
  } else {
    std::optional<std::uint32_t> annotate;
    if (trace_depth > 0) annotate = trace_depth;
    outcome = run_serial(f, budget, hooks, annotate);
  }

  switch (outcome.status) {
    case JobStatus::Satisfiable:
      std::cout << "satisfiable\n";
      if (outcome.witness) std::cout << render_witness(*outcome.witness);
      break;
    case JobStatus::Unsatisfiable:
      std::cout << "unsatisfiable\n";
      break;
    default:
      std::cout << "error: " << outcome.error << "\n";
      break;
  }
  std::cerr << "vertices: " << outcome.stats.vertices_expanded
            << ", max depth: " << outcome.stats.max_depth << "\n";
  return outcome.exit_code();
}

int cmd_parallel(const std::string& formula_text, std::uint32_t jobs, std::uint32_t depth,
                 std::uint32_t workers, bool process_mode, const std::string& trace_prefix,
                 const BudgetFlags& budget_flags, const char* argv0) {
  Formula f = parse(formula_text);

  if (process_mode) {
    if (!trace_prefix.empty()) {
      std::cerr << "--trace is not supported in process mode\n";
      return kExitError;
    }
    std::vector<std::string> extra;
    if (budget_flags.max_vertices > 0)
      extra = {"--max-vertices", std::to_string(budget_flags.max_vertices)};
    if (!budget_flags.timeout.empty()) {
      extra.push_back("--timeout");
      extra.push_back(budget_flags.timeout);
    }
    ProcessOrchestrator orchestrator(std::filesystem::canonical(argv0).string(), formula_text,
                                     extra);
    auto result = orchestrator.run(jobs, depth, workers, &std::cout);
    if (result.outcome == OrchestrationOutcome::Satisfiable) {
      std::cout << result.winner_output;
      return kExitSat;
    }
    return result.outcome == OrchestrationOutcome::Unsatisfiable ? kExitUnsat : kExitError;
  }

  Budget budget = budget_flags.to_budget();
  std::vector<std::unique_ptr<FileTraceSink>> sinks;
  JobExecutor executor = [&](const JobSpec& spec, const std::atomic<bool>& cancel) {
    RunJobHooks hooks;
    hooks.cancel = &cancel;
    std::unique_ptr<FileTraceSink> sink;
    if (!trace_prefix.empty()) {
      sink = std::make_unique<FileTraceSink>(trace_prefix + ".job" + std::to_string(spec.job_no));
      hooks.trace = sink.get();
    }
    JobOutcome out = run_job(f, spec, budget, hooks);
    return out;
  };
  OrchestrationResult result = orchestrate_with(executor, jobs, depth, workers, &std::cout);
  switch (result.outcome) {
    case OrchestrationOutcome::Satisfiable:
      if (result.witness) std::cout << render_witness(*result.witness);
      std::cerr << "winning job: " << result.winning_job << "\n";
      return kExitSat;
    case OrchestrationOutcome::Unsatisfiable:
      return kExitUnsat;
    default:
      std::cerr << "error: at least one job exhausted its budget with no satisfiable vote\n";
      return kExitError;
  }
}

int cmd_gen(std::size_t length, std::size_t count, std::uint64_t seed, const std::string& out_dir,
            const std::string& atoms_csv) {
  GenConfig cfg;
  cfg.length = length;
  cfg.atoms.clear();
  std::size_t lo = 0;
  while (lo <= atoms_csv.size()) {
    std::size_t hi = atoms_csv.find(',', lo);
    if (hi == std::string::npos) hi = atoms_csv.size();
    if (hi > lo) cfg.atoms.push_back(atoms_csv.substr(lo, hi - lo));
    lo = hi + 1;
  }

  for (std::size_t i = 0; i < count; ++i) {
    cfg.seed = seed + i;
    std::string text = render(gen(cfg));
    if (out_dir.empty()) {
      std::cout << text << "\n";
    } else {
      std::filesystem::create_directories(out_dir);
      std::string name = "len" + std::to_string(length) + "_seed" + std::to_string(cfg.seed) +
                         ".ltl";
      std::ofstream out(std::filesystem::path(out_dir) / name);
      out << text << "\n";
    }
  }
  return 0;
}

int cmd_profile(const std::vector<std::string>& trace_paths, bool width,
                const std::string& estimate_spec, const std::string& sweep_jobs,
                const std::string& sweep_depths, bool vertices) {
  std::vector<std::vector<TraceRecord>> traces;
  for (const auto& path : trace_paths) traces.push_back(read_trace_file(path));

  if (width) {
    write_width_profile(width_profile(traces.at(0)), std::cout);
    return 0;
  }
  if (!estimate_spec.empty()) {
    auto nd = parse_u32_list(estimate_spec);
    if (nd.size() != 2) throw CLI::ValidationError("--estimate", "expected n,d");
    write_estimate(estimate_jobs(traces.at(0), nd[0], nd[1]), std::cout);
    return 0;
  }
  if (!sweep_jobs.empty() && !sweep_depths.empty()) {
    SweepGrid grid = sweep(traces, parse_u32_list(sweep_jobs), parse_u32_list(sweep_depths));
    write_sweep(grid, std::cout, vertices);
    return 0;
  }
  std::cerr << "profile: choose --width, --estimate n,d or --sweep\n";
  return 1;
}

int cmd_bench(const std::string& dir, const std::string& jobs_csv, const std::string& depths_csv,
              const BudgetFlags& budget_flags, const std::string& out_dir, std::uint32_t workers) {
  IngestResult corpus = ingest(dir);
  for (const auto& warning : corpus.warnings) std::cerr << "warning: " << warning << "\n";
  std::cerr << "loaded " << corpus.items.size() << " formulas\n";

  SuiteReport report = run_suite(corpus.items, parse_u32_list(jobs_csv),
                                 parse_u32_list(depths_csv), budget_flags.to_budget(), workers);

  std::filesystem::create_directories(out_dir);
  std::filesystem::path out(out_dir);
  {
    std::ofstream items(out / "items.csv");
    write_items_csv(report, items);
  }
  {
    std::ofstream speedups(out / "speedups.csv");
    write_speedups_csv(report, speedups);
  }
  {
    std::ofstream curve(out / "cumulative.csv");
    write_curve_csv(report, curve);
  }
  {
    std::ofstream summary(out / "summary.txt");
    write_summary(report, summary);
  }
  write_summary(report, std::cout);
  return 0;
}

int cmd_oracle(const std::string& formula_text) {
  Formula f = parse(formula_text);
  Outcome outcome = decide_reference(f, {200, 16});
  if (outcome == Outcome::Satisfiable) {
    std::cout << "satisfiable\n";
    return kExitSat;
  }
  std::cout << "unsatisfiable\n";
  return kExitUnsat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LTL satisfiability via a partitioned one-pass tree tableau"};
  app.require_subcommand(1);

  std::string formula_text, trace_path, trace_prefix;
  std::uint32_t trace_depth = 0;
  BudgetFlags solve_budget, parallel_budget, bench_budget;

  auto* solve_cmd = app.add_subcommand("solve", "decide one formula serially (honors JOB_NO)");
  solve_cmd->add_option("-l,--formula", formula_text, "formula literal")->required();
  solve_cmd->add_option("--trace", trace_path, "write per-vertex trace records to this file");
  solve_cmd->add_option("--trace-depth", trace_depth,
                        "annotate trace crossings for this split depth");
  solve_budget.attach(solve_cmd);

  std::uint32_t jobs = 2, depth = 18, workers = std::thread::hardware_concurrency();
  bool process_mode = false;
  auto* parallel_cmd = app.add_subcommand("parallel", "decide one formula with n independent jobs");
  parallel_cmd->add_option("-l,--formula", formula_text, "formula literal")->required();
  parallel_cmd->add_option("-n,--jobs", jobs, "number of jobs")->required();
  parallel_cmd->add_option("-d,--split-depth", depth, "split depth")->required();
  parallel_cmd->add_option("--workers", workers, "concurrent execution slots");
  parallel_cmd->add_flag("--process", process_mode, "spawn one OS process per job");
  parallel_cmd->add_option("--trace", trace_prefix, "per-job trace file prefix");
  parallel_budget.attach(parallel_cmd);

  std::size_t gen_length = 50, gen_count = 1;
  std::uint64_t gen_seed = 1;
  std::string gen_out, gen_atoms = "p,q";
  auto* gen_cmd = app.add_subcommand("gen", "generate pseudo-random formulas");
  gen_cmd->add_option("--length", gen_length, "AST node count");
  gen_cmd->add_option("--count", gen_count, "how many formulas (seeds seed..seed+count-1)");
  gen_cmd->add_option("--seed", gen_seed, "first seed");
  gen_cmd->add_option("--out", gen_out, "write one file per formula into this directory");
  gen_cmd->add_option("--atoms", gen_atoms, "comma-separated atom names");

  std::vector<std::string> profile_traces;
  bool profile_width = false, profile_vertices = false;
  std::string estimate_spec, sweep_jobs, sweep_depths;
  auto* profile_cmd = app.add_subcommand("profile", "analyze per-vertex traces");
  profile_cmd->add_option("--trace", profile_traces, "trace file (repeatable)")->required();
  profile_cmd->add_flag("--width", profile_width, "emit the depth-vs-width table");
  profile_cmd->add_option("--estimate", estimate_spec, "per-job workload estimate for n,d");
  profile_cmd->add_option("--sweep-jobs", sweep_jobs, "comma-separated job counts");
  profile_cmd->add_option("--sweep-depths", sweep_depths, "comma-separated split depths");
  profile_cmd->add_flag("--vertices", profile_vertices, "sweep in vertex counts, not nanoseconds");

  std::string bench_dir, bench_jobs = "1,2,8", bench_depths = "18", bench_out = "report";
  std::uint32_t bench_workers = std::thread::hardware_concurrency();
  auto* bench_cmd = app.add_subcommand("bench", "run a corpus serially and parallel");
  bench_cmd->add_option("--dir", bench_dir, "corpus directory")->required();
  bench_cmd->add_option("--jobs", bench_jobs, "comma-separated job counts");
  bench_cmd->add_option("--depths", bench_depths, "comma-separated split depths");
  bench_cmd->add_option("--out", bench_out, "report output directory");
  bench_cmd->add_option("--workers", bench_workers, "concurrent execution slots");
  bench_budget.attach(bench_cmd);

  auto* oracle_cmd = app.add_subcommand("oracle", "reference decision for small formulas");
  oracle_cmd->add_option("-l,--formula", formula_text, "formula literal")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return cmd_solve(formula_text, trace_path, trace_depth, solve_budget);
    if (parallel_cmd->parsed())
      return cmd_parallel(formula_text, jobs, depth, workers, process_mode, trace_prefix,
                          parallel_budget, argv[0]);
    if (gen_cmd->parsed()) return cmd_gen(gen_length, gen_count, gen_seed, gen_out, gen_atoms);
    if (profile_cmd->parsed())
      return cmd_profile(profile_traces, profile_width, estimate_spec, sweep_jobs, sweep_depths,
                         profile_vertices);
    if (bench_cmd->parsed())
      return cmd_bench(bench_dir, bench_jobs, bench_depths, bench_budget, bench_out,
                       bench_workers);
    if (oracle_cmd->parsed()) return cmd_oracle(formula_text);
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
