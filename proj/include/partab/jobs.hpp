#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "partab/formula.hpp"
#include "partab/partition.hpp"
#include "partab/tableau.hpp"
#include "partab/trace.hpp"

namespace partab {

// Report stream protocol.
inline constexpr const char* kVoteSat = "VOTE: formula is satisfiable";
inline constexpr const char* kVoteUnsat = "VOTE: formula is unsatisfiable";

// Exit codes of the job protocol.
inline constexpr int kExitUnsat = 0;
inline constexpr int kExitSat = 5;
inline constexpr int kExitError = 1;

class JobEnvError : public std::runtime_error {
 public:
  explicit JobEnvError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses the JOB_NO environment protocol `<job>/<jobs>@<depth>`.
/// Format errors and range errors (job > jobs, jobs < 1, depth < 1) are
/// rejected; job 0 is the overhead-measurement job and is accepted.
inline JobSpec parse_job_env(const std::string& s) {
  auto fail = [&](const std::string& why) -> JobSpec {
    throw JobEnvError("JOB_NO '" + s + "': " + why);
  };
  std::size_t slash = s.find('/');
  std::size_t at = s.find('@');
  if (slash == std::string::npos || at == std::string::npos || at < slash)
    return fail("expected <job>/<jobs>@<depth>");
  auto number = [&](std::string_view part, const char* what) -> std::uint32_t {
    if (part.empty()) fail(std::string("missing ") + what);
    std::uint64_t value = 0;
    for (char c : part) {
      if (c < '0' || c > '9') fail(std::string("malformed ") + what);
      value = value * 10 + static_cast<std::uint64_t>(c - '0');
      if (value > 0xffffffffull) fail(std::string("out-of-range ") + what);
    }
    return static_cast<std::uint32_t>(value);
  };
  JobSpec spec;
  spec.job_no = number(std::string_view(s).substr(0, slash), "job number");
  spec.number_of_jobs = number(std::string_view(s).substr(slash + 1, at - slash - 1), "job count");
  spec.split_depth = number(std::string_view(s).substr(at + 1), "split depth");
  if (spec.number_of_jobs < 1) fail("job count must be >= 1");
  if (spec.job_no > spec.number_of_jobs) fail("job number exceeds job count");
  if (spec.split_depth < 1) fail("split depth must be >= 1");
  return spec;
}

inline std::string format_job_env(const JobSpec& spec) {
  return std::to_string(spec.job_no) + "/" + std::to_string(spec.number_of_jobs) + "@" +
         std::to_string(spec.split_depth);
}

enum class JobStatus { Satisfiable, Unsatisfiable, Error, Cancelled };

struct JobOutcome {
  JobStatus status = JobStatus::Unsatisfiable;
  std::optional<LassoModel> witness;
  SearchStats stats;
  std::string error;

  int exit_code() const {
    switch (status) {
      case JobStatus::Satisfiable:
        return kExitSat;
      case JobStatus::Unsatisfiable:
        return kExitUnsat;
      default:
        return kExitError;
    }
  }
};

struct RunJobHooks {
  TraceSink* trace = nullptr;
  /// Collects the crossing indices this job kept (did not decline).
  std::vector<std::uint64_t>* kept_crossings = nullptr;
  const std::atomic<bool>* cancel = nullptr;
};

/// Runs one partition of the search: the tableau with the Decline rule bound
/// to spec.  Budget exhaustion is a distinct non-voting outcome, never a
/// verdict.  Job 0 declines every crossing; it reports Unsatisfiable unless
/// the formula is satisfiable entirely above the split depth, and is only
/// ever used for overhead measurement.
inline JobOutcome run_job(const Formula& f, const JobSpec& spec, const Budget& budget,
                          const RunJobHooks& hooks = {}) {
  EngineOptions options;
  options.budget = budget;
  options.trace = hooks.trace;
  options.trace_split_depth = spec.split_depth;
  options.cancel = hooks.cancel;

  DeclineState state;
  options.vertex_hook = [&state, &spec, &hooks](const VertexVisit& v) {
    bool at_crossing = v.depth == spec.split_depth && state.last_depth < spec.split_depth;
    bool veto = decline(state, v.depth, spec);
    if (at_crossing && !veto && hooks.kept_crossings)
      hooks.kept_crossings->push_back(state.width);
    return veto ? HookAction::VetoBranch : HookAction::Proceed;
  };

  JobOutcome outcome;
  try {
    Verdict v = TableauEngine(f, std::move(options)).solve();
    outcome.status = v.outcome == Outcome::Satisfiable ? JobStatus::Satisfiable
                                                       : JobStatus::Unsatisfiable;
    outcome.witness = std::move(v.witness);
    outcome.stats = v.stats;
  } catch (const SolveCancelled&) {
    outcome.status = JobStatus::Cancelled;
  } catch (const BudgetExceeded& e) {
    outcome.status = JobStatus::Error;
    outcome.error = e.what();
  }
  return outcome;
}

/// Runs the tableau without any Decline hook (serial mode).
inline JobOutcome run_serial(const Formula& f, const Budget& budget, const RunJobHooks& hooks = {},
                             std::optional<std::uint32_t> trace_split_depth = {}) {
  EngineOptions options;
  options.budget = budget;
  options.trace = hooks.trace;
  options.trace_split_depth = trace_split_depth;
  options.cancel = hooks.cancel;
  JobOutcome outcome;
  try {
    Verdict v = TableauEngine(f, std::move(options)).solve();
    outcome.status = v.outcome == Outcome::Satisfiable ? JobStatus::Satisfiable
                                                       : JobStatus::Unsatisfiable;
    outcome.witness = std::move(v.witness);
    outcome.stats = v.stats;
  } catch (const SolveCancelled&) {
    outcome.status = JobStatus::Cancelled;
  } catch (const BudgetExceeded& e) {
    outcome.status = JobStatus::Error;
    outcome.error = e.what();
  }
  return outcome;
}

enum class OrchestrationOutcome { Satisfiable, Unsatisfiable, Error };

struct OrchestrationResult {
  OrchestrationOutcome outcome = OrchestrationOutcome::Error;
  std::optional<LassoModel> witness;   // from the first satisfiable vote
  std::uint32_t winning_job = 0;       // job number of that vote, 0 if none
  std::vector<JobOutcome> jobs;        // indexed by job number - 1
};

/// Executes one job; must poll the cancellation flag between units of work.
using JobExecutor = std::function<JobOutcome(const JobSpec& spec, const std::atomic<bool>& cancel)>;

/// Voting orchestration over an arbitrary executor.
///
/// Jobs 1..n are queued FIFO by job number over `workers` slots.  The first
/// satisfiable vote decides the formula: all other jobs are cancelled and
/// their late votes are logged and discarded.  Unsatisfiable is declared
/// only once all n jobs have voted unsatisfiable; if any job errors out and
/// no satisfiable vote arrives, the overall result is an error, because a
/// partition that was never searched could hide every model.
inline OrchestrationResult orchestrate_with(const JobExecutor& executor, std::uint32_t n,
                                            std::uint32_t split_depth, std::uint32_t workers,
                                            std::ostream* report = nullptr) {
  if (n < 1) throw std::invalid_argument("orchestrate: need at least one job");
  if (split_depth < 1) throw std::invalid_argument("orchestrate: split depth must be >= 1");
  if (workers < 1) workers = 1;

  OrchestrationResult result;
  result.jobs.resize(n);

  std::atomic<bool> cancel{false};
  std::atomic<std::uint32_t> next_job{1};

  std::mutex mtx;
  std::condition_variable cv;
  std::uint32_t votes = 0;
  bool sat_seen = false;

  auto worker = [&]() {
    for (;;) {
      std::uint32_t job = next_job.fetch_add(1, std::memory_order_relaxed);
      if (job > n) return;
      JobSpec spec{job, n, split_depth};
      JobOutcome outcome;
      if (cancel.load(std::memory_order_relaxed))
        outcome.status = JobStatus::Cancelled;  // queued job never started
      else
        outcome = executor(spec, cancel);
      std::lock_guard<std::mutex> lock(mtx);
      if (outcome.status == JobStatus::Satisfiable && !sat_seen) {
        sat_seen = true;
        result.witness = outcome.witness;
        result.winning_job = job;
        cancel.store(true, std::memory_order_relaxed);
      }
      result.jobs[job - 1] = std::move(outcome);
      ++votes;
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  std::uint32_t slots = std::min(workers, n);
  pool.reserve(slots);
  for (std::uint32_t i = 0; i < slots; ++i) pool.emplace_back(worker);

  {
    std::unique_lock<std::mutex> lock(mtx);
    cv.wait(lock, [&] { return sat_seen || votes == n; });
    if (sat_seen) cancel.store(true, std::memory_order_relaxed);
  }
  for (auto& t : pool) t.join();

  if (sat_seen) {
    result.outcome = OrchestrationOutcome::Satisfiable;
    if (report) *report << kVoteSat << '\n';
    return result;
  }
  bool all_unsat = true;
  for (const auto& job : result.jobs)
    if (job.status != JobStatus::Unsatisfiable) all_unsat = false;
  result.outcome = all_unsat ? OrchestrationOutcome::Unsatisfiable : OrchestrationOutcome::Error;
  if (report && result.outcome == OrchestrationOutcome::Unsatisfiable) *report << kVoteUnsat << '\n';
  return result;
}

/// Voting orchestration over in-process tableau jobs, one engine per job.
/// Jobs share only the immutable formula and the cancellation flag.
/// Worker slots default to the machine's logical CPU count.
inline OrchestrationResult orchestrate(const Formula& f, std::uint32_t n,
                                       std::uint32_t split_depth,
                                       std::uint32_t workers = std::thread::hardware_concurrency(),
                                       const Budget& budget = {}, std::ostream* report = nullptr) {
  JobExecutor executor = [&f, &budget](const JobSpec& spec, const std::atomic<bool>& cancel) {
    RunJobHooks hooks;
    hooks.cancel = &cancel;
    return run_job(f, spec, budget, hooks);
  };
  return orchestrate_with(executor, n, split_depth, workers, report);
}

}  // namespace partab
