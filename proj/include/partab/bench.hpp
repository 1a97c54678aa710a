#pragma once

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "partab/formula.hpp"
#include "partab/jobs.hpp"
#include "partab/parse.hpp"

namespace partab {

struct BenchItem {
  std::string name;  // path-derived identifier, unique within a suite
  Formula formula;
  std::optional<Outcome> expected;
};

struct IngestResult {
  std::vector<BenchItem> items;
  std::vector<std::string> warnings;
};

/// Recursively loads every readable formula file under dir (one formula per
/// file, trailing whitespace ignored).  Files that cannot be read or parsed
/// produce warnings and are skipped; an entirely unusable directory is an
/// error.
inline IngestResult ingest(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir)) throw std::invalid_argument("ingest: no such directory: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  IngestResult result;
  for (const auto& path : files) {
    std::ifstream in(path);
    if (!in) {
      result.warnings.push_back(path.string() + ": unreadable, skipped");
      continue;
    }
    std::ostringstream content;
    content << in.rdbuf();
    std::string text = content.str();
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
    try {
      Formula f = parse(text);
      result.items.push_back(
          {fs::relative(path, dir).generic_string(), std::move(f), std::nullopt});
    } catch (const ParseError& e) {
      result.warnings.push_back(path.string() + ": " + e.what() + ", skipped");
    }
  }
  if (result.items.empty())
    throw std::runtime_error("ingest: no formula in " + dir.string() + " parses");
  return result;
}

/// Difficulty decade k holds runs in [10^(k-1), 10^k) seconds, k in 0..3;
/// anything easier or harder is out of range for benchmarking.
struct DifficultyClass {
  char polarity = 'U';  // 'U' or 'S'
  int decade = 0;
  bool in_range = false;

  std::string label() const {
    if (!in_range) return "out-of-range";
    return std::string(1, polarity) + std::to_string(decade);
  }
};

inline DifficultyClass classify(std::chrono::duration<double> serial_time, Outcome verdict) {
  DifficultyClass cls;
  cls.polarity = verdict == Outcome::Satisfiable ? 'S' : 'U';
  double s = serial_time.count();
  for (int k = 0; k <= 3; ++k) {
    double lo = std::pow(10.0, k - 1);
    double hi = std::pow(10.0, k);
    if (s >= lo && s < hi) {
      cls.decade = k;
      cls.in_range = true;
      return cls;
    }
  }
  cls.in_range = false;
  return cls;
}

enum class RunStatus { Satisfiable, Unsatisfiable, Timeout };

/// How a speedup value is to be read when a timeout is involved: a serial
/// timeout makes the ratio a lower bound, a parallel timeout an upper
/// bound.
enum class SpeedupKind { None, Exact, LowerBound, UpperBound };

struct ItemRun {
  std::string item;
  std::string config;  // "serial" or "<jobs>@<depth>"
  RunStatus status = RunStatus::Timeout;
  double seconds = 0.0;
  std::uint64_t vertices = 0;
  SpeedupKind speedup_kind = SpeedupKind::None;
  double speedup = 0.0;
};

struct SpeedupRow {
  std::string set_label;
  std::uint32_t jobs = 0;
  std::uint32_t depth = 0;
  std::size_t count = 0;  // items with both serial and parallel completed
  double mean = 0, median = 0, min = 0, max = 0;
};

struct CurvePoint {
  std::string config;
  double cpu_seconds = 0;  // jobs x wall seconds the item needed
  std::size_t cumulative = 0;
};

struct SuiteReport {
  std::vector<ItemRun> runs;
  std::vector<SpeedupRow> speedups;
  std::vector<CurvePoint> curve;
  std::vector<std::string> notes;
};

namespace detail {

inline ItemRun run_one(const BenchItem& item, const std::string& config, const Formula& f,
                       std::uint32_t jobs, std::uint32_t depth, std::uint32_t workers,
                       const Budget& budget) {
  ItemRun run;
  run.item = item.name;
  run.config = config;
  auto t0 = std::chrono::steady_clock::now();
  try {
    if (jobs == 0) {  // serial
      Verdict v = solve(f, EngineOptions{budget, {}, nullptr, {}, nullptr});
      run.status = v.outcome == Outcome::Satisfiable ? RunStatus::Satisfiable
                                                     : RunStatus::Unsatisfiable;
      run.vertices = v.stats.vertices_expanded;
    } else {
      OrchestrationResult r = orchestrate(f, jobs, depth, workers, budget);
      if (r.outcome == OrchestrationOutcome::Satisfiable)
        run.status = RunStatus::Satisfiable;
      else if (r.outcome == OrchestrationOutcome::Unsatisfiable)
        run.status = RunStatus::Unsatisfiable;
      else
        run.status = RunStatus::Timeout;
      for (const auto& job : r.jobs) run.vertices += job.stats.vertices_expanded;
    }
  } catch (const BudgetExceeded&) {
    run.status = RunStatus::Timeout;
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

}  // namespace detail

/// Runs every item serially and under each (jobs, depth) configuration, one
/// item at a time so timings do not interfere.  Timeouts are first-class
/// results and never abort the suite.  Speedup statistics are aggregated per
/// difficulty class over items where both runs completed.
inline SuiteReport run_suite(const std::vector<BenchItem>& items,
                             const std::vector<std::uint32_t>& jobs_list,
                             const std::vector<std::uint32_t>& depth_list, const Budget& budget,
                             std::uint32_t workers = std::thread::hardware_concurrency()) {
  if (items.empty()) throw std::invalid_argument("run_suite: empty suite");
  SuiteReport report;

  struct PerItem {
    DifficultyClass cls;
    double serial_seconds = 0;
    bool serial_done = false;
    RunStatus serial_status = RunStatus::Timeout;
  };
  std::vector<PerItem> info(items.size());

  for (std::size_t i = 0; i < items.size(); ++i) {
    ItemRun serial = detail::run_one(items[i], "serial", items[i].formula, 0, 0, workers, budget);
    info[i].serial_seconds = serial.seconds;
    info[i].serial_done = serial.status != RunStatus::Timeout;
    info[i].serial_status = serial.status;
    if (info[i].serial_done)
      info[i].cls = classify(std::chrono::duration<double>(serial.seconds),
                             serial.status == RunStatus::Satisfiable ? Outcome::Satisfiable
                                                                     : Outcome::Unsatisfiable);
    report.runs.push_back(std::move(serial));
    if (items[i].expected && info[i].serial_done) {
      bool got_sat = info[i].serial_status == RunStatus::Satisfiable;
      if (got_sat != (*items[i].expected == Outcome::Satisfiable))
        report.notes.push_back(items[i].name + ": serial verdict disagrees with expected label");
    }
  }

  struct SpeedupSample {
    std::string set_label;
    double ratio;
  };

  for (std::uint32_t jobs : jobs_list) {
    for (std::uint32_t depth : depth_list) {
      std::string config = std::to_string(jobs) + "@" + std::to_string(depth);
      std::vector<SpeedupSample> samples;
      std::vector<double> sat_cpu_seconds;
      for (std::size_t i = 0; i < items.size(); ++i) {
        ItemRun run =
            detail::run_one(items[i], config, items[i].formula, jobs, depth, workers, budget);
        if (run.status == RunStatus::Satisfiable) sat_cpu_seconds.push_back(jobs * run.seconds);
        bool parallel_done = run.status != RunStatus::Timeout;
        if (run.seconds > 0) {
          double ratio = info[i].serial_seconds / run.seconds;
          if (parallel_done && info[i].serial_done) {
            run.speedup_kind = SpeedupKind::Exact;
            run.speedup = ratio;
          } else if (parallel_done && !info[i].serial_done) {
            // Serial gave up: the true serial time is at least what it spent.
            run.speedup_kind = SpeedupKind::LowerBound;
            run.speedup = ratio;
          } else if (!parallel_done && info[i].serial_done) {
            run.speedup_kind = SpeedupKind::UpperBound;
            run.speedup = ratio;
          }
        }
        if (parallel_done && info[i].serial_done) {
          if ((run.status == RunStatus::Satisfiable) !=
              (info[i].serial_status == RunStatus::Satisfiable))
            report.notes.push_back(items[i].name + " " + config +
                                   ": verdict disagrees with serial run");
          samples.push_back({info[i].cls.label(), info[i].serial_seconds / run.seconds});
        }
        report.runs.push_back(std::move(run));
      }

      // Per-set speedup statistics.
      std::sort(samples.begin(), samples.end(),
                [](const auto& a, const auto& b) { return a.set_label < b.set_label; });
      for (std::size_t lo = 0; lo < samples.size();) {
        std::size_t hi = lo;
        while (hi < samples.size() && samples[hi].set_label == samples[lo].set_label) ++hi;
        std::vector<double> ratios;
        for (std::size_t k = lo; k < hi; ++k) ratios.push_back(samples[k].ratio);
        std::sort(ratios.begin(), ratios.end());
        SpeedupRow row;
        row.set_label = samples[lo].set_label;
        row.jobs = jobs;
        row.depth = depth;
        row.count = ratios.size();
        row.min = ratios.front();
        row.max = ratios.back();
        row.median = ratios[ratios.size() / 2];
        double sum = 0;
        for (double r : ratios) sum += r;
        row.mean = sum / static_cast<double>(ratios.size());
        report.speedups.push_back(row);
        lo = hi;
      }

      // Cumulative formulas shown satisfiable within x CPU-seconds.
      std::sort(sat_cpu_seconds.begin(), sat_cpu_seconds.end());
      for (std::size_t k = 0; k < sat_cpu_seconds.size(); ++k)
        report.curve.push_back({config, sat_cpu_seconds[k], k + 1});
    }
  }
  return report;
}

inline void write_items_csv(const SuiteReport& report, std::ostream& out) {
  out << "item,config,status,seconds,vertices,speedup\n";
  for (const auto& run : report.runs) {
    const char* status = run.status == RunStatus::Satisfiable     ? "sat"
                         : run.status == RunStatus::Unsatisfiable ? "unsat"
                                                                  : "timeout";
    out << run.item << ',' << run.config << ',' << status << ',' << run.seconds << ','
        << run.vertices << ',';
    switch (run.speedup_kind) {
      case SpeedupKind::Exact:
        out << run.speedup;
        break;
      case SpeedupKind::LowerBound:
        out << ">=" << run.speedup;
        break;
      case SpeedupKind::UpperBound:
        out << "<=" << run.speedup;
        break;
      case SpeedupKind::None:
        out << '-';
        break;
    }
    out << '\n';
  }
}

inline void write_speedups_csv(const SuiteReport& report, std::ostream& out) {
  out << "set,jobs,depth,count,mean,median,min,max\n";
  for (const auto& row : report.speedups)
    out << row.set_label << ',' << row.jobs << ',' << row.depth << ',' << row.count << ','
        << row.mean << ',' << row.median << ',' << row.min << ',' << row.max << '\n';
}

inline void write_curve_csv(const SuiteReport& report, std::ostream& out) {
  out << "config,cpu_seconds,cumulative_sat\n";
  for (const auto& point : report.curve)
    out << point.config << ',' << point.cpu_seconds << ',' << point.cumulative << '\n';
}

inline void write_summary(const SuiteReport& report, std::ostream& out) {
  std::size_t sat = 0, unsat = 0, timeout = 0;
  for (const auto& run : report.runs) {
    if (run.status == RunStatus::Satisfiable) ++sat;
    else if (run.status == RunStatus::Unsatisfiable) ++unsat;
    else ++timeout;
  }
  out << "runs: " << report.runs.size() << " (sat " << sat << ", unsat " << unsat << ", timeout "
      << timeout << ")\n";
  for (const auto& note : report.notes) out << "note: " << note << '\n';
}

}  // namespace partab
