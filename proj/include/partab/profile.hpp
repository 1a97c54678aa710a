#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "partab/jobs.hpp"
#include "partab/partition.hpp"
#include "partab/trace.hpp"

namespace partab {

class TraceMismatchError : public std::runtime_error {
 public:
  explicit TraceMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Vertex counts by depth; counts[0] is the root's depth.
struct WidthProfile {
  std::vector<std::uint64_t> counts;

  std::uint64_t total() const {
    std::uint64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }
};

/// Builds the depth-vs-width profile of one run's trace.
inline WidthProfile width_profile(const std::vector<TraceRecord>& trace) {
  if (trace.empty()) throw std::invalid_argument("width_profile: empty trace");
  WidthProfile profile;
  for (const auto& rec : trace) {
    if (profile.counts.size() < rec.depth) profile.counts.resize(rec.depth, 0);
    ++profile.counts[rec.depth - 1];
  }
  return profile;
}

inline void write_width_profile(const WidthProfile& profile, std::ostream& out) {
  out << "depth,count\n";
  for (std::size_t d = 0; d < profile.counts.size(); ++d)
    out << d << ',' << profile.counts[d] << '\n';
}

struct OverheadMeasurement {
  std::chrono::nanoseconds duration{0};
  std::uint64_t vertices = 0;
};

/// Cost of the work every job duplicates above the split depth, measured by
/// running job 0, which declines every crossing.
inline OverheadMeasurement measure_overhead(const Formula& f, std::uint32_t split_depth,
                                            const Budget& budget = {}) {
  JobOutcome outcome = run_job(f, JobSpec{0, 1, split_depth}, budget);
  if (outcome.status == JobStatus::Error) throw BudgetExceeded(outcome.error);
  return {outcome.stats.duration, outcome.stats.vertices_expanded};
}

/// Per-job workload predicted from a serial trace.
///
/// Vertices above the split depth and the crossing vertices themselves are
/// the shared spine every job pays for; each remaining vertex belongs to the
/// job its enclosing crossing maps to under to_job.  For an unsatisfiable
/// formula these counts equal the counts observed when the jobs actually
/// run.
struct JobEstimate {
  std::uint32_t jobs = 0;
  std::uint32_t split_depth = 0;
  std::uint64_t shared_vertices = 0;
  std::uint64_t shared_cost_ns = 0;
  std::vector<std::uint64_t> per_job_vertices;  // indexed by job - 1
  std::vector<std::uint64_t> per_job_cost_ns;

  std::uint64_t makespan_vertices() const {
    std::uint64_t worst = 0;
    for (auto v : per_job_vertices) worst = std::max(worst, v);
    return shared_vertices + worst;
  }
  std::uint64_t makespan_cost_ns() const {
    std::uint64_t worst = 0;
    for (auto c : per_job_cost_ns) worst = std::max(worst, c);
    return shared_cost_ns + worst;
  }
  /// Expanded-vertex count job j would report (shared spine plus its own).
  std::uint64_t job_total_vertices(std::uint32_t job) const {
    return shared_vertices + per_job_vertices[job - 1];
  }
};

inline JobEstimate estimate_jobs(const std::vector<TraceRecord>& trace, std::uint32_t n,
                                 std::uint32_t split_depth) {
  if (n < 1) throw std::invalid_argument("estimate_jobs: need at least one job");
  if (split_depth < 1) throw std::invalid_argument("estimate_jobs: split depth must be >= 1");
  JobEstimate est;
  est.jobs = n;
  est.split_depth = split_depth;
  est.per_job_vertices.assign(n, 0);
  est.per_job_cost_ns.assign(n, 0);

  bool annotated = false;
  for (const auto& rec : trace)
    if (rec.crossing_index) {
      annotated = true;
      break;
    }

  CrossingTracker tracker(split_depth);
  for (const auto& rec : trace) {
    CrossingObservation obs = tracker.observe(rec.depth);
    // A trace recorded with crossing annotations must agree with the
    // recomputation from its depth sequence for this split depth.
    if (annotated && rec.crossing_index != obs.crossing_index)
      throw TraceMismatchError("trace row " + std::to_string(rec.ordinal) +
                               ": recorded crossing index disagrees with depth sequence for "
                               "split depth " + std::to_string(split_depth));
    if (rec.depth < split_depth || obs.new_crossing) {
      ++est.shared_vertices;
      est.shared_cost_ns += rec.cost_ns;
    } else {
      if (!obs.crossing_index)
        throw TraceMismatchError("trace row " + std::to_string(rec.ordinal) +
                                 ": vertex below split depth before any crossing");
      std::uint32_t job = to_job(*obs.crossing_index, n);
      ++est.per_job_vertices[job - 1];
      est.per_job_cost_ns[job - 1] += rec.cost_ns;
    }
  }
  return est;
}

inline void write_estimate(const JobEstimate& est, std::ostream& out) {
  out << "job,est_vertices,est_cost_ns\n";
  out << "shared," << est.shared_vertices << ',' << est.shared_cost_ns << '\n';
  for (std::uint32_t j = 1; j <= est.jobs; ++j)
    out << j << ',' << est.per_job_vertices[j - 1] << ',' << est.per_job_cost_ns[j - 1] << '\n';
  out << "makespan," << est.makespan_vertices() << ',' << est.makespan_cost_ns() << '\n';
}

/// Estimated total cost to solve a set of formulas for each (jobs,
/// split_depth) combination: the sum over formulas of the estimated
/// makespan.  Cells whose estimate fails are marked invalid instead of
/// aborting the sweep.
struct SweepGrid {
  std::vector<std::uint32_t> jobs;
  std::vector<std::uint32_t> depths;
  struct Cell {
    bool valid = false;
    std::uint64_t total_cost_ns = 0;
    std::uint64_t total_vertices = 0;
  };
  std::vector<std::vector<Cell>> cells;  // [job index][depth index]
};

inline SweepGrid sweep(const std::vector<std::vector<TraceRecord>>& traces,
                       const std::vector<std::uint32_t>& jobs_list,
                       const std::vector<std::uint32_t>& depth_list) {
  SweepGrid grid;
  grid.jobs = jobs_list;
  grid.depths = depth_list;
  grid.cells.assign(jobs_list.size(), std::vector<SweepGrid::Cell>(depth_list.size()));
  for (std::size_t ji = 0; ji < jobs_list.size(); ++ji) {
    for (std::size_t di = 0; di < depth_list.size(); ++di) {
      SweepGrid::Cell cell;
      cell.valid = true;
      for (const auto& trace : traces) {
        try {
          JobEstimate est = estimate_jobs(trace, jobs_list[ji], depth_list[di]);
          cell.total_cost_ns += est.makespan_cost_ns();
          cell.total_vertices += est.makespan_vertices();
        } catch (const std::exception&) {
          cell.valid = false;
          break;
        }
      }
      grid.cells[ji][di] = cell;
    }
  }
  return grid;
}

inline void write_sweep(const SweepGrid& grid, std::ostream& out, bool vertices = false) {
  out << "jobs";
  for (auto d : grid.depths) out << ",d" << d;
  out << '\n';
  for (std::size_t ji = 0; ji < grid.jobs.size(); ++ji) {
    out << grid.jobs[ji];
    for (std::size_t di = 0; di < grid.depths.size(); ++di) {
      const auto& cell = grid.cells[ji][di];
      out << ',';
      if (!cell.valid)
        out << "NA";
      else
        out << (vertices ? cell.total_vertices : cell.total_cost_ns);
    }
    out << '\n';
  }
}

}  // namespace partab
