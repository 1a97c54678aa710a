#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "partab/minstd.hpp"

namespace partab {

/// Identifies one partition of the tableau search tree.
///
/// job_no ranges over [0, number_of_jobs]; job 0 owns no branches and
/// declines every crossing, which makes it the probe for measuring the
/// shared work above the split depth.
struct JobSpec {
  std::uint32_t job_no = 1;
  std::uint32_t number_of_jobs = 1;
  std::uint32_t split_depth = 1;
};

/// Assigns the i-th branch at the split depth (1-based) to a job in
/// [1, number_of_jobs].
///
/// Branches are grouped into blocks of number_of_jobs consecutive indices.
/// Each block is assigned round-robin, but every block after the first
/// starts at an offset drawn from the MINSTD generator seeded with the block
/// number, which breaks up the correlation between tree position and job
/// that a plain round-robin exhibits.
inline std::uint32_t to_job(std::uint64_t i, std::uint32_t number_of_jobs) {
  if (i < 1) throw std::invalid_argument("to_job: branch index must be >= 1");
  if (number_of_jobs < 1) throw std::invalid_argument("to_job: number_of_jobs must be >= 1");
  std::uint64_t zero_based = i - 1;
  std::uint64_t m = zero_based % number_of_jobs;
  std::uint64_t r = zero_based / number_of_jobs;
  if (r == 0) return static_cast<std::uint32_t>(1 + m);
  return static_cast<std::uint32_t>(1 + (Minstd::first_output(r) + m) % number_of_jobs);
}

/// Mutable state threaded through decline(): the depth seen at the previous
/// vertex and the number of downward crossings of the split depth so far.
struct DeclineState {
  std::uint32_t last_depth = 0;
  std::uint64_t width = 0;
};

/// What one vertex visit looked like to the crossing detector.
struct CrossingObservation {
  bool new_crossing = false;
  /// Index of the enclosing crossing for vertices at or below the split
  /// depth; empty above it.
  std::optional<std::uint64_t> crossing_index;
};

/// Detects downward crossings of a fixed split depth from the sequence of
/// vertex depths in depth-first visit order.  A crossing happens when the
/// current depth equals the split depth and the previously visited vertex
/// was above it.
class CrossingTracker {
 public:
  explicit CrossingTracker(std::uint32_t split_depth) : split_depth_(split_depth) {}

  CrossingObservation observe(std::uint32_t depth) {
    CrossingObservation obs;
    if (depth == split_depth_ && state_.last_depth < split_depth_) {
      ++state_.width;
      obs.new_crossing = true;
    }
    if (depth >= split_depth_ && state_.width > 0) obs.crossing_index = state_.width;
    state_.last_depth = depth;
    return obs;
  }

  std::uint64_t width() const { return state_.width; }
  const DeclineState& state() const { return state_; }

 private:
  std::uint32_t split_depth_;
  DeclineState state_;
};

/// The Decline rule: fails the current branch iff this vertex is a downward
/// crossing of the split depth and the crossing is not assigned to our job.
/// Invoked once per tableau vertex in depth-first visit order with the
/// engine's current stack height.
///
/// Returns the veto decision and advances the state.  On a veto the engine
/// must roll back to the latest choice above the split depth.  Job 0 vetoes
/// every crossing and may therefore never be observed below the split depth.
inline bool decline(DeclineState& state, std::uint32_t current_depth, const JobSpec& spec) {
  if (spec.job_no == 0 && current_depth > spec.split_depth)
    throw std::logic_error("decline: job 0 observed below the split depth");
  bool veto = false;
  if (current_depth == spec.split_depth && state.last_depth < spec.split_depth) {
    ++state.width;
    veto = spec.job_no == 0 || to_job(state.width, spec.number_of_jobs) != spec.job_no;
  }
  state.last_depth = current_depth;
  return veto;
}

}  // namespace partab
