#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include "partab/parse.hpp"
#include "partab/partition.hpp"
#include "partab/tableau.hpp"
#include "partab/trace.hpp"

using namespace partab;

TEST_CASE("to_job: first block is the identity round-robin") {
  CHECK(to_job(1, 4) == 1);
  CHECK(to_job(2, 4) == 2);
  CHECK(to_job(3, 4) == 3);
  CHECK(to_job(4, 4) == 4);
}

TEST_CASE("to_job: first randomized block, value pinned against the generator") {
  // Block 1 seeds the generator with r = 1; its first output is
  // 16807 * 1 mod (2^31 - 1) = 16807, so index 5 maps to 1 + (16807 % 4).
  std::uint64_t lcg_first = (16807ull * 1) % 2147483647ull;
  CHECK(to_job(5, 4) == 1 + (lcg_first + 0) % 4);
  CHECK(to_job(5, 4) == 4);
  CHECK(to_job(6, 4) == 1 + (lcg_first + 1) % 4);
}

TEST_CASE("to_job: every complete block maps onto {1..n} bijectively") {
  for (std::uint32_t n : {1u, 2u, 3u, 5u, 8u, 17u, 64u}) {
    for (std::uint64_t block = 0; block < 100; ++block) {
      std::set<std::uint32_t> seen;
      for (std::uint64_t m = 1; m <= n; ++m) seen.insert(to_job(block * n + m, n));
      REQUIRE(seen.size() == n);
      REQUIRE(*seen.begin() == 1);
      REQUIRE(*seen.rbegin() == n);
    }
  }
}

TEST_CASE("to_job: near-uniform load over whole blocks") {
  std::uint32_t n = 8;
  std::uint64_t blocks = 1000;
  std::vector<std::uint64_t> load(n + 1, 0);
  for (std::uint64_t i = 1; i <= blocks * n; ++i) ++load[to_job(i, n)];
  for (std::uint32_t j = 1; j <= n; ++j) CHECK(load[j] == blocks);
}

TEST_CASE("to_job: rejects invalid arguments") {
  CHECK_THROWS_AS(to_job(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(to_job(1, 0), std::invalid_argument);
}

TEST_CASE("to_job: deterministic pure function") {
  for (std::uint64_t i = 1; i <= 500; ++i) REQUIRE(to_job(i, 7) == to_job(i, 7));
}

TEST_CASE("decline: vetoes exactly the crossings assigned elsewhere") {
  JobSpec spec{1, 2, 3};
  DeclineState state;
  // Four downward crossings at depth 3, each approached from depth 2.
  // Block 0 is round-robin (jobs 1,2); block 1 starts at the pseudo-random
  // offset 16807 % 2 = 1, so crossings 3,4 go to jobs 2,1.
  std::vector<bool> vetoes;
  for (int i = 0; i < 4; ++i) {
    CHECK_FALSE(decline(state, 2, spec));
    vetoes.push_back(decline(state, 3, spec));
  }
  CHECK(vetoes == std::vector<bool>{false, true, true, false});
  CHECK(state.width == 4);
}

TEST_CASE("decline: job 0 vetoes every crossing") {
  JobSpec spec{0, 8, 5};
  DeclineState state;
  for (int i = 0; i < 10; ++i) {
    CHECK_FALSE(decline(state, 4, spec));
    CHECK(decline(state, 5, spec));
  }
  CHECK(state.width == 10);
}

TEST_CASE("decline: job 0 below the split depth is a logic error") {
  JobSpec spec{0, 8, 5};
  DeclineState state;
  CHECK_THROWS_AS(decline(state, 6, spec), std::logic_error);
}

TEST_CASE("crossing detection: only downward crossings count") {
  // Depth sequence 1,2,3,3,2,3 with split depth 3: the first and last visit
  // at depth 3 are crossings, the sibling in between is not.
  CrossingTracker tracker(3);
  std::vector<std::uint32_t> depths{1, 2, 3, 3, 2, 3};
  std::vector<bool> crossings;
  for (auto d : depths) crossings.push_back(tracker.observe(d).new_crossing);
  CHECK(crossings == std::vector<bool>{false, false, true, false, false, true});
  CHECK(tracker.width() == 2);
}

TEST_CASE("crossing tracker: enclosing index for deeper vertices") {
  CrossingTracker tracker(2);
  CHECK_FALSE(tracker.observe(1).crossing_index.has_value());
  auto at2 = tracker.observe(2);
  CHECK(at2.new_crossing);
  REQUIRE(at2.crossing_index);
  CHECK(*at2.crossing_index == 1);
  auto at3 = tracker.observe(3);
  CHECK_FALSE(at3.new_crossing);
  REQUIRE(at3.crossing_index);
  CHECK(*at3.crossing_index == 1);
  CHECK_FALSE(tracker.observe(1).crossing_index.has_value());
}

TEST_CASE("job 0 expands exactly the serial spine plus the crossings") {
  // Unsatisfiable: p recurs forever, every p demands q next, q never holds.
  Formula f = parse("GFp & G(~p | Xq) & G~q");
  std::uint32_t d = 4;

  MemoryTraceSink serial_sink;
  EngineOptions serial_options;
  serial_options.trace = &serial_sink;
  serial_options.trace_split_depth = d;
  Verdict serial = solve(f, serial_options);
  REQUIRE(serial.outcome == Outcome::Unsatisfiable);
  REQUIRE(serial.stats.max_depth > d);

  std::uint64_t above = 0, crossings = 0;
  {
    CrossingTracker tracker(d);
    for (const auto& row : serial_sink.rows()) {
      if (row.depth < d) ++above;
      if (tracker.observe(row.depth).new_crossing) ++crossings;
    }
  }

  JobSpec job0{0, 1, d};
  DeclineState state;
  EngineOptions job_options;
  std::uint32_t max_depth_seen = 0;
  job_options.vertex_hook = [&](const VertexVisit& v) {
    max_depth_seen = std::max(max_depth_seen, v.depth);
    return decline(state, v.depth, job0) ? HookAction::VetoBranch : HookAction::Proceed;
  };
  Verdict j0 = solve(f, job_options);
  CHECK(j0.outcome == Outcome::Unsatisfiable);
  CHECK(max_depth_seen == d);
  CHECK(j0.stats.vertices_expanded == above + crossings);
}
