#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "partab/bench.hpp"

using namespace partab;
namespace fs = std::filesystem;

namespace {

struct TempCorpus {
  fs::path root;
  explicit TempCorpus(const std::string& name) {
    root = fs::temp_directory_path() / ("partab-test-" + name);
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~TempCorpus() { fs::remove_all(root); }
  void add(const std::string& rel, const std::string& content) {
    fs::path p = root / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p);
    out << content;
  }
};

}  // namespace

TEST_CASE("classify: the paper's difficulty decades") {
  using secs = std::chrono::duration<double>;
  DifficultyClass u0 = classify(secs(0.5), Outcome::Unsatisfiable);
  CHECK(u0.label() == "U0");
  DifficultyClass s3 = classify(secs(150), Outcome::Satisfiable);
  CHECK(s3.label() == "S3");
  CHECK(classify(secs(0.01), Outcome::Satisfiable).label() == "out-of-range");
  CHECK(classify(secs(5000), Outcome::Unsatisfiable).label() == "out-of-range");
  CHECK(classify(secs(2), Outcome::Satisfiable).label() == "S1");
  CHECK(classify(secs(99), Outcome::Unsatisfiable).label() == "U2");
}

TEST_CASE("classify: decades partition the benchmarkable range") {
  for (double s : {0.1, 0.3, 1.0, 9.99, 10.0, 99.0, 100.0, 999.0}) {
    DifficultyClass cls = classify(std::chrono::duration<double>(s), Outcome::Satisfiable);
    REQUIRE(cls.in_range);
    double lo = std::pow(10.0, cls.decade - 1);
    double hi = std::pow(10.0, cls.decade);
    REQUIRE(s >= lo);
    REQUIRE(s < hi);
  }
  CHECK_FALSE(classify(std::chrono::duration<double>(0.0999), Outcome::Satisfiable).in_range);
  CHECK_FALSE(classify(std::chrono::duration<double>(1000.0), Outcome::Satisfiable).in_range);
}

TEST_CASE("ingest: loads nested directories, skips what does not parse") {
  TempCorpus corpus("ingest");
  corpus.add("a.ltl", "p\n");
  corpus.add("trp/N5x/30/b.ltl", "p & ~p");
  corpus.add("trp/N5x/30/c.ltl", "G(p | q)   \n  ");
  corpus.add("broken.ltl", "((p\n");
  IngestResult result = ingest(corpus.root);
  REQUIRE(result.items.size() == 3);
  REQUIRE(result.warnings.size() == 1);
  CHECK(result.warnings[0].find("broken.ltl") != std::string::npos);
  // Names are path-derived and unique.
  std::set<std::string> names;
  for (const auto& item : result.items) names.insert(item.name);
  CHECK(names.count("a.ltl"));
  CHECK(names.count("trp/N5x/30/b.ltl"));
  CHECK(names.count("trp/N5x/30/c.ltl"));
}

TEST_CASE("ingest: empty or unusable corpus is an error") {
  TempCorpus corpus("empty");
  corpus.add("only.ltl", "(((");
  CHECK_THROWS_AS(ingest(corpus.root), std::runtime_error);
  CHECK_THROWS_AS(ingest(corpus.root / "missing"), std::invalid_argument);
}

TEST_CASE("run_suite: verdicts agree across configurations, curve is monotone") {
  TempCorpus corpus("suite");
  corpus.add("sat1.ltl", "GFp & GFq\n");
  corpus.add("sat2.ltl", "Xp&~Xp|XXq\n");
  corpus.add("unsat1.ltl", "Gp & F~p\n");
  corpus.add("unsat2.ltl", "GFp & G(~p | Xq) & G~q\n");
  IngestResult loaded = ingest(corpus.root);

  Budget budget;
  budget.max_vertices = 500000;
  SuiteReport report = run_suite(loaded.items, {1, 2}, {2, 4}, budget, 2);

  // Per item: every completed run has the same verdict.
  std::map<std::string, std::set<RunStatus>> verdicts;
  for (const auto& run : report.runs)
    if (run.status != RunStatus::Timeout) verdicts[run.item].insert(run.status);
  for (const auto& [item, statuses] : verdicts) {
    CAPTURE(item);
    CHECK(statuses.size() == 1);
  }
  CHECK(report.notes.empty());

  // Cumulative curve: nondecreasing per configuration.
  std::map<std::string, std::size_t> last;
  std::map<std::string, double> last_x;
  for (const auto& point : report.curve) {
    if (last.count(point.config)) {
      CHECK(point.cumulative >= last[point.config]);
      CHECK(point.cpu_seconds >= last_x[point.config]);
    }
    last[point.config] = point.cumulative;
    last_x[point.config] = point.cpu_seconds;
  }

  // 4 items x (serial + 4 configurations).
  CHECK(report.runs.size() == 4 * 5);
}

TEST_CASE("run_suite: vertex columns are deterministic across runs") {
  TempCorpus corpus("determ");
  corpus.add("one.ltl", "GFp & G(~p | Xq) & G~q\n");
  corpus.add("two.ltl", "p U (q U (p & ~p))\n");
  IngestResult loaded = ingest(corpus.root);
  Budget budget;
  budget.max_vertices = 500000;
  SuiteReport a = run_suite(loaded.items, {2}, {3}, budget, 2);
  SuiteReport b = run_suite(loaded.items, {2}, {3}, budget, 2);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].item == b.runs[i].item);
    CHECK(a.runs[i].config == b.runs[i].config);
    CHECK(a.runs[i].status == b.runs[i].status);
    CHECK(a.runs[i].vertices == b.runs[i].vertices);
  }
}

TEST_CASE("run_suite: timeouts are recorded, never fatal") {
  TempCorpus corpus("timeouts");
  corpus.add("hard.ltl", "G(Gp & Fq) U (Gp & X((p U q | q) U F~p))\n");
  corpus.add("easy.ltl", "p\n");
  IngestResult loaded = ingest(corpus.root);
  Budget budget;
  budget.max_vertices = 1000;  // the hard item cannot finish in this budget
  SuiteReport report = run_suite(loaded.items, {2}, {4}, budget, 2);
  bool saw_timeout = false, saw_sat = false;
  for (const auto& run : report.runs) {
    if (run.status == RunStatus::Timeout) saw_timeout = true;
    if (run.status == RunStatus::Satisfiable) saw_sat = true;
  }
  CHECK(saw_timeout);
  CHECK(saw_sat);

  // Speedups involving a timeout are bounds, not exact values.
  for (const auto& run : report.runs) {
    if (run.config == "serial") continue;
    if (run.item == "easy.ltl") CHECK(run.speedup_kind == SpeedupKind::Exact);
    if (run.item == "hard.ltl") CHECK(run.speedup_kind != SpeedupKind::Exact);
  }
  std::ostringstream items;
  write_items_csv(report, items);
  CHECK(items.str().find(',') != std::string::npos);
}

TEST_CASE("report writers: headers and shapes") {
  TempCorpus corpus("writers");
  corpus.add("a.ltl", "p\n");
  IngestResult loaded = ingest(corpus.root);
  SuiteReport report = run_suite(loaded.items, {2}, {2}, {}, 1);

  std::ostringstream items, speedups, curve, summary;
  write_items_csv(report, items);
  write_speedups_csv(report, speedups);
  write_curve_csv(report, curve);
  write_summary(report, summary);
  CHECK(items.str().rfind("item,config,status,seconds,vertices,speedup\n", 0) == 0);
  CHECK(speedups.str().rfind("set,jobs,depth,count,mean,median,min,max\n", 0) == 0);
  CHECK(curve.str().rfind("config,cpu_seconds,cumulative_sat\n", 0) == 0);
  CHECK(summary.str().find("runs:") != std::string::npos);
}
