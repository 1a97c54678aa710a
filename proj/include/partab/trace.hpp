#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace partab {

/// One instrumentation row per tableau vertex, in visit order.
///
/// depth is the branch stack height when the vertex was visited (1 at the
/// root).  crossing_index is populated when the run was configured with a
/// split depth: it is set on every downward crossing of that depth and
/// carries the index of the most recent enclosing crossing for deeper
/// vertices; vertices above the split depth have none.  cost_ns measures the
/// vertex's own processing time, excluding children.
struct TraceRecord {
  std::uint64_t ordinal = 0;  // 1-based visit order
  std::uint32_t depth = 0;
  std::optional<std::uint64_t> crossing_index;
  std::uint64_t cost_ns = 0;
};

/// Receives trace records as the engine visits vertices.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const TraceRecord& rec) = 0;
};

class MemoryTraceSink : public TraceSink {
 public:
  void record(const TraceRecord& rec) override { rows_.push_back(rec); }
  const std::vector<TraceRecord>& rows() const { return rows_; }
  std::vector<TraceRecord> take() { return std::move(rows_); }

 private:
  std::vector<TraceRecord> rows_;
};

/// Writes the line-oriented text format `ordinal,depth,crossing|-,cost_ns`.
class StreamTraceSink : public TraceSink {
 public:
  explicit StreamTraceSink(std::ostream& out) : out_(out) {}

  void record(const TraceRecord& rec) override {
    out_ << rec.ordinal << ',' << rec.depth << ',';
    if (rec.crossing_index)
      out_ << *rec.crossing_index;
    else
      out_ << '-';
    out_ << ',' << rec.cost_ns << '\n';
  }

 private:
  std::ostream& out_;
};

class FileTraceSink : public TraceSink {
 public:
  explicit FileTraceSink(const std::string& path) : file_(path), stream_(file_) {
    if (!file_) throw std::runtime_error("cannot open trace file: " + path);
  }

  void record(const TraceRecord& rec) override { stream_.record(rec); }

 private:
  std::ofstream file_;
  StreamTraceSink stream_;
};

class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(std::size_t row, const std::string& what)
      : std::runtime_error("trace row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

namespace detail {

inline std::uint64_t parse_u64_field(const std::string& s, std::size_t row, const char* field) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw TraceFormatError(row, std::string("malformed ") + field + " '" + s + "'");
  return value;
}

}  // namespace detail

/// Parses a trace stream; rejects malformed rows with their 1-based row
/// number.  Ordinals must be strictly increasing and depths >= 1.
inline std::vector<TraceRecord> read_trace(std::istream& in) {
  std::vector<TraceRecord> rows;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t last_ordinal = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::size_t a = line.find(',');
    std::size_t b = a == std::string::npos ? a : line.find(',', a + 1);
    std::size_t c = b == std::string::npos ? b : line.find(',', b + 1);
    if (c == std::string::npos) throw TraceFormatError(lineno, "expected 4 comma-separated fields");
    TraceRecord rec;
    rec.ordinal = detail::parse_u64_field(line.substr(0, a), lineno, "ordinal");
    rec.depth = static_cast<std::uint32_t>(
        detail::parse_u64_field(line.substr(a + 1, b - a - 1), lineno, "depth"));
    std::string cross = line.substr(b + 1, c - b - 1);
    if (cross != "-")
      rec.crossing_index = detail::parse_u64_field(cross, lineno, "crossing_index");
    rec.cost_ns = detail::parse_u64_field(line.substr(c + 1), lineno, "cost_ns");
    if (rec.depth < 1) throw TraceFormatError(lineno, "depth must be >= 1");
    if (rec.ordinal <= last_ordinal)
      throw TraceFormatError(lineno, "ordinals must be strictly increasing");
    last_ordinal = rec.ordinal;
    rows.push_back(rec);
  }
  return rows;
}

inline std::vector<TraceRecord> read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return read_trace(in);
}

}  // namespace partab
