#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "partab/closure.hpp"
#include "partab/formula.hpp"
#include "partab/lasso.hpp"
#include "partab/partition.hpp"
#include "partab/trace.hpp"

namespace partab {

enum class Outcome { Satisfiable, Unsatisfiable };

/// Per-run search statistics.  width_profile[d] counts the vertices visited
/// with d ancestors, so width_profile[0] is always 1 (the root) and the
/// entries sum to vertices_expanded.
struct SearchStats {
  std::uint64_t vertices_expanded = 0;
  std::uint32_t max_depth = 0;  // deepest stack height reached
  std::vector<std::uint64_t> width_profile;
  std::chrono::nanoseconds duration{0};
};

struct Verdict {
  Outcome outcome = Outcome::Unsatisfiable;
  std::optional<LassoModel> witness;  // present iff Satisfiable
  SearchStats stats;
};

/// Raised when a configured vertex or wall-clock budget runs out.  Budget
/// exhaustion is never a verdict.
class BudgetExceeded : public std::runtime_error {
 public:
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when the orchestrator's cancellation flag is observed.
class SolveCancelled : public std::runtime_error {
 public:
  SolveCancelled() : std::runtime_error("solve cancelled") {}
};

struct Budget {
  std::optional<std::uint64_t> max_vertices;
  std::optional<std::chrono::nanoseconds> max_time;
};

/// What a hook sees for one vertex visit.  depth is the branch stack height
/// (1 at the root), exactly the quantity the Decline rule consumes.
struct VertexVisit {
  std::uint64_t ordinal = 0;
  std::uint32_t depth = 0;
  std::uint32_t step_index = 0;
};

enum class HookAction { Proceed, VetoBranch };

struct EngineOptions {
  Budget budget;
  /// Fires once per vertex in depth-first visit order, before any rule is
  /// applied.  VetoBranch fails the branch and rolls back to the latest
  /// choice above the vetoed vertex's depth.
  std::function<HookAction(const VertexVisit&)> vertex_hook;
  TraceSink* trace = nullptr;
  /// When set, trace rows carry crossing indices for this split depth.
  std::optional<std::uint32_t> trace_split_depth;
  const std::atomic<bool>* cancel = nullptr;
};

namespace detail {

/// Decomposition rules over closure ids, shared by the engine and the
/// label-level inspection helpers.
///
/// Alpha rules (one child):   a&b  adds a, b
///                            Gf   adds f, XGf
///                            aRb  adds b, (a | X(aRb))
/// Beta rules (two children): a|b  branches a / b
///                            Ff   branches f / XFf
///                            aUb  branches b / a, X(aUb)
/// The first beta child is the one that cures the eventuality now.
class RuleTable {
 public:
  explicit RuleTable(const Formula& nnf_root) : closure_(nnf_root) {
    std::size_t n = closure_.size();
    info_.resize(n);
    std::vector<std::size_t> request_ids;
    for (std::size_t id = 0; id < n; ++id) {
      const Formula& f = closure_.formula(id);
      IdInfo& info = info_[id];
      info.kind = f.kind();
      switch (f.kind()) {
        case Formula::Kind::Atom:
          info.cls = Cls::Literal;
          break;
        case Formula::Kind::Not:
          info.cls = Cls::Literal;
          if (f.child().is_atom()) contradictions_.emplace_back(closure_.id_of(f.child()), id);
          break;
        case Formula::Kind::Next:
          info.cls = Cls::Step;
          info.adds1[0] = closure_.id_of(f.child());
          info.n1 = 1;
          break;
        case Formula::Kind::And:
          info.cls = Cls::Alpha;
          info.adds1 = {closure_.id_of(f.left()), closure_.id_of(f.right())};
          info.n1 = 2;
          break;
        case Formula::Kind::Always:
          info.cls = Cls::Alpha;
          info.adds1 = {closure_.id_of(f.child()), closure_.id_of(Formula::next(f))};
          info.n1 = 2;
          break;
        case Formula::Kind::Release:
          info.cls = Cls::Alpha;
          info.adds1 = {closure_.id_of(f.right()),
                        closure_.id_of(Formula::disj(f.left(), Formula::next(f)))};
          info.n1 = 2;
          break;
        case Formula::Kind::Or:
          info.cls = Cls::Beta;
          info.adds1[0] = closure_.id_of(f.left());
          info.n1 = 1;
          info.adds2[0] = closure_.id_of(f.right());
          info.n2 = 1;
          break;
        case Formula::Kind::Eventually:
          info.cls = Cls::Beta;
          info.adds1[0] = closure_.id_of(f.child());
          info.n1 = 1;
          info.adds2[0] = closure_.id_of(Formula::next(f));
          info.n2 = 1;
          request_ids.push_back(closure_.id_of(f.child()));
          break;
        case Formula::Kind::Until:
          info.cls = Cls::Beta;
          info.adds1[0] = closure_.id_of(f.right());
          info.n1 = 1;
          info.adds2 = {closure_.id_of(f.left()), closure_.id_of(Formula::next(f))};
          info.n2 = 2;
          request_ids.push_back(closure_.id_of(f.right()));
          break;
      }
    }

    // Distinct eventuality requests, each assigned a cure bit.
    std::sort(request_ids.begin(), request_ids.end());
    request_ids.erase(std::unique(request_ids.begin(), request_ids.end()), request_ids.end());
    request_count_ = request_ids.size();
    for (std::size_t bit = 0; bit < request_ids.size(); ++bit)
      info_[request_ids[bit]].cure_bit = static_cast<int>(bit);

    // An X-wrapped eventuality in a poised label demands its request.
    nonpoised_mask_ = closure_.empty_set();
    for (std::size_t id = 0; id < n; ++id) {
      IdInfo& info = info_[id];
      if (info.cls == Cls::Step) {
        const IdInfo& inner = info_[info.adds1[0]];
        if (inner.kind == Formula::Kind::Eventually)
          info.pending_bit = info_[inner.adds1[0]].cure_bit;
        else if (inner.kind == Formula::Kind::Until)
          info.pending_bit = info_[inner.adds1[0]].cure_bit;
      }
      if (info.cls == Cls::Alpha || info.cls == Cls::Beta) nonpoised_mask_.set(id);
    }
  }

  const Closure& closure() const { return closure_; }
  std::size_t request_count() const { return request_count_; }

  bool poised(const Bitset& label) const { return !label.intersects(nonpoised_mask_); }

  bool contradictory(const Bitset& label) const {
    for (auto [pos_id, neg_id] : contradictions_)
      if (label.test(pos_id) && label.test(neg_id)) return true;
    return false;
  }

  /// Lowest-id alpha formula if any, else lowest-id beta formula, else none
  /// (the label is poised).  Ids are in canonical structural order.
  std::optional<std::size_t> select(const Bitset& label) const {
    std::optional<std::size_t> beta;
    std::optional<std::size_t> alpha;
    label.for_each([&](std::size_t id) {
      if (alpha) return;
      if (info_[id].cls == Cls::Alpha && !alpha) alpha = id;
      if (info_[id].cls == Cls::Beta && !beta) beta = id;
    });
    if (alpha) return alpha;
    return beta;
  }

  bool is_alpha(std::size_t id) const { return info_[id].cls == Cls::Alpha; }
  bool is_beta(std::size_t id) const { return info_[id].cls == Cls::Beta; }
  bool is_step(std::size_t id) const { return info_[id].cls == Cls::Step; }
  bool is_atom(std::size_t id) const { return info_[id].kind == Formula::Kind::Atom; }

  Bitset child_label(const Bitset& label, std::size_t selected, bool second) const {
    const IdInfo& info = info_[selected];
    Bitset child = label;
    child.reset(selected);
    const auto& adds = second ? info.adds2 : info.adds1;
    std::uint8_t count = second ? info.n2 : info.n1;
    for (std::uint8_t i = 0; i < count; ++i) child.set(adds[i]);
    return child;
  }

  /// The STEP transition: {f : Xf in label}.
  Bitset step(const Bitset& label) const {
    Bitset next = closure_.empty_set();
    label.for_each([&](std::size_t id) {
      if (info_[id].cls == Cls::Step) next.set(info_[id].adds1[0]);
    });
    return next;
  }

  /// Cure bits of requests contained in the label, and (for poised labels)
  /// pending bits of eventualities the label's X-formulas demand.
  void scan_label(const Bitset& label, Bitset& cures, Bitset& pending) const {
    label.for_each([&](std::size_t id) {
      const IdInfo& info = info_[id];
      if (info.cure_bit >= 0) cures.set(static_cast<std::size_t>(info.cure_bit));
      if (info.pending_bit >= 0) pending.set(static_cast<std::size_t>(info.pending_bit));
    });
  }

  LassoModel::State state_of(const Bitset& label) const {
    LassoModel::State state;
    label.for_each([&](std::size_t id) {
      if (info_[id].kind == Formula::Kind::Atom) state.insert(closure_.formula(id).name());
    });
    return state;
  }

 private:
  enum class Cls : std::uint8_t { Literal, Step, Alpha, Beta };

  struct IdInfo {
    Formula::Kind kind = Formula::Kind::Atom;
    Cls cls = Cls::Literal;
    std::array<std::size_t, 2> adds1{};
    std::array<std::size_t, 2> adds2{};
    std::uint8_t n1 = 0;
    std::uint8_t n2 = 0;
    int cure_bit = -1;     // set if this formula is some eventuality's request
    int pending_bit = -1;  // set on X(Ff)/X(aUb): the request the X-formula demands
  };

  Closure closure_;
  std::vector<IdInfo> info_;
  std::vector<std::pair<std::size_t, std::size_t>> contradictions_;
  Bitset nonpoised_mask_;
  std::size_t request_count_ = 0;
};

}  // namespace detail

/// One-pass tree tableau for LTL.
///
/// The construction is depth-first over an explicit branch stack.  Each
/// vertex carries a label (a set of closure formulas); one decomposition
/// rule fires per vertex until the label is poised (literals and X-formulas
/// only), then the branch takes a temporal STEP.  Branches close
/// unsuccessfully on contradictions, successfully when a poised label
/// repeats with every demanded eventuality cured in between (the Loop rule),
/// and unsuccessfully when a poised label occurs a third time with no new
/// cures since the second occurrence (the Prune rule).  Beta choices are
/// explored cure-first with rollback.
///
/// An engine instance is strictly single-threaded and owns all its state;
/// any number of engines may share the same immutable Formula.
class TableauEngine {
 public:
  explicit TableauEngine(const Formula& f, EngineOptions options = {})
      : options_(std::move(options)),
        root_(to_nnf(f)),
        rules_(root_),
        tracker_(options_.trace_split_depth ? *options_.trace_split_depth : 0) {
    cure_positions_.resize(rules_.request_count());
  }

  Verdict solve() {
    auto started = std::chrono::steady_clock::now();
    start_time_ = started;
    Verdict verdict;

    Bitset root_label = rules_.closure().empty_set();
    root_label.set(rules_.closure().root());
    push_entry(std::move(root_label), 0);

    for (;;) {
      Step step = process_top();
      bool done = false;
      switch (step.what) {
        case Step::What::Sat:
          verdict.outcome = Outcome::Satisfiable;
          verdict.witness = std::move(step.witness);
          done = true;
          break;
        case Step::What::Child:
          push_entry(std::move(step.child), step.child_step);
          break;
        case Step::What::Fail:
          done = !fail_rollback();
          break;
        case Step::What::Veto:
          done = !veto_rollback(step.veto_depth);
          break;
      }
      if (done) break;
    }

    verdict.stats = stats_;
    verdict.stats.duration = std::chrono::steady_clock::now() - started;
    return verdict;
  }

  // ---- label-level inspection (rule semantics without a search) ----

  struct LabelExpansion {
    enum class Kind { Poised, Alpha, Beta } kind = Kind::Poised;
    std::optional<Formula> selected;
    std::vector<std::vector<Formula>> children;
  };

  /// Applies one decomposition rule to an NNF label, as the search would.
  static LabelExpansion expand_label(const std::vector<Formula>& label);
  /// The STEP transition over an NNF label.
  static std::vector<Formula> step_label(const std::vector<Formula>& label);
  /// True iff the label contains a and ~a for some atom a.
  static bool label_contradictory(const std::vector<Formula>& label);
  /// True iff every member is a literal or an X-formula.
  static bool label_poised(const std::vector<Formula>& label);

 private:
  struct Entry {
    Bitset label;
    std::uint32_t step_index = 0;
    bool poised = false;
    bool registered = false;
    Bitset cures;    // request bits present in this label
    Bitset pending;  // request bits demanded by the label's X-eventualities
    std::optional<Bitset> alt;  // untried second beta child
  };

  struct Step {
    enum class What { Sat, Child, Fail, Veto } what = What::Fail;
    Bitset child;
    std::uint32_t child_step = 0;
    std::uint32_t veto_depth = 0;
    std::optional<LassoModel> witness;
  };

  void push_entry(Bitset label, std::uint32_t step_index) {
    Entry e;
    e.poised = rules_.poised(label);
    e.cures = Bitset(rules_.request_count());
    e.pending = Bitset(rules_.request_count());
    rules_.scan_label(label, e.cures, e.pending);
    e.label = std::move(label);
    e.step_index = step_index;
    stack_.push_back(std::move(e));
  }

  void pop_entry() {
    Entry& e = stack_.back();
    if (e.registered) {
      e.cures.for_each([&](std::size_t bit) { cure_positions_[bit].pop_back(); });
      if (e.poised) occurrences_[e.label].pop_back();
    }
    stack_.pop_back();
  }

  void register_entry() {
    Entry& e = stack_.back();
    std::uint32_t pos = static_cast<std::uint32_t>(stack_.size() - 1);
    e.cures.for_each([&](std::size_t bit) { cure_positions_[bit].push_back(pos); });
    if (e.poised) occurrences_[e.label].push_back(pos);
    e.registered = true;
  }

  /// Visits the just-pushed top entry: instrumentation, hook, then one rule.
  Step process_top() {
    Entry& e = stack_.back();
    std::uint32_t depth = static_cast<std::uint32_t>(stack_.size());

    ++stats_.vertices_expanded;
    if (stats_.width_profile.size() < depth) stats_.width_profile.resize(depth, 0);
    ++stats_.width_profile[depth - 1];
    stats_.max_depth = std::max(stats_.max_depth, depth);

    check_budget();
    if (options_.cancel && options_.cancel->load(std::memory_order_relaxed))
      throw SolveCancelled();

    bool tracing = options_.trace != nullptr;
    std::chrono::steady_clock::time_point t0;
    if (tracing) t0 = std::chrono::steady_clock::now();
    TraceRecord rec;
    if (tracing) {
      rec.ordinal = stats_.vertices_expanded;
      rec.depth = depth;
      if (options_.trace_split_depth) rec.crossing_index = tracker_.observe(depth).crossing_index;
    }

    Step result = apply_rules(e, depth);

    if (tracing) {
      rec.cost_ns = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                               t0)
              .count());
      options_.trace->record(rec);
    }
    return result;
  }

  Step apply_rules(Entry& e, std::uint32_t depth) {
    Step result;

    if (options_.vertex_hook) {
      VertexVisit visit{stats_.vertices_expanded, depth, e.step_index};
      if (options_.vertex_hook(visit) == HookAction::VetoBranch) {
        result.what = Step::What::Veto;
        result.veto_depth = depth;
        return result;
      }
    }

    if (rules_.contradictory(e.label)) {
      result.what = Step::What::Fail;
      return result;
    }

    if (e.poised) {
      if (auto loop_start = find_loop(e)) {
        result.what = Step::What::Sat;
        result.witness = assemble_witness(*loop_start);
        return result;
      }
      if (prunes(e)) {
        result.what = Step::What::Fail;
        return result;
      }
      register_entry();
      Bitset next = rules_.step(e.label);
      if (!next.any()) {
        // Only literal obligations remain; any extension models them.
        result.what = Step::What::Sat;
        result.witness = assemble_witness(static_cast<std::uint32_t>(stack_.size() - 1));
        return result;
      }
      result.what = Step::What::Child;
      result.child = std::move(next);
      result.child_step = e.step_index + 1;
      return result;
    }

    register_entry();
    std::optional<std::size_t> selected = rules_.select(e.label);
    assert(selected.has_value());
    result.what = Step::What::Child;
    result.child = rules_.child_label(e.label, *selected, /*second=*/false);
    result.child_step = e.step_index;
    if (rules_.is_beta(*selected))
      e.alt = rules_.child_label(e.label, *selected, /*second=*/true);
    return result;
  }

  /// Loop rule: an earlier occurrence of this poised label such that every
  /// eventuality the label demands was cured strictly between the two
  /// occurrences.  Returns the latest qualifying occurrence's stack
  /// position, which becomes the lasso's loop start.
  std::optional<std::uint32_t> find_loop(const Entry& e) {
    auto it = occurrences_.find(e.label);
    if (it == occurrences_.end() || it->second.empty()) return std::nullopt;

    // Every pending request must have a cure later than the occurrence.
    std::uint32_t min_cure = UINT32_MAX;
    bool uncured = false;
    e.pending.for_each([&](std::size_t bit) {
      if (cure_positions_[bit].empty())
        uncured = true;
      else
        min_cure = std::min(min_cure, cure_positions_[bit].back());
    });
    if (uncured) return std::nullopt;

    const auto& occs = it->second;
    for (auto rit = occs.rbegin(); rit != occs.rend(); ++rit) {
      if (min_cure == UINT32_MAX || *rit < min_cure) return *rit;
    }
    return std::nullopt;
  }

  /// Prune rule: two earlier occurrences u < v of this label such that every
  /// request cured since v was already cured in the segment (u, v).  The
  /// branch has become repetitious without progress and is failed.
  bool prunes(const Entry& e) {
    auto it = occurrences_.find(e.label);
    if (it == occurrences_.end() || it->second.size() < 2) return false;
    const auto& occs = it->second;
    for (std::size_t vi = occs.size(); vi-- > 1;) {
      for (std::size_t ui = vi; ui-- > 0;) {
        if (no_new_cures(occs[ui], occs[vi])) return true;
      }
    }
    return false;
  }

  /// True iff every request cured after v (the current vertex itself is not
  /// registered yet, so "after v" means strictly between v and the current
  /// occurrence) was also cured strictly between u and v.
  bool no_new_cures(std::uint32_t u, std::uint32_t v) const {
    for (const auto& positions : cure_positions_) {
      if (positions.empty() || positions.back() <= v) continue;  // nothing new since v
      auto it = std::lower_bound(positions.begin(), positions.end(), v);
      bool in_uv = it != positions.begin() && *(it - 1) > u;
      if (!in_uv) return false;
    }
    return true;
  }

  /// Builds the lasso from the branch's poised labels: states strictly
  /// before loop_start form the prefix, states from loop_start to the top
  /// (exclusive) form the loop.  The top label equals the one at loop_start,
  /// so the word wraps consistently.
  LassoModel assemble_witness(std::uint32_t loop_start) const {
    LassoModel model;
    std::uint32_t top = static_cast<std::uint32_t>(stack_.size() - 1);
    for (std::uint32_t pos = 0; pos <= top; ++pos) {
      const Entry& e = stack_[pos];
      if (!e.poised) continue;
      if (pos < loop_start)
        model.prefix.push_back(rules_.state_of(e.label));
      else if (pos < top || loop_start == top)
        model.loop.push_back(rules_.state_of(e.label));
    }
    if (model.loop.empty()) model.loop.push_back(rules_.state_of(stack_[top].label));
    return model;
  }

  bool fail_rollback() {
    pop_entry();
    while (!stack_.empty()) {
      Entry& top = stack_.back();
      if (top.alt) {
        Bitset child = std::move(*top.alt);
        top.alt.reset();
        push_entry(std::move(child), top.step_index);
        return true;
      }
      pop_entry();
    }
    return false;
  }

  /// Rollback for a vetoed crossing: keeps taking the latest choice until
  /// the branch continues above the vetoed depth.  Alternatives that would
  /// land at or below that depth belong to the same crossing and are
  /// consumed without being visited.
  bool veto_rollback(std::uint32_t veto_depth) {
    pop_entry();
    while (!stack_.empty()) {
      Entry& top = stack_.back();
      if (top.alt) {
        if (stack_.size() + 1 < veto_depth) {
          Bitset child = std::move(*top.alt);
          top.alt.reset();
          push_entry(std::move(child), top.step_index);
          return true;
        }
        top.alt.reset();
      }
      pop_entry();
    }
    return false;
  }

  void check_budget() {
    if (options_.budget.max_vertices && stats_.vertices_expanded > *options_.budget.max_vertices)
      throw BudgetExceeded("vertex budget exhausted after " +
                           std::to_string(*options_.budget.max_vertices));
    if (options_.budget.max_time && (stats_.vertices_expanded & 0xff) == 0) {
      auto elapsed = std::chrono::steady_clock::now() - start_time_;
      if (elapsed > *options_.budget.max_time) throw BudgetExceeded("wall-clock budget exhausted");
    }
  }

  EngineOptions options_;
  Formula root_;
  detail::RuleTable rules_;
  CrossingTracker tracker_;

  std::vector<Entry> stack_;
  std::unordered_map<Bitset, std::vector<std::uint32_t>, BitsetHash> occurrences_;
  std::vector<std::vector<std::uint32_t>> cure_positions_;  // per request bit
  SearchStats stats_;
  std::chrono::steady_clock::time_point start_time_;
};

/// Runs the tableau over f.  Throws BudgetExceeded or SolveCancelled.
inline Verdict solve(const Formula& f, EngineOptions options = {}) {
  return TableauEngine(f, std::move(options)).solve();
}

// ---- inspection helpers ----

namespace detail {

inline Formula conjoin_all(const std::vector<Formula>& formulas) {
  if (formulas.empty()) throw std::invalid_argument("label must be nonempty");
  Formula acc = formulas[0];
  for (std::size_t i = 1; i < formulas.size(); ++i) acc = Formula::conj(acc, formulas[i]);
  return acc;
}

inline Bitset label_bits(const RuleTable& rules, const std::vector<Formula>& formulas) {
  Bitset bits = rules.closure().empty_set();
  for (const auto& f : formulas) bits.set(rules.closure().id_of(f));
  return bits;
}

inline std::vector<Formula> label_formulas(const RuleTable& rules, const Bitset& bits) {
  std::vector<Formula> out;
  bits.for_each([&](std::size_t id) { out.push_back(rules.closure().formula(id)); });
  return out;
}

}  // namespace detail

inline TableauEngine::LabelExpansion TableauEngine::expand_label(
    const std::vector<Formula>& label) {
  detail::RuleTable rules(detail::conjoin_all(label));
  Bitset bits = detail::label_bits(rules, label);
  LabelExpansion out;
  auto selected = rules.select(bits);
  if (!selected) {
    out.kind = LabelExpansion::Kind::Poised;
    return out;
  }
  out.selected = rules.closure().formula(*selected);
  out.kind = rules.is_alpha(*selected) ? LabelExpansion::Kind::Alpha : LabelExpansion::Kind::Beta;
  out.children.push_back(detail::label_formulas(rules, rules.child_label(bits, *selected, false)));
  if (out.kind == LabelExpansion::Kind::Beta)
    out.children.push_back(detail::label_formulas(rules, rules.child_label(bits, *selected, true)));
  return out;
}

inline std::vector<Formula> TableauEngine::step_label(const std::vector<Formula>& label) {
  detail::RuleTable rules(detail::conjoin_all(label));
  return detail::label_formulas(rules, rules.step(detail::label_bits(rules, label)));
}

inline bool TableauEngine::label_contradictory(const std::vector<Formula>& label) {
  detail::RuleTable rules(detail::conjoin_all(label));
  return rules.contradictory(detail::label_bits(rules, label));
}

inline bool TableauEngine::label_poised(const std::vector<Formula>& label) {
  detail::RuleTable rules(detail::conjoin_all(label));
  return rules.poised(detail::label_bits(rules, label));
}

}  // namespace partab
