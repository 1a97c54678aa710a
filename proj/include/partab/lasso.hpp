#pragma once

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "partab/formula.hpp"

namespace partab {

/// Ultimately periodic state sequence prefix . loop^omega used as a
/// satisfiability witness.  Each state is the set of atoms true there;
/// unlisted atoms are false.  The loop is never empty, the prefix may be.
struct LassoModel {
  using State = std::set<std::string>;
  std::vector<State> prefix;
  std::vector<State> loop;

  std::size_t positions() const { return prefix.size() + loop.size(); }
};

namespace detail {

/// Evaluates a formula at every position of the lasso's finite quotient
/// (prefix states followed by one copy of the loop).  Position N-1 wraps to
/// the loop start.  Temporal operators are solved by fixpoint iteration:
/// least fixpoint for F and U, greatest for G and R.
class LassoEvaluator {
 public:
  explicit LassoEvaluator(const LassoModel& m) : model_(m), n_(m.positions()) {
    loop_start_ = m.prefix.size();
  }

  const std::vector<bool>& eval(const Formula& f) {
    auto it = cache_.find(f);
    if (it != cache_.end()) return it->second;
    std::vector<bool> v(n_, false);
    switch (f.kind()) {
      case Formula::Kind::Atom: {
        for (std::size_t t = 0; t < n_; ++t) v[t] = state(t).count(f.name()) > 0;
        break;
      }
      case Formula::Kind::Not: {
        const auto& c = eval(f.child());
        for (std::size_t t = 0; t < n_; ++t) v[t] = !c[t];
        break;
      }
      case Formula::Kind::And: {
        const auto& a = eval(f.left());
        const auto& b = eval(f.right());
        for (std::size_t t = 0; t < n_; ++t) v[t] = a[t] && b[t];
        break;
      }
      case Formula::Kind::Or: {
        const auto& a = eval(f.left());
        const auto& b = eval(f.right());
        for (std::size_t t = 0; t < n_; ++t) v[t] = a[t] || b[t];
        break;
      }
      case Formula::Kind::Next: {
        const auto& c = eval(f.child());
        for (std::size_t t = 0; t < n_; ++t) v[t] = c[succ(t)];
        break;
      }
      case Formula::Kind::Eventually: {
        const auto& c = eval(f.child());
        v = lfp([&](std::size_t t, const std::vector<bool>& cur) {
          return c[t] || cur[succ(t)];
        });
        break;
      }
      case Formula::Kind::Always: {
        const auto& c = eval(f.child());
        v = gfp([&](std::size_t t, const std::vector<bool>& cur) {
          return c[t] && cur[succ(t)];
        });
        break;
      }
      case Formula::Kind::Until: {
        const auto& a = eval(f.left());
        const auto& b = eval(f.right());
        v = lfp([&](std::size_t t, const std::vector<bool>& cur) {
          return b[t] || (a[t] && cur[succ(t)]);
        });
        break;
      }
      case Formula::Kind::Release: {
        const auto& a = eval(f.left());
        const auto& b = eval(f.right());
        v = gfp([&](std::size_t t, const std::vector<bool>& cur) {
          return b[t] && (a[t] || cur[succ(t)]);
        });
        break;
      }
    }
    return cache_.emplace(f, std::move(v)).first->second;
  }

 private:
  const LassoModel::State& state(std::size_t t) const {
    return t < loop_start_ ? model_.prefix[t] : model_.loop[t - loop_start_];
  }

  std::size_t succ(std::size_t t) const { return t + 1 < n_ ? t + 1 : loop_start_; }

  template <typename Step>
  std::vector<bool> fixpoint(bool init, Step step) {
    std::vector<bool> cur(n_, init);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = n_; i-- > 0;) {
        bool value = step(i, cur);
        if (value != cur[i]) {
          cur[i] = value;
          changed = true;
        }
      }
    }
    return cur;
  }

  template <typename Step>
  std::vector<bool> lfp(Step step) { return fixpoint(false, step); }
  template <typename Step>
  std::vector<bool> gfp(Step step) { return fixpoint(true, step); }

  const LassoModel& model_;
  std::size_t n_;
  std::size_t loop_start_;
  std::unordered_map<Formula, std::vector<bool>, FormulaHash> cache_;
};

}  // namespace detail

/// True iff f holds at position 0 of the word prefix . loop^omega under
/// standard LTL semantics.  Independent of the tableau construction; used to
/// validate every Satisfiable verdict's witness.
inline bool check_witness(const Formula& f, const LassoModel& m) {
  if (m.loop.empty()) return false;
  detail::LassoEvaluator ev(m);
  return ev.eval(f)[0];
}

/// Two-line witness rendering:
///   prefix: {state};{state};...
///   loop: {state};...
/// each state a comma-separated atom list in braces.
inline std::string render_witness(const LassoModel& m) {
  auto states = [](const std::vector<LassoModel::State>& seq) {
    std::ostringstream out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i > 0) out << ';';
      out << '{';
      bool first = true;
      for (const auto& atom : seq[i]) {
        if (!first) out << ',';
        out << atom;
        first = false;
      }
      out << '}';
    }
    return out.str();
  };
  return "prefix: " + states(m.prefix) + "\nloop: " + states(m.loop) + "\n";
}

}  // namespace partab
