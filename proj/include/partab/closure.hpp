#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "partab/formula.hpp"

namespace partab {

/// Dynamically sized bitset used for formula sets over a fixed closure.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t bits) : words_((bits + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i >> 6] |= (1ull << (i & 63)); }
  void reset(std::size_t i) { words_[i >> 6] &= ~(1ull << (i & 63)); }
  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

  bool any() const {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  bool intersects(const Bitset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & other.words_[i]) return true;
    return false;
  }

  /// this \subseteq other
  bool subset_of(const Bitset& other) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~other.words_[i]) return false;
    return true;
  }

  Bitset& operator|=(const Bitset& other) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }

  bool operator==(const Bitset& other) const { return words_ == other.words_; }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

  /// Calls fn(index) for every set bit, ascending.
  template <typename Fn>
  void for_each(Fn fn) const {
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
      std::uint64_t w = words_[wi];
      while (w) {
        unsigned bit = static_cast<unsigned>(__builtin_ctzll(w));
        fn(wi * 64 + bit);
        w &= w - 1;
      }
    }
  }

  std::size_t hash() const {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto w : words_) {
      h ^= w;
      h *= 0x100000001b3ull;
    }
    return h;
  }

 private:
  std::vector<std::uint64_t> words_;
};

struct BitsetHash {
  std::size_t operator()(const Bitset& b) const { return b.hash(); }
};

/// The closure of an NNF formula: every formula a tableau label over it can
/// ever contain.  Contains all subformulas plus, for each temporal
/// subformula t, its one-step unfolding X(t), and for each Release the
/// disjunction its decomposition introduces.  Ids are assigned in canonical
/// structural order, so scanning a label's set bits visits formulas
/// smallest-first.
class Closure {
 public:
  explicit Closure(const Formula& nnf_root) {
    collect(nnf_root);
    std::sort(formulas_.begin(), formulas_.end(),
              [](const Formula& a, const Formula& b) { return a.compare(b) < 0; });
    index_.clear();
    for (std::size_t i = 0; i < formulas_.size(); ++i) index_.emplace(formulas_[i], i);
    root_ = id_of(nnf_root);
  }

  std::size_t size() const { return formulas_.size(); }
  std::size_t root() const { return root_; }
  const Formula& formula(std::size_t id) const { return formulas_[id]; }

  std::size_t id_of(const Formula& f) const { return index_.at(f); }
  bool contains(const Formula& f) const { return index_.count(f) > 0; }

  Bitset empty_set() const { return Bitset(size()); }

 private:
  void collect(const Formula& f) {
    if (index_.count(f)) return;
    index_.emplace(f, 0);  // placeholder; real ids assigned after sorting
    formulas_.push_back(f);
    switch (f.kind()) {
      case Formula::Kind::Atom:
        break;
      case Formula::Kind::Not:
        collect(f.child());
        break;
      case Formula::Kind::And:
      case Formula::Kind::Or:
        collect(f.left());
        collect(f.right());
        break;
      case Formula::Kind::Next:
        collect(f.child());
        break;
      case Formula::Kind::Eventually:
        collect(f.child());
        collect(Formula::next(f));
        break;
      case Formula::Kind::Always:
        collect(f.child());
        collect(Formula::next(f));
        break;
      case Formula::Kind::Until:
        collect(f.left());
        collect(f.right());
        collect(Formula::next(f));
        break;
      case Formula::Kind::Release:
        collect(f.left());
        collect(f.right());
        collect(Formula::next(f));
        collect(Formula::disj(f.left(), Formula::next(f)));
        break;
    }
  }

  std::vector<Formula> formulas_;
  std::unordered_map<Formula, std::size_t, FormulaHash> index_;
  std::size_t root_ = 0;
};

}  // namespace partab
