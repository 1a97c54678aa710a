#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "partab/formula.hpp"
#include "partab/minstd.hpp"

namespace partab {

/// Configuration for pseudo-random formula generation.
struct GenConfig {
  std::size_t length = 1;         ///< target AST node count, >= 1
  std::uint64_t seed = 1;
  std::vector<std::string> atoms = {"p", "q"};
};

namespace detail {

inline Formula gen_rec(std::size_t n, Minstd& rng, const std::vector<std::string>& atoms) {
  if (n == 1) return Formula::atom(atoms[rng.next_below(static_cast<std::uint32_t>(atoms.size()))]);
  auto unary_of = [&](std::uint32_t op, Formula f) {
    switch (op) {
      case 0: return Formula::negation(std::move(f));
      case 1: return Formula::next(std::move(f));
      case 2: return Formula::eventually(std::move(f));
      default: return Formula::always(std::move(f));
    }
  };
  if (n == 2) {
    std::uint32_t op = rng.next_below(4);
    return unary_of(op, gen_rec(1, rng, atoms));
  }
  // n > 2: unary or binary with equal probability.
  if (rng.next_below(2) == 0) {
    std::uint32_t op = rng.next_below(4);
    return unary_of(op, gen_rec(n - 1, rng, atoms));
  }
  std::uint32_t op = rng.next_below(3);  // 0: And, 1: Or, 2: Until
  std::size_t k = 1 + rng.next_below(static_cast<std::uint32_t>(n - 2));
  Formula lhs = gen_rec(k, rng, atoms);
  Formula rhs = gen_rec(n - 1 - k, rng, atoms);
  switch (op) {
    case 0: return Formula::conj(std::move(lhs), std::move(rhs));
    case 1: return Formula::disj(std::move(lhs), std::move(rhs));
    default: return Formula::until(std::move(lhs), std::move(rhs));
  }
}

}  // namespace detail

/// Generates a pseudo-random formula of exactly config.length AST nodes.
///
/// Length 1 draws an atom; length 2 applies one of {~, X, F, G} to an atom;
/// longer formulas choose a unary or binary operator with equal probability,
/// splitting the remaining length uniformly for binary nodes.  Deterministic
/// given (seed, length, atoms) on every platform.
inline Formula gen(const GenConfig& config) {
  if (config.length < 1) throw std::invalid_argument("gen: length must be >= 1");
  if (config.atoms.empty()) throw std::invalid_argument("gen: atom list must be nonempty");
  Minstd rng(config.seed);
  return detail::gen_rec(config.length, rng, config.atoms);
}

}  // namespace partab
