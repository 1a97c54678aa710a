#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "partab/closure.hpp"
#include "partab/formula.hpp"
#include "partab/tableau.hpp"

namespace partab {

class OracleBoundExceeded : public std::runtime_error {
 public:
  explicit OracleBoundExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct OracleConfig {
  std::size_t max_closure = 40;    ///< closure formula count bound
  std::size_t max_free_bits = 13;  ///< propositions + X-formulas enumerated
};

namespace detail {

/// Classical closure-atom decision procedure, independent of the tree
/// tableau.  Atoms are the maximal locally consistent subsets of the
/// closure: a valuation of the propositions plus a free choice of
/// X-formulas determines membership of every other formula bottom-up
/// (ids are in structural order, so children are decided first).
///
/// A -> B iff every f with Xf in A is in B.  Atoms whose eventualities
/// cannot reach a cure and atoms without successors are deleted to
/// fixpoint; the formula is satisfiable iff an atom containing it survives.
class OracleGraph {
 public:
  OracleGraph(const Formula& nnf, const OracleConfig& config) : closure_(nnf) {
    std::size_t n = closure_.size();
    if (n > config.max_closure)
      throw OracleBoundExceeded("closure size " + std::to_string(n) + " exceeds bound " +
                                std::to_string(config.max_closure));

    for (std::size_t id = 0; id < n; ++id) {
      const Formula& f = closure_.formula(id);
      if (f.is_atom() || f.kind() == Formula::Kind::Next) free_ids_.push_back(id);
      if (f.kind() == Formula::Kind::Eventually)
        requests_.push_back({id, closure_.id_of(f.child())});
      else if (f.kind() == Formula::Kind::Until)
        requests_.push_back({id, closure_.id_of(f.right())});
    }
    if (free_ids_.size() > config.max_free_bits)
      throw OracleBoundExceeded("atom enumeration needs " + std::to_string(free_ids_.size()) +
                                " free bits, bound is " + std::to_string(config.max_free_bits));

    build_atoms();
    build_edges();
  }

  bool satisfiable() {
    std::size_t n_atoms = atoms_.size();
    Bitset alive(n_atoms);
    for (std::size_t a = 0; a < n_atoms; ++a) alive.set(a);

    bool changed = true;
    while (changed) {
      changed = false;

      // Backward closure, per eventuality request: the alive atoms that can
      // reach an alive atom containing the request.
      std::vector<Bitset> reach;
      reach.reserve(requests_.size());
      for (const auto& req : requests_) {
        Bitset r(n_atoms);
        alive.for_each([&](std::size_t a) {
          if (atoms_[a].test(req.request)) r.set(a);
        });
        bool grew = true;
        while (grew) {
          grew = false;
          alive.for_each([&](std::size_t a) {
            if (!r.test(a) && succ_of_[a].intersects(r)) {
              r.set(a);
              grew = true;
            }
          });
        }
        reach.push_back(std::move(r));
      }

      alive.for_each([&](std::size_t a) {
        if (!succ_of_[a].intersects(alive)) {
          alive.reset(a);
          changed = true;
          return;
        }
        for (std::size_t ri = 0; ri < requests_.size(); ++ri) {
          const auto& req = requests_[ri];
          bool pending = atoms_[a].test(req.origin) && !atoms_[a].test(req.request);
          if (pending && !reach[ri].test(a)) {
            alive.reset(a);
            changed = true;
            return;
          }
        }
      });
    }

    std::size_t root = closure_.root();
    bool sat = false;
    alive.for_each([&](std::size_t a) {
      if (atoms_[a].test(root)) sat = true;
    });
    return sat;
  }

 private:
  struct Request {
    std::size_t origin;   // the F/U formula
    std::size_t request;  // the formula its fulfillment demands
  };

  void build_atoms() {
    std::size_t n = closure_.size();
    std::size_t k = free_ids_.size();
    std::vector<int> free_bit_of(n, -1);
    for (std::size_t bit = 0; bit < k; ++bit) free_bit_of[free_ids_[bit]] = static_cast<int>(bit);

    for (std::uint64_t choice = 0; choice < (1ull << k); ++choice) {
      Bitset atom(n);
      // Free choices first: X-unfoldings have larger ids than the temporal
      // formulas whose membership derives from them.
      for (std::size_t bit = 0; bit < k; ++bit)
        if ((choice >> bit) & 1) atom.set(free_ids_[bit]);
      for (std::size_t id = 0; id < n; ++id) {
        if (free_bit_of[id] >= 0) continue;
        const Formula& f = closure_.formula(id);
        bool member = false;
        switch (f.kind()) {
          case Formula::Kind::Atom:
          case Formula::Kind::Next:
            break;  // handled above
          case Formula::Kind::Not:
            member = !atom.test(closure_.id_of(f.child()));
            break;
          case Formula::Kind::And:
            member = atom.test(closure_.id_of(f.left())) && atom.test(closure_.id_of(f.right()));
            break;
          case Formula::Kind::Or:
            member = atom.test(closure_.id_of(f.left())) || atom.test(closure_.id_of(f.right()));
            break;
          case Formula::Kind::Eventually:
            member = atom.test(closure_.id_of(f.child())) ||
                     atom.test(closure_.id_of(Formula::next(f)));
            break;
          case Formula::Kind::Always:
            member = atom.test(closure_.id_of(f.child())) &&
                     atom.test(closure_.id_of(Formula::next(f)));
            break;
          case Formula::Kind::Until:
            member = atom.test(closure_.id_of(f.right())) ||
                     (atom.test(closure_.id_of(f.left())) &&
                      atom.test(closure_.id_of(Formula::next(f))));
            break;
          case Formula::Kind::Release:
            member = atom.test(closure_.id_of(f.right())) &&
                     (atom.test(closure_.id_of(f.left())) ||
                      atom.test(closure_.id_of(Formula::next(f))));
            break;
        }
        if (member) atom.set(id);
      }
      atoms_.push_back(std::move(atom));
    }
  }

  void build_edges() {
    std::size_t n = closure_.size();
    std::size_t n_atoms = atoms_.size();

    std::vector<Bitset> required;
    required.reserve(n_atoms);
    for (const Bitset& atom : atoms_) {
      Bitset req(n);
      atom.for_each([&](std::size_t id) {
        const Formula& f = closure_.formula(id);
        if (f.kind() == Formula::Kind::Next) req.set(closure_.id_of(f.child()));
      });
      required.push_back(std::move(req));
    }

    succ_of_.reserve(n_atoms);
    for (std::size_t a = 0; a < n_atoms; ++a) {
      Bitset succ(n_atoms);
      for (std::size_t b = 0; b < n_atoms; ++b)
        if (required[a].subset_of(atoms_[b])) succ.set(b);
      succ_of_.push_back(std::move(succ));
    }
  }

  Closure closure_;
  std::vector<std::size_t> free_ids_;
  std::vector<Request> requests_;
  std::vector<Bitset> atoms_;
  std::vector<Bitset> succ_of_;
};

}  // namespace detail

/// Reference decision procedure for small formulas; used to cross-check the
/// tableau engine.  Throws OracleBoundExceeded when the closure is too large
/// to enumerate.
inline Outcome decide_reference(const Formula& f, const OracleConfig& config = {}) {
  detail::OracleGraph graph(to_nnf(f), config);
  return graph.satisfiable() ? Outcome::Satisfiable : Outcome::Unsatisfiable;
}

}  // namespace partab
