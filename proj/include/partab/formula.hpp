#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace partab {

/// Immutable LTL formula over atoms, boolean connectives and the temporal
/// operators X (next), F (eventually), G (always), U (until).  Release is an
/// internal operator: negation normal form introduces it as the dual of
/// Until; the parser never produces it.
///
/// Formulas are values backed by shared immutable nodes, so copying is cheap
/// and sharing across threads needs no synchronization.
class Formula {
 public:
  enum class Kind : std::uint8_t {
    Atom,
    Not,
    And,
    Or,
    Next,
    Eventually,
    Always,
    Until,
    Release,
  };

  static Formula atom(std::string name);
  static Formula negation(Formula f);
  static Formula conj(Formula lhs, Formula rhs);
  static Formula disj(Formula lhs, Formula rhs);
  static Formula next(Formula f);
  static Formula eventually(Formula f);
  static Formula always(Formula f);
  static Formula until(Formula lhs, Formula rhs);
  static Formula release(Formula lhs, Formula rhs);

  Kind kind() const { return node_->kind; }

  /// Atom name; only valid for Kind::Atom.
  const std::string& name() const { return node_->name; }

  bool is_atom() const { return node_->kind == Kind::Atom; }
  bool is_literal() const {
    return is_atom() || (node_->kind == Kind::Not && node_->left->kind == Kind::Atom);
  }
  bool is_unary() const {
    Kind k = node_->kind;
    return k == Kind::Not || k == Kind::Next || k == Kind::Eventually || k == Kind::Always;
  }
  bool is_binary() const {
    Kind k = node_->kind;
    return k == Kind::And || k == Kind::Or || k == Kind::Until || k == Kind::Release;
  }

  /// Child of a unary node, left child of a binary node.
  Formula left() const { return Formula(node_->left); }
  /// Right child of a binary node.
  Formula right() const { return Formula(node_->right); }
  /// Alias for the operand of a unary node.
  Formula child() const { return Formula(node_->left); }

  /// Number of AST nodes: atoms count 1, unary nodes 1 + child,
  /// binary nodes 1 + left + right.
  std::size_t length() const { return node_->length; }

  /// Structural equality.
  bool operator==(const Formula& other) const {
    return node_ == other.node_ || compare(other) == 0;
  }
  bool operator!=(const Formula& other) const { return !(*this == other); }

  /// Canonical total order: by length, then kind, then children, then atom
  /// name.  Shorter formulas order first, so strict subformulas always
  /// precede the formulas containing them.
  int compare(const Formula& other) const;
  bool operator<(const Formula& other) const { return compare(other) < 0; }

  std::size_t hash() const;

 private:
  struct Node {
    Kind kind;
    std::string name;  // atoms only
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    std::size_t length;
  };

  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static Formula make(Kind kind, std::string name, std::shared_ptr<const Node> left,
                      std::shared_ptr<const Node> right);

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const { return f.hash(); }
};

inline Formula Formula::make(Kind kind, std::string name, std::shared_ptr<const Node> left,
                             std::shared_ptr<const Node> right) {
  std::size_t len = 1;
  if (left) len += left->length;
  if (right) len += right->length;
  return Formula(std::make_shared<const Node>(
      Node{kind, std::move(name), std::move(left), std::move(right), len}));
}

inline Formula Formula::atom(std::string name) {
  if (name.empty()) throw std::invalid_argument("atom name must be nonempty");
  return make(Kind::Atom, std::move(name), nullptr, nullptr);
}
inline Formula Formula::negation(Formula f) {
  return make(Kind::Not, {}, std::move(f.node_), nullptr);
}
inline Formula Formula::conj(Formula lhs, Formula rhs) {
  return make(Kind::And, {}, std::move(lhs.node_), std::move(rhs.node_));
}
inline Formula Formula::disj(Formula lhs, Formula rhs) {
  return make(Kind::Or, {}, std::move(lhs.node_), std::move(rhs.node_));
}
inline Formula Formula::next(Formula f) {
  return make(Kind::Next, {}, std::move(f.node_), nullptr);
}
inline Formula Formula::eventually(Formula f) {
  return make(Kind::Eventually, {}, std::move(f.node_), nullptr);
}
inline Formula Formula::always(Formula f) {
  return make(Kind::Always, {}, std::move(f.node_), nullptr);
}
inline Formula Formula::until(Formula lhs, Formula rhs) {
  return make(Kind::Until, {}, std::move(lhs.node_), std::move(rhs.node_));
}
inline Formula Formula::release(Formula lhs, Formula rhs) {
  return make(Kind::Release, {}, std::move(lhs.node_), std::move(rhs.node_));
}

inline int Formula::compare(const Formula& other) const {
  const Node* a = node_.get();
  const Node* b = other.node_.get();
  if (a == b) return 0;
  if (a->length != b->length) return a->length < b->length ? -1 : 1;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (a->kind == Kind::Atom) return a->name.compare(b->name);
  if (int c = Formula(a->left).compare(Formula(b->left)); c != 0) return c;
  if (a->right) {
    if (int c = Formula(a->right).compare(Formula(b->right)); c != 0) return c;
  }
  return 0;
}

inline std::size_t Formula::hash() const {
  std::size_t h = static_cast<std::size_t>(node_->kind) * 0x9e3779b97f4a7c15ull;
  if (node_->kind == Kind::Atom) {
    h ^= std::hash<std::string>{}(node_->name);
    return h;
  }
  auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
  if (node_->left) mix(Formula(node_->left).hash());
  if (node_->right) mix(Formula(node_->right).hash());
  return h;
}

/// Negation normal form: pushes Not inward until it applies only to atoms.
/// F and G are kept; Until/Release are exchanged under negation.  The result
/// is logically equivalent to the input and at most twice its length.
inline Formula to_nnf(Formula f);

namespace detail {

inline Formula nnf_neg(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return Formula::negation(f);
    case Formula::Kind::Not:
      return to_nnf(f.child());
    case Formula::Kind::And:
      return Formula::disj(nnf_neg(f.left()), nnf_neg(f.right()));
    case Formula::Kind::Or:
      return Formula::conj(nnf_neg(f.left()), nnf_neg(f.right()));
    case Formula::Kind::Next:
      return Formula::next(nnf_neg(f.child()));
    case Formula::Kind::Eventually:
      return Formula::always(nnf_neg(f.child()));
    case Formula::Kind::Always:
      return Formula::eventually(nnf_neg(f.child()));
    case Formula::Kind::Until:
      return Formula::release(nnf_neg(f.left()), nnf_neg(f.right()));
    case Formula::Kind::Release:
      return Formula::until(nnf_neg(f.left()), nnf_neg(f.right()));
  }
  return f;  // unreachable
}

}  // namespace detail

inline Formula to_nnf(Formula f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return f;
    case Formula::Kind::Not:
      return detail::nnf_neg(f.child());
    case Formula::Kind::And:
      return Formula::conj(to_nnf(f.left()), to_nnf(f.right()));
    case Formula::Kind::Or:
      return Formula::disj(to_nnf(f.left()), to_nnf(f.right()));
    case Formula::Kind::Next:
      return Formula::next(to_nnf(f.child()));
    case Formula::Kind::Eventually:
      return Formula::eventually(to_nnf(f.child()));
    case Formula::Kind::Always:
      return Formula::always(to_nnf(f.child()));
    case Formula::Kind::Until:
      return Formula::until(to_nnf(f.left()), to_nnf(f.right()));
    case Formula::Kind::Release:
      return Formula::release(to_nnf(f.left()), to_nnf(f.right()));
  }
  return f;  // unreachable
}

/// True iff the formula is in negation normal form.
inline bool is_nnf(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return true;
    case Formula::Kind::Not:
      return f.child().is_atom();
    default:
      if (f.is_binary()) return is_nnf(f.left()) && is_nnf(f.right());
      return is_nnf(f.child());
  }
}

}  // namespace partab
