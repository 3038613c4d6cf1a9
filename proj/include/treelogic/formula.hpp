#pragma once

// Formulas of the fixpoint tree logic.
//
// Nodes are hash-consed: two formulas are structurally equal iff they share
// the same node, so comparison and hashing are pointer operations. Bound
// variables are stored as de Bruijn pairs (binder depth, component), which
// makes alpha-equivalent formulas identical. Free named variables only exist
// while a formula is being built; `mu` abstracts them away.
//
// A fixpoint node carries a system of equations X1 = f1, ..., Xn = fn and
// selects one component. The unary form `mu X. f` is the one-equation case.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace treelogic {

// 1 = first child, 2 = next sibling, -1 / -2 their converses.
enum class Program : std::int8_t { FirstChild = 1, NextSibling = 2, Parent = -1, PrevSibling = -2 };

constexpr Program converse(Program p) noexcept {
  return static_cast<Program>(-static_cast<std::int8_t>(p));
}
constexpr bool is_forward(Program p) noexcept { return static_cast<std::int8_t>(p) > 0; }
constexpr int program_code(Program p) noexcept { return static_cast<int>(p); }

inline constexpr Program kAllPrograms[] = {Program::FirstChild, Program::NextSibling,
                                           Program::Parent, Program::PrevSibling};
inline constexpr Program kForwardPrograms[] = {Program::FirstChild, Program::NextSibling};

std::string to_string(Program p);

// The distinguished label standing for every name outside the working alphabet.
inline constexpr std::string_view kOtherLabel = "_other";

enum class FormulaKind : std::uint8_t {
  True,
  False,
  Prop,
  NegProp,
  FreeVar,  // named, only during construction
  BoundVar, // de Bruijn (depth, component)
  And,
  Or,
  Modal,
  NegModalTrue,
  Mu,
  Not, // only before negation normal form
};

namespace detail {
struct FormulaNode;
}

class Formula {
public:
  Formula() = default;

  FormulaKind kind() const;
  bool valid() const noexcept { return node_ != nullptr; }

  // Prop / NegProp
  const std::string& label() const;
  // FreeVar name
  const std::string& name() const;
  // BoundVar
  std::size_t depth() const;
  std::size_t component() const;
  // Modal / NegModalTrue
  Program program() const;
  // And / Or: two operands; Modal / Not: one operand; Mu: the equation bodies.
  std::span<const Formula> operands() const;
  Formula operand(std::size_t i) const { return operands()[i]; }
  Formula left() const { return operands()[0]; }
  Formula right() const { return operands()[1]; }
  Formula body() const { return operands()[0]; }
  // Mu: selected component and binder name hints (not part of identity).
  std::size_t selected() const;
  std::span<const std::string> binder_names() const;

  std::size_t hash() const noexcept;
  // Number of enclosing binders needed to close the formula (0 = no loose BoundVar).
  std::size_t open_depth() const;
  bool has_free_vars() const;
  bool closed() const { return open_depth() == 0 && !has_free_vars(); }

  bool is_true() const { return valid() && kind() == FormulaKind::True; }
  bool is_false() const { return valid() && kind() == FormulaKind::False; }

  const detail::FormulaNode* id() const noexcept { return node_; }

  friend bool operator==(Formula a, Formula b) noexcept { return a.node_ == b.node_; }
  friend bool operator<(Formula a, Formula b) noexcept { return std::less<>{}(a.node_, b.node_); }

private:
  explicit Formula(const detail::FormulaNode* n) : node_(n) {}
  friend struct FormulaFactory;
  const detail::FormulaNode* node_ = nullptr;
};

struct FormulaHash {
  std::size_t operator()(Formula f) const noexcept { return f.hash(); }
};

// Raw constructors: exactly the requested node, no simplification.
Formula top();
Formula bottom();
Formula prop(std::string_view label);
Formula neg_prop(std::string_view label);
Formula var(std::string_view name);
Formula bound_var(std::size_t depth, std::size_t component);
Formula land(Formula a, Formula b);
Formula lor(Formula a, Formula b);
Formula modal(Program p, Formula f);
Formula neg_modal_true(Program p);
Formula lnot(Formula f);

// mu X. body: abstracts the free variable X in body.
Formula mu(std::string_view name, Formula body);
// Component `selected` of the least solution of names[i] = bodies[i].
Formula mu_system(std::span<const std::string> names, std::span<const Formula> bodies,
                  std::size_t selected);
// let_mu names = bodies in in_body: in_body with each names[i] replaced by the
// corresponding component of the system.
Formula let_mu(std::span<const std::string> names, std::span<const Formula> bodies,
               Formula in_body);
// Fixpoint node over bodies already in de Bruijn form (used by rewriting passes).
Formula mu_raw(std::vector<Formula> bodies, std::vector<std::string> names, std::size_t selected);

// Simplifying connectives: absorb T/F and collapse identical operands.
Formula conj(Formula a, Formula b);
Formula disj(Formula a, Formula b);
Formula conj(std::span<const Formula> fs);
Formula disj(std::span<const Formula> fs);

// One unfolding of a fixpoint: f_j with every component replaced by its solution.
Formula unfold(Formula mu_node);

// Replace the free variable `name` by `replacement` (which must be closed).
Formula substitute_free(Formula f, std::string_view name, Formula replacement);

// Number of distinct nodes reachable from f (shared subterms counted once).
std::size_t size(Formula f);

// Concrete syntax that parse_formula accepts back.
std::string to_string(Formula f);

// Labels occurring in Prop / NegProp nodes, sorted.
std::vector<std::string> labels_of(Formula f);

// Structural printout of the node tree, e.g. And(Prop(a),Modal(1,Prop(b))).
std::string debug_string(Formula f);

} // namespace treelogic
