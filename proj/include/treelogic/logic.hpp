#pragma once

#include "treelogic/formula.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace treelogic {

// Finite working alphabet: the labels of a problem instance plus the
// distinguished "other" label, which is always last.
class Alphabet {
public:
  Alphabet() : Alphabet(std::vector<std::string>{}) {}
  explicit Alphabet(std::vector<std::string> labels);

  static Alphabet of(Formula f);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  bool contains(std::string_view label) const;
  // Labels other than the distinguished one.
  std::vector<std::string> named() const;

  Alphabet merged(const Alphabet& other) const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

private:
  std::vector<std::string> symbols_;
};

// Concrete syntax:
//   T  F  name  'quoted name'  X (variables start upper case)  ~f  f & g  f | g
//   <1>f <2>f <-1>f <-2>f   mu X. f   let_mu X = f, Y = g in h   ( f )
// `~name` and `~<a>T` are read directly as NegProp / NegModalTrue.
Formula parse_formula(std::string_view text);

// Rejects formulas where a bound variable occurs under an odd number of negations
// relative to its binder (throws PositivityError).
void check_positive(Formula f);

// Negation normal form. Relies on least and greatest fixpoints agreeing for
// cycle-free formulas over finite trees.
Formula nnf(Formula f);
bool is_nnf(Formula f);

// Negation of f, in negation normal form.
Formula negate(Formula f);

// True iff every cycle through fixpoint unfolding crosses a modality and no
// such cycle crosses both a program and its converse.
bool is_cycle_free(Formula f);

// Closure under direct subformulas, where the subformula of a fixpoint is its
// one-level unfolding. Elements are closed; order is depth-first preorder.
std::vector<Formula> fl_closure(Formula f);

// Index of the solver state bits: one proposition per alphabet symbol, then
// <1>T <2>T <-1>T <-2>T, then the modal formulas of the closure in depth-first
// order. The order is also the decision diagram variable order; keeping a
// modal formula next to the entries of its body keeps the diagrams small.
class Lean {
public:
  Lean(Formula f, const Alphabet& alphabet);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<Formula>& entries() const noexcept { return entries_; }
  Formula entry(std::size_t i) const { return entries_.at(i); }
  std::optional<std::size_t> index_of(Formula entry) const;

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t label_count() const noexcept { return alphabet_.size(); }
  // Entry index of the proposition for alphabet symbol i (== i).
  std::size_t label_index(std::string_view label) const;
  std::size_t top_index(Program p) const;
  // Entries <a>psi with psi != T, in order.
  const std::vector<std::size_t>& modal_indices() const noexcept { return modal_; }

private:
  Alphabet alphabet_;
  std::vector<Formula> entries_;
  std::vector<std::size_t> modal_;
  std::unordered_map<Formula, std::size_t, FormulaHash> index_;
};

} // namespace treelogic
