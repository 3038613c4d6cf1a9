#pragma once

// Satisfiability of closed cycle-free formulas over finite binary trees.
//
// The decision procedure is a bottom-up least fixpoint over sets of node
// types (subsets of the lean), represented symbolically as decision diagrams.
// A type is admitted once every forward edge it requires can be matched by an
// already admitted, edge-compatible type. The formula is satisfiable iff an
// admitted root type (no backward edge) entails "the formula holds somewhere
// below". Witnesses replay the fixpoint from that root.

#include "treelogic/bdd.hpp"
#include "treelogic/formula.hpp"
#include "treelogic/logic.hpp"
#include "treelogic/xml.hpp"

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace treelogic {

// One candidate node: bit i set iff lean entry i holds there.
class TypeValuation {
public:
  TypeValuation() = default;
  explicit TypeValuation(std::size_t n) : bits_(n, false) {}
  explicit TypeValuation(std::vector<bool> bits) : bits_(std::move(bits)) {}

  std::size_t size() const noexcept { return bits_.size(); }
  bool test(std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, bool v = true) { bits_.at(i) = v; }
  const std::vector<bool>& bits() const noexcept { return bits_; }

  friend bool operator==(const TypeValuation&, const TypeValuation&) = default;
  friend auto operator<=>(const TypeValuation& a, const TypeValuation& b) { return a.bits_ <=> b.bits_; }

private:
  std::vector<bool> bits_;
};

// Local truth of a closed formula at a node described by t.
bool entails(const TypeValuation& t, Formula f, const Lean& lean);

// One label, modal entries imply their <a>T, not both a first child and a sibling.
bool is_consistent(const TypeValuation& t, const Lean& lean);

// Edge consistency between a parent and its `a`-successor (a forward).
bool delta_compatible(const TypeValuation& parent, const TypeValuation& child, Program a,
                      const Lean& lean);

struct SolverOptions {
  std::size_t max_bdd_nodes = std::size_t{1} << 22;
  std::chrono::milliseconds time_limit{300000};
  // Stop as soon as a satisfying root type is admitted instead of running to
  // the fixpoint. The answer is the same; stats differ.
  bool stop_early = true;
};

class ValuationSet;

// Decision-diagram encoding of valuations over one lean. Lean entry i is
// variable 2i for the current node and 2i+1 for a successor.
class ValuationSpace {
public:
  ValuationSpace(const Lean& lean, const SolverOptions& options = {});
  ValuationSpace(const ValuationSpace&) = delete;
  ValuationSpace& operator=(const ValuationSpace&) = delete;

  const Lean& lean() const noexcept { return lean_; }
  bdd::Manager& manager() const noexcept { return *mgr_; }

  static bdd::Manager::Var x(std::size_t i) { return static_cast<bdd::Manager::Var>(2 * i); }
  static bdd::Manager::Var y(std::size_t i) { return static_cast<bdd::Manager::Var>(2 * i + 1); }
  const std::vector<bdd::Manager::Var>& x_vars() const noexcept { return x_vars_; }

  ValuationSet empty() const;
  ValuationSet universe() const;
  ValuationSet singleton(const TypeValuation& t) const;
  ValuationSet from_bdd(bdd::Bdd b) const;

  // entails(., f) as a diagram over the current-node (or successor) variables.
  bdd::Bdd status(Formula f, bool successor = false) const;
  const bdd::Bdd& consistent() const noexcept { return consistent_; }
  // Parents (over x) compatible through `a` with some child in `children` (over x).
  bdd::Bdd image(const bdd::Bdd& children, Program a) const;
  // Children (over x) compatible through `a` with the concrete parent.
  bdd::Bdd successors_of(const TypeValuation& parent, Program a) const;

  TypeValuation decode(const std::vector<bool>& x_assignment) const;
  std::vector<bool> assignment(const TypeValuation& t) const;

private:
  struct Partition {
    std::vector<bdd::Bdd> conjuncts; // over x and y
    std::vector<bdd::Bdd> cubes;     // y variables quantified after conjunct k
    bdd::Bdd initial_cube;           // y variables in no conjunct
    bdd::Bdd child_shape;            // y[<-a>T] & !y[<-b>T]
  };

  const Lean& lean_;
  std::unique_ptr<bdd::Manager> mgr_;
  std::vector<bdd::Manager::Var> x_vars_;
  std::uint32_t x_to_y_ = 0;
  bdd::Bdd consistent_;
  mutable std::unordered_map<Formula, bdd::Bdd, FormulaHash> status_x_;
  mutable std::unordered_map<Formula, bdd::Bdd, FormulaHash> status_y_;
  mutable std::optional<Partition> partitions_[2];

  bdd::Bdd build_status(Formula f, bool successor) const;
  const Partition& partition(Program a) const;
};

// Set of valuations over one space, always within the consistent universe.
class ValuationSet {
public:
  const ValuationSpace& space() const noexcept { return *space_; }
  const bdd::Bdd& bdd() const noexcept { return bdd_; }

  ValuationSet unite(const ValuationSet& o) const;
  ValuationSet intersect(const ValuationSet& o) const;
  ValuationSet complement() const;
  bool contains(const TypeValuation& t) const;
  bool empty() const noexcept { return bdd_.is_false(); }
  double count() const;
  // Least member, in lean-bit lexicographic order (false before true).
  std::optional<TypeValuation> first() const;
  // Members in increasing order, at most `limit` of them.
  std::vector<TypeValuation> enumerate(std::size_t limit) const;
  // Parents compatible through `a` with some member.
  ValuationSet parents_via(Program a) const;

  friend bool operator==(const ValuationSet& a, const ValuationSet& b) { return a.bdd_ == b.bdd_; }

private:
  friend class ValuationSpace;
  ValuationSet(const ValuationSpace* s, bdd::Bdd b) : space_(s), bdd_(std::move(b)) {}
  const ValuationSpace* space_;
  bdd::Bdd bdd_;
};

struct SolverStats {
  std::size_t lean_size = 0;
  std::size_t iterations = 0;
  double valuations = 0; // admitted types when the iteration stopped
  std::int64_t millis = 0;
  std::size_t peak_bdd_nodes = 0;
};

// Cumulative admitted sets, one per iteration (levels()[i] after i+1 rounds).
class FixpointTrace {
public:
  FixpointTrace(const Lean& lean, const SolverOptions& options = {});

  const ValuationSpace& space() const noexcept { return space_; }
  const std::vector<ValuationSet>& levels() const noexcept { return levels_; }
  // Round in which t was first admitted.
  std::optional<std::size_t> level_of(const TypeValuation& t) const;
  // Runs one round; returns false when nothing new was admitted.
  bool step();
  const ValuationSet& current() const;

private:
  ValuationSpace space_;
  std::vector<ValuationSet> levels_;
};

WitnessTree extract_witness(const FixpointTrace& trace, const TypeValuation& root);

struct Verdict {
  bool satisfiable = false;
  std::optional<WitnessTree> witness;
  // Node of the witness where the formula holds.
  std::optional<std::size_t> satisfying_node;
  SolverStats stats;
};

// Trees are labelled over `alphabet` extended with the labels of `f`.
// Throws NotCycleFreeError and ResourceLimitError.
Verdict is_satisfiable(Formula f, const Alphabet& alphabet, const SolverOptions& options = {});
Verdict is_satisfiable(Formula f);

// Nodes of w where f holds under the finite-tree semantics (fixpoints by Kleene
// iteration). Independent of the decision procedure; used as its oracle.
std::vector<bool> eval_formula(Formula f, const WitnessTree& w);
bool holds_at(Formula f, const WitnessTree& w, std::size_t node);

} // namespace treelogic
