#include "treelogic/solver.hpp"

#include "treelogic/errors.hpp"

#include <algorithm>
#include <set>

namespace treelogic {

namespace {

std::size_t modal_entry(const Lean& lean, Formula f) {
  if (f.body().is_true())
    return lean.top_index(f.program());
  auto i = lean.index_of(f);
  if (!i)
    throw InternalError("formula " + to_string(f) + " is not in the lean");
  return *i;
}

// The backward program a node uses when it is reached through `a`, and the one it must not have.
Program arrival(Program a) { return converse(a); }
Program other_arrival(Program a) {
  return a == Program::FirstChild ? Program::PrevSibling : Program::Parent;
}

} // namespace

bool entails(const TypeValuation& t, Formula f, const Lean& lean) {
  switch (f.kind()) {
  case FormulaKind::True:
    return true;
  case FormulaKind::False:
    return false;
  case FormulaKind::Prop:
    return lean.alphabet().contains(f.label()) && t.test(lean.label_index(f.label()));
  case FormulaKind::NegProp:
    return !(lean.alphabet().contains(f.label()) && t.test(lean.label_index(f.label())));
  case FormulaKind::And:
    return entails(t, f.left(), lean) && entails(t, f.right(), lean);
  case FormulaKind::Or:
    return entails(t, f.left(), lean) || entails(t, f.right(), lean);
  case FormulaKind::Modal:
    return t.test(modal_entry(lean, f));
  case FormulaKind::NegModalTrue:
    return !t.test(lean.top_index(f.program()));
  case FormulaKind::Mu:
    return entails(t, unfold(f), lean);
  default:
    throw InternalError("entails expects a closed formula in negation normal form, got " +
                        to_string(f));
  }
}

bool is_consistent(const TypeValuation& t, const Lean& lean) {
  std::size_t labels = 0;
  for (std::size_t i = 0; i < lean.label_count(); ++i)
    labels += t.test(i) ? 1 : 0;
  if (labels != 1)
    return false;
  for (std::size_t e : lean.modal_indices())
    if (t.test(e) && !t.test(lean.top_index(lean.entry(e).program())))
      return false;
  return !(t.test(lean.top_index(Program::Parent)) && t.test(lean.top_index(Program::PrevSibling)));
}

bool delta_compatible(const TypeValuation& parent, const TypeValuation& child, Program a,
                      const Lean& lean) {
  if (!is_forward(a))
    throw InternalError("delta_compatible expects a forward program");
  if (!parent.test(lean.top_index(a)) || !child.test(lean.top_index(arrival(a))) ||
      child.test(lean.top_index(other_arrival(a))))
    return false;
  for (std::size_t e : lean.modal_indices()) {
    Formula m = lean.entry(e);
    if (m.program() == a && parent.test(e) != entails(child, m.body(), lean))
      return false;
    if (m.program() == arrival(a) && child.test(e) != entails(parent, m.body(), lean))
      return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

ValuationSpace::ValuationSpace(const Lean& lean, const SolverOptions& options)
    : lean_(lean),
      mgr_(std::make_unique<bdd::Manager>(static_cast<bdd::Manager::Var>(2 * lean.size()),
                                          options.max_bdd_nodes)) {
  std::vector<bdd::Manager::Var> map(2 * lean.size());
  for (std::size_t i = 0; i < lean.size(); ++i) {
    x_vars_.push_back(x(i));
    map[x(i)] = y(i);
    map[y(i)] = y(i);
  }
  x_to_y_ = mgr_->add_renaming(std::move(map));

  auto& m = *mgr_;
  bdd::Bdd one_label = m.zero();
  for (std::size_t i = 0; i < lean.label_count(); ++i) {
    bdd::Bdd only = m.var(x(i));
    for (std::size_t j = 0; j < lean.label_count(); ++j)
      if (j != i)
        only &= m.nvar(x(j));
    one_label |= only;
  }
  bdd::Bdd c = one_label;
  for (std::size_t e : lean.modal_indices())
    c &= m.nvar(x(e)) | m.var(x(lean.top_index(lean.entry(e).program())));
  c &= !(m.var(x(lean.top_index(Program::Parent))) & m.var(x(lean.top_index(Program::PrevSibling))));
  consistent_ = c;
}

ValuationSet ValuationSpace::empty() const { return ValuationSet(this, mgr_->zero()); }
ValuationSet ValuationSpace::universe() const { return ValuationSet(this, consistent_); }

ValuationSet ValuationSpace::singleton(const TypeValuation& t) const {
  if (t.size() != lean_.size())
    throw InternalError("valuation size does not match the lean");
  bdd::Bdd b = mgr_->one();
  for (std::size_t i = lean_.size(); i-- > 0;)
    b &= t.test(i) ? mgr_->var(x(i)) : mgr_->nvar(x(i));
  return ValuationSet(this, b & consistent_);
}

ValuationSet ValuationSpace::from_bdd(bdd::Bdd b) const {
  return ValuationSet(this, b & consistent_);
}

bdd::Bdd ValuationSpace::status(Formula f, bool successor) const {
  auto& memo = successor ? status_y_ : status_x_;
  if (auto it = memo.find(f); it != memo.end())
    return it->second;
  bdd::Bdd b = build_status(f, successor);
  memo.emplace(f, b);
  return b;
}

bdd::Bdd ValuationSpace::build_status(Formula f, bool successor) const {
  auto& m = *mgr_;
  auto bit = [&](std::size_t i) { return m.var(successor ? y(i) : x(i)); };
  switch (f.kind()) {
  case FormulaKind::True:
    return m.one();
  case FormulaKind::False:
    return m.zero();
  case FormulaKind::Prop:
    return lean_.alphabet().contains(f.label()) ? bit(lean_.label_index(f.label())) : m.zero();
  case FormulaKind::NegProp:
    return lean_.alphabet().contains(f.label()) ? !bit(lean_.label_index(f.label())) : m.one();
  case FormulaKind::And:
    return status(f.left(), successor) & status(f.right(), successor);
  case FormulaKind::Or:
    return status(f.left(), successor) | status(f.right(), successor);
  case FormulaKind::Modal:
    return bit(modal_entry(lean_, f));
  case FormulaKind::NegModalTrue:
    return !bit(lean_.top_index(f.program()));
  case FormulaKind::Mu:
    return status(unfold(f), successor);
  default:
    throw InternalError("status expects a closed formula in negation normal form, got " +
                        to_string(f));
  }
}

const ValuationSpace::Partition& ValuationSpace::partition(Program a) const {
  auto& slot = partitions_[a == Program::FirstChild ? 0 : 1];
  if (slot)
    return *slot;
  auto& m = *mgr_;
  Partition p;
  p.child_shape = m.var(y(lean_.top_index(arrival(a)))) &
                  m.nvar(y(lean_.top_index(other_arrival(a))));

  std::vector<bdd::Bdd> parts;
  for (std::size_t e : lean_.modal_indices()) {
    Formula ent = lean_.entry(e);
    if (ent.program() == a)
      parts.push_back(m.equiv(m.var(x(e)), status(ent.body(), true)));
    else if (ent.program() == arrival(a))
      parts.push_back(m.equiv(m.var(y(e)), status(ent.body(), false)));
  }

  // Greedy order: next conjunct is the one that lets the most successor
  // variables be quantified right after it, ties broken by fewer new ones.
  std::vector<std::set<bdd::Manager::Var>> ys(parts.size());
  for (std::size_t k = 0; k < parts.size(); ++k)
    for (auto v : m.support(parts[k]))
      if (v % 2 == 1)
        ys[k].insert(v);
  std::vector<std::size_t> order;
  std::vector<bool> used(parts.size(), false);
  std::set<bdd::Manager::Var> introduced;
  for (std::size_t round = 0; round < parts.size(); ++round) {
    std::size_t best = parts.size();
    long best_done = -1, best_new = 0;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (used[k])
        continue;
      long done = 0, fresh = 0;
      for (auto v : ys[k]) {
        bool elsewhere = false;
        for (std::size_t j = 0; j < parts.size() && !elsewhere; ++j)
          elsewhere = j != k && !used[j] && ys[j].count(v);
        done += elsewhere ? 0 : 1;
        fresh += introduced.count(v) ? 0 : 1;
      }
      if (done > best_done || (done == best_done && fresh < best_new)) {
        best = k;
        best_done = done;
        best_new = fresh;
      }
    }
    used[best] = true;
    order.push_back(best);
    introduced.insert(ys[best].begin(), ys[best].end());
  }

  std::vector<std::size_t> last(2 * lean_.size(), parts.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    for (auto v : ys[order[pos]])
      last[v] = pos;
  std::vector<std::vector<bdd::Manager::Var>> cube_vars(order.size());
  std::vector<bdd::Manager::Var> initial;
  for (std::size_t i = 0; i < lean_.size(); ++i) {
    if (last[y(i)] == parts.size())
      initial.push_back(y(i));
    else
      cube_vars[last[y(i)]].push_back(y(i));
  }
  p.initial_cube = m.cube(initial);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    p.conjuncts.push_back(parts[order[pos]]);
    p.cubes.push_back(m.cube(cube_vars[pos]));
  }
  slot = std::move(p);
  return *slot;
}

bdd::Bdd ValuationSpace::image(const bdd::Bdd& children, Program a) const {
  if (!is_forward(a))
    throw InternalError("image expects a forward program");
  auto& m = *mgr_;
  if (children.is_false())
    return m.zero();
  const Partition& p = partition(a);
  bdd::Bdd acc = m.and_exists(m.rename(children, x_to_y_), p.child_shape, p.initial_cube);
  for (std::size_t k = 0; k < p.conjuncts.size() && !acc.is_false(); ++k)
    acc = m.and_exists(acc, p.conjuncts[k], p.cubes[k]);
  return acc & m.var(x(lean_.top_index(a))) & consistent_;
}

bdd::Bdd ValuationSpace::successors_of(const TypeValuation& parent, Program a) const {
  auto& m = *mgr_;
  if (!parent.test(lean_.top_index(a)))
    return m.zero();
  bdd::Bdd r = consistent_ & m.var(x(lean_.top_index(arrival(a)))) &
               m.nvar(x(lean_.top_index(other_arrival(a))));
  for (std::size_t e : lean_.modal_indices()) {
    Formula ent = lean_.entry(e);
    if (ent.program() == a) {
      bdd::Bdd s = status(ent.body(), false);
      r &= parent.test(e) ? s : !s;
    } else if (ent.program() == arrival(a)) {
      r &= entails(parent, ent.body(), lean_) ? m.var(x(e)) : m.nvar(x(e));
    }
  }
  return r;
}

TypeValuation ValuationSpace::decode(const std::vector<bool>& x_assignment) const {
  if (x_assignment.size() != lean_.size())
    throw InternalError("assignment size does not match the lean");
  return TypeValuation(x_assignment);
}

std::vector<bool> ValuationSpace::assignment(const TypeValuation& t) const {
  std::vector<bool> full(2 * lean_.size(), false);
  for (std::size_t i = 0; i < lean_.size(); ++i)
    full[x(i)] = t.test(i);
  return full;
}

// ---------------------------------------------------------------------------

ValuationSet ValuationSet::unite(const ValuationSet& o) const {
  return ValuationSet(space_, bdd_ | o.bdd_);
}
ValuationSet ValuationSet::intersect(const ValuationSet& o) const {
  return ValuationSet(space_, bdd_ & o.bdd_);
}
ValuationSet ValuationSet::complement() const {
  return ValuationSet(space_, (!bdd_) & space_->consistent());
}

bool ValuationSet::contains(const TypeValuation& t) const {
  return space_->manager().eval(bdd_, space_->assignment(t));
}

double ValuationSet::count() const { return space_->manager().sat_count(bdd_, space_->x_vars()); }

std::optional<TypeValuation> ValuationSet::first() const {
  auto a = space_->manager().sat_one(bdd_, space_->x_vars());
  if (!a)
    return std::nullopt;
  return space_->decode(*a);
}

std::vector<TypeValuation> ValuationSet::enumerate(std::size_t limit) const {
  std::vector<TypeValuation> out;
  auto& m = space_->manager();
  bdd::Bdd rest = bdd_;
  while (out.size() < limit) {
    auto a = m.sat_one(rest, space_->x_vars());
    if (!a)
      break;
    TypeValuation t = space_->decode(*a);
    rest = rest & (!space_->singleton(t).bdd());
    out.push_back(std::move(t));
  }
  return out;
}

ValuationSet ValuationSet::parents_via(Program a) const {
  return ValuationSet(space_, space_->image(bdd_, a));
}

// ---------------------------------------------------------------------------

FixpointTrace::FixpointTrace(const Lean& lean, const SolverOptions& options)
    : space_(lean, options) {}

const ValuationSet& FixpointTrace::current() const {
  if (levels_.empty())
    throw InternalError("fixpoint trace has no rounds yet");
  return levels_.back();
}

bool FixpointTrace::step() {
  auto& m = space_.manager();
  const Lean& lean = space_.lean();
  bdd::Bdd prev = levels_.empty() ? m.zero() : levels_.back().bdd();
  bdd::Bdd admitted = space_.consistent();
  for (Program a : kForwardPrograms) {
    bdd::Bdd needs = m.var(ValuationSpace::x(lean.top_index(a)));
    admitted &= (!needs) | space_.image(prev, a);
  }
  bdd::Bdd next = prev | admitted;
  bool grew = !(next == prev);
  levels_.push_back(space_.from_bdd(next));
  return grew;
}

std::optional<std::size_t> FixpointTrace::level_of(const TypeValuation& t) const {
  for (std::size_t i = 0; i < levels_.size(); ++i)
    if (levels_[i].contains(t))
      return i;
  return std::nullopt;
}

namespace {

struct WitnessBuilder {
  const FixpointTrace& trace;
  WitnessTree tree;
  std::vector<TypeValuation> types;

  std::size_t build(const TypeValuation& t, std::size_t level) {
    const Lean& lean = trace.space().lean();
    std::size_t id = tree.nodes.size();
    tree.nodes.emplace_back();
    types.push_back(t);
    for (std::size_t i = 0; i < lean.label_count(); ++i)
      if (t.test(i))
        tree.nodes[id].label = lean.alphabet().symbols()[i];
    for (Program a : kForwardPrograms) {
      if (!t.test(lean.top_index(a)))
        continue;
      bdd::Bdd candidates = trace.space().successors_of(t, a);
      std::optional<std::size_t> child;
      for (std::size_t j = 0; j < level && !child; ++j) {
        auto pick = trace.space().manager().sat_one(trace.levels()[j].bdd() & candidates,
                                                    trace.space().x_vars());
        if (pick)
          child = build(trace.space().decode(*pick), j);
      }
      if (!child)
        throw InternalError("admitted type has no admitted successor");
      if (a == Program::FirstChild)
        tree.nodes[id].first_child = child;
      else
        tree.nodes[id].next_sibling = child;
    }
    return id;
  }
};

} // namespace

WitnessTree extract_witness(const FixpointTrace& trace, const TypeValuation& root) {
  auto level = trace.level_of(root);
  if (!level)
    throw InternalError("witness root was never admitted");
  WitnessBuilder b{trace, {}, {}};
  b.tree.root = b.build(root, *level);
  return b.tree;
}

// ---------------------------------------------------------------------------

Verdict is_satisfiable(Formula f, const Alphabet& alphabet, const SolverOptions& options) {
  auto start = std::chrono::steady_clock::now();
  if (!f.closed())
    throw Error("formula is not closed: " + to_string(f));
  Formula g = is_nnf(f) ? f : nnf(f);
  if (!is_cycle_free(g))
    throw NotCycleFreeError("formula is not cycle-free: " + to_string(f));

  // "g holds at the root or somewhere below it".
  Formula target = mu("X", lor(g, lor(modal(Program::FirstChild, var("X")),
                                      modal(Program::NextSibling, var("X")))));
  Lean lean(target, alphabet.merged(Alphabet::of(g)));
  FixpointTrace trace(lean, options);
  const ValuationSpace& space = trace.space();
  auto& m = space.manager();
  m.set_deadline(start + options.time_limit);

  bdd::Bdd accept = space.consistent() & m.nvar(ValuationSpace::x(lean.top_index(Program::Parent))) &
                    m.nvar(ValuationSpace::x(lean.top_index(Program::PrevSibling))) &
                    space.status(target);
  Verdict v;
  for (;;) {
    bool grew = trace.step();
    ++v.stats.iterations;
    if (!(trace.current().bdd() & accept).is_false()) {
      v.satisfiable = true;
      if (options.stop_early)
        break;
    }
    if (!grew)
      break;
    if (std::chrono::steady_clock::now() > start + options.time_limit)
      throw ResourceLimitError("time limit exceeded");
  }

  if (v.satisfiable) {
    for (const auto& level : trace.levels()) {
      auto pick = m.sat_one(level.bdd() & accept, space.x_vars());
      if (!pick)
        continue;
      WitnessBuilder b{trace, {}, {}};
      TypeValuation root = space.decode(*pick);
      b.tree.root = b.build(root, *trace.level_of(root));
      std::size_t cur = b.tree.root;
      auto down1 = lean.index_of(modal(Program::FirstChild, target));
      auto down2 = lean.index_of(modal(Program::NextSibling, target));
      for (;;) {
        const TypeValuation& t = b.types[cur];
        if (entails(t, g, lean))
          break;
        if (down1 && t.test(*down1))
          cur = *b.tree.nodes[cur].first_child;
        else if (down2 && t.test(*down2))
          cur = *b.tree.nodes[cur].next_sibling;
        else
          throw InternalError("witness does not lead to a satisfying node");
      }
      v.satisfying_node = cur;
      v.witness = std::move(b.tree);
      break;
    }
    if (!v.witness)
      throw InternalError("satisfiable verdict without a witness root");
  }

  v.stats.lean_size = lean.size();
  v.stats.valuations = trace.current().count();
  v.stats.peak_bdd_nodes = m.peak_nodes();
  v.stats.millis = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return v;
}

Verdict is_satisfiable(Formula f) { return is_satisfiable(f, Alphabet::of(f)); }

} // namespace treelogic
