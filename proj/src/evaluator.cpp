#include "treelogic/errors.hpp"
#include "treelogic/solver.hpp"

#include <cstdint>
#include <unordered_map>

namespace treelogic {

namespace {

// Node sets: a single word for trees of up to 64 nodes, a word vector otherwise.
struct SmallSet {
  std::uint64_t w = 0;
  static SmallSet none(std::size_t) { return {}; }
  bool test(std::size_t i) const { return (w >> i) & 1u; }
  void set(std::size_t i) { w |= std::uint64_t{1} << i; }
  SmallSet operator&(const SmallSet& o) const { return {w & o.w}; }
  SmallSet operator|(const SmallSet& o) const { return {w | o.w}; }
  SmallSet minus(const SmallSet& all) const { return {all.w & ~w}; }
  bool operator==(const SmallSet&) const = default;
};

struct LargeSet {
  std::vector<std::uint64_t> w;
  static LargeSet none(std::size_t n) { return {std::vector<std::uint64_t>((n + 63) / 64, 0)}; }
  bool test(std::size_t i) const { return (w[i / 64] >> (i % 64)) & 1u; }
  void set(std::size_t i) { w[i / 64] |= std::uint64_t{1} << (i % 64); }
  LargeSet operator&(const LargeSet& o) const {
    LargeSet r = *this;
    for (std::size_t i = 0; i < w.size(); ++i)
      r.w[i] &= o.w[i];
    return r;
  }
  LargeSet operator|(const LargeSet& o) const {
    LargeSet r = *this;
    for (std::size_t i = 0; i < w.size(); ++i)
      r.w[i] |= o.w[i];
    return r;
  }
  LargeSet minus(const LargeSet& all) const {
    LargeSet r = all;
    for (std::size_t i = 0; i < w.size(); ++i)
      r.w[i] &= ~w[i];
    return r;
  }
  bool operator==(const LargeSet&) const = default;
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

template <class Set>
class Evaluator {
public:
  explicit Evaluator(const WitnessTree& w) : w_(w), n_(w.size()) {
    for (auto& s : succ_)
      s.assign(n_, kNone);
    for (std::size_t i = 0; i < n_; ++i) {
      if (auto c = w.nodes[i].first_child) {
        succ_[0][i] = *c;
        succ_[2][*c] = i;
      }
      if (auto s = w.nodes[i].next_sibling) {
        succ_[1][i] = *s;
        succ_[3][*s] = i;
      }
    }
    all_ = Set::none(n_);
    for (std::size_t i = 0; i < n_; ++i)
      all_.set(i);
  }

  Set eval(Formula f) {
    if (f.open_depth() == 0) {
      if (auto it = memo_.find(f); it != memo_.end())
        return it->second;
      Set s = compute(f);
      memo_.emplace(f, s);
      return s;
    }
    return compute(f);
  }

private:
  const WitnessTree& w_;
  std::size_t n_;
  std::vector<std::size_t> succ_[4];
  Set all_;
  std::vector<std::vector<Set>> env_;
  std::unordered_map<Formula, Set, FormulaHash> memo_;

  static std::size_t slot(Program p) {
    switch (p) {
    case Program::FirstChild:
      return 0;
    case Program::NextSibling:
      return 1;
    case Program::Parent:
      return 2;
    case Program::PrevSibling:
      return 3;
    }
    return 0;
  }

  Set compute(Formula f) {
    switch (f.kind()) {
    case FormulaKind::True:
      return all_;
    case FormulaKind::False:
      return Set::none(n_);
    case FormulaKind::Prop:
    case FormulaKind::NegProp: {
      Set s = Set::none(n_);
      for (std::size_t i = 0; i < n_; ++i)
        if (w_.nodes[i].label == f.label())
          s.set(i);
      return f.kind() == FormulaKind::Prop ? s : s.minus(all_);
    }
    case FormulaKind::BoundVar:
      if (f.depth() >= env_.size())
        throw InternalError("loose bound variable during evaluation");
      return env_[env_.size() - 1 - f.depth()].at(f.component());
    case FormulaKind::And:
      return eval(f.left()) & eval(f.right());
    case FormulaKind::Or:
      return eval(f.left()) | eval(f.right());
    case FormulaKind::Not:
      return eval(f.body()).minus(all_);
    case FormulaKind::Modal: {
      Set inner = eval(f.body());
      const auto& to = succ_[slot(f.program())];
      Set s = Set::none(n_);
      for (std::size_t i = 0; i < n_; ++i)
        if (to[i] != kNone && inner.test(to[i]))
          s.set(i);
      return s;
    }
    case FormulaKind::NegModalTrue: {
      const auto& to = succ_[slot(f.program())];
      Set s = Set::none(n_);
      for (std::size_t i = 0; i < n_; ++i)
        if (to[i] == kNone)
          s.set(i);
      return s;
    }
    case FormulaKind::Mu: {
      auto bodies = f.operands();
      std::vector<Set> x(bodies.size(), Set::none(n_));
      for (;;) {
        env_.push_back(x);
        std::vector<Set> next;
        next.reserve(bodies.size());
        for (Formula b : bodies)
          next.push_back(eval(b));
        env_.pop_back();
        if (next == x)
          break;
        x = std::move(next);
      }
      return x[f.selected()];
    }
    case FormulaKind::FreeVar:
      throw Error("cannot evaluate a formula with free variable " + f.name());
    }
    throw InternalError("unknown formula kind");
  }
};

template <class Set>
std::vector<bool> run(Formula f, const WitnessTree& w) {
  Evaluator<Set> e(w);
  Set s = e.eval(f);
  std::vector<bool> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    out[i] = s.test(i);
  return out;
}

} // namespace

std::vector<bool> eval_formula(Formula f, const WitnessTree& w) {
  if (w.size() <= 64)
    return run<SmallSet>(f, w);
  return run<LargeSet>(f, w);
}

bool holds_at(Formula f, const WitnessTree& w, std::size_t node) {
  return eval_formula(f, w).at(node);
}

} // namespace treelogic
