#include "treelogic/formula.hpp"

#include "treelogic/errors.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <mutex>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace treelogic {

namespace detail {

struct FormulaNode {
  FormulaKind kind = FormulaKind::True;
  Program program = Program::FirstChild;
  std::string text;           // label or free variable name
  std::size_t depth = 0;      // BoundVar depth
  std::size_t component = 0;  // BoundVar component, Mu selection
  std::vector<Formula> kids;
  std::vector<std::string> hints;
  std::size_t hash = 0;
  std::size_t open_depth = 0;
  bool has_free = false;
};

} // namespace detail

using detail::FormulaNode;

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t structural_hash(const FormulaNode& n) {
  std::size_t h = std::hash<int>{}(static_cast<int>(n.kind));
  h = mix(h, static_cast<std::size_t>(program_code(n.program) + 8));
  h = mix(h, std::hash<std::string>{}(n.text));
  h = mix(h, n.depth);
  h = mix(h, n.component);
  for (Formula k : n.kids)
    h = mix(h, std::hash<const void*>{}(k.id()));
  return h;
}

struct NodePtrHash {
  std::size_t operator()(const FormulaNode* n) const noexcept { return n->hash; }
};

struct NodePtrEq {
  bool operator()(const FormulaNode* a, const FormulaNode* b) const noexcept {
    return a->kind == b->kind && a->program == b->program && a->depth == b->depth &&
           a->component == b->component && a->text == b->text && a->kids == b->kids;
  }
};

// Process-wide intern table. Nodes are immutable and never freed.
class InternTable {
public:
  const FormulaNode* intern(FormulaNode&& candidate) {
    candidate.hash = structural_hash(candidate);
    std::lock_guard lock(mutex_);
    if (auto it = table_.find(&candidate); it != table_.end())
      return *it;
    storage_.push_back(std::move(candidate));
    const FormulaNode* stored = &storage_.back();
    table_.insert(stored);
    return stored;
  }

private:
  std::mutex mutex_;
  std::deque<FormulaNode> storage_;
  std::unordered_set<const FormulaNode*, NodePtrHash, NodePtrEq> table_;
};

InternTable& table() {
  static InternTable t;
  return t;
}

} // namespace

struct FormulaFactory {
  static Formula make(FormulaNode&& n) {
    n.open_depth = 0;
    n.has_free = n.kind == FormulaKind::FreeVar;
    if (n.kind == FormulaKind::BoundVar)
      n.open_depth = n.depth + 1;
    for (Formula k : n.kids) {
      n.has_free = n.has_free || k.node_->has_free;
      std::size_t d = k.node_->open_depth;
      if (n.kind == FormulaKind::Mu)
        d = d > 0 ? d - 1 : 0;
      n.open_depth = std::max(n.open_depth, d);
    }
    return Formula(table().intern(std::move(n)));
  }
  static const FormulaNode& node(Formula f) {
    if (!f.node_)
      throw InternalError("use of an empty formula handle");
    return *f.node_;
  }
};

namespace {

Formula make_leaf(FormulaKind k) {
  FormulaNode n;
  n.kind = k;
  return FormulaFactory::make(std::move(n));
}

const FormulaNode& node_of(Formula f) { return FormulaFactory::node(f); }

} // namespace

std::string to_string(Program p) { return std::to_string(program_code(p)); }

FormulaKind Formula::kind() const { return node_of(*this).kind; }
const std::string& Formula::label() const { return node_of(*this).text; }
const std::string& Formula::name() const { return node_of(*this).text; }
std::size_t Formula::depth() const { return node_of(*this).depth; }
std::size_t Formula::component() const { return node_of(*this).component; }
Program Formula::program() const { return node_of(*this).program; }
std::span<const Formula> Formula::operands() const { return node_of(*this).kids; }
std::size_t Formula::selected() const { return node_of(*this).component; }
std::span<const std::string> Formula::binder_names() const { return node_of(*this).hints; }
std::size_t Formula::hash() const noexcept { return node_ ? node_->hash : 0; }
std::size_t Formula::open_depth() const { return node_of(*this).open_depth; }
bool Formula::has_free_vars() const { return node_of(*this).has_free; }

Formula top() {
  static const Formula t = make_leaf(FormulaKind::True);
  return t;
}

Formula bottom() {
  static const Formula f = make_leaf(FormulaKind::False);
  return f;
}

Formula prop(std::string_view label) {
  FormulaNode n;
  n.kind = FormulaKind::Prop;
  n.text = std::string(label);
  return FormulaFactory::make(std::move(n));
}

Formula neg_prop(std::string_view label) {
  FormulaNode n;
  n.kind = FormulaKind::NegProp;
  n.text = std::string(label);
  return FormulaFactory::make(std::move(n));
}

Formula var(std::string_view name) {
  FormulaNode n;
  n.kind = FormulaKind::FreeVar;
  n.text = std::string(name);
  return FormulaFactory::make(std::move(n));
}

Formula bound_var(std::size_t depth, std::size_t component) {
  FormulaNode n;
  n.kind = FormulaKind::BoundVar;
  n.depth = depth;
  n.component = component;
  return FormulaFactory::make(std::move(n));
}

namespace {

Formula binary(FormulaKind k, Formula a, Formula b) {
  FormulaNode n;
  n.kind = k;
  n.kids = {a, b};
  return FormulaFactory::make(std::move(n));
}

} // namespace

Formula land(Formula a, Formula b) { return binary(FormulaKind::And, a, b); }
Formula lor(Formula a, Formula b) { return binary(FormulaKind::Or, a, b); }

Formula modal(Program p, Formula f) {
  FormulaNode n;
  n.kind = FormulaKind::Modal;
  n.program = p;
  n.kids = {f};
  return FormulaFactory::make(std::move(n));
}

Formula neg_modal_true(Program p) {
  FormulaNode n;
  n.kind = FormulaKind::NegModalTrue;
  n.program = p;
  return FormulaFactory::make(std::move(n));
}

Formula lnot(Formula f) {
  FormulaNode n;
  n.kind = FormulaKind::Not;
  n.kids = {f};
  return FormulaFactory::make(std::move(n));
}

Formula mu_raw(std::vector<Formula> bodies, std::vector<std::string> names, std::size_t selected) {
  if (bodies.empty() || selected >= bodies.size())
    throw InternalError("fixpoint system without the selected equation");
  names.resize(bodies.size());
  FormulaNode n;
  n.kind = FormulaKind::Mu;
  n.component = selected;
  n.kids = std::move(bodies);
  n.hints = std::move(names);
  return FormulaFactory::make(std::move(n));
}

namespace {

Formula rebuild(Formula f, std::vector<Formula> kids) {
  const FormulaNode& src = node_of(f);
  if (std::equal(kids.begin(), kids.end(), src.kids.begin(), src.kids.end()))
    return f;
  FormulaNode n;
  n.kind = src.kind;
  n.program = src.program;
  n.text = src.text;
  n.depth = src.depth;
  n.component = src.component;
  n.kids = std::move(kids);
  n.hints = src.hints;
  return FormulaFactory::make(std::move(n));
}

// Turns free occurrences of names[i] into BoundVar(level, i).
class Abstractor {
public:
  explicit Abstractor(std::span<const std::string> names) : names_(names) {}

  Formula run(Formula f, std::size_t level) {
    if (!f.has_free_vars())
      return f;
    auto key = std::make_pair(f.id(), level);
    if (auto it = memo_.find(key); it != memo_.end())
      return it->second;
    Formula out;
    if (f.kind() == FormulaKind::FreeVar) {
      out = f;
      // Later names shadow earlier duplicates, as in a left-to-right let.
      for (std::size_t i = names_.size(); i-- > 0;) {
        if (names_[i] == f.name()) {
          out = bound_var(level, i);
          break;
        }
      }
    } else {
      std::size_t inner = f.kind() == FormulaKind::Mu ? level + 1 : level;
      std::vector<Formula> kids;
      for (Formula k : f.operands())
        kids.push_back(run(k, inner));
      out = rebuild(f, std::move(kids));
    }
    memo_.emplace(key, out);
    return out;
  }

private:
  std::span<const std::string> names_;
  std::map<std::pair<const FormulaNode*, std::size_t>, Formula> memo_;
};

// Replaces BoundVar(level, i) by closed replacement[i].
class BoundSubstituter {
public:
  explicit BoundSubstituter(std::vector<Formula> replacement) : repl_(std::move(replacement)) {}

  Formula run(Formula f, std::size_t level) {
    if (f.open_depth() <= level)
      return f;
    auto key = std::make_pair(f.id(), level);
    if (auto it = memo_.find(key); it != memo_.end())
      return it->second;
    Formula out;
    if (f.kind() == FormulaKind::BoundVar) {
      // open_depth > level and a closed outer context mean depth == level.
      out = repl_.at(f.component());
    } else {
      std::size_t inner = f.kind() == FormulaKind::Mu ? level + 1 : level;
      std::vector<Formula> kids;
      for (Formula k : f.operands())
        kids.push_back(run(k, inner));
      out = rebuild(f, std::move(kids));
    }
    memo_.emplace(key, out);
    return out;
  }

private:
  std::vector<Formula> repl_;
  std::map<std::pair<const FormulaNode*, std::size_t>, Formula> memo_;
};

class FreeSubstituter {
public:
  FreeSubstituter(std::string_view name, Formula repl) : name_(name), repl_(repl) {}

  Formula run(Formula f) {
    if (!f.has_free_vars())
      return f;
    if (auto it = memo_.find(f.id()); it != memo_.end())
      return it->second;
    Formula out;
    if (f.kind() == FormulaKind::FreeVar) {
      out = f.name() == name_ ? repl_ : f;
    } else {
      std::vector<Formula> kids;
      for (Formula k : f.operands())
        kids.push_back(run(k));
      out = rebuild(f, std::move(kids));
    }
    memo_.emplace(f.id(), out);
    return out;
  }

private:
  std::string_view name_;
  Formula repl_;
  std::unordered_map<const FormulaNode*, Formula> memo_;
};

} // namespace

Formula mu_system(std::span<const std::string> names, std::span<const Formula> bodies,
                  std::size_t selected) {
  if (names.size() != bodies.size())
    throw InternalError("fixpoint system with mismatched names and bodies");
  Abstractor abs(names);
  std::vector<Formula> abstracted;
  abstracted.reserve(bodies.size());
  for (Formula b : bodies)
    abstracted.push_back(abs.run(b, 0));
  return mu_raw(std::move(abstracted), std::vector<std::string>(names.begin(), names.end()),
                selected);
}

Formula mu(std::string_view name, Formula body) {
  std::string n(name);
  return mu_system(std::span(&n, 1), std::span(&body, 1), 0);
}

Formula let_mu(std::span<const std::string> names, std::span<const Formula> bodies,
               Formula in_body) {
  std::vector<Formula> components;
  for (std::size_t i = 0; i < bodies.size(); ++i)
    components.push_back(mu_system(names, bodies, i));
  // Substitute right to left so that later duplicate names win, matching mu_system.
  Formula out = in_body;
  std::set<std::string> done;
  for (std::size_t i = names.size(); i-- > 0;) {
    if (!done.insert(names[i]).second)
      continue;
    out = FreeSubstituter(names[i], components[i]).run(out);
  }
  return out;
}

Formula substitute_free(Formula f, std::string_view name, Formula replacement) {
  if (replacement.open_depth() != 0)
    throw InternalError("substitution of a formula with loose bound variables");
  return FreeSubstituter(name, replacement).run(f);
}

Formula unfold(Formula m) {
  if (m.kind() != FormulaKind::Mu)
    throw InternalError("unfold of a non-fixpoint formula");
  if (m.open_depth() != 0)
    throw InternalError("unfold of an open fixpoint");
  const FormulaNode& n = node_of(m);
  std::vector<Formula> components;
  components.reserve(n.kids.size());
  for (std::size_t i = 0; i < n.kids.size(); ++i)
    components.push_back(i == n.component ? m : mu_raw(n.kids, n.hints, i));
  return BoundSubstituter(std::move(components)).run(n.kids[n.component], 0);
}

Formula conj(Formula a, Formula b) {
  if (a.is_false() || b.is_false())
    return bottom();
  if (a.is_true())
    return b;
  if (b.is_true() || a == b)
    return a;
  return land(a, b);
}

Formula disj(Formula a, Formula b) {
  if (a.is_true() || b.is_true())
    return top();
  if (a.is_false())
    return b;
  if (b.is_false() || a == b)
    return a;
  return lor(a, b);
}

Formula conj(std::span<const Formula> fs) {
  Formula acc = top();
  for (Formula f : fs)
    acc = conj(acc, f);
  return acc;
}

Formula disj(std::span<const Formula> fs) {
  Formula acc = bottom();
  for (Formula f : fs)
    acc = disj(acc, f);
  return acc;
}

std::size_t size(Formula f) {
  std::unordered_set<const FormulaNode*> seen;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g.id()).second)
      continue;
    for (Formula k : g.operands())
      stack.push_back(k);
  }
  return seen.size();
}

std::vector<std::string> labels_of(Formula f) {
  std::unordered_set<const FormulaNode*> seen;
  std::set<std::string> labels;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g.id()).second)
      continue;
    if (g.kind() == FormulaKind::Prop || g.kind() == FormulaKind::NegProp)
      labels.insert(g.label());
    for (Formula k : g.operands())
      stack.push_back(k);
  }
  return {labels.begin(), labels.end()};
}

// ---------------------------------------------------------------------------
// Printing

namespace {

bool is_keyword(std::string_view s) {
  return s == "T" || s == "F" || s == "mu" || s == "let_mu" || s == "in";
}

bool is_bare_label(std::string_view s) {
  if (s.empty() || is_keyword(s))
    return false;
  char c = s[0];
  if (!((c >= 'a' && c <= 'z') || c == '_'))
    return false;
  return std::all_of(s.begin(), s.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
           ch == '_' || ch == '-';
  });
}

std::string quote_label(std::string_view s) {
  if (is_bare_label(s))
    return std::string(s);
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\')
      out += '\\';
    out += c;
  }
  return out + "'";
}

class Printer {
public:
  std::string print(Formula f) {
    std::string out;
    emit(f, 0, out);
    return out;
  }

private:
  // Binder frames, innermost last.
  std::vector<std::vector<std::string>> frames_;
  std::multiset<std::string> in_use_;

  std::string fresh(const std::string& hint) {
    std::string base = hint;
    bool ok = !base.empty() && base[0] >= 'A' && base[0] <= 'Z' && !is_keyword(base) &&
              std::all_of(base.begin(), base.end(), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
              });
    if (!ok)
      base = "X";
    std::string candidate = base;
    for (int i = 1; in_use_.count(candidate); ++i)
      candidate = base + std::to_string(i);
    return candidate;
  }

  void emit(Formula f, int level, std::string& out) {
    switch (f.kind()) {
    case FormulaKind::True: out += "T"; return;
    case FormulaKind::False: out += "F"; return;
    case FormulaKind::Prop: out += quote_label(f.label()); return;
    case FormulaKind::NegProp: out += "~" + quote_label(f.label()); return;
    case FormulaKind::FreeVar: out += f.name(); return;
    case FormulaKind::BoundVar: {
      if (f.depth() >= frames_.size())
        throw InternalError("printing an open formula");
      out += frames_[frames_.size() - 1 - f.depth()].at(f.component());
      return;
    }
    case FormulaKind::NegModalTrue: out += "~<" + to_string(f.program()) + ">T"; return;
    case FormulaKind::Modal:
      out += "<" + to_string(f.program()) + ">";
      emit(f.body(), 3, out);
      return;
    case FormulaKind::Not: {
      Formula b = f.body();
      bool wrap = b.kind() == FormulaKind::Prop ||
                  (b.kind() == FormulaKind::Modal && b.body().is_true());
      out += "~";
      if (wrap) {
        out += "(";
        emit(b, 0, out);
        out += ")";
      } else {
        emit(b, 3, out);
      }
      return;
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
      int mine = f.kind() == FormulaKind::Or ? 1 : 2;
      bool paren = level > mine;
      if (paren)
        out += "(";
      emit(f.left(), mine, out);
      out += f.kind() == FormulaKind::Or ? " | " : " & ";
      emit(f.right(), mine + 1, out);
      if (paren)
        out += ")";
      return;
    }
    case FormulaKind::Mu: emit_mu(f, level, out); return;
    }
  }

  void emit_mu(Formula f, int level, std::string& out) {
    auto hints = f.binder_names();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < f.operands().size(); ++i) {
      names.push_back(fresh(i < hints.size() ? hints[i] : std::string()));
      in_use_.insert(names.back());
    }
    frames_.push_back(names);
    bool paren = level > 0;
    if (paren)
      out += "(";
    if (f.operands().size() == 1) {
      out += "mu " + names[0] + ". ";
      emit(f.operand(0), 0, out);
    } else {
      out += "let_mu ";
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (i)
          out += ", ";
        out += names[i] + " = ";
        emit(f.operand(i), 1, out);
      }
      out += " in " + names[f.selected()];
    }
    if (paren)
      out += ")";
    frames_.pop_back();
    for (const auto& n : names)
      in_use_.erase(in_use_.find(n));
  }
};

} // namespace

std::string to_string(Formula f) { return Printer().print(f); }

std::string debug_string(Formula f) {
  switch (f.kind()) {
  case FormulaKind::True: return "True";
  case FormulaKind::False: return "False";
  case FormulaKind::Prop: return "Prop(" + f.label() + ")";
  case FormulaKind::NegProp: return "NegProp(" + f.label() + ")";
  case FormulaKind::FreeVar: return "Var(" + f.name() + ")";
  case FormulaKind::BoundVar:
    return "Var#" + std::to_string(f.depth()) + "." + std::to_string(f.component());
  case FormulaKind::And: return "And(" + debug_string(f.left()) + "," + debug_string(f.right()) + ")";
  case FormulaKind::Or: return "Or(" + debug_string(f.left()) + "," + debug_string(f.right()) + ")";
  case FormulaKind::Modal: return "Modal(" + to_string(f.program()) + "," + debug_string(f.body()) + ")";
  case FormulaKind::NegModalTrue: return "NegModalTrue(" + to_string(f.program()) + ")";
  case FormulaKind::Not: return "Not(" + debug_string(f.body()) + ")";
  case FormulaKind::Mu: {
    std::string out = "Mu" + std::to_string(f.selected()) + "(";
    for (std::size_t i = 0; i < f.operands().size(); ++i)
      out += (i ? "," : "") + debug_string(f.operand(i));
    return out + ")";
  }
  }
  return "?";
}

} // namespace treelogic
