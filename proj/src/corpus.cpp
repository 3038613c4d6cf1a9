#include "treelogic/corpus.hpp"

#include "treelogic/logic.hpp"

#include <functional>

namespace treelogic {

namespace {

class FormulaGenerator {
public:
  FormulaGenerator(Rng& rng, const FormulaGenOptions& options) : rng_(rng), opt_(options) {}

  Formula generate() { return gen(opt_.max_depth, {}, all_programs()); }

private:
  struct Scope {
    std::string name;
    bool guarded;
  };

  Rng& rng_;
  const FormulaGenOptions& opt_;

  static std::vector<Program> all_programs() { return {std::begin(kAllPrograms), std::end(kAllPrograms)}; }

  const std::string& label() { return rng_.pick(opt_.labels); }

  Formula leaf(const std::vector<Scope>& scopes) {
    std::vector<const Scope*> usable;
    for (const auto& s : scopes)
      if (s.guarded)
        usable.push_back(&s);
    if (!usable.empty() && rng_.chance(45))
      return var(rng_.pick(usable)->name);
    switch (rng_.below(6)) {
    case 0:
    case 1:
      return prop(label());
    case 2:
    case 3:
      return neg_prop(label());
    case 4:
      return neg_modal_true(rng_.pick(all_programs()));
    default:
      return rng_.chance(70) ? top() : bottom();
    }
  }

  // Programs usable below a new binder: one or two from `allowed`, never a
  // program together with its converse.
  std::vector<Program> restrict(const std::vector<Program>& allowed) {
    std::vector<Program> out{rng_.pick(allowed)};
    if (rng_.chance(40)) {
      Program q = rng_.pick(allowed);
      if (q != out[0] && q != converse(out[0]))
        out.push_back(q);
    }
    return out;
  }

  Formula gen(std::size_t depth, std::vector<Scope> scopes, const std::vector<Program>& allowed) {
    if (depth <= 1 || rng_.chance(20))
      return leaf(scopes);
    std::size_t op = rng_.below(100);
    if (op < 22)
      return land(gen(depth - 1, scopes, allowed), gen(depth - 1, scopes, allowed));
    if (op < 44)
      return lor(gen(depth - 1, scopes, allowed), gen(depth - 1, scopes, allowed));
    if (op < 70) {
      Program p = rng_.pick(allowed);
      for (auto& s : scopes)
        s.guarded = true;
      return modal(p, gen(depth - 1, scopes, allowed));
    }
    if (op < 90 && depth >= 3) {
      std::string name = "X" + std::to_string(scopes.size());
      std::vector<Program> inner = restrict(allowed);
      scopes.push_back({name, false});
      Formula base = gen(depth - 2, scopes, inner);
      auto guarded = scopes;
      for (auto& s : guarded)
        s.guarded = true;
      Formula rec = var(name);
      if (depth >= 4 && rng_.chance(50)) {
        Formula extra = gen(depth - 3, guarded, inner);
        rec = rng_.chance(50) ? lor(rec, extra) : land(rec, extra);
      }
      Formula step = modal(rng_.pick(inner), rec);
      Formula body = rng_.chance(75) ? lor(base, step) : land(base, step);
      return mu(name, body);
    }
    // Negation only of closed subformulas, which keeps every binder positive.
    return lnot(gen(depth - 1, {}, all_programs()));
  }
};

void shapes_of(std::size_t k, std::vector<std::vector<std::vector<std::pair<int, int>>>>& memo) {
  // memo[k]: all shapes with k nodes, each a pre-order list of (left, right) ids (-1 for none).
  if (memo.size() > k)
    return;
  for (std::size_t n = memo.size(); n <= k; ++n) {
    std::vector<std::vector<std::pair<int, int>>> out;
    if (n == 0) {
      out.push_back({});
    } else {
      for (std::size_t l = 0; l < n; ++l) {
        std::size_t r = n - 1 - l;
        for (const auto& ls : memo[l])
          for (const auto& rs : memo[r]) {
            std::vector<std::pair<int, int>> s;
            s.reserve(n);
            s.push_back({l ? 1 : -1, r ? static_cast<int>(1 + l) : -1});
            auto shift = [](std::pair<int, int> e, int by) {
              return std::pair<int, int>{e.first < 0 ? -1 : e.first + by,
                                         e.second < 0 ? -1 : e.second + by};
            };
            for (auto e : ls)
              s.push_back(shift(e, 1));
            for (auto e : rs)
              s.push_back(shift(e, static_cast<int>(1 + l)));
            out.push_back(std::move(s));
          }
      }
    }
    memo.push_back(std::move(out));
  }
}

} // namespace

Formula random_formula(Rng& rng, const FormulaGenOptions& options) {
  FormulaGenerator g(rng, options);
  for (;;) {
    Formula f = g.generate();
    if (is_cycle_free(nnf(f)))
      return f;
  }
}

std::vector<Formula> formula_corpus(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<Formula> out;
  FormulaGenOptions two;
  FormulaGenOptions three;
  three.labels = {"a", "b", "c"};
  while (out.size() < count)
    out.push_back(random_formula(rng, rng.chance(50) ? two : three));
  return out;
}

namespace {

class XPathGenerator {
public:
  XPathGenerator(Rng& rng, const XPathGenOptions& options) : rng_(rng), opt_(options) {}

  XPathExpr expr(std::size_t depth, bool allow_absolute) {
    if (rng_.chance(15)) {
      XPathExpr u;
      u.kind = XPathExpr::Kind::Union;
      u.branches.push_back(path(depth, allow_absolute));
      u.branches.push_back(path(depth, allow_absolute));
      return u;
    }
    return path(depth, allow_absolute);
  }

private:
  Rng& rng_;
  const XPathGenOptions& opt_;

  Axis axis() {
    static const std::vector<Axis> weighted{
        Axis::Child,          Axis::Child,           Axis::Child,           Axis::Descendant,
        Axis::Descendant,     Axis::DescendantOrSelf, Axis::Self,           Axis::Parent,
        Axis::Ancestor,       Axis::AncestorOrSelf,  Axis::FollowingSibling, Axis::PrecedingSibling,
        Axis::Following,      Axis::Preceding};
    return rng_.pick(weighted);
  }

  NodeTest test() {
    NodeTest t;
    std::size_t r = rng_.below(10);
    if (r < 6) {
      t.kind = NodeTest::Kind::Name;
      t.name = rng_.pick(opt_.labels);
    } else if (r < 9) {
      t.kind = NodeTest::Kind::Any;
    } else {
      t.kind = NodeTest::Kind::Node;
    }
    return t;
  }

  Predicate predicate(std::size_t depth) {
    Predicate p;
    std::size_t r = rng_.below(10);
    if (r < 6 || depth == 0) {
      p.kind = Predicate::Kind::Exists;
      p.path.push_back(expr(depth, false));
    } else if (r < 8) {
      p.kind = rng_.chance(50) ? Predicate::Kind::And : Predicate::Kind::Or;
      p.operands.push_back(predicate(depth - 1));
      p.operands.push_back(predicate(depth - 1));
    } else {
      p.kind = Predicate::Kind::Not;
      p.operands.push_back(predicate(depth - 1));
    }
    return p;
  }

  XPathExpr path(std::size_t depth, bool allow_absolute) {
    XPathExpr p;
    p.absolute = allow_absolute && rng_.chance(50);
    std::size_t n = 1 + rng_.below(opt_.max_steps);
    for (std::size_t i = 0; i < n; ++i) {
      Step s;
      s.axis = axis();
      s.test = test();
      // Predicates are kept off node() steps so none can apply to the document node.
      if (depth > 0 && s.test.kind != NodeTest::Kind::Node && rng_.chance(25))
        s.predicates.push_back(predicate(depth - 1));
      p.steps.push_back(std::move(s));
    }
    return p;
  }
};

} // namespace

XPathExpr random_xpath(Rng& rng, const XPathGenOptions& options) {
  return XPathGenerator(rng, options).expr(options.max_depth, true);
}

std::vector<XPathExpr> xpath_corpus(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  XPathGenOptions opt;
  XPathGenOptions wide;
  wide.labels = {"a", "b", "c"};
  std::vector<XPathExpr> out;
  while (out.size() < count)
    out.push_back(random_xpath(rng, rng.chance(80) ? opt : wide));
  return out;
}

namespace {

class TypeGenerator {
public:
  TypeGenerator(Rng& rng, const TypeGenOptions& options) : rng_(rng), opt_(options) {}

  TreeTypeDefs generate() {
    std::vector<std::string> names = opt_.labels;
    std::vector<std::string> labels = opt_.labels;
    if (rng_.chance(opt_.shared_label_percent)) {
      std::string l = rng_.pick(opt_.labels);
      names.push_back(l + "2");
      labels.push_back(l);
    }
    TreeTypeDefs t;
    for (std::size_t i = 0; i < names.size(); ++i) {
      Regex content = rng_.chance(20) ? Regex::epsilon() : regex(opt_.max_depth, names);
      t.defs[names[i]] = TypeDef{labels[i], std::move(content)};
    }
    t.start = rng_.pick(names);
    return t;
  }

private:
  Rng& rng_;
  const TypeGenOptions& opt_;

  Regex regex(std::size_t depth, const std::vector<std::string>& names) {
    if (depth <= 1 || rng_.chance(30))
      return Regex::symbol(rng_.pick(names));
    switch (rng_.below(5)) {
    case 0:
      return Regex::seq(regex(depth - 1, names), regex(depth - 1, names));
    case 1:
      return Regex::alt(regex(depth - 1, names), regex(depth - 1, names));
    case 2:
      return Regex::star(regex(depth - 1, names));
    case 3:
      return Regex::opt(regex(depth - 1, names));
    default:
      return Regex::plus(regex(depth - 1, names));
    }
  }
};

} // namespace

TreeTypeDefs random_type_defs(Rng& rng, const TypeGenOptions& options) {
  return TypeGenerator(rng, options).generate();
}

std::vector<TreeTypeDefs> dtd_corpus(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  TypeGenOptions two;
  TypeGenOptions three;
  three.labels = {"a", "b", "c"};
  std::vector<TreeTypeDefs> out;
  while (out.size() < count) {
    TreeTypeDefs t = random_type_defs(rng, rng.chance(70) ? two : three);
    out.push_back(parse_dtd(to_dtd(t)));
  }
  return out;
}

std::optional<XmlDocument> sample_document(Rng& rng, const TreeTypeDefs& t, std::size_t max_nodes) {
  std::size_t budget = max_nodes;
  std::function<std::optional<Element>(const std::string&)> build =
      [&](const std::string& nt) -> std::optional<Element> {
    if (budget == 0)
      return std::nullopt;
    --budget;
    const TypeDef& d = t.defs.at(nt);
    Element e{d.label, {}};
    Regex state = d.content;
    for (;;) {
      std::vector<std::string> moves;
      for (const auto& a : state.first())
        if (state.derivative(a).kind != Regex::Kind::Empty)
          moves.push_back(a);
      bool stop = state.nullable() && (moves.empty() || budget == 0 || rng.chance(40));
      if (stop)
        return e;
      if (moves.empty() || budget == 0)
        return std::nullopt;
      const std::string& a = rng.pick(moves);
      auto child = build(a);
      if (!child)
        return std::nullopt;
      e.children.push_back(std::move(*child));
      state = state.derivative(a);
    }
  };
  auto root = build(t.start);
  if (!root)
    return std::nullopt;
  return XmlDocument(std::move(*root));
}

XmlDocument random_document(Rng& rng, std::size_t max_nodes, const std::vector<std::string>& labels) {
  std::size_t n = 1 + rng.below(max_nodes);
  std::vector<std::size_t> parent(n, 0);
  for (std::size_t i = 1; i < n; ++i)
    parent[i] = rng.below(i);
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t i = 1; i < n; ++i)
    kids[parent[i]].push_back(i);
  std::vector<std::string> names(n);
  for (auto& s : names)
    s = rng.pick(labels);
  std::function<Element(std::size_t)> build = [&](std::size_t i) {
    Element e{names[i], {}};
    for (std::size_t c : kids[i])
      e.children.push_back(build(c));
    return e;
  };
  return XmlDocument(build(0));
}

void for_each_binary_tree(std::size_t max_nodes, const std::vector<std::string>& labels,
                          bool documents_only, const std::function<void(const WitnessTree&)>& visit) {
  std::vector<std::vector<std::vector<std::pair<int, int>>>> memo;
  shapes_of(max_nodes, memo);
  WitnessTree w;
  for (std::size_t n = 1; n <= max_nodes; ++n) {
    for (const auto& shape : memo[n]) {
      if (documents_only && shape[0].second >= 0)
        continue;
      w.nodes.assign(n, WitnessNode{});
      w.root = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (shape[i].first >= 0)
          w.nodes[i].first_child = static_cast<std::size_t>(shape[i].first);
        if (shape[i].second >= 0)
          w.nodes[i].next_sibling = static_cast<std::size_t>(shape[i].second);
      }
      std::vector<std::size_t> digit(n, 0);
      for (;;) {
        for (std::size_t i = 0; i < n; ++i)
          w.nodes[i].label = labels[digit[i]];
        visit(w);
        std::size_t i = 0;
        while (i < n && ++digit[i] == labels.size())
          digit[i++] = 0;
        if (i == n)
          break;
      }
    }
  }
}

} // namespace treelogic
