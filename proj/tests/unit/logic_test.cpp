#include "oracles.hpp"

#include "treelogic/errors.hpp"
#include "treelogic/logic.hpp"

#include <doctest.h>

using namespace treelogic;
using treelogic::testing::agree_on_small_trees;

namespace {

Formula F(const char* s) { return parse_formula(s); }

const std::vector<std::string> kAB{"a", "b"};

} // namespace

TEST_CASE("parser maps syntax to constructors") {
  CHECK(F("T") == top());
  CHECK(F("F") == bottom());
  CHECK(F("a & <1>b") == land(prop("a"), modal(Program::FirstChild, prop("b"))));
  CHECK(F("mu X. <-1>c | <-2>X") ==
        mu("X", lor(modal(Program::Parent, prop("c")), modal(Program::PrevSibling, var("X")))));
  CHECK(F("~a") == neg_prop("a"));
  CHECK(F("~<2>T") == neg_modal_true(Program::NextSibling));
  CHECK(F("'odd name'") == prop("odd name"));
}

TEST_CASE("printing round-trips through the parser") {
  for (const char* s : {"a & <1>b", "mu X. <-1>c | <-2>X", "~(a & b)", "<-2>~<1>T",
                        "let_mu X = <1>Y | a, Y = <2>X | b in X", "mu X. mu Y. <1>X | <2>Y | a"}) {
    Formula f = F(s);
    CHECK(F(to_string(f).c_str()) == f);
  }
  for (Formula f : formula_corpus(21, 200))
    CHECK(parse_formula(to_string(f)) == f);
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(F("a &"), SyntaxError);
  CHECK_THROWS_AS(F("<3>a"), SyntaxError);
  CHECK_THROWS_AS(F("X"), UnboundVariableError);
  CHECK_THROWS_AS(F("mu X. ~X"), PositivityError);
  CHECK_THROWS_AS(F("mu X. ~(a & X)"), PositivityError);
}

TEST_CASE("hash-consing shares equal formulas") {
  CHECK(F("a & <1>b") == F("a  &  <1> b"));
  CHECK(F("mu X. <1>X | a") == F("mu Y. <1>Y | a"));
  CHECK(size(F("<1>a & <1>a")) == size(F("<1>a")) + 1);
}

TEST_CASE("negation normal form examples") {
  CHECK(nnf(lnot(F("a & b"))) == F("~a | ~b"));
  CHECK(nnf(lnot(lnot(prop("a")))) == prop("a"));
  Formula negated = nnf(lnot(F("<1>a")));
  CHECK(negated == lor(neg_modal_true(Program::FirstChild), modal(Program::FirstChild, neg_prop("a"))));
  CHECK(agree_on_small_trees(negated, lnot(F("<1>a")), 3, kAB));
  CHECK(is_nnf(negated));
}

TEST_CASE("property: nnf is idempotent and preserves meaning") {
  for (Formula f : formula_corpus(31, 150)) {
    Formula g = nnf(f);
    CHECK(is_nnf(g));
    CHECK(nnf(g) == g);
    CHECK(agree_on_small_trees(f, g, 4, kAB));
  }
}

TEST_CASE("property: double negation round trip") {
  for (Formula f : formula_corpus(32, 150)) {
    Formula back = nnf(lnot(nnf(lnot(f))));
    CHECK(agree_on_small_trees(back, nnf(f), 4, kAB));
  }
}

TEST_CASE("property: negation is complement on finite trees") {
  for (Formula f : formula_corpus(33, 100)) {
    Formula n = negate(f);
    for_each_binary_tree(4, kAB, false, [&](const WitnessTree& w) {
      auto pos = eval_formula(f, w);
      auto neg = eval_formula(n, w);
      for (std::size_t i = 0; i < pos.size(); ++i)
        CHECK(pos[i] != neg[i]);
    });
  }
}

TEST_CASE("cycle-freeness") {
  CHECK(is_cycle_free(F("mu X. <1>X")));
  CHECK_FALSE(is_cycle_free(F("mu X. a | X")));
  CHECK_FALSE(is_cycle_free(F("mu X. <1><-1>X")));
  CHECK(is_cycle_free(F("mu X. <1>X | <2>X | a")));
  CHECK(is_cycle_free(F("mu X. <-1>X | <-2>X | a")));
  CHECK_FALSE(is_cycle_free(F("mu X. <1>X | <-1>X | a")));
  // A closed subterm inside a cycle does not extend it.
  CHECK(is_cycle_free(F("mu X. <1>(X | mu Y. <-1>Y | a)")));
  CHECK(is_cycle_free(F("let_mu X = <1>Y | a, Y = <2>X | b in X")));
  CHECK_FALSE(is_cycle_free(F("let_mu X = <1>Y | a, Y = <-1>X | b in X")));
}

TEST_CASE("closure examples") {
  auto as_set = [](const std::vector<Formula>& v) { return std::set<Formula>(v.begin(), v.end()); };
  CHECK(as_set(fl_closure(F("a & b"))) == std::set<Formula>{F("a & b"), F("a"), F("b")});
  Formula m = F("mu X. <1>X");
  CHECK(as_set(fl_closure(m)) == std::set<Formula>{m, modal(Program::FirstChild, m)});
  CHECK(as_set(fl_closure(F("<1>T"))) == std::set<Formula>{F("<1>T"), top()});
  CHECK_THROWS_AS(fl_closure(var("X")), InternalError);
}

TEST_CASE("lean examples") {
  auto entries = [](const char* f, std::vector<std::string> alphabet) {
    Lean l(F(f), Alphabet(std::move(alphabet)));
    std::set<std::string> out;
    for (Formula g : l.entries())
      out.insert(to_string(g));
    return out;
  };
  using S = std::set<std::string>;
  CHECK(entries("a", {"a"}) == S{"a", "_other", "<1>T", "<2>T", "<-1>T", "<-2>T"});
  CHECK(entries("<1>b", {"b"}) == S{"b", "_other", "<1>b", "<1>T", "<2>T", "<-1>T", "<-2>T"});
  auto l = entries("mu X. <-1>c | <-2>X", {"c"});
  CHECK(l.count("<-1>c") == 1);
  CHECK(l.count("<-2>(mu X. <-1>c | <-2>X)") == 1);
  CHECK(l.size() == 8);
  CHECK_THROWS_AS(Lean(F("a"), Alphabet({"b"})), Error);

  Lean lean(F("<1>b"), Alphabet({"b"}));
  CHECK(lean.label_index("b") == 0);
  CHECK(lean.label_index(kOtherLabel) == 1);
  CHECK(lean.entry(lean.top_index(Program::Parent)) == F("<-1>T"));
  CHECK(lean.modal_indices().size() == 1);
}

TEST_CASE("property: lean and closure stay linear in the formula") {
  std::size_t worst_closure = 0, worst_size = 1;
  for (Formula f : formula_corpus(34, 300)) {
    Formula g = nnf(f);
    Alphabet alphabet = Alphabet::of(g);
    Lean lean(g, alphabet);
    CHECK(lean.size() <= size(g) + alphabet.size() + 4);
    std::size_t c = fl_closure(g).size();
    if (c * worst_size > worst_closure * size(g))
      worst_closure = c, worst_size = size(g);
  }
  // Each binder adds at most one unfolding per component.
  CHECK(worst_closure <= 2 * worst_size);
}

TEST_CASE("alphabet") {
  Alphabet a({"b", "a", "b"});
  CHECK(a.named() == std::vector<std::string>{"a", "b"});
  CHECK(a.symbols().back() == kOtherLabel);
  CHECK(a.contains("a"));
  CHECK_FALSE(a.contains("c"));
  CHECK(Alphabet::of(F("a & <1>c")).named() == std::vector<std::string>{"a", "c"});
  CHECK(a.merged(Alphabet({"c"})).named() == std::vector<std::string>{"a", "b", "c"});
}
