#include "oracles.hpp"

#include "treelogic/errors.hpp"
#include "treelogic/logic.hpp"
#include "treelogic/solver.hpp"

#include <doctest.h>

#include <set>

using namespace treelogic;
using treelogic::testing::has_small_model;
using treelogic::testing::tree;

namespace {

Formula F(const char* s) { return parse_formula(s); }

TypeValuation valuation(const Lean& lean, std::initializer_list<const char*> entries) {
  TypeValuation t(lean.size());
  for (const char* e : entries) {
    auto i = lean.index_of(F(e));
    REQUIRE(i);
    t.set(*i);
  }
  return t;
}

std::vector<TypeValuation> all_valuations(std::size_t n) {
  std::vector<TypeValuation> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
    TypeValuation t(n);
    for (std::size_t i = 0; i < n; ++i)
      t.set(i, (bits >> i) & 1);
    out.push_back(t);
  }
  return out;
}

// a -(1)-> b -(2)-> c
WitnessTree abc_chain() {
  return tree({{"a", 1, std::nullopt}, {"b", std::nullopt, 2}, {"c", std::nullopt, std::nullopt}});
}

} // namespace

TEST_CASE("entails examples") {
  Formula f = F("(mu X. <-1>c | <-2>X) | a | <1>b | c");
  Lean lean(nnf(f), Alphabet({"a", "b", "c"}));
  CHECK(entails(valuation(lean, {"a"}), F("a"), lean));
  CHECK(entails(valuation(lean, {"a", "<1>T", "<1>b"}), F("<1>b | c"), lean));
  CHECK_FALSE(entails(valuation(lean, {"a"}), F("<1>b | c"), lean));
  CHECK(entails(valuation(lean, {"a", "<-2>T", "<-2>(mu X. <-1>c | <-2>X)"}), F("mu X. <-1>c | <-2>X"), lean));
  CHECK_FALSE(entails(valuation(lean, {"a", "<-2>T"}), F("mu X. <-1>c | <-2>X"), lean));
  CHECK(entails(valuation(lean, {"a"}), F("~<1>T"), lean));
}

TEST_CASE("consistency and edge compatibility examples") {
  Lean lean(F("a & <1>b"), Alphabet({"a", "b", "c"}));
  TypeValuation parent = valuation(lean, {"a", "<1>T", "<1>b"});
  CHECK(is_consistent(parent, lean));
  CHECK_FALSE(is_consistent(valuation(lean, {"a", "b"}), lean));
  CHECK_FALSE(is_consistent(valuation(lean, {"a", "<1>b"}), lean));
  CHECK_FALSE(is_consistent(valuation(lean, {"a", "<-1>T", "<-2>T"}), lean));
  CHECK(delta_compatible(parent, valuation(lean, {"b", "<-1>T"}), Program::FirstChild, lean));
  CHECK_FALSE(delta_compatible(parent, valuation(lean, {"c", "<-1>T"}), Program::FirstChild, lean));
  CHECK_FALSE(delta_compatible(parent, valuation(lean, {"b", "<-2>T"}), Program::FirstChild, lean));
  // The parent claims no sibling edge.
  CHECK_FALSE(delta_compatible(parent, valuation(lean, {"b", "<-2>T"}), Program::NextSibling, lean));
  CHECK_THROWS_AS(delta_compatible(parent, parent, Program::Parent, lean), InternalError);
}

TEST_CASE("satisfiability examples") {
  Verdict v = is_satisfiable(top());
  REQUIRE(v.satisfiable);
  CHECK(v.witness->size() == 1);

  CHECK_FALSE(is_satisfiable(F("a & ~a")).satisfiable);
  CHECK_FALSE(is_satisfiable(F("mu X. <1>X")).satisfiable);
  CHECK_FALSE(is_satisfiable(F("<-1>T & ~<-1>T")).satisfiable);

  v = is_satisfiable(F("a & <1>b"));
  REQUIRE(v.satisfiable);
  CHECK(decode_witness(*v.witness).to_xml() == "<a><b/></a>");
  CHECK(holds_at(F("a & <1>b"), *v.witness, *v.satisfying_node));
  CHECK(has_small_model(F("a & <1>b"), 2, {"a", "b", "_other"}));

  Formula f = F("a & <1>(b & <2>c)");
  v = is_satisfiable(f);
  REQUIRE(v.satisfiable);
  CHECK(decode_witness(*v.witness).to_xml() == "<a><b/><c/></a>");
  CHECK(holds_at(f, *v.witness, v.witness->root));

  // Only reachable by going up: the marked node is below the witness root.
  f = F("b & <-1>a");
  v = is_satisfiable(f);
  REQUIRE(v.satisfiable);
  CHECK(*v.satisfying_node != v.witness->root);
  CHECK(holds_at(f, *v.witness, *v.satisfying_node));
}

TEST_CASE("solver input errors") {
  CHECK_THROWS_AS(is_satisfiable(F("mu X. <1><-1>X | a")), NotCycleFreeError);
  CHECK_THROWS_AS(is_satisfiable(var("X")), Error);
}

TEST_CASE("the alphabet is extended with the labels of the formula") {
  Verdict v = is_satisfiable(F("a & <1>c"), Alphabet({"b"}));
  REQUIRE(v.satisfiable);
  CHECK(v.witness->nodes[*v.satisfying_node].label == "a");
  CHECK_THROWS_AS(Lean(F("a"), Alphabet({"b"})), Error);
}

TEST_CASE("resource limits") {
  Formula f = F("mu X. <1>(a & <2>(b & <1>X | c)) | mu Y. <2>(<1>Y | b & <1>(a & <2>c))");
  SolverOptions tiny;
  tiny.max_bdd_nodes = 16;
  CHECK_THROWS_AS(is_satisfiable(f, Alphabet::of(f), tiny), ResourceLimitError);
  SolverOptions instant;
  instant.time_limit = std::chrono::milliseconds(0);
  CHECK_THROWS_AS(is_satisfiable(f, Alphabet::of(f), instant), ResourceLimitError);
}

TEST_CASE("witness decoding examples") {
  CHECK(decode_witness(tree({{"a", std::nullopt, std::nullopt}})).to_xml() == "<a/>");
  CHECK(decode_witness(abc_chain()).to_xml() == "<a><b/><c/></a>");
  CHECK(decode_witness(tree({{"a", 1, std::nullopt}, {"b", 2, std::nullopt}, {"c", std::nullopt, std::nullopt}}))
            .to_xml() == "<a><b><c/></b></a>");
  CHECK_THROWS_AS(decode_witness(tree({{"a", std::nullopt, 1}, {"b", std::nullopt, std::nullopt}})), Error);
}

TEST_CASE("evaluator examples") {
  WitnessTree w = abc_chain();
  CHECK(eval_formula(top(), w) == std::vector<bool>{true, true, true});
  WitnessTree ab = tree({{"a", 1, std::nullopt}, {"b", std::nullopt, std::nullopt}});
  CHECK(eval_formula(F("<-1>T"), ab) == std::vector<bool>{false, true});
  CHECK(eval_formula(F("mu X. <-1>T | <-2>X"), w) == std::vector<bool>{false, true, true});
  CHECK(eval_formula(F("mu X. <1>X | <2>X | c"), w) == std::vector<bool>{true, true, true});
  CHECK(eval_formula(F("let_mu X = <1>Y | a, Y = <2>X | c in X"), w) == std::vector<bool>{true, false, false});
}

TEST_CASE("property: valuation sets match explicit sets") {
  // 2 labels + 1 other + 4 tops + up to 5 modal entries.
  for (const char* text : {"a", "<1>a", "<1>a & <2>b", "mu X. <1>(a | X) | <-2>b", "<1><2>a | <-1>b"}) {
    Formula f = nnf(F(text));
    Lean lean(f, Alphabet({"a", "b"}));
    REQUIRE(lean.size() <= 12);
    ValuationSpace space(lean);
    auto all = all_valuations(lean.size());
    std::vector<TypeValuation> consistent;
    for (const auto& t : all)
      if (is_consistent(t, lean))
        consistent.push_back(t);
    ValuationSet universe = space.universe();
    CHECK(universe.count() == doctest::Approx(consistent.size()));
    for (const auto& t : all)
      CHECK(universe.contains(t) == is_consistent(t, lean));

    Rng rng(lean.size());
    for (int round = 0; round < 6; ++round) {
      std::set<TypeValuation> a, b;
      ValuationSet sa = space.empty(), sb = space.empty();
      for (const auto& t : consistent) {
        if (rng.chance(30))
          a.insert(t), sa = sa.unite(space.singleton(t));
        if (rng.chance(30))
          b.insert(t), sb = sb.unite(space.singleton(t));
      }
      CHECK(sa.count() == doctest::Approx(a.size()));
      ValuationSet u = sa.unite(sb), i = sa.intersect(sb), c = sa.complement();
      for (const auto& t : consistent) {
        CHECK(u.contains(t) == (a.count(t) || b.count(t)));
        CHECK(i.contains(t) == (a.count(t) && b.count(t)));
        CHECK(c.contains(t) == !a.count(t));
      }
      if (!a.empty())
        CHECK(sa.first() == *a.begin());
      auto listed = sa.enumerate(a.size() + 1);
      CHECK(std::set<TypeValuation>(listed.begin(), listed.end()) == a);
      for (Program p : kForwardPrograms) {
        ValuationSet parents = sa.parents_via(p);
        for (const auto& t : consistent) {
          bool expected = false;
          for (const auto& child : a)
            expected = expected || delta_compatible(t, child, p, lean);
          CHECK(parents.contains(t) == expected);
        }
      }
    }
  }
}

TEST_CASE("property: the fixpoint grows strictly until it stops") {
  for (Formula f : formula_corpus(41, 60)) {
    Formula g = nnf(f);
    Lean lean(g, Alphabet::of(g));
    SolverOptions options;
    FixpointTrace trace(lean, options);
    std::size_t rounds = 0;
    while (trace.step())
      ++rounds;
    const auto& levels = trace.levels();
    for (std::size_t k = 1; k < levels.size(); ++k) {
      CHECK(levels[k - 1].intersect(levels[k]) == levels[k - 1]);
      if (k + 1 < levels.size())
        CHECK(levels[k].count() > levels[k - 1].count());
    }
    CHECK(rounds <= trace.space().universe().count());
  }
}

TEST_CASE("property: verdicts, witnesses and stats are deterministic") {
  for (Formula f : formula_corpus(42, 80)) {
    Verdict a = is_satisfiable(f), b = is_satisfiable(f);
    CHECK(a.satisfiable == b.satisfiable);
    CHECK(a.satisfying_node == b.satisfying_node);
    if (a.witness && b.witness)
      CHECK(decode_hedge(*a.witness, *a.satisfying_node).trees == decode_hedge(*b.witness, *b.satisfying_node).trees);
    CHECK(a.stats.lean_size == b.stats.lean_size);
    CHECK(a.stats.iterations == b.stats.iterations);
    CHECK(a.stats.valuations == b.stats.valuations);
  }
}

TEST_CASE("property: monotone under disjunction and conjunction") {
  auto corpus = formula_corpus(43, 120);
  for (std::size_t i = 0; i + 1 < corpus.size(); i += 2) {
    bool f = is_satisfiable(corpus[i]).satisfiable;
    bool g = is_satisfiable(corpus[i + 1]).satisfiable;
    CHECK(is_satisfiable(lor(corpus[i], corpus[i + 1])).satisfiable == (f || g));
    if (!f || !g)
      CHECK_FALSE(is_satisfiable(land(corpus[i], corpus[i + 1])).satisfiable);
  }
}

TEST_CASE("early stop gives the same answers") {
  SolverOptions full;
  full.stop_early = false;
  for (Formula f : formula_corpus(44, 100)) {
    Verdict a = is_satisfiable(f), b = is_satisfiable(f, Alphabet::of(f), full);
    CHECK(a.satisfiable == b.satisfiable);
    if (b.satisfiable)
      CHECK(holds_at(f, *b.witness, *b.satisfying_node));
  }
}
