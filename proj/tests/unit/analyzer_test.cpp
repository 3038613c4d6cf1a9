#include "oracles.hpp"

#include "treelogic/acceptance.hpp"
#include "treelogic/analyzer.hpp"
#include "treelogic/bench.hpp"
#include "treelogic/errors.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace treelogic;

namespace {

XPathExpr X(const char* s) { return parse_xpath(s); }

TreeTypeDefs dtd(const char* s, const char* root) { return parse_dtd(s, std::string(root)); }

const char* kABC = "<!ELEMENT a (b|c)*><!ELEMENT b EMPTY><!ELEMENT c EMPTY>";
const char* kBC = "<!ELEMENT a (b*)><!ELEMENT b (c*)><!ELEMENT c EMPTY>";

std::string xml(const AnalysisResult& r) { return r.counterexample ? r.counterexample->document.to_xml() : ""; }

} // namespace

TEST_CASE("emptiness examples") {
  auto r = emptiness(X("/a/b"));
  CHECK_FALSE(r.holds);
  CHECK(xml(r) == "<a><b/></a>");
  CHECK(r.counterexample->path == "/a[1]/b[1]");
  CHECK(emptiness(X("/a/self::b")).holds);
  CHECK(emptiness(X("//b"), dtd("<!ELEMENT a (c*)><!ELEMENT c EMPTY><!ELEMENT b EMPTY>", "a")).holds);
}

TEST_CASE("containment examples") {
  CHECK(containment(X("/a/b"), X("/a/*")).holds);
  auto r = containment(X("//b"), X("/b"));
  CHECK_FALSE(r.holds);
  REQUIRE(r.counterexample);
  CHECK(r.counterexample->document.name(r.counterexample->node) == "b");
  CHECK(r.counterexample->node != 0);
  CHECK(containment(X("child::*"), X("descendant::*")).holds);
  CHECK_FALSE(containment(X("descendant::*"), X("child::*")).holds);
  CHECK_FALSE(containment(X("//b"), X("//a//b")).holds);
  auto inside = dtd("<!ELEMENT r (a|c)*><!ELEMENT a (b|a)*><!ELEMENT b EMPTY><!ELEMENT c (c*)>", "r");
  CHECK(containment(X("//b"), X("//a//b"), inside).holds);
}

TEST_CASE("property: containment is reflexive") {
  for (const auto& e : xpath_corpus(71, 40))
    CHECK(containment(e, e).holds);
}

TEST_CASE("equivalence examples") {
  CHECK(equivalence(X("a | b"), X("b | a")).holds);
  auto r = equivalence(X("/a/b"), X("/a/*"));
  CHECK_FALSE(r.holds);
  REQUIRE(r.counterexample);
  CHECK(r.counterexample->document.name(r.counterexample->node) != "b");
  CHECK(r.stats.size() == 2);
  CHECK(equivalence(X("descendant::a"), X("descendant-or-self::*/child::a")).holds);
}

TEST_CASE("overlap examples") {
  auto r = overlap(X("/a/b"), X("/a/*"));
  CHECK(r.holds);
  CHECK(xml(r) == "<a><b/></a>");
  CHECK_FALSE(overlap(X("/a"), X("/b")).holds);
  CHECK_FALSE(overlap(X("//b"), X("//c")).holds);
}

TEST_CASE("overlap is the satisfiability of the conjunction") {
  XPathExpr e1 = X("//a[b]"), e2 = X("/*/a");
  Problem p;
  p.kind = ProblemKind::Overlap;
  p.queries = {e1, e2};
  auto reductions = reduce(p);
  REQUIRE(reductions.size() == 1);
  const Alphabet& alphabet = reductions[0].alphabet;
  CHECK(alphabet.named().size() == 2);
  Formula rooted = mu("Z", disj(conj(document_root(), top()),
                                disj(modal(Program::Parent, var("Z")), modal(Program::PrevSibling, var("Z")))));
  CHECK(reductions[0].formula == conj(conj(compile_xpath(e1, document_root(), alphabet),
                                           compile_xpath(e2, document_root(), alphabet)),
                                      rooted));
  CHECK(overlap(e1, e2).holds == is_satisfiable(reductions[0].formula, alphabet).satisfiable);
}

TEST_CASE("coverage examples") {
  CHECK(coverage(X("/a/*"), {X("/a/b"), X("/a/c")}, dtd(kABC, "a")).holds);
  auto r = coverage(X("/a/*"), {X("/a/b"), X("/a/c")});
  CHECK_FALSE(r.holds);
  REQUIRE(r.counterexample);
  std::string label = r.counterexample->document.name(r.counterexample->node);
  CHECK(label != "b");
  CHECK(label != "c");
  CHECK(coverage(X("//a"), {X("//a")}).holds);
}

TEST_CASE("typecheck examples") {
  CHECK(typecheck(X("//b"), dtd(kBC, "a"), Expectation{{"b"}, std::nullopt}).holds);
  auto r = typecheck(X("/a/*"), dtd(kABC, "a"), Expectation{{"b"}, std::nullopt});
  CHECK_FALSE(r.holds);
  CHECK(xml(r) == "<a><c/></a>");
  CHECK(typecheck(X("//b"), dtd(kBC, "a"), Expectation{{}, parse_type_defs("B -> b(C*)\nC -> c()")}).holds);
  r = typecheck(X("//b"), dtd(kBC, "a"), Expectation{{}, parse_type_defs("B -> b(C?)\nC -> c()")});
  CHECK_FALSE(r.holds);
  CHECK(validate(r.counterexample->document, dtd(kBC, "a")));
}

TEST_CASE("malformed problems") {
  Problem p;
  p.kind = ProblemKind::Containment;
  p.queries = {X("a")};
  CHECK_THROWS_AS(analyze(p), Error);
  p.kind = ProblemKind::Typecheck;
  CHECK_THROWS_AS(analyze(p), Error);
  p.expected = Expectation{{"a"}, parse_type_defs("A -> a()")};
  CHECK_THROWS_AS(analyze(p), Error);
}

TEST_CASE("property: counterexamples are genuine and holds verdicts survive probing") {
  auto queries = xpath_corpus(72, 60);
  auto types = dtd_corpus(72, 10);
  Rng rng(72);
  for (std::size_t i = 0; i + 1 < queries.size(); i += 2) {
    Problem p;
    p.kind = ProblemKind::Containment;
    p.queries = {queries[i], queries[i + 1]};
    AnalysisResult r = analyze(p);
    INFO(unparse(queries[i]), " <= ", unparse(queries[i + 1]));
    if (!r.holds) {
      REQUIRE(r.counterexample);
      CHECK(acceptance::genuine(p, *r.counterexample));
      continue;
    }
    for (int k = 0; k < 100; ++k)
      CHECK(acceptance::holds_on(p, random_document(rng, 8, {"a", "b", "c"})));
    // Holding without a constraint implies holding under any constraint.
    for (const auto& t : types) {
      p.constraint = t;
      CHECK(analyze(p).holds);
    }
  }
}

TEST_CASE("document ids follow document order") {
  WitnessTree w;
  w.nodes = {{"a", 2, std::nullopt}, {"c", std::nullopt, std::nullopt}, {"b", std::nullopt, 1}};
  w.root = 0;
  CHECK(document_ids(w) == std::vector<std::size_t>{0, 2, 1});
}

TEST_CASE("performance suite") {
  auto suite = bench_suite();
  CHECK(suite.size() == 20);
  CHECK(article_dtd().defs.size() >= 18);
  std::ifstream in(TREELOGIC_DATA_DIR "/article.dtd");
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == article_dtd_text());
  std::size_t typechecks = 0;
  for (const auto& b : suite) {
    typechecks += b.problem.kind == ProblemKind::Typecheck;
    CHECK((b.problem.kind == ProblemKind::Containment || b.problem.kind == ProblemKind::Typecheck));
  }
  CHECK(typechecks > 0);
}
