#include "oracles.hpp"

#include "treelogic/analyzer.hpp"
#include "treelogic/errors.hpp"
#include "treelogic/xpath.hpp"

#include <doctest.h>

using namespace treelogic;

namespace {

std::string U(const char* s) { return unparse(parse_xpath(s)); }

std::vector<std::size_t> eval(const char* e, const char* doc, std::size_t context = 0) {
  return eval_xpath(parse_xpath(e), parse_xml(doc), context);
}

using Ids = std::vector<std::size_t>;

// Node sets of the compiled formula and of the direct evaluator agree on every
// document with at most max_nodes nodes.
bool agrees(const XPathExpr& e, std::size_t max_nodes, const std::vector<std::string>& labels) {
  Formula f = compile_xpath(e, document_root());
  bool ok = true;
  for_each_binary_tree(max_nodes, labels, true, [&](const WitnessTree& w) {
    if (!ok)
      return;
    std::vector<bool> direct(w.size(), false);
    for (auto n : eval_xpath(e, decode_witness(w), 0))
      direct[n] = true;
    ok = eval_formula(f, w) == direct;
  });
  return ok;
}

} // namespace

TEST_CASE("parsing and desugaring") {
  CHECK(U("/a/b") == "/child::a/child::b");
  CHECK(U("//b[c]") == "/descendant-or-self::node()/child::b[child::c]");
  CHECK(U("a | b") == "child::a | child::b");
  CHECK(U(".") == "self::node()");
  CHECK(U("..") == "parent::node()");
  CHECK(U("a//b") == "child::a/descendant-or-self::node()/child::b");
  CHECK(U("b[not(c) and (d or e)]") == "child::b[not(child::c) and (child::d or child::e)]");
  CHECK(U("ancestor-or-self::*/following::node()") == "ancestor-or-self::*/following::node()");
  CHECK(U("  child :: a  ") == "child::a");

  XPathExpr e = parse_xpath("/a/b");
  REQUIRE(e.kind == XPathExpr::Kind::Path);
  CHECK(e.absolute);
  REQUIRE(e.steps.size() == 2);
  CHECK(e.steps[1].axis == Axis::Child);
  CHECK(e.steps[1].test == NodeTest{NodeTest::Kind::Name, "b"});
  CHECK(xpath_size(e) == 3);
  CHECK(labels_of(parse_xpath("a[b]/c | d")) == std::vector<std::string>{"a", "b", "c", "d"});
}

TEST_CASE("property: unparse round-trips") {
  for (const auto& e : xpath_corpus(51, 300))
    CHECK(parse_xpath(unparse(e)) == e);
}

TEST_CASE("parse errors and unsupported features") {
  CHECK_THROWS_AS(parse_xpath("a/"), SyntaxError);
  CHECK_THROWS_AS(parse_xpath("a[b"), SyntaxError);
  CHECK_THROWS_AS(parse_xpath(""), SyntaxError);
  CHECK_THROWS_AS(parse_xpath("a[1]"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_xpath("@id"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_xpath("a[b = c]"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_xpath("count(a)"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_xpath("text()"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_xpath("attribute::a"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_xpath("$x"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_xpath("_other"), Error);
}

TEST_CASE("evaluator examples") {
  CHECK(eval("/a/b", "<a><b/><c/></a>") == Ids{1});
  CHECK(eval("//b", "<a><b><b/></b></a>") == Ids{1, 2});
  CHECK(eval("child::b[c]", "<a><b><c/></b><b/></a>") == Ids{1});
  CHECK(eval("/", "<a/>").empty());
  CHECK(eval("/*", "<a/>") == Ids{0});
  CHECK(eval("/b", "<a/>").empty());
  CHECK(eval("following::*", "<a><b><c/></b><d><e/></d></a>", 2) == Ids{3, 4});
  CHECK(eval("preceding::*", "<a><b><c/></b><d><e/></d></a>", 4) == Ids{1, 2});
  CHECK(eval("ancestor::*", "<a><b><c/></b></a>", 2) == Ids{0, 1});
  CHECK(eval("preceding-sibling::*", "<a><b/><c/><d/></a>", 3) == Ids{1, 2});
  CHECK(eval("..", "<a><b/></a>", 0).empty());
  CHECK(eval("b[not(c)] | d", "<a><b><c/></b><b/><d/></a>") == Ids{3, 4});
}

TEST_CASE("axis compilation examples") {
  Formula chi = prop("r");
  CHECK(compile_xpath(parse_xpath("self::*"), chi) == chi);
  CHECK(compile_xpath(parse_xpath("child::a"), chi) ==
        land(mu("Z", lor(modal(Program::Parent, chi), modal(Program::PrevSibling, var("Z")))), prop("a")));
  CHECK(compile_xpath(parse_xpath("descendant::a"), chi) ==
        land(mu("Z", lor(modal(Program::Parent, lor(chi, var("Z"))), modal(Program::PrevSibling, var("Z")))),
             prop("a")));
  CHECK(compile_xpath(parse_xpath("self::*[child::a]"), chi) ==
        land(chi, modal(Program::FirstChild, mu("Z", lor(prop("a"), modal(Program::NextSibling, var("Z")))))));
  // A name outside the alphabet selects nothing.
  CHECK(compile_xpath(parse_xpath("child::c"), chi, Alphabet({"a"})).is_false());
}

TEST_CASE("union compiles to the disjunction of its branches") {
  auto corpus = xpath_corpus(52, 40);
  Formula root = document_root();
  for (std::size_t i = 0; i + 1 < corpus.size(); i += 2) {
    XPathExpr u;
    u.kind = XPathExpr::Kind::Union;
    u.branches = {corpus[i], corpus[i + 1]};
    CHECK(compile_xpath(u, root) == disj(compile_xpath(corpus[i], root), compile_xpath(corpus[i + 1], root)));
  }
}

TEST_CASE("every axis agrees with the evaluator") {
  for (const char* axis : {"self", "child", "descendant", "descendant-or-self", "parent", "ancestor",
                           "ancestor-or-self", "following-sibling", "preceding-sibling", "following",
                           "preceding"}) {
    for (const char* start : {"", "/", "//b/"}) {
      for (const char* test : {"a", "*", "node()"}) {
        std::string e = std::string(start) + axis + "::" + test;
        INFO(e);
        CHECK(agrees(parse_xpath(e), 5, {"a", "b"}));
      }
    }
  }
}

TEST_CASE("compiled queries agree with the evaluator on a sample") {
  for (const auto& e : xpath_corpus(53, 40)) {
    INFO(unparse(e));
    CHECK(agrees(e, 5, {"a", "b"}));
  }
}

TEST_CASE("predicates that could see the document node are rejected") {
  CHECK_THROWS_AS(compile_xpath(parse_xpath("/self::node()[a]"), document_root()), UnsupportedFeatureError);
  CHECK_THROWS_AS(compile_xpath(parse_xpath("a[/b]"), document_root()), UnsupportedFeatureError);
}
