#include "oracles.hpp"

#include "treelogic/errors.hpp"
#include "treelogic/treetypes.hpp"

#include <doctest.h>

using namespace treelogic;
using treelogic::testing::tree;

namespace {

Regex A(const char* s) { return Regex::symbol(s); }

bool valid(const char* doc, const TreeTypeDefs& t) { return validate(parse_xml(doc), t); }

} // namespace

TEST_CASE("regular expressions") {
  Regex r = Regex::seq(A("B"), Regex::star(Regex::alt(A("C"), A("D"))));
  CHECK_FALSE(r.nullable());
  CHECK(r.derivative("B").nullable());
  CHECK(r.derivative("C").kind == Regex::Kind::Empty);
  CHECK(r.first() == std::set<std::string>{"B"});
  CHECK(Regex::alt(A("B"), A("C")) == Regex::alt(A("C"), A("B")));
  CHECK(Regex::alt(A("B"), A("B")) == A("B"));
  CHECK(Regex::seq(Regex::empty(), A("B")) == Regex::empty());
  CHECK(Regex::seq(Regex::epsilon(), A("B")) == A("B"));
  CHECK(Regex::plus(A("B")) == Regex::seq(A("B"), Regex::star(A("B"))));
  CHECK(Regex::opt(A("B")).nullable());
  CHECK_FALSE(Regex::epsilon().has_nonempty());
  CHECK(to_string(r) == "B, (C | D)*");
}

TEST_CASE("DTD parsing examples") {
  TreeTypeDefs t = parse_dtd("<!ELEMENT a (b*)> <!ELEMENT b EMPTY>", "a");
  CHECK(t.start == "a");
  CHECK(t.defs.at("a").content == Regex::star(A("b")));
  CHECK(t.defs.at("b").content == Regex::epsilon());
  t = parse_dtd("<!ELEMENT a (b,c)><!ELEMENT b EMPTY><!ELEMENT c EMPTY>");
  CHECK(t.defs.at("a").content == Regex::seq(A("b"), A("c")));
  t = parse_dtd("<!ELEMENT a (b|c)+><!ELEMENT b EMPTY><!ELEMENT c EMPTY>");
  Regex bc = Regex::alt(A("b"), A("c"));
  CHECK(t.defs.at("a").content == Regex::seq(bc, Regex::star(bc)));

  t = parse_dtd("<!DOCTYPE d [ <!-- c --> <!ELEMENT a ANY> <!ELEMENT d (#PCDATA | a)*>"
                "<!ATTLIST a x CDATA #IMPLIED> ]>");
  CHECK(t.start == "d");
  CHECK(t.defs.at("d").content == Regex::star(A("a")));
  CHECK(t.defs.at("a").content == Regex::star(Regex::alt(A("a"), A("d"))));
  CHECK(parse_dtd("<!ELEMENT p (#PCDATA)>").defs.at("p").content == Regex::epsilon());
}

TEST_CASE("DTD errors") {
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a (b)>"), DefinitionError);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a EMPTY><!ELEMENT a EMPTY>"), DefinitionError);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a EMPTY>", "z"), DefinitionError);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT a (b"), SyntaxError);
  CHECK_THROWS_AS(parse_dtd("<!ENTITY x \"y\"><!ELEMENT a EMPTY>"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_dtd("<!ELEMENT _other EMPTY>"), Error);
}

TEST_CASE("text format round trip") {
  TreeTypeDefs t = parse_type_defs("# comment\nstart A\nA -> a(B*, (C | D)?)\nB -> b()\nC -> c(#none)\nD -> b(B)\n");
  CHECK(t.start == "A");
  CHECK(t.defs.at("D").label == "b");
  CHECK(t.defs.at("C").content == Regex::empty());
  CHECK(parse_type_defs(to_text(t)) == t);
  CHECK_THROWS_AS(parse_type_defs("A -> a(B)"), DefinitionError);
  CHECK_THROWS_AS(parse_type_defs("A -> a(B"), SyntaxError);
  for (const auto& d : dtd_corpus(61, 40)) {
    CHECK(parse_type_defs(to_text(d)) == d);
    CHECK(parse_dtd(to_dtd(d), d.start) == d);
  }
}

TEST_CASE("validation examples") {
  auto bstar = parse_type_defs("A -> a(B*)\nB -> b()");
  CHECK(valid("<a><b/><b/></a>", bstar));
  CHECK_FALSE(valid("<a><c/></a>", bstar));
  auto bc = parse_type_defs("A -> a(B, C)\nB -> b()\nC -> c()");
  CHECK(valid("<a><b/><c/></a>", bc));
  CHECK_FALSE(valid("<a><c/><b/></a>", bc));
  // Two nonterminals share a label: only the context tells them apart.
  auto shared = parse_type_defs("A -> a(X, Y)\nX -> b(C)\nY -> b()\nC -> c()");
  CHECK(valid("<a><b><c/></b><b/></a>", shared));
  CHECK_FALSE(valid("<a><b/><b><c/></b></a>", shared));
  auto doc = parse_xml("<a><b><c/></b><b/></a>");
  CHECK(validate_at(doc, 1, parse_type_defs("X -> b(C)\nC -> c()")));
  CHECK_FALSE(validate_at(doc, 3, parse_type_defs("X -> b(C)\nC -> c()")));
}

TEST_CASE("binarization examples") {
  BinaryTypeDefs leaf = binarize(parse_type_defs("A -> a()"));
  REQUIRE(leaf.rules.size() == 1);
  CHECK(leaf.rules[0] == std::vector<BinaryAlternative>{{"a", std::nullopt, std::nullopt}});

  BinaryTypeDefs bstar = binarize(parse_type_defs("A -> a(B*)\nB -> b()"));
  auto b_chain = tree({{"a", 1, std::nullopt}, {"b", std::nullopt, 2}, {"b", std::nullopt, std::nullopt}});
  CHECK(accepts(bstar, b_chain));
  CHECK(accepts(bstar, tree({{"a", std::nullopt, std::nullopt}})));
  CHECK_FALSE(accepts(bstar, tree({{"a", 1, std::nullopt}, {"c", std::nullopt, std::nullopt}})));

  BinaryTypeDefs seq = binarize(parse_type_defs("A -> a(B, C)\nB -> b()\nC -> c()"));
  CHECK(accepts(seq, tree({{"a", 1, std::nullopt}, {"b", std::nullopt, 2}, {"c", std::nullopt, std::nullopt}})));
  CHECK_FALSE(accepts(seq, tree({{"a", 1, std::nullopt}, {"b", std::nullopt, std::nullopt}})));

  CHECK(binarize(parse_type_defs("A -> a(B)\nB -> b(B)")).rules[0].empty());
}

TEST_CASE("compiled type examples") {
  CHECK(compile_type(binarize(parse_type_defs("A -> a()"))) ==
        conj(prop("a"), conj(neg_modal_true(Program::FirstChild), neg_modal_true(Program::NextSibling))));
  CHECK(compile_type(binarize(parse_type_defs("A -> a(B)\nB -> b(B)"))).is_false());
  Formula f = compile_type(binarize(parse_type_defs("A -> a(B*)\nB -> b()")));
  Formula expected = parse_formula(
      "a & (~<1>T | <1>(mu Z. b & ~<1>T & (~<2>T | <2>Z))) & ~<2>T");
  CHECK(testing::agree_on_small_trees(f, expected, 5, {"a", "b"}));
}

TEST_CASE("property: membership agrees across validate, accepts and the compiled formula") {
  auto corpus = dtd_corpus(62, 30);
  Rng rng(62);
  TypeGenOptions shared;
  shared.shared_label_percent = 100;
  for (int i = 0; i < 15; ++i)
    corpus.push_back(random_type_defs(rng, shared));
  for (const auto& t : corpus) {
    BinaryTypeDefs bt = binarize(t);
    Formula doc = compile_type(bt), sub = compile_type(bt, TypeMode::Subtree);
    bool ok = true;
    for_each_binary_tree(5, t.labels(), true, [&](const WitnessTree& w) {
      if (!ok)
        return;
      XmlDocument d = decode_witness(w);
      bool v = validate(d, t);
      ok = v == accepts(bt, w) && v == holds_at(doc, w, w.root);
      // Subtree mode ignores whatever follows the node.
      for (std::size_t n = 0; ok && n < d.size(); ++n)
        ok = validate_at(d, n, t) == holds_at(sub, w, n);
    });
    INFO(to_text(t));
    CHECK(ok);
  }
}

TEST_CASE("property: binarization preserves emptiness") {
  Rng rng(63);
  for (const auto& t : dtd_corpus(63, 60)) {
    bool empty = binarize(t).rules[0].empty();
    bool found = false;
    for (int i = 0; i < 200 && !found; ++i)
      found = sample_document(rng, t, 200).has_value();
    if (empty)
      CHECK_FALSE(found);
    else
      CHECK(found);
  }
}
