#include "oracles.hpp"

#include "treelogic/corpus.hpp"
#include "treelogic/errors.hpp"
#include "treelogic/xml.hpp"

#include <doctest.h>

using namespace treelogic;

TEST_CASE("xml parsing and positional paths") {
  XmlDocument d = parse_xml("<?xml version=\"1.0\"?>\n<!-- c -->\n<a>\n  <b/>\n  <c><b/></c>\n  <b></b>\n</a>\n");
  CHECK(d.to_xml() == "<a><b/><c><b/></c><b/></a>");
  CHECK(d.size() == 5);
  CHECK(d.name(2) == "c");
  CHECK(d.parent(3) == 2);
  CHECK_FALSE(d.parent(0));
  CHECK(d.path_of(4) == "/a[1]/b[2]");
  CHECK(d.path_of(3) == "/a[1]/c[1]/b[1]");
  CHECK_THROWS_AS(parse_xml("<a><b></a>"), SyntaxError);
  CHECK_THROWS_AS(parse_xml("<a/><b/>"), SyntaxError);
  CHECK_THROWS_AS(parse_xml("<a x='1'/>"), UnsupportedFeatureError);
  CHECK_THROWS_AS(parse_xml("<a>text</a>"), UnsupportedFeatureError);
}

TEST_CASE("encoding keeps node ids") {
  XmlDocument d = parse_xml("<a><b><c/></b><d/></a>");
  WitnessTree w = encode_document(d);
  CHECK(w.well_formed());
  CHECK(decode_witness(w) == d);
  CHECK(w.nodes[1].first_child == 2);
  CHECK(w.nodes[1].next_sibling == 3);
}

TEST_CASE("hedges") {
  WitnessTree w;
  w.nodes = {{"a", std::nullopt, 1}, {"b", 2, std::nullopt}, {"c", std::nullopt, std::nullopt}};
  DecodedHedge h = decode_hedge(w, 2);
  REQUIRE(h.trees.size() == 2);
  CHECK(h.trees[1].to_xml() == "<b><c/></b>");
  CHECK(h.tree == 1);
  CHECK(h.node == 1);
  CHECK_THROWS_AS(decode_witness(w), Error);
}

TEST_CASE("ill-formed witnesses") {
  WitnessTree loop;
  loop.nodes = {{"a", 0, std::nullopt}};
  CHECK_FALSE(loop.well_formed());
  CHECK_THROWS_AS(decode_witness(loop), InternalError);
}

TEST_CASE("corpora are reproducible") {
  CHECK(formula_corpus(5, 50) == formula_corpus(5, 50));
  CHECK(xpath_corpus(5, 50) == xpath_corpus(5, 50));
  CHECK(dtd_corpus(5, 20) == dtd_corpus(5, 20));
  CHECK_FALSE(xpath_corpus(5, 50) == xpath_corpus(6, 50));
  for (Formula f : formula_corpus(5, 100)) {
    CHECK(f.closed());
    CHECK(is_cycle_free(nnf(f)));
  }
}

TEST_CASE("tree enumeration counts") {
  // Binary trees with n nodes: Catalan(n); documents: Catalan(n - 1).
  const std::size_t catalan[] = {1, 1, 2, 5, 14, 42, 132};
  std::size_t trees = 0, documents = 0, expected_trees = 0, expected_documents = 0;
  for_each_binary_tree(5, {"a", "b"}, false, [&](const WitnessTree& w) {
    CHECK(w.well_formed());
    ++trees;
  });
  for_each_binary_tree(5, {"a", "b"}, true, [&](const WitnessTree& w) {
    CHECK_FALSE(w.nodes[w.root].next_sibling);
    ++documents;
  });
  for (std::size_t n = 1; n <= 5; ++n) {
    expected_trees += catalan[n] << n;
    expected_documents += catalan[n - 1] << n;
  }
  CHECK(trees == expected_trees);
  CHECK(documents == expected_documents);
}

TEST_CASE("sampled documents are valid") {
  Rng rng(9);
  for (const auto& t : dtd_corpus(9, 20))
    for (int i = 0; i < 20; ++i)
      if (auto d = sample_document(rng, t, 30)) {
        CHECK(validate(*d, t));
        CHECK(d->size() <= 30);
      }
}
