#include "treelogic/bench.hpp"

namespace treelogic {

namespace {

constexpr std::string_view kArticleDtd = R"dtd(<!DOCTYPE article [
<!-- A small document-oriented schema: front matter, nested sections, back matter. -->
<!ELEMENT article (front, body, back?)>
<!ELEMENT front (title, author+, abstract?)>
<!ELEMENT title (#PCDATA | emph)*>
<!ELEMENT author (name, affil?)>
<!ELEMENT name (#PCDATA)>
<!ELEMENT affil (#PCDATA)>
<!ELEMENT abstract (para+)>
<!ELEMENT body (section+)>
<!ELEMENT section (title, (para | list | figure | table)*, section*)>
<!ELEMENT para (#PCDATA | emph | cite | xref)*>
<!ELEMENT emph (#PCDATA)>
<!ELEMENT cite EMPTY>
<!ELEMENT xref EMPTY>
<!ELEMENT list (item+)>
<!ELEMENT item (para+)>
<!ELEMENT figure (graphic, caption?)>
<!ELEMENT graphic EMPTY>
<!ELEMENT caption (#PCDATA | emph)*>
<!ELEMENT table (caption?, cell+)>
<!ELEMENT cell (#PCDATA | emph)*>
<!ELEMENT back (bibentry+)>
<!ELEMENT bibentry (author+, title)>
<!ATTLIST xref target CDATA #REQUIRED>
]>
)dtd";

BenchProblem contains(std::string q1, std::string q2, bool holds) {
  Problem p;
  p.kind = ProblemKind::Containment;
  p.queries = {parse_xpath(q1), parse_xpath(q2)};
  p.constraint = article_dtd();
  return {q1 + " <= " + q2, std::move(p), holds};
}

BenchProblem typechecks(std::string q, Expectation expected, std::string what, bool holds) {
  Problem p;
  p.kind = ProblemKind::Typecheck;
  p.queries = {parse_xpath(q)};
  p.constraint = article_dtd();
  p.expected = std::move(expected);
  return {q + " : " + what, std::move(p), holds};
}

Expectation labels(std::vector<std::string> l) { return Expectation{std::move(l), std::nullopt}; }
Expectation type(std::string_view text) { return Expectation{{}, parse_type_defs(text)}; }

} // namespace

std::string_view article_dtd_text() { return kArticleDtd; }

TreeTypeDefs article_dtd() { return parse_dtd(kArticleDtd); }

std::vector<BenchProblem> bench_suite() {
  std::vector<BenchProblem> s;
  s.push_back(contains("//section/title", "//title", true));
  s.push_back(contains("//title", "//section/title", false));
  s.push_back(contains("//para", "//section//para", false));
  s.push_back(contains("//item/para", "//list//para", true));
  s.push_back(contains("//cite", "//para/cite", true));
  s.push_back(contains("//emph", "//para/emph", false));
  s.push_back(contains("//section[figure]", "//section[.//graphic]", true));
  s.push_back(contains("//table/caption", "//figure/caption", false));
  s.push_back(contains("//section//section", "//section/section", true));
  s.push_back(contains("//author", "/article/front/author", false));
  s.push_back(contains("//xref/ancestor::section", "/article/body//section", true));
  s.push_back(contains("//para[emph and cite]", "//para[xref]", false));
  s.push_back(contains("//item/following-sibling::*", "//item", true));
  s.push_back(contains("//figure/preceding-sibling::*", "//section/*", true));
  s.push_back(typechecks("//section/*", labels({"title", "para", "list", "figure", "table", "section"}),
                         "section content", true));
  s.push_back(typechecks("/article/front/*", labels({"title", "author"}), "title or author", false));
  s.push_back(typechecks("//para/ancestor::*", labels({"article", "front", "abstract", "body", "section",
                                                        "list", "item"}),
                         "para ancestors", true));
  s.push_back(typechecks("//figure",
                         type("F -> figure(G, C?)\nG -> graphic()\nC -> caption(E*)\nE -> emph()"),
                         "figure type", true));
  s.push_back(typechecks("//list/item", type("I -> item(P+)\nP -> para(E*)\nE -> emph()"),
                         "plain item type", false));
  s.push_back(typechecks("//bibentry/author",
                         type("A -> author(N, F?)\nN -> name()\nF -> affil()"), "author type", true));
  return s;
}

} // namespace treelogic
