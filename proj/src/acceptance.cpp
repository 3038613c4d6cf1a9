#include "treelogic/acceptance.hpp"

#include "treelogic/bench.hpp"
#include "treelogic/corpus.hpp"
#include "treelogic/errors.hpp"
#include "treelogic/logic.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

namespace treelogic::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::size_t> selected(const XPathExpr& e, const XmlDocument& doc) { return eval_xpath(e, doc, 0); }

bool has(const std::vector<std::size_t>& s, std::size_t n) { return std::binary_search(s.begin(), s.end(), n); }

bool meets(const Expectation& e, const XmlDocument& doc, std::size_t n) {
  if (e.type)
    return validate_at(doc, n, *e.type);
  return std::find(e.labels.begin(), e.labels.end(), doc.name(n)) != e.labels.end();
}

// Whether the property holds at node n of a document in the constraint.
bool holds_at_node(const Problem& p, const XmlDocument& doc, std::size_t n) {
  const auto& q = p.queries;
  switch (p.kind) {
  case ProblemKind::Emptiness:
    return !has(selected(q[0], doc), n);
  case ProblemKind::Containment:
    return !has(selected(q[0], doc), n) || has(selected(q[1], doc), n);
  case ProblemKind::Equivalence:
    return has(selected(q[0], doc), n) == has(selected(q[1], doc), n);
  case ProblemKind::Overlap:
    return !(has(selected(q[0], doc), n) && has(selected(q[1], doc), n));
  case ProblemKind::Coverage: {
    if (!has(selected(q[0], doc), n))
      return true;
    for (std::size_t i = 1; i < q.size(); ++i)
      if (has(selected(q[i], doc), n))
        return true;
    return false;
  }
  case ProblemKind::Typecheck:
    return !has(selected(q[0], doc), n) || meets(*p.expected, doc, n);
  }
  return false;
}

// For overlap, "holds" is existential; the universal claim is disjointness.
bool universal_claim(const Problem& p, bool holds) { return p.kind == ProblemKind::Overlap ? !holds : holds; }

std::vector<std::string> problem_labels(const Problem& p) {
  std::set<std::string> out;
  for (const auto& q : p.queries)
    for (auto& l : labels_of(q))
      out.insert(l);
  if (p.constraint)
    for (auto& l : p.constraint->labels())
      out.insert(l);
  if (p.expected) {
    out.insert(p.expected->labels.begin(), p.expected->labels.end());
    if (p.expected->type)
      for (auto& l : p.expected->type->labels())
        out.insert(l);
  }
  return {out.begin(), out.end()};
}

std::string xml_of(const WitnessTree& w) { return decode_witness(w).to_xml(); }

} // namespace

bool holds_on(const Problem& p, const XmlDocument& doc) {
  if (p.constraint && !validate(doc, *p.constraint))
    return p.kind != ProblemKind::Overlap;
  for (std::size_t n = 0; n < doc.size(); ++n)
    if (!holds_at_node(p, doc, n))
      return p.kind == ProblemKind::Overlap;
  return p.kind != ProblemKind::Overlap;
}

bool genuine(const Problem& p, const Counterexample& c) {
  if (c.node >= c.document.size() || c.document.path_of(c.node) != c.path)
    return false;
  if (p.constraint && !validate(c.document, *p.constraint))
    return false;
  return !holds_at_node(p, c.document, c.node);
}

std::vector<CriterionResult> check_formulas() {
  auto t0 = Clock::now();
  auto corpus = formula_corpus(kFormulaSeed, kFormulaCount);
  std::size_t sat = 0, unsound = 0, incomplete = 0;
  std::string first_unsound, first_incomplete;
  for (Formula f : corpus) {
    Verdict v = is_satisfiable(f);
    if (v.satisfiable) {
      ++sat;
      if (!v.witness || !v.witness->well_formed() || !holds_at(f, *v.witness, *v.satisfying_node)) {
        if (unsound++ == 0)
          first_unsound = to_string(f);
      }
      continue;
    }
    // Labels outside f behave alike, so one extra label stands for all of them.
    std::vector<std::string> labels = labels_of(f);
    labels.emplace_back(kOtherLabel);
    bool model = false;
    for_each_binary_tree(kEnumerationNodes, labels, false, [&](const WitnessTree& w) {
      if (model)
        return;
      auto r = eval_formula(f, w);
      model = std::find(r.begin(), r.end(), true) != r.end();
      if (model && incomplete++ == 0)
        first_incomplete = to_string(f) + " on " + xml_of(w);
    });
  }
  double secs = seconds_since(t0);
  std::ostringstream d1, d2;
  d1 << corpus.size() << " formulas, " << sat << " satisfiable, " << unsound << " witness failures";
  if (unsound)
    d1 << " (first: " << first_unsound << ")";
  d1 << ", " << secs << " s (budget " << kFormulaBudgetSeconds << " s)";
  d2 << corpus.size() - sat << " unsatisfiable verdicts enumerated to " << kEnumerationNodes << " nodes, "
     << incomplete << " models found";
  if (incomplete)
    d2 << " (first: " << first_incomplete << ")";
  return {{1, "witness soundness", unsound == 0 && secs < kFormulaBudgetSeconds, d1.str(), secs},
          {2, "bounded completeness", incomplete == 0, d2.str(), secs}};
}

CriterionResult check_xpath() {
  auto t0 = Clock::now();
  auto corpus = xpath_corpus(kXPathSeed, kXPathCount);
  std::vector<Formula> compiled;
  for (const auto& e : corpus)
    compiled.push_back(compile_xpath(e, document_root()));
  std::vector<bool> bad(corpus.size(), false);
  std::string first;
  std::size_t trees = 0;
  for_each_binary_tree(kEnumerationNodes, {"a", "b"}, true, [&](const WitnessTree& w) {
    ++trees;
    XmlDocument doc = decode_witness(w);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (bad[i])
        continue;
      auto via_logic = eval_formula(compiled[i], w);
      std::vector<bool> direct(w.size(), false);
      for (auto n : eval_xpath(corpus[i], doc, 0))
        direct[n] = true;
      if (via_logic != direct) {
        bad[i] = true;
        if (first.empty())
          first = unparse(corpus[i]) + " on " + doc.to_xml();
      }
    }
  });
  std::size_t mismatches = std::count(bad.begin(), bad.end(), true);
  std::ostringstream d;
  d << corpus.size() << " expressions x " << trees << " documents, " << mismatches << " mismatches";
  if (mismatches)
    d << " (first: " << first << ")";
  return {3, "xpath differential semantics", mismatches == 0, d.str(), seconds_since(t0)};
}

CriterionResult check_types() {
  auto t0 = Clock::now();
  auto corpus = dtd_corpus(kTypeSeed, kTypeCount);
  // Types over the same labels share one enumeration.
  std::map<std::vector<std::string>, std::vector<std::size_t>> groups;
  std::vector<Formula> compiled;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    groups[corpus[i].labels()].push_back(i);
    compiled.push_back(compile_type(binarize(corpus[i])));
  }
  std::vector<bool> bad(corpus.size(), false);
  std::size_t checks = 0, valid = 0;
  std::string first;
  for (const auto& [labels, members] : groups) {
    for_each_binary_tree(kEnumerationNodes, labels, true, [&](const WitnessTree& w) {
      XmlDocument doc = decode_witness(w);
      for (std::size_t i : members) {
        if (bad[i])
          continue;
        ++checks;
        bool v = validate(doc, corpus[i]);
        valid += v;
        if (v != holds_at(compiled[i], w, w.root)) {
          bad[i] = true;
          if (first.empty())
            first = to_dtd(corpus[i]) + " on " + doc.to_xml();
        }
      }
    });
  }
  std::size_t mismatches = std::count(bad.begin(), bad.end(), true);
  std::ostringstream d;
  d << corpus.size() << " DTDs, " << checks << " document checks (" << valid << " valid), " << mismatches
    << " mismatches";
  if (mismatches)
    d << " (first: " << first << ")";
  return {4, "type round trip", mismatches == 0, d.str(), seconds_since(t0)};
}

std::vector<Problem> probe_suite() {
  std::vector<Problem> out;
  for (auto& b : bench_suite())
    out.push_back(b.problem);

  auto X = [](const char* s) { return parse_xpath(s); };
  auto make = [](ProblemKind k, std::vector<XPathExpr> qs, std::optional<TreeTypeDefs> c = std::nullopt) {
    Problem p;
    p.kind = k;
    p.queries = std::move(qs);
    p.constraint = std::move(c);
    return p;
  };
  auto abc = parse_dtd("<!ELEMENT a (b|c)*><!ELEMENT b EMPTY><!ELEMENT c EMPTY>", "a");
  auto bc = parse_dtd("<!ELEMENT a (b*)><!ELEMENT b (c*)><!ELEMENT c EMPTY>", "a");
  auto b_in_a = parse_dtd("<!ELEMENT r (a|c)*><!ELEMENT a (b|a)*><!ELEMENT b EMPTY><!ELEMENT c (c*)>", "r");
  out.push_back(make(ProblemKind::Containment, {X("child::*"), X("descendant::*")}));
  out.push_back(make(ProblemKind::Containment, {X("//b"), X("/b")}));
  out.push_back(make(ProblemKind::Containment, {X("/a/b"), X("/a/*")}));
  out.push_back(make(ProblemKind::Containment, {X("//b"), X("//a//b")}));
  out.push_back(make(ProblemKind::Containment, {X("//b"), X("//a//b")}, b_in_a));
  out.push_back(make(ProblemKind::Coverage, {X("/a/*"), X("/a/b"), X("/a/c")}, abc));
  out.push_back(make(ProblemKind::Coverage, {X("/a/*"), X("/a/b"), X("/a/c")}));
  out.push_back(make(ProblemKind::Coverage, {X("//*"), X("/*"), X("//*/*")}));
  Problem tc = make(ProblemKind::Typecheck, {X("/a/*")}, abc);
  tc.expected = Expectation{{"b"}, std::nullopt};
  out.push_back(tc);
  tc = make(ProblemKind::Typecheck, {X("//b")}, bc);
  tc.expected = Expectation{{}, parse_type_defs("B -> b(C*)\nC -> c()")};
  out.push_back(tc);
  tc.expected = Expectation{{}, parse_type_defs("B -> b(C?)\nC -> c()")};
  out.push_back(tc);

  // Random problems over small alphabets; every other one is constrained.
  auto queries = xpath_corpus(kProbeSeed, 120);
  std::vector<TreeTypeDefs> types;
  for (auto& t : dtd_corpus(kProbeSeed, 40))
    if (!compile_type(binarize(t)).is_false() && types.size() < 20)
      types.push_back(std::move(t));
  for (std::size_t i = 0; i < 40; ++i) {
    std::optional<TreeTypeDefs> c;
    if (i % 2 == 1)
      c = types[i / 2];
    const XPathExpr& e1 = queries[3 * i];
    const XPathExpr& e2 = queries[3 * i + 1];
    const XPathExpr& e3 = queries[3 * i + 2];
    switch (i % 4) {
    case 0:
    case 1:
      out.push_back(make(ProblemKind::Containment, {e1, e2}, c));
      break;
    case 2:
      out.push_back(make(ProblemKind::Coverage, {e1, e2, e3}, c));
      break;
    default: {
      Problem p = make(ProblemKind::Typecheck, {e1}, c);
      p.expected = Expectation{{i % 8 == 3 ? "a" : "b"}, std::nullopt};
      out.push_back(p);
    }
    }
  }
  return out;
}

CriterionResult check_counterexamples() {
  auto t0 = Clock::now();
  Rng rng(kProbeSeed);
  std::size_t fails = 0, holds = 0, bogus = 0, refuted = 0, probes = 0, starved = 0;
  std::string first;
  auto suite = probe_suite();
  for (const auto& p : suite) {
    AnalysisResult r = analyze(p);
    if (r.counterexample && !genuine(p, *r.counterexample)) {
      if (bogus++ == 0)
        first = "bogus counterexample " + r.counterexample->document.to_xml();
    }
    if (!universal_claim(p, r.holds)) {
      ++fails;
      if (!r.counterexample && bogus++ == 0)
        first = "missing counterexample";
      continue;
    }
    ++holds;
    std::vector<std::string> labels = problem_labels(p);
    labels.push_back("z");
    for (std::size_t k = 0; k < kProbesPerVerdict; ++k) {
      std::optional<XmlDocument> doc;
      if (p.constraint) {
        for (int attempt = 0; attempt < 100 && !doc; ++attempt)
          doc = sample_document(rng, *p.constraint, kProbeMaxValidNodes);
        if (!doc) {
          ++starved;
          break;
        }
      } else {
        doc = random_document(rng, kProbeMaxNodes, labels);
      }
      ++probes;
      if (holds_on(p, *doc) != (p.kind != ProblemKind::Overlap)) {
        if (refuted++ == 0)
          first = "verdict refuted by " + doc->to_xml();
        break;
      }
    }
  }
  std::ostringstream d;
  d << suite.size() << " problems: " << fails << " counterexamples (" << bogus << " invalid), " << holds
    << " universal verdicts probed with " << probes << " documents (" << refuted << " refuted, " << starved
    << " without enough valid documents)";
  if (!first.empty())
    d << "; first: " << first;
  return {5, "counterexample validity", bogus == 0 && refuted == 0 && starved == 0, d.str(), seconds_since(t0)};
}

CriterionResult check_linearity() {
  auto t0 = Clock::now();
  Formula root = document_root();
  std::size_t worst_x_num = 0, worst_x_den = 1, worst_t_num = 0, worst_t_den = 1;
  for (const auto& e : xpath_corpus(kXPathSeed, kXPathCount)) {
    std::size_t num = size(compile_xpath(e, root)), den = xpath_size(e) + size(root);
    if (num * worst_x_den > worst_x_num * den)
      worst_x_num = num, worst_x_den = den;
  }
  for (const auto& t : dtd_corpus(kTypeSeed, kTypeCount)) {
    std::size_t num = size(compile_type(binarize(t))), den = t.size();
    if (num * worst_t_den > worst_t_num * den)
      worst_t_num = num, worst_t_den = den;
  }
  bool ok = worst_x_num * kXPathRatioDen <= kXPathRatioNum * worst_x_den &&
            worst_t_num * kTypeRatioDen <= kTypeRatioNum * worst_t_den;
  std::ostringstream d;
  d << "xpath worst " << worst_x_num << "/" << worst_x_den << " (bound " << kXPathRatioNum << "/"
    << kXPathRatioDen << "), types worst " << worst_t_num << "/" << worst_t_den << " (bound " << kTypeRatioNum
    << "/" << kTypeRatioDen << ")";
  return {6, "linear translation", ok, d.str(), seconds_since(t0)};
}

CriterionResult check_performance(const std::function<void(const std::string&, double, bool)>& each) {
  auto t0 = Clock::now();
  std::size_t slow = 0, wrong = 0;
  double worst = 0;
  auto suite = bench_suite();
  for (const auto& b : suite) {
    auto s0 = Clock::now();
    AnalysisResult r = analyze(b.problem);
    double secs = seconds_since(s0);
    worst = std::max(worst, secs);
    slow += secs >= kBenchProblemSeconds;
    wrong += r.holds != b.expected_holds;
    if (each)
      each(b.name, secs, r.holds);
  }
  double total = seconds_since(t0);
  std::ostringstream d;
  d << suite.size() << " problems over a " << article_dtd().defs.size() << "-element DTD, total " << total
    << " s, slowest " << worst << " s (limit " << kBenchProblemSeconds << " s each), " << wrong
    << " unexpected verdicts";
  return {7, "performance", slow == 0 && wrong == 0, d.str(), total};
}

CriterionResult check_known_answers() {
  auto t0 = Clock::now();
  auto X = [](const char* s) { return parse_xpath(s); };
  auto b_in_a = parse_dtd("<!ELEMENT r (a|c)*><!ELEMENT a (b|a)*><!ELEMENT b EMPTY><!ELEMENT c (c*)>", "r");
  struct Row {
    const char* name;
    AnalysisResult result;
    bool expected;
  };
  std::vector<Row> rows = {
      {"child::* <= descendant::*", containment(X("child::*"), X("descendant::*")), true},
      {"//b <= /b", containment(X("//b"), X("/b")), false},
      {"/a/b <= /a/*", containment(X("/a/b"), X("/a/*")), true},
      {"//b <= //a//b", containment(X("//b"), X("//a//b")), false},
      {"//b <= //a//b under b-inside-a", containment(X("//b"), X("//a//b"), b_in_a), true},
  };
  bool ok = true;
  std::ostringstream d;
  for (const auto& r : rows) {
    ok = ok && r.result.holds == r.expected;
    d << (&r == &rows.front() ? "" : "; ") << r.name << ": " << (r.result.holds ? "holds" : "fails");
  }
  return {8, "known answers", ok, d.str(), seconds_since(t0)};
}

std::vector<CriterionResult> run_all(const Reporter& report) {
  std::vector<CriterionResult> out;
  auto add = [&](CriterionResult r) {
    if (report)
      report(r);
    out.push_back(std::move(r));
  };
  for (auto& r : check_formulas())
    add(std::move(r));
  add(check_xpath());
  add(check_types());
  add(check_counterexamples());
  add(check_linearity());
  add(check_performance());
  add(check_known_answers());
  return out;
}

} // namespace treelogic::acceptance
