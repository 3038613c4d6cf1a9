#include "treelogic/analyzer.hpp"

#include "treelogic/errors.hpp"

#include <algorithm>

namespace treelogic {

std::string to_string(ProblemKind k) {
  switch (k) {
  case ProblemKind::Emptiness:
    return "emptiness";
  case ProblemKind::Containment:
    return "containment";
  case ProblemKind::Equivalence:
    return "equivalence";
  case ProblemKind::Overlap:
    return "overlap";
  case ProblemKind::Coverage:
    return "coverage";
  case ProblemKind::Typecheck:
    return "typecheck";
  }
  return "?";
}

Formula document_root() {
  return conj(neg_modal_true(Program::Parent),
              conj(neg_modal_true(Program::PrevSibling), neg_modal_true(Program::NextSibling)));
}

std::vector<std::size_t> document_ids(const WitnessTree& w) {
  std::vector<std::size_t> ids(w.size(), 0);
  std::vector<std::size_t> stack{w.root};
  std::size_t next = 0;
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    ids[n] = next++;
    if (w.nodes[n].next_sibling)
      stack.push_back(*w.nodes[n].next_sibling);
    if (w.nodes[n].first_child)
      stack.push_back(*w.nodes[n].first_child);
  }
  return ids;
}

namespace {

void check_arity(const Problem& p) {
  std::size_t n = p.queries.size();
  bool ok = true;
  switch (p.kind) {
  case ProblemKind::Emptiness:
  case ProblemKind::Typecheck:
    ok = n == 1;
    break;
  case ProblemKind::Containment:
  case ProblemKind::Equivalence:
  case ProblemKind::Overlap:
    ok = n == 2;
    break;
  case ProblemKind::Coverage:
    ok = n >= 2;
    break;
  }
  if (!ok)
    throw Error(to_string(p.kind) + " takes " +
                (p.kind == ProblemKind::Coverage ? std::string("at least 2")
                 : p.kind == ProblemKind::Emptiness || p.kind == ProblemKind::Typecheck
                     ? std::string("1")
                     : std::string("2")) +
                " queries, got " + std::to_string(n));
  if (p.kind == ProblemKind::Typecheck && !p.expected)
    throw Error("typecheck needs an expected annotation");
  if (p.kind != ProblemKind::Typecheck && p.expected)
    throw Error("only typecheck takes an expected annotation");
  if (p.expected && p.expected->labels.empty() == !p.expected->type)
    throw Error("the expected annotation is either a label set or a tree type");
}

Alphabet problem_alphabet(const Problem& p) {
  std::vector<std::string> labels;
  for (const auto& q : p.queries) {
    auto l = labels_of(q);
    labels.insert(labels.end(), l.begin(), l.end());
  }
  if (p.constraint) {
    auto l = p.constraint->labels();
    labels.insert(labels.end(), l.begin(), l.end());
  }
  if (p.expected) {
    labels.insert(labels.end(), p.expected->labels.begin(), p.expected->labels.end());
    if (p.expected->type) {
      auto l = p.expected->type->labels();
      labels.insert(labels.end(), l.begin(), l.end());
    }
  }
  for (const auto& l : labels)
    if (l == kOtherLabel)
      throw Error("label '" + l + "' is reserved");
  return Alphabet(std::move(labels));
}

Formula expected_formula(const Expectation& e) {
  if (e.type)
    return compile_type(binarize(*e.type), TypeMode::Subtree);
  std::vector<Formula> props;
  for (const auto& l : e.labels)
    props.push_back(prop(l));
  return disj(props);
}

} // namespace

std::vector<Reduction> reduce(const Problem& p) {
  check_arity(p);
  Alphabet alphabet = problem_alphabet(p);
  Formula root = document_root();
  Formula type = p.constraint ? compile_type(binarize(*p.constraint)) : top();
  // "The document root, reached upwards from here, satisfies the constraint."
  Formula rooted =
      mu("Z", disj(conj(root, type), disj(modal(Program::Parent, var("Z")),
                                          modal(Program::PrevSibling, var("Z")))));
  auto c = [&](const XPathExpr& e) { return compile_xpath(e, root, alphabet); };
  auto problem = [&](Formula f) { return Reduction{conj(f, rooted), alphabet}; };

  switch (p.kind) {
  case ProblemKind::Emptiness:
    return {problem(c(p.queries[0]))};
  case ProblemKind::Containment:
    return {problem(conj(c(p.queries[0]), lnot(c(p.queries[1]))))};
  case ProblemKind::Equivalence:
    return {problem(conj(c(p.queries[0]), lnot(c(p.queries[1])))),
            problem(conj(c(p.queries[1]), lnot(c(p.queries[0]))))};
  case ProblemKind::Overlap:
    return {problem(conj(c(p.queries[0]), c(p.queries[1])))};
  case ProblemKind::Coverage: {
    std::vector<Formula> covering;
    for (std::size_t i = 1; i < p.queries.size(); ++i)
      covering.push_back(c(p.queries[i]));
    return {problem(conj(c(p.queries[0]), lnot(disj(covering))))};
  }
  case ProblemKind::Typecheck:
    return {problem(conj(c(p.queries[0]), lnot(expected_formula(*p.expected))))};
  }
  throw InternalError("unknown problem kind");
}

namespace {

bool selects(const XPathExpr& e, const XmlDocument& doc, std::size_t node) {
  auto s = eval_xpath(e, doc, 0);
  return std::binary_search(s.begin(), s.end(), node);
}

// The witness must show what the satisfiable formula claims.
void verify(const Problem& p, std::size_t direction, const XmlDocument& doc, std::size_t node) {
  auto fail = [&](const std::string& why) {
    throw InternalError("counterexample " + doc.to_xml() + " at " + doc.path_of(node) +
                        " does not verify: " + why);
  };
  if (p.constraint && !validate(doc, *p.constraint))
    fail("document violates the constraint");
  const auto& q = p.queries;
  switch (p.kind) {
  case ProblemKind::Emptiness:
    if (!selects(q[0], doc, node))
      fail("node not selected");
    break;
  case ProblemKind::Containment:
  case ProblemKind::Equivalence: {
    const auto& a = direction == 0 ? q[0] : q[1];
    const auto& b = direction == 0 ? q[1] : q[0];
    if (!selects(a, doc, node) || selects(b, doc, node))
      fail("node not selected by exactly the first query");
    break;
  }
  case ProblemKind::Overlap:
    if (!selects(q[0], doc, node) || !selects(q[1], doc, node))
      fail("node not selected by both queries");
    break;
  case ProblemKind::Coverage:
    if (!selects(q[0], doc, node))
      fail("node not selected by the covered query");
    for (std::size_t i = 1; i < q.size(); ++i)
      if (selects(q[i], doc, node))
        fail("node selected by a covering query");
    break;
  case ProblemKind::Typecheck: {
    if (!selects(q[0], doc, node))
      fail("node not selected");
    const Expectation& e = *p.expected;
    bool ok = e.type ? validate_at(doc, node, *e.type)
                     : std::find(e.labels.begin(), e.labels.end(), doc.name(node)) != e.labels.end();
    if (ok)
      fail("node satisfies the annotation");
    break;
  }
  }
}

} // namespace

AnalysisResult analyze(const Problem& p, const SolverOptions& options) {
  auto reductions = reduce(p);
  AnalysisResult result;
  for (std::size_t i = 0; i < reductions.size(); ++i) {
    Verdict v = is_satisfiable(reductions[i].formula, reductions[i].alphabet, options);
    result.stats.push_back(v.stats);
    if (!v.satisfiable)
      continue;
    XmlDocument doc = decode_witness(*v.witness);
    std::size_t node = document_ids(*v.witness).at(*v.satisfying_node);
    verify(p, i, doc, node);
    std::string path = doc.path_of(node);
    result.counterexample = Counterexample{std::move(doc), node, std::move(path)};
    break;
  }
  bool sat = result.counterexample.has_value();
  result.holds = p.kind == ProblemKind::Overlap ? sat : !sat;
  return result;
}

namespace {

Problem make(ProblemKind k, std::vector<XPathExpr> qs, const std::optional<TreeTypeDefs>& c) {
  Problem p;
  p.kind = k;
  p.queries = std::move(qs);
  p.constraint = c;
  return p;
}

} // namespace

AnalysisResult emptiness(const XPathExpr& e, const std::optional<TreeTypeDefs>& constraint,
                         const SolverOptions& options) {
  return analyze(make(ProblemKind::Emptiness, {e}, constraint), options);
}

AnalysisResult containment(const XPathExpr& e1, const XPathExpr& e2,
                           const std::optional<TreeTypeDefs>& constraint, const SolverOptions& options) {
  return analyze(make(ProblemKind::Containment, {e1, e2}, constraint), options);
}

AnalysisResult equivalence(const XPathExpr& e1, const XPathExpr& e2,
                           const std::optional<TreeTypeDefs>& constraint, const SolverOptions& options) {
  return analyze(make(ProblemKind::Equivalence, {e1, e2}, constraint), options);
}

AnalysisResult overlap(const XPathExpr& e1, const XPathExpr& e2,
                       const std::optional<TreeTypeDefs>& constraint, const SolverOptions& options) {
  return analyze(make(ProblemKind::Overlap, {e1, e2}, constraint), options);
}

AnalysisResult coverage(const XPathExpr& e, const std::vector<XPathExpr>& covering,
                        const std::optional<TreeTypeDefs>& constraint, const SolverOptions& options) {
  std::vector<XPathExpr> qs{e};
  qs.insert(qs.end(), covering.begin(), covering.end());
  return analyze(make(ProblemKind::Coverage, std::move(qs), constraint), options);
}

AnalysisResult typecheck(const XPathExpr& e, const std::optional<TreeTypeDefs>& input,
                         const Expectation& expected, const SolverOptions& options) {
  Problem p = make(ProblemKind::Typecheck, {e}, input);
  p.expected = expected;
  return analyze(p, options);
}

} // namespace treelogic
