#pragma once

// Static analysis problems over XPath queries and tree types, each reduced to
// one or two satisfiability checks. Counterexamples are re-checked against
// eval_xpath and validate before they are returned.

#include "treelogic/solver.hpp"
#include "treelogic/treetypes.hpp"
#include "treelogic/xml.hpp"
#include "treelogic/xpath.hpp"

#include <optional>
#include <string>
#include <vector>

namespace treelogic {

enum class ProblemKind { Emptiness, Containment, Equivalence, Overlap, Coverage, Typecheck };

std::string to_string(ProblemKind k);

// Annotation checked at every node a typechecked query selects.
struct Expectation {
  std::vector<std::string> labels;  // the node bears one of these labels, or
  std::optional<TreeTypeDefs> type; // the subtree rooted at the node is in this type
};

struct Problem {
  ProblemKind kind = ProblemKind::Emptiness;
  // Emptiness / typecheck: 1; containment / equivalence / overlap: 2;
  // coverage: the covered query followed by the covering ones.
  std::vector<XPathExpr> queries;
  std::optional<TreeTypeDefs> constraint;
  std::optional<Expectation> expected; // typecheck only
};

struct Counterexample {
  XmlDocument document;
  std::size_t node; // document-order id of the marked node
  std::string path; // positional path of the marked node
};

struct AnalysisResult {
  bool holds = false;
  // For overlap this is the common node when the queries overlap (holds);
  // for every other kind it is present when the property fails.
  std::optional<Counterexample> counterexample;
  std::vector<SolverStats> stats; // one per satisfiability call
};

// Throws Error for malformed problems and propagates solver errors
// (NotCycleFreeError, ResourceLimitError).
AnalysisResult analyze(const Problem& p, const SolverOptions& options = {});

AnalysisResult emptiness(const XPathExpr& e, const std::optional<TreeTypeDefs>& constraint = std::nullopt,
                         const SolverOptions& options = {});
AnalysisResult containment(const XPathExpr& e1, const XPathExpr& e2,
                           const std::optional<TreeTypeDefs>& constraint = std::nullopt,
                           const SolverOptions& options = {});
AnalysisResult equivalence(const XPathExpr& e1, const XPathExpr& e2,
                           const std::optional<TreeTypeDefs>& constraint = std::nullopt,
                           const SolverOptions& options = {});
AnalysisResult overlap(const XPathExpr& e1, const XPathExpr& e2,
                       const std::optional<TreeTypeDefs>& constraint = std::nullopt,
                       const SolverOptions& options = {});
AnalysisResult coverage(const XPathExpr& e, const std::vector<XPathExpr>& covering,
                        const std::optional<TreeTypeDefs>& constraint = std::nullopt,
                        const SolverOptions& options = {});
AnalysisResult typecheck(const XPathExpr& e, const std::optional<TreeTypeDefs>& input,
                         const Expectation& expected, const SolverOptions& options = {});

// The formula whose satisfiability refutes the property (for overlap:
// establishes it), with the alphabet the solver is run on.
struct Reduction {
  Formula formula;
  Alphabet alphabet;
};
std::vector<Reduction> reduce(const Problem& p);

// Root of a document: no parent, no previous and no next sibling.
Formula document_root();

// Document ids of the nodes of a witness tree, indexed by witness node.
std::vector<std::size_t> document_ids(const WitnessTree& w);

} // namespace treelogic
