#pragma once

// The end-to-end acceptance checks, shared by the test suite and the
// `bench` subcommand. Every check compares the decision procedure against an
// independent oracle (Kleene evaluation, eval_xpath, validate, enumeration or
// random probing). Corpora, sizes and tolerances are fixed here.

#include "treelogic/analyzer.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace treelogic::acceptance {

inline constexpr std::uint64_t kFormulaSeed = 7;
inline constexpr std::size_t kFormulaCount = 1000;
inline constexpr double kFormulaBudgetSeconds = 300;
inline constexpr std::size_t kEnumerationNodes = 6;

inline constexpr std::uint64_t kXPathSeed = 11;
inline constexpr std::size_t kXPathCount = 200;

inline constexpr std::uint64_t kTypeSeed = 5;
inline constexpr std::size_t kTypeCount = 50;

inline constexpr std::uint64_t kProbeSeed = 3;
inline constexpr std::size_t kProbesPerVerdict = 1000;
inline constexpr std::size_t kProbeMaxNodes = 10;      // unconstrained random documents
inline constexpr std::size_t kProbeMaxValidNodes = 40; // documents sampled from a constraint

// Largest compiled/source size ratios observed over the corpora. Compiled
// sizes count shared formula nodes once. XPath source size is the AST size
// plus the size of the root context formula.
inline constexpr std::size_t kXPathRatioNum = 19, kXPathRatioDen = 4;
inline constexpr std::size_t kTypeRatioNum = 13, kTypeRatioDen = 3;

inline constexpr double kBenchProblemSeconds = 10;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

using Reporter = std::function<void(const CriterionResult&)>;

// Criteria 1 and 2 share one corpus and one solver run per formula.
std::vector<CriterionResult> check_formulas();
CriterionResult check_xpath();
CriterionResult check_types();
CriterionResult check_counterexamples();
CriterionResult check_linearity();
CriterionResult check_performance(const std::function<void(const std::string&, double, bool)>& each = {});
CriterionResult check_known_answers();

// Runs all criteria in order, calling `report` after each.
std::vector<CriterionResult> run_all(const Reporter& report = {});

// Whether `p` holds on this one document (for overlap: whether the queries
// share a node here). Independent of the solver.
bool holds_on(const Problem& p, const XmlDocument& doc);

// A counterexample is genuine: the document meets the constraint and the
// marked node violates the property (for overlap: is selected by both).
bool genuine(const Problem& p, const Counterexample& c);

// Problems whose verdicts are probed: the performance suite plus containment,
// coverage and typecheck problems over small alphabets, with and without
// constraints.
std::vector<Problem> probe_suite();

} // namespace treelogic::acceptance
