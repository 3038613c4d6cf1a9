#pragma once

// Seeded random generators for the test corpora. Only the raw engine output
// of std::mt19937_64 is used (never std:: distributions), so a seed yields the
// same corpus on every platform.

#include "treelogic/formula.hpp"
#include "treelogic/treetypes.hpp"
#include "treelogic/xpath.hpp"
#include "treelogic/xml.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace treelogic {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, n).
  std::size_t below(std::size_t n) { return n == 0 ? 0 : static_cast<std::size_t>(engine_() % n); }
  bool chance(unsigned percent) { return below(100) < percent; }
  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

private:
  std::mt19937_64 engine_;
};

struct FormulaGenOptions {
  std::size_t max_depth = 5;
  std::vector<std::string> labels{"a", "b"};
};

// Closed, positive, cycle-free formula (not necessarily in negation normal form).
Formula random_formula(Rng& rng, const FormulaGenOptions& options = {});
std::vector<Formula> formula_corpus(std::uint64_t seed, std::size_t count);

struct XPathGenOptions {
  std::size_t max_depth = 3; // predicate nesting
  std::size_t max_steps = 3;
  std::vector<std::string> labels{"a", "b"};
};

// Expressions accepted by compile_xpath (no predicate can see the document node).
XPathExpr random_xpath(Rng& rng, const XPathGenOptions& options = {});
std::vector<XPathExpr> xpath_corpus(std::uint64_t seed, std::size_t count);

struct TypeGenOptions {
  std::vector<std::string> labels{"a", "b"};
  std::size_t max_depth = 3; // content expression nesting
  // Percentage of definitions with an extra nonterminal sharing a label,
  // which no DTD can express.
  unsigned shared_label_percent = 0;
};

TreeTypeDefs random_type_defs(Rng& rng, const TypeGenOptions& options = {});
// DTD-expressible definitions; each is returned after a to_dtd / parse_dtd round trip.
std::vector<TreeTypeDefs> dtd_corpus(std::uint64_t seed, std::size_t count);

// Valid document of at most max_nodes nodes, or nullopt when the walk runs out of budget.
std::optional<XmlDocument> sample_document(Rng& rng, const TreeTypeDefs& t, std::size_t max_nodes);

// Random element-only document with 1..max_nodes nodes.
XmlDocument random_document(Rng& rng, std::size_t max_nodes, const std::vector<std::string>& labels);

// Calls `visit` on every binary tree (first-child / next-sibling) with
// 1..max_nodes nodes over `labels`, in a fixed order. Node ids are pre-order.
// When `documents_only` the root has no next sibling. The tree passed to
// `visit` is reused between calls.
void for_each_binary_tree(std::size_t max_nodes, const std::vector<std::string>& labels,
                          bool documents_only, const std::function<void(const WitnessTree&)>& visit);

} // namespace treelogic
