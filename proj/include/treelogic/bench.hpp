#pragma once

// Performance suite: containment and typecheck problems over a
// document-oriented article schema of 22 elements.

#include "treelogic/analyzer.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace treelogic {

// Same text as data/article.dtd.
std::string_view article_dtd_text();
TreeTypeDefs article_dtd();

struct BenchProblem {
  std::string name;
  Problem problem;
  bool expected_holds;
};

std::vector<BenchProblem> bench_suite();

} // namespace treelogic
