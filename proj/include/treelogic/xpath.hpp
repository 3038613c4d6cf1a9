#pragma once

// Navigational XPath: parser, unparser, compiler into the logic and a direct
// set-semantics evaluator.
//
// Grammar (abbreviated and full axis syntax):
//   expr  := path ('|' path)*
//   path  := '/' rel? | '//' rel | rel
//   rel   := step (('/' | '//') step)*
//   step  := axis '::' test pred* | test pred* | '.' | '..'
//   test  := name | '*' | 'node()'
//   pred  := '[' or ']'
//   or    := and ('or' and)*        and := unary ('and' unary)*
//   unary := 'not' '(' or ')' | '(' or ')' | expr      (relative paths only)
// `//` abbreviates /descendant-or-self::node()/.

#include "treelogic/formula.hpp"
#include "treelogic/logic.hpp"
#include "treelogic/xml.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace treelogic {

enum class Axis {
  Self,
  Child,
  Descendant,
  DescendantOrSelf,
  Parent,
  Ancestor,
  AncestorOrSelf,
  FollowingSibling,
  PrecedingSibling,
  Following,
  Preceding,
};

std::string to_string(Axis a);
Axis inverse(Axis a);

struct NodeTest {
  enum class Kind { Name, Any, Node };
  Kind kind = Kind::Any;
  std::string name;

  friend bool operator==(const NodeTest&, const NodeTest&) = default;
};

struct XPathExpr;

// Boolean combination of existence tests.
struct Predicate {
  enum class Kind { Exists, And, Or, Not };
  Kind kind = Kind::Exists;
  std::vector<XPathExpr> path;      // Exists: exactly one relative expression
  std::vector<Predicate> operands;  // And / Or: two, Not: one

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Step {
  Axis axis = Axis::Child;
  NodeTest test;
  std::vector<Predicate> predicates;

  friend bool operator==(const Step&, const Step&) = default;
};

struct XPathExpr {
  enum class Kind { Path, Union };
  Kind kind = Kind::Path;
  bool absolute = false;
  std::vector<Step> steps;          // Path
  std::vector<XPathExpr> branches;  // Union: two

  friend bool operator==(const XPathExpr&, const XPathExpr&) = default;
};

XPathExpr parse_xpath(std::string_view text);
// Full axis syntax; parse_xpath(unparse(e)) == e.
std::string unparse(const XPathExpr& e);
// Number of AST nodes (unions, paths, steps, predicate connectives).
std::size_t xpath_size(const XPathExpr& e);
std::vector<std::string> labels_of(const XPathExpr& e);

// Formula true exactly at the elements selected by e. Relative paths start
// from the nodes satisfying `context`; absolute paths start from the document
// node, whose only child is the element satisfying `context` (callers pass a
// root characterization). The context is inserted once. With an alphabet, a
// name outside it compiles to false.
Formula compile_xpath(const XPathExpr& e, Formula context,
                      const std::optional<Alphabet>& alphabet = std::nullopt);

// A(axis, chi): nodes reached through `axis` from some node satisfying chi.
Formula axis_formula(Axis axis, Formula chi);

// Elements selected by e, in document order. Relative paths start at `context`.
std::vector<std::size_t> eval_xpath(const XPathExpr& e, const XmlDocument& doc, std::size_t context = 0);

} // namespace treelogic
