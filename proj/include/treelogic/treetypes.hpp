#pragma once

// Regular tree types: unranked definitions (from DTDs or a small text
// format), their first-child/next-sibling binarization and compilation into
// the logic, plus a direct validator used as the testing oracle.

#include "treelogic/formula.hpp"
#include "treelogic/xml.hpp"

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace treelogic {

// Regular expression over nonterminal names. Values are kept canonical by the
// constructors below (flattened, sorted and deduplicated alternatives, no
// empty-set operands), so equal languages built the same way compare equal and
// derivatives stay finite.
struct Regex {
  enum class Kind { Empty, Epsilon, Atom, Seq, Alt, Star };
  Kind kind = Kind::Empty;
  std::string atom;
  std::vector<Regex> items;

  friend bool operator==(const Regex&, const Regex&) = default;
  friend std::strong_ordering operator<=>(const Regex& a, const Regex& b);

  static Regex empty();
  static Regex epsilon();
  static Regex symbol(std::string name);
  static Regex seq(Regex a, Regex b);
  static Regex alt(Regex a, Regex b);
  static Regex star(Regex r);
  static Regex opt(Regex r);
  static Regex plus(Regex r);

  bool nullable() const;
  Regex derivative(std::string_view name) const;
  // Atoms that can start a word.
  std::set<std::string> first() const;
  // Some non-empty word matches.
  bool has_nonempty() const;
  std::size_t size() const;
  void atoms(std::set<std::string>& out) const;
};

std::string to_string(const Regex& r);

struct TypeDef {
  std::string label;
  Regex content;

  friend bool operator==(const TypeDef&, const TypeDef&) = default;
};

struct TreeTypeDefs {
  std::map<std::string, TypeDef> defs;
  std::string start;

  // Throws DefinitionError if the start or a referenced nonterminal is undefined.
  void check() const;
  std::size_t size() const;
  std::vector<std::string> labels() const;

  friend bool operator==(const TreeTypeDefs&, const TreeTypeDefs&) = default;
};

// DTD subset: <!ELEMENT name content> with EMPTY, ANY, (#PCDATA), mixed
// content, `,` `|` `*` `+` `?`; an optional <!DOCTYPE root [ ... ]> wrapper,
// comments and <!ATTLIST> declarations (ignored). Text content is ignored, so
// (#PCDATA) is read as EMPTY. One nonterminal per element, named after it.
// ANY is (any declared element)*. Without `root`, the DOCTYPE name is used,
// else the first declared element.
TreeTypeDefs parse_dtd(std::string_view text, std::optional<std::string> root = std::nullopt);

// Text format, one definition per line:
//   start A            (optional; defaults to the first definition)
//   A -> a(B*, (C | D)?)
//   B -> b()
// `()` is the empty content; `#none` the empty language; `#` starts a comment line.
TreeTypeDefs parse_type_defs(std::string_view text);
std::string to_text(const TreeTypeDefs& t);
// DTD text for definitions whose nonterminals are named after their labels
// and whose contents are not the empty language. Throws DefinitionError otherwise.
std::string to_dtd(const TreeTypeDefs& t);

// Unranked membership, by direct matching of children sequences.
bool validate(const XmlDocument& doc, const TreeTypeDefs& t);
// Membership of the subtree rooted at `node`.
bool validate_at(const XmlDocument& doc, std::size_t node, const TreeTypeDefs& t);

// Binary grammar: each alternative is label(first, next) where first/next are
// nonterminal indices or empty (no child / no sibling).
struct BinaryAlternative {
  std::string label;
  std::optional<std::size_t> first;
  std::optional<std::size_t> next;

  friend bool operator==(const BinaryAlternative&, const BinaryAlternative&) = default;
};

struct BinaryTypeDefs {
  std::vector<std::string> names;
  std::vector<std::vector<BinaryAlternative>> rules;
  std::size_t start = 0;

  std::size_t size() const; // total alternatives
};

// Productive, reachable nonterminals only. Nonterminal 0 is the start; the
// others are keyed by the content residual they still have to match.
BinaryTypeDefs binarize(const TreeTypeDefs& t);

// Membership of a binary tree (rooted at w.root) in the binary grammar.
bool accepts(const BinaryTypeDefs& bt, const WitnessTree& w);

enum class TypeMode {
  Document, // the root has no next sibling
  Subtree,  // the root's next sibling is unconstrained
};

// Formula true exactly at nodes whose binary subtree is in the language.
Formula compile_type(const BinaryTypeDefs& bt, TypeMode mode = TypeMode::Document);

} // namespace treelogic
