#pragma once

// Element-only XML documents and their first-child/next-sibling encoding.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace treelogic {

struct Element {
  std::string name;
  std::vector<Element> children;

  friend bool operator==(const Element&, const Element&) = default;
};

// Immutable document with a flattened view. Node ids are document-order
// (pre-order) positions; the root is node 0.
class XmlDocument {
public:
  explicit XmlDocument(Element root);

  const Element& root() const noexcept { return root_; }
  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t id) const { return names_.at(id); }
  std::optional<std::size_t> parent(std::size_t id) const;
  const std::vector<std::size_t>& children(std::size_t id) const { return children_.at(id); }
  // Position among the parent's children (0-based); 0 for the root.
  std::size_t sibling_index(std::size_t id) const { return sibling_index_.at(id); }

  // Positional path such as /a[1]/b[2].
  std::string path_of(std::size_t id) const;
  std::string to_xml() const;

  friend bool operator==(const XmlDocument& a, const XmlDocument& b) { return a.root_ == b.root_; }

private:
  Element root_;
  std::vector<std::string> names_;
  std::vector<std::optional<std::size_t>> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::vector<std::size_t> sibling_index_;
};

// Parses `<a><b/><c></c></a>`. Accepts an XML declaration, comments, a
// DOCTYPE line and whitespace between elements. Attributes and character data
// are rejected.
XmlDocument parse_xml(std::string_view text);

// Binary tree over labels: first child / next sibling links.
struct WitnessNode {
  std::string label;
  std::optional<std::size_t> first_child;
  std::optional<std::size_t> next_sibling;
};

struct WitnessTree {
  std::vector<WitnessNode> nodes;
  std::size_t root = 0;

  std::size_t size() const noexcept { return nodes.size(); }
  // Finite, every node reachable from the root exactly once.
  bool well_formed() const;
};

// Inverse of the first-child/next-sibling encoding. The distinguished label is
// rendered as the element name `_other`. Throws Error if the root has a sibling.
XmlDocument decode_witness(const WitnessTree& w);
// A witness whose root has next siblings is a sequence of documents.
struct DecodedHedge {
  std::vector<XmlDocument> trees;
  std::size_t tree = 0; // tree holding the marked node
  std::size_t node = 0; // marked node's id within that tree
};
DecodedHedge decode_hedge(const WitnessTree& w, std::size_t marked);

// Encoding that keeps node ids: node i of the document is node i of the tree.
WitnessTree encode_document(const XmlDocument& doc);

} // namespace treelogic
