#include "treelogic/xml.hpp"

#include "treelogic/errors.hpp"

#include <cctype>
#include <functional>

namespace treelogic {

XmlDocument::XmlDocument(Element root) : root_(std::move(root)) {
  // Iterative pre-order flattening; documents produced by the solver can be deep.
  struct Frame {
    const Element* e;
    std::optional<std::size_t> parent;
    std::size_t index;
  };
  std::vector<Frame> stack{{&root_, std::nullopt, 0}};
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    std::size_t id = names_.size();
    names_.push_back(f.e->name);
    parent_.push_back(f.parent);
    children_.emplace_back();
    sibling_index_.push_back(f.index);
    if (f.parent)
      children_[*f.parent].push_back(id);
    for (std::size_t i = f.e->children.size(); i-- > 0;)
      stack.push_back({&f.e->children[i], id, i});
  }
}

std::optional<std::size_t> XmlDocument::parent(std::size_t id) const { return parent_.at(id); }

std::string XmlDocument::path_of(std::size_t id) const {
  std::vector<std::size_t> chain;
  for (std::optional<std::size_t> n = id; n; n = parent_.at(*n))
    chain.push_back(*n);
  std::string out;
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    // Position among same-named siblings, as XPath counts it.
    std::size_t pos = 1;
    if (auto p = parent_[*it]) {
      for (std::size_t sib : children_[*p]) {
        if (sib == *it)
          break;
        if (names_[sib] == names_[*it])
          ++pos;
      }
    }
    out += "/" + names_[*it] + "[" + std::to_string(pos) + "]";
  }
  return out;
}

namespace {

void write(const Element& e, std::string& out) {
  if (e.children.empty()) {
    out += "<" + e.name + "/>";
    return;
  }
  out += "<" + e.name + ">";
  for (const auto& c : e.children)
    write(c, out);
  out += "</" + e.name + ">";
}

class XmlParser {
public:
  explicit XmlParser(std::string_view s) : s_(s) {}

  Element parse() {
    skip_misc();
    if (pos_ >= s_.size())
      fail("expected a root element");
    Element root = element();
    skip_misc();
    if (pos_ < s_.size())
      fail("content after the root element");
    return root;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(msg, line, col);
  }

  bool starts(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  void skip_until(std::string_view end) {
    auto at = s_.find(end, pos_);
    if (at == std::string_view::npos)
      fail("unterminated markup, expected '" + std::string(end) + "'");
    pos_ = at + end.size();
  }

  // Whitespace, comments, processing instructions and DOCTYPE.
  void skip_misc() {
    for (;;) {
      skip_ws();
      if (starts("<!--"))
        skip_until("-->");
      else if (starts("<?"))
        skip_until("?>");
      else if (starts("<!DOCTYPE")) {
        auto bracket = s_.find('[', pos_);
        auto close = s_.find('>', pos_);
        if (bracket != std::string_view::npos && bracket < close)
          skip_until("]>");
        else
          skip_until(">");
      } else
        return;
    }
  }

  static bool name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
  }
  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' ||
           c == '.';
  }

  std::string name() {
    if (pos_ >= s_.size() || !name_start(s_[pos_]))
      fail("expected an element name");
    std::size_t start = pos_;
    while (pos_ < s_.size() && name_char(s_[pos_]))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Element element() {
    if (!starts("<"))
      fail("expected '<'");
    ++pos_;
    Element e;
    e.name = name();
    skip_ws();
    if (starts("/>")) {
      pos_ += 2;
      return e;
    }
    if (!starts(">"))
      throw UnsupportedFeatureError("XML attribute", std::string(1, s_[pos_]) + "...");
    ++pos_;
    for (;;) {
      skip_ws();
      if (starts("<!--")) {
        skip_until("-->");
        continue;
      }
      if (starts("</")) {
        pos_ += 2;
        std::string closing = name();
        if (closing != e.name)
          fail("mismatched closing tag </" + closing + "> for <" + e.name + ">");
        skip_ws();
        if (!starts(">"))
          fail("expected '>'");
        ++pos_;
        return e;
      }
      if (pos_ >= s_.size())
        fail("unterminated element <" + e.name + ">");
      if (!starts("<")) {
        std::size_t end = s_.find('<', pos_);
        throw UnsupportedFeatureError("XML character data",
                                      std::string(s_.substr(pos_, std::min<std::size_t>(end - pos_, 20))));
      }
      e.children.push_back(element());
    }
  }
};

} // namespace

std::string XmlDocument::to_xml() const {
  std::string out;
  write(root_, out);
  return out;
}

XmlDocument parse_xml(std::string_view text) { return XmlDocument(XmlParser(text).parse()); }

bool WitnessTree::well_formed() const {
  if (nodes.empty() || root >= nodes.size())
    return false;
  std::vector<bool> seen(nodes.size(), false);
  std::vector<std::size_t> stack{root};
  std::size_t visited = 0;
  while (!stack.empty()) {
    std::size_t n = stack.back();
    stack.pop_back();
    if (n >= nodes.size() || seen[n])
      return false;
    seen[n] = true;
    ++visited;
    if (nodes[n].first_child)
      stack.push_back(*nodes[n].first_child);
    if (nodes[n].next_sibling)
      stack.push_back(*nodes[n].next_sibling);
  }
  return visited == nodes.size();
}

XmlDocument decode_witness(const WitnessTree& w) {
  if (!w.well_formed())
    throw InternalError("witness tree is not a finite tree");
  if (w.nodes[w.root].next_sibling)
    throw Error("witness root has a next sibling and is not a document");
  std::function<Element(std::size_t)> build = [&](std::size_t n) {
    Element e;
    e.name = w.nodes[n].label;
    for (auto c = w.nodes[n].first_child; c; c = w.nodes[*c].next_sibling)
      e.children.push_back(build(*c));
    return e;
  };
  return XmlDocument(build(w.root));
}

DecodedHedge decode_hedge(const WitnessTree& w, std::size_t marked) {
  if (!w.well_formed())
    throw InternalError("witness tree is not a finite tree");
  DecodedHedge out;
  std::optional<std::pair<std::size_t, std::size_t>> where;
  std::size_t counter = 0;
  std::function<Element(std::size_t)> build = [&](std::size_t n) {
    if (n == marked)
      where = {out.trees.size(), counter};
    ++counter;
    Element e;
    e.name = w.nodes[n].label;
    for (auto c = w.nodes[n].first_child; c; c = w.nodes[*c].next_sibling)
      e.children.push_back(build(*c));
    return e;
  };
  for (std::optional<std::size_t> t = w.root; t; t = w.nodes[*t].next_sibling) {
    counter = 0;
    Element root = build(*t);
    out.trees.emplace_back(std::move(root));
  }
  if (!where)
    throw InternalError("marked node is not in the witness");
  out.tree = where->first;
  out.node = where->second;
  return out;
}

WitnessTree encode_document(const XmlDocument& doc) {
  WitnessTree w;
  w.nodes.resize(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    w.nodes[i].label = doc.name(i);
    const auto& kids = doc.children(i);
    if (!kids.empty())
      w.nodes[i].first_child = kids.front();
    for (std::size_t k = 0; k + 1 < kids.size(); ++k)
      w.nodes[kids[k]].next_sibling = kids[k + 1];
  }
  w.root = 0;
  return w;
}

} // namespace treelogic
