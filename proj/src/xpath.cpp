#include "treelogic/xpath.hpp"

#include "treelogic/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace treelogic {

namespace {

struct AxisName {
  Axis axis;
  std::string_view name;
};

constexpr AxisName kAxisNames[] = {
    {Axis::Self, "self"},
    {Axis::Child, "child"},
    {Axis::Descendant, "descendant"},
    {Axis::DescendantOrSelf, "descendant-or-self"},
    {Axis::Parent, "parent"},
    {Axis::Ancestor, "ancestor"},
    {Axis::AncestorOrSelf, "ancestor-or-self"},
    {Axis::FollowingSibling, "following-sibling"},
    {Axis::PrecedingSibling, "preceding-sibling"},
    {Axis::Following, "following"},
    {Axis::Preceding, "preceding"},
};

} // namespace

std::string to_string(Axis a) {
  for (const auto& n : kAxisNames)
    if (n.axis == a)
      return std::string(n.name);
  return "?";
}

Axis inverse(Axis a) {
  switch (a) {
  case Axis::Self:
    return Axis::Self;
  case Axis::Child:
    return Axis::Parent;
  case Axis::Parent:
    return Axis::Child;
  case Axis::Descendant:
    return Axis::Ancestor;
  case Axis::Ancestor:
    return Axis::Descendant;
  case Axis::DescendantOrSelf:
    return Axis::AncestorOrSelf;
  case Axis::AncestorOrSelf:
    return Axis::DescendantOrSelf;
  case Axis::FollowingSibling:
    return Axis::PrecedingSibling;
  case Axis::PrecedingSibling:
    return Axis::FollowingSibling;
  case Axis::Following:
    return Axis::Preceding;
  case Axis::Preceding:
    return Axis::Following;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class Tok {
  Slash,
  DoubleSlash,
  Pipe,
  LBracket,
  RBracket,
  LParen,
  RParen,
  Star,
  Dot,
  DotDot,
  DoubleColon,
  Name,
  Number,
  At,
  Dollar,
  Other,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    auto two = [&](char second) { return i + 1 < s.size() && s[i + 1] == second; };
    if (c == '/') {
      if (two('/')) {
        out.push_back({Tok::DoubleSlash, "//", start});
        i += 2;
      } else {
        out.push_back({Tok::Slash, "/", start});
        ++i;
      }
    } else if (c == ':' && two(':')) {
      out.push_back({Tok::DoubleColon, "::", start});
      i += 2;
    } else if (c == '.' && two('.')) {
      out.push_back({Tok::DotDot, "..", start});
      i += 2;
    } else if (c == '.' && !(i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      out.push_back({Tok::Dot, ".", start});
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'))
        ++i;
      out.push_back({Tok::Number, std::string(s.substr(start, i - start)), start});
    } else if (name_start(c)) {
      while (i < s.size() && name_char(s[i]))
        ++i;
      if (i < s.size() && s[i] == ':' && !(i + 1 < s.size() && s[i + 1] == ':'))
        throw UnsupportedFeatureError("namespace prefix", std::string(s.substr(start, i - start + 1)));
      out.push_back({Tok::Name, std::string(s.substr(start, i - start)), start});
    } else {
      Tok k = Tok::Other;
      switch (c) {
      case '|':
        k = Tok::Pipe;
        break;
      case '[':
        k = Tok::LBracket;
        break;
      case ']':
        k = Tok::RBracket;
        break;
      case '(':
        k = Tok::LParen;
        break;
      case ')':
        k = Tok::RParen;
        break;
      case '*':
        k = Tok::Star;
        break;
      case '@':
        k = Tok::At;
        break;
      case '$':
        k = Tok::Dollar;
        break;
      default:
        break;
      }
      out.push_back({k, std::string(1, c), start});
      ++i;
    }
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

class XPathParser {
public:
  explicit XPathParser(std::string_view text) : text_(text), toks_(lex(text)) {}

  XPathExpr parse() {
    XPathExpr e = expr(false);
    if (peek().kind != Tok::End)
      unexpected();
    return e;
  }

private:
  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(msg, line, col);
  }

  [[noreturn]] void unexpected() const {
    const Token& t = peek();
    switch (t.kind) {
    case Tok::Number:
      throw UnsupportedFeatureError("number or position predicate", t.text);
    case Tok::At:
      throw UnsupportedFeatureError("attribute axis", t.text);
    case Tok::Dollar:
      throw UnsupportedFeatureError("variable reference", t.text);
    case Tok::Other:
      if (t.text == "=" || t.text == "<" || t.text == ">" || t.text == "!" || t.text == "+" ||
          t.text == "-")
        throw UnsupportedFeatureError("comparison or arithmetic", t.text);
      break;
    case Tok::End:
      fail("unexpected end of expression", t.pos);
    default:
      break;
    }
    fail("unexpected '" + t.text + "'", t.pos);
  }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) {
      if (peek().kind == Tok::End || peek().kind == Tok::Name || peek().kind == Tok::RBracket ||
          peek().kind == Tok::RParen)
        fail(std::string("expected ") + what, peek().pos);
      unexpected();
    }
    next();
  }

  XPathExpr expr(bool in_predicate) {
    XPathExpr e = path(in_predicate);
    while (peek().kind == Tok::Pipe) {
      next();
      XPathExpr u;
      u.kind = XPathExpr::Kind::Union;
      u.branches.push_back(std::move(e));
      u.branches.push_back(path(in_predicate));
      e = std::move(u);
    }
    return e;
  }

  bool starts_step() const {
    switch (peek().kind) {
    case Tok::Name:
    case Tok::Star:
    case Tok::Dot:
    case Tok::DotDot:
    case Tok::At:
      return true;
    default:
      return false;
    }
  }

  static Step dos_node() {
    Step s;
    s.axis = Axis::DescendantOrSelf;
    s.test.kind = NodeTest::Kind::Node;
    return s;
  }

  XPathExpr path(bool in_predicate) {
    XPathExpr p;
    if (peek().kind == Tok::Slash || peek().kind == Tok::DoubleSlash) {
      if (in_predicate)
        throw UnsupportedFeatureError("absolute path in a predicate", peek().text);
      p.absolute = true;
      if (next().kind == Tok::DoubleSlash) {
        p.steps.push_back(dos_node());
        relative(p.steps);
      } else if (starts_step()) {
        relative(p.steps);
      }
      return p;
    }
    relative(p.steps);
    return p;
  }

  void relative(std::vector<Step>& steps) {
    steps.push_back(step());
    for (;;) {
      if (peek().kind == Tok::Slash) {
        next();
      } else if (peek().kind == Tok::DoubleSlash) {
        next();
        steps.push_back(dos_node());
      } else {
        return;
      }
      steps.push_back(step());
    }
  }

  Step step() {
    Step s;
    if (peek().kind == Tok::Dot || peek().kind == Tok::DotDot) {
      s.axis = next().kind == Tok::Dot ? Axis::Self : Axis::Parent;
      s.test.kind = NodeTest::Kind::Node;
      if (peek().kind == Tok::LBracket)
        fail("predicate after an abbreviated step", peek().pos);
      return s;
    }
    if (peek().kind == Tok::Name && peek(1).kind == Tok::DoubleColon) {
      Token name = next();
      next();
      bool found = false;
      for (const auto& a : kAxisNames)
        if (a.name == name.text) {
          s.axis = a.axis;
          found = true;
        }
      if (!found) {
        if (name.text == "attribute" || name.text == "namespace")
          throw UnsupportedFeatureError(name.text + " axis", name.text + "::");
        fail("unknown axis '" + name.text + "'", name.pos);
      }
    } else {
      s.axis = Axis::Child;
    }
    s.test = test();
    while (peek().kind == Tok::LBracket) {
      next();
      s.predicates.push_back(disjunction());
      expect(Tok::RBracket, "']'");
    }
    return s;
  }

  NodeTest test() {
    NodeTest t;
    const Token& tok = peek();
    if (tok.kind == Tok::Star) {
      next();
      t.kind = NodeTest::Kind::Any;
      return t;
    }
    if (tok.kind != Tok::Name) {
      if (tok.kind == Tok::End || tok.kind == Tok::RBracket || tok.kind == Tok::Slash ||
          tok.kind == Tok::Pipe)
        fail("expected a node test", tok.pos);
      unexpected();
    }
    Token name = next();
    if (peek().kind == Tok::LParen) {
      if (name.text == "node") {
        next();
        expect(Tok::RParen, "')'");
        t.kind = NodeTest::Kind::Node;
        return t;
      }
      if (name.text == "text" || name.text == "comment" || name.text == "processing-instruction")
        throw UnsupportedFeatureError("node type test", name.text + "()");
      throw UnsupportedFeatureError("function call", name.text + "(");
    }
    if (name.text == kOtherLabel)
      throw UnsupportedFeatureError("reserved element name", name.text);
    t.kind = NodeTest::Kind::Name;
    t.name = name.text;
    return t;
  }

  static Predicate binary(Predicate::Kind k, Predicate l, Predicate r) {
    Predicate p;
    p.kind = k;
    p.operands.push_back(std::move(l));
    p.operands.push_back(std::move(r));
    return p;
  }

  bool keyword(std::string_view w) const { return peek().kind == Tok::Name && peek().text == w; }

  Predicate disjunction() {
    Predicate p = conjunction();
    while (keyword("or")) {
      next();
      p = binary(Predicate::Kind::Or, std::move(p), conjunction());
    }
    return p;
  }

  Predicate conjunction() {
    Predicate p = unary();
    while (keyword("and")) {
      next();
      p = binary(Predicate::Kind::And, std::move(p), unary());
    }
    return p;
  }

  Predicate unary() {
    if (keyword("not") && peek(1).kind == Tok::LParen) {
      next();
      next();
      Predicate p;
      p.kind = Predicate::Kind::Not;
      p.operands.push_back(disjunction());
      expect(Tok::RParen, "')'");
      return p;
    }
    if (peek().kind == Tok::LParen) {
      next();
      Predicate p = disjunction();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (peek().kind == Tok::Number)
      unexpected();
    Predicate p;
    p.kind = Predicate::Kind::Exists;
    p.path.push_back(expr(true));
    if (peek().kind == Tok::Other)
      unexpected();
    return p;
  }
};

// ---------------------------------------------------------------------------
// Unparsing

std::string unparse_predicate(const Predicate& p);

std::string unparse_test(const NodeTest& t) {
  switch (t.kind) {
  case NodeTest::Kind::Name:
    return t.name;
  case NodeTest::Kind::Any:
    return "*";
  case NodeTest::Kind::Node:
    return "node()";
  }
  return "";
}

std::string unparse_expr(const XPathExpr& e) {
  if (e.kind == XPathExpr::Kind::Union)
    return unparse_expr(e.branches[0]) + " | " + unparse_expr(e.branches[1]);
  std::string out = e.absolute ? "/" : "";
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    if (i)
      out += "/";
    const Step& s = e.steps[i];
    out += to_string(s.axis) + "::" + unparse_test(s.test);
    for (const auto& p : s.predicates)
      out += "[" + unparse_predicate(p) + "]";
  }
  return out;
}

std::string unparse_predicate(const Predicate& p) {
  auto wrap = [](const Predicate& q, bool paren) {
    std::string s = unparse_predicate(q);
    return paren ? "(" + s + ")" : s;
  };
  switch (p.kind) {
  case Predicate::Kind::Exists:
    return unparse_expr(p.path[0]);
  case Predicate::Kind::Not:
    return "not(" + unparse_predicate(p.operands[0]) + ")";
  case Predicate::Kind::And:
    return wrap(p.operands[0], p.operands[0].kind == Predicate::Kind::Or) + " and " +
           wrap(p.operands[1], p.operands[1].kind == Predicate::Kind::Or ||
                                   p.operands[1].kind == Predicate::Kind::And);
  case Predicate::Kind::Or:
    return wrap(p.operands[0], false) + " or " +
           wrap(p.operands[1], p.operands[1].kind == Predicate::Kind::Or);
  }
  return "";
}

std::size_t predicate_size(const Predicate& p);

std::size_t expr_size(const XPathExpr& e) {
  if (e.kind == XPathExpr::Kind::Union)
    return 1 + expr_size(e.branches[0]) + expr_size(e.branches[1]);
  std::size_t n = 1;
  for (const auto& s : e.steps) {
    ++n;
    for (const auto& p : s.predicates)
      n += predicate_size(p);
  }
  return n;
}

std::size_t predicate_size(const Predicate& p) {
  if (p.kind == Predicate::Kind::Exists)
    return expr_size(p.path[0]);
  std::size_t n = 1;
  for (const auto& q : p.operands)
    n += predicate_size(q);
  return n;
}

void collect_labels(const XPathExpr& e, std::set<std::string>& out);

void collect_labels(const Predicate& p, std::set<std::string>& out) {
  for (const auto& e : p.path)
    collect_labels(e, out);
  for (const auto& q : p.operands)
    collect_labels(q, out);
}

void collect_labels(const XPathExpr& e, std::set<std::string>& out) {
  for (const auto& b : e.branches)
    collect_labels(b, out);
  for (const auto& s : e.steps) {
    if (s.test.kind == NodeTest::Kind::Name)
      out.insert(s.test.name);
    for (const auto& p : s.predicates)
      collect_labels(p, out);
  }
}

} // namespace

XPathExpr parse_xpath(std::string_view text) { return XPathParser(text).parse(); }
std::string unparse(const XPathExpr& e) { return unparse_expr(e); }
std::size_t xpath_size(const XPathExpr& e) { return expr_size(e); }

std::vector<std::string> labels_of(const XPathExpr& e) {
  std::set<std::string> s;
  collect_labels(e, s);
  return {s.begin(), s.end()};
}

// ---------------------------------------------------------------------------
// Compilation

Formula axis_formula(Axis axis, Formula chi) {
  const Program down1 = Program::FirstChild, down2 = Program::NextSibling;
  const Program up1 = Program::Parent, up2 = Program::PrevSibling;
  Formula z = var("Z");
  switch (axis) {
  case Axis::Self:
    return chi;
  case Axis::Child:
    return mu("Z", disj(modal(up1, chi), modal(up2, z)));
  case Axis::Parent:
    return modal(down1, mu("Z", disj(chi, modal(down2, z))));
  case Axis::Descendant:
    return mu("Z", disj(modal(up1, disj(chi, z)), modal(up2, z)));
  case Axis::DescendantOrSelf:
    return disj(chi, axis_formula(Axis::Descendant, chi));
  case Axis::Ancestor:
    return modal(down1, mu("Z", disj(chi, disj(modal(down1, z), modal(down2, z)))));
  case Axis::AncestorOrSelf:
    return disj(chi, axis_formula(Axis::Ancestor, chi));
  case Axis::FollowingSibling:
    return mu("Z", modal(up2, disj(chi, z)));
  case Axis::PrecedingSibling:
    return modal(down2, mu("Z", disj(chi, modal(down2, z))));
  case Axis::Following:
    return axis_formula(Axis::DescendantOrSelf,
                        axis_formula(Axis::FollowingSibling, axis_formula(Axis::AncestorOrSelf, chi)));
  case Axis::Preceding:
    return axis_formula(Axis::DescendantOrSelf,
                        axis_formula(Axis::PrecedingSibling, axis_formula(Axis::AncestorOrSelf, chi)));
  }
  throw InternalError("unknown axis");
}

namespace {

class XPathCompiler {
public:
  XPathCompiler(Formula context, const std::optional<Alphabet>& alphabet)
      : chi_(context), alphabet_(alphabet) {}

  Formula select(const XPathExpr& e) {
    if (e.kind == XPathExpr::Kind::Union)
      return disj(select(e.branches[0]), select(e.branches[1]));
    Formula elems = e.absolute ? bottom() : chi_;
    // Condition, at the root element, under which the document node is selected.
    std::optional<Formula> doc;
    if (e.absolute)
      doc = top();
    for (const Step& s : e.steps) {
      Formula next = elems.is_false() ? bottom() : axis_formula(s.axis, elems);
      std::optional<Formula> next_doc;
      if (doc) {
        Formula root = conj(chi_, *doc);
        switch (s.axis) {
        case Axis::Self:
          next_doc = doc;
          break;
        case Axis::Child:
          next = disj(next, root);
          break;
        case Axis::Descendant:
          next = disj(next, axis_formula(Axis::DescendantOrSelf, root));
          break;
        case Axis::DescendantOrSelf:
          next = disj(next, axis_formula(Axis::DescendantOrSelf, root));
          next_doc = doc;
          break;
        case Axis::AncestorOrSelf:
          next_doc = doc;
          break;
        default:
          break;
        }
      }
      if (!elems.is_false()) {
        if (s.axis == Axis::Parent)
          next_doc = next_doc ? disj(*next_doc, elems) : elems;
        else if (s.axis == Axis::Ancestor || s.axis == Axis::AncestorOrSelf) {
          Formula some = axis_formula(Axis::AncestorOrSelf, elems);
          next_doc = next_doc ? disj(*next_doc, some) : some;
        }
      }
      next = conj(next, test(s.test));
      if (s.test.kind != NodeTest::Kind::Node)
        next_doc.reset();
      if (next_doc && !s.predicates.empty())
        throw UnsupportedFeatureError("predicate on a step that may select the document node",
                                      to_string(s.axis) + "::node()[...]");
      for (const auto& p : s.predicates)
        next = conj(next, predicate(p));
      elems = next;
      doc = next_doc;
    }
    return elems;
  }

private:
  Formula chi_;
  const std::optional<Alphabet>& alphabet_;

  Formula test(const NodeTest& t) const {
    if (t.kind != NodeTest::Kind::Name)
      return top();
    if (alphabet_ && !alphabet_->contains(t.name))
      return bottom();
    return prop(t.name);
  }

  // Nodes from which e selects at least one node.
  Formula exists(const XPathExpr& e) {
    if (e.kind == XPathExpr::Kind::Union)
      return disj(exists(e.branches[0]), exists(e.branches[1]));
    if (e.absolute)
      throw UnsupportedFeatureError("absolute path in a predicate", unparse(e));
    Formula g = top();
    for (std::size_t i = e.steps.size(); i-- > 0;) {
      const Step& s = e.steps[i];
      Formula here = conj(test(s.test), g);
      for (const auto& p : s.predicates)
        here = conj(here, predicate(p));
      g = here.is_false() ? bottom() : axis_formula(inverse(s.axis), here);
    }
    return g;
  }

  Formula predicate(const Predicate& p) {
    switch (p.kind) {
    case Predicate::Kind::Exists:
      return exists(p.path.at(0));
    case Predicate::Kind::And:
      return conj(predicate(p.operands.at(0)), predicate(p.operands.at(1)));
    case Predicate::Kind::Or:
      return disj(predicate(p.operands.at(0)), predicate(p.operands.at(1)));
    case Predicate::Kind::Not: {
      Formula inner = predicate(p.operands.at(0));
      if (inner.is_true())
        return bottom();
      if (inner.is_false())
        return top();
      return lnot(inner);
    }
    }
    throw InternalError("unknown predicate kind");
  }
};

} // namespace

Formula compile_xpath(const XPathExpr& e, Formula context, const std::optional<Alphabet>& alphabet) {
  if (!context.closed())
    throw Error("xpath context formula must be closed");
  return XPathCompiler(context, alphabet).select(e);
}

// ---------------------------------------------------------------------------
// Direct evaluation

namespace {

class XPathEvaluator {
public:
  explicit XPathEvaluator(const XmlDocument& doc) : doc_(doc), n_(doc.size()), end_(doc.size()) {
    // Subtree of x is [x, end_[x]) in document order.
    for (std::size_t x = n_; x-- > 0;) {
      end_[x] = x + 1;
      for (std::size_t c : doc.children(x))
        end_[x] = std::max(end_[x], end_[c]);
    }
  }

  using Set = std::vector<char>;

  Set evaluate(const XPathExpr& e, const Set& start) {
    if (e.kind == XPathExpr::Kind::Union) {
      Set a = evaluate(e.branches[0], start), b = evaluate(e.branches[1], start);
      for (std::size_t i = 0; i <= n_; ++i)
        a[i] |= b[i];
      return a;
    }
    Set cur(n_ + 1, 0);
    if (e.absolute)
      cur[n_] = 1;
    else
      cur = start;
    for (const Step& s : e.steps) {
      Set next(n_ + 1, 0);
      for (std::size_t x = 0; x <= n_; ++x) {
        if (!cur[x])
          continue;
        for (std::size_t y : axis(s.axis, x))
          if (!next[y] && matches(s, y))
            next[y] = 1;
      }
      cur = std::move(next);
    }
    return cur;
  }

  Set singleton(std::size_t x) const {
    Set s(n_ + 1, 0);
    s[x] = 1;
    return s;
  }

  std::size_t document_node() const { return n_; }

private:
  const XmlDocument& doc_;
  std::size_t n_;
  std::vector<std::size_t> end_;

  std::optional<std::size_t> parent(std::size_t x) const {
    if (x == n_)
      return std::nullopt;
    if (x == 0)
      return n_;
    return doc_.parent(x);
  }

  std::vector<std::size_t> children(std::size_t x) const {
    if (x == n_)
      return {0};
    return doc_.children(x);
  }

  std::vector<std::size_t> axis(Axis a, std::size_t x) const {
    std::vector<std::size_t> out;
    switch (a) {
    case Axis::Self:
      out.push_back(x);
      break;
    case Axis::Child:
      out = children(x);
      break;
    case Axis::Descendant:
    case Axis::DescendantOrSelf:
      if (a == Axis::DescendantOrSelf)
        out.push_back(x);
      if (x == n_) {
        for (std::size_t y = 0; y < n_; ++y)
          out.push_back(y);
      } else {
        for (std::size_t y = x + 1; y < end_[x]; ++y)
          out.push_back(y);
      }
      break;
    case Axis::Parent:
      if (auto p = parent(x))
        out.push_back(*p);
      break;
    case Axis::Ancestor:
    case Axis::AncestorOrSelf:
      if (a == Axis::AncestorOrSelf)
        out.push_back(x);
      for (auto p = parent(x); p; p = parent(*p))
        out.push_back(*p);
      break;
    case Axis::FollowingSibling:
    case Axis::PrecedingSibling: {
      auto p = parent(x);
      if (!p || *p == n_)
        break;
      const auto& sibs = doc_.children(*p);
      auto it = std::find(sibs.begin(), sibs.end(), x);
      if (a == Axis::FollowingSibling)
        out.assign(it + 1, sibs.end());
      else
        out.assign(sibs.begin(), it);
      break;
    }
    case Axis::Following:
      if (x != n_)
        for (std::size_t y = end_[x]; y < n_; ++y)
          out.push_back(y);
      break;
    case Axis::Preceding:
      if (x != n_)
        for (std::size_t y = 0; y < x; ++y)
          if (end_[y] <= x)
            out.push_back(y);
      break;
    }
    return out;
  }

  bool matches(const Step& s, std::size_t y) {
    switch (s.test.kind) {
    case NodeTest::Kind::Node:
      break;
    case NodeTest::Kind::Any:
      if (y == n_)
        return false;
      break;
    case NodeTest::Kind::Name:
      if (y == n_ || doc_.name(y) != s.test.name)
        return false;
      break;
    }
    for (const auto& p : s.predicates)
      if (!holds(p, y))
        return false;
    return true;
  }

  bool holds(const Predicate& p, std::size_t y) {
    switch (p.kind) {
    case Predicate::Kind::Exists: {
      Set r = evaluate(p.path.at(0), singleton(y));
      return std::find(r.begin(), r.end(), 1) != r.end();
    }
    case Predicate::Kind::And:
      return holds(p.operands.at(0), y) && holds(p.operands.at(1), y);
    case Predicate::Kind::Or:
      return holds(p.operands.at(0), y) || holds(p.operands.at(1), y);
    case Predicate::Kind::Not:
      return !holds(p.operands.at(0), y);
    }
    return false;
  }
};

} // namespace

std::vector<std::size_t> eval_xpath(const XPathExpr& e, const XmlDocument& doc, std::size_t context) {
  if (context >= doc.size())
    throw Error("unknown context node " + std::to_string(context));
  XPathEvaluator ev(doc);
  auto r = ev.evaluate(e, ev.singleton(context));
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < doc.size(); ++i)
    if (r[i])
      out.push_back(i);
  return out;
}

} // namespace treelogic
