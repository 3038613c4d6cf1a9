#include "treelogic/treetypes.hpp"

#include "treelogic/errors.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace treelogic {

// ---------------------------------------------------------------------------
// Regex

std::strong_ordering operator<=>(const Regex& a, const Regex& b) {
  if (auto c = a.kind <=> b.kind; c != 0)
    return c;
  if (auto c = a.atom <=> b.atom; c != 0)
    return c;
  return std::lexicographical_compare_three_way(a.items.begin(), a.items.end(), b.items.begin(),
                                                b.items.end());
}

Regex Regex::empty() { return Regex{}; }

Regex Regex::epsilon() {
  Regex r;
  r.kind = Kind::Epsilon;
  return r;
}

Regex Regex::symbol(std::string name) {
  Regex r;
  r.kind = Kind::Atom;
  r.atom = std::move(name);
  return r;
}

Regex Regex::seq(Regex a, Regex b) {
  if (a.kind == Kind::Empty || b.kind == Kind::Empty)
    return empty();
  if (a.kind == Kind::Epsilon)
    return b;
  if (b.kind == Kind::Epsilon)
    return a;
  Regex r;
  r.kind = Kind::Seq;
  for (Regex* p : {&a, &b}) {
    if (p->kind == Kind::Seq)
      for (auto& i : p->items)
        r.items.push_back(std::move(i));
    else
      r.items.push_back(std::move(*p));
  }
  return r;
}

Regex Regex::alt(Regex a, Regex b) {
  std::vector<Regex> items;
  for (Regex* p : {&a, &b}) {
    if (p->kind == Kind::Alt)
      for (auto& i : p->items)
        items.push_back(std::move(i));
    else if (p->kind != Kind::Empty)
      items.push_back(std::move(*p));
  }
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  if (items.empty())
    return empty();
  if (items.size() == 1)
    return std::move(items[0]);
  Regex r;
  r.kind = Kind::Alt;
  r.items = std::move(items);
  return r;
}

Regex Regex::star(Regex r) {
  if (r.kind == Kind::Empty || r.kind == Kind::Epsilon)
    return epsilon();
  if (r.kind == Kind::Star)
    return r;
  if (r.kind == Kind::Alt) {
    // (e | r)* = r*
    Regex rest = empty();
    for (auto& i : r.items)
      if (i.kind != Kind::Epsilon)
        rest = alt(std::move(rest), std::move(i));
    if (rest.kind == Kind::Empty)
      return epsilon();
    if (rest.kind == Kind::Star)
      return rest;
    r = std::move(rest);
  }
  Regex s;
  s.kind = Kind::Star;
  s.items.push_back(std::move(r));
  return s;
}

Regex Regex::opt(Regex r) { return r.nullable() ? r : alt(epsilon(), std::move(r)); }
Regex Regex::plus(Regex r) { return seq(r, star(r)); }

bool Regex::nullable() const {
  switch (kind) {
  case Kind::Empty:
  case Kind::Atom:
    return false;
  case Kind::Epsilon:
  case Kind::Star:
    return true;
  case Kind::Seq:
    return std::all_of(items.begin(), items.end(), [](const Regex& r) { return r.nullable(); });
  case Kind::Alt:
    return std::any_of(items.begin(), items.end(), [](const Regex& r) { return r.nullable(); });
  }
  return false;
}

Regex Regex::derivative(std::string_view name) const {
  switch (kind) {
  case Kind::Empty:
  case Kind::Epsilon:
    return empty();
  case Kind::Atom:
    return atom == name ? epsilon() : empty();
  case Kind::Seq: {
    Regex out = empty();
    for (std::size_t i = 0; i < items.size(); ++i) {
      Regex rest = items[i].derivative(name);
      for (std::size_t j = i + 1; j < items.size(); ++j)
        rest = seq(std::move(rest), items[j]);
      out = alt(std::move(out), std::move(rest));
      if (!items[i].nullable())
        break;
    }
    return out;
  }
  case Kind::Alt: {
    Regex out = empty();
    for (const auto& i : items)
      out = alt(std::move(out), i.derivative(name));
    return out;
  }
  case Kind::Star:
    return seq(items[0].derivative(name), *this);
  }
  return empty();
}

std::set<std::string> Regex::first() const {
  std::set<std::string> out;
  switch (kind) {
  case Kind::Empty:
  case Kind::Epsilon:
    break;
  case Kind::Atom:
    out.insert(atom);
    break;
  case Kind::Seq:
    for (const auto& i : items) {
      auto f = i.first();
      out.insert(f.begin(), f.end());
      if (!i.nullable())
        break;
    }
    break;
  case Kind::Alt:
  case Kind::Star:
    for (const auto& i : items) {
      auto f = i.first();
      out.insert(f.begin(), f.end());
    }
    break;
  }
  return out;
}

bool Regex::has_nonempty() const {
  for (const auto& a : first())
    if (derivative(a).kind != Kind::Empty)
      return true;
  return false;
}

std::size_t Regex::size() const {
  std::size_t n = 1;
  for (const auto& i : items)
    n += i.size();
  return n;
}

void Regex::atoms(std::set<std::string>& out) const {
  if (kind == Kind::Atom)
    out.insert(atom);
  for (const auto& i : items)
    i.atoms(out);
}

namespace {

// Precedence: 0 alternative, 1 sequence, 2 postfix operand.
std::string print(const Regex& r, int prec) {
  using K = Regex::Kind;
  auto wrap = [&](std::string s, int own) { return own < prec ? "(" + s + ")" : s; };
  switch (r.kind) {
  case K::Empty:
    return "#none";
  case K::Epsilon:
    return "()";
  case K::Atom:
    return r.atom;
  case K::Star:
    return print(r.items[0], 2) + "*";
  case K::Seq: {
    std::string s;
    for (std::size_t i = 0; i < r.items.size(); ++i)
      s += (i ? ", " : "") + print(r.items[i], 2);
    return wrap(s, 1);
  }
  case K::Alt: {
    std::vector<const Regex*> rest;
    bool eps = false;
    for (const auto& i : r.items) {
      if (i.kind == K::Epsilon)
        eps = true;
      else
        rest.push_back(&i);
    }
    if (eps) {
      if (rest.size() == 1)
        return print(*rest[0], 2) + "?";
      std::string s;
      for (std::size_t i = 0; i < rest.size(); ++i)
        s += (i ? " | " : "") + print(*rest[i], 1);
      return "(" + s + ")?";
    }
    std::string s;
    for (std::size_t i = 0; i < rest.size(); ++i)
      s += (i ? " | " : "") + print(*rest[i], 1);
    return wrap(s, 0);
  }
  }
  return "";
}

} // namespace

std::string to_string(const Regex& r) { return print(r, 0); }

// ---------------------------------------------------------------------------
// Definitions

void TreeTypeDefs::check() const {
  if (!defs.count(start))
    throw DefinitionError("start nonterminal '" + start + "' is not defined");
  for (const auto& [name, d] : defs) {
    std::set<std::string> used;
    d.content.atoms(used);
    for (const auto& u : used)
      if (!defs.count(u))
        throw DefinitionError("'" + name + "' refers to undefined '" + u + "'");
    if (d.label == kOtherLabel)
      throw DefinitionError("label '" + d.label + "' is reserved");
  }
}

std::size_t TreeTypeDefs::size() const {
  std::size_t n = 0;
  for (const auto& [name, d] : defs)
    n += 1 + d.content.size();
  return n;
}

std::vector<std::string> TreeTypeDefs::labels() const {
  std::set<std::string> s;
  for (const auto& [name, d] : defs)
    s.insert(d.label);
  return {s.begin(), s.end()};
}

namespace {

class TextCursor {
public:
  explicit TextCursor(std::string_view s) : s_(s) {}

  std::string_view text() const { return s_; }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  bool starts(std::string_view p) const { return s_.substr(pos_, p.size()) == p; }
  void advance(std::size_t n = 1) { pos_ = std::min(s_.size(), pos_ + n); }

  void skip_ws(bool newlines = true) {
    while (!done() && std::isspace(static_cast<unsigned char>(s_[pos_])) &&
           (newlines || s_[pos_] != '\n'))
      ++pos_;
  }

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

  void expect(std::string_view p) {
    if (!starts(p))
      fail("expected '" + std::string(p) + "'");
    advance(p.size());
  }

  static bool name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
  }
  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' ||
           c == '.';
  }

  std::string name() {
    if (!name_start(peek()))
      fail("expected a name");
    std::size_t start = pos_;
    while (!done() && name_char(s_[pos_]))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void skip_until(std::string_view end) {
    auto at = s_.find(end, pos_);
    if (at == std::string_view::npos)
      fail("unterminated markup, expected '" + std::string(end) + "'");
    pos_ = at + end.size();
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

// Content particle grammar shared by both formats; `dtd` selects the DTD
// separators and keywords.
class RegexParser {
public:
  RegexParser(TextCursor& c, bool dtd) : c_(c), dtd_(dtd) {}

  Regex alternation() {
    Regex r = sequence();
    for (;;) {
      c_.skip_ws(dtd_);
      if (c_.peek() != '|')
        return r;
      c_.advance();
      r = Regex::alt(std::move(r), sequence());
    }
  }

  Regex postfix() {
    Regex r = primary();
    for (;;) {
      char ch = c_.peek();
      if (ch == '*')
        r = Regex::star(std::move(r));
      else if (ch == '+')
        r = Regex::plus(std::move(r));
      else if (ch == '?')
        r = Regex::opt(std::move(r));
      else
        return r;
      c_.advance();
    }
  }

  bool saw_pcdata = false;

private:
  TextCursor& c_;
  bool dtd_;

  Regex sequence() {
    Regex r = postfix();
    for (;;) {
      c_.skip_ws(dtd_);
      if (c_.peek() != ',')
        return r;
      c_.advance();
      r = Regex::seq(std::move(r), postfix());
    }
  }

  Regex primary() {
    c_.skip_ws(dtd_);
    if (c_.peek() == '(') {
      c_.advance();
      c_.skip_ws(dtd_);
      if (c_.peek() == ')') {
        if (dtd_)
          c_.fail("empty content group");
        c_.advance();
        return Regex::epsilon();
      }
      Regex r = alternation();
      c_.skip_ws(dtd_);
      c_.expect(")");
      return r;
    }
    if (dtd_ && c_.starts("#PCDATA")) {
      c_.advance(7);
      saw_pcdata = true;
      return Regex::epsilon();
    }
    if (!dtd_ && c_.starts("#none")) {
      c_.advance(5);
      return Regex::empty();
    }
    return Regex::symbol(c_.name());
  }
};

} // namespace

TreeTypeDefs parse_dtd(std::string_view text, std::optional<std::string> root) {
  TextCursor c(text);
  TreeTypeDefs t;
  std::vector<std::string> order;
  std::vector<std::string> any_elements;
  std::optional<std::string> doctype_root;
  bool in_subset = false;
  for (;;) {
    c.skip_ws();
    if (c.done())
      break;
    if (c.starts("<!--")) {
      c.skip_until("-->");
    } else if (c.starts("<?")) {
      c.skip_until("?>");
    } else if (c.starts("<!DOCTYPE")) {
      if (in_subset)
        c.fail("nested DOCTYPE");
      c.advance(9);
      c.skip_ws();
      doctype_root = c.name();
      c.skip_ws();
      if (c.peek() != '[')
        c.fail("expected '[' starting the internal subset");
      c.advance();
      in_subset = true;
    } else if (in_subset && c.peek() == ']') {
      c.advance();
      c.skip_ws();
      c.expect(">");
      in_subset = false;
    } else if (c.starts("<!ATTLIST")) {
      c.skip_until(">");
    } else if (c.starts("<!ENTITY")) {
      throw UnsupportedFeatureError("DTD entity declaration", "<!ENTITY");
    } else if (c.starts("<!NOTATION")) {
      throw UnsupportedFeatureError("DTD notation declaration", "<!NOTATION");
    } else if (c.peek() == '%') {
      throw UnsupportedFeatureError("parameter entity reference", "%");
    } else if (c.starts("<!ELEMENT")) {
      c.advance(9);
      c.skip_ws();
      std::string name = c.name();
      if (name == kOtherLabel)
        throw DefinitionError("element name '" + name + "' is reserved");
      if (t.defs.count(name))
        throw DefinitionError("element '" + name + "' is declared twice");
      c.skip_ws();
      Regex content;
      if (c.starts("EMPTY")) {
        c.advance(5);
        content = Regex::epsilon();
      } else if (c.starts("ANY")) {
        c.advance(3);
        any_elements.push_back(name);
      } else {
        if (c.peek() != '(')
          c.fail("expected EMPTY, ANY or a content group");
        RegexParser p(c, true);
        content = p.postfix();
      }
      c.skip_ws();
      c.expect(">");
      t.defs[name] = TypeDef{name, std::move(content)};
      order.push_back(name);
    } else {
      c.fail("expected a markup declaration");
    }
  }
  if (in_subset)
    c.fail("unterminated DOCTYPE internal subset");
  if (order.empty())
    throw DefinitionError("DTD declares no elements");
  Regex any = Regex::empty();
  for (const auto& n : order)
    any = Regex::alt(std::move(any), Regex::symbol(n));
  for (const auto& n : any_elements)
    t.defs[n].content = Regex::star(any);
  t.start = root ? *root : doctype_root ? *doctype_root : order.front();
  t.check();
  return t;
}

TreeTypeDefs parse_type_defs(std::string_view text) {
  TextCursor c(text);
  TreeTypeDefs t;
  std::optional<std::string> start;
  for (;;) {
    c.skip_ws();
    if (c.done())
      break;
    if (c.peek() == '#') {
      c.skip_until("\n");
      continue;
    }
    std::string lhs = c.name();
    c.skip_ws(false);
    if (lhs == "start" && c.peek() != '-') {
      if (start)
        c.fail("start declared twice");
      start = c.name();
      continue;
    }
    c.expect("->");
    c.skip_ws(false);
    std::string label = c.name();
    c.skip_ws(false);
    c.expect("(");
    c.skip_ws(false);
    Regex content = Regex::epsilon();
    if (c.peek() != ')') {
      RegexParser p(c, false);
      content = p.alternation();
      c.skip_ws(false);
    }
    c.expect(")");
    if (t.defs.count(lhs))
      throw DefinitionError("nonterminal '" + lhs + "' is defined twice");
    if (!start && t.defs.empty())
      t.start = lhs;
    t.defs[lhs] = TypeDef{label, std::move(content)};
  }
  if (start)
    t.start = *start;
  if (t.defs.empty())
    throw DefinitionError("no definitions");
  t.check();
  return t;
}

std::string to_text(const TreeTypeDefs& t) {
  std::ostringstream out;
  out << "start " << t.start << "\n";
  for (const auto& [name, d] : t.defs) {
    std::string body = d.content.kind == Regex::Kind::Epsilon ? "" : to_string(d.content);
    out << name << " -> " << d.label << "(" << body << ")\n";
  }
  return out.str();
}

namespace {

std::string dtd_particle(const Regex& r) {
  using K = Regex::Kind;
  switch (r.kind) {
  case K::Atom:
    return r.atom;
  case K::Star:
    return dtd_particle(r.items[0]) + "*";
  case K::Seq: {
    std::string s = "(";
    for (std::size_t i = 0; i < r.items.size(); ++i)
      s += (i ? ", " : "") + dtd_particle(r.items[i]);
    return s + ")";
  }
  case K::Alt: {
    std::vector<const Regex*> rest;
    bool eps = false;
    for (const auto& i : r.items) {
      if (i.kind == K::Epsilon)
        eps = true;
      else
        rest.push_back(&i);
    }
    std::string s;
    if (rest.size() == 1) {
      s = dtd_particle(*rest[0]);
    } else {
      s = "(";
      for (std::size_t i = 0; i < rest.size(); ++i)
        s += (i ? " | " : "") + dtd_particle(*rest[i]);
      s += ")";
    }
    if (!eps || (rest.size() == 1 && rest[0]->nullable()))
      return s;
    if (s.back() == '*' || s.back() == '?')
      s = "(" + s + ")";
    return s + "?";
  }
  case K::Epsilon:
  case K::Empty:
    break;
  }
  throw DefinitionError("content cannot be written as a DTD particle");
}

} // namespace

std::string to_dtd(const TreeTypeDefs& t) {
  std::ostringstream out;
  out << "<!DOCTYPE " << t.start << " [\n";
  for (const auto& [name, d] : t.defs) {
    if (name != d.label)
      throw DefinitionError("nonterminal '" + name + "' is not named after its label");
    out << "<!ELEMENT " << name << " ";
    if (d.content.kind == Regex::Kind::Epsilon) {
      out << "EMPTY";
    } else {
      std::string p = dtd_particle(d.content);
      out << (p.front() == '(' ? p : "(" + p + ")");
    }
    out << ">\n";
  }
  out << "]>\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Validation

namespace {

class Validator {
public:
  Validator(const XmlDocument& doc, const TreeTypeDefs& t) : doc_(doc), t_(t) {}

  bool element(std::size_t node, const std::string& nt) {
    auto key = std::make_pair(node, nt);
    if (auto it = memo_.find(key); it != memo_.end())
      return it->second;
    const TypeDef& d = t_.defs.at(nt);
    bool ok = doc_.name(node) == d.label;
    if (ok) {
      std::set<Regex> states{d.content};
      for (std::size_t child : doc_.children(node)) {
        std::set<Regex> next;
        for (const auto& r : states)
          for (const auto& a : r.first())
            if (element(child, a)) {
              Regex dr = r.derivative(a);
              if (dr.kind != Regex::Kind::Empty)
                next.insert(std::move(dr));
            }
        states = std::move(next);
        if (states.empty())
          break;
      }
      ok = std::any_of(states.begin(), states.end(), [](const Regex& r) { return r.nullable(); });
    }
    memo_.emplace(key, ok);
    return ok;
  }

private:
  const XmlDocument& doc_;
  const TreeTypeDefs& t_;
  std::map<std::pair<std::size_t, std::string>, bool> memo_;
};

} // namespace

bool validate_at(const XmlDocument& doc, std::size_t node, const TreeTypeDefs& t) {
  t.check();
  return Validator(doc, t).element(node, t.start);
}

bool validate(const XmlDocument& doc, const TreeTypeDefs& t) { return validate_at(doc, 0, t); }

// ---------------------------------------------------------------------------
// Binarization

std::size_t BinaryTypeDefs::size() const {
  std::size_t n = 0;
  for (const auto& r : rules)
    n += r.size();
  return n;
}

BinaryTypeDefs binarize(const TreeTypeDefs& t) {
  t.check();
  // Raw grammar: index 0 is the start, others are residuals.
  std::vector<std::vector<BinaryAlternative>> rules(1);
  std::vector<std::string> names{"S"};
  std::map<Regex, std::size_t> residual_index;
  std::vector<Regex> pending;

  auto residual = [&](const Regex& r) -> std::size_t {
    if (auto it = residual_index.find(r); it != residual_index.end())
      return it->second;
    std::size_t id = rules.size();
    residual_index.emplace(r, id);
    rules.emplace_back();
    names.push_back("Q" + std::to_string(id));
    pending.push_back(r);
    return id;
  };
  auto options = [&](const Regex& r) {
    std::vector<std::optional<std::size_t>> out;
    if (r.nullable())
      out.push_back(std::nullopt);
    if (r.has_nonempty())
      out.push_back(residual(r));
    return out;
  };

  const TypeDef& sd = t.defs.at(t.start);
  for (auto c : options(sd.content))
    rules[0].push_back({sd.label, c, std::nullopt});

  while (!pending.empty()) {
    Regex r = pending.back();
    pending.pop_back();
    std::size_t id = residual_index.at(r);
    std::vector<BinaryAlternative> alts;
    for (const auto& a : r.first()) {
      Regex rest = r.derivative(a);
      if (rest.kind == Regex::Kind::Empty)
        continue;
      const TypeDef& d = t.defs.at(a);
      for (auto c : options(d.content))
        for (auto s : options(rest))
          alts.push_back({d.label, c, s});
    }
    rules[id] = std::move(alts);
  }

  // Productive nonterminals: least fixpoint.
  std::vector<bool> productive(rules.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < rules.size(); ++i) {
      if (productive[i])
        continue;
      for (const auto& alt : rules[i])
        if ((!alt.first || productive[*alt.first]) && (!alt.next || productive[*alt.next])) {
          productive[i] = changed = true;
          break;
        }
    }
  }
  auto usable = [&](const BinaryAlternative& alt) {
    return (!alt.first || productive[*alt.first]) && (!alt.next || productive[*alt.next]);
  };

  // Reachable from the start through usable alternatives, renumbered in BFS order.
  std::vector<std::optional<std::size_t>> renumber(rules.size());
  std::vector<std::size_t> queue{0};
  renumber[0] = 0;
  for (std::size_t qi = 0; qi < queue.size(); ++qi)
    for (const auto& alt : rules[queue[qi]])
      if (usable(alt))
        for (auto ref : {alt.first, alt.next})
          if (ref && !renumber[*ref]) {
            renumber[*ref] = queue.size();
            queue.push_back(*ref);
          }

  BinaryTypeDefs bt;
  bt.start = 0;
  for (std::size_t old : queue) {
    bt.names.push_back(old == 0 ? "S" : "Q" + std::to_string(*renumber[old]));
    std::vector<BinaryAlternative> alts;
    for (const auto& alt : rules[old]) {
      if (!usable(alt))
        continue;
      BinaryAlternative a{alt.label, std::nullopt, std::nullopt};
      if (alt.first)
        a.first = *renumber[*alt.first];
      if (alt.next)
        a.next = *renumber[*alt.next];
      alts.push_back(std::move(a));
    }
    bt.rules.push_back(std::move(alts));
  }
  return bt;
}

bool accepts(const BinaryTypeDefs& bt, const WitnessTree& w) {
  std::map<std::pair<std::size_t, std::optional<std::size_t>>, bool> memo;
  std::function<bool(std::optional<std::size_t>, std::optional<std::size_t>)> in =
      [&](std::optional<std::size_t> node, std::optional<std::size_t> nt) -> bool {
    if (!node || !nt)
      return !node && !nt;
    auto key = std::make_pair(*node, nt);
    if (auto it = memo.find(key); it != memo.end())
      return it->second;
    bool ok = false;
    const WitnessNode& n = w.nodes.at(*node);
    for (const auto& alt : bt.rules.at(*nt))
      if (alt.label == n.label && in(n.first_child, alt.first) && in(n.next_sibling, alt.next)) {
        ok = true;
        break;
      }
    memo[key] = ok;
    return ok;
  };
  return in(w.root, bt.start);
}

// ---------------------------------------------------------------------------
// Compilation

Formula compile_type(const BinaryTypeDefs& bt, TypeMode mode) {
  if (bt.rules.empty() || bt.rules[bt.start].empty())
    return bottom();
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < bt.rules.size(); ++i)
    vars.push_back("N" + std::to_string(i));

  auto slot = [&](Program p, std::optional<std::size_t> nt) {
    return nt ? modal(p, var(vars[*nt])) : neg_modal_true(p);
  };
  // Alternatives grouped by label, then by first-child option.
  auto body_of = [&](const std::vector<BinaryAlternative>& alts, bool free_sibling) {
    std::map<std::string, std::map<std::optional<std::size_t>, std::vector<std::optional<std::size_t>>>>
        grouped;
    for (const auto& a : alts)
      grouped[a.label][a.first].push_back(a.next);
    std::vector<Formula> by_label;
    for (const auto& [label, by_first] : grouped) {
      std::vector<Formula> choices;
      for (const auto& [first, nexts] : by_first) {
        std::vector<Formula> sibs;
        for (auto n : nexts)
          sibs.push_back(slot(Program::NextSibling, n));
        Formula sib = free_sibling ? top() : disj(sibs);
        choices.push_back(conj(slot(Program::FirstChild, first), sib));
      }
      by_label.push_back(conj(prop(label), disj(choices)));
    }
    return disj(by_label);
  };

  // The start is never referenced, so only the other nonterminals form the system.
  std::vector<std::string> names;
  std::vector<Formula> bodies;
  for (std::size_t i = 0; i < bt.rules.size(); ++i) {
    if (i == bt.start)
      continue;
    names.push_back(vars[i]);
    bodies.push_back(body_of(bt.rules[i], false));
  }
  Formula start = body_of(bt.rules[bt.start], mode == TypeMode::Subtree);
  if (bodies.empty())
    return start;
  return let_mu(names, bodies, start);
}

} // namespace treelogic
