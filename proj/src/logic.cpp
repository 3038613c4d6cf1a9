#include "treelogic/logic.hpp"

#include "treelogic/errors.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace treelogic {

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet(std::vector<std::string> labels) {
  std::erase(labels, std::string(kOtherLabel));
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  labels.emplace_back(kOtherLabel);
  symbols_ = std::move(labels);
}

Alphabet Alphabet::of(Formula f) { return Alphabet(labels_of(f)); }

bool Alphabet::contains(std::string_view label) const {
  return std::find(symbols_.begin(), symbols_.end(), label) != symbols_.end();
}

std::vector<std::string> Alphabet::named() const {
  return {symbols_.begin(), symbols_.end() - 1};
}

Alphabet Alphabet::merged(const Alphabet& other) const {
  std::vector<std::string> all = named();
  auto more = other.named();
  all.insert(all.end(), more.begin(), more.end());
  return Alphabet(std::move(all));
}

// ---------------------------------------------------------------------------
// Parser

namespace {

enum class Tok {
  Name,   // proposition
  Var,    // upper-case identifier
  Quoted, // 'label'
  Int,
  True,
  False,
  Mu,
  LetMu,
  In,
  Tilde,
  Amp,
  Bar,
  Lt,
  Gt,
  LParen,
  RParen,
  Dot,
  Comma,
  Eq,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t{Tok::End, "", line_, col_};
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      auto single = [&](Tok k) {
        t.kind = k;
        t.text = std::string(1, c);
        advance();
      };
      switch (c) {
      case '~': single(Tok::Tilde); break;
      case '!': single(Tok::Tilde); break;
      case '&': single(Tok::Amp); break;
      case '|': single(Tok::Bar); break;
      case '<': single(Tok::Lt); break;
      case '>': single(Tok::Gt); break;
      case '(': single(Tok::LParen); break;
      case ')': single(Tok::RParen); break;
      case '.': single(Tok::Dot); break;
      case ',': single(Tok::Comma); break;
      case '=': single(Tok::Eq); break;
      case '\'':
      case '"': t.kind = Tok::Quoted; t.text = quoted(c); break;
      default:
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
          t.kind = Tok::Int;
          t.text += c;
          advance();
          while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            t.text += src_[pos_];
            advance();
          }
          if (t.text == "-")
            throw SyntaxError("expected a digit after '-'", t.line, t.column);
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
          t.text = identifier();
          t.kind = classify(t.text);
        } else {
          throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
        }
      }
      out.push_back(std::move(t));
    }
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n')
          advance();
      } else {
        break;
      }
    }
  }

  std::string identifier() {
    std::string s;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      bool dash_ok = c == '-' && !s.empty() && s[0] >= 'a' && s[0] <= 'z';
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || dash_ok) {
        s += c;
        advance();
      } else {
        break;
      }
    }
    return s;
  }

  static Tok classify(const std::string& s) {
    if (s == "T")
      return Tok::True;
    if (s == "F")
      return Tok::False;
    if (s == "mu")
      return Tok::Mu;
    if (s == "let_mu")
      return Tok::LetMu;
    if (s == "in")
      return Tok::In;
    if (s[0] >= 'A' && s[0] <= 'Z')
      return Tok::Var;
    return Tok::Name;
  }

  std::string quoted(char q) {
    std::size_t line = line_, col = col_;
    advance();
    std::string s;
    for (;;) {
      if (pos_ >= src_.size())
        throw SyntaxError("unterminated quoted label", line, col);
      char c = src_[pos_];
      if (c == q) {
        advance();
        break;
      }
      if (c == '\\' && pos_ + 1 < src_.size()) {
        advance();
        c = src_[pos_];
      }
      s += c;
      advance();
    }
    if (s.empty())
      throw SyntaxError("empty quoted label", line, col);
    return s;
  }
};

class FormulaParser {
public:
  explicit FormulaParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse() {
    Formula f = formula();
    if (peek().kind != Tok::End)
      fail("unexpected '" + peek().text + "'");
    return f;
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw SyntaxError(msg, t.line, t.column);
  }

  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k)
      fail(std::string("expected ") + what + (peek().kind == Tok::End ? " before end of input"
                                                                      : ", found '" + peek().text + "'"));
    return next();
  }

  Formula formula() {
    if (peek().kind == Tok::Mu || peek().kind == Tok::LetMu)
      return binder();
    return disjunction();
  }

  Formula binder() {
    if (next().kind == Tok::Mu) {
      std::string name = expect(Tok::Var, "a variable name").text;
      expect(Tok::Dot, "'.'");
      return mu(name, formula());
    }
    std::vector<std::string> names;
    std::vector<Formula> bodies;
    do {
      names.push_back(expect(Tok::Var, "a variable name").text);
      expect(Tok::Eq, "'='");
      bodies.push_back(formula());
    } while (peek().kind == Tok::Comma && (next(), true));
    expect(Tok::In, "'in'");
    return let_mu(names, bodies, formula());
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (peek().kind == Tok::Bar) {
      next();
      f = lor(f, conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (peek().kind == Tok::Amp) {
      next();
      f = land(f, unary());
    }
    return f;
  }

  Program program() {
    const Token& t = expect(Tok::Int, "a program (1, 2, -1 or -2)");
    if (t.text == "1")
      return Program::FirstChild;
    if (t.text == "2")
      return Program::NextSibling;
    if (t.text == "-1")
      return Program::Parent;
    if (t.text == "-2")
      return Program::PrevSibling;
    throw SyntaxError("unknown program '" + t.text + "'", t.line, t.column);
  }

  Formula unary() {
    switch (peek().kind) {
    case Tok::Tilde: {
      next();
      if (peek().kind == Tok::Name || peek().kind == Tok::Quoted)
        return neg_prop(next().text);
      if (peek().kind == Tok::Lt && peek(1).kind == Tok::Int && peek(2).kind == Tok::Gt &&
          peek(3).kind == Tok::True) {
        next();
        Program p = program();
        next();
        next();
        return neg_modal_true(p);
      }
      return lnot(unary());
    }
    case Tok::Lt: {
      next();
      Program p = program();
      expect(Tok::Gt, "'>'");
      return modal(p, unary());
    }
    case Tok::Mu:
    case Tok::LetMu: return binder();
    default: return atom();
    }
  }

  Formula atom() {
    const Token& t = next();
    switch (t.kind) {
    case Tok::True: return top();
    case Tok::False: return bottom();
    case Tok::Name:
    case Tok::Quoted: return prop(t.text);
    case Tok::Var: return var(t.text);
    case Tok::LParen: {
      Formula f = formula();
      expect(Tok::RParen, "')'");
      return f;
    }
    default:
      --pos_;
      fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
    }
  }
};

std::string first_free_name(Formula f) {
  std::vector<Formula> stack{f};
  std::unordered_set<const void*> seen;
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!g.has_free_vars() || !seen.insert(g.id()).second)
      continue;
    if (g.kind() == FormulaKind::FreeVar)
      return g.name();
    for (Formula k : g.operands())
      stack.push_back(k);
  }
  return "?";
}

} // namespace

Formula parse_formula(std::string_view text) {
  Formula f = FormulaParser(Lexer(text).run()).parse();
  if (f.has_free_vars())
    throw UnboundVariableError(first_free_name(f));
  check_positive(f);
  return f;
}

// ---------------------------------------------------------------------------
// Positivity

namespace {

// For each loose binder depth: bit 0 = reached under even negations, bit 1 = odd.
class PositivityChecker {
public:
  const std::vector<std::uint8_t>& run(Formula f) {
    if (auto it = memo_.find(f.id()); it != memo_.end())
      return it->second;
    std::vector<std::uint8_t> out(f.open_depth(), 0);
    switch (f.kind()) {
    case FormulaKind::BoundVar: out[f.depth()] = 1; break;
    case FormulaKind::Not:
      for (std::size_t d = 0; d < out.size(); ++d) {
        std::uint8_t v = run(f.body())[d];
        out[d] = static_cast<std::uint8_t>(((v & 1) << 1) | ((v >> 1) & 1));
      }
      break;
    case FormulaKind::Mu:
      for (std::size_t i = 0; i < f.operands().size(); ++i) {
        const auto& k = run(f.operand(i));
        if (!k.empty() && (k[0] & 2)) {
          auto names = f.binder_names();
          throw PositivityError(i < names.size() ? names[i] : "X");
        }
        for (std::size_t d = 1; d < k.size(); ++d)
          out[d - 1] |= k[d];
      }
      break;
    default:
      for (Formula k : f.operands()) {
        const auto& kv = run(k);
        for (std::size_t d = 0; d < kv.size(); ++d)
          out[d] |= kv[d];
      }
    }
    return memo_.emplace(f.id(), std::move(out)).first->second;
  }

private:
  std::unordered_map<const void*, std::vector<std::uint8_t>> memo_;
};

} // namespace

void check_positive(Formula f) { PositivityChecker().run(f); }

// ---------------------------------------------------------------------------
// Negation normal form

namespace {

class NnfBuilder {
public:
  Formula run(Formula f, bool negated) {
    auto key = std::make_pair(f.id(), negated);
    if (auto it = memo_.find(key); it != memo_.end())
      return it->second;
    Formula out = negated ? neg(f) : pos(f);
    memo_.emplace(key, out);
    return out;
  }

private:
  std::map<std::pair<const void*, bool>, Formula> memo_;

  std::vector<Formula> all(Formula f, bool negated) {
    std::vector<Formula> kids;
    for (Formula k : f.operands())
      kids.push_back(run(k, negated));
    return kids;
  }

  Formula pos(Formula f) {
    switch (f.kind()) {
    case FormulaKind::And: return land(run(f.left(), false), run(f.right(), false));
    case FormulaKind::Or: return lor(run(f.left(), false), run(f.right(), false));
    case FormulaKind::Modal: return modal(f.program(), run(f.body(), false));
    case FormulaKind::Not: return run(f.body(), true);
    case FormulaKind::Mu: {
      auto names = f.binder_names();
      return mu_raw(all(f, false), {names.begin(), names.end()}, f.selected());
    }
    default: return f;
    }
  }

  Formula neg(Formula f) {
    switch (f.kind()) {
    case FormulaKind::True: return bottom();
    case FormulaKind::False: return top();
    case FormulaKind::Prop: return neg_prop(f.label());
    case FormulaKind::NegProp: return prop(f.label());
    case FormulaKind::BoundVar: return f; // binder negated alongside
    case FormulaKind::FreeVar: throw InternalError("negation normal form of an open formula");
    case FormulaKind::NegModalTrue: return modal(f.program(), top());
    case FormulaKind::And: return lor(run(f.left(), true), run(f.right(), true));
    case FormulaKind::Or: return land(run(f.left(), true), run(f.right(), true));
    case FormulaKind::Modal:
      if (f.body().is_true())
        return neg_modal_true(f.program());
      // Each node has at most one successor per program.
      return lor(neg_modal_true(f.program()), modal(f.program(), run(f.body(), true)));
    case FormulaKind::Not: return run(f.body(), false);
    case FormulaKind::Mu: {
      auto names = f.binder_names();
      return mu_raw(all(f, true), {names.begin(), names.end()}, f.selected());
    }
    }
    throw InternalError("unhandled formula kind");
  }
};

} // namespace

Formula nnf(Formula f) {
  check_positive(f);
  return NnfBuilder().run(f, false);
}

Formula negate(Formula f) {
  check_positive(f);
  return NnfBuilder().run(f, true);
}

bool is_nnf(Formula f) {
  std::vector<Formula> stack{f};
  std::unordered_set<const void*> seen;
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g.id()).second)
      continue;
    if (g.kind() == FormulaKind::Not)
      return false;
    for (Formula k : g.operands())
      stack.push_back(k);
  }
  return true;
}

// ---------------------------------------------------------------------------
// Cycle-freeness

namespace {

// Occurrence graph of one closed formula: syntax edges (labelled by the program
// when leaving a modality) plus back edges from variables to their equations.
// Closed proper subterms are opaque leaves and are checked on their own.
class CycleChecker {
public:
  bool check(Formula f) {
    if (auto it = memo_.find(f.id()); it != memo_.end())
      return it->second;
    Graph g;
    std::vector<std::vector<std::size_t>> frames;
    std::size_t root_id = 0;
    bool ok = build(f, f, g, frames, root_id);
    ok = ok && verify(g);
    memo_[f.id()] = ok;
    return ok;
  }

private:
  struct Edge {
    std::size_t to;
    int program; // 0 = unlabelled
  };
  struct Graph {
    std::vector<std::vector<Edge>> out;
    std::size_t add() {
      out.emplace_back();
      return out.size() - 1;
    }
  };

  std::unordered_map<const void*, bool> memo_;

  // Returns false as soon as an opaque subterm fails.
  bool build(Formula root, Formula f, Graph& g, std::vector<std::vector<std::size_t>>& frames,
             std::size_t& id) {
    id = g.add();
    if (f != root && f.closed())
      return check(f);
    switch (f.kind()) {
    case FormulaKind::BoundVar: {
      const auto& frame = frames.at(frames.size() - 1 - f.depth());
      g.out[id].push_back({frame.at(f.component()), 0});
      return true;
    }
    case FormulaKind::Modal: {
      std::size_t kid = 0;
      bool ok = build(root, f.body(), g, frames, kid);
      g.out[id].push_back({kid, program_code(f.program())});
      return ok;
    }
    case FormulaKind::Mu: {
      std::vector<std::size_t> entries;
      for (std::size_t i = 0; i < f.operands().size(); ++i)
        entries.push_back(g.add());
      frames.push_back(entries);
      bool ok = true;
      for (std::size_t i = 0; i < entries.size() && ok; ++i) {
        std::size_t kid = 0;
        ok = build(root, f.operand(i), g, frames, kid);
        g.out[entries[i]].push_back({kid, 0});
      }
      frames.pop_back();
      g.out[id].push_back({entries[f.selected()], 0});
      return ok;
    }
    default: {
      bool ok = true;
      for (Formula k : f.operands()) {
        std::size_t kid = 0;
        ok = ok && build(root, k, g, frames, kid);
        g.out[id].push_back({kid, 0});
      }
      return ok;
    }
    }
  }

  static bool verify(const Graph& g) {
    std::vector<std::size_t> comp = strongly_connected(g);
    std::size_t ncomp = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    // Programs seen on edges internal to each component.
    std::vector<std::set<int>> programs(ncomp);
    std::vector<std::vector<std::size_t>> plain(g.out.size());
    for (std::size_t v = 0; v < g.out.size(); ++v) {
      for (const Edge& e : g.out[v]) {
        if (comp[v] != comp[e.to])
          continue;
        if (e.program != 0)
          programs[comp[v]].insert(e.program);
        else
          plain[v].push_back(e.to);
      }
    }
    for (const auto& ps : programs)
      for (int p : ps)
        if (ps.count(-p))
          return false;
    return !has_cycle(plain);
  }

  static std::vector<std::size_t> strongly_connected(const Graph& g) {
    // Iterative Tarjan.
    const std::size_t n = g.out.size();
    const std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0, ncomp = 0;
    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t s = 0; s < n; ++s) {
      if (index[s] != unset)
        continue;
      work.push_back({s, 0});
      while (!work.empty()) {
        auto& [v, i] = work.back();
        if (i == 0) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack[v] = true;
        }
        if (i < g.out[v].size()) {
          std::size_t w = g.out[v][i++].to;
          if (index[w] == unset) {
            work.push_back({w, 0});
          } else if (on_stack[w]) {
            low[v] = std::min(low[v], index[w]);
          }
          continue;
        }
        if (low[v] == index[v]) {
          std::size_t w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = ncomp;
          } while (w != v);
          ++ncomp;
        }
        std::size_t done = v;
        work.pop_back();
        if (!work.empty())
          low[work.back().first] = std::min(low[work.back().first], low[done]);
      }
    }
    return comp;
  }

  static bool has_cycle(const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<std::uint8_t> color(adj.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t s = 0; s < adj.size(); ++s) {
      if (color[s])
        continue;
      work.push_back({s, 0});
      color[s] = 1;
      while (!work.empty()) {
        auto& [v, i] = work.back();
        if (i < adj[v].size()) {
          std::size_t w = adj[v][i++];
          if (color[w] == 1)
            return true;
          if (color[w] == 0) {
            color[w] = 1;
            work.push_back({w, 0});
          }
          continue;
        }
        color[v] = 2;
        work.pop_back();
      }
    }
    return false;
  }
};

} // namespace

bool is_cycle_free(Formula f) {
  if (!f.closed())
    throw InternalError("cycle-freeness of an open formula");
  return CycleChecker().check(f);
}

// ---------------------------------------------------------------------------
// Closure and lean

std::vector<Formula> fl_closure(Formula f) {
  if (!f.closed())
    throw InternalError("closure of an open formula");
  std::vector<Formula> out;
  std::unordered_set<Formula, FormulaHash> seen;
  std::vector<Formula> stack{f};
  while (!stack.empty()) {
    Formula g = stack.back();
    stack.pop_back();
    if (!seen.insert(g).second)
      continue;
    out.push_back(g);
    if (g.kind() == FormulaKind::Mu) {
      stack.push_back(unfold(g));
    } else {
      auto ops = g.operands();
      for (std::size_t i = ops.size(); i-- > 0;)
        stack.push_back(ops[i]);
    }
  }
  return out;
}

Lean::Lean(Formula f, const Alphabet& alphabet) : alphabet_(alphabet) {
  for (const auto& l : labels_of(f))
    if (!alphabet.contains(l))
      throw Error("label '" + l + "' missing from the alphabet");
  for (const auto& s : alphabet.symbols()) {
    index_.emplace(prop(s), entries_.size());
    entries_.push_back(prop(s));
  }
  for (Program p : kAllPrograms) {
    Formula g = modal(p, top());
    index_.emplace(g, entries_.size());
    entries_.push_back(g);
  }
  for (Formula g : fl_closure(f)) {
    if (g.kind() != FormulaKind::Modal || g.body().is_true())
      continue;
    index_.emplace(g, entries_.size());
    modal_.push_back(entries_.size());
    entries_.push_back(g);
  }
}

std::optional<std::size_t> Lean::index_of(Formula entry) const {
  if (auto it = index_.find(entry); it != index_.end())
    return it->second;
  return std::nullopt;
}

std::size_t Lean::label_index(std::string_view label) const {
  auto it = index_.find(prop(label));
  if (it == index_.end())
    throw Error("label '" + std::string(label) + "' missing from the alphabet");
  return it->second;
}

std::size_t Lean::top_index(Program p) const { return index_.at(modal(p, top())); }

} // namespace treelogic
