// Command-line front end: satisfiability, XPath static analysis, the
// performance suite and the random corpora.

#include "treelogic/acceptance.hpp"
#include "treelogic/analyzer.hpp"
#include "treelogic/bench.hpp"
#include "treelogic/corpus.hpp"
#include "treelogic/errors.hpp"
#include "treelogic/logic.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace treelogic;
using Json = nlohmann::ordered_json;

enum Exit { kHolds = 0, kFails = 1, kUsage = 2, kResource = 3, kInternal = 4 };

struct Config {
  std::string format = "text";
  double time_limit = 300;
  std::size_t max_nodes = std::size_t{1} << 22;
  bool stats = false;

  std::string formula;
  std::string q1, q2, query;
  std::vector<std::string> covering;
  std::string dtd, root, type;
  std::string expected_labels, expected_type, expected_dtd, expected_root;

  bool full = false;
  std::string kind = "xpath";
  std::uint64_t seed = 1;
  std::size_t count = 10;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> split_labels(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text + ",") {
    if (c == ',' || c == ' ') {
      if (!cur.empty())
        out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

SolverOptions solver_options(const Config& c) {
  SolverOptions o;
  o.max_bdd_nodes = c.max_nodes;
  o.time_limit = std::chrono::milliseconds(static_cast<std::int64_t>(c.time_limit * 1000));
  return o;
}

std::optional<TreeTypeDefs> constraint(const Config& c) {
  if (!c.dtd.empty() && !c.type.empty())
    throw Error("give either --dtd or --type, not both");
  if (!c.dtd.empty())
    return parse_dtd(read_file(c.dtd), c.root.empty() ? std::nullopt : std::optional(c.root));
  if (!c.root.empty())
    throw Error("--root needs --dtd");
  if (!c.type.empty())
    return parse_type_defs(read_file(c.type));
  return std::nullopt;
}

Json stats_json(const std::vector<SolverStats>& all) {
  SolverStats s;
  for (const auto& x : all) {
    s.lean_size = std::max(s.lean_size, x.lean_size);
    s.iterations += x.iterations;
    s.valuations += x.valuations;
    s.millis += x.millis;
  }
  return Json{{"leanSize", s.lean_size},
              {"iterations", s.iterations},
              {"valuations", s.valuations},
              {"millis", s.millis}};
}

std::string stats_line(const Json& s) {
  std::ostringstream o;
  o << "stats: lean " << s["leanSize"] << ", iterations " << s["iterations"] << ", valuations "
    << s["valuations"] << ", " << s["millis"] << " ms";
  return o.str();
}

void emit(const Config& c, const std::string& problem, const std::string& verdict,
          const std::optional<std::string>& document, const std::optional<std::string>& path,
          const Json& stats, const char* document_name) {
  if (c.format == "json") {
    Json j{{"problem", problem}, {"verdict", verdict}};
    j["counterexample"] = document ? Json(*document) : Json(nullptr);
    j["markedNodePath"] = path ? Json(*path) : Json(nullptr);
    j["stats"] = stats;
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::cout << verdict << "\n";
  if (document)
    std::cout << document_name << ": " << *document << "\n";
  if (path)
    std::cout << "marked: " << *path << "\n";
  if (c.stats)
    std::cout << stats_line(stats) << "\n";
}

int run_sat(const Config& c) {
  Formula f = parse_formula(c.formula);
  Verdict v = is_satisfiable(f, Alphabet::of(f), solver_options(c));
  std::optional<std::string> doc, path;
  if (v.satisfiable) {
    DecodedHedge h = decode_hedge(*v.witness, *v.satisfying_node);
    std::string xml;
    for (const auto& t : h.trees)
      xml += t.to_xml();
    doc = xml;
    // Top-level trees count as siblings under an implicit parent.
    const XmlDocument& t = h.trees[h.tree];
    std::size_t pos = 1;
    for (std::size_t i = 0; i < h.tree; ++i)
      pos += h.trees[i].name(0) == t.name(0);
    std::string p = t.path_of(h.node);
    path = "/" + t.name(0) + "[" + std::to_string(pos) + "]" + p.substr(p.find(']') + 1);
  }
  emit(c, "sat", v.satisfiable ? "satisfiable" : "unsatisfiable", doc, path, stats_json({v.stats}),
       "witness");
  return kHolds;
}

int run_problem(const Config& c, Problem p) {
  p.constraint = constraint(c);
  AnalysisResult r = analyze(p, solver_options(c));
  std::optional<std::string> doc, path;
  if (r.counterexample) {
    doc = r.counterexample->document.to_xml();
    path = r.counterexample->path;
  }
  emit(c, to_string(p.kind), r.holds ? "holds" : "fails", doc, path, stats_json(r.stats),
       p.kind == ProblemKind::Overlap ? "witness" : "counterexample");
  return r.holds ? kHolds : kFails;
}

Problem problem(ProblemKind k, std::vector<std::string> queries) {
  Problem p;
  p.kind = k;
  for (const auto& q : queries)
    p.queries.push_back(parse_xpath(q));
  return p;
}

int run_typecheck(const Config& c) {
  Problem p = problem(ProblemKind::Typecheck, {c.query});
  int given = !c.expected_labels.empty() + !c.expected_type.empty() + !c.expected_dtd.empty();
  if (given != 1)
    throw Error("give exactly one of --expected-labels, --expected-type, --expected-dtd");
  Expectation e;
  if (!c.expected_labels.empty())
    e.labels = split_labels(c.expected_labels);
  else if (!c.expected_type.empty())
    e.type = parse_type_defs(read_file(c.expected_type));
  else
    e.type = parse_dtd(read_file(c.expected_dtd),
                       c.expected_root.empty() ? std::nullopt : std::optional(c.expected_root));
  if (!c.expected_labels.empty() && e.labels.empty())
    throw Error("--expected-labels is empty");
  p.expected = std::move(e);
  return run_problem(c, std::move(p));
}

int run_bench(const Config& c) {
  Json rows = Json::array();
  bool ok = true;
  if (c.full) {
    auto results = acceptance::run_all([&](const acceptance::CriterionResult& r) {
      if (c.format == "text")
        std::cout << (r.passed ? "PASS" : "FAIL") << " " << r.id << " " << r.title << ": " << r.detail
                  << std::endl;
    });
    for (const auto& r : results) {
      ok = ok && r.passed;
      rows.push_back(Json{{"criterion", r.id}, {"title", r.title}, {"passed", r.passed},
                          {"detail", r.detail}, {"millis", static_cast<std::int64_t>(r.seconds * 1000)}});
    }
    if (c.format == "json")
      std::cout << Json{{"criteria", rows}}.dump(2) << "\n";
    return ok ? kHolds : kFails;
  }
  auto r = acceptance::check_performance([&](const std::string& name, double secs, bool holds) {
    rows.push_back(Json{{"problem", name}, {"verdict", holds ? "holds" : "fails"},
                        {"millis", static_cast<std::int64_t>(secs * 1000)}});
    if (c.format == "text")
      std::cout << (holds ? "holds " : "fails ") << std::fixed << std::setprecision(1) << secs * 1000
                << " ms  " << name << std::endl;
  });
  auto total = static_cast<std::int64_t>(r.seconds * 1000);
  if (c.format == "json")
    std::cout << Json{{"problems", rows}, {"totalMillis", total}, {"passed", r.passed}}.dump(2) << "\n";
  else
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.detail << "\n";
  return r.passed ? kHolds : kFails;
}

int run_gen(const Config& c) {
  std::vector<std::string> items;
  if (c.kind == "formulas") {
    for (Formula f : formula_corpus(c.seed, c.count))
      items.push_back(to_string(f));
  } else if (c.kind == "xpath") {
    for (const auto& e : xpath_corpus(c.seed, c.count))
      items.push_back(unparse(e));
  } else if (c.kind == "dtd") {
    for (const auto& t : dtd_corpus(c.seed, c.count))
      items.push_back(to_dtd(t));
  } else if (c.kind == "documents") {
    Rng rng(c.seed);
    auto t = constraint(c);
    while (items.size() < c.count) {
      if (!t) {
        items.push_back(random_document(rng, 10, {"a", "b"}).to_xml());
      } else {
        std::optional<XmlDocument> d;
        for (int attempt = 0; attempt < 1000 && !d; ++attempt)
          d = sample_document(rng, *t, 40);
        if (!d)
          throw Error("no valid document of at most 40 nodes found");
        items.push_back(d->to_xml());
      }
    }
  } else if (c.kind == "bench-dtd") {
    items.emplace_back(article_dtd_text());
  } else {
    throw Error("unknown corpus kind '" + c.kind + "'");
  }
  if (c.format == "json") {
    std::cout << Json(items).dump(2) << "\n";
  } else {
    for (const auto& s : items) {
      std::cout << s;
      if (s.empty() || s.back() != '\n')
        std::cout << "\n";
    }
  }
  return kHolds;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int fail(int code, const std::string& kind, const std::string& what) {
  std::cerr << "error: " << kind << ": " << one_line(what) << "\n";
  return code;
}

} // namespace

int main(int argc, char** argv) {
  Config c;
  CLI::App app{"Static analysis of XPath queries and regular tree types via a tree logic solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "treelogic 1.0");

  auto common = [&](CLI::App* s) {
    s->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    s->add_option("--time-limit", c.time_limit, "Solver time limit per satisfiability call, in seconds")
        ->check(CLI::PositiveNumber);
    s->add_option("--max-nodes", c.max_nodes, "Decision diagram node ceiling")->check(CLI::PositiveNumber);
    s->add_flag("--stats", c.stats, "Print solver statistics (always present in JSON)");
  };
  auto constrained = [&](CLI::App* s) {
    s->add_option("--dtd", c.dtd, "DTD file constraining the documents")->check(CLI::ExistingFile);
    s->add_option("--root", c.root, "Root element for --dtd (default: DOCTYPE name or first element)");
    s->add_option("--type", c.type, "Tree type file (text format) constraining the documents")
        ->check(CLI::ExistingFile);
  };

  auto* sat = app.add_subcommand("sat", "Satisfiability of a formula over finite binary trees");
  sat->add_option("--formula", c.formula, "Formula text")->required();
  common(sat);

  auto* empty = app.add_subcommand("empty", "Holds when the query selects nothing in every document");
  empty->add_option("--query", c.query, "XPath query")->required();
  common(empty);
  constrained(empty);

  auto two = [&](const char* name, const char* help) {
    auto* s = app.add_subcommand(name, help);
    s->add_option("--q1", c.q1, "First XPath query")->required();
    s->add_option("--q2", c.q2, "Second XPath query")->required();
    common(s);
    constrained(s);
    return s;
  };
  auto* contains = two("contains", "Holds when every node selected by q1 is selected by q2");
  auto* equiv = two("equiv", "Holds when q1 and q2 select the same nodes");
  auto* overlap = two("overlap", "Holds when q1 and q2 can select a common node");

  auto* covers = app.add_subcommand("covers", "Holds when every node selected by the query is selected by "
                                              "one of the covering queries");
  covers->add_option("--query", c.query, "Covered XPath query")->required();
  covers->add_option("--covering", c.covering, "Covering XPath query (repeatable)")->required();
  common(covers);
  constrained(covers);

  auto* typecheck = app.add_subcommand("typecheck", "Holds when every node the query selects satisfies the "
                                                    "expected annotation");
  typecheck->add_option("--query", c.query, "XPath query")->required();
  typecheck->add_option("--expected-labels", c.expected_labels, "Comma-separated labels the node must bear");
  typecheck->add_option("--expected-type", c.expected_type, "Tree type file (text format) for the node's subtree")
      ->check(CLI::ExistingFile);
  typecheck->add_option("--expected-dtd", c.expected_dtd, "DTD file for the node's subtree")
      ->check(CLI::ExistingFile);
  typecheck->add_option("--expected-root", c.expected_root, "Root element for --expected-dtd");
  common(typecheck);
  constrained(typecheck);

  auto* bench = app.add_subcommand("bench", "Run the performance suite (--full: every acceptance check)");
  bench->add_flag("--full", c.full, "Run all acceptance checks");
  bench->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  auto* gen = app.add_subcommand("gen", "Print a seeded random corpus");
  gen->add_option("--kind", c.kind, "formulas, xpath, dtd, documents or bench-dtd")
      ->check(CLI::IsMember({"formulas", "xpath", "dtd", "documents", "bench-dtd"}));
  gen->add_option("--seed", c.seed, "Corpus seed");
  gen->add_option("--count", c.count, "Number of items");
  gen->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"text", "json"}));
  constrained(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(kUsage, "usage", e.what());
  }

  try {
    if (*sat)
      return run_sat(c);
    if (*empty)
      return run_problem(c, problem(ProblemKind::Emptiness, {c.query}));
    if (*contains)
      return run_problem(c, problem(ProblemKind::Containment, {c.q1, c.q2}));
    if (*equiv)
      return run_problem(c, problem(ProblemKind::Equivalence, {c.q1, c.q2}));
    if (*overlap)
      return run_problem(c, problem(ProblemKind::Overlap, {c.q1, c.q2}));
    if (*covers) {
      std::vector<std::string> qs{c.query};
      qs.insert(qs.end(), c.covering.begin(), c.covering.end());
      return run_problem(c, problem(ProblemKind::Coverage, qs));
    }
    if (*typecheck)
      return run_typecheck(c);
    if (*bench)
      return run_bench(c);
    if (*gen)
      return run_gen(c);
  } catch (const SyntaxError& e) {
    return fail(kUsage, "syntax", e.what());
  } catch (const UnsupportedFeatureError& e) {
    return fail(kUsage, "unsupported", e.what());
  } catch (const NotCycleFreeError& e) {
    return fail(kUsage, "not-cycle-free", e.what());
  } catch (const ResourceLimitError& e) {
    return fail(kResource, "resource-limit", e.what());
  } catch (const InternalError& e) {
    return fail(kInternal, "internal", e.what());
  } catch (const Error& e) {
    return fail(kUsage, "input", e.what());
  } catch (const std::exception& e) {
    return fail(kInternal, "internal", e.what());
  }
  return fail(kUsage, "usage", "no subcommand");
}
