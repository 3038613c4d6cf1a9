#include "treelogic/bdd.hpp"
#include "treelogic/corpus.hpp"
#include "treelogic/errors.hpp"

#include <doctest.h>

#include <bitset>
#include <functional>
#include <ostream>

using namespace treelogic;
using bdd::Bdd;
using bdd::Manager;

namespace {

constexpr Manager::Var kVars = 6;
using Table = std::bitset<64>; // one bit per assignment of kVars variables

std::vector<bool> assignment(unsigned row) {
  std::vector<bool> a(kVars);
  for (Manager::Var v = 0; v < kVars; ++v)
    a[v] = (row >> v) & 1;
  return a;
}

Table table(Manager& m, const Bdd& f) {
  Table t;
  for (unsigned row = 0; row < 64; ++row)
    t[row] = m.eval(f, assignment(row));
  return t;
}

// Random function built from the operators, with its truth table.
std::pair<Bdd, Table> random_function(Manager& m, Rng& rng, int depth) {
  if (depth == 0 || rng.chance(25)) {
    auto v = static_cast<Manager::Var>(rng.below(kVars));
    Table t;
    for (unsigned row = 0; row < 64; ++row)
      t[row] = (row >> v) & 1;
    if (rng.chance(50))
      return {m.var(v), t};
    return {m.nvar(v), ~t};
  }
  auto [f, tf] = random_function(m, rng, depth - 1);
  auto [g, tg] = random_function(m, rng, depth - 1);
  switch (rng.below(4)) {
  case 0:
    return {f & g, tf & tg};
  case 1:
    return {f | g, tf | tg};
  case 2:
    return {f ^ g, tf ^ tg};
  default:
    return {!f, ~tf};
  }
}

Table exists_table(const Table& t, const std::vector<Manager::Var>& vars) {
  Table out = t;
  for (auto v : vars)
    for (unsigned row = 0; row < 64; ++row)
      if (out[row ^ (1u << v)])
        out[row] = true;
  return out;
}

} // namespace

TEST_CASE("terminals and literals") {
  Manager m(kVars);
  CHECK(m.zero().is_false());
  CHECK(m.one().is_true());
  CHECK((m.var(0) & m.nvar(0)).is_false());
  CHECK((m.var(0) | m.nvar(0)).is_true());
  CHECK(!m.var(3) == m.nvar(3));
  CHECK((m.var(1) & m.var(2)) == (m.var(2) & m.var(1)));
}

TEST_CASE("property: operators agree with truth tables and results are canonical") {
  Manager m(kVars);
  Rng rng(1);
  for (int i = 0; i < 300; ++i) {
    auto [f, tf] = random_function(m, rng, 5);
    auto [g, tg] = random_function(m, rng, 5);
    CHECK(table(m, f) == tf);
    CHECK(table(m, f & g) == (tf & tg));
    CHECK(table(m, m.ite(f, g, !g)) == ((tf & tg) | (~tf & ~tg)));
    CHECK(((tf == tg) == (f == g)));
    CHECK(m.sat_count(f, std::vector<Manager::Var>{0, 1, 2, 3, 4, 5}) == doctest::Approx(tf.count()));
  }
}

TEST_CASE("property: quantification and relational product") {
  Manager m(kVars);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    auto [f, tf] = random_function(m, rng, 5);
    auto [g, tg] = random_function(m, rng, 5);
    std::vector<Manager::Var> vars;
    for (Manager::Var v = 0; v < kVars; ++v)
      if (rng.chance(40))
        vars.push_back(v);
    Bdd cube = m.cube(vars);
    CHECK(table(m, m.exists(f, cube)) == exists_table(tf, vars));
    CHECK(m.and_exists(f, g, cube) == m.exists(f & g, cube));
  }
}

TEST_CASE("renaming, restriction, support, sat_one") {
  Manager m(4);
  auto r = m.add_renaming({1, 1, 3, 3}); // 0 -> 1, 2 -> 3
  Bdd f = m.var(0) & m.nvar(2);
  CHECK(m.rename(f, r) == (m.var(1) & m.nvar(3)));
  CHECK(m.restrict(f, 0, true) == m.nvar(2));
  CHECK(m.restrict(f, 0, false).is_false());
  CHECK(m.support(f) == std::vector<Manager::Var>{0, 2});
  auto a = m.sat_one(f | m.var(1), std::vector<Manager::Var>{0, 1, 2, 3});
  REQUIRE(a);
  CHECK(m.eval(f | m.var(1), *a));
  // Least assignment in the order where false comes first.
  CHECK(*a == std::vector<bool>{false, true, false, false});
  CHECK_FALSE(m.sat_one(m.zero(), std::vector<Manager::Var>{0}));
}

TEST_CASE("garbage collection keeps referenced diagrams") {
  Manager m(kVars, 1 << 16);
  Rng rng(3);
  auto [keep, t] = random_function(m, rng, 6);
  for (int i = 0; i < 2000; ++i)
    random_function(m, rng, 6);
  m.collect();
  CHECK(table(m, keep) == t);
  CHECK(m.live_nodes() <= m.dag_size(keep) + 2 + 2 * kVars);
}

TEST_CASE("node limit raises a resource error") {
  Manager m(24, 64);
  auto build = [&] {
    Bdd f = m.zero();
    for (Manager::Var v = 0; v + 1 < 24; v += 2)
      f = f ^ (m.var(v) & m.var(v + 1));
    return f;
  };
  CHECK_THROWS_AS(build(), ResourceLimitError);
}
