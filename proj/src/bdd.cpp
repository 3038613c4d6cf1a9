#include "treelogic/bdd.hpp"

#include "treelogic/errors.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>
#include <utility>

namespace treelogic::bdd {

// ---------------------------------------------------------------------------
// Handles

Bdd::Bdd(Manager* m, std::uint32_t id) : mgr_(m), id_(id) {
  if (mgr_)
    mgr_->ref(id_);
}

Bdd::Bdd(const Bdd& other) : mgr_(other.mgr_), id_(other.id_) {
  if (mgr_)
    mgr_->ref(id_);
}

Bdd::Bdd(Bdd&& other) noexcept : mgr_(other.mgr_), id_(other.id_) {
  other.mgr_ = nullptr;
  other.id_ = 0;
}

Bdd& Bdd::operator=(const Bdd& other) {
  if (this != &other) {
    if (other.mgr_)
      other.mgr_->ref(other.id_);
    if (mgr_)
      mgr_->deref(id_);
    mgr_ = other.mgr_;
    id_ = other.id_;
  }
  return *this;
}

Bdd& Bdd::operator=(Bdd&& other) noexcept {
  if (this != &other) {
    if (mgr_)
      mgr_->deref(id_);
    mgr_ = other.mgr_;
    id_ = other.id_;
    other.mgr_ = nullptr;
    other.id_ = 0;
  }
  return *this;
}

Bdd::~Bdd() {
  if (mgr_)
    mgr_->deref(id_);
}

Bdd Bdd::operator&(const Bdd& o) const { return mgr_->apply_and(*this, o); }
Bdd Bdd::operator|(const Bdd& o) const { return mgr_->apply_or(*this, o); }
Bdd Bdd::operator^(const Bdd& o) const { return mgr_->apply_xor(*this, o); }
Bdd Bdd::operator!() const { return mgr_->negate(*this); }

// ---------------------------------------------------------------------------
// Node store

namespace {

enum Op : std::uint32_t {
  OpAnd = 1,
  OpOr,
  OpXor,
  OpNot,
  OpExists,
  OpAndExists,
  OpRestrict,
  OpRenameBase,
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n)
    p <<= 1;
  return p;
}

} // namespace

Manager::Manager(Var var_count, std::size_t max_nodes)
    : var_count_(var_count), max_nodes_(std::max<std::size_t>(max_nodes, 16)),
      gc_threshold_(std::min<std::size_t>(max_nodes_, std::size_t{1} << 18)) {
  nodes_.reserve(1024);
  nodes_.push_back({kTerminalVar, 0, 0, kNil});
  nodes_.push_back({kTerminalVar, 1, 1, kNil});
  refs_.assign(2, 0);
  resize_buckets(1024);
  cache_.resize(std::size_t{1} << 18);
}

std::size_t Manager::bucket_of(Var v, std::uint32_t low, std::uint32_t high) const {
  std::uint64_t h = v;
  h = h * 0x9e3779b97f4a7c15ULL + low;
  h = h * 0x9e3779b97f4a7c15ULL + high;
  h ^= h >> 29;
  return static_cast<std::size_t>(h) & (buckets_.size() - 1);
}

void Manager::resize_buckets(std::size_t n) {
  buckets_.assign(next_pow2(n), kNil);
  for (std::uint32_t i = 2; i < nodes_.size(); ++i) {
    Node& nd = nodes_[i];
    if (nd.var == kFreeVar)
      continue;
    std::size_t b = bucket_of(nd.var, nd.low, nd.high);
    nd.next = buckets_[b];
    buckets_[b] = i;
  }
}

std::uint32_t Manager::allocate() {
  if ((++alloc_tick_ & 0xfff) == 0 && deadline_ && std::chrono::steady_clock::now() > *deadline_)
    throw ResourceLimitError("time limit exceeded");
  if (free_head_ != kNil) {
    std::uint32_t id = free_head_;
    free_head_ = nodes_[id].next;
    --free_count_;
    return id;
  }
  if (nodes_.size() >= max_nodes_)
    throw ResourceLimitError("decision diagram node limit of " + std::to_string(max_nodes_) +
                             " exceeded");
  nodes_.push_back({kFreeVar, 0, 0, kNil});
  refs_.push_back(0);
  peak_ = std::max(peak_, nodes_.size());
  return static_cast<std::uint32_t>(nodes_.size() - 1);
}

std::uint32_t Manager::mk(Var v, std::uint32_t low, std::uint32_t high) {
  if (low == high)
    return low;
  std::size_t b = bucket_of(v, low, high);
  for (std::uint32_t i = buckets_[b]; i != kNil; i = nodes_[i].next) {
    const Node& nd = nodes_[i];
    if (nd.var == v && nd.low == low && nd.high == high)
      return i;
  }
  std::uint32_t id = allocate();
  if (live_nodes() > buckets_.size()) {
    nodes_[id] = {v, low, high, kNil};
    resize_buckets(buckets_.size() * 2);
    return id;
  }
  nodes_[id] = {v, low, high, buckets_[b]};
  buckets_[b] = id;
  return id;
}

void Manager::collect() {
  ++gc_runs_;
  std::vector<std::uint8_t> mark(nodes_.size(), 0);
  mark[0] = mark[1] = 1;
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 2; i < nodes_.size(); ++i)
    if (refs_[i] > 0 && nodes_[i].var != kFreeVar)
      stack.push_back(i);
  while (!stack.empty()) {
    std::uint32_t i = stack.back();
    stack.pop_back();
    if (mark[i])
      continue;
    mark[i] = 1;
    stack.push_back(nodes_[i].low);
    stack.push_back(nodes_[i].high);
  }
  free_head_ = kNil;
  free_count_ = 0;
  for (std::uint32_t i = static_cast<std::uint32_t>(nodes_.size()); i-- > 2;) {
    if (!mark[i]) {
      nodes_[i] = {kFreeVar, 0, 0, free_head_};
      free_head_ = i;
      ++free_count_;
    }
  }
  resize_buckets(buckets_.size());
  std::fill(cache_.begin(), cache_.end(), CacheEntry{});
}

void Manager::maybe_collect() {
  if (free_count_ > 0 || nodes_.size() < gc_threshold_)
    return;
  collect();
  if (live_nodes() * 2 > gc_threshold_)
    gc_threshold_ = std::min(max_nodes_, gc_threshold_ * 2);
  if (cache_.size() < gc_threshold_)
    cache_.resize(std::min<std::size_t>(next_pow2(gc_threshold_), std::size_t{1} << 21));
}

void Manager::check_owner(const Bdd& b) const {
  if (b.mgr_ != this)
    throw InternalError("decision diagram used with a foreign manager");
}

// ---------------------------------------------------------------------------
// Cache

std::size_t Manager::cache_slot(std::uint32_t op, std::uint32_t a, std::uint32_t b,
                                std::uint32_t c) const {
  std::uint64_t h = op;
  h = h * 0x9e3779b97f4a7c15ULL + a;
  h = h * 0x9e3779b97f4a7c15ULL + b;
  h = h * 0x9e3779b97f4a7c15ULL + c;
  h ^= h >> 31;
  return static_cast<std::size_t>(h) & (cache_.size() - 1);
}

bool Manager::cache_lookup(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                           std::uint32_t& out) const {
  const CacheEntry& e = cache_[cache_slot(op, a, b, c)];
  if (e.op == op && e.a == a && e.b == b && e.c == c) {
    out = e.result;
    return true;
  }
  return false;
}

void Manager::cache_store(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                          std::uint32_t result) {
  cache_[cache_slot(op, a, b, c)] = {op, a, b, c, result};
}

// ---------------------------------------------------------------------------
// Recursive operations. Node ids only; nodes_ may reallocate under mk().

std::uint32_t Manager::and_rec(std::uint32_t a, std::uint32_t b) {
  if (a == 0 || b == 0)
    return 0;
  if (a == 1)
    return b;
  if (b == 1 || a == b)
    return a;
  if (a > b)
    std::swap(a, b);
  std::uint32_t r;
  if (cache_lookup(OpAnd, a, b, 0, r))
    return r;
  Var va = top(a), vb = top(b);
  Var v = std::min(va, vb);
  std::uint32_t a0 = va == v ? nodes_[a].low : a, a1 = va == v ? nodes_[a].high : a;
  std::uint32_t b0 = vb == v ? nodes_[b].low : b, b1 = vb == v ? nodes_[b].high : b;
  std::uint32_t lo = and_rec(a0, b0);
  std::uint32_t hi = and_rec(a1, b1);
  r = mk(v, lo, hi);
  cache_store(OpAnd, a, b, 0, r);
  return r;
}

std::uint32_t Manager::or_rec(std::uint32_t a, std::uint32_t b) {
  if (a == 1 || b == 1)
    return 1;
  if (a == 0)
    return b;
  if (b == 0 || a == b)
    return a;
  if (a > b)
    std::swap(a, b);
  std::uint32_t r;
  if (cache_lookup(OpOr, a, b, 0, r))
    return r;
  Var va = top(a), vb = top(b);
  Var v = std::min(va, vb);
  std::uint32_t a0 = va == v ? nodes_[a].low : a, a1 = va == v ? nodes_[a].high : a;
  std::uint32_t b0 = vb == v ? nodes_[b].low : b, b1 = vb == v ? nodes_[b].high : b;
  std::uint32_t lo = or_rec(a0, b0);
  std::uint32_t hi = or_rec(a1, b1);
  r = mk(v, lo, hi);
  cache_store(OpOr, a, b, 0, r);
  return r;
}

std::uint32_t Manager::not_rec(std::uint32_t a) {
  if (a <= 1)
    return 1 - a;
  std::uint32_t r;
  if (cache_lookup(OpNot, a, 0, 0, r))
    return r;
  std::uint32_t lo = not_rec(nodes_[a].low);
  std::uint32_t hi = not_rec(nodes_[a].high);
  r = mk(top(a), lo, hi);
  cache_store(OpNot, a, 0, 0, r);
  return r;
}

std::uint32_t Manager::xor_rec(std::uint32_t a, std::uint32_t b) {
  if (a == b)
    return 0;
  if (a == 0)
    return b;
  if (b == 0)
    return a;
  if (a == 1)
    return not_rec(b);
  if (b == 1)
    return not_rec(a);
  if (a > b)
    std::swap(a, b);
  std::uint32_t r;
  if (cache_lookup(OpXor, a, b, 0, r))
    return r;
  Var va = top(a), vb = top(b);
  Var v = std::min(va, vb);
  std::uint32_t a0 = va == v ? nodes_[a].low : a, a1 = va == v ? nodes_[a].high : a;
  std::uint32_t b0 = vb == v ? nodes_[b].low : b, b1 = vb == v ? nodes_[b].high : b;
  std::uint32_t lo = xor_rec(a0, b0);
  std::uint32_t hi = xor_rec(a1, b1);
  r = mk(v, lo, hi);
  cache_store(OpXor, a, b, 0, r);
  return r;
}

std::uint32_t Manager::exists_rec(std::uint32_t f, std::uint32_t cube) {
  if (f <= 1)
    return f;
  Var v = top(f);
  while (cube > 1 && top(cube) < v)
    cube = nodes_[cube].high;
  if (cube == 1)
    return f;
  std::uint32_t r;
  if (cache_lookup(OpExists, f, cube, 0, r))
    return r;
  if (top(cube) == v) {
    std::uint32_t rest = nodes_[cube].high;
    std::uint32_t lo = exists_rec(nodes_[f].low, rest);
    r = lo == 1 ? 1 : or_rec(lo, exists_rec(nodes_[f].high, rest));
  } else {
    std::uint32_t lo = exists_rec(nodes_[f].low, cube);
    std::uint32_t hi = exists_rec(nodes_[f].high, cube);
    r = mk(v, lo, hi);
  }
  cache_store(OpExists, f, cube, 0, r);
  return r;
}

std::uint32_t Manager::and_exists_rec(std::uint32_t f, std::uint32_t g, std::uint32_t cube) {
  if (f == 0 || g == 0)
    return 0;
  if (f == 1 && g == 1)
    return 1;
  if (f == 1 || f == g)
    return exists_rec(g, cube);
  if (g == 1)
    return exists_rec(f, cube);
  if (f > g)
    std::swap(f, g);
  Var vf = top(f), vg = top(g);
  Var v = std::min(vf, vg);
  while (cube > 1 && top(cube) < v)
    cube = nodes_[cube].high;
  if (cube == 1)
    return and_rec(f, g);
  std::uint32_t r;
  if (cache_lookup(OpAndExists, f, g, cube, r))
    return r;
  std::uint32_t f0 = vf == v ? nodes_[f].low : f, f1 = vf == v ? nodes_[f].high : f;
  std::uint32_t g0 = vg == v ? nodes_[g].low : g, g1 = vg == v ? nodes_[g].high : g;
  if (top(cube) == v) {
    std::uint32_t rest = nodes_[cube].high;
    std::uint32_t lo = and_exists_rec(f0, g0, rest);
    r = lo == 1 ? 1 : or_rec(lo, and_exists_rec(f1, g1, rest));
  } else {
    std::uint32_t lo = and_exists_rec(f0, g0, cube);
    std::uint32_t hi = and_exists_rec(f1, g1, cube);
    r = mk(v, lo, hi);
  }
  cache_store(OpAndExists, f, g, cube, r);
  return r;
}

std::uint32_t Manager::rename_rec(std::uint32_t f, std::uint32_t renaming) {
  if (f <= 1)
    return f;
  std::uint32_t r;
  if (cache_lookup(OpRenameBase + renaming, f, 0, 0, r))
    return r;
  const auto& map = renamings_[renaming];
  Var v = map[top(f)];
  std::uint32_t lo = rename_rec(nodes_[f].low, renaming);
  std::uint32_t hi = rename_rec(nodes_[f].high, renaming);
  if ((lo > 1 && top(lo) <= v) || (hi > 1 && top(hi) <= v))
    throw InternalError("renaming does not preserve the variable order");
  r = mk(v, lo, hi);
  cache_store(OpRenameBase + renaming, f, 0, 0, r);
  return r;
}

std::uint32_t Manager::restrict_rec(std::uint32_t f, Var v, bool value) {
  if (f <= 1 || top(f) > v)
    return f;
  if (top(f) == v)
    return value ? nodes_[f].high : nodes_[f].low;
  std::uint32_t r;
  if (cache_lookup(OpRestrict, f, v, value, r))
    return r;
  std::uint32_t lo = restrict_rec(nodes_[f].low, v, value);
  std::uint32_t hi = restrict_rec(nodes_[f].high, v, value);
  r = mk(top(f), lo, hi);
  cache_store(OpRestrict, f, v, value, r);
  return r;
}

// ---------------------------------------------------------------------------
// Public operations

Bdd Manager::var(Var v) {
  if (v >= var_count_)
    throw InternalError("variable index out of range");
  maybe_collect();
  return Bdd(this, mk(v, 0, 1));
}

Bdd Manager::nvar(Var v) {
  if (v >= var_count_)
    throw InternalError("variable index out of range");
  maybe_collect();
  return Bdd(this, mk(v, 1, 0));
}

Bdd Manager::cube(std::span<const Var> vars) {
  std::vector<Var> sorted(vars.begin(), vars.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  maybe_collect();
  std::uint32_t r = 1;
  for (auto it = sorted.rbegin(); it != sorted.rend(); ++it)
    r = mk(*it, 0, r);
  return Bdd(this, r);
}

Bdd Manager::apply_and(const Bdd& a, const Bdd& b) {
  check_owner(a);
  check_owner(b);
  maybe_collect();
  return Bdd(this, and_rec(a.id_, b.id_));
}

Bdd Manager::apply_or(const Bdd& a, const Bdd& b) {
  check_owner(a);
  check_owner(b);
  maybe_collect();
  return Bdd(this, or_rec(a.id_, b.id_));
}

Bdd Manager::apply_xor(const Bdd& a, const Bdd& b) {
  check_owner(a);
  check_owner(b);
  maybe_collect();
  return Bdd(this, xor_rec(a.id_, b.id_));
}

Bdd Manager::negate(const Bdd& a) {
  check_owner(a);
  maybe_collect();
  return Bdd(this, not_rec(a.id_));
}

Bdd Manager::ite(const Bdd& f, const Bdd& g, const Bdd& h) {
  return apply_or(apply_and(f, g), apply_and(negate(f), h));
}

Bdd Manager::exists(const Bdd& f, const Bdd& cube) {
  check_owner(f);
  check_owner(cube);
  maybe_collect();
  return Bdd(this, exists_rec(f.id_, cube.id_));
}

Bdd Manager::and_exists(const Bdd& f, const Bdd& g, const Bdd& cube) {
  check_owner(f);
  check_owner(g);
  check_owner(cube);
  maybe_collect();
  return Bdd(this, and_exists_rec(f.id_, g.id_, cube.id_));
}

std::uint32_t Manager::add_renaming(std::vector<Var> map) {
  if (map.size() < var_count_) {
    Var start = static_cast<Var>(map.size());
    for (Var v = start; v < var_count_; ++v)
      map.push_back(v);
  }
  for (Var v : map)
    if (v >= var_count_)
      throw InternalError("renaming target out of range");
  renamings_.push_back(std::move(map));
  return static_cast<std::uint32_t>(renamings_.size() - 1);
}

Bdd Manager::rename(const Bdd& f, std::uint32_t renaming) {
  check_owner(f);
  if (renaming >= renamings_.size())
    throw InternalError("unknown renaming");
  maybe_collect();
  return Bdd(this, rename_rec(f.id_, renaming));
}

Bdd Manager::restrict(const Bdd& f, Var v, bool value) {
  check_owner(f);
  maybe_collect();
  return Bdd(this, restrict_rec(f.id_, v, value));
}

bool Manager::eval(const Bdd& f, const std::vector<bool>& assignment) const {
  check_owner(f);
  std::uint32_t n = f.id_;
  while (n > 1)
    n = assignment.at(nodes_[n].var) ? nodes_[n].high : nodes_[n].low;
  return n == 1;
}

std::optional<std::vector<bool>> Manager::sat_one(const Bdd& f, std::span<const Var> vars) const {
  check_owner(f);
  if (f.id_ == 0)
    return std::nullopt;
  std::vector<bool> out(vars.size(), false);
  std::uint32_t n = f.id_;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (n > 1 && top(n) < vars[i])
      throw InternalError("sat_one: support not covered by the variable list");
    if (n > 1 && top(n) == vars[i]) {
      if (nodes_[n].low != 0) {
        n = nodes_[n].low;
      } else {
        out[i] = true;
        n = nodes_[n].high;
      }
    }
  }
  if (n != 1)
    throw InternalError("sat_one: support not covered by the variable list");
  return out;
}

double Manager::sat_count(const Bdd& f, std::span<const Var> vars) const {
  check_owner(f);
  auto position = [&](std::uint32_t n) -> std::size_t {
    if (n <= 1)
      return vars.size();
    auto it = std::lower_bound(vars.begin(), vars.end(), top(n));
    if (it == vars.end() || *it != top(n))
      throw InternalError("sat_count: support not covered by the variable list");
    return static_cast<std::size_t>(it - vars.begin());
  };
  std::unordered_map<std::uint32_t, double> counts;
  // Post-order over the DAG.
  std::vector<std::pair<std::uint32_t, bool>> stack{{f.id_, false}};
  counts[0] = 0.0;
  counts[1] = 1.0;
  while (!stack.empty()) {
    auto [n, expanded] = stack.back();
    stack.pop_back();
    if (counts.count(n))
      continue;
    if (!expanded) {
      stack.push_back({n, true});
      stack.push_back({nodes_[n].low, false});
      stack.push_back({nodes_[n].high, false});
      continue;
    }
    std::size_t p = position(n);
    std::uint32_t lo = nodes_[n].low, hi = nodes_[n].high;
    double c = counts[lo] * std::ldexp(1.0, static_cast<int>(position(lo) - p - 1)) +
               counts[hi] * std::ldexp(1.0, static_cast<int>(position(hi) - p - 1));
    counts[n] = c;
  }
  return counts[f.id_] * std::ldexp(1.0, static_cast<int>(position(f.id_)));
}

std::vector<Manager::Var> Manager::support(const Bdd& f) const {
  check_owner(f);
  std::unordered_set<std::uint32_t> seen;
  std::vector<Var> vars;
  std::vector<std::uint32_t> stack{f.id_};
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    if (n <= 1 || !seen.insert(n).second)
      continue;
    vars.push_back(top(n));
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

std::size_t Manager::dag_size(const Bdd& f) const {
  check_owner(f);
  std::unordered_set<std::uint32_t> seen;
  std::vector<std::uint32_t> stack{f.id_};
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    if (!seen.insert(n).second || n <= 1)
      continue;
    stack.push_back(nodes_[n].low);
    stack.push_back(nodes_[n].high);
  }
  return seen.size();
}

} // namespace treelogic::bdd
