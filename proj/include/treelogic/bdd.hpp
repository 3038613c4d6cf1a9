#pragma once

// Reduced ordered binary decision diagrams with a shared unique table,
// a direct-mapped operation cache and mark-and-sweep collection driven by
// external reference counts. Variable order is the variable index order.
//
// A Manager is single-threaded. Distinct managers share nothing.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace treelogic::bdd {

class Manager;

// Reference-counted handle to a diagram node. Handles must not outlive their manager.
class Bdd {
public:
  Bdd() = default;
  Bdd(const Bdd& other);
  Bdd(Bdd&& other) noexcept;
  Bdd& operator=(const Bdd& other);
  Bdd& operator=(Bdd&& other) noexcept;
  ~Bdd();

  bool valid() const noexcept { return mgr_ != nullptr; }
  bool is_false() const noexcept { return id_ == 0; }
  bool is_true() const noexcept { return id_ == 1; }
  std::uint32_t id() const noexcept { return id_; }
  Manager* manager() const noexcept { return mgr_; }

  Bdd operator&(const Bdd& o) const;
  Bdd operator|(const Bdd& o) const;
  Bdd operator^(const Bdd& o) const;
  Bdd operator!() const;
  Bdd& operator&=(const Bdd& o) { return *this = *this & o; }
  Bdd& operator|=(const Bdd& o) { return *this = *this | o; }

  friend bool operator==(const Bdd& a, const Bdd& b) noexcept {
    return a.mgr_ == b.mgr_ && a.id_ == b.id_;
  }

private:
  friend class Manager;
  Bdd(Manager* m, std::uint32_t id);
  Manager* mgr_ = nullptr;
  std::uint32_t id_ = 0;
};

class Manager {
public:
  using Var = std::uint32_t;

  explicit Manager(Var var_count, std::size_t max_nodes = std::size_t{1} << 22);
  Manager(const Manager&) = delete;
  Manager& operator=(const Manager&) = delete;

  Var var_count() const noexcept { return var_count_; }

  Bdd zero() { return Bdd(this, 0); }
  Bdd one() { return Bdd(this, 1); }
  Bdd var(Var v);
  Bdd nvar(Var v);
  // Conjunction of the given positive variables.
  Bdd cube(std::span<const Var> vars);

  Bdd apply_and(const Bdd& a, const Bdd& b);
  Bdd apply_or(const Bdd& a, const Bdd& b);
  Bdd apply_xor(const Bdd& a, const Bdd& b);
  Bdd negate(const Bdd& a);
  Bdd ite(const Bdd& f, const Bdd& g, const Bdd& h);
  Bdd equiv(const Bdd& a, const Bdd& b) { return negate(apply_xor(a, b)); }

  Bdd exists(const Bdd& f, const Bdd& cube);
  // exists cube. (f & g), without building the conjunction.
  Bdd and_exists(const Bdd& f, const Bdd& g, const Bdd& cube);

  // Registers a variable renaming (map[v] is the new index of v). The map must
  // be strictly increasing on the support of every diagram it is applied to.
  std::uint32_t add_renaming(std::vector<Var> map);
  Bdd rename(const Bdd& f, std::uint32_t renaming);

  Bdd restrict(const Bdd& f, Var v, bool value);

  bool eval(const Bdd& f, const std::vector<bool>& assignment) const;
  // Least satisfying assignment of `vars` (sorted ascending) in the order where
  // false < true and earlier variables are more significant.
  std::optional<std::vector<bool>> sat_one(const Bdd& f, std::span<const Var> vars) const;
  // Number of satisfying assignments over `vars` (sorted ascending; must cover the support).
  double sat_count(const Bdd& f, std::span<const Var> vars) const;
  std::vector<Var> support(const Bdd& f) const;
  std::size_t dag_size(const Bdd& f) const;

  std::size_t live_nodes() const noexcept { return nodes_.size() - free_count_; }
  std::size_t peak_nodes() const noexcept { return peak_; }
  std::size_t gc_runs() const noexcept { return gc_runs_; }

  void set_deadline(std::optional<std::chrono::steady_clock::time_point> deadline) {
    deadline_ = deadline;
  }
  // Collects unreferenced nodes now.
  void collect();

private:
  friend class Bdd;

  struct Node {
    Var var;
    std::uint32_t low;
    std::uint32_t high;
    std::uint32_t next; // unique-table chain
  };

  struct CacheEntry {
    std::uint32_t op = 0;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    std::uint32_t c = 0;
    std::uint32_t result = 0;
  };

  static constexpr std::uint32_t kNil = 0xffffffffu;
  static constexpr Var kTerminalVar = 0xffffffffu;
  static constexpr Var kFreeVar = 0xfffffffeu;

  Var var_count_;
  std::size_t max_nodes_;
  std::size_t gc_threshold_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> refs_;
  std::vector<std::uint32_t> buckets_;
  std::uint32_t free_head_ = kNil;
  std::size_t free_count_ = 0;
  std::size_t peak_ = 2;
  std::size_t gc_runs_ = 0;
  std::size_t alloc_tick_ = 0;
  std::vector<CacheEntry> cache_;
  std::vector<std::vector<Var>> renamings_;
  std::optional<std::chrono::steady_clock::time_point> deadline_;

  void ref(std::uint32_t id) {
    if (id > 1)
      ++refs_[id];
  }
  void deref(std::uint32_t id) {
    if (id > 1)
      --refs_[id];
  }

  Var top(std::uint32_t id) const { return nodes_[id].var; }
  std::uint32_t mk(Var v, std::uint32_t low, std::uint32_t high);
  std::uint32_t allocate();
  void resize_buckets(std::size_t n);
  std::size_t bucket_of(Var v, std::uint32_t low, std::uint32_t high) const;
  void maybe_collect();
  void check_owner(const Bdd& b) const;

  std::size_t cache_slot(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c) const;
  bool cache_lookup(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                    std::uint32_t& out) const;
  void cache_store(std::uint32_t op, std::uint32_t a, std::uint32_t b, std::uint32_t c,
                   std::uint32_t result);

  std::uint32_t and_rec(std::uint32_t a, std::uint32_t b);
  std::uint32_t or_rec(std::uint32_t a, std::uint32_t b);
  std::uint32_t xor_rec(std::uint32_t a, std::uint32_t b);
  std::uint32_t not_rec(std::uint32_t a);
  std::uint32_t exists_rec(std::uint32_t f, std::uint32_t cube);
  std::uint32_t and_exists_rec(std::uint32_t f, std::uint32_t g, std::uint32_t cube);
  std::uint32_t rename_rec(std::uint32_t f, std::uint32_t renaming);
  std::uint32_t restrict_rec(std::uint32_t f, Var v, bool value);
};

} // namespace treelogic::bdd
