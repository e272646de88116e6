#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "dnnflab/assignments.hpp"

namespace dnnflab::detail {

// Interns variable sets. Circuits compiled from layered instances have many
// nodes sharing one support, so nodes store an id instead of a full set.
class SupportPool {
 public:
  using Id = std::uint32_t;

  SupportPool() { intern(VarSet{}); }

  Id intern(VarSet s) {
    const std::size_t h = boost::hash_range(s.begin(), s.end());
    auto [lo, hi] = index_.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (sets_[it->second] == s) return it->second;
    Id id = static_cast<Id>(sets_.size());
    sets_.push_back(std::move(s));
    index_.emplace(h, id);
    return id;
  }

  // Var(a) ∪ Var(b) ∪ {x} when x is given; memoized on the operand ids.
  Id unite(Id a, Id b, std::optional<Var> x = std::nullopt) {
    if (a > b) std::swap(a, b);
    const std::uint64_t xv = x ? static_cast<std::uint64_t>(*x) + 1 : 0;
    Key key{a, b, xv};
    auto it = unions_.find(key);
    if (it != unions_.end()) return it->second;
    VarSet s = a == b ? sets_[a] : set_union(sets_[a], sets_[b]);
    if (x && !set_contains(s, *x)) s.insert(std::lower_bound(s.begin(), s.end(), *x), *x);
    Id id = intern(std::move(s));
    unions_.emplace(key, id);
    return id;
  }

  const VarSet& get(Id id) const { return sets_[id]; }
  std::size_t size() const { return sets_.size(); }

  std::vector<VarSet> take_sets() {
    index_.clear();
    unions_.clear();
    return std::move(sets_);
  }

 private:
  struct Key {
    Id a, b;
    std::uint64_t x;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = 0;
      boost::hash_combine(h, k.a);
      boost::hash_combine(h, k.b);
      boost::hash_combine(h, k.x);
      return h;
    }
  };
  std::vector<VarSet> sets_;
  std::unordered_multimap<std::size_t, Id> index_;
  std::unordered_map<Key, Id, KeyHash> unions_;
};

}  // namespace dnnflab::detail
