#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace rclab {

// Disjoint-set forest with union by size and path halving. reset() keeps the
// allocation so one instance can be reused across many configurations.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n = 0) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    size_.assign(n, 1);
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    components_ = n;
  }

  void reset() { reset(parent_.size()); }

  std::uint32_t find(std::uint32_t x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns true when x and y were in different sets.
  bool unite(std::uint32_t x, std::uint32_t y) noexcept {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    if (size_[x] < size_[y]) std::swap(x, y);
    parent_[y] = x;
    size_[x] += size_[y];
    --components_;
    return true;
  }

  bool same(std::uint32_t x, std::uint32_t y) noexcept { return find(x) == find(y); }

  std::size_t components() const noexcept { return components_; }
  std::size_t size() const noexcept { return parent_.size(); }

  // Writes the root of every element into labels (resized to size()).
  void labels(std::vector<std::uint32_t>& out) {
    out.resize(parent_.size());
    for (std::uint32_t v = 0; v < parent_.size(); ++v) out[v] = find(v);
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::size_t components_ = 0;
};

}  // namespace rclab
