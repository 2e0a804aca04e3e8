#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace bmcarpet {

// Disjoint sets with path halving and union by size.
class UnionFind {
 public:
  UnionFind() = default;
  explicit UnionFind(std::size_t n) { reset(n); }

  void reset(std::size_t n) {
    parent_.resize(n);
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    size_.assign(n, 1);
    sets_ = n;
  }

  std::uint32_t add() {
    const auto id = static_cast<std::uint32_t>(parent_.size());
    parent_.push_back(id);
    size_.push_back(1);
    ++sets_;
    return id;
  }

  std::uint32_t find(std::uint32_t x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns the surviving root, or the common root when already joined.
  // `merged` reports whether two distinct sets were joined.
  std::uint32_t unite(std::uint32_t a, std::uint32_t b, bool* merged = nullptr) noexcept {
    a = find(a);
    b = find(b);
    if (a == b) {
      if (merged) *merged = false;
      return a;
    }
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    --sets_;
    if (merged) *merged = true;
    return a;
  }

  std::size_t size() const noexcept { return parent_.size(); }
  std::size_t set_count() const noexcept { return sets_; }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
  std::size_t sets_ = 0;
};

}  // namespace bmcarpet
