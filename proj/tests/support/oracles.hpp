#pragma once

// Test-only reference models, written independently of the library code paths
// they check.

#include <algorithm>
#include <array>
#include <cstdint>
#include <list>
#include <map>
#include <set>
#include <vector>

#include "wfpm/dataset.hpp"
#include "wfpm/mining.hpp"
#include "wfpm/nvm.hpp"

namespace wfpm::testing {

// Sliding counter as an explicit array of 15 nibbles plus a logical-nibble -> block map.
// The slide schedule is replayed literally: every period-th increment moves each
// live nibble one block in the current direction; at a border the window's blocks
// are swapped end-for-end and the direction flips.
class NibbleArrayCounter {
 public:
  explicit NibbleArrayCounter(std::uint32_t period) : period_(period) {
    for (unsigned k = 0; k < 8; ++k) slot_[k] = k;
  }

  void increment() {
    ++count_;
    if (count_ % period_ == 0) move();
    for (unsigned k = 0; k < 8; ++k) blocks_[slot_[k]] = static_cast<unsigned>((count_ >> (4 * k)) & 0xF);
  }

  std::uint64_t count() const { return count_; }
  unsigned low() const { return *std::min_element(slot_.begin(), slot_.end()); }
  bool toward_higher() const { return toward_higher_; }

  std::uint64_t word() const {
    std::uint64_t w = 0;
    for (unsigned s = 0; s < 15; ++s) w |= std::uint64_t{blocks_[s]} << (4 * s);
    w |= std::uint64_t{low()} << 60;
    if (toward_higher_) w |= std::uint64_t{1} << 63;
    return w;
  }

 private:
  void move() {
    const unsigned lo = low();
    const unsigned hi = lo + 7;
    if (toward_higher_ ? hi == 14 : lo == 0) {
      for (unsigned i = 0; i < 4; ++i) std::swap(blocks_[lo + i], blocks_[hi - i]);
      for (auto& s : slot_) s = lo + hi - s;
      toward_higher_ = !toward_higher_;
      return;
    }
    std::array<unsigned, 15> next{};
    for (unsigned k = 0; k < 8; ++k) {
      const unsigned to = toward_higher_ ? slot_[k] + 1 : slot_[k] - 1;
      next[to] = blocks_[slot_[k]];
      slot_[k] = to;
    }
    blocks_ = next;
  }

  std::uint32_t period_;
  std::uint64_t count_ = 0;
  bool toward_higher_ = true;
  std::array<unsigned, 15> blocks_{};
  std::array<unsigned, 8> slot_{};
};

// Per-set recency lists; front = most recently used.
class ReferenceLru {
 public:
  ReferenceLru(std::uint64_t sets, std::uint32_t ways, std::uint32_t line)
      : sets_(sets), ways_(ways), line_(line), lists_(sets) {}

  bool access(std::uint64_t addr) {
    const std::uint64_t tag = addr / line_;
    auto& l = lists_[tag % sets_];
    auto it = std::find(l.begin(), l.end(), tag);
    const bool hit = it != l.end();
    if (hit) l.erase(it);
    l.push_front(tag);
    if (l.size() > ways_) l.pop_back();
    return hit;
  }

 private:
  std::uint64_t sets_;
  std::uint32_t ways_;
  std::uint32_t line_;
  std::vector<std::list<std::uint64_t>> lists_;
};

// Item counts by direct linear scan.
inline std::map<ItemId, Count> brute_force_counts(const Dataset& d, Count min_support) {
  std::map<ItemId, Count> out;
  for (ItemId item : d.item_universe) {
    Count c = 0;
    for (const Transaction& t : d.transactions)
      c += std::count(t.items.begin(), t.items.end(), item) > 0 ? 1 : 0;
    if (c >= min_support) out[item] = c;
  }
  return out;
}

// Frequent itemsets by enumerating every subset of every transaction's frequent items.
inline PatternSet powerset_oracle(const Dataset& d, Count min_support) {
  std::map<std::vector<ItemId>, Count> counts;
  for (const Transaction& t : d.transactions) {
    const std::size_t n = t.items.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<ItemId> s;
      for (std::size_t b = 0; b < n; ++b)
        if (mask & (std::uint64_t{1} << b)) s.push_back(t.items[b]);
      ++counts[s];
    }
  }
  std::vector<Pattern> out;
  for (auto& [items, c] : counts)
    if (c >= min_support) out.push_back(Pattern{items, c});
  return PatternSet(std::move(out));
}

// Support of a root path = transactions whose frequent items, in header order,
// start with that path.
inline std::map<std::vector<ItemId>, Count> prefix_supports(const Dataset& d,
                                                            const std::vector<HeaderEntry>& order) {
  std::map<ItemId, std::size_t> rank;
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r].item] = r;
  std::map<std::vector<ItemId>, Count> out;
  for (const Transaction& t : d.transactions) {
    std::vector<ItemId> f;
    for (ItemId i : t.items)
      if (rank.contains(i)) f.push_back(i);
    std::sort(f.begin(), f.end(), [&](ItemId a, ItemId b) { return rank[a] < rank[b]; });
    for (std::size_t len = 1; len <= f.size(); ++len)
      ++out[std::vector<ItemId>(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(len))];
  }
  return out;
}

}  // namespace wfpm::testing
