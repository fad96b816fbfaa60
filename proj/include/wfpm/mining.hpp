#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "wfpm/dataset.hpp"
#include "wfpm/errors.hpp"
#include "wfpm/fptree.hpp"

namespace wfpm {

struct Pattern {
  std::vector<ItemId> items;  // ascending
  Count support = 0;

  bool operator==(const Pattern&) const = default;
};

// Ordered by itemset size, then lexicographically by item ids.
class PatternSet {
 public:
  PatternSet() = default;
  explicit PatternSet(std::vector<Pattern> patterns) : patterns_(std::move(patterns)) {
    for (Pattern& p : patterns_) std::sort(p.items.begin(), p.items.end());
    std::sort(patterns_.begin(), patterns_.end(), [](const Pattern& a, const Pattern& b) {
      if (a.items.size() != b.items.size()) return a.items.size() < b.items.size();
      return a.items < b.items;
    });
    auto dup = std::adjacent_find(patterns_.begin(), patterns_.end(),
                                  [](const Pattern& a, const Pattern& b) { return a.items == b.items; });
    if (dup != patterns_.end()) throw IntegrityError("duplicate itemset in pattern set");
  }

  const std::vector<Pattern>& patterns() const noexcept { return patterns_; }
  std::size_t size() const noexcept { return patterns_.size(); }
  bool empty() const noexcept { return patterns_.empty(); }
  auto begin() const { return patterns_.begin(); }
  auto end() const { return patterns_.end(); }

  const Pattern* find(const std::vector<ItemId>& sorted_items) const {
    for (const Pattern& p : patterns_)
      if (p.items == sorted_items) return &p;
    return nullptr;
  }

  // Every non-empty proper subset of every pattern is present as well.
  bool downward_closed() const {
    std::set<std::vector<ItemId>> present;
    for (const Pattern& p : patterns_) present.insert(p.items);
    for (const Pattern& p : patterns_) {
      if (p.items.size() < 2) continue;
      for (std::size_t drop = 0; drop < p.items.size(); ++drop) {
        std::vector<ItemId> sub;
        for (std::size_t i = 0; i < p.items.size(); ++i)
          if (i != drop) sub.push_back(p.items[i]);
        if (!present.contains(sub)) return false;
      }
    }
    return true;
  }

  bool operator==(const PatternSet&) const = default;

 private:
  std::vector<Pattern> patterns_;
};

// "item1 item2 ... (support)", one pattern per line.
inline void write_patterns(std::ostream& out, const PatternSet& ps) {
  for (const Pattern& p : ps) {
    for (ItemId i : p.items) out << i << ' ';
    out << '(' << p.support << ")\n";
  }
}

inline std::string to_string(const PatternSet& ps) {
  std::ostringstream out;
  write_patterns(out, ps);
  return out.str();
}

namespace detail {

struct WeightedPath {
  std::vector<ItemId> items;
  Count count = 0;
};

// Conditional FP-tree held in volatile scratch memory.
class ScratchTree {
 public:
  ScratchTree(const std::vector<WeightedPath>& base, Count min_support) {
    std::map<ItemId, Count> freq;
    for (const auto& p : base)
      for (ItemId i : p.items) freq[i] += p.count;
    for (const auto& [item, f] : freq)
      if (f >= min_support) order_.push_back({item, f});
    std::sort(order_.begin(), order_.end(), [](const HeaderEntry& a, const HeaderEntry& b) {
      return a.frequency != b.frequency ? a.frequency > b.frequency : a.item < b.item;
    });
    for (std::uint32_t r = 0; r < order_.size(); ++r) rank_[order_[r].item] = r;
    links_.resize(order_.size());
    nodes_.push_back(Node{});
    std::vector<std::uint32_t> ranks;
    for (const auto& p : base) {
      ranks.clear();
      for (ItemId i : p.items)
        if (auto it = rank_.find(i); it != rank_.end()) ranks.push_back(it->second);
      std::sort(ranks.begin(), ranks.end());
      std::size_t cur = 0;
      for (std::uint32_t r : ranks) {
        auto [it, inserted] = nodes_[cur].children.try_emplace(r, nodes_.size());
        if (inserted) {
          nodes_.push_back(Node{r, 0, cur, {}});
          links_[r].push_back(it->second);
        }
        cur = it->second;
        nodes_[cur].count += p.count;
        ++touched_;
      }
    }
  }

  const std::vector<HeaderEntry>& order() const noexcept { return order_; }
  std::uint64_t touched() const noexcept { return touched_; }

  std::vector<WeightedPath> conditional_base(std::uint32_t rank) const {
    std::vector<WeightedPath> out;
    for (std::size_t n : links_[rank]) {
      WeightedPath p{{}, nodes_[n].count};
      for (std::size_t up = nodes_[n].parent; up != 0; up = nodes_[up].parent)
        p.items.push_back(order_[nodes_[up].rank].item);
      if (!p.items.empty()) out.push_back(std::move(p));
    }
    return out;
  }

 private:
  struct Node {
    std::uint32_t rank = 0;
    Count count = 0;
    std::size_t parent = 0;
    std::map<std::uint32_t, std::size_t> children;
  };

  std::vector<HeaderEntry> order_;
  std::map<ItemId, std::uint32_t> rank_;
  std::vector<Node> nodes_;
  std::vector<std::vector<std::size_t>> links_;
  std::uint64_t touched_ = 0;
};

inline void grow(const std::vector<WeightedPath>& base, std::vector<ItemId>& prefix,
                 Count min_support, NvmModel& mem, std::vector<Pattern>& out) {
  if (base.empty()) return;
  ScratchTree tree(base, min_support);
  mem.charge_sram(tree.touched());
  for (std::uint32_t r = 0; r < tree.order().size(); ++r) {
    prefix.push_back(tree.order()[r].item);
    out.push_back(Pattern{prefix, tree.order()[r].frequency});
    grow(tree.conditional_base(r), prefix, min_support, mem, out);
    prefix.pop_back();
  }
}

}  // namespace detail

// FP-growth over a finalized tree. Main-tree node visits along node-links and
// parent chains are charged as NVM reads; conditional trees live in scratch SRAM.
inline PatternSet fp_growth(FpTree& tree, Count min_support) {
  if (min_support < 1) throw ConfigError("min_support must be >= 1");
  if (tree.policy().counting == CountingPolicy::lazy && !tree.finalized())
    throw IntegrityError("lazy counters must be finalized before mining");
  NvmModel& mem = tree.memory();
  const HeaderTable& header = tree.header();
  std::vector<Pattern> out;
  std::vector<ItemId> prefix;
  for (std::size_t rank = header.size(); rank-- > 0;) {
    const ItemId item = header[rank].item;
    std::vector<detail::WeightedPath> base;
    Count support = 0;
    for (Addr n = mem.load<Addr>(header.node_link_address(rank)); n != kNullAddr;) {
      const RawNode rec = tree.read_node(n);
      const Count count = tree.support_of(n).value_of(rec.counter);
      support += count;
      detail::WeightedPath path{{}, count};
      for (Addr up = rec.parent; up != tree.root();) {
        const RawNode anc = tree.read_node(up);
        path.items.push_back(static_cast<ItemId>(anc.item));
        up = anc.parent;
      }
      if (!path.items.empty()) base.push_back(std::move(path));
      n = rec.node_link;
    }
    if (support < min_support) continue;
    prefix.assign(1, item);
    out.push_back(Pattern{prefix, support});
    detail::grow(base, prefix, min_support, mem, out);
  }
  return PatternSet(std::move(out));
}

// Level-wise Apriori with full-scan counting; ground truth for small inputs.
// Runs outside the memory model.
inline PatternSet apriori_oracle(const Dataset& d, Count min_support) {
  constexpr std::size_t kMaxTransactions = 10'000;
  constexpr std::size_t kMaxFrequentItems = 64;
  if (min_support < 1) throw ConfigError("min_support must be >= 1");
  if (d.size() > kMaxTransactions)
    throw CapacityError("apriori oracle limited to " + std::to_string(kMaxTransactions) +
                        " transactions");
  const FrequencyMap freqs = scan_frequencies(d, min_support);
  if (freqs.size() > kMaxFrequentItems)
    throw CapacityError("apriori oracle limited to " + std::to_string(kMaxFrequentItems) +
                        " frequent items");
  std::vector<ItemId> items;
  for (const auto& kv : freqs) items.push_back(kv.first);

  std::vector<std::uint64_t> masks;
  masks.reserve(d.size());
  for (const Transaction& t : d.transactions) {
    std::uint64_t m = 0;
    for (std::size_t b = 0; b < items.size(); ++b)
      if (t.contains(items[b])) m |= std::uint64_t{1} << b;
    masks.push_back(m);
  }
  auto support_of = [&](std::uint64_t m) {
    Count s = 0;
    for (std::uint64_t t : masks) s += (t & m) == m;
    return s;
  };

  std::vector<Pattern> out;
  std::vector<std::vector<std::size_t>> level;  // frequent itemsets as ascending bit indexes
  for (std::size_t b = 0; b < items.size(); ++b) {
    level.push_back({b});
    out.push_back(Pattern{{items[b]}, freqs.at(items[b])});
  }
  while (!level.empty()) {
    std::set<std::vector<std::size_t>> known(level.begin(), level.end());
    std::vector<std::vector<std::size_t>> next;
    for (std::size_t i = 0; i < level.size(); ++i) {
      for (std::size_t j = i + 1; j < level.size(); ++j) {
        const auto& a = level[i];
        const auto& b = level[j];
        if (!std::equal(a.begin(), a.end() - 1, b.begin())) continue;
        std::vector<std::size_t> cand(a);
        cand.push_back(b.back());
        std::sort(cand.end() - 2, cand.end());
        bool pruned = false;
        for (std::size_t drop = 0; drop < cand.size() && !pruned; ++drop) {
          std::vector<std::size_t> sub;
          for (std::size_t k = 0; k < cand.size(); ++k)
            if (k != drop) sub.push_back(cand[k]);
          pruned = !known.contains(sub);
        }
        if (pruned) continue;
        std::uint64_t m = 0;
        for (std::size_t bit : cand) m |= std::uint64_t{1} << bit;
        const Count s = support_of(m);
        if (s < min_support) continue;
        Pattern p{{}, s};
        for (std::size_t bit : cand) p.items.push_back(items[bit]);
        out.push_back(std::move(p));
        next.push_back(std::move(cand));
      }
    }
    std::sort(next.begin(), next.end());
    level = std::move(next);
  }
  return PatternSet(std::move(out));
}

}  // namespace wfpm
