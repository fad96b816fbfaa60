#pragma once

// FP-tree construction over simulated NVM.
//
// Node records are fixed-size and 8-byte aligned:
//
//   +0   item id (kRootItem for the root)
//   +8   next sibling in the same child bucket
//   +16  support counter word
//   +24  parent
//   +32  next node carrying the same item (header node-link chain)
//   +40  child bucket heads, one 8-byte reference per bucket
//
// Header table layout: an entry array of {item, node-link head} pairs and a
// separate, wear-watched array of 64-bit frequency counters, both in rank
// order. Rank lookups and per-transaction membership bitmaps are volatile
// working state and are charged at SRAM cost.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wfpm/counter.hpp"
#include "wfpm/dataset.hpp"
#include "wfpm/errors.hpp"
#include "wfpm/nvm.hpp"

namespace wfpm {

enum class InsertionPolicy { sorted_baseline, copy_free };
enum class CountingPolicy { eager, lazy };
enum class ChildIndexKind { linear, hash_walk, sorted_hash_walk };

constexpr std::string_view to_string(InsertionPolicy p) {
  return p == InsertionPolicy::sorted_baseline ? "sorted" : "copy-free";
}
constexpr std::string_view to_string(CountingPolicy p) {
  return p == CountingPolicy::eager ? "eager" : "lazy";
}
constexpr std::string_view to_string(ChildIndexKind k) {
  switch (k) {
    case ChildIndexKind::linear: return "linear";
    case ChildIndexKind::hash_walk: return "hash";
    case ChildIndexKind::sorted_hash_walk: return "sorted-hash";
  }
  return "?";
}

struct BuildPolicy {
  InsertionPolicy insertion = InsertionPolicy::copy_free;
  CountingPolicy counting = CountingPolicy::lazy;
  CounterPolicy counter{};
  ChildIndexKind child_index = ChildIndexKind::sorted_hash_walk;
  std::uint32_t bucket_count = 8;

  // Linear child lists are a single bucket.
  std::uint32_t buckets() const noexcept {
    return child_index == ChildIndexKind::linear ? 1 : bucket_count;
  }

  void validate() const {
    counter.validate();
    if (bucket_count < 1) throw ConfigError("bucket_count must be >= 1");
  }
};

struct HeaderEntry {
  ItemId item = 0;
  Count frequency = 0;

  bool operator==(const HeaderEntry&) const = default;
};

// Items ordered by descending frequency, ties by ascending id.
class HeaderTable {
 public:
  static constexpr std::uint64_t kEntryBytes = 16;

  HeaderTable() = default;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<HeaderEntry>& entries() const noexcept { return entries_; }
  const HeaderEntry& operator[](std::size_t rank) const { return entries_.at(rank); }

  // Volatile lookup; callers charge the SRAM access.
  std::optional<std::uint32_t> rank_of(ItemId item) const {
    auto it = rank_.find(item);
    if (it == rank_.end()) return std::nullopt;
    return it->second;
  }

  Addr entry_address(std::size_t rank) const { return entries_region_.base + rank * kEntryBytes; }
  Addr node_link_address(std::size_t rank) const { return entry_address(rank) + 8; }
  CounterRef counter(std::size_t rank) const {
    return CounterRef(counters_region_.base + rank * 8, counter_policy_);
  }
  Region entries_region() const noexcept { return entries_region_; }
  Region counters_region() const noexcept { return counters_region_; }

  friend HeaderTable build_header(const FrequencyMap&, Count, const BuildPolicy&, NvmModel&);

 private:
  std::vector<HeaderEntry> entries_;
  std::unordered_map<ItemId, std::uint32_t> rank_;
  Region entries_region_;
  Region counters_region_;
  CounterPolicy counter_policy_;
};

// Lays out the header in NVM and counts every item up to its frequency through
// the counter policy, so header wear is modeled. The counter area is watched.
inline HeaderTable build_header(const FrequencyMap& freqs, Count min_support,
                                const BuildPolicy& policy, NvmModel& mem) {
  policy.validate();
  HeaderTable h;
  h.counter_policy_ = policy.counter;
  for (const auto& [item, freq] : freqs)
    if (freq >= min_support) h.entries_.push_back(HeaderEntry{item, freq});
  std::sort(h.entries_.begin(), h.entries_.end(), [](const HeaderEntry& a, const HeaderEntry& b) {
    return a.frequency != b.frequency ? a.frequency > b.frequency : a.item < b.item;
  });
  if (h.entries_.empty()) return h;

  h.entries_region_ = mem.alloc(h.entries_.size() * HeaderTable::kEntryBytes);
  h.counters_region_ = mem.alloc(h.entries_.size() * 8);
  mem.watch(h.counters_region_);
  for (std::uint32_t rank = 0; rank < h.entries_.size(); ++rank) {
    const HeaderEntry& e = h.entries_[rank];
    h.rank_.emplace(e.item, rank);
    mem.store<std::uint64_t>(h.entry_address(rank), e.item);
    CounterRef c = CounterRef::init(policy.counter, mem, h.counter(rank).address());
    for (Count i = 0; i < e.frequency; ++i) c.increment(mem);
  }
  return h;
}

struct LookupResult {
  Addr child = kNullAddr;
  std::uint64_t reads = 0;  // bucket-head read plus one per list hop
  // Where a new child for this item would be linked: the reference to overwrite
  // and the node the new child should point to.
  Addr link_slot = kNullAddr;
  Addr successor = kNullAddr;

  bool found() const noexcept { return child != kNullAddr; }
};

struct BuildStats {
  std::uint64_t transactions = 0;
  std::uint64_t lookups = 0;
  std::uint64_t lookup_reads = 0;
  std::uint64_t hits = 0;
  std::uint64_t hit_reads = 0;
  std::uint64_t header_scan_reads = 0;  // header entries read by copy-free ordering
  std::uint64_t scratch_write_requests = 0;

  double reads_per_hit() const {
    return hits == 0 ? 0.0 : static_cast<double>(hit_reads) / static_cast<double>(hits);
  }
};

struct RawNode {
  std::uint64_t item = 0;
  Addr sibling = kNullAddr;
  std::uint64_t counter = 0;
  Addr parent = kNullAddr;
  Addr node_link = kNullAddr;
};
static_assert(sizeof(RawNode) == 40);

class FpTree {
 public:
  static constexpr std::uint64_t kRootItem = UINT64_MAX;
  static constexpr std::uint64_t kSiblingOffset = 8;
  static constexpr std::uint64_t kCounterOffset = 16;
  static constexpr std::uint64_t kBucketOffset = sizeof(RawNode);

  FpTree(NvmModel& mem, BuildPolicy policy, HeaderTable header)
      : mem_(&mem), policy_(policy), header_(std::move(header)) {
    policy_.validate();
    root_ = mem_->alloc(node_bytes()).base;
    RawNode rec;
    rec.item = kRootItem;
    rec.counter = CounterRef(kNullAddr, policy_.counter).zero_word();
    mem_->store(root_, rec);
    nodes_ = 1;
  }

  NvmModel& memory() const noexcept { return *mem_; }
  const BuildPolicy& policy() const noexcept { return policy_; }
  const HeaderTable& header() const noexcept { return header_; }
  Addr root() const noexcept { return root_; }
  std::size_t node_count() const noexcept { return nodes_; }
  const BuildStats& stats() const noexcept { return stats_; }
  bool finalized() const noexcept { return finalized_; }

  std::uint64_t node_bytes() const noexcept { return kBucketOffset + 8ull * policy_.buckets(); }
  std::uint32_t bucket_of(ItemId item) const noexcept { return item % policy_.buckets(); }

  // Walks the bucket list for item. Sorted buckets stop at the first child that
  // ranks below item.
  LookupResult child_lookup(Addr node, ItemId item) {
    LookupResult r;
    r.link_slot = node + kBucketOffset + 8ull * bucket_of(item);
    Addr cur = mem_->load<Addr>(r.link_slot);
    r.reads = 1;
    const bool sorted = policy_.child_index == ChildIndexKind::sorted_hash_walk;
    const std::uint32_t target_rank = sorted ? rank_or_throw(item) : 0;
    while (cur != kNullAddr) {
      const auto link = mem_->load<std::array<std::uint64_t, 2>>(cur);  // item, sibling
      ++r.reads;
      if (link[0] == item) {
        r.child = cur;
        break;
      }
      if (sorted) {
        mem_->charge_sram();
        if (rank_or_throw(static_cast<ItemId>(link[0])) > target_rank) {
          r.successor = cur;
          break;
        }
      }
      r.link_slot = cur + kSiblingOffset;
      cur = link[1];
    }
    ++stats_.lookups;
    stats_.lookup_reads += r.reads;
    if (r.found()) {
      ++stats_.hits;
      stats_.hit_reads += r.reads;
    }
    return r;
  }

  // Links a new child for item under node. Hash walk appends to the bucket tail;
  // sorted hash walk keeps the bucket in rank order.
  Addr insert_child(Addr node, ItemId item) {
    LookupResult r = child_lookup(node, item);
    if (r.found()) throw IntegrityError("item " + std::to_string(item) + " is already a child");
    return create_child(node, item, r);
  }

  void insert_transaction(const Transaction& txn) {
    if (policy_.insertion == InsertionPolicy::sorted_baseline)
      insert_transaction_sorted(txn);
    else
      insert_transaction_copy_free(txn);
  }

  // Baseline: copy the frequent items into an NVM scratch buffer, insertion-sort
  // the buffer into header order, then insert the sorted copy.
  void insert_transaction_sorted(const Transaction& txn) {
    ++stats_.transactions;
    std::size_t n = 0;
    for (ItemId item : txn.items) {
      mem_->charge_sram();
      if (header_.rank_of(item)) ++n;
    }
    if (n == 0) return;
    ensure_scratch(n);
    std::size_t slot = 0;
    for (ItemId item : txn.items) {
      if (!header_.rank_of(item)) continue;
      mem_->store<std::uint64_t>(scratch_.base + 8 * slot++, item);
      ++stats_.scratch_write_requests;
    }
    for (std::size_t i = 1; i < n; ++i) {
      const auto key = mem_->load<std::uint64_t>(scratch_.base + 8 * i);
      mem_->charge_sram();
      const std::uint32_t key_rank = rank_or_throw(static_cast<ItemId>(key));
      std::size_t j = i;
      while (j > 0) {
        const auto prev = mem_->load<std::uint64_t>(scratch_.base + 8 * (j - 1));
        mem_->charge_sram();
        if (rank_or_throw(static_cast<ItemId>(prev)) <= key_rank) break;
        mem_->store<std::uint64_t>(scratch_.base + 8 * j, prev);
        ++stats_.scratch_write_requests;
        --j;
      }
      if (j != i) {
        mem_->store<std::uint64_t>(scratch_.base + 8 * j, key);
        ++stats_.scratch_write_requests;
      }
    }
    Addr cur = root_;
    for (std::size_t i = 0; i < n; ++i) {
      const auto item = static_cast<ItemId>(mem_->load<std::uint64_t>(scratch_.base + 8 * i));
      cur = step(cur, item);
    }
    if (policy_.counting == CountingPolicy::lazy) support_of(cur).increment(*mem_);
  }

  // Copy-free growth: the header, traversed in rank order, supplies the
  // insertion order, so the transaction is never copied into NVM.
  void insert_transaction_copy_free(const Transaction& txn) {
    ++stats_.transactions;
    std::size_t frequent = 0;
    for (ItemId item : txn.items) {
      mem_->charge_sram();  // rank lookup and bitmap mark
      if (header_.rank_of(item)) ++frequent;
    }
    if (frequent == 0) return;
    Addr cur = root_;
    std::size_t placed = 0;
    for (std::size_t rank = 0; rank < header_.size() && placed < frequent; ++rank) {
      const auto item = static_cast<ItemId>(mem_->load<std::uint64_t>(header_.entry_address(rank)));
      ++stats_.header_scan_reads;
      mem_->charge_sram();  // bitmap test
      if (!txn.contains(item)) continue;
      cur = step(cur, item);
      ++placed;
    }
    if (policy_.counting == CountingPolicy::lazy) support_of(cur).increment(*mem_);
  }

  // One depth-first pass: every node's support becomes its own count plus the
  // finalized supports of its children.
  void finalize_lazy_counters() {
    if (policy_.counting != CountingPolicy::lazy)
      throw ConfigError("finalization applies to lazy counting only");
    if (finalized_) throw IntegrityError("tree already finalized");
    struct Frame {
      Addr node;
      std::vector<Addr> children;
      std::size_t next = 0;
      Count child_sum = 0;
    };
    std::vector<Frame> stack;
    stack.push_back(Frame{root_, read_children(root_)});
    while (!stack.empty()) {
      Frame& top = stack.back();
      if (top.next < top.children.size()) {
        const Addr child = top.children[top.next++];
        stack.push_back(Frame{child, read_children(child)});
        continue;
      }
      const Addr node = top.node;
      const Count child_sum = top.child_sum;
      stack.pop_back();
      if (node == root_) break;
      CounterRef c = support_of(node);
      const std::uint64_t word = mem_->load<std::uint64_t>(c.address());
      const Count own = c.value_of(word);
      if (child_sum > 0) mem_->store<std::uint64_t>(c.address(), c.next_word(word, child_sum));
      stack.back().child_sum += own + child_sum;
    }
    finalized_ = true;
  }

  // Charged read of a node record.
  RawNode read_node(Addr node) { return mem_->load<RawNode>(node); }

  CounterRef support_of(Addr node) const {
    return CounterRef(node + kCounterOffset, policy_.counter);
  }

  // Uncharged inspection.
  RawNode peek_node(Addr node) const { return mem_->peek<RawNode>(node); }
  Count peek_support(Addr node) const { return support_of(node).value_of(peek_node(node).counter); }

  std::vector<Addr> peek_children(Addr node) const {
    std::vector<Addr> out;
    for (std::uint32_t b = 0; b < policy_.buckets(); ++b)
      for (Addr c = mem_->peek<Addr>(node + kBucketOffset + 8ull * b); c != kNullAddr;
           c = mem_->peek<Addr>(c + kSiblingOffset))
        out.push_back(c);
    return out;
  }

  std::vector<ItemId> peek_bucket_items(Addr node, std::uint32_t bucket) const {
    std::vector<ItemId> out;
    for (Addr c = mem_->peek<Addr>(node + kBucketOffset + 8ull * bucket); c != kNullAddr;
         c = mem_->peek<Addr>(c + kSiblingOffset))
      out.push_back(static_cast<ItemId>(mem_->peek<std::uint64_t>(c)));
    return out;
  }

  // Deterministic DFS, children in header order, one "depth item:support" line per node.
  // The root is not printed.
  std::string canonical() const {
    std::ostringstream out;
    std::vector<std::pair<Addr, int>> stack{{root_, 0}};
    while (!stack.empty()) {
      auto [node, depth] = stack.back();
      stack.pop_back();
      if (node != root_)
        out << depth << ' ' << peek_node(node).item << ':' << peek_support(node) << '\n';
      auto children = peek_children(node);
      std::sort(children.begin(), children.end(), [&](Addr a, Addr b) {
        return rank_or_throw(static_cast<ItemId>(peek_node(a).item)) >
               rank_or_throw(static_cast<ItemId>(peek_node(b).item));
      });
      for (Addr c : children) stack.emplace_back(c, depth + 1);
    }
    return out.str();
  }

 private:
  std::uint32_t rank_or_throw(ItemId item) const {
    auto r = header_.rank_of(item);
    if (!r) throw IntegrityError("item " + std::to_string(item) + " is not in the header");
    return *r;
  }

  // Descends one level, creating the child if absent. Eager counting bumps
  // existing nodes; new nodes start at 1 (eager) or 0 (lazy).
  Addr step(Addr node, ItemId item) {
    LookupResult r = child_lookup(node, item);
    if (!r.found()) return create_child(node, item, r);
    if (policy_.counting == CountingPolicy::eager) support_of(r.child).increment(*mem_);
    return r.child;
  }

  Addr create_child(Addr parent, ItemId item, const LookupResult& where) {
    const std::uint32_t rank = rank_or_throw(item);
    const Addr node = mem_->alloc(node_bytes()).base;
    const CounterRef c = support_of(node);
    RawNode rec;
    rec.item = item;
    rec.sibling = where.successor;
    rec.counter = policy_.counting == CountingPolicy::eager ? c.next_word(c.zero_word(), 1)
                                                            : c.zero_word();
    rec.parent = parent;
    rec.node_link = mem_->load<Addr>(header_.node_link_address(rank));
    mem_->store(node, rec);
    mem_->store<Addr>(header_.node_link_address(rank), node);
    mem_->store<Addr>(where.link_slot, node);
    ++nodes_;
    return node;
  }

  std::vector<Addr> read_children(Addr node) {
    std::vector<Addr> out;
    std::vector<Addr> heads(policy_.buckets());
    mem_->read(node + kBucketOffset, std::as_writable_bytes(std::span<Addr>(heads)));
    for (Addr c : heads)
      while (c != kNullAddr) {
        out.push_back(c);
        c = mem_->load<Addr>(c + kSiblingOffset);
      }
    return out;
  }

  void ensure_scratch(std::size_t slots) {
    if (scratch_.size >= slots * 8) return;
    scratch_ = mem_->alloc(std::max<std::uint64_t>(slots * 8, scratch_.size * 2));
  }

  NvmModel* mem_;
  BuildPolicy policy_;
  HeaderTable header_;
  Addr root_ = kNullAddr;
  std::size_t nodes_ = 0;
  Region scratch_;
  BuildStats stats_;
  bool finalized_ = false;
};

struct BuildResult {
  FpTree tree;
  MetricsReport metrics;
};

// Two database passes: frequency scan and header construction, then insertion
// of every transaction; lazy counters are finalized afterwards.
inline BuildResult build_tree(const Dataset& d, Count min_support, const BuildPolicy& policy,
                              NvmModel& mem) {
  mem.set_phase(Phase::scan1);
  HeaderTable header = build_header(scan_frequencies(d, min_support), min_support, policy, mem);
  mem.set_phase(Phase::build);
  FpTree tree(mem, policy, std::move(header));
  for (const Transaction& t : d.transactions) tree.insert_transaction(t);
  if (policy.counting == CountingPolicy::lazy) {
    mem.set_phase(Phase::finalize);
    tree.finalize_lazy_counters();
  }
  return BuildResult{std::move(tree), mem.report()};
}

}  // namespace wfpm
