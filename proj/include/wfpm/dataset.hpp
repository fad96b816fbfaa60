#pragma once

// FIMI transaction files: one transaction per line, whitespace-separated
// non-negative integer item ids.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wfpm/errors.hpp"

namespace wfpm {

using ItemId = std::uint32_t;
using Count = std::uint64_t;

struct Transaction {
  std::uint64_t tid = 0;
  std::vector<ItemId> items;  // sorted ascending, no duplicates

  bool contains(ItemId item) const { return std::binary_search(items.begin(), items.end(), item); }
  bool operator==(const Transaction&) const = default;
};

struct Dataset {
  std::vector<Transaction> transactions;  // file order
  std::set<ItemId> item_universe;

  std::size_t size() const noexcept { return transactions.size(); }
  bool empty() const noexcept { return transactions.empty(); }
};

using FrequencyMap = std::map<ItemId, Count>;

// Builds a dataset from in-memory itemsets, collapsing duplicates. Empty itemsets are dropped.
inline Dataset make_dataset(const std::vector<std::vector<ItemId>>& rows) {
  Dataset d;
  for (const auto& row : rows) {
    std::vector<ItemId> items(row);
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    if (items.empty()) continue;
    d.item_universe.insert(items.begin(), items.end());
    d.transactions.push_back(Transaction{d.transactions.size(), std::move(items)});
  }
  return d;
}

inline Dataset parse_transactions(std::istream& in) {
  Dataset d;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<ItemId> items;
    std::string_view rest(line);
    while (!rest.empty()) {
      const auto start = rest.find_first_not_of(" \t\r\f\v");
      if (start == std::string_view::npos) break;
      rest.remove_prefix(start);
      const auto stop = std::min(rest.find_first_of(" \t\r\f\v"), rest.size());
      const std::string_view token = rest.substr(0, stop);
      ItemId id = 0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), id);
      if (ec != std::errc{} || ptr != token.data() + token.size())
        throw DatasetError("invalid item id '" + std::string(token) + "'", line_no);
      items.push_back(id);
      rest.remove_prefix(stop);
    }
    if (items.empty()) continue;
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    d.item_universe.insert(items.begin(), items.end());
    d.transactions.push_back(Transaction{d.transactions.size(), std::move(items)});
  }
  if (in.bad()) throw DatasetError("read failure");
  if (d.transactions.empty()) throw DatasetError("no transactions");
  return d;
}

inline Dataset load_transactions(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open '" + path + "'");
  return parse_transactions(in);
}

inline void write_transactions(std::ostream& out, const Dataset& d) {
  for (const Transaction& t : d.transactions) {
    for (std::size_t i = 0; i < t.items.size(); ++i) out << (i ? " " : "") << t.items[i];
    out << '\n';
  }
}

// First database scan: support of every item meeting min_support.
inline FrequencyMap scan_frequencies(const Dataset& d, Count min_support) {
  if (min_support < 1) throw ConfigError("min_support must be >= 1");
  FrequencyMap all;
  for (const Transaction& t : d.transactions)
    for (ItemId item : t.items) ++all[item];
  std::erase_if(all, [&](const auto& kv) { return kv.second < min_support; });
  return all;
}

}  // namespace wfpm
