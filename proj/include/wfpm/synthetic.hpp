#pragma once

// Deterministic synthetic transaction databases.
//
// The dense generators mimic categorical-attribute datasets (every transaction
// picks one value per attribute, item ids numbered consecutively from 1); the
// sparse generator draws basket items from a Zipf-like popularity curve.
// Values are derived from raw mt19937_64 output only, so files are identical
// across standard libraries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "wfpm/dataset.hpp"
#include "wfpm/errors.hpp"

namespace wfpm::synthetic {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
};

// Index drawn from an unnormalized weight vector.
inline std::size_t pick(Rng& rng, const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = rng.uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return weights.size() - 1;
}

// One value per attribute; value v of an attribute gets weight skew^v.
inline Dataset categorical(std::uint64_t seed, std::size_t transactions,
                           const std::vector<unsigned>& cardinalities, double skew_min,
                           double skew_max) {
  Rng rng(seed);
  std::vector<std::vector<double>> weights;
  for (unsigned card : cardinalities) {
    const double skew = skew_min + (skew_max - skew_min) * rng.uniform();
    std::vector<double> w(card);
    for (unsigned v = 0; v < card; ++v) w[v] = std::pow(skew, v);
    // Shuffle which value is dominant so popular ids are spread over the range.
    for (unsigned v = card; v > 1; --v) std::swap(w[v - 1], w[rng.below(v)]);
    weights.push_back(std::move(w));
  }
  std::vector<std::vector<ItemId>> rows(transactions);
  for (auto& row : rows) {
    ItemId base = 1;
    for (std::size_t a = 0; a < cardinalities.size(); ++a) {
      row.push_back(base + static_cast<ItemId>(pick(rng, weights[a])));
      base += cardinalities[a];
    }
  }
  return make_dataset(rows);
}

// 8124 transactions over 23 attributes and 119 items.
inline Dataset mushroom_like(std::uint64_t seed = 1) {
  const std::vector<unsigned> cards = {2, 6, 4, 10, 2, 9, 2, 2, 2, 12, 2, 5,
                                       4, 4, 9, 9, 1, 4, 3, 5, 9, 6, 7};
  return categorical(seed, 8124, cards, 0.15, 0.6);
}

// 3196 transactions over 37 attributes and 75 items, very dense.
inline Dataset chess_like(std::uint64_t seed = 2) {
  std::vector<unsigned> cards(36, 2);
  cards.push_back(3);
  return categorical(seed, 3196, cards, 0.02, 0.45);
}

// Sparse market baskets: Zipf(s) popularity over `items` ids, geometric basket sizes.
inline Dataset retail_like(std::uint64_t seed = 3, std::size_t transactions = 10'000,
                           std::size_t items = 16'470, double mean_length = 10.0,
                           double zipf_s = 1.05) {
  Rng rng(seed);
  std::vector<double> cdf(items);
  double total = 0.0;
  for (std::size_t i = 0; i < items; ++i) {
    total += 1.0 / std::pow(static_cast<double>(i + 1), zipf_s);
    cdf[i] = total;
  }
  // Popularity rank r maps to a scrambled id so frequent ids are not all small.
  std::vector<ItemId> id_of(items);
  for (std::size_t i = 0; i < items; ++i) id_of[i] = static_cast<ItemId>(i);
  for (std::size_t i = items; i > 1; --i) std::swap(id_of[i - 1], id_of[rng.below(i)]);
  const double p_stop = 1.0 / mean_length;
  std::vector<std::vector<ItemId>> rows(transactions);
  for (auto& row : rows) {
    do {
      const double u = rng.uniform() * total;
      const auto r = static_cast<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
      row.push_back(id_of[std::min(r, items - 1)]);
    } while (rng.uniform() >= p_stop && row.size() < 80);
  }
  return make_dataset(rows);
}

// Small uniform random database for oracle tests.
inline Dataset uniform(std::uint64_t seed, std::size_t transactions, ItemId items,
                       std::size_t max_length) {
  Rng rng(seed);
  std::vector<std::vector<ItemId>> rows(transactions);
  for (auto& row : rows) {
    const std::size_t len = 1 + rng.below(max_length);
    for (std::size_t i = 0; i < len; ++i) row.push_back(static_cast<ItemId>(rng.below(items)));
  }
  return make_dataset(rows);
}

inline Dataset by_name(std::string_view name, std::uint64_t seed) {
  if (name == "mushroom") return mushroom_like(seed);
  if (name == "chess") return chess_like(seed);
  if (name == "retail") return retail_like(seed);
  throw ConfigError("unknown synthetic dataset '" + std::string(name) + "'");
}

}  // namespace wfpm::synthetic
