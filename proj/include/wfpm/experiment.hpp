#pragma once

// Benchmark driver: run configurations, named presets and side-by-side comparisons.

#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wfpm/dataset.hpp"
#include "wfpm/errors.hpp"
#include "wfpm/fptree.hpp"
#include "wfpm/mining.hpp"
#include "wfpm/nvm.hpp"
#include "wfpm/report_io.hpp"

namespace wfpm {

// Absolute count, or a fraction of the transaction count rounded up.
struct MinSupport {
  double value = 1.0;
  bool fraction = false;

  static MinSupport parse(std::string_view text) {
    const std::string s(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("invalid min-support '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("invalid min-support '" + s + "'");
    MinSupport m{v, s.find_first_of(".eE") != std::string::npos};
    m.validate();
    return m;
  }

  void validate() const {
    if (fraction) {
      if (!(value > 0.0 && value <= 1.0)) throw ConfigError("fractional min-support must be in (0,1]");
    } else if (value < 1.0 || value != std::floor(value)) {
      throw ConfigError("absolute min-support must be an integer >= 1");
    }
  }

  Count resolve(std::size_t transactions) const {
    validate();
    if (!fraction) return static_cast<Count>(value);
    const double c = std::ceil(value * static_cast<double>(transactions) - 1e-9);
    return std::max<Count>(1, static_cast<Count>(c));
  }

  std::string str() const {
    return fraction ? format_fixed(value, 4) : std::to_string(static_cast<Count>(value));
  }

  bool operator==(const MinSupport&) const = default;
};

inline BuildPolicy preset_policy(std::string_view name) {
  BuildPolicy p;
  if (name == "classic") {
    p.insertion = InsertionPolicy::sorted_baseline;
    p.counting = CountingPolicy::eager;
    p.counter.variant = CounterVariant::regular;
    p.child_index = ChildIndexKind::linear;
  } else if (name == "evfp") {
    p.insertion = InsertionPolicy::sorted_baseline;
    p.counting = CountingPolicy::lazy;
    p.counter.variant = CounterVariant::regular;
    p.child_index = ChildIndexKind::hash_walk;
  } else if (name == "wfpm") {
    p.insertion = InsertionPolicy::copy_free;
    p.counting = CountingPolicy::lazy;
    p.counter.variant = CounterVariant::sliding;
    p.child_index = ChildIndexKind::sorted_hash_walk;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "'");
  }
  return p;
}

inline CounterVariant parse_counter(std::string_view s) {
  if (s == "regular") return CounterVariant::regular;
  if (s == "sliding") return CounterVariant::sliding;
  throw ConfigError("unknown counter '" + std::string(s) + "'");
}

inline InsertionPolicy parse_insertion(std::string_view s) {
  if (s == "sorted") return InsertionPolicy::sorted_baseline;
  if (s == "copy-free") return InsertionPolicy::copy_free;
  throw ConfigError("unknown insertion policy '" + std::string(s) + "'");
}

inline CountingPolicy parse_counting(std::string_view s) {
  if (s == "eager") return CountingPolicy::eager;
  if (s == "lazy") return CountingPolicy::lazy;
  throw ConfigError("unknown counting policy '" + std::string(s) + "'");
}

inline ChildIndexKind parse_walk(std::string_view s) {
  if (s == "linear") return ChildIndexKind::linear;
  if (s == "hash") return ChildIndexKind::hash_walk;
  if (s == "sorted-hash") return ChildIndexKind::sorted_hash_walk;
  throw ConfigError("unknown walk '" + std::string(s) + "'");
}

inline std::string describe(const BuildPolicy& p) {
  std::string s = std::string(to_string(p.insertion)) + '+' + std::string(to_string(p.counting)) +
                  '+' + std::string(to_string(p.counter.variant));
  if (p.counter.variant == CounterVariant::sliding)
    s += '/' + std::to_string(p.counter.slide_period);
  s += '+' + std::string(to_string(p.child_index));
  if (p.child_index != ChildIndexKind::linear) s += '/' + std::to_string(p.bucket_count);
  return s;
}

struct RunConfig {
  std::string label = "wfpm";
  std::string dataset;
  MinSupport min_support{0.1, true};
  BuildPolicy policy = preset_policy("wfpm");
  CacheConfig cache{};
  NvmCostParams costs{};
  bool mine = false;
  bool oracle = false;

  void validate() const {
    min_support.validate();
    policy.validate();
    cache.validate();
    costs.validate();
  }
};

struct ExperimentResult {
  std::string label;
  std::string policy;
  Count min_support = 0;
  std::size_t transactions = 0;
  std::size_t frequent_items = 0;
  std::size_t tree_nodes = 0;
  MetricsReport metrics;
  BuildStats stats;
  std::optional<PatternSet> patterns;
  std::optional<bool> oracle_match;
};

// scan -> build -> finalize -> optional mine, on a private memory model.
inline ExperimentResult run_experiment(const RunConfig& cfg, const Dataset& data) {
  cfg.validate();
  NvmModel mem(cfg.costs, cfg.cache);
  const Count min_support = cfg.min_support.resolve(data.size());
  BuildResult built = build_tree(data, min_support, cfg.policy, mem);
  ExperimentResult r;
  r.label = cfg.label;
  r.policy = describe(cfg.policy);
  r.min_support = min_support;
  r.transactions = data.size();
  r.frequent_items = built.tree.header().size();
  r.tree_nodes = built.tree.node_count();
  r.stats = built.tree.stats();
  if (cfg.mine || cfg.oracle) {
    mem.set_phase(Phase::mine);
    r.patterns = fp_growth(built.tree, min_support);
  }
  if (cfg.oracle) r.oracle_match = (*r.patterns == apriori_oracle(data, min_support));
  r.metrics = mem.report();
  return r;
}

inline ExperimentResult run_experiment(const RunConfig& cfg) {
  return run_experiment(cfg, load_transactions(cfg.dataset));
}

struct ComparisonRow {
  ExperimentResult result;
  // (baseline - candidate) / baseline against the first row.
  double write_reduction = 0.0;
  double read_reduction = 0.0;
  double max_flip_reduction = 0.0;
  double time_reduction = 0.0;
  double energy_reduction = 0.0;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;
};

inline double reduction(double baseline, double candidate) {
  return baseline == 0.0 ? 0.0 : (baseline - candidate) / baseline;
}

inline ComparisonTable run_matrix(const std::vector<RunConfig>& configs, const Dataset& data) {
  if (configs.size() < 2) throw ConfigError("a comparison needs at least two configurations");
  for (const RunConfig& c : configs)
    if (c.dataset != configs.front().dataset || !(c.min_support == configs.front().min_support))
      throw ConfigError("compared configurations must share dataset and min-support");
  ComparisonTable t;
  for (const RunConfig& c : configs) t.rows.push_back(ComparisonRow{run_experiment(c, data)});
  const Activity& base = t.rows.front().result.metrics.total;
  for (ComparisonRow& row : t.rows) {
    const Activity& a = row.result.metrics.total;
    row.write_reduction = reduction(double(base.nvm_writes), double(a.nvm_writes));
    row.read_reduction = reduction(double(base.nvm_reads), double(a.nvm_reads));
    row.max_flip_reduction =
        reduction(double(base.max_header_bit_flips), double(a.max_header_bit_flips));
    row.time_reduction = reduction(base.sim_time_ns, a.sim_time_ns);
    row.energy_reduction = reduction(base.sim_energy_pj, a.sim_energy_pj);
  }
  return t;
}

inline ComparisonTable run_matrix(const std::vector<RunConfig>& configs) {
  if (configs.empty()) throw ConfigError("a comparison needs at least two configurations");
  return run_matrix(configs, load_transactions(configs.front().dataset));
}

inline void write_result_csv(std::ostream& out, const ExperimentResult& r) {
  write_csv(out, r.metrics);
}

inline nlohmann::ordered_json to_json(const ExperimentResult& r) {
  nlohmann::ordered_json j;
  j["label"] = r.label;
  j["policy"] = r.policy;
  j["min_support"] = r.min_support;
  j["transactions"] = r.transactions;
  j["frequent_items"] = r.frequent_items;
  j["tree_nodes"] = r.tree_nodes;
  j["metrics"] = to_json(r.metrics);
  j["header_scan_reads"] = r.stats.header_scan_reads;
  j["lookups"] = r.stats.lookups;
  j["reads_per_hit"] = r.stats.reads_per_hit();
  if (r.patterns) j["patterns"] = r.patterns->size();
  if (r.oracle_match) j["oracle_match"] = *r.oracle_match;
  return j;
}

inline constexpr const char* kComparisonCsvHeader =
    "config,policy,nvm_writes,nvm_reads,set_bits,reset_bits,max_header_bit_flips,sim_time_ns,"
    "sim_energy_pj,cache_hits,cache_misses,write_reduction,read_reduction,"
    "max_flip_reduction,time_reduction,energy_reduction";

inline void write_csv(std::ostream& out, const ComparisonTable& t) {
  out << kComparisonCsvHeader << '\n';
  for (const ComparisonRow& row : t.rows) {
    const Activity& a = row.result.metrics.total;
    out << row.result.label << ',' << row.result.policy << ',' << a.nvm_writes << ','
        << a.nvm_reads << ',' << a.set_bits << ',' << a.reset_bits << ','
        << a.max_header_bit_flips << ',' << format_fixed(a.sim_time_ns) << ','
        << format_fixed(a.sim_energy_pj) << ',' << a.cache_hits << ',' << a.cache_misses << ','
        << format_fixed(row.write_reduction, 4) << ',' << format_fixed(row.read_reduction, 4)
        << ',' << format_fixed(row.max_flip_reduction, 4) << ','
        << format_fixed(row.time_reduction, 4) << ',' << format_fixed(row.energy_reduction, 4)
        << '\n';
  }
}

inline nlohmann::ordered_json to_json(const ComparisonTable& t) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const ComparisonRow& row : t.rows) {
    nlohmann::ordered_json r = to_json(row.result);
    r["write_reduction"] = row.write_reduction;
    r["read_reduction"] = row.read_reduction;
    r["max_flip_reduction"] = row.max_flip_reduction;
    r["time_reduction"] = row.time_reduction;
    r["energy_reduction"] = row.energy_reduction;
    j.push_back(std::move(r));
  }
  return j;
}

namespace detail {
inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.insert(0, w - s.size(), ' ');
  return s;
}
inline std::string percent(double v) { return format_fixed(100.0 * v, 1) + "%"; }
}  // namespace detail

inline void write_table(std::ostream& out, const ComparisonTable& t) {
  using detail::pad;
  using detail::percent;
  out << pad("config", 10) << pad("writes", 12) << pad("reads", 12) << pad("max flips", 11)
      << pad("time (ms)", 12) << pad("energy (uJ)", 13) << pad("d.writes", 10)
      << pad("d.reads", 10) << pad("d.flips", 10) << pad("d.time", 10) << pad("d.energy", 10)
      << '\n';
  for (const ComparisonRow& row : t.rows) {
    const Activity& a = row.result.metrics.total;
    out << pad(row.result.label, 10) << pad(std::to_string(a.nvm_writes), 12)
        << pad(std::to_string(a.nvm_reads), 12) << pad(std::to_string(a.max_header_bit_flips), 11)
        << pad(format_fixed(a.sim_time_ns / 1e6, 3), 12)
        << pad(format_fixed(a.sim_energy_pj / 1e6, 3), 13) << pad(percent(row.write_reduction), 10)
        << pad(percent(row.read_reduction), 10) << pad(percent(row.max_flip_reduction), 10)
        << pad(percent(row.time_reduction), 10) << pad(percent(row.energy_reduction), 10) << '\n';
  }
}

inline void write_table(std::ostream& out, const ExperimentResult& r) {
  out << "config      " << r.label << " (" << r.policy << ")\n"
      << "dataset     " << r.transactions << " transactions, min-support " << r.min_support
      << ", " << r.frequent_items << " frequent items, " << r.tree_nodes << " nodes\n";
  out << detail::pad("phase", 9) << detail::pad("writes", 12) << detail::pad("reads", 12)
      << detail::pad("set", 12) << detail::pad("reset", 12) << detail::pad("max flips", 11)
      << detail::pad("time (ns)", 18) << detail::pad("energy (pJ)", 18) << '\n';
  auto line = [&](std::string_view name, const Activity& a) {
    out << detail::pad(std::string(name), 9) << detail::pad(std::to_string(a.nvm_writes), 12)
        << detail::pad(std::to_string(a.nvm_reads), 12) << detail::pad(std::to_string(a.set_bits), 12)
        << detail::pad(std::to_string(a.reset_bits), 12)
        << detail::pad(std::to_string(a.max_header_bit_flips), 11)
        << detail::pad(format_fixed(a.sim_time_ns), 18)
        << detail::pad(format_fixed(a.sim_energy_pj), 18) << '\n';
  };
  for (Phase p : kAllPhases) line(phase_name(p), r.metrics.phase(p));
  line("total", r.metrics.total);
  out << "header counter max flips: payload " << r.metrics.max_header_payload_bit_flips
      << ", metadata " << r.metrics.max_header_metadata_bit_flips << '\n'
      << "header scan reads: " << r.stats.header_scan_reads << '\n'
      << "child lookups: " << r.stats.lookups << ", reads per hit "
      << format_fixed(r.stats.reads_per_hit(), 3) << '\n';
  if (r.patterns) out << "patterns: " << r.patterns->size() << '\n';
}

}  // namespace wfpm
