// wfpm: build FP-trees on the simulated NVM under chosen policies and report
// write/read activity, header wear, simulated time and energy.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wfpm/dataset.hpp"
#include "wfpm/errors.hpp"
#include "wfpm/experiment.hpp"
#include "wfpm/mining.hpp"
#include "wfpm/report_io.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataset = 2, kMismatch = 3 };

struct Options {
  std::string dataset;
  std::string min_support = "0.1";
  std::vector<std::string> presets;
  std::optional<std::string> counter, insertion, counting, walk, write_energy;
  std::optional<std::uint32_t> slide_period, buckets;
  std::optional<std::uint64_t> cache_kb;
  std::optional<std::uint32_t> assoc, line_bytes;
  bool mine = false;
  bool oracle = false;
  std::string format = "table";
  std::string out;
  std::string wear_map;
  std::string patterns_out;
  std::string config;
};

std::string scalar_text(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

// Fills options from a JSON config file; command-line flags given explicitly win.
void apply_config(const std::string& path, Options& o, const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw wfpm::ConfigError("cannot open config '" + path + "'");
  const nlohmann::json j = nlohmann::json::parse(in);
  auto unset = [&](const char* flag) { return app.count(flag) == 0; };
  if (j.contains("dataset") && unset("--dataset")) o.dataset = j["dataset"].get<std::string>();
  if (j.contains("min_support") && unset("--min-support")) o.min_support = scalar_text(j["min_support"]);
  if (j.contains("preset") && unset("--preset")) {
    if (j["preset"].is_array())
      o.presets = j["preset"].get<std::vector<std::string>>();
    else
      o.presets = {j["preset"].get<std::string>()};
  }
  auto opt_str = [&](const char* key, const char* flag, std::optional<std::string>& dst) {
    if (j.contains(key) && unset(flag)) dst = j[key].get<std::string>();
  };
  opt_str("counter", "--counter", o.counter);
  opt_str("insertion", "--insertion", o.insertion);
  opt_str("counting", "--counting", o.counting);
  opt_str("walk", "--walk", o.walk);
  opt_str("write_energy", "--write-energy", o.write_energy);
  if (j.contains("slide_period") && unset("--slide-period")) o.slide_period = j["slide_period"].get<std::uint32_t>();
  if (j.contains("buckets") && unset("--buckets")) o.buckets = j["buckets"].get<std::uint32_t>();
  if (j.contains("cache_kb") && unset("--cache-kb")) o.cache_kb = j["cache_kb"].get<std::uint64_t>();
  if (j.contains("assoc") && unset("--assoc")) o.assoc = j["assoc"].get<std::uint32_t>();
  if (j.contains("line_bytes") && unset("--line-bytes")) o.line_bytes = j["line_bytes"].get<std::uint32_t>();
  if (j.contains("mine") && unset("--mine")) o.mine = j["mine"].get<bool>();
  if (j.contains("oracle") && unset("--oracle")) o.oracle = j["oracle"].get<bool>();
  if (j.contains("format") && unset("--format")) o.format = j["format"].get<std::string>();
  if (j.contains("out") && unset("--out")) o.out = j["out"].get<std::string>();
}

wfpm::RunConfig make_config(const Options& o, const std::string& preset) {
  wfpm::RunConfig c;
  c.label = preset;
  c.dataset = o.dataset;
  c.min_support = wfpm::MinSupport::parse(o.min_support);
  c.policy = wfpm::preset_policy(preset);
  if (o.counter) c.policy.counter.variant = wfpm::parse_counter(*o.counter);
  if (o.slide_period) c.policy.counter.slide_period = *o.slide_period;
  if (o.insertion) c.policy.insertion = wfpm::parse_insertion(*o.insertion);
  if (o.counting) c.policy.counting = wfpm::parse_counting(*o.counting);
  if (o.walk) c.policy.child_index = wfpm::parse_walk(*o.walk);
  if (o.buckets) c.policy.bucket_count = *o.buckets;
  if (o.cache_kb) c.cache.capacity_bytes = *o.cache_kb * 1024;
  if (o.assoc) c.cache.associativity = *o.assoc;
  if (o.line_bytes) c.cache.line_bytes = *o.line_bytes;
  if (o.write_energy) {
    if (*o.write_energy == "per-bit")
      c.costs.write_energy = wfpm::WriteEnergyMode::per_bit;
    else if (*o.write_energy == "per-op")
      c.costs.write_energy = wfpm::WriteEnergyMode::per_op;
    else
      throw wfpm::ConfigError("unknown write-energy mode '" + *o.write_energy + "'");
  }
  c.mine = o.mine;
  c.oracle = o.oracle;
  if (o.counter || o.slide_period || o.insertion || o.counting || o.walk || o.buckets)
    c.label = preset + "*";
  c.validate();
  return c;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw wfpm::ConfigError("cannot write '" + path + "'");
  out << text;
}

int run(const Options& o) {
  if (o.dataset.empty()) throw wfpm::ConfigError("--dataset is required");
  if (o.format != "csv" && o.format != "json" && o.format != "table")
    throw wfpm::ConfigError("--format must be csv, json or table");
  const std::vector<std::string> presets = o.presets.empty() ? std::vector<std::string>{"wfpm"} : o.presets;
  std::vector<wfpm::RunConfig> configs;
  for (const auto& p : presets) configs.push_back(make_config(o, p));

  const wfpm::Dataset data = wfpm::load_transactions(o.dataset);
  std::ostringstream text;
  bool mismatch = false;

  if (configs.size() == 1) {
    const wfpm::RunConfig& cfg = configs.front();
    wfpm::ExperimentResult r = wfpm::run_experiment(cfg, data);
    if (o.format == "csv")
      wfpm::write_result_csv(text, r);
    else if (o.format == "json")
      text << wfpm::to_json(r).dump(2) << '\n';
    else
      wfpm::write_table(text, r);
    if (!o.patterns_out.empty() && r.patterns) emit(wfpm::to_string(*r.patterns), o.patterns_out);
    if (!o.wear_map.empty()) {
      // Rebuild on a fresh model to dump the header wear map.
      wfpm::NvmModel mem(cfg.costs, cfg.cache);
      wfpm::build_tree(data, r.min_support, cfg.policy, mem);
      std::ostringstream wear;
      wfpm::write_wear_map(wear, mem);
      emit(wear.str(), o.wear_map);
    }
    if (r.oracle_match) {
      mismatch = !*r.oracle_match;
      std::cerr << (mismatch ? "pattern mismatch against apriori oracle\n" : "patterns verified\n");
    }
  } else {
    wfpm::ComparisonTable t = wfpm::run_matrix(configs, data);
    if (o.format == "csv")
      wfpm::write_csv(text, t);
    else if (o.format == "json")
      text << wfpm::to_json(t).dump(2) << '\n';
    else
      wfpm::write_table(text, t);
    for (const auto& row : t.rows) {
      if (!row.result.oracle_match) continue;
      const bool ok = *row.result.oracle_match;
      mismatch |= !ok;
      std::cerr << row.result.label << ": "
                << (ok ? "patterns verified\n" : "pattern mismatch against apriori oracle\n");
    }
  }
  emit(text.str(), o.out);
  return mismatch ? kMismatch : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Frequent-pattern tree construction on simulated non-volatile memory"};
  Options o;
  app.add_option("--config", o.config, "JSON file with run settings");
  app.add_option("--dataset", o.dataset, "FIMI transaction file");
  app.add_option("--min-support", o.min_support, "absolute count (N) or fraction (0.xx)");
  app.add_option("--preset", o.presets, "classic | evfp | wfpm; repeat to compare")->expected(1, -1);
  app.add_option("--counter", o.counter, "regular | sliding");
  app.add_option("--slide-period", o.slide_period, "increments between window moves");
  app.add_option("--insertion", o.insertion, "sorted | copy-free");
  app.add_option("--counting", o.counting, "eager | lazy");
  app.add_option("--walk", o.walk, "linear | hash | sorted-hash");
  app.add_option("--buckets", o.buckets, "hash buckets per node");
  app.add_option("--cache-kb", o.cache_kb, "cache capacity in KiB");
  app.add_option("--assoc", o.assoc, "cache associativity");
  app.add_option("--line-bytes", o.line_bytes, "cache line size");
  app.add_option("--write-energy", o.write_energy, "per-bit | per-op");
  app.add_flag("--mine", o.mine, "run FP-growth after construction");
  app.add_flag("--oracle", o.oracle, "verify mined patterns against Apriori");
  app.add_option("--format", o.format, "csv | json | table");
  app.add_option("--out", o.out, "write the report here instead of stdout");
  app.add_option("--wear-map", o.wear_map, "dump per-bit header counter flips");
  app.add_option("--patterns-out", o.patterns_out, "write mined patterns");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  try {
    if (!o.config.empty()) apply_config(o.config, o, app);
    return run(o);
  } catch (const wfpm::DatasetError& e) {
    std::cerr << "dataset error: " << e.what() << '\n';
    return kDataset;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const wfpm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
