#pragma once

// CSV / JSON serialization of metric reports and the per-bit wear dump.

#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "wfpm/nvm.hpp"

namespace wfpm {

inline std::string format_fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline constexpr const char* kMetricsCsvHeader =
    "phase,nvm_writes,nvm_reads,set_bits,reset_bits,max_header_bit_flips,sim_time_ns,"
    "sim_energy_pj,cache_hits,cache_misses,silent_stores,read_requests,write_requests,"
    "sram_accesses";

inline std::string csv_fields(const Activity& a) {
  return std::to_string(a.nvm_writes) + ',' + std::to_string(a.nvm_reads) + ',' +
         std::to_string(a.set_bits) + ',' + std::to_string(a.reset_bits) + ',' +
         std::to_string(a.max_header_bit_flips) + ',' + format_fixed(a.sim_time_ns) + ',' +
         format_fixed(a.sim_energy_pj) + ',' + std::to_string(a.cache_hits) + ',' +
         std::to_string(a.cache_misses) + ',' + std::to_string(a.silent_stores) + ',' +
         std::to_string(a.read_requests) + ',' + std::to_string(a.write_requests) + ',' +
         std::to_string(a.sram_accesses);
}

// One row per phase followed by a "total" row.
inline void write_csv(std::ostream& out, const MetricsReport& r) {
  out << kMetricsCsvHeader << '\n';
  for (Phase p : kAllPhases) out << phase_name(p) << ',' << csv_fields(r.phase(p)) << '\n';
  out << "total," << csv_fields(r.total) << '\n';
}

inline nlohmann::ordered_json to_json(const Activity& a, std::string_view phase) {
  nlohmann::ordered_json j;
  j["phase"] = phase;
  j["nvm_writes"] = a.nvm_writes;
  j["nvm_reads"] = a.nvm_reads;
  j["set_bits"] = a.set_bits;
  j["reset_bits"] = a.reset_bits;
  j["max_header_bit_flips"] = a.max_header_bit_flips;
  j["sim_time_ns"] = a.sim_time_ns;
  j["sim_energy_pj"] = a.sim_energy_pj;
  j["cache_hits"] = a.cache_hits;
  j["cache_misses"] = a.cache_misses;
  j["silent_stores"] = a.silent_stores;
  j["read_requests"] = a.read_requests;
  j["write_requests"] = a.write_requests;
  j["sram_accesses"] = a.sram_accesses;
  return j;
}

inline nlohmann::ordered_json to_json(const MetricsReport& r) {
  nlohmann::ordered_json j;
  j["total"] = to_json(r.total, "total");
  j["phases"] = nlohmann::ordered_json::array();
  for (Phase p : kAllPhases) j["phases"].push_back(to_json(r.phase(p), phase_name(p)));
  j["max_header_payload_bit_flips"] = r.max_header_payload_bit_flips;
  j["max_header_metadata_bit_flips"] = r.max_header_metadata_bit_flips;
  j["total_bit_flips"] = r.total_bit_flips;
  return j;
}

// One line per watched 64-bit word: 64 comma-separated flip counts, bit 0 first.
inline void write_wear_map(std::ostream& out, const NvmModel& mem) {
  for (const auto& word : mem.wear_words()) {
    for (std::size_t b = 0; b < word.size(); ++b) out << (b ? "," : "") << word[b];
    out << '\n';
  }
}

}  // namespace wfpm
