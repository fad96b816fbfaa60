#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include "support/oracles.hpp"
#include "wfpm/errors.hpp"
#include "wfpm/nvm.hpp"
#include "wfpm/report_io.hpp"

namespace wfpm {
namespace {

TEST(NvmAlloc, ZeroFilledAndDisjoint) {
  NvmModel mem;
  const Region a = mem.alloc(64);
  const Region b = mem.alloc(64);
  EXPECT_EQ(a.size, 64u);
  EXPECT_TRUE(a.end() <= b.base || b.end() <= a.base);
  for (Addr p = a.base; p < a.end(); p += 8) EXPECT_EQ(mem.peek<std::uint64_t>(p), 0u);
  EXPECT_EQ(mem.report(), MetricsReport{});
}

TEST(NvmAlloc, RejectsEmptyAndExhaustion) {
  NvmModel mem(NvmCostParams{}, CacheConfig{}, 1024);
  EXPECT_THROW(mem.alloc(0), ConfigError);
  EXPECT_THROW(mem.alloc(4096), CapacityError);
}

TEST(NvmAccess, OutOfBoundsIsIntegrityError) {
  NvmModel mem;
  const Region r = mem.alloc(16);
  EXPECT_THROW(mem.load<std::uint64_t>(r.base + 12), IntegrityError);
  EXPECT_THROW(mem.store<std::uint64_t>(r.end(), 1), IntegrityError);
  EXPECT_THROW(mem.load<std::uint8_t>(kNullAddr), IntegrityError);
}

TEST(NvmRead, ColdMissThenHit) {
  NvmModel mem;
  const Region r = mem.alloc(64);
  mem.load<std::uint64_t>(r.base);
  MetricsReport rep = mem.report();
  EXPECT_EQ(rep.total.nvm_reads, 1u);
  EXPECT_EQ(rep.total.cache_misses, 1u);
  EXPECT_DOUBLE_EQ(rep.total.sim_time_ns, 6.82);
  EXPECT_DOUBLE_EQ(rep.total.sim_energy_pj, 64.0);

  mem.load<std::uint64_t>(r.base);
  rep = mem.report();
  EXPECT_EQ(rep.total.cache_hits, 1u);
  EXPECT_EQ(rep.total.nvm_reads, 1u);
  EXPECT_DOUBLE_EQ(rep.total.sim_time_ns, 6.82 + 1.41);
  EXPECT_DOUBLE_EQ(rep.total.sim_energy_pj, 64.0);
}

TEST(NvmRead, SpanningTwoLinesMissesTwice) {
  NvmModel mem;
  const Region r = mem.alloc(256);
  const Addr line_start = (r.base + 63) / 64 * 64;
  std::array<std::byte, 16> buf{};
  mem.read(line_start + 56, buf);
  EXPECT_EQ(mem.report().total.cache_misses, 2u);
  EXPECT_EQ(mem.report().total.read_requests, 1u);
}

TEST(NvmWrite, SetBitsCostSetLatency) {
  NvmModel mem;
  const Region r = mem.alloc(8);
  mem.store<std::uint8_t>(r.base, 0x05);
  const Activity a = mem.report().total;
  EXPECT_EQ(a.set_bits, 2u);
  EXPECT_EQ(a.reset_bits, 0u);
  EXPECT_EQ(a.nvm_writes, 1u);
  EXPECT_DOUBLE_EQ(a.sim_time_ns, 152.20);
  EXPECT_DOUBLE_EQ(a.sim_energy_pj, 140.0);
}

TEST(NvmWrite, ResetOnlyCostsResetLatency) {
  NvmModel mem;
  const Region r = mem.alloc(8);
  mem.store<std::uint8_t>(r.base, 0xFF);
  const MetricsReport before = mem.report();
  mem.store<std::uint8_t>(r.base, 0x00);
  const Activity a = mem.report().total;
  EXPECT_EQ(a.reset_bits - before.total.reset_bits, 8u);
  EXPECT_NEAR(a.sim_time_ns - before.total.sim_time_ns, 12.20, 1e-9);
  EXPECT_DOUBLE_EQ(a.sim_energy_pj - before.total.sim_energy_pj, 7008.0);
}

TEST(NvmWrite, SilentStoreChangesNothingButTheRequestCount) {
  NvmModel mem;
  const Region r = mem.alloc(8);
  mem.store<std::uint64_t>(r.base, 0x1234);
  MetricsReport before = mem.report();
  mem.store<std::uint64_t>(r.base, 0x1234);
  MetricsReport after = mem.report();
  EXPECT_EQ(after.total.nvm_writes, before.total.nvm_writes);
  EXPECT_EQ(after.total.set_bits, before.total.set_bits);
  EXPECT_DOUBLE_EQ(after.total.sim_time_ns, before.total.sim_time_ns);
  EXPECT_DOUBLE_EQ(after.total.sim_energy_pj, before.total.sim_energy_pj);
  EXPECT_EQ(after.total.silent_stores, 1u);
}

TEST(NvmWrite, MixedWriteUsesSetLatencyAndPerBitEnergy) {
  NvmModel mem;
  const Region r = mem.alloc(8);
  mem.store<std::uint8_t>(r.base, 0x0F);
  const MetricsReport before = mem.report();
  mem.store<std::uint8_t>(r.base, 0xF0);  // 4 SET + 4 RESET
  const Activity a = mem.report().total;
  EXPECT_DOUBLE_EQ(a.sim_time_ns - before.total.sim_time_ns, 152.20);
  EXPECT_DOUBLE_EQ(a.sim_energy_pj - before.total.sim_energy_pj, 4 * 70.0 + 4 * 876.0);
}

TEST(NvmWrite, PerOpEnergyMode) {
  NvmCostParams costs;
  costs.write_energy = WriteEnergyMode::per_op;
  NvmModel mem(costs);
  const Region r = mem.alloc(8);
  mem.store<std::uint8_t>(r.base, 0x0F);
  EXPECT_DOUBLE_EQ(mem.report().total.sim_energy_pj, 70.0);
  mem.store<std::uint8_t>(r.base, 0xF0);
  EXPECT_DOUBLE_EQ(mem.report().total.sim_energy_pj, 70.0 + 70.0 + 876.0);
}

TEST(NvmCosts, RejectNonPositive) {
  NvmCostParams c;
  c.reset_energy_pj = 0.0;
  EXPECT_THROW(NvmModel{c}, ConfigError);
  CacheConfig cc;
  cc.capacity_bytes = 1000;
  EXPECT_THROW(cc.validate(), ConfigError);
}

TEST(NvmWear, WatchedRegionCountsPerBit) {
  NvmModel mem;
  const Region r = mem.alloc(16);
  mem.watch(r);
  mem.store<std::uint64_t>(r.base, 1);
  mem.store<std::uint64_t>(r.base, 0);
  mem.store<std::uint64_t>(r.base + 8, std::uint64_t{1} << 63);
  const auto words = mem.wear_words();
  ASSERT_EQ(words.size(), 2u);
  EXPECT_EQ(words[0][0], 2u);
  EXPECT_EQ(words[1][63], 1u);
  const MetricsReport rep = mem.report();
  EXPECT_EQ(rep.max_header_bit_flips, 2u);
  EXPECT_EQ(rep.max_header_payload_bit_flips, 2u);
  EXPECT_EQ(rep.max_header_metadata_bit_flips, 1u);

  std::ostringstream dump;
  write_wear_map(dump, mem);
  std::string first_line = dump.str().substr(0, dump.str().find('\n'));
  EXPECT_EQ(std::count(first_line.begin(), first_line.end(), ','), 63);
  EXPECT_EQ(first_line.substr(0, 4), "2,0,");
}

TEST(NvmWear, ConservationOverRandomWrites) {
  std::mt19937_64 rng(7);
  NvmModel mem;
  const Region r = mem.alloc(512);
  mem.watch(r);
  for (int i = 0; i < 5000; ++i) {
    const Addr a = r.base + 8 * (rng() % 64);
    mem.store<std::uint64_t>(a, rng() & rng());
  }
  std::uint64_t sum = 0;
  for (const auto& w : mem.wear_words())
    for (std::uint64_t f : w) sum += f;
  const MetricsReport rep = mem.report();
  EXPECT_EQ(rep.total.set_bits + rep.total.reset_bits, sum);
  EXPECT_EQ(rep.total_bit_flips, sum);
}

TEST(NvmReport, PhasesSumToTotalAndReportIsIdempotent) {
  NvmModel mem;
  const Region r = mem.alloc(4096);
  std::mt19937_64 rng(3);
  for (Phase p : kAllPhases) {
    mem.set_phase(p);
    for (int i = 0; i < 200; ++i) {
      const Addr a = r.base + 8 * (rng() % 512);
      if (rng() % 2)
        mem.store<std::uint64_t>(a, rng());
      else
        mem.load<std::uint64_t>(a);
    }
    mem.charge_sram(3);
  }
  const MetricsReport rep = mem.report();
  Activity sum;
  for (Phase p : kAllPhases) sum += rep.phase(p);
  EXPECT_EQ(sum.nvm_writes, rep.total.nvm_writes);
  EXPECT_EQ(sum.nvm_reads, rep.total.nvm_reads);
  EXPECT_DOUBLE_EQ(sum.sim_time_ns, rep.total.sim_time_ns);
  EXPECT_DOUBLE_EQ(sum.sim_energy_pj, rep.total.sim_energy_pj);
  EXPECT_EQ(rep.total.sram_accesses, 12u);
  EXPECT_EQ(mem.report(), rep);
}

TEST(NvmReport, ColdReadsAccumulateLinearly) {
  NvmModel mem;
  const Region r = mem.alloc(64 * 100);
  const Addr first_line = (r.base + 63) / 64 * 64;
  for (int k = 0; k < 50; ++k) mem.load<std::uint8_t>(first_line + 64 * k);
  const Activity a = mem.report().total;
  EXPECT_EQ(a.nvm_reads, 50u);
  EXPECT_NEAR(a.sim_time_ns, 50 * 6.82, 1e-9);
}

TEST(NvmReport, DeterministicForIdenticalSequences) {
  auto run = [] {
    NvmModel mem;
    const Region r = mem.alloc(1 << 16);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 3000; ++i) {
      const Addr a = r.base + 8 * (rng() % 8192);
      if (rng() % 3 == 0)
        mem.store<std::uint64_t>(a, rng());
      else
        mem.load<std::uint64_t>(a);
    }
    return mem.report();
  };
  EXPECT_EQ(run(), run());
}

TEST(LruCache, EvictsLeastRecentlyUsedWithinSet) {
  LruCache cache;  // 32 KiB, 4-way, 64 B lines -> 128 sets
  const std::uint64_t stride = 128 * 64;  // same set
  for (int i = 0; i < 5; ++i) EXPECT_FALSE(cache.access(i * stride));
  EXPECT_FALSE(cache.access(0));           // first line was the LRU victim
  EXPECT_TRUE(cache.access(4 * stride));   // fifth line is still resident
}

TEST(LruCache, WorkingSetWithinCapacityStopsMissing) {
  LruCache cache;
  std::mt19937_64 rng(5);
  std::vector<Addr> lines;
  for (Addr a = 0; a < 32 * 1024; a += 64) lines.push_back(a);
  for (Addr a : lines) cache.access(a);
  int misses = 0;
  for (int i = 0; i < 20000; ++i) misses += !cache.access(lines[rng() % lines.size()]);
  EXPECT_EQ(misses, 0);
}

TEST(LruCache, MatchesReferenceReplay) {
  for (CacheConfig cfg : {CacheConfig{}, CacheConfig{4096, 2, 32}, CacheConfig{1024, 1, 64}}) {
    LruCache cache(cfg);
    testing::ReferenceLru ref(cfg.set_count(), cfg.associativity, cfg.line_bytes);
    std::mt19937_64 rng(cfg.capacity_bytes);
    for (int i = 0; i < 50000; ++i) {
      // Mix of a hot region and a cold sweep so both hits and misses occur.
      const Addr a = (rng() % 4 == 0) ? rng() % (1 << 22) : rng() % (2 * cfg.capacity_bytes);
      ASSERT_EQ(cache.access(a), ref.access(a)) << "access " << i;
    }
  }
}

TEST(MetricsCsv, FixedFieldNames) {
  NvmModel mem;
  std::ostringstream out;
  write_csv(out, mem.report());
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find('\n')), kMetricsCsvHeader);
  for (const char* field : {"nvm_writes", "nvm_reads", "set_bits", "reset_bits",
                            "max_header_bit_flips", "sim_time_ns", "sim_energy_pj", "cache_hits",
                            "cache_misses", "phase"})
    EXPECT_NE(s.find(field), std::string::npos) << field;
  EXPECT_NE(s.find("\ntotal,"), std::string::npos);
  const auto j = to_json(mem.report());
  EXPECT_EQ(j["total"]["phase"], "total");
  EXPECT_EQ(j["phases"].size(), kPhaseCount);
}

}  // namespace
}  // namespace wfpm
