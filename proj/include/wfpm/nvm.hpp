#pragma once

// Simulated phase-change memory: a flat byte-addressable space with
// data-comparison writes, per-bit wear tracking over watched regions and
// latency/energy accounting, fronted by a set-associative LRU cache.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "wfpm/errors.hpp"

namespace wfpm {

static_assert(std::endian::native == std::endian::little,
              "wear maps assume little-endian word layout");

using Addr = std::uint64_t;
inline constexpr Addr kNullAddr = 0;

struct Region {
  Addr base = kNullAddr;
  std::uint64_t size = 0;

  Addr end() const noexcept { return base + size; }
  bool contains(Addr addr, std::uint64_t len = 1) const noexcept {
    return addr >= base && len <= size && addr - base <= size - len;
  }
};

enum class WriteEnergyMode {
  per_bit,  // SET/RESET energy charged for every flipped bit
  per_op,   // one SET and/or one RESET charge per write operation
};

// PCM read/SET/RESET costs and SRAM latency.
struct NvmCostParams {
  double read_latency_ns = 6.82;
  double set_latency_ns = 152.20;
  double reset_latency_ns = 12.20;
  double read_energy_pj = 64.0;
  double set_energy_pj = 70.0;
  double reset_energy_pj = 876.0;
  double sram_latency_ns = 1.41;
  WriteEnergyMode write_energy = WriteEnergyMode::per_bit;

  void validate() const {
    for (double v : {read_latency_ns, set_latency_ns, reset_latency_ns, read_energy_pj,
                     set_energy_pj, reset_energy_pj, sram_latency_ns}) {
      if (!(v > 0.0)) throw ConfigError("cost parameters must be strictly positive");
    }
  }
};

struct CacheConfig {
  std::uint64_t capacity_bytes = 32 * 1024;
  std::uint32_t associativity = 4;
  std::uint32_t line_bytes = 64;

  std::uint64_t set_count() const noexcept {
    return capacity_bytes / (std::uint64_t{associativity} * line_bytes);
  }

  void validate() const {
    if (associativity == 0 || line_bytes == 0 || capacity_bytes == 0)
      throw ConfigError("cache geometry must be non-zero");
    if (capacity_bytes % (std::uint64_t{associativity} * line_bytes) != 0)
      throw ConfigError("cache capacity must be divisible by associativity * line size");
  }
};

// Set-associative cache with true LRU replacement inside each set.
// Set index = (addr / line_bytes) mod set_count.
class LruCache {
 public:
  explicit LruCache(const CacheConfig& config = {}) : config_(config) {
    config_.validate();
    sets_ = config_.set_count();
    ways_.assign(sets_ * config_.associativity, Way{});
  }

  const CacheConfig& config() const noexcept { return config_; }

  // Looks up the line holding addr and installs it on a miss. Returns true on a hit.
  bool access(Addr addr) {
    const std::uint64_t line = addr / config_.line_bytes;
    std::span<Way> set = set_of(line);
    ++clock_;
    for (Way& w : set) {
      if (w.valid && w.line == line) {
        w.last_use = clock_;
        return true;
      }
    }
    auto victim = std::min_element(set.begin(), set.end(), [](const Way& a, const Way& b) {
      if (a.valid != b.valid) return !a.valid;
      return a.last_use < b.last_use;
    });
    *victim = Way{line, clock_, true};
    return false;
  }

  // Refreshes recency of a resident line without allocating on a miss.
  bool touch_if_resident(Addr addr) {
    const std::uint64_t line = addr / config_.line_bytes;
    for (Way& w : set_of(line)) {
      if (w.valid && w.line == line) {
        w.last_use = ++clock_;
        return true;
      }
    }
    return false;
  }

  bool resident(Addr addr) const {
    const std::uint64_t line = addr / config_.line_bytes;
    const std::size_t first = static_cast<std::size_t>((line % sets_) * config_.associativity);
    for (std::size_t i = 0; i < config_.associativity; ++i) {
      const Way& w = ways_[first + i];
      if (w.valid && w.line == line) return true;
    }
    return false;
  }

 private:
  struct Way {
    std::uint64_t line = 0;
    std::uint64_t last_use = 0;
    bool valid = false;
  };

  std::span<Way> set_of(std::uint64_t line) {
    const std::size_t first = static_cast<std::size_t>((line % sets_) * config_.associativity);
    return std::span<Way>(ways_).subspan(first, config_.associativity);
  }

  CacheConfig config_;
  std::uint64_t sets_ = 0;
  std::vector<Way> ways_;
  std::uint64_t clock_ = 0;
};

enum class Phase : std::uint8_t { scan1 = 0, build, finalize, mine };
inline constexpr std::size_t kPhaseCount = 4;
inline constexpr std::array<Phase, kPhaseCount> kAllPhases = {Phase::scan1, Phase::build,
                                                              Phase::finalize, Phase::mine};

constexpr std::string_view phase_name(Phase p) {
  switch (p) {
    case Phase::scan1: return "scan1";
    case Phase::build: return "build";
    case Phase::finalize: return "finalize";
    case Phase::mine: return "mine";
  }
  return "?";
}

// Additive accumulators for one phase (or the whole run).
struct Activity {
  std::uint64_t nvm_writes = 0;      // write operations that flipped at least one bit
  std::uint64_t nvm_reads = 0;       // lines fetched from NVM (cache misses)
  std::uint64_t set_bits = 0;
  std::uint64_t reset_bits = 0;
  std::uint64_t silent_stores = 0;   // write requests that flipped nothing
  std::uint64_t read_requests = 0;
  std::uint64_t write_requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_misses = 0;
  std::uint64_t sram_accesses = 0;   // volatile working-state accesses
  std::uint64_t max_header_bit_flips = 0;  // maximum, not additive
  double sim_time_ns = 0.0;
  double sim_energy_pj = 0.0;

  Activity& operator+=(const Activity& o) {
    nvm_writes += o.nvm_writes;
    nvm_reads += o.nvm_reads;
    set_bits += o.set_bits;
    reset_bits += o.reset_bits;
    silent_stores += o.silent_stores;
    read_requests += o.read_requests;
    write_requests += o.write_requests;
    cache_hits += o.cache_hits;
    cache_misses += o.cache_misses;
    sram_accesses += o.sram_accesses;
    sim_time_ns += o.sim_time_ns;
    sim_energy_pj += o.sim_energy_pj;
    return *this;
  }

  bool operator==(const Activity&) const = default;
};

struct MetricsReport {
  Activity total;
  std::array<Activity, kPhaseCount> phases{};
  std::uint64_t max_header_bit_flips = 0;
  std::uint64_t max_header_payload_bit_flips = 0;   // bits 0..59 of each watched word
  std::uint64_t max_header_metadata_bit_flips = 0;  // bits 60..63 of each watched word
  std::uint64_t total_bit_flips = 0;                // whole-memory aggregate

  const Activity& phase(Phase p) const { return phases[static_cast<std::size_t>(p)]; }
  bool operator==(const MetricsReport&) const = default;
};

class NvmModel {
 public:
  static constexpr Addr kFirstAddress = 64;  // keeps address 0 free as the null reference
  static constexpr std::uint64_t kDefaultCeiling = std::uint64_t{1} << 32;

  explicit NvmModel(NvmCostParams costs = {}, CacheConfig cache = {},
                    std::uint64_t ceiling_bytes = kDefaultCeiling)
      : costs_(costs), cache_(cache), ceiling_(ceiling_bytes) {
    costs_.validate();
    bytes_.resize(kFirstAddress, 0);
  }

  const NvmCostParams& costs() const noexcept { return costs_; }
  const CacheConfig& cache_config() const noexcept { return cache_.config(); }

  // Zero-filled region, 8-byte aligned. Formatting is not charged.
  Region alloc(std::uint64_t size) {
    if (size == 0) throw ConfigError("cannot allocate an empty region");
    const Addr base = (bytes_.size() + 7) & ~Addr{7};
    if (base + size > ceiling_ || base + size < base)
      throw CapacityError("simulated address space exhausted");
    bytes_.resize(base + size, 0);
    regions_.push_back(Region{base, size});
    return regions_.back();
  }

  // Tracks per-bit flips over r (e.g. the header counter area).
  void watch(Region r) {
    require(r.base, r.size);
    Watched w{r, {}};
    for (auto& v : w.flips) v.assign(r.size * 8, 0);
    watched_.push_back(std::move(w));
  }

  void set_phase(Phase p) noexcept { phase_ = p; }
  Phase phase() const noexcept { return phase_; }

  void read(Addr addr, std::span<std::byte> out) {
    require(addr, out.size());
    Activity& a = current();
    ++a.read_requests;
    const std::uint64_t line_bytes = cache_.config().line_bytes;
    const std::uint64_t first = addr / line_bytes;
    const std::uint64_t last = (addr + out.size() - 1) / line_bytes;
    for (std::uint64_t line = first; line <= last; ++line) {
      if (cache_.access(line * line_bytes)) {
        ++a.cache_hits;
        a.sim_time_ns += costs_.sram_latency_ns;
      } else {
        ++a.cache_misses;
        ++a.nvm_reads;
        a.sim_time_ns += costs_.read_latency_ns;
        a.sim_energy_pj += costs_.read_energy_pj;
      }
    }
    std::memcpy(out.data(), bytes_.data() + addr, out.size());
  }

  // Data-comparison write: only bits that differ from the stored value are programmed.
  void write(Addr addr, std::span<const std::byte> in) {
    require(addr, in.size());
    Activity& a = current();
    ++a.write_requests;
    Watched* w = watched_for(addr, in.size());
    std::uint64_t set = 0;
    std::uint64_t reset = 0;
    for (std::size_t i = 0; i < in.size(); ++i) {
      const auto old_byte = bytes_[addr + i];
      const auto new_byte = static_cast<std::uint8_t>(in[i]);
      const auto diff = static_cast<std::uint8_t>(old_byte ^ new_byte);
      if (diff == 0) continue;
      set += std::popcount(static_cast<std::uint8_t>(diff & new_byte));
      reset += std::popcount(static_cast<std::uint8_t>(diff & old_byte));
      if (w != nullptr) {
        auto& flips = w->flips[static_cast<std::size_t>(phase_)];
        const std::uint64_t bit0 = (addr + i - w->region.base) * 8;
        for (unsigned b = 0; b < 8; ++b)
          if (diff & (1u << b)) ++flips[bit0 + b];
      }
      bytes_[addr + i] = new_byte;
    }
    if (set + reset == 0) {
      ++a.silent_stores;
      return;
    }
    ++a.nvm_writes;
    a.set_bits += set;
    a.reset_bits += reset;
    total_flips_ += set + reset;
    a.sim_time_ns += set > 0 ? costs_.set_latency_ns : costs_.reset_latency_ns;
    if (costs_.write_energy == WriteEnergyMode::per_bit) {
      a.sim_energy_pj += costs_.set_energy_pj * static_cast<double>(set) +
                         costs_.reset_energy_pj * static_cast<double>(reset);
    } else {
      a.sim_energy_pj += (set > 0 ? costs_.set_energy_pj : 0.0) +
                         (reset > 0 ? costs_.reset_energy_pj : 0.0);
    }
    const std::uint64_t line_bytes = cache_.config().line_bytes;
    for (std::uint64_t line = addr / line_bytes; line <= (addr + in.size() - 1) / line_bytes; ++line)
      cache_.touch_if_resident(line * line_bytes);
  }

  template <class T>
    requires std::is_trivially_copyable_v<T>
  T load(Addr addr) {
    T value;
    read(addr, std::as_writable_bytes(std::span<T, 1>(&value, 1)));
    return value;
  }

  template <class T>
    requires std::is_trivially_copyable_v<T>
  void store(Addr addr, const T& value) {
    write(addr, std::as_bytes(std::span<const T, 1>(&value, 1)));
  }

  // Uncharged inspection for serialization and tests.
  template <class T>
    requires std::is_trivially_copyable_v<T>
  T peek(Addr addr) const {
    require(addr, sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + addr, sizeof(T));
    return value;
  }

  // Volatile working state (transient bitmaps, rank lookups) costs SRAM time only.
  void charge_sram(std::uint64_t accesses = 1) {
    Activity& a = current();
    a.sram_accesses += accesses;
    a.sim_time_ns += costs_.sram_latency_ns * static_cast<double>(accesses);
  }

  MetricsReport report() const {
    MetricsReport r;
    r.phases = phases_;
    for (std::size_t p = 0; p < kPhaseCount; ++p) {
      std::uint64_t phase_max = 0;
      for (const Watched& w : watched_)
        for (std::uint64_t f : w.flips[p]) phase_max = std::max(phase_max, f);
      r.phases[p].max_header_bit_flips = phase_max;
      r.total += r.phases[p];
    }
    for (const Watched& w : watched_) {
      for (std::uint64_t bit = 0; bit < w.region.size * 8; ++bit) {
        const std::uint64_t f = bit_total(w, bit);
        r.max_header_bit_flips = std::max(r.max_header_bit_flips, f);
        if (bit % 64 < 60)
          r.max_header_payload_bit_flips = std::max(r.max_header_payload_bit_flips, f);
        else
          r.max_header_metadata_bit_flips = std::max(r.max_header_metadata_bit_flips, f);
      }
    }
    r.total.max_header_bit_flips = r.max_header_bit_flips;
    r.total_bit_flips = total_flips_;
    return r;
  }

  // Per-bit flip totals of every watched 64-bit word, bit 0 first.
  std::vector<std::array<std::uint64_t, 64>> wear_words() const {
    std::vector<std::array<std::uint64_t, 64>> out;
    for (const Watched& w : watched_) {
      for (std::uint64_t word = 0; word < w.region.size / 8; ++word) {
        std::array<std::uint64_t, 64> bits{};
        for (unsigned b = 0; b < 64; ++b) bits[b] = bit_total(w, word * 64 + b);
        out.push_back(bits);
      }
    }
    return out;
  }

  std::uint64_t bytes_in_use() const noexcept { return bytes_.size() - kFirstAddress; }

 private:
  struct Watched {
    Region region;
    std::array<std::vector<std::uint64_t>, kPhaseCount> flips;
  };

  static std::uint64_t bit_total(const Watched& w, std::uint64_t bit) {
    std::uint64_t sum = 0;
    for (const auto& v : w.flips) sum += v[bit];
    return sum;
  }

  Activity& current() noexcept { return phases_[static_cast<std::size_t>(phase_)]; }

  void require(Addr addr, std::uint64_t len) const {
    if (len == 0) throw IntegrityError("zero-length memory access");
    auto it = std::upper_bound(regions_.begin(), regions_.end(), addr,
                               [](Addr a, const Region& r) { return a < r.base; });
    if (it == regions_.begin() || !std::prev(it)->contains(addr, len))
      throw IntegrityError("memory access outside any allocated region at address " +
                           std::to_string(addr));
  }

  Watched* watched_for(Addr addr, std::uint64_t len) {
    for (Watched& w : watched_)
      if (addr < w.region.end() && addr + len > w.region.base) {
        if (!w.region.contains(addr, len))
          throw IntegrityError("write straddles a watched region boundary");
        return &w;
      }
    return nullptr;
  }

  NvmCostParams costs_;
  LruCache cache_;
  std::uint64_t ceiling_;
  std::vector<std::uint8_t> bytes_;
  std::vector<Region> regions_;
  std::vector<Watched> watched_;
  std::array<Activity, kPhaseCount> phases_{};
  std::uint64_t total_flips_ = 0;
  Phase phase_ = Phase::scan1;
};

}  // namespace wfpm
