#pragma once

// Support counters stored as 64-bit NVM cells.
//
// A sliding counter keeps a 32-bit value in an 8-block window that migrates
// across a 15-block (60-bit) sliding region so that the fast-toggling low
// nibble does not always land on the same physical bits. Layout of the word:
//
//   bits  0..59  counting blocks, serial s occupies bits [4s, 4s+4)
//   bits 60..62  offset: serial of the window's lowest block, 0..7
//   bit  63      direction: 1 = window moves toward higher serials with
//                normal packing, 0 = toward lower serials with reversed packing
//
// Normal packing stores value nibble k in block offset+k; reversed packing
// stores it in block offset+7-k.

#include <cstdint>
#include <string_view>

#include "wfpm/errors.hpp"
#include "wfpm/nvm.hpp"

namespace wfpm {

enum class CounterVariant { regular, sliding };

constexpr std::string_view to_string(CounterVariant v) {
  return v == CounterVariant::regular ? "regular" : "sliding";
}

struct CounterPolicy {
  CounterVariant variant = CounterVariant::sliding;
  std::uint32_t slide_period = 16;  // increments between window moves

  void validate() const {
    if (slide_period < 1) throw ConfigError("slide_period must be >= 1");
  }
};

namespace sliding {

inline constexpr unsigned kBlockBits = 4;
inline constexpr unsigned kBlockCount = 15;
inline constexpr unsigned kWindowBlocks = 8;
inline constexpr unsigned kMaxOffset = kBlockCount - kWindowBlocks;
inline constexpr unsigned kOffsetShift = 60;
inline constexpr unsigned kDirectionBit = 63;
inline constexpr std::uint64_t kSlidingMask = (std::uint64_t{1} << 60) - 1;
inline constexpr std::uint64_t kMaxValue = 0xFFFF'FFFFull;

enum class Direction : std::uint8_t { toward_lower = 0, toward_higher = 1 };

struct Layout {
  Direction direction = Direction::toward_higher;
  unsigned offset = 0;

  bool operator==(const Layout&) const = default;
};

constexpr Layout layout_of(std::uint64_t word) {
  return Layout{static_cast<Direction>((word >> kDirectionBit) & 1u),
                static_cast<unsigned>((word >> kOffsetShift) & 7u)};
}

constexpr std::uint64_t with_layout(std::uint64_t word, Layout l) {
  return (word & kSlidingMask) | (std::uint64_t{l.offset} << kOffsetShift) |
         (std::uint64_t{static_cast<std::uint8_t>(l.direction)} << kDirectionBit);
}

constexpr unsigned block(std::uint64_t word, unsigned serial) {
  return static_cast<unsigned>((word >> (serial * kBlockBits)) & 0xFu);
}

constexpr std::uint64_t set_block(std::uint64_t word, unsigned serial, unsigned nibble) {
  const unsigned shift = serial * kBlockBits;
  return (word & ~(std::uint64_t{0xF} << shift)) | (std::uint64_t{nibble & 0xFu} << shift);
}

// Serial of the block holding value nibble k (k = 0 is least significant).
constexpr unsigned block_of_nibble(Layout l, unsigned k) {
  return l.direction == Direction::toward_higher ? l.offset + k : l.offset + kWindowBlocks - 1 - k;
}

constexpr std::uint64_t window_mask(Layout l) {
  return ((std::uint64_t{1} << (kWindowBlocks * kBlockBits)) - 1) << (l.offset * kBlockBits);
}

constexpr bool at_border(Layout l) {
  return l.direction == Direction::toward_higher ? l.offset == kMaxOffset : l.offset == 0;
}

// Throws IntegrityError if bits outside the live window are set.
constexpr std::uint64_t decode(std::uint64_t word) {
  const Layout l = layout_of(word);
  if ((word & kSlidingMask & ~window_mask(l)) != 0)
    throw IntegrityError("sliding counter has live bits outside its window");
  std::uint64_t value = 0;
  for (unsigned k = 0; k < kWindowBlocks; ++k)
    value |= std::uint64_t{block(word, block_of_nibble(l, k))} << (k * kBlockBits);
  return value;
}

// Writes value into the current window, leaving the layout unchanged.
constexpr std::uint64_t store_value(std::uint64_t word, std::uint64_t value) {
  const Layout l = layout_of(word);
  for (unsigned k = 0; k < kWindowBlocks; ++k)
    word = set_block(word, block_of_nibble(l, k), static_cast<unsigned>(value >> (k * kBlockBits)));
  return word;
}

// Moves every live block one position in the current direction and zeroes the vacated block.
constexpr std::uint64_t slide(std::uint64_t word) {
  Layout l = layout_of(word);
  if (at_border(l)) throw IntegrityError("slide requested at the window border");
  if (l.direction == Direction::toward_higher) {
    for (unsigned s = l.offset + kWindowBlocks; s > l.offset; --s)
      word = set_block(word, s, block(word, s - 1));
    word = set_block(word, l.offset, 0);
    ++l.offset;
  } else {
    for (unsigned s = l.offset - 1; s < l.offset + kWindowBlocks - 1; ++s)
      word = set_block(word, s, block(word, s + 1));
    word = set_block(word, l.offset + kWindowBlocks - 1, 0);
    --l.offset;
  }
  return with_layout(word, l);
}

// At a border, swaps the window's blocks pairwise end-for-end and flips the direction.
// At offset 7 the pairs are (7,14) (8,13) (9,12) (10,11); at offset 0, (0,7) (1,6) (2,5) (3,4).
constexpr std::uint64_t reverse(std::uint64_t word) {
  Layout l = layout_of(word);
  if (!at_border(l)) throw IntegrityError("reversal requested away from a border");
  for (unsigned i = 0; i < kWindowBlocks / 2; ++i) {
    const unsigned lo = l.offset + i;
    const unsigned hi = l.offset + kWindowBlocks - 1 - i;
    const unsigned a = block(word, lo);
    const unsigned b = block(word, hi);
    word = set_block(set_block(word, lo, b), hi, a);
  }
  l.direction = l.direction == Direction::toward_higher ? Direction::toward_lower
                                                         : Direction::toward_higher;
  return with_layout(word, l);
}

// One window movement: a slide, or a reversal when the window sits at its border.
constexpr std::uint64_t relocate(std::uint64_t word) {
  return at_border(layout_of(word)) ? reverse(word) : slide(word);
}

// Word holding `to`, reached from `word` (holding `from`) by the slide schedule
// that moves the window whenever the count crosses a multiple of period.
constexpr std::uint64_t advance(std::uint64_t word, std::uint64_t from, std::uint64_t to,
                                std::uint32_t period) {
  // A full cycle is 7 slides, a reversal, 7 slides and a reversal.
  constexpr std::uint64_t kCycle = 2 * (kMaxOffset + 1);
  std::uint64_t moves = (to / period - from / period) % kCycle;
  while (moves-- > 0) word = relocate(word);
  return store_value(word, to);
}

}  // namespace sliding

// View of a counter cell in simulated memory. All accesses are charged to the model.
class CounterRef {
 public:
  CounterRef() = default;
  CounterRef(Addr cell, CounterPolicy policy) : cell_(cell), policy_(policy) {}

  // Resets the cell to the zero state (for sliding: offset 0, moving toward higher serials).
  static CounterRef init(CounterPolicy policy, NvmModel& mem, Addr cell) {
    policy.validate();
    CounterRef c(cell, policy);
    mem.store<std::uint64_t>(cell, c.zero_word());
    return c;
  }

  Addr address() const noexcept { return cell_; }
  const CounterPolicy& policy() const noexcept { return policy_; }

  std::uint64_t decode(NvmModel& mem) const { return value_of(mem.load<std::uint64_t>(cell_)); }

  void increment(NvmModel& mem) { add(mem, 1); }

  // Adds delta with a single read-modify-write of the cell.
  void add(NvmModel& mem, std::uint64_t delta) {
    const std::uint64_t word = mem.load<std::uint64_t>(cell_);
    mem.store<std::uint64_t>(cell_, next_word(word, delta));
  }

  // Representation-only moves, exposed for inspection; increment invokes them as needed.
  void slide(NvmModel& mem) { rewrite(mem, sliding::slide); }
  void reverse(NvmModel& mem) { rewrite(mem, sliding::reverse); }

  std::uint64_t zero_word() const {
    return policy_.variant == CounterVariant::sliding
               ? sliding::with_layout(0, sliding::Layout{})
               : 0;
  }

  std::uint64_t value_of(std::uint64_t word) const {
    return policy_.variant == CounterVariant::sliding ? sliding::decode(word) : word;
  }

  std::uint64_t next_word(std::uint64_t word, std::uint64_t delta) const {
    const std::uint64_t value = value_of(word);
    if (policy_.variant == CounterVariant::regular) {
      if (delta > UINT64_MAX - value) throw OverflowError("regular counter overflow");
      return value + delta;
    }
    if (delta > sliding::kMaxValue - value)
      throw OverflowError("sliding counter exceeded its 32-bit window");
    return sliding::advance(word, value, value + delta, policy_.slide_period);
  }

 private:
  template <class F>
  void rewrite(NvmModel& mem, F transform) {
    if (policy_.variant != CounterVariant::sliding)
      throw IntegrityError("window moves apply to sliding counters only");
    const std::uint64_t word = mem.load<std::uint64_t>(cell_);
    mem.store<std::uint64_t>(cell_, transform(word));
  }

  Addr cell_ = kNullAddr;
  CounterPolicy policy_;
};

}  // namespace wfpm
