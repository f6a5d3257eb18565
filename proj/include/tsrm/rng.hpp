#pragma once
// Counter-based random streams.
//
// Every draw is a pure function of (master_seed, stream_id, word_index), so a
// stream can be re-created in O(1) for any replica and replays identically no
// matter which worker runs it. The generator is Philox4x32-10 (Salmon et al.,
// "Parallel random numbers: as easy as 1, 2, 3"): the 64-bit master seed is the
// key, the counter is (block index, stream id).
//
// Word accounting (one word = 64 raw bits):
//   next_word / next_uniform / next_bit   1 word
//   next_gaussian / next_gaussian_pair    2 words (one Box-Muller transform)

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace tsrm {

struct StreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const StreamSpec&, const StreamSpec&) = default;
};

namespace detail {

inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

/// SplitMix64 finalizer; used for keyed site hashes (lattice arrows).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

/// A positioned view of one Philox stream. Cheap to copy; copies continue
/// independently from the same position (used to clone particle states).
class RandomStream {
 public:
  explicit RandomStream(StreamSpec spec, std::uint64_t word_offset = 0) : spec_(spec) {
    seek(word_offset);
  }

  const StreamSpec& spec() const { return spec_; }
  std::uint64_t position() const { return word_; }

  void seek(std::uint64_t word_offset) {
    word_ = word_offset;
    block_ = ~std::uint64_t{0};
  }

  std::uint64_t next_word() {
    const std::uint64_t b = word_ >> 1;
    if (b != block_) refill(b);
    const std::uint64_t w = buf_[word_ & 1];
    ++word_;
    return w;
  }

  /// Uniform on [0,1) with 53 random bits.
  double next_uniform() { return static_cast<double>(next_word() >> 11) * 0x1.0p-53; }

  /// Uniform on (0,1]; safe as a log argument.
  double next_uniform_open0() { return (static_cast<double>(next_word() >> 11) + 1.0) * 0x1.0p-53; }

  int next_bit() { return (next_word() >> 63) ? 1 : -1; }

  std::pair<double, double> next_gaussian_pair() {
    const double u1 = next_uniform_open0();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  double next_gaussian() { return next_gaussian_pair().first; }

 private:
  void refill(std::uint64_t b) {
    const std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
        static_cast<std::uint32_t>(spec_.stream_id), static_cast<std::uint32_t>(spec_.stream_id >> 32)};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(spec_.master_seed),
                                              static_cast<std::uint32_t>(spec_.master_seed >> 32)};
    const auto out = detail::philox4x32_10(ctr, key);
    buf_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    buf_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    block_ = b;
  }

  StreamSpec spec_;
  std::uint64_t word_ = 0;
  std::uint64_t block_ = ~std::uint64_t{0};
  std::array<std::uint64_t, 2> buf_{};
};

inline RandomStream make_stream(StreamSpec spec) { return RandomStream(spec); }

/// Derive a sub-stream id from a parent id and a tag, e.g. (replica, purpose).
constexpr std::uint64_t substream(std::uint64_t parent, std::uint64_t tag) {
  return detail::mix64(parent ^ detail::mix64(tag + 0x5851F42D4C957F2Dull));
}

/// Buffered draws from a gaussian pair. Consumes words two at a time, so the
/// stream position after 2k draws is exactly 4k words.
class GaussianSource {
 public:
  explicit GaussianSource(RandomStream& s) : s_(&s) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    auto [a, b] = s_->next_gaussian_pair();
    spare_ = b;
    has_spare_ = true;
    return a;
  }

 private:
  RandomStream* s_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tsrm
