#pragma once

#include <cstdint>

namespace evosteer {

/// Counter-based pseudo-random stream: every output is a SplitMix64-style
/// finalizer applied to (key(seed, stream_id), counter). Identical
/// (seed, stream_id, call sequence) replays bitwise; distinct stream ids give
/// independent sequences, so parallel workers can each own a stream without
/// any ordering constraints between them.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();

  /// Uniform draw in [0, 1) with 53 random bits.
  double next_uniform();

  /// Standard normal draw (Box-Muller, fixed two-counter consumption).
  double next_gauss();

  /// Uniform integer in [0, bound). bound must be >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  /// Derives an independent child stream keyed by this stream's identity and
  /// one consumed draw, so successive forks from the same parent differ.
  RngStream fork();

  /// Derives an independent child stream purely from (seed, stream_id, child);
  /// does not consume state. Used for indexed per-worker streams.
  RngStream substream(std::uint64_t child) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Stateless 64-bit finalizer used for seed/stream derivation.
std::uint64_t mix64(std::uint64_t x);

/// Combines two words into one well-spread word (for derived seeds).
std::uint64_t mix64(std::uint64_t a, std::uint64_t b);

}  // namespace evosteer
