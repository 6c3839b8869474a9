#include "evosteer/rng.hpp"

#include <cmath>

#include "evosteer/errors.hpp"

namespace evosteer {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd2b74407b1ce6e93ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a + kGolden * mix64(b + kStreamSalt));
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(mix64(seed, stream_id)) {}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t z = key_ + kGolden * ++counter_;
  return mix64(z);
}

double RngStream::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_gauss() {
  // (0, 1] so the log is finite.
  const double u1 =
      static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return r * std::cos(kTwoPi * u2);
}

std::uint64_t RngStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw Error("RngStream::next_below: bound must be >= 1");
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * bound;
  return static_cast<std::uint64_t>(wide >> 64);
}

RngStream RngStream::fork() {
  return RngStream(seed_, mix64(stream_id_, next_u64()));
}

RngStream RngStream::substream(std::uint64_t child) const {
  return RngStream(seed_, mix64(stream_id_ ^ kStreamSalt, child));
}

}  // namespace evosteer
