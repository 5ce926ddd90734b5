#include "fbfield/rng.hpp"

#include <cmath>

namespace fbfield {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t stream_index)
    : state_(mix64(seed + kGolden) ^ mix64(stream_index * kGolden + 1)) {}

std::uint64_t NormalStream::next_u64() {
  state_ += kGolden;
  return mix64(state_);
}

double NormalStream::next_uniform() {
  // 53-bit mantissa scaled into (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double NormalStream::next_normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * 3.14159265358979323846 * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

}  // namespace fbfield
