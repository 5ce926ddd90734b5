#pragma once

#include <cstdint>

namespace fbfield {

// Counter-based splitmix64 stream.  Streams for distinct (seed, stream_index)
// pairs are statistically independent, so per-path substreams can be drawn in
// any order with identical results.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream_index);

  double next_normal();
  double next_uniform();  // in (0, 1]
  std::uint64_t next_u64();

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace fbfield
