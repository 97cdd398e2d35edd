#pragma once

#include <cstdint>
#include <random>

namespace pathwise {

// SplitMix64 finalizer (Vigna's constants).  Used to derive independent
// per-stream seeds from a master seed; pinned here so the stream layout is a
// documented artifact contract rather than a standard-library detail.
std::uint64_t splitmix64(std::uint64_t x);

// Seed for stream `stream` derived from `master`:
//   splitmix64(master + (stream + 1) * 0x9E3779B97F4A7C15).
// Stream 0 is distinct from the master-seeded stream itself, and different
// streams never collide for fixed master (the map is a bijection per stream).
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t stream);

// Deterministic standard-normal stream: mt19937_64 (sequence pinned by the
// C++ standard) + explicit Box-Muller.  Consumes exactly two 64-bit draws per
// generated pair; uniforms are (k+1)*2^-64 in (0,1].
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : gen_(seed) {}

  double next();

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pathwise
