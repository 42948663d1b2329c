#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace rrnet {

/// Seeded 64-bit generator used everywhere randomness is needed.
///
/// Streams: `Rng::stream(seed, id)` seeds an mt19937_64 with
/// splitmix64(seed ^ splitmix64(id)), so independent tasks (train vs. test
/// draws, replications, folds) never share a sequence. Uniforms take the top
/// 53 bits of one draw; normals use the Marsaglia polar method. Every piece
/// is specified exactly, so output is identical across standard libraries.
class Rng {
 public:
  static constexpr const char* kGeneratorName = "mt19937_64/splitmix64-streams/marsaglia-polar";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Uniform integer in [0, n), rejection sampled (no modulo bias).
  std::size_t index(std::size_t n);

  template <class T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rrnet
