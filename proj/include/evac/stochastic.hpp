#pragma once

#include <cstdint>
#include <random>

namespace evac {

/// Seeded generator. The output sequence is fixed by the seed on every
/// platform: only the raw mt19937_64 stream is used, never the
/// implementation-defined std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t uniform_index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

/// Seed for trial `trial_index` of a batch. Injective in trial_index for a
/// fixed base seed (odd-multiplier offset followed by the SplitMix64 finalizer,
/// both bijections on 64-bit words).
std::uint64_t split_seed(std::uint64_t base_seed, std::uint64_t trial_index);

inline constexpr double kMaxPoissonLambda = 100.0;

/// Poisson(lambda) by sequential inversion; lambda in [0, 100].
std::uint64_t sample_poisson(double lambda, Rng& rng);

struct AttributeDistributions {
  double mean_door_delay = 0.0;  // seconds
  double speed_floor = 0.3;      // m/s
  double speed_cap = 1.05;       // m/s
  double speed_step = 0.05;      // m/s per Poisson count
  double speed_lambda = 7.5;

  /// Throws InvalidConfig when the fields are inconsistent.
  void validate() const;
};

/// K/10 seconds with K ~ Poisson(10 D): lives on the 0.1 s grid with mean D.
double sample_door_delay(const AttributeDistributions& dist, Rng& rng);
/// Door delay as a count of 0.1 s units.
std::uint64_t sample_door_delay_tenths(const AttributeDistributions& dist, Rng& rng);

/// clamp(floor + step * K, floor, cap) with K ~ Poisson(speed_lambda).
double sample_max_speed(const AttributeDistributions& dist, Rng& rng);

}  // namespace evac
