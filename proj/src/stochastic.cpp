#include "evac/stochastic.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "evac/error.hpp"

namespace evac {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // Rejection on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

std::uint64_t split_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
  std::uint64_t z = base_seed + (trial_index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t sample_poisson(double lambda, Rng& rng) {
  if (!(lambda >= 0.0) || lambda > kMaxPoissonLambda) {
    throw Error(ErrorKind::LambdaOutOfRange,
                fmt::format("Poisson mean {} outside [0, {}]", lambda, kMaxPoissonLambda));
  }
  if (lambda == 0.0) return 0;
  const double u = rng.uniform();
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t k = 0;
  // The pmf underflows long before k reaches this bound for lambda <= 100.
  while (u >= cdf && p > 0.0) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
  }
  return k;
}

void AttributeDistributions::validate() const {
  if (!(mean_door_delay >= 0.0) || 10.0 * mean_door_delay > kMaxPoissonLambda) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("mean door delay {} s out of range", mean_door_delay));
  }
  if (!(speed_floor > 0.0) || !(speed_floor <= speed_cap)) {
    throw Error(ErrorKind::InvalidConfig,
                fmt::format("speed range [{}, {}] is invalid", speed_floor, speed_cap));
  }
  if (!(speed_step >= 0.0)) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("speed step {} is negative", speed_step));
  }
  if (!(speed_lambda >= 0.0) || speed_lambda > kMaxPoissonLambda) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("speed lambda {} out of range", speed_lambda));
  }
}

std::uint64_t sample_door_delay_tenths(const AttributeDistributions& dist, Rng& rng) {
  return sample_poisson(10.0 * dist.mean_door_delay, rng);
}

double sample_door_delay(const AttributeDistributions& dist, Rng& rng) {
  return static_cast<double>(sample_door_delay_tenths(dist, rng)) / 10.0;
}

double sample_max_speed(const AttributeDistributions& dist, Rng& rng) {
  const auto k = sample_poisson(dist.speed_lambda, rng);
  const double speed = dist.speed_floor + dist.speed_step * static_cast<double>(k);
  return std::clamp(speed, dist.speed_floor, dist.speed_cap);
}

}  // namespace evac
