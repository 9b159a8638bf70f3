#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evac/engine.hpp"

namespace evac {

/// Summary of completed trials. std_dev is the sample (n - 1) estimate and
/// is 0 for a single value. Timed-out trials are only counted.
struct Stats {
  std::size_t n = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::size_t timeouts = 0;
  friend bool operator==(const Stats&, const Stats&) = default;
};

/// Throws EmptyInput on an empty list.
Stats summarize(std::span<const double> evac_times, std::size_t timeouts = 0);

struct BatchResult {
  Stats stats;
  std::vector<TrialResult> trials;  // in trial-index order
};

/// Trial i runs with seed split_seed(base_seed, i). Results do not depend on
/// `jobs` (worker thread count; 0 picks the hardware concurrency). If every
/// trial times out, stats.n is 0 and the time fields are NaN.
BatchResult run_batch(const CabinLayout& layout, const FloorField& field, const SimConfig& config,
                      std::size_t trials, std::uint64_t base_seed, unsigned jobs = 1);

struct SweepPoint {
  double mean_door_delay;
  Stats stats;
};

struct SweepRange {
  double from;
  double to;
  double step;
};

/// D values from, from + step, ... up to to (inclusive within step / 1000).
/// Built from the integer index to avoid drift. Throws BadRange.
std::vector<double> sweep_grid(const SweepRange& range);

/// Point k runs a batch with base seed split_seed(base_seed, k).
std::vector<SweepPoint> sweep(const CabinLayout& layout, const FloorField& field,
                              const SimConfig& config, const SweepRange& range, std::size_t trials,
                              std::uint64_t base_seed, unsigned jobs = 1);

/// First D (points sorted by D) whose mean exceeds the threshold.
std::optional<double> threshold_crossing(std::span<const SweepPoint> points, double threshold);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> a, std::span<const double> b);

}  // namespace evac
