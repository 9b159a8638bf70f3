#include "evac/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <fmt/format.h>

namespace evac {

Stats summarize(std::span<const double> evac_times, std::size_t timeouts) {
  if (evac_times.empty()) throw Error(ErrorKind::EmptyInput, "no evacuation times to summarize");
  Stats s;
  s.n = evac_times.size();
  s.timeouts = timeouts;
  const auto [lo, hi] = std::minmax_element(evac_times.begin(), evac_times.end());
  s.min = *lo;
  s.max = *hi;
  // Welford's update keeps the variance accurate for long, tightly clustered runs.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (const double v : evac_times) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  s.mean = std::clamp(mean, s.min, s.max);
  s.std_dev = s.n > 1 ? std::sqrt(std::max(0.0, m2 / static_cast<double>(s.n - 1))) : 0.0;
  return s;
}

BatchResult run_batch(const CabinLayout& layout, const FloorField& field, const SimConfig& config,
                      std::size_t trials, std::uint64_t base_seed, unsigned jobs) {
  if (trials == 0) throw Error(ErrorKind::EmptyInput, "a batch needs at least one trial");
  config.validate();
  BatchResult out;
  out.trials.resize(trials);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      out.trials[i] = run_trial(layout, field, config, split_seed(base_seed, i));
    }
  };
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, trials));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }

  std::vector<double> times;
  std::size_t timeouts = 0;
  for (const auto& t : out.trials) {
    if (t.outcome == Outcome::Completed) {
      times.push_back(t.evac_time);
    } else {
      ++timeouts;
    }
  }
  if (times.empty()) {
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    out.stats = Stats{0, nan, nan, nan, nan, timeouts};
  } else {
    out.stats = summarize(times, timeouts);
  }
  return out;
}

std::vector<double> sweep_grid(const SweepRange& range) {
  if (!(range.step > 0.0) || !(range.from >= 0.0) || !(range.from <= range.to) ||
      !std::isfinite(range.to)) {
    throw Error(ErrorKind::BadRange, fmt::format("bad sweep range {}..{} step {}", range.from,
                                                 range.to, range.step));
  }
  const double limit = range.to + range.step / 1000.0;
  std::vector<double> grid;
  for (std::size_t k = 0;; ++k) {
    const double d = range.from + static_cast<double>(k) * range.step;
    if (d > limit) break;
    grid.push_back(d);
  }
  return grid;
}

std::vector<SweepPoint> sweep(const CabinLayout& layout, const FloorField& field,
                              const SimConfig& config, const SweepRange& range, std::size_t trials,
                              std::uint64_t base_seed, unsigned jobs) {
  const auto grid = sweep_grid(range);
  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    SimConfig c = config;
    c.attributes.mean_door_delay = grid[k];
    auto batch = run_batch(layout, field, c, trials, split_seed(base_seed, k), jobs);
    points.push_back({grid[k], batch.stats});
  }
  return points;
}

std::optional<double> threshold_crossing(std::span<const SweepPoint> points, double threshold) {
  for (const auto& p : points) {
    if (p.stats.mean > threshold) return p.mean_door_delay;
  }
  return std::nullopt;
}

namespace {

std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorKind::EmptyInput, "rank correlation needs two equal-length series of length >= 2");
  }
  const auto ra = ranks(a);
  const auto rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    cov += (ra[i] - mean) * (rb[i] - mean);
    va += (ra[i] - mean) * (ra[i] - mean);
    vb += (rb[i] - mean) * (rb[i] - mean);
  }
  if (va == 0.0 || vb == 0.0) return 0.0;
  return cov / std::sqrt(va * vb);
}

}  // namespace evac
