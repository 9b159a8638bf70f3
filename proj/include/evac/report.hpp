#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evac/engine.hpp"
#include "evac/experiment.hpp"

namespace evac {

inline constexpr const char* kToolVersion = "1.0.0";

/// Everything needed to reproduce an output file. Written into the header of
/// every CSV, JSONL and SVG the tool produces. Worker count and output paths
/// are deliberately absent so they never change the bytes of an output.
struct RunManifest {
  std::string command;
  std::string layout_source;
  std::string blocked;
  SimConfig config;
  std::uint64_t base_seed = 0;
  std::vector<std::pair<std::string, std::string>> extra;  // command-specific settings

  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// `# key: value` lines (or another comment prefix).
void write_manifest_comments(std::ostream& out, const RunManifest& manifest,
                             std::string_view prefix = "# ");

/// `D,trials,mean_s,std_s,min_s,max_s,timeouts` with 4-decimal fixed values.
void write_sweep_csv(std::ostream& out, const RunManifest& manifest,
                     std::span<const SweepPoint> points);

/// JSONL trace: one object per tick, then a summary object. The manifest
/// rides on the first line. A trial without agents produces only the summary.
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, RunManifest manifest);

  void on_tick(const Simulation& sim);
  void finish(const TrialResult& result);

 private:
  std::ostream& out_;
  RunManifest manifest_;
  bool wrote_manifest_ = false;
};

/// Chart of mean evacuation time against D with +-std error
/// bars and a horizontal reference line at `threshold`. Throws EmptyInput.
std::string render_chart_svg(std::span<const SweepPoint> points, double threshold,
                             const RunManifest* manifest = nullptr);

}  // namespace evac
