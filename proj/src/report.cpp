#include "evac/report.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

namespace evac {

namespace {

using ordered_json = nlohmann::ordered_json;

double round4(double v) { return std::round(v * 1e4) / 1e4; }

// Rounded coordinate that still falls in the same patch as v, so a replay of
// the trace sees the occupancy the engine saw.
double round4_in_patch(double v) {
  const double r = round4(v);
  const double patch = std::floor(v + 0.5);
  if (std::floor(r + 0.5) > patch) return r - 1e-4;
  if (std::floor(r + 0.5) < patch) return r + 1e-4;
  return r;
}

ordered_json manifest_json(const RunManifest& manifest) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : manifest.entries()) j[k] = v;
  return j;
}

void check_stream(const std::ostream& out) {
  if (!out) throw Error(ErrorKind::Io, "failed to write output");
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> RunManifest::entries() const {
  const auto& a = config.attributes;
  std::vector<std::pair<std::string, std::string>> e{
      {"tool", fmt::format("evacsim {}", kToolVersion)},
      {"command", command},
      {"layout", layout_source},
      {"blocked", blocked},
      {"mean_door_delay_s", fmt::format("{}", a.mean_door_delay)},
      {"exit_opening_time_s", fmt::format("{}", config.exit_opening_time)},
      {"tick_length_s", fmt::format("{}", config.tick_length)},
      {"acceleration_mps_per_tick", fmt::format("{}", config.acceleration)},
      {"deceleration_mps_per_tick", fmt::format("{}", config.deceleration)},
      {"speed_floor_mps", fmt::format("{}", a.speed_floor)},
      {"speed_cap_mps", fmt::format("{}", a.speed_cap)},
      {"speed_step_mps", fmt::format("{}", a.speed_step)},
      {"speed_lambda", fmt::format("{}", a.speed_lambda)},
      {"max_sim_time_s", fmt::format("{}", config.max_sim_time)},
      {"seed", fmt::format("{}", base_seed)},
  };
  e.insert(e.end(), extra.begin(), extra.end());
  return e;
}

void write_manifest_comments(std::ostream& out, const RunManifest& manifest, std::string_view prefix) {
  for (const auto& [k, v] : manifest.entries()) out << prefix << k << ": " << v << '\n';
}

void write_sweep_csv(std::ostream& out, const RunManifest& manifest, std::span<const SweepPoint> points) {
  write_manifest_comments(out, manifest);
  out << "D,trials,mean_s,std_s,min_s,max_s,timeouts\n";
  for (const auto& p : points) {
    const auto& s = p.stats;
    out << fmt::format("{:.4f},{},{:.4f},{:.4f},{:.4f},{:.4f},{}\n", p.mean_door_delay,
                       s.n + s.timeouts, s.mean, s.std_dev, s.min, s.max, s.timeouts);
  }
  check_stream(out);
}

TraceWriter::TraceWriter(std::ostream& out, RunManifest manifest)
    : out_(out), manifest_(std::move(manifest)) {}

void TraceWriter::on_tick(const Simulation& sim) {
  if (sim.initial_count() == 0) return;
  ordered_json line = ordered_json::object();
  line["tick"] = sim.tick();
  line["t_s"] = round4(sim.elapsed());
  ordered_json agents = ordered_json::array();
  for (const int id : sim.active_ids()) {
    const Agent& a = sim.agent(id);
    agents.push_back(ordered_json{{"id", a.id},
                                  {"x", round4_in_patch(a.pos.x)},
                                  {"y", round4_in_patch(a.pos.y)},
                                  {"h", round4(a.heading)},
                                  {"s", round4(a.speed)}});
  }
  line["agents"] = std::move(agents);
  line["exited"] = std::vector<int>(sim.exited_last_step().begin(), sim.exited_last_step().end());
  if (!wrote_manifest_) {
    line["manifest"] = manifest_json(manifest_);
    wrote_manifest_ = true;
  }
  out_ << line.dump() << '\n';
  check_stream(out_);
}

void TraceWriter::finish(const TrialResult& result) {
  ordered_json exits = ordered_json::array();
  for (const auto& e : result.exits) {
    exits.push_back(ordered_json{{"id", e.agent_id}, {"exit", e.exit}, {"t_s", round4(e.time_s)}});
  }
  ordered_json summary{{"outcome", to_string(result.outcome)},
                       {"evac_time_s", round4(result.evac_time)},
                       {"ticks", result.ticks},
                       {"seed", result.seed},
                       {"exits", std::move(exits)}};
  ordered_json line{{"summary", std::move(summary)}};
  if (!wrote_manifest_) {
    line["manifest"] = manifest_json(manifest_);
    wrote_manifest_ = true;
  }
  out_ << line.dump() << '\n';
  out_.flush();
  check_stream(out_);
}

std::string render_chart_svg(std::span<const SweepPoint> points, double threshold,
                             const RunManifest* manifest) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "no sweep points to plot");

  constexpr double kWidth = 640, kHeight = 420;
  constexpr double kLeft = 70, kRight = 20, kTop = 30, kBottom = 60;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_lo = points.front().mean_door_delay, x_hi = x_lo;
  double y_lo = threshold, y_hi = threshold;
  for (const auto& p : points) {
    x_lo = std::min(x_lo, p.mean_door_delay);
    x_hi = std::max(x_hi, p.mean_door_delay);
    if (!std::isfinite(p.stats.mean)) continue;
    y_lo = std::min(y_lo, p.stats.mean - p.stats.std_dev);
    y_hi = std::max(y_hi, p.stats.mean + p.stats.std_dev);
  }
  if (x_hi - x_lo < 1e-9) {
    x_lo -= 0.1;
    x_hi += 0.1;
  }
  y_lo = std::floor(y_lo / 10.0) * 10.0 - 10.0;
  y_hi = std::ceil(y_hi / 10.0) * 10.0 + 10.0;
  y_lo = std::max(0.0, y_lo);

  const auto px = [&](double d) { return kLeft + (d - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double t) { return kTop + (1.0 - (t - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::string svg;
  svg += fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      kWidth, kHeight);
  if (manifest != nullptr) {
    svg += "<metadata>\n";
    for (const auto& [k, v] : manifest->entries()) {
      svg += fmt::format("{}: {}\n", xml_escape(k), xml_escape(v));
    }
    svg += "</metadata>\n";
  }
  svg += fmt::format("<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);

  // Axes, ticks and labels.
  svg += "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n", kLeft,
                     kTop + plot_h, kLeft + plot_w);
  svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", kLeft, kTop,
                     kTop + plot_h);
  constexpr int kXTicks = 5;
  for (int i = 0; i < kXTicks; ++i) {
    const double d = x_lo + (x_hi - x_lo) * i / (kXTicks - 1);
    const double x = px(d);
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>\n", x,
                       kTop + plot_h, kTop + plot_h + 5);
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" stroke=\"none\">{:.2f}</text>\n", x,
        kTop + plot_h + 18, d);
  }
  for (double t = y_lo; t <= y_hi + 1e-9; t += 10.0) {
    const double y = py(t);
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\"/>\n", kLeft - 5, y,
                       kLeft);
    svg += fmt::format(
        "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\" stroke=\"none\">{:.0f}</text>\n",
        kLeft - 8, y + 4, t);
  }
  svg += fmt::format(
      "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" stroke=\"none\">Mean door delay D (s)</text>\n",
      kLeft + plot_w / 2, kHeight - 15);
  svg += fmt::format(
      "<text x=\"15\" y=\"{0:.2f}\" text-anchor=\"middle\" stroke=\"none\" "
      "transform=\"rotate(-90 15 {0:.2f})\">Mean evacuation time (s)</text>\n",
      kTop + plot_h / 2);
  svg += "</g>\n";

  svg += fmt::format(
      "<line class=\"threshold\" x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" "
      "stroke=\"red\" stroke-dasharray=\"6 4\"/>\n",
      kLeft, py(threshold), kLeft + plot_w);

  std::string polyline;
  for (const auto& p : points) {
    if (!std::isfinite(p.stats.mean)) continue;
    polyline += fmt::format("{:.2f},{:.2f} ", px(p.mean_door_delay), py(p.stats.mean));
  }
  if (!polyline.empty()) polyline.pop_back();
  svg += fmt::format("<polyline class=\"mean-line\" fill=\"none\" stroke=\"steelblue\" points=\"{}\"/>\n",
                     polyline);

  for (const auto& p : points) {
    if (!std::isfinite(p.stats.mean)) continue;
    const double x = px(p.mean_door_delay);
    const double top = py(p.stats.mean + p.stats.std_dev);
    const double bottom = py(p.stats.mean - p.stats.std_dev);
    svg += fmt::format(
        "<g class=\"error-bar\" stroke=\"black\">"
        "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\"/>"
        "<line x1=\"{3:.2f}\" y1=\"{1:.2f}\" x2=\"{4:.2f}\" y2=\"{1:.2f}\"/>"
        "<line x1=\"{3:.2f}\" y1=\"{2:.2f}\" x2=\"{4:.2f}\" y2=\"{2:.2f}\"/></g>\n",
        x, top, bottom, x - 4, x + 4);
    svg += fmt::format(
        "<circle class=\"marker\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"steelblue\"/>\n", x,
        py(p.stats.mean));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace evac
