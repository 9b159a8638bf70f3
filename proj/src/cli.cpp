#include "evac/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "evac/experiment.hpp"
#include "evac/report.hpp"

namespace evac {

namespace {

struct Options {
  std::string layout_file;
  std::string builtin;
  std::optional<std::string> blocked;
  double mean_door_delay = 0.0;
  std::uint64_t seed = 1;
  std::size_t trials = 100;
  unsigned jobs = 1;
  double max_time = 600.0;
  double accel = kCalibratedAcceleration;
  double decel = 0.05;
  double speed_lambda = kCalibratedSpeedLambda;
  std::string trace;
  std::string out;
  std::string chart;
  std::string field;
  double d_from = 0.1;
  double d_to = 1.5;
  double d_step = 0.1;
  std::string band = "54,64";
  double threshold = 90.0;
};

struct LayoutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FlagError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr const char* kBuiltinName = "a380-upper";
constexpr const char* kDefaultBlocked = "port-front,port-rear,stbd-mid";

ExitSelection parse_blocked(const std::string& list) {
  ExitSelection sel;
  if (list == "none") return sel;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (!name.empty()) sel.blocked.insert(name);
  }
  return sel;
}

std::string join(const ExitSelection& sel) {
  std::string s;
  for (const auto& n : sel.blocked) {
    if (!s.empty()) s += ',';
    s += n;
  }
  return s;
}

struct ResolvedLayout {
  CabinLayout layout;
  std::string source;
  std::string blocked;
};

ResolvedLayout resolve_layout(const Options& o) {
  try {
    if (!o.layout_file.empty()) {
      std::ifstream in(o.layout_file, std::ios::binary);
      if (!in) throw LayoutError(fmt::format("cannot read layout file '{}'", o.layout_file));
      std::stringstream buf;
      buf << in.rdbuf();
      CabinLayout layout = parse_layout(buf.str());
      std::string blocked;
      if (o.blocked) {
        const auto sel = parse_blocked(*o.blocked);
        layout = layout.with_blocked(sel);
        blocked = join(sel);
      } else {
        for (const auto& e : layout.exits()) {
          if (!e.blocked) continue;
          if (!blocked.empty()) blocked += ',';
          blocked += e.name;
        }
      }
      return {std::move(layout), "file:" + o.layout_file, blocked};
    }
    if (!o.builtin.empty() && o.builtin != kBuiltinName) {
      throw LayoutError(fmt::format("unknown built-in layout '{}' (available: {})", o.builtin, kBuiltinName));
    }
    const auto sel = parse_blocked(o.blocked.value_or(kDefaultBlocked));
    return {generate_a380_upper_deck(sel), fmt::format("builtin:{}", kBuiltinName), join(sel)};
  } catch (const Error& e) {
    throw LayoutError(fmt::format("{}: {}", to_string(e.kind()), e.what()));
  }
}

SimConfig make_config(const Options& o) {
  SimConfig c;
  c.attributes.mean_door_delay = o.mean_door_delay;
  c.attributes.speed_lambda = o.speed_lambda;
  c.acceleration = o.accel;
  c.deceleration = o.decel;
  c.max_sim_time = o.max_time;
  try {
    c.validate();
  } catch (const Error& e) {
    throw FlagError(e.what());
  }
  return c;
}

RunManifest make_manifest(const std::string& command, const ResolvedLayout& rl, const SimConfig& config,
                          std::uint64_t seed) {
  RunManifest m;
  m.command = command;
  m.layout_source = rl.source;
  m.blocked = rl.blocked;
  m.config = config;
  m.base_seed = seed;
  return m;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, fmt::format("cannot open '{}' for writing", path));
  f << content;
  f.flush();
  if (!f) throw Error(ErrorKind::Io, fmt::format("failed writing '{}'", path));
}

void add_shared_flags(CLI::App& cmd, Options& o) {
  auto* layout = cmd.add_option("--layout", o.layout_file, "Cabin layout file");
  cmd.add_option("--builtin", o.builtin, "Built-in layout (a380-upper)")->excludes(layout);
  cmd.add_option("--blocked", o.blocked,
                 "Comma-separated exits to block, or 'none' (built-in default: port-front,port-rear,stbd-mid)");
  cmd.add_option("--mean-door-delay", o.mean_door_delay, "Mean door delay D in seconds")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--seed", o.seed, "Seed (base seed for batches)");
  cmd.add_option("--trials", o.trials, "Trials per batch")->check(CLI::PositiveNumber);
  cmd.add_option("--jobs", o.jobs, "Worker threads for batches (0 = all cores)");
  cmd.add_option("--max-time", o.max_time, "Simulated time limit per trial in seconds");
  cmd.add_option("--accel", o.accel, "Acceleration in m/s per tick");
  cmd.add_option("--decel", o.decel, "Deceleration in m/s per tick");
  cmd.add_option("--speed-lambda", o.speed_lambda, "Poisson mean of the maximum-speed count");
  cmd.add_option("--trace", o.trace, "JSONL trace output (run)");
  cmd.add_option("--out", o.out, "Output file");
  cmd.add_option("--chart", o.chart, "SVG chart output (sweep)");
  cmd.add_option("--field", o.field, "Floor-field CSV dump (layout)");
  cmd.add_option("--d-from", o.d_from, "First mean door delay of the sweep");
  cmd.add_option("--d-to", o.d_to, "Last mean door delay of the sweep");
  cmd.add_option("--d-step", o.d_step, "Sweep increment");
  cmd.add_option("--band", o.band, "Calibration band LO,HI in seconds");
  cmd.add_option("--threshold", o.threshold, "Certification threshold in seconds");
}

int cmd_run(const Options& o, std::ostream& out) {
  const auto rl = resolve_layout(o);
  const SimConfig config = make_config(o);
  const FloorField field(rl.layout);
  TrialResult result;
  if (o.trace.empty()) {
    result = run_trial(rl.layout, field, config, o.seed);
  } else {
    std::ofstream f(o.trace, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, fmt::format("cannot open '{}' for writing", o.trace));
    TraceWriter writer(f, make_manifest("run", rl, config, o.seed));
    result = run_trial(rl.layout, field, config, o.seed,
                       [&](const Simulation& sim) { writer.on_tick(sim); });
    writer.finish(result);
  }
  out << fmt::format("evac_time_s={:.1f} outcome={}\n", result.evac_time, to_string(result.outcome));
  return kExitOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  const SweepRange range{o.d_from, o.d_to, o.d_step};
  try {
    sweep_grid(range);
  } catch (const Error& e) {
    throw FlagError(e.what());
  }
  const auto rl = resolve_layout(o);
  const SimConfig config = make_config(o);
  const FloorField field(rl.layout);
  const auto points = sweep(rl.layout, field, config, range, o.trials, o.seed, o.jobs);

  RunManifest manifest = make_manifest("sweep", rl, config, o.seed);
  manifest.extra = {{"trials", std::to_string(o.trials)},
                    {"d_from", fmt::format("{}", o.d_from)},
                    {"d_to", fmt::format("{}", o.d_to)},
                    {"d_step", fmt::format("{}", o.d_step)}};
  std::ostringstream csv;
  write_sweep_csv(csv, manifest, points);
  const auto crossing = threshold_crossing(points, o.threshold);
  const std::string summary =
      crossing ? fmt::format("threshold_crossing_D={:.4f} threshold_s={}\n", *crossing, o.threshold)
               : fmt::format("threshold_crossing_D=none threshold_s={}\n", o.threshold);
  if (o.out.empty()) {
    out << csv.str();
    err << summary;
  } else {
    write_file(o.out, csv.str());
    out << summary;
  }
  if (!o.chart.empty()) {
    manifest.extra.emplace_back("threshold_s", fmt::format("{}", o.threshold));
    write_file(o.chart, render_chart_svg(points, o.threshold, &manifest));
  }
  return kExitOk;
}

std::pair<double, double> parse_band(const std::string& band) {
  const auto comma = band.find(',');
  if (comma == std::string::npos) throw FlagError(fmt::format("--band expects LO,HI, got '{}'", band));
  try {
    std::size_t used_lo = 0, used_hi = 0;
    const std::string lo_s = band.substr(0, comma), hi_s = band.substr(comma + 1);
    const double lo = std::stod(lo_s, &used_lo);
    const double hi = std::stod(hi_s, &used_hi);
    if (used_lo != lo_s.size() || used_hi != hi_s.size() || !(lo <= hi)) throw std::invalid_argument(band);
    return {lo, hi};
  } catch (const std::exception&) {
    throw FlagError(fmt::format("--band expects LO,HI with LO <= HI, got '{}'", band));
  }
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  const auto [lo, hi] = parse_band(o.band);
  Options at_zero = o;
  at_zero.mean_door_delay = 0.0;
  const auto rl = resolve_layout(at_zero);
  const SimConfig config = make_config(at_zero);
  const FloorField field(rl.layout);
  const auto batch = run_batch(rl.layout, field, config, o.trials, o.seed, o.jobs);
  const auto& s = batch.stats;
  const bool pass = s.n > 0 && s.mean >= lo && s.mean <= hi;

  RunManifest manifest = make_manifest("calibrate", rl, config, o.seed);
  manifest.extra = {{"trials", std::to_string(o.trials)}, {"band_s", fmt::format("{},{}", lo, hi)}};
  std::ostringstream report;
  write_manifest_comments(report, manifest);
  report << fmt::format("n={} mean_s={:.4f} std_s={:.4f} min_s={:.4f} max_s={:.4f} timeouts={}\n", s.n,
                        s.mean, s.std_dev, s.min, s.max, s.timeouts);
  report << fmt::format("band_s=[{:.4f}, {:.4f}] result={}\n", lo, hi, pass ? "PASS" : "FAIL");
  out << report.str();
  if (!o.out.empty()) write_file(o.out, report.str());
  return pass ? kExitOk : kExitCalibrationFail;
}

int cmd_layout(const Options& o, std::ostream& out) {
  const auto rl = resolve_layout(o);
  RunManifest manifest = make_manifest("layout", rl, SimConfig{}, o.seed);
  std::ostringstream text;
  write_manifest_comments(text, manifest, "! ");
  text << serialize_layout(rl.layout);
  if (o.out.empty()) {
    out << text.str();
  } else {
    write_file(o.out, text.str());
  }
  if (!o.field.empty()) {
    std::ostringstream csv;
    write_manifest_comments(csv, manifest);
    FloorField(rl.layout).write_csv(csv);
    write_file(o.field, csv.str());
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Agent-based aircraft evacuation simulator", "evacsim"};
  app.set_version_flag("--version", fmt::format("evacsim {}", kToolVersion));
  app.require_subcommand(1);

  Options o;
  auto* run = app.add_subcommand("run", "Run one trial and print its evacuation time");
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep the mean door delay and write CSV (and SVG)");
  auto* calibrate = app.add_subcommand("calibrate", "Run a D = 0 batch and check the calibration band");
  auto* layout = app.add_subcommand("layout", "Print a layout in the text format");
  for (auto* cmd : {run, sweep_cmd, calibrate, layout}) add_shared_flags(*cmd, o);

  std::vector<std::string> argv_storage{"evacsim"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << e.what() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadFlags;
  }

  try {
    if (*run) return cmd_run(o, out);
    if (*sweep_cmd) return cmd_sweep(o, out, err);
    if (*calibrate) return cmd_calibrate(o, out);
    return cmd_layout(o, out);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadFlags;
  } catch (const LayoutError& e) {
    err << "error: " << e.what() << '\n';
    return kExitLayoutError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.kind() == ErrorKind::Io) return kExitIoError;
    if (e.kind() == ErrorKind::InvalidConfig || e.kind() == ErrorKind::BadRange) return kExitBadFlags;
    return kExitLayoutError;
  }
}

}  // namespace evac
