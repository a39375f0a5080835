#include "collapse/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

#include "collapse/analysis.hpp"
#include "collapse/kernels.hpp"
#include "collapse/oracle.hpp"
#include "collapse/raster_io.hpp"

namespace collapse::cli {

namespace {

std::string join(const auto& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>) {
      out += format_number(v);
    } else {
      out += std::to_string(v);
    }
  }
  return out;
}

std::vector<std::string> header_lines(const RunConfig& config, const std::string& what) {
  std::vector<std::string> lines{"collapse-lattice " + what};
  for (const std::string& l : config.describe()) lines.push_back(l);
  return lines;
}

void prepare_out_dir(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) throw OutputError("cannot create " + config.out_dir.string() + ": " + ec.message());
}

void write_raster(const RunConfig& config, const FieldRaster& raster, const std::string& stem,
                  const std::vector<std::string>& comments) {
  if (config.format == "pgm") {
    write_file(config.out_dir / (stem + ".pgm"), encode_pgm(raster, comments));
    return;
  }
  CsvTable table({"row", "slot", "value"}, comments);
  for (int r = 0; r < raster.rows; ++r) {
    for (int c = 0; c < raster.cols; ++c) {
      table.add_row({std::to_string(r + 1), std::to_string(c), format_number(raster.at(r, c))});
    }
  }
  write_file(config.out_dir / (stem + ".csv"), table.encode());
}

std::string bits_with(int n_slots, std::initializer_list<int> ones) {
  std::string s(static_cast<std::size_t>(n_slots), '0');
  for (int k : ones) s[static_cast<std::size_t>(k)] = '1';
  return s;
}

}  // namespace

std::string to_string(Command command) {
  switch (command) {
    case Command::Simulate: return "simulate";
    case Command::Decay: return "decay";
    case Command::CoarseGrain: return "coarse-grain";
    case Command::OracleCheck: return "oracle-check";
  }
  return "?";
}

double parse_angle(const std::string& text) {
  std::string s;
  for (char ch : text) {
    if (ch != ' ') s += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  const auto bad = [&] { return ConfigError("cannot read angle \"" + text + "\""); };
  const std::size_t pi = s.find("pi");
  if (pi == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != s.size()) throw bad();
    return v;
  }
  double factor = 1.0;
  std::string head = s.substr(0, pi);
  if (head == "-") {
    factor = -1.0;
  } else if (!head.empty()) {
    if (head.back() == '*') head.pop_back();
    std::size_t used = 0;
    try {
      factor = std::stod(head, &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != head.size()) throw bad();
  }
  double divisor = 1.0;
  const std::string tail = s.substr(pi + 2);
  if (!tail.empty()) {
    if (tail[0] != '/') throw bad();
    std::size_t used = 0;
    try {
      divisor = std::stod(tail.substr(1), &used);
    } catch (const std::exception&) {
      throw bad();
    }
    if (used != tail.size() - 1 || divisor == 0.0) throw bad();
  }
  return factor * std::numbers::pi / divisor;
}

InitialState parse_initial(const std::string& text, int n_sites) {
  const int n_slots = 2 * n_sites;
  auto config = [&](const std::string& bits) {
    FieldConfig c;
    try {
      c = FieldConfig::parse(bits);
    } catch (const HilbertError& e) {
      throw ConfigError(std::string("initial state: ") + e.what());
    }
    if (c.n_slots() != n_slots) {
      throw ConfigError("initial state: bitstring \"" + bits + "\" has " +
                        std::to_string(c.n_slots()) + " bits, --n-sites " +
                        std::to_string(n_sites) + " needs " + std::to_string(n_slots));
    }
    return c;
  };
  if (text == "vacuum") return InitialState::vacuum(n_slots);
  if (text == "single-link") {
    const BranchPair b = single_link_branches(n_sites);
    return InitialState::superposition(b.first, b.second);
  }
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "eigen" && !arg.empty()) return InitialState::eigen(config(arg));
  if (kind == "superposition") {
    const auto comma = arg.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("initial state: superposition needs two bitstrings, \"superposition:A,B\"");
    }
    const FieldConfig a = config(arg.substr(0, comma));
    const FieldConfig b = config(arg.substr(comma + 1));
    if (a == b) throw ConfigError("initial state: superposed bitstrings must differ");
    return InitialState::superposition(a, b);
  }
  if (kind == "left-right" && !arg.empty()) {
    int l = 0;
    try {
      l = std::stoi(arg);
    } catch (const std::exception&) {
      throw ConfigError("initial state: cannot read particle count \"" + arg + "\"");
    }
    if (l < 1 || l > n_sites) {
      throw ConfigError("initial state: left-right particle count must lie in [1, " +
                        std::to_string(n_sites) + "]");
    }
    const BranchPair b = left_right_branches(n_sites, l);
    return InitialState::superposition(b.first, b.second);
  }
  throw ConfigError("initial state \"" + text +
                    "\" not understood; use vacuum, eigen:BITS, superposition:A,B, single-link "
                    "or left-right:L");
}

void RunConfig::apply_defaults() {
  switch (command) {
    case Command::Simulate:
      if (!n_sites) n_sites = 8;
      if (!rows) rows = 32;
      if (theta.empty()) theta = "pi/6";
      if (initial.empty()) initial = "eigen:" + bits_with(2 * *n_sites, {0, *n_sites});
      break;
    case Command::Decay:
      if (!n_sites) n_sites = sweep == "particles" ? 10 : 8;
      if (!rows) rows = 4000;
      if (theta.empty()) theta = "pi/2";
      if (initial.empty() && sweep == "epsilon") initial = "single-link";
      break;
    case Command::CoarseGrain:
      if (!n_sites) n_sites = 8;
      if (!rows) rows = 32;
      if (theta.empty()) theta = "pi/6";
      if (initial.empty()) initial = "vacuum";
      break;
    case Command::OracleCheck:
      if (!n_sites) n_sites = 2;
      if (!rows) rows = 2;
      if (theta.empty()) theta = "pi/6";
      if (initial.empty()) {
        initial = "superposition:" + bits_with(2 * *n_sites, {0}) + "," +
                  bits_with(2 * *n_sites, {2});
      }
      break;
  }
}

void RunConfig::validate() const {
  if (!n_sites || !rows) throw ConfigError("internal: defaults not applied");
  if (*n_sites < 2 || *n_sites > kMaxSites) {
    throw ConfigError("--n-sites must lie in [2, " + std::to_string(kMaxSites) +
                      "]; the state vector has 4^N amplitudes");
  }
  if (*rows < 1) throw ConfigError("--rows must be at least 1");
  if (x && epsilon) throw ConfigError("give either --x or --epsilon, not both");
  const bool sweep_sets_x = command == Command::Decay && sweep == "epsilon";
  if (!x && !epsilon && !sweep_sets_x) throw ConfigError("give one of --x or --epsilon");
  if (x && !(*x >= 0.0 && *x <= 1.0)) throw ConfigError("--x must lie in [0, 1]");
  if (epsilon && !(*epsilon >= 0.0 && *epsilon <= 1.0)) {
    throw ConfigError("--epsilon must lie in [0, 1]");
  }
  const double th = parse_angle(theta);
  if (!std::isfinite(th) || !std::isfinite(phase_alpha) || !std::isfinite(phase_beta)) {
    throw ConfigError("angles must be finite");
  }
  if (policy != "markov" && policy != "sweep") throw ConfigError("--policy must be markov or sweep");
  if (stuff_surface != "post" && stuff_surface != "pre") {
    throw ConfigError("--stuff-surface must be post or pre");
  }
  if (format != "pgm" && format != "csv") throw ConfigError("--format must be pgm or csv");
  if (!initial.empty()) (void)parse_initial(initial, *n_sites);

  switch (command) {
    case Command::Simulate:
      break;
    case Command::Decay: {
      if (std::abs(th - std::numbers::pi / 2) > 1e-12) {
        throw ConfigError("decay tracks branches through the gate and needs --theta pi/2");
      }
      if (seeds < 1) throw ConfigError("--seeds must be at least 1");
      if (!(threshold > 0.0 && threshold < 0.5)) throw ConfigError("--threshold must lie in (0, 0.5)");
      if (sweep == "epsilon") {
        if (epsilons.size() < 3) throw ConfigError("--epsilons needs at least 3 values for a fit");
        for (double e : epsilons) {
          if (!(e > 0.0 && e < 1.0)) throw ConfigError("--epsilons values must lie in (0, 1)");
        }
        if (x || epsilon) throw ConfigError("an epsilon sweep sets X itself; drop --x/--epsilon");
        const InitialState s = parse_initial(initial, *n_sites);
        if (s.kind != InitialState::Kind::Superposition) {
          throw ConfigError("decay needs a superposition initial state");
        }
      } else if (sweep == "particles") {
        if (!initial.empty()) throw ConfigError("a particle sweep builds its own left-right states");
        if (particles.size() < 3) throw ConfigError("--particles needs at least 3 values for a fit");
        for (int l : particles) {
          if (l < 1 || l > *n_sites) {
            throw ConfigError("--particles values must lie in [1, " + std::to_string(*n_sites) + "]");
          }
        }
        if (model_params().epsilon() <= 0.0) throw ConfigError("decay needs epsilon > 0");
      } else {
        throw ConfigError("--sweep must be epsilon or particles");
      }
      break;
    }
    case Command::CoarseGrain:
      if (block < 1 || block > *n_sites || block > *rows) {
        throw ConfigError("--block must lie in [1, min(n-sites, rows)]");
      }
      if (renormalise && model_params().epsilon() == 0.0) {
        throw ConfigError("the renormalised field divides by epsilon and is undefined at X = 1; "
                          "pass --no-renormalise");
      }
      if (min_blocks < 2) throw ConfigError("--min-blocks must be at least 2");
      break;
    case Command::OracleCheck:
      if (*n_sites > 3 || *rows > 2) throw ConfigError("oracle-check needs --n-sites <= 3 and --rows <= 2");
      if (runs < 1 || channel_runs < 1) throw ConfigError("run counts must be positive");
      break;
  }
}

ModelParams RunConfig::model_params() const {
  ModelParams p;
  p.theta = parse_angle(theta.empty() ? "pi/6" : theta);
  p.phase_alpha = phase_alpha;
  p.phase_beta = phase_beta;
  p.x = x ? *x : (epsilon ? 1.0 - *epsilon : 1.0);
  p.seed = seed;
  return p;
}

LatticeGeometry RunConfig::geometry() const { return LatticeGeometry::make(n_sites.value(), rows.value()); }

InitialState RunConfig::initial_state() const { return parse_initial(initial, n_sites.value()); }

MotionPolicy RunConfig::motion_policy() const {
  return policy == "sweep" ? MotionPolicy::Sweep : MotionPolicy::Markov;
}

StuffSurface RunConfig::stuff() const {
  return stuff_surface == "pre" ? StuffSurface::PreHit : StuffSurface::PostHit;
}

std::vector<std::string> RunConfig::describe() const {
  std::vector<std::string> l;
  auto add = [&](const std::string& key, const std::string& value) { l.push_back(key + " = " + value); };
  auto quoted = [](const std::string& s) { return "\"" + s + "\""; };
  add("command", quoted(to_string(command)));
  add("n-sites", std::to_string(n_sites.value_or(0)));
  add("rows", std::to_string(rows.value_or(0)));
  add("theta", quoted(theta));
  add("phase-alpha", format_number(phase_alpha));
  add("phase-beta", format_number(phase_beta));
  if (x) add("x", format_number(*x));
  if (epsilon) add("epsilon", format_number(*epsilon));
  add("seed", std::to_string(seed));
  add("initial", quoted(initial));
  add("policy", quoted(policy));
  add("stuff-surface", quoted(stuff_surface));
  add("format", quoted(format));
  switch (command) {
    case Command::Simulate:
      break;
    case Command::Decay:
      add("sweep", quoted(sweep));
      if (sweep == "epsilon") {
        add("epsilons", "[" + join(epsilons) + "]");
      } else {
        add("particles", "[" + join(particles) + "]");
      }
      add("seeds", std::to_string(seeds));
      add("threshold", format_number(threshold));
      add("window", std::to_string(window));
      break;
    case Command::CoarseGrain:
      add("block", std::to_string(block));
      add("renormalise", renormalise ? "true" : "false");
      add("min-blocks", std::to_string(min_blocks));
      break;
    case Command::OracleCheck:
      add("runs", std::to_string(runs));
      add("channel-runs", std::to_string(channel_runs));
      add("tv-max", format_number(tv_max));
      add("channel-max", format_number(channel_max));
      add("inject-misordered", inject_misordered ? "true" : "false");
      break;
  }
  return l;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const ModelParams params = config.model_params();
  const LatticeGeometry geometry = config.geometry();
  const InitialState initial = config.initial_state();
  RunOptions options;
  options.policy = config.motion_policy();
  options.keep_final_state = false;
  const bool track = initial.kind == InitialState::Kind::Superposition &&
                     is_permutation_angle(params.theta);
  if (track) options.branches = BranchPair{initial.first, initial.second};
  const TrajectoryRecord record = run_trajectory(geometry, params, initial, options);

  prepare_out_dir(config);
  const FieldRaster fi = field_raster(record);
  const FieldRaster si = stuff_raster(record, config.stuff());
  write_raster(config, fi, "fi", header_lines(config, "field raster (FI), 1 = black"));
  write_raster(config, si, "si", header_lines(config, "stuff raster (SI), darker = more stuff"));

  std::vector<std::string> header{"step",  "row",   "col",   "slot_a",      "slot_b",
                                  "bit_a", "bit_b", "stuff_a", "stuff_b", "probability",
                                  "cumulative_log_weight"};
  if (track) {
    header.push_back("weight_first");
    header.push_back("weight_second");
  }
  CsvTable events(header, header_lines(config, "events"));
  const bool post = config.stuff() == StuffSurface::PostHit;
  for (const StepEvent& ev : record.events) {
    const auto& s = post ? ev.stuff_post : ev.stuff_pre;
    std::vector<std::string> row{std::to_string(ev.step),        std::to_string(ev.vertex.row),
                                 std::to_string(ev.vertex.col),  std::to_string(ev.slots.a),
                                 std::to_string(ev.slots.b),     std::to_string(ev.outcome.bit_a),
                                 std::to_string(ev.outcome.bit_b), format_number(s[0]),
                                 format_number(s[1]),            format_number(ev.probability),
                                 format_number(ev.cumulative_log_weight)};
    if (track) {
      row.push_back(format_number((*ev.branch_weights)[0]));
      row.push_back(format_number((*ev.branch_weights)[1]));
    }
    events.add_row(std::move(row));
  }
  write_file(config.out_dir / "events.csv", events.encode());

  out << "steps " << record.events.size() << ", rows " << fi.rows << "\n";
  out << "mean |SI - FI| " << format_number(mean_abs_difference(si, fi)) << "\n";
  out << "kernels " << kernels::active().name << "\n";
  return kOk;
}

int cmd_decay(const RunConfig& config, std::ostream& out) {
  const bool by_epsilon = config.sweep == "epsilon";
  DecayEnsembleOptions options;
  options.n_sites = *config.n_sites;
  options.max_rows = *config.rows;
  options.seeds = config.seeds;
  options.threshold = config.threshold;
  options.window = config.window;

  const std::vector<std::string> comments = header_lines(config, "decay sweep");
  CsvTable runs({"sweep", "value", "seed", "t_decay", "detected", "confirmed"}, comments);
  CsvTable summary({"sweep", "value", "epsilon", "particles", "seeds", "detected", "confirmed",
                    "median_t_decay", "note"},
                   comments);
  std::vector<std::array<double, 2>> points;

  const std::size_t n_points = by_epsilon ? config.epsilons.size() : config.particles.size();
  for (std::size_t i = 0; i < n_points; ++i) {
    ModelParams params = config.model_params();
    BranchPair branches;
    int l = 1;
    double value = 0.0;
    if (by_epsilon) {
      params.x = 1.0 - config.epsilons[i];
      const InitialState s = config.initial_state();
      branches = {s.first, s.second};
      l = std::abs(s.first.occupation() - s.second.occupation());
      value = config.epsilons[i];
    } else {
      l = config.particles[i];
      branches = left_right_branches(*config.n_sites, l);
      value = l;
    }
    const auto results = decay_ensemble(params, branches, l, options);
    long long detected = 0;
    long long confirmed = 0;
    for (const DecayResult& r : results) {
      detected += r.detected;
      confirmed += r.confirmed;
      runs.add_row({config.sweep, format_number(value), std::to_string(r.params.seed),
                    r.detected ? format_number(r.t_decay) : "", r.detected ? "1" : "0",
                    r.confirmed ? "1" : "0"});
    }
    const double median = median_decay(results);
    std::string note;
    if (!by_epsilon && l == 1) note = "small particle number; expected to sit low";
    if (confirmed < static_cast<long long>(results.size())) {
      if (!note.empty()) note += "; ";
      note += std::to_string(results.size() - static_cast<std::size_t>(confirmed)) + " unconfirmed";
    }
    summary.add_row({config.sweep, format_number(value), format_number(params.epsilon()),
                     std::to_string(l), std::to_string(results.size()), std::to_string(detected),
                     std::to_string(confirmed), format_number(median), note});
    out << config.sweep << " " << format_number(value) << ": median t_decay "
        << format_number(median) << " rows (" << confirmed << "/" << results.size()
        << " confirmed)\n";
    if (std::isfinite(median)) points.push_back({value, median});
  }

  prepare_out_dir(config);
  write_file(config.out_dir / "decay_runs.csv", runs.encode());
  write_file(config.out_dir / "decay_summary.csv", summary.encode());
  if (points.size() < 3) {
    out << "fit skipped: fewer than 3 points with a finite median\n";
    return kRuntime;
  }
  const LogLogFit fit = fit_loglog(points);
  CsvTable fit_table({"sweep", "slope", "intercept", "r2", "points"}, comments);
  fit_table.add_row({config.sweep, format_number(fit.slope), format_number(fit.intercept),
                     format_number(fit.r2), std::to_string(points.size())});
  write_file(config.out_dir / "decay_fit.csv", fit_table.encode());
  out << "fit log t_decay vs log " << (by_epsilon ? "epsilon" : "l") << ": slope "
      << format_number(fit.slope) << ", r2 " << format_number(fit.r2) << "\n";
  return kOk;
}

int cmd_coarse_grain(const RunConfig& config, std::ostream& out) {
  const ModelParams params = config.model_params();
  const LatticeGeometry geometry = config.geometry();
  const InitialState initial = config.initial_state();
  RunOptions options;
  options.policy = config.motion_policy();
  options.keep_final_state = false;
  const TrajectoryRecord record = run_trajectory(geometry, params, initial, options);
  const FieldRaster fi = field_raster(record);
  CoarseGrid grid = coarse_grain(fi, config.block);
  if (config.renormalise) renormalise(grid, params.x);

  prepare_out_dir(config);
  const std::vector<std::string> comments = header_lines(config, "coarse grain");
  CsvTable blocks({"block_row", "block_col", "mean", "renormalised"}, comments);
  for (int br = 0; br < grid.block_rows; ++br) {
    for (int bc = 0; bc < grid.block_cols; ++bc) {
      const std::size_t i = static_cast<std::size_t>(br) * grid.block_cols + bc;
      blocks.add_row({std::to_string(br), std::to_string(bc), format_number(grid.means[i]),
                      config.renormalise ? format_number(grid.renormalised[i]) : ""});
    }
  }
  write_file(config.out_dir / "blocks.csv", blocks.encode());
  out << "blocks " << grid.blocks() << " of " << grid.cells_per_block() << " cells; discarded "
      << grid.discarded_rows << " rows and " << grid.discarded_cols << " columns at the edges\n";

  if (config.renormalise && grid.blocks() > 0) {
    const auto [lo_it, hi_it] = std::minmax_element(grid.renormalised.begin(), grid.renormalised.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    FieldRaster image;
    image.kind = RasterKind::Stuff;
    image.rows = grid.block_rows;
    image.cols = grid.block_cols;
    image.cells.resize(grid.renormalised.size());
    for (std::size_t i = 0; i < image.cells.size(); ++i) {
      image.cells[i] = hi > lo ? (grid.renormalised[i] - lo) / (hi - lo) : 0.0;
    }
    std::vector<std::string> c = header_lines(config, "renormalised field");
    c.push_back("map: renormalised = " + format_number(lo) + " + " + format_number(hi - lo) +
                " * (1 - byte / 255)");
    write_raster(config, image, "renormalised", c);
  }

  if (initial.kind == InitialState::Kind::Eigenstate && initial.first.occupation() == 0) {
    const VacuumStatistics s = vacuum_statistics(params, geometry, config.block, config.min_blocks);
    CsvTable table({"blocks", "cells_per_block", "mean", "expected_mean", "mean_se", "variance",
                    "expected_variance", "variance_se", "links", "link_frequency",
                    "frequency_se", "verdict"},
                   comments);
    table.add_row({std::to_string(s.blocks), std::to_string(s.cells_per_block),
                   format_number(s.mean), format_number(s.expected_mean), format_number(s.mean_se),
                   format_number(s.variance), format_number(s.expected_variance),
                   format_number(s.variance_se), std::to_string(s.links),
                   format_number(s.frequency()), format_number(s.frequency_se),
                   s.pass() ? "pass" : "fail"});
    write_file(config.out_dir / "vacuum.csv", table.encode());
    out << "vacuum statistics over " << s.blocks << " blocks: mean " << format_number(s.mean)
        << " (expected " << format_number(s.expected_mean) << "), variance "
        << format_number(s.variance) << " (expected " << format_number(s.expected_variance)
        << "), link frequency " << format_number(s.frequency()) << ": "
        << (s.pass() ? "pass" : "fail") << "\n";
  }
  return kOk;
}

int cmd_oracle_check(const RunConfig& config, std::ostream& out) {
  const ModelParams params = config.model_params();
  const LatticeGeometry geometry = config.geometry();
  const InitialState initial = config.initial_state();
  bool ok = true;
  auto report = [&](const std::string& name, bool pass, const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    ok = ok && pass;
  };

  const CovarianceReport cov = check_covariance(initial.build(), *config.n_sites, *config.rows, 4,
                                                params, config.inject_misordered);
  report("covariance",
         cov.max_labelling_difference <= 1e-12 && cov.max_sum_error <= 1e-10 &&
             cov.max_picture_difference <= 1e-12,
         std::to_string(cov.stems) + " stems, " + std::to_string(cov.labellings) +
             " labellings, max labelling difference " + format_number(cov.max_labelling_difference) +
             ", max |sum - 1| " + format_number(cov.max_sum_error) + ", max picture difference " +
             format_number(cov.max_picture_difference));

  const SamplerReport sampler =
      compare_sampler(geometry, params, initial, config.runs, config.motion_policy());
  report("sampler", sampler.total_variation < config.tv_max,
         "total variation " + format_number(sampler.total_variation) + " over " +
             std::to_string(sampler.runs) + " runs (sampling noise about " +
             format_number(sampler.expected_total_variation) + ", limit " +
             format_number(config.tv_max) + ")");

  const ChannelReport channel = compare_channel(geometry, params, initial, config.channel_runs);
  report("channel", channel.max_abs_error < config.channel_max && channel.channel_density.valid(),
         "max elementwise error " + format_number(channel.max_abs_error) + " over " +
             std::to_string(channel.runs) + " runs, channel min eigenvalue " +
             format_number(channel.channel_density.min_eigenvalue));
  return ok ? kOk : kCheckFailed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  CLI::App app{"Collapse dynamics on a periodic null lattice", "collapse-lattice"};
  app.set_config("--config", "", "Read `key = value` settings; flags on the command line win");
  app.require_subcommand(1);

  app.add_option("--n-sites", config.n_sites, "Vertices per row (N <= 12)");
  app.add_option("--rows", config.rows, "Vertex rows to evolve (decay: row cap)");
  app.add_option("--theta", config.theta, "R-matrix angle, number or multiple of pi (e.g. pi/6)");
  app.add_option("--phase-alpha", config.phase_alpha, "Single-particle phase");
  app.add_option("--phase-beta", config.phase_beta, "Two-particle phase");
  auto* x_opt = app.add_option("--x", config.x, "Jump parameter X in [0, 1]");
  auto* eps_opt = app.add_option("--epsilon", config.epsilon, "Collapse strength 1 - X");
  x_opt->excludes(eps_opt);
  app.add_option("--seed", config.seed, "RNG seed");
  app.add_option("--initial", config.initial,
                 "vacuum | eigen:BITS | superposition:A,B | single-link | left-right:L");
  app.add_option("--policy", config.policy, "markov | sweep");
  app.add_option("--stuff-surface", config.stuff_surface, "Stuff read after (post) or before (pre) the hit");
  app.add_option("--out-dir", config.out_dir, "Output directory");
  app.add_option("--format", config.format, "Raster format: pgm | csv");
  app.add_option("--sweep", config.sweep, "decay: epsilon | particles");
  app.add_option("--epsilons", config.epsilons, "decay: epsilon values")->delimiter(',');
  app.add_option("--particles", config.particles, "decay: particle counts")->delimiter(',');
  app.add_option("--seeds", config.seeds, "decay: trajectories per point");
  app.add_option("--threshold", config.threshold, "decay: branch weight threshold");
  app.add_option("--window", config.window, "decay: confirmation window in steps (-1: 5 N^2)");
  app.add_option("--block", config.block, "coarse-grain: block size m in vertices");
  app.add_flag("--renormalise,!--no-renormalise", config.renormalise,
               "coarse-grain: write the renormalised field");
  app.add_option("--min-blocks", config.min_blocks, "coarse-grain: blocks for vacuum statistics");
  app.add_option("--runs", config.runs, "oracle-check: sampler trajectories");
  app.add_option("--channel-runs", config.channel_runs, "oracle-check: channel trajectories");
  app.add_option("--tv-max", config.tv_max, "oracle-check: total variation limit");
  app.add_option("--channel-max", config.channel_max, "oracle-check: channel error limit");
  app.add_flag("--inject-misordered", config.inject_misordered,
               "oracle-check: also evaluate reversed labellings (negative control)");

  const std::array commands{Command::Simulate, Command::Decay, Command::CoarseGrain,
                            Command::OracleCheck};
  const std::array<const char*, 4> help{"Run one trajectory; write FI/SI rasters and events",
                                        "Decay-time sweep over epsilon or particle number",
                                        "Block means, renormalised field and vacuum statistics",
                                        "Compare the sampler against exact small-lattice results"};
  for (std::size_t i = 0; i < commands.size(); ++i) {
    auto* sub = app.add_subcommand(to_string(commands[i]), help[i]);
    sub->fallthrough();
    sub->callback([&config, c = commands[i]] { config.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : kValidation;
  }

  try {
    config.apply_defaults();
    config.validate();
    switch (config.command) {
      case Command::Simulate: return cmd_simulate(config, out);
      case Command::Decay: return cmd_decay(config, out);
      case Command::CoarseGrain: return cmd_coarse_grain(config, out);
      case Command::OracleCheck: return cmd_oracle_check(config, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kRuntime;
}

}  // namespace collapse::cli
