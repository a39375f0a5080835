#include "collapse/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "collapse/parallel.hpp"

namespace collapse {

namespace {

// Cells of completed rows; `value(ev, side)` supplies the cell for slot a
// (side 0) or slot b (side 1) of each event.
template <typename Value>
FieldRaster build_raster(const TrajectoryRecord& record, RasterKind kind, Value value) {
  const int cols = record.geometry.n_slots();
  const int rows = record.geometry.n_rows;
  std::vector<double> cells(static_cast<std::size_t>(rows) * cols, 0.0);
  std::vector<int> filled(static_cast<std::size_t>(rows), 0);
  for (std::size_t i = 0; i < record.events.size(); ++i) {
    const StepEvent& ev = record.events[i];
    const std::size_t r = static_cast<std::size_t>(ev.vertex.row - 1);
    cells[r * cols + ev.slots.a] = value(i, 0);
    cells[r * cols + ev.slots.b] = value(i, 1);
    ++filled[r];
  }
  int complete = 0;
  while (complete < rows && filled[static_cast<std::size_t>(complete)] == record.geometry.n_sites) {
    ++complete;
  }
  FieldRaster raster;
  raster.kind = kind;
  raster.rows = complete;
  raster.cols = cols;
  cells.resize(static_cast<std::size_t>(complete) * cols);
  raster.cells = std::move(cells);
  return raster;
}

void require_same_shape(const FieldRaster& a, const FieldRaster& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw AnalysisError("raster shapes differ");
  if (a.cells.empty()) throw AnalysisError("rasters are empty");
}

double chi_square_sf(double x, int dof) { return boost::math::gamma_q(0.5 * dof, 0.5 * x); }

}  // namespace

FieldRaster field_raster(const TrajectoryRecord& record) {
  return build_raster(record, RasterKind::Field, [&](std::size_t i, int side) {
    const KrausOutcome& o = record.events[i].outcome;
    return static_cast<double>(side == 0 ? o.bit_a : o.bit_b);
  });
}

FieldRaster stuff_raster(const TrajectoryRecord& record, StuffSurface surface) {
  return build_raster(record, RasterKind::Stuff, [&](std::size_t i, int side) {
    const StepEvent& ev = record.events[i];
    const auto& pair = surface == StuffSurface::PreHit ? ev.stuff_pre : ev.stuff_post;
    return std::clamp(pair[static_cast<std::size_t>(side)], 0.0, 1.0);
  });
}

FieldRaster unitary_raster(const TrajectoryRecord& record) {
  const auto stuff = unitary_reference_stuff(record);
  return build_raster(record, RasterKind::Stuff, [&](std::size_t i, int side) {
    return std::clamp(stuff[i][static_cast<std::size_t>(side)], 0.0, 1.0);
  });
}

double mean_abs_difference(const FieldRaster& a, const FieldRaster& b) {
  require_same_shape(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) sum += std::abs(a.cells[i] - b.cells[i]);
  return sum / static_cast<double>(a.cells.size());
}

double max_abs_difference(const FieldRaster& a, const FieldRaster& b) {
  require_same_shape(a, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    worst = std::max(worst, std::abs(a.cells[i] - b.cells[i]));
  }
  return worst;
}

DirectionStats direction_changes(const TrajectoryRecord& record) {
  if (record.initial.kind != InitialState::Kind::Eigenstate) {
    throw AnalysisError("direction tracking needs an eigenstate initial condition");
  }
  std::vector<int> bits(static_cast<std::size_t>(record.geometry.n_slots()));
  for (int k = 0; k < record.geometry.n_slots(); ++k) bits[k] = record.initial.first[k];
  DirectionStats stats;
  for (const StepEvent& ev : record.events) {
    int& in_a = bits[static_cast<std::size_t>(ev.slots.a)];
    int& in_b = bits[static_cast<std::size_t>(ev.slots.b)];
    if (in_a + in_b == 1 && ev.outcome.bit_a + ev.outcome.bit_b == 1) {
      ++stats.crossings;
      if (in_a == ev.outcome.bit_a) ++stats.changes;
    }
    in_a = ev.outcome.bit_a;
    in_b = ev.outcome.bit_b;
  }
  return stats;
}

ChiSquare chi_square_bernoulli(long long ones, long long total, double p) {
  if (total <= 0 || ones < 0 || ones > total) throw AnalysisError("invalid Bernoulli counts");
  if (!(p > 0.0 && p < 1.0)) throw AnalysisError("Bernoulli probability must lie in (0, 1)");
  const double n = static_cast<double>(total);
  const double e1 = n * p;
  const double e0 = n * (1.0 - p);
  const double o1 = static_cast<double>(ones);
  const double o0 = n - o1;
  ChiSquare c;
  c.statistic = (o1 - e1) * (o1 - e1) / e1 + (o0 - e0) * (o0 - e0) / e0;
  c.dof = 1;
  c.p_value = chi_square_sf(c.statistic, 1);
  return c;
}

DecayResult detect_decay(const std::vector<double>& series, double threshold, long long window,
                         int n_sites) {
  if (n_sites <= 0) throw AnalysisError("n_sites must be positive");
  if (window < 0) window = 5LL * n_sites * n_sites;
  DecayResult result;
  result.threshold = threshold;
  const long long n = static_cast<long long>(series.size());
  for (long long i = 0; i < n; ++i) {
    if (series[static_cast<std::size_t>(i)] > threshold) continue;
    long long j = i;
    while (j < n && j - i <= window && series[static_cast<std::size_t>(j)] <= threshold) ++j;
    const bool held = j - i > window;
    if (held || j == n) {
      result.detected = true;
      result.confirmed = held;
      result.t_decay = static_cast<double>(i + 1) / n_sites;
      return result;
    }
    i = j;  // weight recovered at j; resume after it
  }
  return result;
}

DecayResult detect_decay(const std::vector<std::array<double, 2>>& series, double threshold,
                         long long window, int n_sites) {
  std::vector<double> smaller(series.size());
  std::transform(series.begin(), series.end(), smaller.begin(),
                 [](const std::array<double, 2>& w) { return std::min(w[0], w[1]); });
  return detect_decay(smaller, threshold, window, n_sites);
}

LogLogFit fit_loglog(const std::vector<std::array<double, 2>>& points) {
  if (points.size() < 3) throw AnalysisError("log-log fit needs at least 3 points");
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& p : points) {
    if (!(p[0] > 0.0) || !(p[1] > 0.0) || !std::isfinite(p[0]) || !std::isfinite(p[1])) {
      throw AnalysisError("log-log fit needs finite positive values");
    }
    lx.push_back(std::log(p[0]));
    ly.push_back(std::log(p[1]));
  }
  const double n = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw AnalysisError("log-log fit needs distinct x values");
  LogLogFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

BranchPair single_link_branches(int n_sites) {
  FieldConfig empty = FieldConfig::zeros(2 * n_sites);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(2 * n_sites), 0);
  bits[0] = 1;
  return {FieldConfig(std::move(bits)), std::move(empty)};
}

BranchPair left_right_branches(int n_sites, int l) {
  if (l < 1 || l > n_sites) {
    throw AnalysisError("particle count must lie in [1, " + std::to_string(n_sites) + "]");
  }
  std::vector<std::uint8_t> left(static_cast<std::size_t>(2 * n_sites), 0);
  std::vector<std::uint8_t> right(left.size(), 0);
  for (int k = 0; k < l; ++k) {
    left[static_cast<std::size_t>(k)] = 1;
    right[static_cast<std::size_t>(n_sites + k)] = 1;
  }
  return {FieldConfig(std::move(left)), FieldConfig(std::move(right))};
}

std::vector<DecayResult> decay_ensemble(const ModelParams& params, const BranchPair& branches,
                                        int particle_count, const DecayEnsembleOptions& options) {
  if (options.seeds <= 0) throw AnalysisError("decay ensemble needs at least one seed");
  const LatticeGeometry geometry = LatticeGeometry::make(options.n_sites, options.max_rows);
  const InitialState initial = InitialState::superposition(branches.first, branches.second);
  std::vector<DecayResult> results(static_cast<std::size_t>(options.seeds));
  parallel_for(
      results.size(),
      [&](std::size_t i) {
        ModelParams p = params;
        p.seed = params.seed + i;
        RunOptions run;
        run.branches = branches;
        run.decay_stop = DecayStop{options.threshold, options.window};
        run.keep_final_state = false;
        const TrajectoryRecord record = run_trajectory(geometry, p, initial, run);
        std::vector<double> smaller;
        smaller.reserve(record.events.size());
        for (const StepEvent& ev : record.events) {
          smaller.push_back(std::min((*ev.branch_weights)[0], (*ev.branch_weights)[1]));
        }
        DecayResult r = detect_decay(smaller, options.threshold, options.window, options.n_sites);
        r.params = p;
        r.particle_count = particle_count;
        results[i] = r;
      },
      options.workers);
  return results;
}

double median_decay(const std::vector<DecayResult>& results) {
  if (results.empty()) throw AnalysisError("median of an empty ensemble");
  std::vector<double> t;
  for (const DecayResult& r : results) {
    t.push_back(r.detected ? r.t_decay : std::numeric_limits<double>::infinity());
  }
  std::sort(t.begin(), t.end());
  const std::size_t n = t.size();
  const double median = n % 2 == 1 ? t[n / 2] : 0.5 * (t[n / 2 - 1] + t[n / 2]);
  return std::isfinite(median) ? median : std::numeric_limits<double>::quiet_NaN();
}

CoarseGrid coarse_grain(const FieldRaster& raster, int m) {
  if (m < 1) throw AnalysisError("block size must be at least 1");
  if (m > raster.rows || 2 * m > raster.cols) {
    throw AnalysisError("block size " + std::to_string(m) + " exceeds raster of " +
                        std::to_string(raster.rows) + " rows by " + std::to_string(raster.cols) +
                        " cells");
  }
  CoarseGrid grid;
  grid.m = m;
  grid.block_rows = raster.rows / m;
  grid.block_cols = raster.cols / (2 * m);
  grid.discarded_rows = raster.rows - grid.block_rows * m;
  grid.discarded_cols = raster.cols - grid.block_cols * 2 * m;
  grid.means.assign(static_cast<std::size_t>(grid.blocks()), 0.0);
  const double cells = static_cast<double>(grid.cells_per_block());
  for (int br = 0; br < grid.block_rows; ++br) {
    for (int bc = 0; bc < grid.block_cols; ++bc) {
      double sum = 0.0;
      for (int r = br * m; r < (br + 1) * m; ++r) {
        for (int c = bc * 2 * m; c < (bc + 1) * 2 * m; ++c) sum += raster.at(r, c);
      }
      grid.means[static_cast<std::size_t>(br) * grid.block_cols + bc] = sum / cells;
    }
  }
  return grid;
}

double vacuum_probability(double x) { return x * x / (1.0 + x * x); }

void renormalise(CoarseGrid& grid, double x) {
  const double eps = 1.0 - x;
  if (eps == 0.0) throw AnalysisError("renormalised field is undefined at epsilon = 0 (X = 1)");
  if (!(x >= 0.0 && x <= 1.0)) throw AnalysisError("X must lie in [0, 1]");
  const double mu = vacuum_probability(x);
  grid.epsilon = eps;
  grid.renormalised.resize(grid.means.size());
  for (std::size_t i = 0; i < grid.means.size(); ++i) {
    grid.renormalised[i] = (grid.means[i] - mu) / eps;
  }
}

double unrenormalise(double value, double x) {
  return (1.0 - x) * value + vacuum_probability(x);
}

VacuumStatistics block_statistics(const std::vector<CoarseGrid>& grids,
                                  const std::vector<FieldRaster>& rasters, double x) {
  VacuumStatistics s;
  std::vector<double> means;
  for (const CoarseGrid& g : grids) {
    if (!means.empty() && g.cells_per_block() != s.cells_per_block) {
      throw AnalysisError("grids use different block sizes");
    }
    s.cells_per_block = g.cells_per_block();
    means.insert(means.end(), g.means.begin(), g.means.end());
  }
  if (means.size() < 2) throw AnalysisError("block statistics need at least two blocks");
  s.blocks = static_cast<long long>(means.size());
  const double b = static_cast<double>(s.blocks);
  s.mean = std::accumulate(means.begin(), means.end(), 0.0) / b;
  double ss = 0.0;
  for (double v : means) ss += (v - s.mean) * (v - s.mean);
  s.variance = ss / (b - 1.0);

  const double p = vacuum_probability(x);
  const double q = 1.0 - p;
  const double k = static_cast<double>(s.cells_per_block);
  s.expected_mean = p;
  s.expected_variance = p * q / k;
  s.mean_se = std::sqrt(s.expected_variance / b);
  // Fourth central moment of a binomial(K, p) count, scaled to the block mean.
  const double mu4 = k * p * q * (1.0 + 3.0 * (k - 2.0) * p * q) / (k * k * k * k);
  const double var2 = s.expected_variance * s.expected_variance;
  s.variance_se = std::sqrt(std::max(0.0, (mu4 - var2 * (b - 3.0) / (b - 1.0)) / b));

  for (const FieldRaster& r : rasters) {
    s.links += static_cast<long long>(r.cells.size());
    for (double c : r.cells) s.ones += c > 0.5 ? 1 : 0;
  }
  if (s.links > 0) s.frequency_se = std::sqrt(p * q / static_cast<double>(s.links));
  return s;
}

VacuumStatistics vacuum_statistics(const ModelParams& params, const LatticeGeometry& geometry,
                                   int m, long long min_blocks) {
  const InitialState vacuum = InitialState::vacuum(geometry.n_slots());
  std::vector<CoarseGrid> grids;
  std::vector<FieldRaster> rasters;
  long long blocks = 0;
  for (std::uint64_t i = 0; blocks < min_blocks; ++i) {
    ModelParams p = params;
    p.seed = params.seed + i;
    RunOptions run;
    run.keep_final_state = false;
    const TrajectoryRecord record = run_trajectory(geometry, p, vacuum, run);
    rasters.push_back(field_raster(record));
    grids.push_back(coarse_grain(rasters.back(), m));
    if (grids.back().blocks() == 0) throw AnalysisError("lattice too small for one block");
    blocks += grids.back().blocks();
  }
  return block_statistics(grids, rasters, params.x);
}

GrwEstimate grw_parameter_estimate(double t_decay, double t0, double k, double capital_k,
                                   std::optional<double> x0_cm) {
  const double x0 = x0_cm.value_or(kSpeedOfLightCm * t0);
  for (double v : {t_decay, t0, k, capital_k, x0}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw AnalysisError("calculator inputs must be finite and positive");
    }
  }
  GrwEstimate e;
  e.epsilon = std::sqrt(k * t0 / t_decay);
  e.m = capital_k / e.epsilon;
  e.x_discrim_cm = capital_k / std::sqrt(k) * x0 * std::sqrt(t_decay / t0);
  return e;
}

}  // namespace collapse
