#pragma once

// Post-processing of trajectory records: FI/SI rasters, decay times and
// scaling fits, coarse graining with vacuum statistics, and the lattice-scale
// calculator.

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "collapse/dynamics.hpp"

namespace collapse {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RasterKind { Field, Stuff };

/// One cell per link: row r holds the links leaving vertex row r + 1, column k
/// is register slot k. Only rows the record completed are included.
struct FieldRaster {
  RasterKind kind = RasterKind::Field;
  int rows = 0;
  int cols = 0;
  std::vector<double> cells;  // row-major, FI in {0, 1}, SI in [0, 1]

  double at(int r, int c) const { return cells[static_cast<std::size_t>(r) * cols + c]; }
  double& at(int r, int c) { return cells[static_cast<std::size_t>(r) * cols + c]; }
};

FieldRaster field_raster(const TrajectoryRecord& record);
FieldRaster stuff_raster(const TrajectoryRecord& record,
                         StuffSurface surface = StuffSurface::PostHit);

/// Stuff of a unitary-only evolution along the record's vertex sequence.
FieldRaster unitary_raster(const TrajectoryRecord& record);

double mean_abs_difference(const FieldRaster& a, const FieldRaster& b);
double max_abs_difference(const FieldRaster& a, const FieldRaster& b);

/// FI crossings with exactly one particle in and one out. A particle that
/// leaves on the slot it came in on has reversed direction.
struct DirectionStats {
  long long crossings = 0;
  long long changes = 0;
  double frequency() const {
    return crossings > 0 ? static_cast<double>(changes) / static_cast<double>(crossings) : 0.0;
  }
};

DirectionStats direction_changes(const TrajectoryRecord& record);

struct ChiSquare {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Pearson test of `ones` successes in `total` trials against P(1) = p.
ChiSquare chi_square_bernoulli(long long ones, long long total, double p);

// --- decay times ------------------------------------------------------------

struct DecayResult {
  ModelParams params;
  int particle_count = 0;
  double t_decay = 0.0;  // vertex rows crossed (steps / N)
  double threshold = 0.005;
  bool detected = false;
  bool confirmed = false;
};

/// First step whose weight is <= threshold and stays there for `window`
/// further steps. A crossing still below threshold when the series ends is
/// reported unconfirmed; a series that never crosses is not detected.
DecayResult detect_decay(const std::vector<double>& series, double threshold, long long window,
                         int n_sites);

/// Tracks the smaller of the two branch weights.
DecayResult detect_decay(const std::vector<std::array<double, 2>>& series, double threshold,
                         long long window, int n_sites);

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares on (log x, log y). Needs >= 3 points, all positive.
LogLogFit fit_loglog(const std::vector<std::array<double, 2>>& points);

/// Particle on slot 0 against the empty register: the two branches differ on
/// a single link.
BranchPair single_link_branches(int n_sites);

/// l particles on slots [0, l) against l particles on slots [N, N + l).
BranchPair left_right_branches(int n_sites, int l);

struct DecayEnsembleOptions {
  int n_sites = 8;
  int max_rows = 4000;
  int seeds = 50;
  double threshold = 0.005;
  long long window = -1;  // -1 selects 5 N^2
  int workers = 0;
};

/// One trajectory per seed params.seed + i, started from the equal-weight
/// superposition of the branches.
std::vector<DecayResult> decay_ensemble(const ModelParams& params, const BranchPair& branches,
                                        int particle_count, const DecayEnsembleOptions& options);

/// Median t_decay, undetected runs counting as infinitely late. NaN when the
/// median itself is undetected.
double median_decay(const std::vector<DecayResult>& results);

// --- coarse graining ----------------------------------------------------------

struct CoarseGrid {
  int m = 1;
  int block_rows = 0;
  int block_cols = 0;
  int discarded_rows = 0;
  int discarded_cols = 0;
  std::vector<double> means;  // row-major block means
  std::optional<double> epsilon;
  std::vector<double> renormalised;

  int cells_per_block() const { return 2 * m * m; }
  long long blocks() const { return static_cast<long long>(block_rows) * block_cols; }
};

/// Blocks of m vertex rows by 2m link columns; partial edge blocks dropped.
CoarseGrid coarse_grain(const FieldRaster& raster, int m);

/// Fills eps^-1 (mean - X^2/(1+X^2)). Throws AnalysisError for eps = 0.
void renormalise(CoarseGrid& grid, double x);

double unrenormalise(double value, double x);

double vacuum_probability(double x);

struct VacuumStatistics {
  long long blocks = 0;
  int cells_per_block = 0;
  double mean = 0.0;
  double variance = 0.0;
  double expected_mean = 0.0;
  double expected_variance = 0.0;
  double mean_se = 0.0;
  double variance_se = 0.0;
  long long links = 0;
  long long ones = 0;
  double frequency_se = 0.0;

  double frequency() const { return links > 0 ? static_cast<double>(ones) / links : 0.0; }
  bool mean_ok() const { return std::abs(mean - expected_mean) <= 3.0 * mean_se; }
  bool variance_ok() const { return std::abs(variance - expected_variance) <= 3.0 * variance_se; }
  bool frequency_ok() const {
    return std::abs(frequency() - expected_mean) <= 3.0 * frequency_se;
  }
  bool pass() const { return mean_ok() && variance_ok() && frequency_ok(); }
};

/// Block means compared with the binomial law for 2m^2 independent links of
/// P(1) = X^2/(1+X^2).
VacuumStatistics block_statistics(const std::vector<CoarseGrid>& grids,
                                  const std::vector<FieldRaster>& rasters, double x);

/// Vacuum trajectories with seeds params.seed + i until min_blocks blocks.
VacuumStatistics vacuum_statistics(const ModelParams& params, const LatticeGeometry& geometry,
                                   int m, long long min_blocks);

// --- lattice-scale calculator -------------------------------------------------

inline constexpr double kSpeedOfLightCm = 2.99792458e10;

struct GrwEstimate {
  double epsilon = 0.0;
  double m = 0.0;
  double x_discrim_cm = 0.0;
};

/// eps = sqrt(k T0 / T_decay), m = K / eps, X_discrim = m X0. X0 defaults to
/// c T0.
GrwEstimate grw_parameter_estimate(double t_decay, double t0, double k, double capital_k,
                                   std::optional<double> x0_cm = std::nullopt);

}  // namespace collapse
