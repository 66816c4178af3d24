#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "teleqcp/chain_models.hpp"
#include "teleqcp/correlators.hpp"
#include "teleqcp/teleport.hpp"

namespace teleqcp {

/// Uniform grid lo, lo + step, ..., up to hi (inclusive, 1e-9 step slack).
/// When lo is a multiple of step the points are computed as n * step so that
/// values like 0 and 0.37 come out as the nearest doubles.
std::vector<double> make_grid(double lo, double hi, double step);

enum class BackendKind { Ed, XyIntegral };

struct BackendSpec {
  BackendKind kind = BackendKind::XyIntegral;
  int sites = 12;
  EdConfig ed;
  XyIntegralOptions xy;

  static BackendSpec exact_diagonalization(int sites) { return {BackendKind::Ed, sites, {}, {}}; }
  static BackendSpec xy_integral() { return {BackendKind::XyIntegral, 0, {}, {}}; }
};

std::string_view to_string(BackendKind kind);

struct SweepRequest {
  /// Fixed parameters of the family; the swept one is overwritten per grid point.
  ModelSpec base = XyModel{1.0, 1.0};
  SweepParameter parameter = SweepParameter::Lambda;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.01;
  std::vector<double> kts;
  BackendSpec backend;
  /// 0 means std::thread::hardware_concurrency().
  int workers = 0;
  /// ED only: compare the partial trace of the thermal state with the X-form
  /// assembly at every point and record the worst deviation.
  bool check_partial_trace = false;
};

struct SweepPoint {
  CorrelatorSet correlators;
  FidelityReport fmax;
  FidelityReport favg;
  /// max over input states for each set, in set order Psi-, Psi+, Phi-, Phi+.
  std::array<double, 4> per_set{};
};

struct SweepSeries {
  double kT = 0.0;
  std::vector<SweepPoint> points;  // one per grid value
};

struct SweepResult {
  std::string family;
  SweepParameter parameter = SweepParameter::Lambda;
  double step = 0.0;
  std::vector<double> grid;
  std::vector<SweepSeries> series;  // request order of kT
  /// Largest |partial trace - assembled X state| entry; set only when checked.
  std::optional<double> partial_trace_deviation;
};

/// Detector values for one correlator set.
SweepPoint evaluate_point(const CorrelatorSet& c);

/// Evaluates every grid point for every kT. Grid points are distributed over
/// worker threads; the result does not depend on the worker count.
SweepResult sweep(const SweepRequest& request);

/// Central differences inside; four-point one-sided ones at both ends
/// (three-point for a three-value series).
/// Order 2 differentiates the order-1 series again.
std::vector<double> numeric_derivative(const std::vector<double>& values, double step, int order);

struct Extremum {
  double location = 0.0;
  double accuracy = 0.0;
  std::size_t index = 0;
  double value = 0.0;
  /// Several grid points share the maximal magnitude; the leftmost is reported.
  bool degenerate = false;
  /// The extremum sits on the first or last usable point of the window.
  bool at_window_edge = false;
};

/// Grid point of largest |value| inside [lo, hi]. `order` only sets the
/// accuracy (one step for order 1, two for order 2). When `usable` is
/// non-empty, points flagged false are skipped.
Extremum locate_extremum(const std::vector<double>& grid, const std::vector<double>& values, double lo,
                         double hi, int order, const std::vector<bool>& usable = {});

/// False where the derivative stencil of `order` around a point touches a
/// grid point on another detector branch, i.e. differences taken across a cusp.
std::vector<bool> branch_clean_points(const std::vector<Branch>& branches, int order);

enum class FitKind { Linear, Quadratic };
std::string_view to_string(FitKind kind);

struct FitResult {
  FitKind kind = FitKind::Linear;
  std::vector<double> coefficients;  // ascending powers of kT
  double intercept = 0.0;
  /// NaN when the fit has no residual degrees of freedom.
  double intercept_stderr = 0.0;
  std::vector<double> residuals;
  double r_squared = 0.0;
};

/// Least-squares polynomial in kT through (kT, location) points.
FitResult fit_locations(const std::vector<std::pair<double, double>>& points, FitKind kind);

enum class Detector { Fmax, Favg };
std::string_view to_string(Detector d);

struct EstimateOptions {
  Detector quantity = Detector::Fmax;
  int order = 1;
  double window_lo = 0.0;
  double window_hi = 0.0;
  FitKind fit = FitKind::Linear;
  /// Series with kT <= 0 or kT > kt_max are left out of the regression.
  double kt_max = 0.1;
  /// Skip derivative samples whose stencil spans a change of detector branch.
  bool skip_branch_changes = true;
  /// Shrink the window at |xx| = |zz| crossings of the coldest series, keeping
  /// the part that holds the window centre.
  bool cut_at_crossings = true;
  /// Leave out extrema pinned to a window edge while enough others remain
  /// for a fit with residual degrees of freedom.
  bool drop_edge_pinned = true;
};

struct QcpEstimate {
  double value = 0.0;
  FitKind kind = FitKind::Linear;
  int order = 1;
  std::vector<std::pair<double, Extremum>> extrema;  // (kT, extremum) entering the fit
  FitResult fit;
  double intercept_stderr = 0.0;
  /// Window actually searched, after any crossing cut.
  double window_lo = 0.0;
  double window_hi = 0.0;
  /// Edge-pinned extrema left out of the fit, as (kT, extremum).
  std::vector<std::pair<double, Extremum>> dropped;
};

QcpEstimate extrapolate_qcp(const std::vector<std::pair<double, Extremum>>& extrema, FitKind kind, int order);

std::vector<double> detector_series(const SweepSeries& series, Detector d);
std::vector<Branch> detector_branches(const SweepSeries& series, Detector d);

/// [lo, hi] with every |xx| = |zz| crossing of the coldest series cut out:
/// a crossing left of the centre raises lo past it, one right of it lowers hi.
std::pair<double, double> cut_window_at_crossings(const SweepResult& result, double lo, double hi);

/// derivative -> extremum per kT -> regression to kT = 0.
QcpEstimate estimate_qcp(const SweepResult& result, const EstimateOptions& options);

enum class CrossingPair { XxZz, XxYy, YyZz };
std::string_view to_string(CrossingPair p);

struct Crossing {
  double location = 0.0;
  std::size_t index = 0;
};

/// Sign changes of |a| - |b| along the grid. Each crossing is reported at the
/// bracketing grid point with the smaller magnitude difference; exact zeros
/// are reported once.
std::vector<Crossing> crossing_points(const std::vector<double>& grid, const std::vector<double>& a,
                                      const std::vector<double>& b);
std::vector<Crossing> crossing_points(const SweepResult& result, std::size_t series_index, CrossingPair pair);

struct CuspOptions {
  /// A cusp's second difference must exceed this many times the smaller of
  /// the two taken three steps away.
  double contrast = 5.0;
  double floor = 1e-7;
};

/// Interior grid indices where the second difference spikes, i.e. where the
/// first difference jumps.
std::vector<std::size_t> detect_cusps(const std::vector<double>& values, const CuspOptions& options = {});

}  // namespace teleqcp
