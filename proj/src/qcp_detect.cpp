#include "teleqcp/qcp_detect.hpp"

#include <algorithm>
#include <tuple>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include <Eigen/QR>

#include "teleqcp/error.hpp"

namespace teleqcp {
namespace {

struct GridPointResult {
  std::vector<SweepPoint> per_kt;
  double partial_trace_deviation = 0.0;
};

void validate_request(const SweepRequest& request) {
  if (!std::isfinite(request.step) || request.step <= 0.0) {
    throw Error(ErrorCode::InvalidArgument, "step must be > 0");
  }
  if (request.kts.empty()) throw Error(ErrorCode::InvalidArgument, "at least one kT is required");
  for (double kT : request.kts) {
    if (!std::isfinite(kT) || kT < 0.0) throw Error(ErrorCode::InvalidArgument, "kT must be finite and >= 0");
  }
  validate(request.base);
  // Rejects parameters foreign to the family.
  (void)with_parameter(request.base, request.parameter, parameter_value(request.base, request.parameter));
  if (request.backend.kind == BackendKind::XyIntegral && !std::holds_alternative<XyModel>(request.base)) {
    throw Error(ErrorCode::IncompatibleBackend, "the xy-integral backend only serves the XY family");
  }
}

GridPointResult evaluate_grid_point(const SweepRequest& request, double value) {
  const ModelSpec spec = with_parameter(request.base, request.parameter, value);
  validate(spec);
  GridPointResult out;
  out.per_kt.reserve(request.kts.size());

  if (request.backend.kind == BackendKind::XyIntegral) {
    const auto& xy = std::get<XyModel>(spec);
    for (double kT : request.kts) {
      out.per_kt.push_back(evaluate_point(xy_correlators_tl(xy.lambda, xy.gamma, kT, request.backend.xy)));
    }
    return out;
  }

  const EdSpectrum spectrum(spec, request.backend.sites, request.backend.ed);
  const bool xxz = std::holds_alternative<XxzModel>(spec);
  for (double kT : request.kts) {
    const CorrelatorSet c = spectrum.correlators(kT);
    if (request.check_partial_trace) {
      const TwoQubitState traced = spectrum.reduced_two_qubit(kT);
      check_density_matrix(traced);
      const TwoQubitState assembled = xxz ? assemble_xxz_rho(c) : assemble_xy_rho(c);
      out.partial_trace_deviation =
          std::max(out.partial_trace_deviation, (traced.rho - assembled.rho).cwiseAbs().maxCoeff());
    }
    out.per_kt.push_back(evaluate_point(c));
  }
  return out;
}

bool in_window(double x, double lo, double hi, double slack) { return x >= lo - slack && x <= hi + slack; }

}  // namespace

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error(ErrorCode::InvalidArgument, "grid bounds must be finite");
  if (!std::isfinite(step) || step <= 0.0) throw Error(ErrorCode::InvalidArgument, "step must be > 0");
  if (hi < lo) throw Error(ErrorCode::InvalidArgument, "grid upper bound below lower bound");
  const double span = (hi - lo) / step;
  if (span > 1e7) throw Error(ErrorCode::InvalidArgument, "grid has too many points");
  const auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;

  const double n0 = std::round(lo / step);
  const bool aligned = std::abs(lo - n0 * step) <= 1e-9 * step;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) {
    grid[i] = aligned ? (n0 + static_cast<double>(i)) * step : lo + static_cast<double>(i) * step;
  }
  return grid;
}

std::string_view to_string(BackendKind kind) { return kind == BackendKind::Ed ? "ed" : "xy-integral"; }

SweepPoint evaluate_point(const CorrelatorSet& c) {
  SweepPoint p;
  p.correlators = c;
  p.fmax = max_mean_fidelity(c);
  p.favg = max_avg_fidelity(c);
  for (std::size_t k = 0; k < kUnitarySets.size(); ++k) p.per_set[k] = per_set_max_fidelity(c, kUnitarySets[k]).value;
  return p;
}

SweepResult sweep(const SweepRequest& request) {
  validate_request(request);
  SweepResult result;
  result.family = std::string(family_name(request.base));
  result.parameter = request.parameter;
  result.step = request.step;
  result.grid = make_grid(request.lo, request.hi, request.step);

  const std::size_t n = result.grid.size();
  std::vector<GridPointResult> slots(n);
  std::vector<std::exception_ptr> failures(n);

  int workers = request.workers > 0 ? request.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(n, 1)));

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        slots[i] = evaluate_grid_point(request, result.grid[i]);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  // Rethrow the failure at the lowest grid index.
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }

  result.series.resize(request.kts.size());
  for (std::size_t t = 0; t < request.kts.size(); ++t) {
    result.series[t].kT = request.kts[t];
    result.series[t].points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) result.series[t].points.push_back(slots[i].per_kt[t]);
  }
  if (request.check_partial_trace && request.backend.kind == BackendKind::Ed) {
    double worst = 0.0;
    for (const auto& slot : slots) worst = std::max(worst, slot.partial_trace_deviation);
    result.partial_trace_deviation = worst;
  }
  return result;
}

std::vector<double> numeric_derivative(const std::vector<double>& values, double step, int order) {
  if (order != 1 && order != 2) throw Error(ErrorCode::InvalidArgument, "derivative order must be 1 or 2");
  if (!(step > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be > 0");
  const std::size_t needed = order == 1 ? 3 : 5;
  if (values.size() < needed) {
    throw Error(ErrorCode::SeriesTooShort, "order " + std::to_string(order) + " derivative needs " +
                                               std::to_string(needed) + " points, got " +
                                               std::to_string(values.size()));
  }
  const std::size_t n = values.size();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (values[i + 1] - values[i - 1]) / (2.0 * step);
  if (n >= 4) {
    d[0] = (-11.0 * values[0] + 18.0 * values[1] - 9.0 * values[2] + 2.0 * values[3]) / (6.0 * step);
    d[n - 1] = (11.0 * values[n - 1] - 18.0 * values[n - 2] + 9.0 * values[n - 3] - 2.0 * values[n - 4]) / (6.0 * step);
  } else {
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * step);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * step);
  }
  return order == 1 ? d : numeric_derivative(d, step, 1);
}

Extremum locate_extremum(const std::vector<double>& grid, const std::vector<double>& values, double lo, double hi,
                         int order, const std::vector<bool>& usable) {
  if (grid.size() != values.size()) throw Error(ErrorCode::InvalidArgument, "grid and series lengths differ");
  if (!usable.empty() && usable.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "usable mask length differs from grid");
  }
  if (order != 1 && order != 2) throw Error(ErrorCode::InvalidArgument, "derivative order must be 1 or 2");
  const double step = grid.size() > 1 ? grid[1] - grid[0] : 0.0;
  const double slack = 1e-9 * std::max(step, 1e-300);

  std::optional<Extremum> best;
  std::size_t first = 0;
  std::size_t last = 0;
  bool any = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!in_window(grid[i], lo, hi, slack)) continue;
    if (!usable.empty() && !usable[i]) continue;
    if (!any) first = i;
    last = i;
    any = true;
    const double magnitude = std::abs(values[i]);
    if (!best || magnitude > std::abs(best->value)) {
      best = Extremum{grid[i], 0.0, i, values[i], false, false};
    } else if (magnitude == std::abs(best->value)) {
      best->degenerate = true;
    }
  }
  if (!best) throw Error(ErrorCode::EmptyWindow, "no usable grid point in window");
  best->accuracy = order * step;
  best->at_window_edge = first != last && (best->index == first || best->index == last);
  return *best;
}

std::vector<bool> branch_clean_points(const std::vector<Branch>& branches, int order) {
  const auto n = static_cast<std::ptrdiff_t>(branches.size());
  std::vector<bool> clean(branches.size(), true);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - order); j <= std::min(n - 1, i + order); ++j) {
      if (branches[j] != branches[i]) clean[i] = false;
    }
  }
  return clean;
}

std::string_view to_string(FitKind kind) { return kind == FitKind::Linear ? "linear" : "quadratic"; }
std::string_view to_string(Detector d) { return d == Detector::Fmax ? "fmax" : "favg"; }

FitResult fit_locations(const std::vector<std::pair<double, double>>& points, FitKind kind) {
  const int p = kind == FitKind::Linear ? 2 : 3;
  const auto n = static_cast<int>(points.size());
  if (n < p) {
    throw Error(ErrorCode::InsufficientPoints, std::string(to_string(kind)) + " fit needs " + std::to_string(p) +
                                                   " points, got " + std::to_string(n));
  }
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double power = 1.0;
    for (int c = 0; c < p; ++c) {
      x(i, c) = power;
      power *= points[i].first;
    }
    y(i) = points[i].second;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) throw Error(ErrorCode::SingularFit, "design matrix is rank deficient");
  const Eigen::VectorXd beta = qr.solve(y);

  FitResult fit;
  fit.kind = kind;
  fit.coefficients.assign(beta.data(), beta.data() + p);
  fit.intercept = beta(0);
  const Eigen::VectorXd residuals = y - x * beta;
  fit.residuals.assign(residuals.data(), residuals.data() + n);
  const double rss = residuals.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;

  if (n > p) {
    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::MatrixXd cov = xtx.inverse() * (rss / (n - p));
    fit.intercept_stderr = std::sqrt(std::max(cov(0, 0), 0.0));
  } else {
    fit.intercept_stderr = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

QcpEstimate extrapolate_qcp(const std::vector<std::pair<double, Extremum>>& extrema, FitKind kind, int order) {
  std::vector<std::pair<double, double>> points;
  points.reserve(extrema.size());
  for (const auto& [kT, e] : extrema) points.emplace_back(kT, e.location);
  QcpEstimate estimate;
  estimate.fit = fit_locations(points, kind);
  estimate.value = estimate.fit.intercept;
  estimate.kind = kind;
  estimate.order = order;
  estimate.extrema = extrema;
  estimate.intercept_stderr = estimate.fit.intercept_stderr;
  return estimate;
}

std::vector<double> detector_series(const SweepSeries& series, Detector d) {
  std::vector<double> out;
  out.reserve(series.points.size());
  for (const auto& p : series.points) out.push_back(d == Detector::Fmax ? p.fmax.value : p.favg.value);
  return out;
}

std::vector<Branch> detector_branches(const SweepSeries& series, Detector d) {
  std::vector<Branch> out;
  out.reserve(series.points.size());
  for (const auto& p : series.points) out.push_back(d == Detector::Fmax ? p.fmax.branch : p.favg.branch);
  return out;
}

std::pair<double, double> cut_window_at_crossings(const SweepResult& result, double lo, double hi) {
  if (result.series.empty()) return {lo, hi};
  std::size_t coldest = 0;
  for (std::size_t i = 1; i < result.series.size(); ++i) {
    if (result.series[i].kT < result.series[coldest].kT) coldest = i;
  }
  const double centre = 0.5 * (lo + hi);
  const double slack = 1e-9 * result.step;
  double new_lo = lo;
  double new_hi = hi;
  for (const auto& c : crossing_points(result, coldest, CrossingPair::XxZz)) {
    if (c.location <= lo + slack || c.location >= hi - slack) continue;
    if (c.location < centre) new_lo = std::max(new_lo, c.location + result.step);
    else new_hi = std::min(new_hi, c.location - result.step);
  }
  return {new_lo, new_hi};
}

QcpEstimate estimate_qcp(const SweepResult& result, const EstimateOptions& options) {
  double lo = options.window_lo;
  double hi = options.window_hi;
  if (options.cut_at_crossings) std::tie(lo, hi) = cut_window_at_crossings(result, lo, hi);
  std::vector<std::pair<double, Extremum>> extrema;
  for (const auto& s : result.series) {
    if (s.kT <= 0.0 || s.kT > options.kt_max * (1.0 + 1e-12)) continue;
    const auto derivative = numeric_derivative(detector_series(s, options.quantity), result.step, options.order);
    std::vector<bool> usable;
    if (options.skip_branch_changes) usable = branch_clean_points(detector_branches(s, options.quantity), options.order);
    extrema.emplace_back(s.kT, locate_extremum(result.grid, derivative, lo, hi, options.order, usable));
  }
  std::vector<std::pair<double, Extremum>> dropped;
  if (options.drop_edge_pinned) {
    std::vector<std::pair<double, Extremum>> kept;
    for (const auto& e : extrema) (e.second.at_window_edge ? dropped : kept).push_back(e);
    const std::size_t needed = options.fit == FitKind::Linear ? 3 : 4;
    if (kept.size() >= needed) extrema = std::move(kept);
    else dropped.clear();
  }
  QcpEstimate estimate = extrapolate_qcp(extrema, options.fit, options.order);
  estimate.dropped = std::move(dropped);
  estimate.window_lo = lo;
  estimate.window_hi = hi;
  return estimate;
}

std::string_view to_string(CrossingPair p) {
  switch (p) {
    case CrossingPair::XxZz: return "|xx|-|zz|";
    case CrossingPair::XxYy: return "|xx|-|yy|";
    case CrossingPair::YyZz: return "|yy|-|zz|";
  }
  return "?";
}

std::vector<Crossing> crossing_points(const std::vector<double>& grid, const std::vector<double>& a,
                                      const std::vector<double>& b) {
  if (grid.size() != a.size() || grid.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "grid and series lengths differ");
  }
  std::vector<double> diff(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) diff[i] = std::abs(a[i]) - std::abs(b[i]);

  std::vector<Crossing> out;
  const auto sign = [](double v) { return (v > 0.0) - (v < 0.0); };
  int last_sign = 0;  // sign of the last nonzero difference
  bool last_was_zero_reported = false;
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const int s = sign(diff[i]);
    if (s == 0) {
      if (!last_was_zero_reported) out.push_back({grid[i], i});
      last_was_zero_reported = true;
      continue;
    }
    if (last_sign != 0 && s != last_sign && !last_was_zero_reported) {
      const std::size_t pick = std::abs(diff[i - 1]) <= std::abs(diff[i]) ? i - 1 : i;
      out.push_back({grid[pick], pick});
    }
    // A run of zeros that the sign then re-crosses is still one crossing.
    last_was_zero_reported = false;
    last_sign = s;
  }
  return out;
}

std::vector<Crossing> crossing_points(const SweepResult& result, std::size_t series_index, CrossingPair pair) {
  if (series_index >= result.series.size()) throw Error(ErrorCode::InvalidArgument, "series index out of range");
  const auto& points = result.series[series_index].points;
  std::vector<double> a, b;
  for (const auto& p : points) {
    const auto& c = p.correlators;
    switch (pair) {
      case CrossingPair::XxZz: a.push_back(c.xx); b.push_back(c.zz); break;
      case CrossingPair::XxYy: a.push_back(c.xx); b.push_back(c.yy); break;
      case CrossingPair::YyZz: a.push_back(c.yy); b.push_back(c.zz); break;
    }
  }
  return crossing_points(result.grid, a, b);
}

std::vector<std::size_t> detect_cusps(const std::vector<double>& values, const CuspOptions& options) {
  const std::size_t n = values.size();
  std::vector<std::size_t> out;
  if (n < 3) return out;
  std::vector<double> d2(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) d2[i] = std::abs(values[i + 1] - 2.0 * values[i] + values[i - 1]);

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d2[i] <= options.floor) continue;
    if (d2[i] < d2[i - 1] || d2[i] <= d2[i + 1]) continue;
    double background = std::numeric_limits<double>::infinity();
    if (i >= 4) background = std::min(background, d2[i - 3]);
    if (i + 4 < n) background = std::min(background, d2[i + 3]);
    if (!std::isfinite(background)) background = 0.0;
    if (d2[i] > options.contrast * background) out.push_back(i);
  }
  return out;
}

}  // namespace teleqcp
