#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "teleqcp/chain_models.hpp"
#include "teleqcp/correlators.hpp"
#include "teleqcp/error.hpp"
#include "teleqcp/qcp_detect.hpp"
#include "teleqcp/sweep_csv.hpp"
#include "teleqcp/teleport.hpp"

namespace teleqcp::cli {
namespace {

std::string fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, v);
  return buffer;
}

std::string sci(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.3e", v);
  return buffer;
}

double parse_double(const std::string& text, const std::string& field) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument(field + ": '" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw std::invalid_argument(field + ": '" + text + "' is not a finite number");
  }
  return v;
}

std::vector<std::string> split_colon(const std::string& text) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, ':')) parts.push_back(part);
  return parts;
}

[[noreturn]] void bad(const std::string& message) { throw std::invalid_argument(message); }

SweepParameter swept_parameter(const RunConfig& c) {
  if (c.model == "xxz") return SweepParameter::Delta;
  return c.lambda_range ? SweepParameter::Lambda : SweepParameter::Gamma;
}

std::vector<double> collect_kts(const RunConfig& c) {
  std::vector<double> kts = c.kts;
  if (c.kt_range) {
    for (double kT : make_grid(c.kt_range->lo, c.kt_range->hi, c.kt_range->step)) kts.push_back(kT);
  }
  return kts;
}

SweepRequest build_request(const RunConfig& c) {
  SweepRequest r;
  r.parameter = swept_parameter(c);
  RangeSpec range;
  if (c.model == "xxz") {
    r.base = XxzModel{0.0, c.h.front()};
    range = *c.delta_range;
  } else if (r.parameter == SweepParameter::Lambda) {
    r.base = XyModel{1.0, *c.gamma};
    range = *c.lambda_range;
  } else {
    r.base = XyModel{*c.lambda, 0.0};
    range = *c.gamma_range;
  }
  r.lo = range.lo;
  r.hi = range.hi;
  r.step = range.step;
  r.kts = collect_kts(c);
  const std::string backend = c.backend.empty() ? (c.model == "xy" ? "xy-integral" : "ed") : c.backend;
  r.backend = backend == "ed" ? BackendSpec::exact_diagonalization(c.sites) : BackendSpec::xy_integral();
  r.workers = c.workers;
  return r;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::InsufficientPoints:
    case ErrorCode::SingularFit: return kFitError;
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidForModel:
    case ErrorCode::IncompatibleBackend:
    case ErrorCode::EmptyWindow:
    case ErrorCode::SeriesTooShort:
    case ErrorCode::UnsupportedRegime: return kBadArguments;
    default: return kBackendError;
  }
}

int cmd_critical_points(const RunConfig& c, std::ostream& out) {
  if (c.model == "xxz") {
    out << "h, delta1, delta2\n";
    for (double h : c.h) {
      out << fixed(h, 2) << ", " << fixed(xxz_delta1(h), 2) << ", " << fixed(xxz_delta2(h), 3) << '\n';
    }
    return kOk;
  }
  const auto lambda_c = known_qcps(XyModel{1.0, 0.5}, SweepParameter::Lambda);
  const auto gamma_c = known_qcps(XyModel{1.5, 0.0}, SweepParameter::Gamma);
  out << "lambda_c=" << fixed(lambda_c.front().value, 1) << ", gamma_c=" << fixed(gamma_c.front().value, 1)
      << " (gamma_c applies for lambda > 1)\n";
  return kOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  const SweepResult result = sweep(build_request(c));
  if (c.out.empty() || c.out == "-") {
    write_sweep_csv(result, out);
    return kOk;
  }
  std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
  if (!file) bad("--out: cannot open '" + c.out + "' for writing");
  write_sweep_csv(result, file);
  file.close();
  if (!file) throw Error(ErrorCode::NonConvergence, "writing '" + c.out + "' failed");
  out << "wrote " << result.grid.size() * result.series.size() << " rows to " << c.out << '\n';
  return kOk;
}

int cmd_estimate_qcp(const RunConfig& c, std::ostream& out) {
  SweepResult result;
  if (!c.in.empty()) {
    std::ifstream file(c.in, std::ios::binary);
    if (!file) bad("--in: cannot open '" + c.in + "'");
    result = read_sweep_csv(file);
  } else {
    result = sweep(build_request(c));
  }

  EstimateOptions options;
  options.quantity = c.quantity == "favg" ? Detector::Favg : Detector::Fmax;
  options.order = c.deriv_order;
  options.window_lo = c.window->first;
  options.window_hi = c.window->second;
  options.fit = c.fit == "quadratic" ? FitKind::Quadratic : FitKind::Linear;
  options.kt_max = c.kt_max;
  const QcpEstimate estimate = estimate_qcp(result, options);

  const std::string param(to_string(result.parameter));
  out << "estimate: " << param << "_c = " << fixed(estimate.value, 4) << " +/- "
      << fixed(estimate.intercept_stderr, 4) << " (" << to_string(estimate.kind) << " fit, "
      << (estimate.order == 1 ? "first" : "second") << " derivative of " << to_string(options.quantity)
      << ", window [" << format_number(estimate.window_lo) << ", " << format_number(estimate.window_hi) << "])\n";
  out << "r_squared: " << fixed(estimate.fit.r_squared, 4) << '\n';
  if (!estimate.dropped.empty()) {
    out << "left out (extremum pinned to the window edge):";
    for (const auto& [kT, e] : estimate.dropped) out << " kT=" << format_number(kT) << "@" << format_number(e.location);
    out << '\n';
  }
  out << "kT,location,accuracy,derivative,residual,at_window_edge\n";
  for (std::size_t i = 0; i < estimate.extrema.size(); ++i) {
    const auto& [kT, e] = estimate.extrema[i];
    out << format_number(kT) << ',' << format_number(e.location) << ',' << format_number(e.accuracy) << ','
        << format_number(e.value) << ',' << format_number(estimate.fit.residuals[i]) << ','
        << (e.at_window_edge ? "yes" : "no") << '\n';
  }

  if (!c.out.empty()) {
    std::ofstream file(c.out, std::ios::binary | std::ios::trunc);
    if (!file) bad("--out: cannot open '" + c.out + "' for writing");
    file << "param_name,kind,order,kT,location,accuracy,derivative,residual,at_window_edge,estimate,"
            "intercept_stderr,r_squared\n";
    for (std::size_t i = 0; i < estimate.extrema.size(); ++i) {
      const auto& [kT, e] = estimate.extrema[i];
      file << param << ',' << to_string(estimate.kind) << ',' << estimate.order << ',' << format_number(kT) << ','
           << format_number(e.location) << ',' << format_number(e.accuracy) << ',' << format_number(e.value) << ','
           << format_number(estimate.fit.residuals[i]) << ',' << (e.at_window_edge ? 1 : 0) << ','
           << format_number(estimate.value) << ',' << format_number(estimate.intercept_stderr) << ','
           << format_number(estimate.fit.r_squared) << '\n';
    }
  }
  return kOk;
}

struct Check {
  std::string name;
  double tolerance;
  std::function<double()> observe;
};

PureQubit random_qubit(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  return {std::sqrt(u), 2.0 * std::numbers::pi * unit(rng)};
}

int cmd_selfcheck(const RunConfig& c, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const int trials = c.trials;
  const int bloch_resources = std::clamp(trials / 10, 1, 100);

  XyIntegralOptions xy_options;
  if (c.corrupt_sign) {
    xy_options.convention = kLockedXyConvention == XySignConvention::SinMinus ? XySignConvention::SinPlus
                                                                                : XySignConvention::SinMinus;
  }

  std::vector<Check> checks;
  checks.push_back({"protocol-vs-closed-form", 1e-12, [&] {
                      std::mt19937_64 rng(c.seed);
                      std::uniform_int_distribution<int> pick(0, 3);
                      double worst = 0.0;
                      for (int t = 0; t < trials; ++t) {
                        const PureQubit psi = random_qubit(rng);
                        const CorrelatorSet corr = random_physical_correlators(rng);
                        const UnitarySet k = kUnitarySets[pick(rng)];
                        const double sim = mean_fidelity_sim(psi, assemble_xy_rho(corr), k);
                        worst = std::max(worst, std::abs(sim - mean_fidelity_closed(psi, corr, k)));
                      }
                      return worst;
                    }});
  checks.push_back({"xy-form-reduces-to-xxz-form", 1e-14, [&] {
                      std::mt19937_64 rng(c.seed + 1);
                      double worst = 0.0;
                      for (int t = 0; t < trials; ++t) {
                        const CorrelatorSet corr = random_physical_correlators(rng, true);
                        const PureQubit psi = random_qubit(rng);
                        for (UnitarySet k : kUnitarySets) {
                          worst = std::max(worst, std::abs(mean_fidelity_xy_form(psi, corr, k) -
                                                           mean_fidelity_xxz_form(psi, corr, k)));
                          worst = std::max(worst, std::abs(per_set_max_fidelity(corr, k).value -
                                                           per_set_max_fidelity_xxz_form(corr, k)));
                          worst = std::max(worst,
                                           std::abs(avg_fidelity_closed(corr, k) - avg_fidelity_xxz_form(corr, k)));
                        }
                        worst = std::max(worst,
                                         std::abs(max_mean_fidelity(corr).value - max_mean_fidelity_xxz_form(corr)));
                        worst =
                            std::max(worst, std::abs(max_avg_fidelity(corr).value - max_avg_fidelity_xxz_form(corr)));
                      }
                      return worst;
                    }});
  checks.push_back({"bloch-average-vs-closed-form", 1e-8, [&] {
                      std::mt19937_64 rng(c.seed + 2);
                      double worst = 0.0;
                      for (int t = 0; t < bloch_resources; ++t) {
                        const CorrelatorSet corr = random_physical_correlators(rng);
                        const TwoQubitState rho = assemble_xy_rho(corr);
                        for (UnitarySet k : kUnitarySets) {
                          worst = std::max(worst,
                                           std::abs(avg_fidelity_quadrature(rho, k) - avg_fidelity_closed(corr, k)));
                        }
                      }
                      return worst;
                    }});
  checks.push_back({"bloch-average-outcome-probability", 1e-8, [&] {
                      std::mt19937_64 rng(c.seed + 3);
                      double worst = 0.0;
                      for (int t = 0; t < bloch_resources; ++t) {
                        const TwoQubitState rho = assemble_xy_rho(random_physical_correlators(rng));
                        for (BellOutcome j : kBellOutcomes) {
                          worst = std::max(worst, std::abs(avg_outcome_probability_quadrature(rho, j) - 0.25));
                        }
                      }
                      return worst;
                    }});
  checks.push_back({"xy-integral-vs-ed-L12", 5e-3, [&] {
                      const std::vector<ConventionProbe> probes{
                          {0.5, 1.0, 0.5}, {1.5, 0.5, 1.0}, {1.5, 0.0, 1.0}, {0.8, 0.5, 0.5}};
                      double worst = 0.0;
                      for (const auto& p : probes) {
                        const CorrelatorSet ed = ed_thermal_correlators(XyModel{p.lambda, p.gamma}, 12, p.kT);
                        const CorrelatorSet tl = xy_correlators_tl(p.lambda, p.gamma, p.kT, xy_options);
                        worst = std::max({worst, std::abs(ed.z - tl.z), std::abs(ed.xx - tl.xx),
                                          std::abs(ed.yy - tl.yy), std::abs(ed.zz - tl.zz)});
                      }
                      return worst;
                    }});
  checks.push_back({"xy-integral-trivial-limit", 1e-10, [&] {
                      const CorrelatorSet tl = xy_correlators_tl(0.0, 0.5, 0.0, xy_options);
                      return std::max({std::abs(tl.z - 1.0), std::abs(tl.xx), std::abs(tl.yy),
                                       std::abs(tl.zz - 1.0)});
                    }});
  checks.push_back({"ed-partial-trace-vs-assembly", 1e-10, [&] {
                      double worst = 0.0;
                      const std::vector<ModelSpec> specs{XxzModel{0.5, 6.0}, XxzModel{-0.4, 1.0},
                                                         XyModel{1.5, 0.5}, XyModel{0.7, 1.0}};
                      for (const auto& spec : specs) {
                        const EdSpectrum spectrum(spec, 8);
                        for (double kT : {0.0, 0.3, 2.0}) {
                          const CorrelatorSet corr = spectrum.correlators(kT);
                          const TwoQubitState assembled = std::holds_alternative<XxzModel>(spec)
                                                              ? assemble_xxz_rho(corr)
                                                              : assemble_xy_rho(corr);
                          worst = std::max(worst,
                                           (spectrum.reduced_two_qubit(kT).rho - assembled.rho).cwiseAbs().maxCoeff());
                        }
                      }
                      return worst;
                    }});

  bool all_pass = true;
  for (const auto& check : checks) {
    const double observed = check.observe();
    const bool pass = observed <= check.tolerance;
    all_pass = all_pass && pass;
    out << (pass ? "PASS " : "FAIL ") << check.name << ": tolerance " << sci(check.tolerance) << ", observed "
        << sci(observed) << '\n';
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "selfcheck " << (all_pass ? "passed" : "failed") << " (seed " << c.seed << ", trials " << trials << ") in "
      << fixed(seconds, 2) << " s\n";
  return all_pass ? kOk : kSelfcheckFailed;
}

}  // namespace

RangeSpec parse_range(const std::string& text, const std::string& field) {
  const auto parts = split_colon(text);
  if (parts.size() != 3) bad(field + ": expected a:b:step, got '" + text + "'");
  RangeSpec r{parse_double(parts[0], field), parse_double(parts[1], field), parse_double(parts[2], field)};
  if (r.step <= 0.0) bad(field + ": step must be > 0");
  if (r.hi < r.lo) bad(field + ": upper bound is below lower bound");
  return r;
}

std::pair<double, double> parse_window(const std::string& text, const std::string& field) {
  const auto parts = split_colon(text);
  if (parts.size() != 2) bad(field + ": expected a:b, got '" + text + "'");
  const double lo = parse_double(parts[0], field);
  const double hi = parse_double(parts[1], field);
  if (!(lo < hi)) bad(field + ": lower bound must be below upper bound");
  return {lo, hi};
}

void validate(const RunConfig& c) {
  const std::string& sub = c.subcommand;
  const bool needs_model = sub == "critical-points" || sub == "sweep" || (sub == "estimate-qcp" && c.in.empty());
  if (needs_model && c.model.empty()) bad("--model: required for " + sub);
  if (!c.model.empty() && c.model != "xxz" && c.model != "xy") bad("--model: must be xxz or xy");
  if (!c.backend.empty() && c.backend != "ed" && c.backend != "xy-integral") {
    bad("--backend: must be ed or xy-integral");
  }
  if (c.sites < 2 || c.sites > 14) bad("--sites: must lie in [2, 14]");
  if (c.workers < 0) bad("--workers: must be >= 0");
  if (c.trials < 1) bad("--trials: must be >= 1");
  if (c.deriv_order != 1 && c.deriv_order != 2) bad("--deriv-order: must be 1 or 2");
  if (c.fit != "linear" && c.fit != "quadratic") bad("--fit: must be linear or quadratic");
  if (c.quantity != "fmax" && c.quantity != "favg") bad("--quantity: must be fmax or favg");
  if (!(c.kt_max > 0.0) || !std::isfinite(c.kt_max)) bad("--kt-max: must be > 0");
  for (double h : c.h) {
    if (!std::isfinite(h)) bad("--h: must be finite");
  }
  if (c.lambda && (!std::isfinite(*c.lambda) || *c.lambda < 0.0)) bad("--lambda: must be >= 0");
  if (c.gamma && (!std::isfinite(*c.gamma) || std::abs(*c.gamma) > 1.0)) bad("--gamma: must lie in [-1, 1]");
  for (double kT : c.kts) {
    if (!std::isfinite(kT) || kT < 0.0) bad("--kt: must be finite and >= 0");
  }
  if (c.kt_range && c.kt_range->lo < 0.0) bad("--kt-range: temperatures must be >= 0");

  if (sub == "critical-points") {
    if (c.model == "xxz") {
      if (c.h.empty()) bad("--h: at least one field value is required for the xxz model");
      for (double h : c.h) {
        if (h < 0.0) bad("--h: must be >= 0");
      }
    }
    return;
  }
  if (sub == "selfcheck") return;
  if (sub == "estimate-qcp") {
    if (!c.window) bad("--window: required for estimate-qcp");
    if (!c.in.empty()) return;
  }

  // sweep, or estimate-qcp running its own sweep
  if (c.model == "xxz") {
    if (!c.delta_range) bad("--delta-range: required for the xxz model");
    if (c.lambda_range || c.gamma_range) bad("--lambda-range: not a parameter of the xxz model");
    if (c.h.size() != 1) bad("--h: exactly one field value is required for an xxz sweep");
    if (c.backend == "xy-integral") bad("--backend: xy-integral only serves the xy model");
  } else {
    if (c.delta_range) bad("--delta-range: not a parameter of the xy model");
    if (c.lambda_range.has_value() == c.gamma_range.has_value()) {
      bad("--lambda-range: give exactly one of --lambda-range and --gamma-range");
    }
    if (c.lambda_range && !c.gamma) bad("--gamma: required when sweeping lambda");
    if (c.gamma_range && !c.lambda) bad("--lambda: required when sweeping gamma");
    if (c.gamma_range && (c.gamma_range->lo < -1.0 || c.gamma_range->hi > 1.0)) {
      bad("--gamma-range: must lie within [-1, 1]");
    }
    if (c.lambda_range && c.lambda_range->lo < 0.0) bad("--lambda-range: lambda must be >= 0");
  }
  const auto kts = collect_kts(c);
  if (kts.empty()) bad("--kt: at least one temperature is required");
  auto sorted = kts;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) bad("--kt: temperatures must be distinct");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string delta_range, lambda_range, gamma_range, kt_range, window;
  double lambda = 0.0;
  double gamma = 0.0;

  CLI::App app{"Teleportation-based detection of quantum critical points in spin chains", "teleqcp"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_config("--config", "", "Read settings from a flat key = value file");
  app.require_subcommand(1);

  app.add_option("--model", c.model, "Model family")->check(CLI::IsMember({"xxz", "xy"}));
  app.add_option("--h", c.h, "Longitudinal field of the xxz model (repeatable)");
  auto* lambda_opt = app.add_option("--lambda", lambda, "Fixed lambda of the xy model");
  auto* gamma_opt = app.add_option("--gamma", gamma, "Fixed anisotropy of the xy model");
  app.add_option("--delta-range", delta_range, "Delta sweep a:b:step");
  app.add_option("--lambda-range", lambda_range, "Lambda sweep a:b:step");
  app.add_option("--gamma-range", gamma_range, "Gamma sweep a:b:step");
  app.add_option("--kt", c.kts, "Temperature (repeatable)");
  app.add_option("--kt-range", kt_range, "Temperatures a:b:step");
  app.add_option("--backend", c.backend, "ed or xy-integral");
  app.add_option("--sites", c.sites, "Chain length for exact diagonalisation");
  app.add_option("--out", c.out, "Output path");
  app.add_option("--in", c.in, "Sweep CSV to analyse instead of sweeping");
  app.add_option("--workers", c.workers, "Worker threads, 0 = all cores");
  app.add_option("--seed", c.seed, "Random seed");
  app.add_option("--window", window, "Extremum search window a:b");
  app.add_option("--deriv-order", c.deriv_order, "Derivative order, 1 or 2");
  app.add_option("--fit", c.fit, "linear or quadratic");
  app.add_option("--quantity", c.quantity, "fmax or favg");
  app.add_option("--kt-max", c.kt_max, "Largest kT entering the regression");
  app.add_option("--trials", c.trials, "Random draws per self-check");
  app.add_flag("--corrupt-sign", c.corrupt_sign)->group("");

  for (const char* name : {"critical-points", "sweep", "estimate-qcp", "selfcheck"}) {
    app.add_subcommand(name)->fallthrough()->footer("Accepts every option listed by teleqcp --help.");
  }
  app.get_subcommand("critical-points")->description("Exact critical points");
  app.get_subcommand("sweep")->description("Detector sweep written as CSV");
  app.get_subcommand("estimate-qcp")->description("Extrapolate derivative extrema to kT = 0");
  app.get_subcommand("selfcheck")->description("Oracle-equivalence checks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    for (const auto* sub : app.get_subcommands()) c.subcommand = sub->get_name();
    if (*lambda_opt) c.lambda = lambda;
    if (*gamma_opt) c.gamma = gamma;
    if (!delta_range.empty()) c.delta_range = parse_range(delta_range, "--delta-range");
    if (!lambda_range.empty()) c.lambda_range = parse_range(lambda_range, "--lambda-range");
    if (!gamma_range.empty()) c.gamma_range = parse_range(gamma_range, "--gamma-range");
    if (!kt_range.empty()) c.kt_range = parse_range(kt_range, "--kt-range");
    if (!window.empty()) c.window = parse_window(window, "--window");
    validate(c);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  }

  try {
    if (c.subcommand == "critical-points") return cmd_critical_points(c, out);
    if (c.subcommand == "sweep") return cmd_sweep(c, out);
    if (c.subcommand == "estimate-qcp") return cmd_estimate_qcp(c, out);
    return cmd_selfcheck(c, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kBadArguments;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kBackendError;
  }
}

}  // namespace teleqcp::cli
