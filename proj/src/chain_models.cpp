#include "teleqcp/chain_models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "teleqcp/error.hpp"

namespace teleqcp {
namespace {

double sech(double x) {
  const double e = std::exp(-std::abs(x));
  return 2.0 * e / (1.0 + e * e);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be finite");
  }
}

}  // namespace

std::string_view to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Delta: return "delta";
    case SweepParameter::Lambda: return "lambda";
    case SweepParameter::Gamma: return "gamma";
  }
  return "?";
}

std::string_view family_name(const ModelSpec& spec) {
  return std::holds_alternative<XxzModel>(spec) ? "xxz" : "xy";
}

void validate(const ModelSpec& spec) {
  std::visit(Overloaded{
                 [](const XxzModel& m) {
                   require_finite(m.delta, "delta");
                   require_finite(m.h, "h");
                 },
                 [](const XyModel& m) {
                   require_finite(m.lambda, "lambda");
                   require_finite(m.gamma, "gamma");
                   if (m.lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
                   if (m.gamma < -1.0 || m.gamma > 1.0) {
                     throw Error(ErrorCode::InvalidArgument, "gamma must lie in [-1, 1]");
                   }
                 },
             },
             spec);
}

ModelSpec with_parameter(const ModelSpec& base, SweepParameter p, double value) {
  return std::visit(Overloaded{
                        [&](XxzModel m) -> ModelSpec {
                          if (p != SweepParameter::Delta) {
                            throw Error(ErrorCode::InvalidForModel, "xxz chains sweep delta only");
                          }
                          m.delta = value;
                          return m;
                        },
                        [&](XyModel m) -> ModelSpec {
                          if (p == SweepParameter::Lambda) {
                            m.lambda = value;
                          } else if (p == SweepParameter::Gamma) {
                            m.gamma = value;
                          } else {
                            throw Error(ErrorCode::InvalidForModel, "xy chains sweep lambda or gamma");
                          }
                          return m;
                        },
                    },
                    base);
}

double parameter_value(const ModelSpec& spec, SweepParameter p) {
  if (const auto* m = std::get_if<XxzModel>(&spec)) {
    if (p == SweepParameter::Delta) return m->delta;
  } else if (const auto* m = std::get_if<XyModel>(&spec)) {
    if (p == SweepParameter::Lambda) return m->lambda;
    if (p == SweepParameter::Gamma) return m->gamma;
  }
  throw Error(ErrorCode::InvalidForModel, std::string(to_string(p)) + " is not a parameter of this model");
}

double xxz_delta1(double h) { return h / 4.0 - 1.0; }

double xxz_delta2_field(double eta, double tol) {
  if (!(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "eta must be positive");
  const double cutoff = tol / 10.0;
  if (eta >= 1.0) {
    double sum = 1.0;
    for (int j = 1;; ++j) {
      const double term = sech(j * eta);
      sum += (j % 2 == 0 ? 2.0 : -2.0) * term;
      if (term < cutoff) break;
    }
    return 4.0 * std::sinh(eta) * sum;
  }
  // Poisson summation: sum_j (-1)^j sech(j eta) = (pi/eta) sum_m sech((2m+1) pi^2 / (2 eta)).
  constexpr double pi = std::numbers::pi;
  double sum = 0.0;
  for (int m = 0;; ++m) {
    const double term = sech((2 * m + 1) * pi * pi / (2.0 * eta));
    sum += 2.0 * term;
    if (term < cutoff) break;
  }
  return 4.0 * std::sinh(eta) / eta * pi * sum;
}

double xxz_delta2(double h, double tol) {
  require_finite(h, "h");
  if (h == 0.0) return 1.0;
  if (h < 0.0) throw Error(ErrorCode::NoBracket, "delta2 needs h > 0");

  constexpr double eta_min = 1e-6;
  constexpr double eta_max = 50.0;
  const auto residual = [&](double eta) { return xxz_delta2_field(eta, tol * 1e-3) - h; };

  double lo = eta_min;
  if (residual(lo) > 0.0) throw Error(ErrorCode::NoBracket, "field below the eta -> 0 limit");
  double hi = 1.0;
  while (residual(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > eta_max) throw Error(ErrorCode::NoBracket, "no sign change for eta in (1e-6, 50)");
  }

  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi || hi - lo < 1e-15 * hi) break;
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double eta = 0.5 * (lo + hi);
  if (std::abs(residual(eta)) >= tol) {
    throw Error(ErrorCode::NonConvergence, "bisection residual above tolerance");
  }
  return std::cosh(eta);
}

CriticalPoints known_qcps(const ModelSpec& spec, SweepParameter p) {
  validate(spec);
  if (const auto* m = std::get_if<XxzModel>(&spec)) {
    if (p != SweepParameter::Delta) throw Error(ErrorCode::InvalidForModel, "xxz chains sweep delta only");
    return {
        {"delta1", xxz_delta1(m->h), "one-magnon instability, h = 4(1 + delta1)"},
        {"delta2", xxz_delta2(m->h), "root of h = 4 sinh(eta) sum (-1)^j / cosh(j eta)"},
    };
  }
  const auto& xy = std::get<XyModel>(spec);
  if (p == SweepParameter::Lambda) return {{"lambda_c", 1.0, "Ising transition"}};
  if (p == SweepParameter::Gamma) {
    if (xy.lambda <= 1.0) {
      throw Error(ErrorCode::UnsupportedRegime, "the anisotropy transition exists only for lambda > 1");
    }
    return {{"gamma_c", 0.0, "anisotropy transition"}};
  }
  throw Error(ErrorCode::InvalidForModel, "xy chains sweep lambda or gamma");
}

void check_ed_size(int sites, std::size_t dim, const EdConfig& config) {
  if (sites < 2 || sites > std::min(config.max_sites, 30)) {
    std::ostringstream msg;
    msg << "sites = " << sites << " outside [2, " << std::min(config.max_sites, 30) << "]";
    throw Error(ErrorCode::InvalidArgument, msg.str());
  }
  const double bytes = static_cast<double>(dim) * static_cast<double>(dim) * sizeof(double);
  if (bytes > static_cast<double>(config.memory_budget_bytes)) {
    std::ostringstream msg;
    msg << "dense block of dimension " << dim << " needs " << bytes / (1 << 20) << " MiB, budget is "
        << config.memory_budget_bytes / (1 << 20) << " MiB";
    throw Error(ErrorCode::DimensionOverflow, msg.str());
  }
}

int sector_of(const ModelSpec& spec, std::uint32_t state) {
  const int down = std::popcount(state);
  return std::holds_alternative<XxzModel>(spec) ? down : down % 2;
}

void hamiltonian_column(const ModelSpec& spec, int sites, std::uint32_t state,
                        std::vector<std::pair<std::uint32_t, double>>& out) {
  out.clear();
  const auto z = [&](int j) { return ((state >> j) & 1u) ? -1.0 : 1.0; };

  double diag = 0.0;
  double flip_parallel = 0.0;      // amplitude when both spins of the bond agree
  double flip_antiparallel = 0.0;  // amplitude when they differ
  if (const auto* m = std::get_if<XxzModel>(&spec)) {
    for (int j = 0; j < sites; ++j) {
      diag += m->delta * z(j) * z((j + 1) % sites) - 0.5 * m->h * z(j);
    }
    // XX + YY annihilates parallel pairs and swaps antiparallel ones with weight 2.
    flip_antiparallel = 2.0;
  } else {
    const auto& xy = std::get<XyModel>(spec);
    for (int j = 0; j < sites; ++j) diag -= 0.5 * z(j);
    // YY on a pair flips both spins with sign -1 (parallel) or +1 (antiparallel).
    flip_parallel = -0.25 * xy.lambda * ((1.0 + xy.gamma) - (1.0 - xy.gamma));
    flip_antiparallel = -0.25 * xy.lambda * ((1.0 + xy.gamma) + (1.0 - xy.gamma));
  }
  out.emplace_back(state, diag);

  for (int j = 0; j < sites; ++j) {
    const int k = (j + 1) % sites;
    const bool parallel = z(j) == z(k);
    const double amp = parallel ? flip_parallel : flip_antiparallel;
    if (amp == 0.0) continue;
    const std::uint32_t target = state ^ ((1u << j) | (1u << k));
    auto it = std::find_if(out.begin() + 1, out.end(), [&](const auto& e) { return e.first == target; });
    if (it == out.end()) {
      out.emplace_back(target, amp);
    } else {
      it->second += amp;
    }
  }
}

HamiltonianMatrix build_hamiltonian(const ModelSpec& spec, int sites, const EdConfig& config) {
  validate(spec);
  if (sites < 2 || sites > 30) check_ed_size(sites, 0, config);
  const std::size_t dim = std::size_t{1} << sites;
  check_ed_size(sites, dim, config);

  HamiltonianMatrix result;
  result.sites = sites;
  result.bond_double_counted = sites == 2;
  result.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  std::vector<std::pair<std::uint32_t, double>> column;
  for (std::uint32_t s = 0; s < dim; ++s) {
    hamiltonian_column(spec, sites, s, column);
    for (const auto& [row, value] : column) result.matrix(row, s) += value;
  }
  return result;
}

}  // namespace teleqcp
