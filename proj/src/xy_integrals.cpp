#include <cmath>
#include <map>
#include <numbers>

#include "teleqcp/correlators.hpp"
#include "teleqcp/error.hpp"
#include "teleqcp/quadrature.hpp"

namespace teleqcp {

std::string_view to_string(XySignConvention c) {
  return c == XySignConvention::SinMinus ? "sin-minus" : "sin-plus";
}

double xy_dispersion(double lambda, double gamma, double k) {
  const double a = 1.0 + lambda * std::cos(k);
  const double b = gamma * lambda * std::sin(k);
  return std::hypot(a, b);
}

double xy_g(int n, double lambda, double gamma, double kT, const XyIntegralOptions& options) {
  if (!std::isfinite(kT) || kT < 0.0) throw Error(ErrorCode::InvalidArgument, "kT must be finite and >= 0");
  if (!std::isfinite(lambda) || lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");
  const double sign = options.convention == XySignConvention::SinMinus ? -1.0 : 1.0;

  const auto integrand = [=](double k) {
    const double w = xy_dispersion(lambda, gamma, k);
    const double numerator =
        std::cos(n * k) * (1.0 + lambda * std::cos(k)) + sign * gamma * lambda * std::sin(n * k) * std::sin(k);
    if (w == 0.0) return kT > 0.0 ? numerator / (2.0 * kT) : 0.0;
    const double occupation = kT > 0.0 ? std::tanh(w / (2.0 * kT)) : 1.0;
    return occupation * numerator / w;
  };

  // The gap closes where 1 + lambda cos k = 0; put a panel edge there.
  std::vector<double> breakpoints;
  if (lambda >= 1.0) breakpoints.push_back(std::acos(-1.0 / lambda));

  constexpr double pi = std::numbers::pi;
  const auto result = integrate_adaptive(integrand, 0.0, pi, options.abs_tol * pi, breakpoints);
  return result.value / pi;
}

CorrelatorSet xy_correlators_tl(double lambda, double gamma, double kT, const XyIntegralOptions& options) {
  validate(ModelSpec{XyModel{lambda, gamma}});
  const double g0 = xy_g(0, lambda, gamma, kT, options);
  const double g1 = xy_g(1, lambda, gamma, kT, options);
  const double gm1 = xy_g(-1, lambda, gamma, kT, options);
  CorrelatorSet c;
  c.z = g0;
  c.xx = gm1;
  c.yy = g1;
  c.zz = g0 * g0 - g1 * gm1;
  c.kT = kT;
  c.source = CorrelatorSource::XyIntegral;
  return c;
}

std::vector<ConventionProbe> default_convention_probes() {
  return {{0.5, 1.0, 0.5}, {1.5, 1.0, 0.5}, {1.5, 0.5, 1.0}, {1.5, 0.0, 1.0}, {0.8, 0.5, 0.5}};
}

ConventionLock lock_xy_convention(std::span<const ConventionProbe> probes, int sites, double accept_tol) {
  std::map<std::pair<double, double>, EdSpectrum> spectra;
  ConventionLock lock;
  const std::array conventions{XySignConvention::SinMinus, XySignConvention::SinPlus};
  for (const auto& probe : probes) {
    auto key = std::make_pair(probe.lambda, probe.gamma);
    auto it = spectra.find(key);
    if (it == spectra.end()) {
      it = spectra.emplace(key, EdSpectrum(XyModel{probe.lambda, probe.gamma}, sites)).first;
    }
    const CorrelatorSet ed = it->second.correlators(probe.kT);
    for (std::size_t i = 0; i < conventions.size(); ++i) {
      XyIntegralOptions opts;
      opts.convention = conventions[i];
      const CorrelatorSet tl = xy_correlators_tl(probe.lambda, probe.gamma, probe.kT, opts);
      const double dev = std::max({std::abs(tl.z - ed.z), std::abs(tl.xx - ed.xx),
                                   std::abs(tl.yy - ed.yy), std::abs(tl.zz - ed.zz)});
      lock.max_deviation[i] = std::max(lock.max_deviation[i], dev);
    }
  }
  const std::size_t best = lock.max_deviation[0] <= lock.max_deviation[1] ? 0 : 1;
  lock.chosen = conventions[best];
  lock.accepted = lock.max_deviation[best] <= accept_tol;
  return lock;
}

}  // namespace teleqcp
