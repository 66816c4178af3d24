#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "teleqcp/correlators.hpp"
#include "teleqcp/error.hpp"

namespace teleqcp {

std::string_view to_string(CorrelatorSource s) {
  switch (s) {
    case CorrelatorSource::Manual: return "manual";
    case CorrelatorSource::Ed: return "ed";
    case CorrelatorSource::XyIntegral: return "xy-integral";
  }
  return "?";
}

double TwoQubitState::trace_deviation() const { return std::abs(rho.trace() - 1.0); }

double TwoQubitState::hermiticity_deviation() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double TwoQubitState::min_eigenvalue() const {
  const Eigen::Matrix4cd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double TwoQubitState::off_x_magnitude() const {
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i == j || i + j == 3) continue;
      worst = std::max(worst, std::abs(rho(i, j)));
    }
  }
  return worst;
}

void check_density_matrix(const TwoQubitState& state, double tol) {
  std::ostringstream msg;
  if (state.trace_deviation() > tol) {
    msg << "trace deviates from 1 by " << state.trace_deviation();
  } else if (state.hermiticity_deviation() > tol) {
    msg << "not Hermitian (deviation " << state.hermiticity_deviation() << ")";
  } else if (const double lo = state.min_eigenvalue(); lo < -tol) {
    msg << "eigenvalue " << lo << " below zero; correlators are inconsistent";
  } else {
    return;
  }
  throw Error(ErrorCode::NotPositive, msg.str());
}

namespace {

TwoQubitState x_form(double a, double b, double c, double d, double e) {
  TwoQubitState s;
  s.rho.setZero();
  s.rho(0, 0) = a;
  s.rho(1, 1) = b;
  s.rho(2, 2) = b;
  s.rho(3, 3) = d;
  s.rho(1, 2) = s.rho(2, 1) = c;
  s.rho(0, 3) = s.rho(3, 0) = e;
  return s;
}

}  // namespace

TwoQubitState assemble_xxz_rho(const CorrelatorSet& c) {
  if (std::abs(c.xx - c.yy) > 1e-12) {
    throw Error(ErrorCode::InvalidForModel, "xxz assembly needs xx == yy");
  }
  auto s = x_form((1.0 + 2.0 * c.z + c.zz) / 4.0, (1.0 - c.zz) / 4.0, c.xx / 2.0,
                  (1.0 - 2.0 * c.z + c.zz) / 4.0, 0.0);
  check_density_matrix(s);
  return s;
}

TwoQubitState assemble_xy_rho(const CorrelatorSet& c) {
  auto s = x_form((1.0 + 2.0 * c.z + c.zz) / 4.0, (1.0 - c.zz) / 4.0, (c.xx + c.yy) / 4.0,
                  (1.0 - 2.0 * c.z + c.zz) / 4.0, (c.xx - c.yy) / 4.0);
  check_density_matrix(s);
  return s;
}

CorrelatorSet random_physical_correlators(std::mt19937_64& rng, bool u1_symmetric) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  // Uniform point on the simplex a + 2b + d = 1.
  const double e1 = -std::log(1.0 - unit(rng));
  const double e2 = -std::log(1.0 - unit(rng));
  const double e3 = -std::log(1.0 - unit(rng));
  const double norm = e1 + e2 + e3;
  const double a = e1 / norm;
  const double b = e2 / norm / 2.0;
  const double d = e3 / norm;
  const double coh = b * sym(rng);
  const double anti = u1_symmetric ? 0.0 : std::sqrt(a * d) * sym(rng);

  CorrelatorSet c;
  c.z = a - d;
  c.zz = a + d - 2.0 * b;
  c.xx = 2.0 * (coh + anti);
  c.yy = u1_symmetric ? c.xx : 2.0 * (coh - anti);
  return c;
}

}  // namespace teleqcp
