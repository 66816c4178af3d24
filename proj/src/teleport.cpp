#include "teleqcp/teleport.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "teleqcp/error.hpp"
#include "teleqcp/quadrature.hpp"

namespace teleqcp {
namespace {

using cplx = std::complex<double>;
constexpr double kMinProbability = 1e-14;

// Unnormalised Bob state Tr_12[P_j (rho_1 x rho_23) P_j], contracted through
// phi(a2) = sum_a1 conj(B_j(a1, a2)) psi(a1).
Eigen::Matrix2cd conditional_bob(const PureQubit& psi, const TwoQubitState& rho23, BellOutcome j) {
  const Eigen::Vector2cd in = psi.ket();
  const Eigen::Vector4cd bell = bell_vector(j);
  Eigen::Vector2cd phi;
  for (int a2 = 0; a2 < 2; ++a2) {
    phi(a2) = std::conj(bell(a2)) * in(0) + std::conj(bell(2 + a2)) * in(1);
  }
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  for (int b = 0; b < 2; ++b) {
    for (int bp = 0; bp < 2; ++bp) {
      cplx acc = 0.0;
      for (int a2 = 0; a2 < 2; ++a2) {
        for (int a2p = 0; a2p < 2; ++a2p) {
          acc += phi(a2) * rho23.rho(2 * a2 + b, 2 * a2p + bp) * std::conj(phi(a2p));
        }
      }
      m(b, bp) = acc;
    }
  }
  return m;
}

struct SignPattern {
  double xx;
  double yy;
  double zz;
};

// Signs with which (xx, yy, zz) enter the general mean-fidelity form for each set.
SignPattern sign_pattern(UnitarySet k) {
  switch (k) {
    case UnitarySet::PsiMinus: return {-1.0, -1.0, 1.0};
    case UnitarySet::PsiPlus: return {1.0, 1.0, 1.0};
    case UnitarySet::PhiMinus: return {-1.0, 1.0, -1.0};
    case UnitarySet::PhiPlus: return {1.0, -1.0, -1.0};
  }
  return {1.0, 1.0, 1.0};
}

double h_form(double r, double chi, double xx, double yy, double zz) {
  const double u = r * r * (1.0 - r * r);
  return (1.0 + 2.0 * u * (xx + yy + 2.0 * zz) - zz + 2.0 * u * (xx - yy) * std::cos(2.0 * chi)) / 2.0;
}

double f_form(double r, double xx, double zz) {
  const double u = r * r * (1.0 - r * r);
  return (1.0 + 4.0 * u * (xx + zz) - zz) / 2.0;
}

double g_form(double r, double chi, double xx, double zz) {
  const double u = r * r * (1.0 - r * r);
  const double polar = 1.0 - 2.0 * r * r;
  return (1.0 + polar * polar * zz + 4.0 * u * xx * std::cos(2.0 * chi)) / 2.0;
}

double bloch_average(const std::function<double(const PureQubit&)>& f, int nodes) {
  const GaussRule u_rule = gauss_legendre(nodes, 0.0, 1.0);
  const GaussRule chi_rule = gauss_legendre(nodes, 0.0, 2.0 * std::numbers::pi);
  double total = 0.0;
  for (int a = 0; a < nodes; ++a) {
    const double r = std::sqrt(u_rule.nodes[a]);
    double inner = 0.0;
    for (int b = 0; b < nodes; ++b) inner += chi_rule.weights[b] * f(PureQubit{r, chi_rule.nodes[b]});
    total += u_rule.weights[a] * inner;
  }
  return total / (2.0 * std::numbers::pi);
}

double checked_bloch_average(const std::function<double(const PureQubit&)>& f, int nodes) {
  if (nodes < 32) throw Error(ErrorCode::InvalidArgument, "Bloch quadrature needs at least 32 nodes per axis");
  const double coarse = bloch_average(f, nodes);
  const double fine = bloch_average(f, 2 * nodes);
  if (std::abs(fine - coarse) > 1e-12) {
    throw Error(ErrorCode::QuadratureNonConvergence, "Bloch average not converged");
  }
  return fine;
}

}  // namespace

PureQubit PureQubit::from_bloch(double theta, double chi) { return {std::cos(theta / 2.0), chi}; }

Eigen::Vector2cd PureQubit::ket() const {
  const double rr = std::clamp(r, 0.0, 1.0);
  return {cplx(rr, 0.0), std::sqrt(1.0 - rr * rr) * std::polar(1.0, chi)};
}

std::string_view to_string(BellOutcome j) {
  switch (j) {
    case BellOutcome::PsiMinus: return "psi-";
    case BellOutcome::PsiPlus: return "psi+";
    case BellOutcome::PhiMinus: return "phi-";
    case BellOutcome::PhiPlus: return "phi+";
  }
  return "?";
}

std::string_view to_string(UnitarySet k) {
  switch (k) {
    case UnitarySet::PsiMinus: return "S_psi-";
    case UnitarySet::PsiPlus: return "S_psi+";
    case UnitarySet::PhiMinus: return "S_phi-";
    case UnitarySet::PhiPlus: return "S_phi+";
  }
  return "?";
}

std::string_view to_string(InputFamily f) {
  switch (f) {
    case InputFamily::Zero: return "zero";
    case InputFamily::One: return "one";
    case InputFamily::Equator: return "equator";
  }
  return "?";
}

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::Zz: return "zz";
    case Branch::Xx: return "xx";
    case Branch::Yy: return "yy";
    case Branch::PsiPair: return "psi";
    case Branch::PhiPair: return "phi";
  }
  return "?";
}

Eigen::Vector4cd bell_vector(BellOutcome j) {
  const double s = 1.0 / std::numbers::sqrt2;
  switch (j) {
    case BellOutcome::PsiMinus: return {0.0, s, -s, 0.0};
    case BellOutcome::PsiPlus: return {0.0, s, s, 0.0};
    case BellOutcome::PhiMinus: return {s, 0.0, 0.0, -s};
    case BellOutcome::PhiPlus: return {s, 0.0, 0.0, s};
  }
  return Eigen::Vector4cd::Zero();
}

Correction correction(UnitarySet k, BellOutcome j) {
  // Rows: sets; columns: outcomes ordered Phi+, Phi-, Psi+, Psi-.
  using C = Correction;
  static constexpr C table[4][4] = {
      /* S_psi- */ {C::ZX, C::X, C::Z, C::Identity},
      /* S_psi+ */ {C::X, C::ZX, C::Identity, C::Z},
      /* S_phi- */ {C::Z, C::Identity, C::ZX, C::X},
      /* S_phi+ */ {C::Identity, C::Z, C::X, C::ZX},
  };
  int col = 0;
  switch (j) {
    case BellOutcome::PhiPlus: col = 0; break;
    case BellOutcome::PhiMinus: col = 1; break;
    case BellOutcome::PsiPlus: col = 2; break;
    case BellOutcome::PsiMinus: col = 3; break;
  }
  return table[static_cast<int>(k)][col];
}

Eigen::Matrix2cd correction_matrix(Correction u) {
  Eigen::Matrix2cd m;
  switch (u) {
    case Correction::Identity: m << 1, 0, 0, 1; break;
    case Correction::Z: m << 1, 0, 0, -1; break;
    case Correction::X: m << 0, 1, 1, 0; break;
    case Correction::ZX: m << 0, 1, -1, 0; break;
  }
  return m;
}

double outcome_probability(const PureQubit& psi, const TwoQubitState& rho23, BellOutcome j) {
  return conditional_bob(psi, rho23, j).trace().real();
}

Eigen::Matrix2cd bob_state(const PureQubit& psi, const TwoQubitState& rho23, BellOutcome j, UnitarySet k) {
  const Eigen::Matrix2cd m = conditional_bob(psi, rho23, j);
  const double q = m.trace().real();
  if (q <= kMinProbability) {
    throw Error(ErrorCode::ZeroProbabilityOutcome,
                std::string("outcome ") + std::string(to_string(j)) + " has probability " + std::to_string(q));
  }
  const Eigen::Matrix2cd u = correction_matrix(correction(k, j));
  return u * m * u.adjoint() / q;
}

double run_fidelity(const PureQubit& psi, const TwoQubitState& rho23, BellOutcome j, UnitarySet k) {
  const Eigen::Vector2cd v = psi.ket();
  return v.dot(bob_state(psi, rho23, j, k) * v).real();
}

double mean_fidelity_sim(const PureQubit& psi, const TwoQubitState& rho23, UnitarySet k) {
  double total = 0.0;
  for (BellOutcome j : kBellOutcomes) {
    const double q = outcome_probability(psi, rho23, j);
    if (q <= kMinProbability) continue;
    total += q * run_fidelity(psi, rho23, j, k);
  }
  return total;
}

double mean_fidelity_xxz_form(const PureQubit& psi, const CorrelatorSet& c, UnitarySet k) {
  switch (k) {
    case UnitarySet::PsiMinus: return f_form(psi.r, -c.xx, c.zz);
    case UnitarySet::PsiPlus: return f_form(psi.r, c.xx, c.zz);
    case UnitarySet::PhiMinus: return g_form(psi.r, psi.chi, -c.xx, c.zz);
    case UnitarySet::PhiPlus: return g_form(psi.r, psi.chi, c.xx, c.zz);
  }
  return 0.0;
}

double mean_fidelity_xy_form(const PureQubit& psi, const CorrelatorSet& c, UnitarySet k) {
  const SignPattern s = sign_pattern(k);
  return h_form(psi.r, psi.chi, s.xx * c.xx, s.yy * c.yy, s.zz * c.zz);
}

double mean_fidelity_closed(const PureQubit& psi, const CorrelatorSet& c, UnitarySet k) {
  return c.xx == c.yy ? mean_fidelity_xxz_form(psi, c, k) : mean_fidelity_xy_form(psi, c, k);
}

FidelityReport per_set_max_fidelity(const CorrelatorSet& c, UnitarySet k) {
  const SignPattern s = sign_pattern(k);
  FidelityReport best;
  best.argmax_set = k;
  best.value = (1.0 - s.zz * c.zz) / 2.0;  // |0> and |1> give the same value
  best.argmax_state = InputFamily::Zero;
  best.branch = Branch::Zz;

  const double along_x = (1.0 + s.xx * c.xx) / 2.0;
  if (along_x > best.value) {
    best.value = along_x;
    best.argmax_state = InputFamily::Equator;
    best.branch = Branch::Xx;
    best.equator_phase = 0.0;
  }
  const double along_y = (1.0 + s.yy * c.yy) / 2.0;
  if (along_y > best.value) {
    best.value = along_y;
    best.argmax_state = InputFamily::Equator;
    best.branch = Branch::Yy;
    best.equator_phase = std::numbers::pi / 2.0;
  }
  return best;
}

double per_set_max_fidelity_xxz_form(const CorrelatorSet& c, UnitarySet k) {
  switch (k) {
    case UnitarySet::PsiMinus: return std::max((1.0 - c.zz) / 2.0, (1.0 - c.xx) / 2.0);
    case UnitarySet::PsiPlus: return std::max((1.0 - c.zz) / 2.0, (1.0 + c.xx) / 2.0);
    case UnitarySet::PhiMinus:
    case UnitarySet::PhiPlus: return std::max((1.0 + c.zz) / 2.0, (1.0 + std::abs(c.xx)) / 2.0);
  }
  return 0.0;
}

FidelityReport max_mean_fidelity(const CorrelatorSet& c) {
  FidelityReport report;
  report.value = (1.0 + std::abs(c.zz)) / 2.0;
  report.branch = Branch::Zz;
  if (const double v = (1.0 + std::abs(c.xx)) / 2.0; v > report.value) {
    report.value = v;
    report.branch = Branch::Xx;
  }
  if (const double v = (1.0 + std::abs(c.yy)) / 2.0; v > report.value) {
    report.value = v;
    report.branch = Branch::Yy;
  }

  // First set (in set order) attaining the maximum through the winning branch.
  std::optional<FidelityReport> same_value;
  for (UnitarySet k : kUnitarySets) {
    const FidelityReport r = per_set_max_fidelity(c, k);
    if (r.value != report.value) continue;
    if (r.branch == report.branch) {
      same_value = r;
      break;
    }
    if (!same_value) same_value = r;
  }
  if (same_value) {
    report.argmax_set = same_value->argmax_set;
    report.argmax_state = same_value->argmax_state;
    report.equator_phase = same_value->equator_phase;
  }
  return report;
}

double max_mean_fidelity_xxz_form(const CorrelatorSet& c) {
  return std::max((1.0 + std::abs(c.zz)) / 2.0, (1.0 + std::abs(c.xx)) / 2.0);
}

double avg_fidelity_closed(const CorrelatorSet& c, UnitarySet k) {
  switch (k) {
    case UnitarySet::PsiMinus: return (3.0 - (c.xx + c.yy) - c.zz) / 6.0;
    case UnitarySet::PsiPlus: return (3.0 + (c.xx + c.yy) - c.zz) / 6.0;
    case UnitarySet::PhiMinus: return (3.0 - (c.xx - c.yy) + c.zz) / 6.0;
    case UnitarySet::PhiPlus: return (3.0 + (c.xx - c.yy) + c.zz) / 6.0;
  }
  return 0.0;
}

double avg_fidelity_xxz_form(const CorrelatorSet& c, UnitarySet k) {
  switch (k) {
    case UnitarySet::PsiMinus: return (3.0 - 2.0 * c.xx - c.zz) / 6.0;
    case UnitarySet::PsiPlus: return (3.0 + 2.0 * c.xx - c.zz) / 6.0;
    case UnitarySet::PhiMinus:
    case UnitarySet::PhiPlus: return (3.0 + c.zz) / 6.0;
  }
  return 0.0;
}

double avg_fidelity_quadrature(const TwoQubitState& rho23, UnitarySet k, int nodes) {
  return checked_bloch_average([&](const PureQubit& psi) { return mean_fidelity_sim(psi, rho23, k); }, nodes);
}

double avg_outcome_probability_quadrature(const TwoQubitState& rho23, BellOutcome j, int nodes) {
  return checked_bloch_average([&](const PureQubit& psi) { return outcome_probability(psi, rho23, j); },
                               nodes);
}

FidelityReport max_avg_fidelity(const CorrelatorSet& c) {
  FidelityReport report;
  const double psi_pair = (3.0 + std::abs(c.xx + c.yy) - c.zz) / 6.0;
  const double phi_pair = (3.0 + std::abs(c.xx - c.yy) + c.zz) / 6.0;
  report.value = psi_pair;
  report.branch = Branch::PsiPair;
  if (phi_pair > psi_pair) {
    report.value = phi_pair;
    report.branch = Branch::PhiPair;
  }
  if (report.branch == Branch::PsiPair) {
    report.argmax_set = c.xx + c.yy > 0.0 ? UnitarySet::PsiPlus : UnitarySet::PsiMinus;
  } else {
    report.argmax_set = c.xx - c.yy > 0.0 ? UnitarySet::PhiPlus : UnitarySet::PhiMinus;
  }
  return report;
}

double max_avg_fidelity_xxz_form(const CorrelatorSet& c) {
  return std::max((3.0 + 2.0 * std::abs(c.xx) - c.zz) / 6.0, (3.0 + c.zz) / 6.0);
}

}  // namespace teleqcp
