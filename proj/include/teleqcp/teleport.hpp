#pragma once

#include <array>
#include <optional>
#include <string_view>

#include <Eigen/Dense>

#include "teleqcp/correlators.hpp"

namespace teleqcp {

/// Input qubit r|0> + sqrt(1 - r^2) e^{i chi} |1>.
struct PureQubit {
  double r = 1.0;
  double chi = 0.0;

  static PureQubit from_bloch(double theta, double chi);
  Eigen::Vector2cd ket() const;
  double cos_theta() const { return 2.0 * r * r - 1.0; }
};

enum class BellOutcome { PsiMinus, PsiPlus, PhiMinus, PhiPlus };
/// S_k: the Pauli corrections that make teleportation through Bell state k perfect.
enum class UnitarySet { PsiMinus, PsiPlus, PhiMinus, PhiPlus };
enum class Correction { Identity, Z, X, ZX };

inline constexpr std::array kBellOutcomes{BellOutcome::PsiMinus, BellOutcome::PsiPlus,
                                          BellOutcome::PhiMinus, BellOutcome::PhiPlus};
inline constexpr std::array kUnitarySets{UnitarySet::PsiMinus, UnitarySet::PsiPlus,
                                         UnitarySet::PhiMinus, UnitarySet::PhiPlus};

std::string_view to_string(BellOutcome j);
std::string_view to_string(UnitarySet k);

Eigen::Vector4cd bell_vector(BellOutcome j);
Correction correction(UnitarySet k, BellOutcome j);
Eigen::Matrix2cd correction_matrix(Correction u);

/// Q_j = Tr[P_j (rho_1 x rho_23)].
double outcome_probability(const PureQubit& psi, const TwoQubitState& rho23, BellOutcome j);

/// Bob's qubit after outcome j and the correction prescribed by S_k.
/// Throws ZeroProbabilityOutcome when Q_j <= 1e-14.
Eigen::Matrix2cd bob_state(const PureQubit& psi, const TwoQubitState& rho23, BellOutcome j, UnitarySet k);

double run_fidelity(const PureQubit& psi, const TwoQubitState& rho23, BellOutcome j, UnitarySet k);

/// sum_j Q_j F_j by explicit simulation; outcomes with Q_j <= 1e-14 contribute 0.
double mean_fidelity_sim(const PureQubit& psi, const TwoQubitState& rho23, UnitarySet k);

// Closed forms. The "xxz" forms assume xx == yy and read only c.xx; the "xy"
// forms are general. `mean_fidelity_closed` picks the xxz form when xx == yy.
double mean_fidelity_xxz_form(const PureQubit& psi, const CorrelatorSet& c, UnitarySet k);
double mean_fidelity_xy_form(const PureQubit& psi, const CorrelatorSet& c, UnitarySet k);
double mean_fidelity_closed(const PureQubit& psi, const CorrelatorSet& c, UnitarySet k);

enum class InputFamily { Zero, One, Equator };
enum class Branch { Zz, Xx, Yy, PsiPair, PhiPair };

std::string_view to_string(InputFamily f);
std::string_view to_string(Branch b);

struct FidelityReport {
  double value = 0.0;
  UnitarySet argmax_set = UnitarySet::PsiMinus;
  /// Optimal input family; empty for Bloch-averaged quantities.
  std::optional<InputFamily> argmax_state;
  Branch branch = Branch::Zz;
  /// Optimal chi on the equator (0 or pi/2) when argmax_state is Equator.
  double equator_phase = 0.0;
};

/// max over input states for a fixed set. Candidates are tried in the order
/// |0>, |1>, equator (chi = 0 then pi/2) and only a strictly larger value
/// replaces the incumbent.
FidelityReport per_set_max_fidelity(const CorrelatorSet& c, UnitarySet k);
double per_set_max_fidelity_xxz_form(const CorrelatorSet& c, UnitarySet k);

/// max[(1+|zz|)/2, (1+|xx|)/2, (1+|yy|)/2]; ties resolve zz < xx < yy.
FidelityReport max_mean_fidelity(const CorrelatorSet& c);
double max_mean_fidelity_xxz_form(const CorrelatorSet& c);

/// Bloch-sphere average of the mean fidelity for set k.
double avg_fidelity_closed(const CorrelatorSet& c, UnitarySet k);
double avg_fidelity_xxz_form(const CorrelatorSet& c, UnitarySet k);

/// Product Gauss-Legendre average of mean_fidelity_sim over u = r^2 in [0, 1]
/// and chi in [0, 2 pi), both uniform. Re-evaluated at twice the node count;
/// throws QuadratureNonConvergence if the two disagree beyond 1e-12.
double avg_fidelity_quadrature(const TwoQubitState& rho23, UnitarySet k, int nodes = 32);
double avg_outcome_probability_quadrature(const TwoQubitState& rho23, BellOutcome j, int nodes = 32);

/// max[(3 + |xx+yy| - zz)/6, (3 + |xx-yy| + zz)/6]; ties resolve to the Psi pair.
FidelityReport max_avg_fidelity(const CorrelatorSet& c);
double max_avg_fidelity_xxz_form(const CorrelatorSet& c);

}  // namespace teleqcp
