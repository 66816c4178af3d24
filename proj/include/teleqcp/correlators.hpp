#pragma once

#include <array>
#include <complex>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "teleqcp/chain_models.hpp"

namespace teleqcp {

enum class CorrelatorSource { Manual, Ed, XyIntegral };

std::string_view to_string(CorrelatorSource s);

/// Nearest-neighbour thermal correlators <Z>, <XX>, <YY>, <ZZ>.
struct CorrelatorSet {
  double z = 0.0;
  double xx = 0.0;
  double yy = 0.0;
  double zz = 0.0;
  double kT = 0.0;
  CorrelatorSource source = CorrelatorSource::Manual;
  int sites = 0;  // ED chain length, 0 otherwise
  /// Number of ground states averaged over at kT = 0 (ED only); > 1 flags a
  /// degenerate ground manifold.
  int ground_multiplicity = 0;
};

/// Two-qubit density matrix in the basis |00>, |01>, |10>, |11>, where |0> is
/// spin up (Z = +1).
struct TwoQubitState {
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Identity() / 4.0;

  double trace_deviation() const;
  double hermiticity_deviation() const;
  double min_eigenvalue() const;
  /// Largest magnitude among entries outside the X pattern (diagonal + anti-diagonal).
  double off_x_magnitude() const;
};

/// Throws NotPositive unless `state` has unit trace, is Hermitian and has no
/// eigenvalue below -tol.
void check_density_matrix(const TwoQubitState& state, double tol = 1e-10);

/// X-form state with a, b, c, d; requires xx == yy (else InvalidForModel).
TwoQubitState assemble_xxz_rho(const CorrelatorSet& c);

/// X-form state with a, b, c, d, e; e = (xx - yy)/4.
TwoQubitState assemble_xy_rho(const CorrelatorSet& c);

/// Draws correlators of a random physical X-form state (uniform weights for
/// the diagonal, coherences uniform inside their positivity bounds). With
/// `u1_symmetric` the anti-diagonal coherence is zero so that xx == yy.
CorrelatorSet random_physical_correlators(std::mt19937_64& rng, bool u1_symmetric = false);

/// Exact diagonalisation of a periodic chain, blocked by the conserved
/// sector (magnetisation for XXZ, spin-flip parity for XY) and by lattice
/// momentum. Only energies and per-eigenstate observables are kept, so one
/// spectrum serves every kT.
/// Immutable after construction and safe to share between threads.
class EdSpectrum {
 public:
  EdSpectrum(const ModelSpec& spec, int sites, const EdConfig& config = {});

  const ModelSpec& spec() const { return spec_; }
  int sites() const { return sites_; }
  double ground_energy() const { return energies_.front(); }
  std::span<const double> energies() const { return energies_; }

  /// Bond-averaged correlators of exp(-H/kT)/Z; kT = 0 averages the ground
  /// manifold with equal weights.
  CorrelatorSet correlators(double kT) const;

  /// Partial trace of the thermal state onto sites 0 and 1.
  TwoQubitState reduced_two_qubit(double kT) const;

  /// Boltzmann weights in energy order; kT = 0 gives the ground-manifold average.
  std::vector<double> weights(double kT, int* ground_multiplicity = nullptr) const;

 private:
  struct StateData {
    double z;
    double xx;
    double yy;
    double zz;
    std::array<std::complex<double>, 16> reduced;  // row-major 4x4 on sites 0, 1
  };

  ModelSpec spec_;
  int sites_;
  std::vector<double> energies_;  // ascending
  std::vector<StateData> states_;
};

CorrelatorSet ed_thermal_correlators(const ModelSpec& spec, int sites, double kT,
                                     const EdConfig& config = {});
TwoQubitState ed_reduced_two_qubit(const ModelSpec& spec, int sites, double kT,
                                   const EdConfig& config = {});

/// Sign in front of gamma*lambda*sin(kn)*sin(k) in the free-fermion integrand
/// G(n) = (1/pi) int_0^pi tanh(w/2kT) [cos(kn)(1 + lambda cos k) -/+ gamma lambda sin(kn) sin k] / w.
enum class XySignConvention { SinMinus, SinPlus };

/// Convention selected by `lock_xy_convention` against ED on the default probes;
/// the unit tests rerun the lock and fail if it ever disagrees.
inline constexpr XySignConvention kLockedXyConvention = XySignConvention::SinMinus;

std::string_view to_string(XySignConvention c);

struct XyIntegralOptions {
  double abs_tol = 1e-10;
  XySignConvention convention = kLockedXyConvention;
};

/// Quasiparticle energy w(k) = sqrt((1 + lambda cos k)^2 + (gamma lambda sin k)^2).
double xy_dispersion(double lambda, double gamma, double k);

/// The momentum integral G(n) of the infinite XY chain.
double xy_g(int n, double lambda, double gamma, double kT, const XyIntegralOptions& options = {});

/// Infinite-chain correlators: z = G(0), xx = G(-1), yy = G(1), zz = G(0)^2 - G(1) G(-1).
CorrelatorSet xy_correlators_tl(double lambda, double gamma, double kT,
                                const XyIntegralOptions& options = {});

struct ConventionProbe {
  double lambda;
  double gamma;
  double kT;
};

struct ConventionLock {
  XySignConvention chosen = kLockedXyConvention;
  /// Largest |integral - ED| over probes and correlators, per convention.
  std::array<double, 2> max_deviation{};
  bool accepted = false;
};

std::vector<ConventionProbe> default_convention_probes();

/// Evaluates both sign conventions at the probes against ED and picks the one
/// that matches within `accept_tol`. `accepted` is false when neither does.
ConventionLock lock_xy_convention(std::span<const ConventionProbe> probes, int sites = 12,
                                  double accept_tol = 1e-2);

}  // namespace teleqcp
