#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <complex>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "teleqcp/correlators.hpp"
#include "teleqcp/error.hpp"

namespace teleqcp {
namespace {

using cplx = std::complex<double>;

/// Moves the spin on site j to site j + 1 (periodic).
std::uint32_t translate(std::uint32_t s, int sites) {
  const std::uint32_t mask = (sites == 32) ? ~0u : ((1u << sites) - 1u);
  return ((s << 1) | (s >> (sites - 1))) & mask;
}

struct OrbitTable {
  std::vector<std::uint32_t> rep;  // smallest member of the translation orbit
  std::vector<int> period;         // orbit length, indexed by state
};

OrbitTable build_orbits(int sites) {
  const std::uint32_t dim = 1u << sites;
  OrbitTable t{std::vector<std::uint32_t>(dim), std::vector<int>(dim, 0)};
  std::vector<std::uint32_t> orbit;
  for (std::uint32_t s = 0; s < dim; ++s) {
    if (t.period[s] != 0) continue;
    orbit.clear();
    std::uint32_t x = s;
    do {
      orbit.push_back(x);
      x = translate(x, sites);
    } while (x != s);
    const std::uint32_t smallest = *std::min_element(orbit.begin(), orbit.end());
    for (std::uint32_t member : orbit) {
      t.rep[member] = smallest;
      t.period[member] = static_cast<int>(orbit.size());
    }
  }
  return t;
}

}  // namespace

EdSpectrum::EdSpectrum(const ModelSpec& spec, int sites, const EdConfig& config)
    : spec_(spec), sites_(sites) {
  validate(spec);
  check_ed_size(sites, 1, config);
  const std::uint32_t dim = 1u << sites;
  const OrbitTable orbits = build_orbits(sites);

  struct Sector {
    std::vector<std::uint32_t> states;
    std::vector<std::uint32_t> reps;
  };
  std::map<int, Sector> sectors;
  std::vector<std::int32_t> position(dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    auto& sec = sectors[sector_of(spec, s)];
    position[s] = static_cast<std::int32_t>(sec.states.size());
    sec.states.push_back(s);
    if (orbits.rep[s] == s) sec.reps.push_back(s);
  }

  std::vector<std::pair<double, StateData>> collected;
  collected.reserve(dim);
  std::vector<std::pair<std::uint32_t, double>> column;
  std::vector<std::int32_t> block_index(dim, -1);

  for (const auto& [label, sec] : sectors) {
    const auto sector_dim = static_cast<Eigen::Index>(sec.states.size());

    // Bits (0, 1) of each state as a two-qubit index and the states obtained
    // by overwriting them with each of the four patterns.
    std::vector<int> pattern(sector_dim);
    std::vector<std::array<std::int32_t, 4>> partner(sector_dim);
    for (Eigen::Index c = 0; c < sector_dim; ++c) {
      const std::uint32_t s = sec.states[c];
      pattern[c] = static_cast<int>(((s & 1u) << 1) | ((s >> 1) & 1u));
      for (int p = 0; p < 4; ++p) {
        const std::uint32_t t = (s & ~3u) | static_cast<std::uint32_t>(((p >> 1) & 1) | ((p & 1) << 1));
        partner[c][p] = sector_of(spec, t) == label ? position[t] : -1;
      }
    }

    for (int m = 0; m < sites; ++m) {
      const double k = 2.0 * std::numbers::pi * m / sites;
      std::vector<std::uint32_t> basis;
      for (std::uint32_t r : sec.reps) {
        if ((m * orbits.period[r]) % sites == 0) basis.push_back(r);
      }
      if (basis.empty()) continue;
      const auto n = static_cast<Eigen::Index>(basis.size());
      check_ed_size(sites, static_cast<std::size_t>(n), config);
      for (Eigen::Index a = 0; a < n; ++a) block_index[basis[a]] = static_cast<std::int32_t>(a);

      // |a(k)> = R_a^{-1/2} sum_{n < R_a} e^{-ikn} T^n |a>; the component of a
      // momentum-k vector on |b(k)> is sqrt(R_b) times its amplitude on b.
      Eigen::MatrixXcd block = Eigen::MatrixXcd::Zero(n, n);
      for (Eigen::Index a = 0; a < n; ++a) {
        const int period = orbits.period[basis[a]];
        std::uint32_t s = basis[a];
        for (int shift = 0; shift < period; ++shift, s = translate(s, sites)) {
          const cplx phase = std::polar(1.0 / std::sqrt(period), -k * shift);
          hamiltonian_column(spec, sites, s, column);
          for (const auto& [t, amp] : column) {
            if (orbits.rep[t] != t || block_index[t] < 0) continue;
            block(block_index[t], a) += std::sqrt(orbits.period[t]) * amp * phase;
          }
        }
      }
      for (std::uint32_t r : basis) block_index[r] = -1;

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(block);
      if (solver.info() != Eigen::Success) throw Error(ErrorCode::NonConvergence, "dense eigensolver failed");

      // Amplitude map from block coordinates to sector basis states.
      struct Spread {
        std::int32_t pos;
        Eigen::Index a;
        cplx factor;
      };
      std::vector<Spread> spread;
      for (Eigen::Index a = 0; a < n; ++a) {
        const int period = orbits.period[basis[a]];
        std::uint32_t s = basis[a];
        for (int shift = 0; shift < period; ++shift, s = translate(s, sites)) {
          spread.push_back({position[s], a, std::polar(1.0 / std::sqrt(period), -k * shift)});
        }
      }

      Eigen::VectorXcd psi(sector_dim);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto v = solver.eigenvectors().col(i);
        psi.setZero();
        for (const auto& e : spread) psi(e.pos) = v(e.a) * e.factor;

        StateData d{};
        d.reduced.fill(0.0);
        for (const auto& e : spread) {
          const cplx amp = psi(e.pos);
          for (int p = 0; p < 4; ++p) {
            const std::int32_t q = partner[e.pos][p];
            if (q >= 0) d.reduced[pattern[e.pos] * 4 + p] += amp * std::conj(psi(q));
          }
        }
        const auto& r = d.reduced;
        const double parallel = (r[0 * 4 + 3] + r[3 * 4 + 0]).real();
        const double antiparallel = (r[1 * 4 + 2] + r[2 * 4 + 1]).real();
        d.z = (r[0].real() - r[15].real());
        d.zz = r[0].real() - r[5].real() - r[10].real() + r[15].real();
        // XX flips both spins with amplitude 1; YY with -1 (parallel) or +1 (antiparallel).
        d.xx = antiparallel + parallel;
        d.yy = antiparallel - parallel;
        collected.emplace_back(solver.eigenvalues()(i), d);
      }
    }
  }

  std::stable_sort(collected.begin(), collected.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  energies_.reserve(collected.size());
  states_.reserve(collected.size());
  for (auto& [e, d] : collected) {
    energies_.push_back(e);
    states_.push_back(d);
  }
}

std::vector<double> EdSpectrum::weights(double kT, int* ground_multiplicity) const {
  if (!std::isfinite(kT) || kT < 0.0) throw Error(ErrorCode::InvalidArgument, "kT must be finite and >= 0");
  const double e0 = energies_.front();
  std::vector<double> w(energies_.size(), 0.0);
  if (kT == 0.0) {
    const double tol = 1e-9 * std::max(1.0, std::abs(e0));
    std::size_t count = 0;
    while (count < energies_.size() && energies_[count] - e0 <= tol) ++count;
    std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(count), 1.0 / static_cast<double>(count));
    if (ground_multiplicity) *ground_multiplicity = static_cast<int>(count);
    return w;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-(energies_[i] - e0) / kT);
    total += w[i];
  }
  for (double& x : w) x /= total;
  if (ground_multiplicity) *ground_multiplicity = 0;
  return w;
}

CorrelatorSet EdSpectrum::correlators(double kT) const {
  CorrelatorSet c;
  const auto w = weights(kT, &c.ground_multiplicity);
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    c.z += w[i] * states_[i].z;
    c.xx += w[i] * states_[i].xx;
    c.yy += w[i] * states_[i].yy;
    c.zz += w[i] * states_[i].zz;
  }
  c.kT = kT;
  c.source = CorrelatorSource::Ed;
  c.sites = sites_;
  return c;
}

TwoQubitState EdSpectrum::reduced_two_qubit(double kT) const {
  const auto w = weights(kT);
  TwoQubitState s;
  s.rho.setZero();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0.0) continue;
    for (int k = 0; k < 16; ++k) s.rho(k / 4, k % 4) += w[i] * states_[i].reduced[k];
  }
  return s;
}

CorrelatorSet ed_thermal_correlators(const ModelSpec& spec, int sites, double kT, const EdConfig& config) {
  return EdSpectrum(spec, sites, config).correlators(kT);
}

TwoQubitState ed_reduced_two_qubit(const ModelSpec& spec, int sites, double kT, const EdConfig& config) {
  return EdSpectrum(spec, sites, config).reduced_two_qubit(kT);
}

}  // namespace teleqcp
