#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace teleqcp {

/// H = sum_j [XX + YY + delta ZZ - (h/2) Z_j], periodic.
struct XxzModel {
  double delta = 0.0;
  double h = 0.0;
};

/// H = -(lambda/4) sum_j [(1+gamma) XX + (1-gamma) YY] - (1/2) sum_j Z_j, periodic.
struct XyModel {
  double lambda = 0.0;
  double gamma = 0.0;
};

using ModelSpec = std::variant<XxzModel, XyModel>;

enum class SweepParameter { Delta, Lambda, Gamma };

std::string_view to_string(SweepParameter p);
std::string_view family_name(const ModelSpec& spec);

/// Throws InvalidArgument on non-finite parameters, gamma outside [-1, 1] or lambda < 0.
void validate(const ModelSpec& spec);

/// Copy of `base` with the swept parameter replaced. Throws InvalidForModel when
/// the parameter does not belong to the model family.
ModelSpec with_parameter(const ModelSpec& base, SweepParameter p, double value);
double parameter_value(const ModelSpec& spec, SweepParameter p);

/// Ferromagnetic edge of the XXZ chain in a longitudinal field, h = 4(1 + delta).
double xxz_delta1(double h);

/// Upper XXZ critical anisotropy: delta2 = cosh(eta) with
/// h = 4 sinh(eta) sum_j (-1)^j / cosh(j eta). `tol` bounds |residual| in h.
double xxz_delta2(double h, double tol = 1e-6);

/// The right-hand side of the delta2 equation as a function of eta. Evaluated
/// with the direct alternating series for eta >= 1 and its Poisson-dual
/// series below, so small eta stays cheap.
double xxz_delta2_field(double eta, double tol = 1e-12);

struct CriticalPoint {
  std::string name;
  double value = 0.0;
  std::string provenance;
};
using CriticalPoints = std::vector<CriticalPoint>;

/// Exact critical points crossed when sweeping `p` through `spec`'s family.
CriticalPoints known_qcps(const ModelSpec& spec, SweepParameter p);

struct EdConfig {
  int max_sites = 14;
  /// Upper bound for one dense block (dim^2 doubles).
  std::size_t memory_budget_bytes = std::size_t{512} << 20;
};

struct HamiltonianMatrix {
  int sites = 0;
  Eigen::MatrixXd matrix;
  /// L = 2 with periodic boundaries counts the single bond twice.
  bool bond_double_counted = false;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// Computational basis: bit j of a state index is 1 when spin j points down.
HamiltonianMatrix build_hamiltonian(const ModelSpec& spec, int sites, const EdConfig& config = {});

/// Nonzero elements <s'|H|s> of column `state`, diagonal first, duplicates merged.
void hamiltonian_column(const ModelSpec& spec, int sites, std::uint32_t state,
                        std::vector<std::pair<std::uint32_t, double>>& out);

/// Label of the symmetry sector containing `state`: number of down spins for
/// XXZ (U(1)), parity of that number for XY (Z2).
int sector_of(const ModelSpec& spec, std::uint32_t state);

/// Throws InvalidArgument for L outside [2, max_sites] and DimensionOverflow
/// when a `dim` x `dim` dense block exceeds the memory budget.
void check_ed_size(int sites, std::size_t dim, const EdConfig& config);

}  // namespace teleqcp
