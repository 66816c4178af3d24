#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace teleqcp::cli {

enum ExitCode : int {
  kOk = 0,
  kSelfcheckFailed = 1,
  kBadArguments = 2,
  kBackendError = 3,
  kFitError = 4,
};

struct RangeSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;
};

struct RunConfig {
  std::string subcommand;
  std::string model;
  std::vector<double> h;
  std::optional<double> lambda;
  std::optional<double> gamma;
  std::optional<RangeSpec> delta_range;
  std::optional<RangeSpec> lambda_range;
  std::optional<RangeSpec> gamma_range;
  std::vector<double> kts;
  std::optional<RangeSpec> kt_range;
  std::string backend;
  int sites = 12;
  std::string out;
  std::string in;
  int workers = 0;
  std::uint64_t seed = 20100101;
  std::optional<std::pair<double, double>> window;
  int deriv_order = 1;
  std::string fit = "linear";
  std::string quantity = "fmax";
  double kt_max = 0.1;
  int trials = 1000;
  bool corrupt_sign = false;
};

/// Parses "a:b:step"; throws std::invalid_argument naming `field`.
RangeSpec parse_range(const std::string& text, const std::string& field);
/// Parses "a:b"; throws std::invalid_argument naming `field`.
std::pair<double, double> parse_window(const std::string& text, const std::string& field);

/// Rejects inconsistent settings with a message that starts with the flag name.
void validate(const RunConfig& config);

/// Entry point shared by the executable and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace teleqcp::cli
