#pragma once

#include <iosfwd>
#include <string>

#include "teleqcp/qcp_detect.hpp"

namespace teleqcp {

/// 12 significant digits, '.' decimal point, no "-0".
std::string format_number(double v);

/// Header plus one row per (kT, parameter), kT-major in request order.
void write_sweep_csv(const SweepResult& result, std::ostream& out);

/// Inverse of write_sweep_csv. Throws InvalidArgument on malformed input.
SweepResult read_sweep_csv(std::istream& in);

}  // namespace teleqcp
