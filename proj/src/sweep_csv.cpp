#include "teleqcp/sweep_csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "teleqcp/error.hpp"

namespace teleqcp {
namespace {

constexpr std::string_view kHeader =
    "model,param_name,param,kT,z,xx,yy,zz,fmax,fmax_branch,favg,favg_branch,"
    "fs_psi_minus,fs_psi_plus,fs_phi_minus,fs_phi_plus";
constexpr std::size_t kColumns = 16;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, std::size_t line_no) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

Branch parse_branch(const std::string& text, std::size_t line_no) {
  for (Branch b : {Branch::Zz, Branch::Xx, Branch::Yy, Branch::PsiPair, Branch::PhiPair}) {
    if (text == to_string(b)) return b;
  }
  throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": bad branch '" + text + "'");
}

SweepParameter parse_parameter(const std::string& text, std::size_t line_no) {
  for (SweepParameter p : {SweepParameter::Delta, SweepParameter::Lambda, SweepParameter::Gamma}) {
    if (text == to_string(p)) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": bad parameter '" + text + "'");
}

}  // namespace

std::string format_number(double v) {
  if (v == 0.0) return "0";
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, v, std::chars_format::general, 12);
  if (ec != std::errc()) throw Error(ErrorCode::InvalidArgument, "number formatting failed");
  return std::string(buffer, ptr);
}

void write_sweep_csv(const SweepResult& result, std::ostream& out) {
  out << kHeader << '\n';
  const std::string param_name(to_string(result.parameter));
  for (const auto& s : result.series) {
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
      const SweepPoint& p = s.points[i];
      const CorrelatorSet& c = p.correlators;
      out << result.family << ',' << param_name << ',' << format_number(result.grid[i]) << ','
          << format_number(s.kT) << ',' << format_number(c.z) << ',' << format_number(c.xx) << ','
          << format_number(c.yy) << ',' << format_number(c.zz) << ',' << format_number(p.fmax.value) << ','
          << to_string(p.fmax.branch) << ',' << format_number(p.favg.value) << ',' << to_string(p.favg.branch);
      for (double f : p.per_set) out << ',' << format_number(f);
      out << '\n';
    }
  }
}

SweepResult read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::InvalidArgument, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw Error(ErrorCode::InvalidArgument, "unexpected CSV header");

  SweepResult result;
  std::map<double, std::size_t> series_of_kt;
  bool first_row = true;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != kColumns) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": expected 16 columns");
    }
    const SweepParameter parameter = parse_parameter(f[1], line_no);
    if (first_row) {
      result.family = f[0];
      result.parameter = parameter;
      first_row = false;
    } else if (f[0] != result.family || parameter != result.parameter) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": mixed model or parameter");
    }

    const double param = parse_number(f[2], line_no);
    const double kT = parse_number(f[3], line_no);
    auto [it, inserted] = series_of_kt.try_emplace(kT, result.series.size());
    if (inserted) result.series.push_back(SweepSeries{kT, {}});
    SweepSeries& s = result.series[it->second];
    if (it->second == 0) {
      result.grid.push_back(param);
    } else if (s.points.size() >= result.grid.size() || result.grid[s.points.size()] != param) {
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line_no) + ": series grids differ");
    }

    SweepPoint p;
    p.correlators.z = parse_number(f[4], line_no);
    p.correlators.xx = parse_number(f[5], line_no);
    p.correlators.yy = parse_number(f[6], line_no);
    p.correlators.zz = parse_number(f[7], line_no);
    p.correlators.kT = kT;
    p.fmax.value = parse_number(f[8], line_no);
    p.fmax.branch = parse_branch(f[9], line_no);
    p.favg.value = parse_number(f[10], line_no);
    p.favg.branch = parse_branch(f[11], line_no);
    for (std::size_t k = 0; k < 4; ++k) p.per_set[k] = parse_number(f[12 + k], line_no);
    s.points.push_back(p);
  }
  if (result.series.empty()) throw Error(ErrorCode::InvalidArgument, "CSV has no data rows");
  for (const auto& s : result.series) {
    if (s.points.size() != result.grid.size()) throw Error(ErrorCode::InvalidArgument, "series lengths differ");
  }
  for (std::size_t i = 1; i < result.grid.size(); ++i) {
    if (!(result.grid[i] > result.grid[i - 1])) throw Error(ErrorCode::InvalidArgument, "grid not increasing");
  }
  const std::size_t n = result.grid.size();
  result.step = n > 1 ? (result.grid.back() - result.grid.front()) / static_cast<double>(n - 1) : 0.0;
  return result;
}

}  // namespace teleqcp
