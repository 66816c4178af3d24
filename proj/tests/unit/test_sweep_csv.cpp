#include <gtest/gtest.h>

#include <clocale>
#include <sstream>

#include "teleqcp/error.hpp"
#include "teleqcp/qcp_detect.hpp"
#include "teleqcp/sweep_csv.hpp"

using namespace teleqcp;

namespace {

SweepResult small_sweep(int workers) {
  SweepRequest r;
  r.base = XyModel{1.0, 0.5};
  r.lo = 0.9;
  r.hi = 1.1;
  r.step = 0.05;
  r.kts = {0.0, 0.1};
  r.workers = workers;
  return sweep(r);
}

std::string to_csv(const SweepResult& s) {
  std::ostringstream out;
  write_sweep_csv(s, out);
  return out.str();
}

}  // namespace

TEST(Format, Numbers) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-2.5e-9), "-2.5e-09");
  EXPECT_EQ(format_number(1234567.0), "1234567");
}

TEST(Format, LocaleIndependent) {
  const char* old = std::setlocale(LC_NUMERIC, nullptr);
  const std::string saved = old ? old : "C";
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8") == nullptr) GTEST_SKIP() << "locale not installed";
  EXPECT_EQ(format_number(0.25), "0.25");
  std::setlocale(LC_NUMERIC, saved.c_str());
}

TEST(Csv, HeaderRowsAndLineEndings) {
  const std::string text = to_csv(small_sweep(1));
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "model,param_name,param,kT,z,xx,yy,zz,fmax,fmax_branch,favg,favg_branch,fs_psi_minus,fs_psi_plus,"
            "fs_phi_minus,fs_phi_plus");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 5 * 2);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("xy,lambda,0.9,0,", 0), 0u) << line;
}

TEST(Csv, RoundTrip) {
  const auto s = small_sweep(2);
  std::istringstream in(to_csv(s));
  const auto back = read_sweep_csv(in);
  EXPECT_EQ(back.family, "xy");
  EXPECT_EQ(back.parameter, SweepParameter::Lambda);
  ASSERT_EQ(back.grid.size(), s.grid.size());
  for (std::size_t i = 0; i < s.grid.size(); ++i) EXPECT_NEAR(back.grid[i], s.grid[i], 1e-12);
  ASSERT_EQ(back.series.size(), 2u);
  EXPECT_NEAR(back.step, 0.05, 1e-12);
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    EXPECT_NEAR(back.series[1].points[i].fmax.value, s.series[1].points[i].fmax.value, 1e-11);
    EXPECT_EQ(back.series[1].points[i].fmax.branch, s.series[1].points[i].fmax.branch);
  }
  EXPECT_EQ(to_csv(back), to_csv(s));
}

TEST(Csv, DeterministicAcrossWorkers) {
  const std::string one = to_csv(small_sweep(1));
  EXPECT_EQ(one, to_csv(small_sweep(1)));
  EXPECT_EQ(one, to_csv(small_sweep(3)));
  EXPECT_EQ(one, to_csv(small_sweep(0)));
}

TEST(Csv, RejectsMalformedInput) {
  for (const std::string& bad : std::vector<std::string>{"", "model,param\n", to_csv(small_sweep(1)) + "xy,lambda,abc\n"}) {
    std::istringstream in(bad);
    EXPECT_THROW(read_sweep_csv(in), Error);
  }
}
