#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <stdexcept>
#include <sstream>

#include "eosvac/scan.hpp"

using namespace eosvac;
using namespace eosvac::scan;

namespace {

const std::string data_dir = EOSVAC_TEST_DATA;

// Smooth synthetic s^2: a Gaussian line at 2.5 THz, 0.3 THz wide.
struct Synthetic {
  double W0 = thz_to_rad(2.5);
  double sigma = thz_to_rad(0.3);
  double operator()(double W) const { return std::exp(-0.5 * std::pow((W - W0) / sigma, 2)); }
  // closed form of int_0^inf s^2 cos(W t) dW (lower tail below 0 is e^-35)
  double scan(double t) const {
    return std::sqrt(2.0 * constants::pi) * sigma * std::exp(-0.5 * sigma * sigma * t * t) * std::cos(W0 * t);
  }
};

struct Line {
  std::vector<double> delays = symmetric_delays(20.0 * fs, 600);
  std::vector<double> omegas = synthesis_grid(delays, thz_to_rad(6.0));
  std::vector<double> s2;
  Line() {
    const Synthetic f;
    for (double W : omegas) s2.push_back(f(W));
  }
};

DelayScan open_scan(const std::string& name) {
  std::ifstream in(data_dir + "/" + name);
  if (!in) throw std::runtime_error("missing fixture " + name);
  return ingest_experimental_scan(in);
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Synthesis, MatchesClosedForm) {
  const Line s;
  const Synthetic f;
  const auto sc = synthesize_delay_scan(s.omegas, s.s2, s.delays);
  const double peak = f.scan(0.0);
  for (std::size_t j = 0; j < sc.delays.size(); j += 37) {
    EXPECT_NEAR(sc.values[j], f.scan(sc.delays[j]), 1e-9 * peak) << sc.delays[j];
  }
}

TEST(Synthesis, ZeroDelayIsVariance) {
  const Line s;
  const auto sc = synthesize_delay_scan(s.omegas, s.s2, s.delays);
  const double var = signal::variance(s.omegas, s.s2, 1e-2).value;
  EXPECT_NEAR(sc.values[600] / var, 1.0, 1e-6);
}

TEST(Synthesis, EvenInDelay) {
  const Line s;
  const auto sc = synthesize_delay_scan(s.omegas, s.s2, s.delays);
  ASSERT_TRUE(sc.symmetric());
  const std::size_t n = sc.values.size();
  for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(sc.values[j], sc.values[n - 1 - j]);
}

TEST(Synthesis, UnderresolvedSpectrumRejected) {
  const Line s;
  const auto coarse = signal::linear_grid(0.0, thz_to_rad(6.0), 50);
  std::vector<double> v(coarse.size(), 1.0);
  EXPECT_EQ(code_of([&] { synthesize_delay_scan(coarse, v, s.delays); }), ErrorCode::UnderresolvedSpectrum);
}

TEST(Inversion, RoundtripRecoversSpectrum) {
  const Line s;
  const Synthetic f;
  const auto sc = synthesize_delay_scan(s.omegas, s.s2, s.delays);
  const auto inv = spectrum_from_delay_scan(sc);
  EXPECT_FALSE(inv.leakage);
  EXPECT_LT(inv.imag_residue, 1e-12);
  const auto& W = inv.spectrum.omegas;
  const auto& v = inv.spectrum.values[0];
  for (std::size_t m = 1; m < W.size(); ++m) {
    if (W[m] >= thz_to_rad(6.0)) break;
    EXPECT_NEAR(v[m], f(W[m]), 1e-4) << rad_to_thz(W[m]);
  }
}

TEST(Inversion, ParsevalStyleSum) {
  const Line s;
  const auto sc = synthesize_delay_scan(s.omegas, s.s2, s.delays);
  const auto inv = spectrum_from_delay_scan(sc);
  const double recovered = signal::trapezoid(inv.spectrum.omegas, inv.spectrum.values[0]);
  EXPECT_NEAR(recovered / sc.values[600], 1.0, 1e-6);
}

TEST(Inversion, Linear) {
  const Line s;
  const auto a = synthesize_delay_scan(s.omegas, s.s2, s.delays);
  DelayScan b = a;
  for (std::size_t j = 0; j < b.values.size(); ++j) b.values[j] = std::exp(-std::pow(b.delays[j] / (300.0 * fs), 2));
  DelayScan sum = a;
  for (std::size_t j = 0; j < sum.values.size(); ++j) sum.values[j] = 2.0 * a.values[j] + b.values[j];
  const auto ia = spectrum_from_delay_scan(a).spectrum.values[0];
  const auto ib = spectrum_from_delay_scan(b).spectrum.values[0];
  const auto is = spectrum_from_delay_scan(sum).spectrum.values[0];
  double peak = 0.0;
  for (double x : is) peak = std::max(peak, std::abs(x));
  for (std::size_t m = 0; m < is.size(); ++m) EXPECT_NEAR(is[m], 2.0 * ia[m] + ib[m], 1e-13 * peak);
}

TEST(Inversion, TruncatedScanFlagsLeakage) {
  const Synthetic f;
  DelayScan sc;
  sc.delays = symmetric_delays(20.0 * fs, 40);  // +-0.8 ps, far short of the decay
  sc.dt_step = 20.0 * fs;
  for (double t : sc.delays) sc.values.push_back(f.scan(t));
  const auto inv = spectrum_from_delay_scan(sc);
  EXPECT_TRUE(inv.leakage);
  EXPECT_GT(inv.edge_ratio, 1e-3);
  ASSERT_FALSE(inv.warnings.empty());
  InversionOptions loose;
  loose.leakage_threshold = 1.0;
  EXPECT_FALSE(spectrum_from_delay_scan(sc, loose).leakage);
}

TEST(Inversion, TaperWeights) {
  DelayScan sc;
  sc.delays = symmetric_delays(1.0, 10);
  sc.dt_step = 1.0;
  sc.values.assign(sc.delays.size(), 1.0);
  const auto w = taper_weights(sc, 0.25);
  EXPECT_EQ(w.front(), 0.0);
  EXPECT_EQ(w[10], 1.0);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_DOUBLE_EQ(w[i], w[w.size() - 1 - i]);
  EXPECT_THROW(taper_weights(sc, 0.6), Error);
}

TEST(Ingest, WellFormedFile) {
  const auto sc = open_scan("scan_uniform.csv");
  ASSERT_EQ(sc.delays.size(), 7u);
  EXPECT_FALSE(sc.resampled);
  EXPECT_NEAR(sc.dt_step, 20.0 * fs, 1e-30);
  EXPECT_NEAR(sc.delays.front(), -60.0 * fs, 1e-30);
  EXPECT_EQ(sc.values[3], 1.0);
  EXPECT_TRUE(sc.symmetric());
}

TEST(Ingest, ShuffledDelaysRejected) {
  EXPECT_EQ(code_of([] { open_scan("scan_shuffled.csv"); }), ErrorCode::NonMonotoneDelays);
  std::istringstream dup("delay_fs,s2\n0,1\n10,2\n10,3\n20,4\n");
  EXPECT_EQ(code_of([&] { ingest_experimental_scan(dup); }), ErrorCode::NonMonotoneDelays);
}

TEST(Ingest, NonUniformResampledExactlyAtNodes) {
  // values are linear in delay, so interpolation is exact everywhere
  const auto sc = open_scan("scan_nonuniform.csv");
  EXPECT_TRUE(sc.resampled);
  ASSERT_EQ(sc.delays.size(), 5u);
  const double expected[] = {1.0, 3.0, 5.0, 7.0, 9.0};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(sc.delays[i], 10.0 * fs * i, 1e-28);
    EXPECT_NEAR(sc.values[i], expected[i], 1e-12);
  }
}

TEST(Ingest, FormatErrors) {
  EXPECT_EQ(code_of([] { open_scan("scan_bad_header.csv"); }), ErrorCode::FormatError);
  std::istringstream short_file("delay_fs,s2\n0,1\n1,2\n");
  EXPECT_EQ(code_of([&] { ingest_experimental_scan(short_file); }), ErrorCode::FormatError);
  std::istringstream garbage("delay_fs,s2\n0,1\n1,x\n2,3\n");
  EXPECT_EQ(code_of([&] { ingest_experimental_scan(garbage); }), ErrorCode::FormatError);
}

TEST(EvenExtension, MirrorsOneSidedScan) {
  std::istringstream in("delay_fs,s2\n0,4\n10,3\n20,2\n30,1\n");
  const auto one = ingest_experimental_scan(in);
  const auto ext = even_extension(one);
  ASSERT_EQ(ext.delays.size(), 7u);
  EXPECT_TRUE(ext.symmetric());
  const double expected[] = {1, 2, 3, 4, 3, 2, 1};
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(ext.values[i], expected[i]);
  ext.validate();
  // already symmetric input passes through
  const auto sym = open_scan("scan_uniform.csv");
  EXPECT_EQ(even_extension(sym).values, sym.values);
}

TEST(EvenExtension, RejectsOffsetStart) {
  std::istringstream in("delay_fs,s2\n10,4\n20,3\n30,2\n");
  const auto sc = ingest_experimental_scan(in);
  EXPECT_THROW(even_extension(sc), Error);
}
