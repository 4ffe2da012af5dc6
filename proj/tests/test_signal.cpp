#include <gtest/gtest.h>

#include <cmath>

#include "eosvac/signal/density.hpp"
#include "eosvac/signal/full_result.hpp"
#include "eosvac/signal/spectrum.hpp"
#include "eosvac/signal/sweep.hpp"

using namespace eosvac;
using namespace eosvac::signal;

namespace {

constexpr double pi = constants::pi;

numerics::QuadratureSpec tol(double rel) { return numerics::QuadratureSpec{.rel_tol = rel}; }

// 7 um crystal, 3 um waist, rectangular 255/75 THz probe, lossless phonon index
ExperimentConfig thin_crystal() { return ExperimentConfig{}; }

ExperimentConfig absorbing(double scale, double temperature = 0.0) {
  ExperimentConfig c;
  std::get<materials::PhononResonanceModel>(c.thz_index).absorption_enabled = true;
  c.thz_absorption_scale = scale;
  c.temperature = temperature;
  return c;
}

// Thick crystal with a wide beam: the evanescent band carries no weight.
ExperimentConfig wide_beam(double scale) {
  ExperimentConfig c = absorbing(scale);
  c.crystal_length = 3000.0 * um;
  c.beam_waist = 125.0 * um;
  c.pulse.shape = pulse::Gaussian{thz_to_rad(375.0), 80.0 * fs};
  return c;
}

// Lossless laser-paraxial result keeping only the phase-matched sinc^2.
double resonant_laser_paraxial(const SignalModel& m, double W) {
  const double n = m.n_thz(W).real();
  const double q = n * W / constants::c;
  const double a = m.envelope_wavenumber(W);
  const double L = m.length(), w = m.waist();
  std::vector<double> pts{0.0, pi / 2.0};
  if (a < q) pts.insert(pts.begin() + 1, std::acos(a / q));
  const auto r = numerics::integrate_1d(
      [&](double th) {
        const double st = std::sin(th), qz = q * std::cos(th);
        const double s = numerics::sinc(0.5 * L * (a - qz));
        return st * (1.0 - 0.5 * st * st) * std::exp(-0.25 * q * q * st * st * w * w) * s * s;
      },
      std::span<const double>(pts), tol(1e-11));
  const double f = m.f(W);
  return m.vacuum_prefactor(W) * f * f * 2.0 * pi * q * r.value * m.thermal_weight(W);
}

}  // namespace

TEST(Model, DerivedLaserQuantities) {
  const SignalModel m(thin_crystal());
  EXPECT_NEAR(m.n_center(), 2.761, 1e-3);
  EXPECT_NEAR(m.group_index(), materials::group_index({}, thz_to_rad(255.0)), 1e-15);
  const double lo = thz_to_rad(217.5), hi = thz_to_rad(292.5);
  EXPECT_NEAR(m.omega_p() / ((hi - lo) / std::log(hi / lo)), 1.0, 1e-14);
  EXPECT_TRUE(m.rayleigh().satisfied());
  EXPECT_TRUE(m.warnings().empty());
}

TEST(Model, RayleighWarning) {
  auto c = thin_crystal();
  c.crystal_length = 500.0 * um;
  const SignalModel m(c);
  EXPECT_FALSE(m.rayleigh().satisfied());
  EXPECT_EQ(m.warnings().size(), 1u);
}

TEST(Model, GroupIndexOverride) {
  auto c = thin_crystal();
  c.group_index_override = 3.2;
  EXPECT_EQ(SignalModel(c).group_index(), 3.2);
}

TEST(Taylor, LeadingOrderIsParaxial) {
  const SignalModel m(thin_crystal());
  for (double W : log_grid(thz_to_rad(0.05), thz_to_rad(150.0), 100)) {
    EXPECT_EQ(s2_taylor_terms(m, W).leading, s2_paraxial(m, W));
  }
}

TEST(Taylor, CorrectionsVanishForWideBeams) {
  auto c = thin_crystal();
  c.beam_waist = 300.0 * um;
  c.crystal_length = 20.0 * um;
  const SignalModel m(c);
  const double W = thz_to_rad(2.0);
  const auto t = s2_taylor_terms(m, W);
  EXPECT_LT(std::abs(t.total() / t.leading - 1.0), 1e-2);
}

TEST(Paraxial, CutoffMatchesBelowAndVanishesAbove) {
  const SignalModel m(thin_crystal());
  const double limit = constants::c * pi / m.waist();
  for (double W : log_grid(thz_to_rad(0.5), thz_to_rad(70.0), 60)) {
    const double n = m.n_thz_real(W);
    if (n * W < limit) {
      EXPECT_EQ(s2_paraxial_cutoff(m, W), s2_paraxial(m, W));
    } else {
      EXPECT_EQ(s2_paraxial_cutoff(m, W), 0.0);
    }
  }
}

TEST(Paraxial, ZeroBeyondSpectralOverlap) {
  const SignalModel m(thin_crystal());
  EXPECT_EQ(s2_paraxial(m, thz_to_rad(80.0)), 0.0);
  EXPECT_EQ(s2_laser_paraxial(m, thz_to_rad(80.0)).value, 0.0);
}

TEST(LaserParaxial, AzimuthalReductionMatches2dDisc) {
  // direct 2D integral over theta and the azimuth, (1 - q_x^2 / q^2) kept unreduced
  const SignalModel m(thin_crystal());
  for (double f : {2.0, 20.0, 45.0}) {
    const double W = thz_to_rad(f);
    const double q = m.n_thz_real(W) * W / constants::c;
    const double a = m.envelope_wavenumber(W);
    const double L = m.length(), w = m.waist();
    const auto disc = numerics::integrate_2d_nested(
        [&](double th, double phi) {
          const double st = std::sin(th), qz = q * std::cos(th);
          const double sm = numerics::sinc(0.5 * L * (a - qz)), sp = numerics::sinc(0.5 * L * (a + qz));
          const double cp = std::cos(phi);
          return q * st * (1.0 - st * st * cp * cp) * std::exp(-0.25 * q * q * st * st * w * w) * (sm * sm + sp * sp);
        },
        numerics::Rectangle{0.0, pi / 2.0, 0.0, 2.0 * pi}, tol(1e-9));
    const double fv = m.f(W);
    const double expected = m.vacuum_prefactor(W) * fv * fv * disc.value;
    EXPECT_NEAR(s2_laser_paraxial(m, W, tol(1e-9)).value / expected, 1.0, 1e-7) << f;
  }
}

TEST(FullResult, ApproachesLaserParaxialAtLowFrequency) {
  const SignalModel m(thin_crystal());
  for (double f : {1.0, 10.0}) {
    const double W = thz_to_rad(f);
    const auto full = s2_full(m, W);
    EXPECT_NEAR(full.value / s2_laser_paraxial(m, W).value, 1.0, 1e-2) << f;
    EXPECT_GT(full.value, 0.0);
    EXPECT_LT(full.error, 1e-2 * full.value);
  }
}

TEST(Scaling, PhotonNumberSquared) {
  auto c = absorbing(1.0, 300.0);
  const SignalModel m1(c);
  c.pulse.photon_number = 2.0;
  const SignalModel m2(c);
  const SignalModel l1(thin_crystal());
  auto c2 = thin_crystal();
  c2.pulse.photon_number = 2.0;
  const SignalModel l2(c2);
  const double W = thz_to_rad(4.0);
  EXPECT_NEAR(s2_paraxial(l2, W) / s2_paraxial(l1, W), 4.0, 4e-15);
  EXPECT_NEAR(s2_taylor(l2, W) / s2_taylor(l1, W), 4.0, 4e-15);
  EXPECT_NEAR(s2_laser_paraxial(l2, W).value / s2_laser_paraxial(l1, W).value, 4.0, 4e-15);
  EXPECT_NEAR(s2_full(l2, W).value / s2_full(l1, W).value, 4.0, 4e-15);
  EXPECT_NEAR(s2_absorptive(m2, W).value / s2_absorptive(m1, W).value, 4.0, 4e-15);
  EXPECT_NEAR(s2_longitudinal(m2, W).value / s2_longitudinal(m1, W).value, 4.0, 4e-15);
}

TEST(Scaling, Chi2Squared) {
  auto c = thin_crystal();
  const SignalModel m1(c);
  c.chi2.constant_value *= 3.0;
  const SignalModel m3(c);
  const double W = thz_to_rad(12.0);
  EXPECT_NEAR(s2_paraxial(m3, W) / s2_paraxial(m1, W), 9.0, 1e-14);
  EXPECT_NEAR(s2_laser_paraxial(m3, W).value / s2_laser_paraxial(m1, W).value, 9.0, 1e-14);
  EXPECT_NEAR(s2_full(m3, W).value / s2_full(m1, W).value, 9.0, 1e-14);
}

TEST(Thermal, WeightIsTwoNTPlusOne) {
  const SignalModel cold(absorbing(1.0, 0.0));
  const SignalModel warm(absorbing(1.0, 300.0));
  for (double f : {0.5, 2.0, 4.0}) {
    const double W = thz_to_rad(f);
    const double expected = 2.0 * materials::thermal_occupation(W, 300.0) + 1.0;
    EXPECT_NEAR(s2_absorptive(warm, W).value / s2_absorptive(cold, W).value / expected, 1.0, 1e-13);
    EXPECT_NEAR(s2_longitudinal(warm, W).value / s2_longitudinal(cold, W).value / expected, 1.0, 1e-13);
  }
}

TEST(Absorptive, TotalApproachesLaserParaxialWhenLossless) {
  const SignalModel lossy(absorbing(1e-4));
  const SignalModel lossless(thin_crystal());
  for (double f : {1.0, 3.0, 10.0, 30.0, 60.0}) {
    const double W = thz_to_rad(f);
    const double v = s2_absorptive(lossy, W, AbsorptiveTerm::total, tol(1e-9)).value;
    EXPECT_NEAR(v / s2_laser_paraxial(lossless, W, tol(1e-9)).value, 1.0, 1e-4) << f;
  }
}

TEST(Absorptive, SecondTermBecomesResonantTermInPropagatingBand) {
  for (double f : {1.0, 1.5, 2.0, 2.5, 3.0}) {
    const double W = thz_to_rad(f);
    const SignalModel m(wide_beam(1e-6));
    const double second = s2_absorptive(m, W, AbsorptiveTerm::second, tol(1e-9)).value;
    const double first = s2_absorptive(m, W, AbsorptiveTerm::first, tol(1e-9)).value;
    const double total = s2_absorptive(m, W, AbsorptiveTerm::total, tol(1e-9)).value;
    EXPECT_NEAR(second / resonant_laser_paraxial(m, W), 1.0, 1e-5) << f;
    EXPECT_LT(std::abs(first / total), 1e-5) << f;
  }
}

TEST(Absorptive, FirstTermLinearInAbsorption) {
  const double W = thz_to_rad(2.0);
  const double a = s2_absorptive(SignalModel(wide_beam(1e-3)), W, AbsorptiveTerm::first, tol(1e-10)).value;
  const double b = s2_absorptive(SignalModel(wide_beam(1e-4)), W, AbsorptiveTerm::first, tol(1e-10)).value;
  EXPECT_NEAR(a / b, 10.0, 1e-2);
}

TEST(Absorptive, LosslessOnlyComponentsRefuseAbsorption) {
  const SignalModel m(absorbing(1.0));
  try {
    s2_paraxial(m, thz_to_rad(2.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AbsorptiveMediumUnsupported);
  }
}

TEST(Longitudinal, VanishesWithoutAbsorption) {
  const SignalModel m(thin_crystal());
  EXPECT_EQ(s2_longitudinal(m, thz_to_rad(5.0)).value, 0.0);
}

TEST(Longitudinal, FollowsEnergyLossFunction) {
  // pointwise s2 / (f^2 |chi|^2 [2n_T + 1]) is Im eps / |n|^4 times a slowly varying bracket
  const SignalModel m(absorbing(1.0));
  const double at_lo = s2_longitudinal(m, thz_to_rad(6.18)).value;
  const double at_to = s2_longitudinal(m, thz_to_rad(5.31)).value;
  EXPECT_GT(at_lo, at_to);
}

TEST(Nonnegativity, LosslessComponents) {
  const SignalModel m(thin_crystal());
  for (double W : log_grid(thz_to_rad(0.05), thz_to_rad(150.0), 80)) {
    EXPECT_GE(s2_paraxial(m, W), 0.0);
    EXPECT_GE(s2_paraxial_cutoff(m, W), 0.0);
    EXPECT_GE(s2_laser_paraxial(m, W).value, 0.0);
  }
  for (double f : {0.5, 5.0, 20.0, 50.0}) EXPECT_GE(s2_full(m, thz_to_rad(f)).value, 0.0);
}

TEST(Nonnegativity, AbsorptiveTotal) {
  const SignalModel m(absorbing(1.0, 300.0));
  for (double W : log_grid(thz_to_rad(0.1), thz_to_rad(70.0), 60)) {
    EXPECT_GE(s2_absorptive(m, W).value, 0.0) << rad_to_thz(W);
    EXPECT_GE(s2_longitudinal(m, W).value, 0.0) << rad_to_thz(W);
  }
}

TEST(Spectrum, ComponentNamesRoundTrip) {
  for (Component c : all_components) EXPECT_EQ(component_from_string(to_string(c)), c);
  EXPECT_THROW(component_from_string("bogus"), Error);
}

TEST(Spectrum, DeterministicAcrossThreadCounts) {
  const SignalModel m(thin_crystal());
  const auto grid = log_grid(thz_to_rad(0.5), thz_to_rad(70.0), 23);
  SpectrumOptions one;
  one.threads = 1;
  SpectrumOptions four;
  four.threads = 4;
  const std::vector<Component> comps{Component::laser_paraxial, Component::paraxial, Component::taylor};
  const auto a = compute_spectrum(m, grid, comps, one);
  const auto b = compute_spectrum(m, grid, comps, four);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.of(Component::paraxial)[5], s2_paraxial(m, grid[5]));
  EXPECT_THROW(a.of(Component::full), Error);
}

TEST(Spectrum, GridValidation) {
  const SignalModel m(thin_crystal());
  EXPECT_THROW(compute_spectrum(m, {1.0}, {Component::paraxial}), Error);
  EXPECT_THROW(compute_spectrum(m, {2.0, 1.0}, {Component::paraxial}), Error);
  EXPECT_THROW(compute_spectrum(m, {1e12, 2e12}, {}), Error);
  EXPECT_THROW(log_grid(0.0, 1.0, 5), Error);
}

TEST(Spectrum, LowestFailingIndexIsReported) {
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i >= 17) throw Error(ErrorCode::DomainError, std::to_string(i));
    });
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("17"), std::string::npos);
  }
}

TEST(Variance, GaussianBump) {
  const double W0 = 30.0, sigma = 4.0;
  const auto grid = linear_grid(0.0, 60.0, 4001);
  std::vector<double> s2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s2[i] = std::exp(-std::pow((grid[i] - W0) / sigma, 2));
  const auto v = variance(grid, s2, 1e-3);
  EXPECT_NEAR(v.value / (std::sqrt(pi) * sigma), 1.0, 1e-6);
  EXPECT_LT(v.rel_change(), 1e-6);
}

TEST(Variance, ZeroSpectrum) {
  const auto grid = linear_grid(1.0, 2.0, 11);
  const auto v = variance(grid, std::vector<double>(grid.size(), 0.0), 1e-3);
  EXPECT_EQ(v.value, 0.0);
  EXPECT_EQ(v.rel_change(), 0.0);
}

TEST(Variance, OddLeftoverPointIsCovered) {
  const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  const std::vector<double> y{1.0, 1.0, 1.0, 1.0};
  EXPECT_EQ(trapezoid(x, y), 3.0);
  EXPECT_EQ(trapezoid(x, y, 2), 3.0);
}

TEST(Variance, CoarseGridRejected) {
  const auto grid = linear_grid(0.0, 60.0, 9);
  std::vector<double> s2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) s2[i] = std::exp(-std::pow((grid[i] - 30.0) / 4.0, 2));
  try {
    variance(grid, s2, 1e-3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
  }
}

TEST(Density, XyMapsNormalisedAndFactorised) {
  const SignalModel m(thin_crystal());
  DensityOptions o;
  o.points = 15;
  const auto d = density_maps(m, o);
  ASSERT_EQ(d.filter.size(), 225u);
  double fmax = 0.0, cmax = 0.0, dmax = 0.0;
  for (std::size_t i = 0; i < d.filter.size(); ++i) {
    fmax = std::max(fmax, std::abs(d.filter[i]));
    cmax = std::max(cmax, std::abs(d.correlation[i]));
    dmax = std::max(dmax, std::abs(d.density[i]));
    EXPECT_NEAR(d.density[i] * d.density_scale, d.filter[i] * d.correlation[i], 1e-12);
  }
  EXPECT_EQ(fmax, 1.0);
  EXPECT_EQ(cmax, 1.0);
  EXPECT_EQ(dmax, 1.0);
  // centre: filter peak and the coincidence limit of Im G_xx
  const std::size_t c = 7 * 15 + 7;
  EXPECT_EQ(d.filter[c], 1.0);
  EXPECT_NEAR(d.correlation[c], 1.0, 1e-9);
  // mirror symmetry
  EXPECT_EQ(d.correlation[2 * 15 + 3], d.correlation[12 * 15 + 11]);
}

TEST(Density, ZOmegaCorrelationMatchesClosedForm) {
  const SignalModel m(thin_crystal());
  DensityOptions o;
  o.plane = Plane::z_omega;
  o.z_points = 9;
  o.omegas = linear_grid(thz_to_rad(10.0), thz_to_rad(60.0), 6);
  const auto d = density_maps(m, o);
  const std::size_t n2 = d.axis2.size();
  for (std::size_t j = 0; j < n2; ++j) {
    const double k = m.n_thz_real(d.axis2[j]) * d.axis2[j] / constants::c;
    for (std::size_t i = 1; i < d.axis1.size(); ++i) {
      // on-axis Im G_xx / (k / 6 pi) = 3/2 Im[(1 + i/x - 1/x^2) e^{ix}] / x... with x = k z
      const double x = k * d.axis1[i];
      const complex I(0.0, 1.0);
      const double ratio = (((1.0 + I / x - 1.0 / (x * x)) * std::exp(I * x)) / (4.0 * pi * d.axis1[i])).imag() /
                           (k / (6.0 * pi));
      EXPECT_NEAR(d.correlation[i * n2 + j] / d.correlation[j], ratio, 1e-6);
    }
  }
}

TEST(Density, RefusesReststrahlenAndAbsorption) {
  auto c = thin_crystal();
  std::get<materials::PhononResonanceModel>(c.thz_index).gamma = 0.0;
  const SignalModel m(c);
  DensityOptions o;
  o.omega = thz_to_rad(5.8);
  o.points = 5;
  EXPECT_THROW(density_maps(m, o), Error);
  const SignalModel lossy(absorbing(1.0));
  o.omega = thz_to_rad(2.0);
  try {
    density_maps(lossy, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AbsorptiveMediumUnsupported);
  }
}

TEST(Sweep, LongitudinalVanishesWithoutAbsorption) {
  SweepOptions o;
  o.threads = 1;
  const auto rows = duration_sweep(thin_crystal(), {10.0 * fs, 100.0 * fs}, o);
  for (const auto& r : rows) {
    EXPECT_EQ(r.longitudinal, 0.0);
    EXPECT_EQ(r.transverse, r.total);
    EXPECT_GT(r.total, 0.0);
  }
}

TEST(Sweep, PartsAddUpAndStayPositive) {
  SweepOptions o;
  const auto rows = duration_sweep(absorbing(1.0), {5.9 * fs, 40.0 * fs, 300.0 * fs}, o);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.longitudinal + r.transverse, r.total, 1e-12 * r.total);
    EXPECT_GT(r.longitudinal, 0.0);
    EXPECT_GT(r.transverse, 0.0);
  }
  // shorter probes see a broader band
  EXPECT_GT(rows[0].total, rows[1].total);
  EXPECT_GT(rows[1].total, rows[2].total);
}

TEST(Sweep, DurationMapping) {
  const auto c = with_duration(thin_crystal(), 20.0 * fs, 2.0 * pi);
  EXPECT_NEAR(std::get<pulse::Rectangular>(c.pulse.shape).delta_omega, 2.0 * pi / (20.0 * fs), 1e-3);
  auto g = thin_crystal();
  g.pulse.shape = pulse::Gaussian{thz_to_rad(375.0), 80.0 * fs};
  EXPECT_EQ(std::get<pulse::Gaussian>(with_duration(g, 30.0 * fs, 1.0).pulse.shape).delta_t, 30.0 * fs);
  EXPECT_THROW(with_duration(thin_crystal(), 0.0, 1.0), Error);
  auto t = thin_crystal();
  t.pulse.shape = pulse::TabulatedSpectrum{{{1e15, 1.0}, {2e15, 1.0}}};
  EXPECT_THROW(with_duration(t, 10.0 * fs, 1.0), Error);
}
