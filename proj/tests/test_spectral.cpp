#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "bloc/spectral.hpp"
#include "bloc/units.hpp"

using namespace bloc;

namespace {

// Grid with an exact on-bin frequency layout: bin k of an n-node transform
// sits at 2 pi k / (n dt).
TimeGrid make_grid(int n_steps, double dt) { return TimeGrid(n_steps, dt); }

double on_bin_frequency(const TimeGrid& g, int k) {
  return bin_frequency_cm(g, k, g.n_nodes());
}

ControlField cosine_field(const TimeGrid& g, double nu_cm, double amp = 1.0) {
  const double omega = units::cm_to_hartree(nu_cm);
  ControlField f;
  f.samples.resize(g.n_nodes());
  for (int j = 0; j < g.n_nodes(); ++j) f.samples[j] = amp * std::cos(omega * g.node(j));
  return f;
}

} // namespace

TEST_CASE("all-pass and all-stop masks") {
  const TimeGrid g = make_grid(256, 1.0);
  const SpectralFilter open = band_pass_mask({{0.0, g.nyquist_cm()}}, 0.0, g);
  CHECK(open.mask.minCoeff() == 1.0);

  const SpectralFilter closed = band_pass_mask({}, 50.0, g);
  CHECK(closed.mask.maxCoeff() == 0.0);
}

TEST_CASE("mask window evaluation at paper carriers") {
  // 0.25 fs step resolves well past 15541 cm^-1.
  const TimeGrid g = make_grid(4096, units::fs_to_au(0.25));
  const SpectralFilter f = band_pass_mask({{12000.0, 13000.0}}, 100.0, g);
  auto mask_at = [&](double nu) {
    int best = 0;
    double dist = 1e300;
    for (int k = 0; k <= g.n_nodes() / 2; ++k) {
      const double d = std::abs(on_bin_frequency(g, k) - nu);
      if (d < dist) {
        dist = d;
        best = k;
      }
    }
    return f.mask[best];
  };
  CHECK(mask_at(12500.0) == 1.0);
  CHECK(mask_at(15541.0) == 0.0);
}

TEST_CASE("mask validation") {
  const TimeGrid g = make_grid(256, 10.0);
  CHECK_THROWS_AS(band_pass_mask({{0.0, 2.0 * g.nyquist_cm()}}, 0.0, g),
                  std::invalid_argument);
  CHECK_THROWS_AS(band_pass_mask({{100.0, 200.0}}, -1.0, g), std::invalid_argument);
  // Overlap after widening.
  CHECK_THROWS_AS(band_pass_mask({{100.0, 200.0}, {210.0, 300.0}}, 20.0, g),
                  std::invalid_argument);
}

TEST_CASE("complement involution and exact complementarity") {
  const TimeGrid g = make_grid(512, units::fs_to_au(0.5));
  const SpectralFilter f = band_pass_mask({{2000.0, 4000.0}}, 150.0, g);
  const SpectralFilter fc = complement_mask(f);
  const SpectralFilter fcc = complement_mask(fc);
  for (int k = 0; k < f.mask.size(); ++k) {
    CHECK(f.mask[k] + fc.mask[k] == 1.0); // exact per bin
    CHECK(fcc.mask[k] == f.mask[k]);      // bit-exact involution
  }
}

TEST_CASE("fourier filter identity and single-bin suppression") {
  const TimeGrid g = make_grid(1024, 1.0);
  const SpectralFilter open = SpectralFilter::all_pass(g);

  std::mt19937 rng(3);
  std::normal_distribution<double> dist;
  ControlField noise;
  noise.samples.resize(g.n_nodes());
  for (int j = 0; j < g.n_nodes(); ++j) noise.samples[j] = dist(rng);
  const ControlField same = apply_fourier_filter(noise, open);
  CHECK((same.samples - noise.samples).cwiseAbs().maxCoeff() < 1e-12);

  // Pure on-bin cosine inside a stop band vanishes.
  const double nu_stop = on_bin_frequency(g, 100);
  const double nu_pass = on_bin_frequency(g, 40);
  const SpectralFilter f =
      band_pass_mask({{nu_pass - 1e-9, nu_pass + 1e-9}}, 0.0, g);
  // On-bin cosine needs periodic alignment: n samples of period n/k.
  {
    const int n = g.n_nodes();
    ControlField c;
    c.samples.resize(n);
    for (int j = 0; j < n; ++j) c.samples[j] = std::cos(2.0 * M_PI * 100.0 * j / n);
    const ControlField filtered = apply_fourier_filter(c, f);
    CHECK(filtered.samples.cwiseAbs().maxCoeff() < 1e-10);
  }
  // Two on-bin cosines: only the pass-band one survives.
  {
    const int n = g.n_nodes();
    ControlField c;
    c.samples.resize(n);
    for (int j = 0; j < n; ++j)
      c.samples[j] = std::cos(2.0 * M_PI * 40.0 * j / n) +
                     std::cos(2.0 * M_PI * 100.0 * j / n);
    const ControlField filtered = apply_fourier_filter(c, f);
    RealVector want(n);
    for (int j = 0; j < n; ++j) want[j] = std::cos(2.0 * M_PI * 40.0 * j / n);
    CHECK((filtered.samples - want).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("filter linearity, projection and complementarity properties") {
  const TimeGrid g = make_grid(400, 2.0);
  const SpectralFilter f = band_pass_mask({{200.0, 600.0}}, 50.0, g);
  const SpectralFilter fc = complement_mask(f);

  std::mt19937 rng(11);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 20; ++trial) {
    RealVector x(g.n_nodes()), y(g.n_nodes());
    for (int j = 0; j < g.n_nodes(); ++j) {
      x[j] = dist(rng);
      y[j] = dist(rng);
    }
    const double a = dist(rng), b = dist(rng);
    const RealVector lhs = apply_fourier_filter(RealVector(a * x + b * y), f);
    const RealVector rhs =
        a * apply_fourier_filter(x, f) + b * apply_fourier_filter(y, f);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-11);

    // Complementarity: pass + stop recovers the field.
    const RealVector sum = apply_fourier_filter(x, f) + apply_fourier_filter(x, fc);
    CHECK((sum - x).cwiseAbs().maxCoeff() < 1e-12);
  }

  // Projection property for a 0/1 mask.
  const SpectralFilter hard = band_pass_mask({{200.0, 600.0}}, 0.0, g);
  RealVector x(g.n_nodes());
  for (int j = 0; j < g.n_nodes(); ++j) x[j] = dist(rng);
  const RealVector once = apply_fourier_filter(x, hard);
  const RealVector twice = apply_fourier_filter(once, hard);
  CHECK((twice - once).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("fir design: degenerate masks") {
  const TimeGrid g = make_grid(1024, 1.0);
  const FirFilter open = fir_from_mask(SpectralFilter::all_pass(g), 41);
  const int half = 20;
  CHECK(open.coeffs[half] == doctest::Approx(1.0).epsilon(1e-6));
  for (int j = 0; j < 41; ++j)
    if (j != half) CHECK(std::abs(open.coeffs[j]) < 1e-3);

  const FirFilter closed = fir_from_mask(SpectralFilter::all_stop(g), 41);
  CHECK(closed.coeffs.cwiseAbs().maxCoeff() < 1e-3);

  CHECK_THROWS_AS(fir_from_mask(SpectralFilter::all_pass(g), 40), std::invalid_argument);
}

TEST_CASE("fir band-pass magnitude response") {
  const TimeGrid g = make_grid(8192, units::fs_to_au(0.25));
  const SpectralFilter f = band_pass_mask({{12000.0, 13000.0}}, 100.0, g);
  const FirFilter fir = fir_from_mask(f, 401);
  CHECK(fir_response(fir, 12500.0) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fir_response(fir, 15541.0) < 0.01);
}

TEST_CASE("fir apply basics") {
  const TimeGrid g = make_grid(512, 1.0);
  FirFilter impulse;
  impulse.dt = g.dt;
  impulse.coeffs = RealVector::Zero(21);
  impulse.coeffs[10] = 1.0;

  std::mt19937 rng(5);
  std::normal_distribution<double> dist;
  ControlField x;
  x.samples.resize(g.n_nodes());
  for (int j = 0; j < g.n_nodes(); ++j) x.samples[j] = dist(rng);
  const ControlField y = fir_apply(x, impulse, g);
  CHECK((y.samples - x.samples).cwiseAbs().maxCoeff() == 0.0);

  ControlField zero;
  zero.samples = RealVector::Zero(g.n_nodes());
  CHECK(fir_apply(zero, impulse, g).samples.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fir and fourier filters agree on in-band random fields") {
  // Band-limited random field fully inside the pass band.
  const TimeGrid g = make_grid(2048, 1.0);
  const double lo = on_bin_frequency(g, 200), hi = on_bin_frequency(g, 400);
  const SpectralFilter pass = band_pass_mask({{lo, hi}}, 0.3 * lo, g);

  std::mt19937 rng(17);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = g.n_nodes();
    ControlField x;
    x.samples.setZero(n);
    for (int k = 240; k <= 360; k += 7) {
      const double phase = dist(rng);
      const double amp = dist(rng);
      for (int j = 0; j < n; ++j)
        x.samples[j] += amp * std::cos(2.0 * M_PI * k * j / n + phase);
    }
    const ControlField via_fft = apply_fourier_filter(x, pass);
    const FirFilter fir = fir_from_mask(pass, 401);
    const ControlField via_fir = fir_apply(x, fir, g);
    // Compare away from the boundary transients.
    const int margin = 300;
    double err2 = 0.0, ref2 = 0.0;
    for (int j = margin; j < n - margin; ++j) {
      const double d = via_fft.samples[j] - via_fir.samples[j];
      err2 += d * d;
      ref2 += via_fft.samples[j] * via_fft.samples[j];
    }
    CHECK(std::sqrt(err2 / ref2) < 0.01);
  }
}

TEST_CASE("out-of-band fraction") {
  const TimeGrid g = make_grid(1024, 1.0);
  const double lo = on_bin_frequency(g, 80), hi = on_bin_frequency(g, 160);
  const SpectralFilter f = band_pass_mask({{lo, hi}}, 0.0, g);
  const int n = g.n_nodes();

  ControlField inband;
  inband.samples.resize(n);
  for (int j = 0; j < n; ++j) inband.samples[j] = std::cos(2.0 * M_PI * 120.0 * j / n);
  CHECK(out_of_band_fraction(inband, f) < 1e-12);

  ControlField outband;
  outband.samples.resize(n);
  for (int j = 0; j < n; ++j) outband.samples[j] = std::cos(2.0 * M_PI * 300.0 * j / n);
  CHECK(out_of_band_fraction(outband, f) > 1.0 - 1e-12);

  ControlField both;
  both.samples = inband.samples + outband.samples;
  CHECK(out_of_band_fraction(both, f) == doctest::Approx(0.5).epsilon(1e-6));

  ControlField zero;
  zero.samples = RealVector::Zero(n);
  CHECK_THROWS_AS(out_of_band_fraction(zero, f), std::invalid_argument);
}

TEST_CASE("shape function forms") {
  const TimeGrid g = make_grid(1000, 1.0);
  const ShapeFunction s = shape_function(g, ShapeForm::SinSquared, 1e-3);
  CHECK(s.samples[0] == doctest::Approx(1e-3));
  CHECK(s.samples[g.n_steps] == doctest::Approx(1e-3));
  CHECK(s.samples[g.n_steps / 2] == doctest::Approx(1.0));
  CHECK(s.samples[g.n_steps / 4] == doctest::Approx(0.5));
  CHECK(s.samples.minCoeff() >= 1e-3);
  CHECK(s.samples.maxCoeff() <= 1.0);

  const ShapeFunction flat = shape_function(g, ShapeForm::FlatTopCosineEdges, 1e-3);
  CHECK(flat.samples[g.n_steps / 2] == doctest::Approx(1.0));
  CHECK(flat.samples[g.n_steps / 5] == doctest::Approx(1.0)); // past the 10% ramp
  CHECK(flat.samples[0] == doctest::Approx(1e-3));

  CHECK_THROWS_AS(shape_function(g, ShapeForm::SinSquared, 0.5), std::invalid_argument);
}

TEST_CASE("power spectrum peaks and parseval") {
  const TimeGrid g = make_grid(2000, units::fs_to_au(0.5));

  // Gaussian-windowed 12500 cm^-1 carrier peaks within one bin.
  const double t0 = 0.5 * g.total_time();
  const double fwhm = 0.2 * g.total_time();
  ControlField pulse;
  pulse.samples.resize(g.n_nodes());
  const double omega = units::cm_to_hartree(12500.0);
  for (int j = 0; j < g.n_nodes(); ++j) {
    const double t = g.node(j) - t0;
    pulse.samples[j] =
        std::exp(-4.0 * std::log(2.0) * t * t / (fwhm * fwhm)) * std::cos(omega * t);
  }
  const auto spec = power_spectrum(pulse, g);
  size_t peak = 0;
  for (size_t i = 1; i < spec.size(); ++i)
    if (spec[i].power > spec[peak].power) peak = i;
  const double bin_width = spec[1].nu_cm - spec[0].nu_cm;
  CHECK(std::abs(spec[peak].nu_cm - 12500.0) <= bin_width);

  // Parseval: sum over both signed halves equals sum eps^2 dt.
  double total = spec[0].power + spec.back().power;
  for (size_t i = 1; i + 1 < spec.size(); ++i) total += 2.0 * spec[i].power;
  const double time_energy = pulse.samples.cwiseAbs2().sum() * g.dt;
  CHECK(total == doctest::Approx(time_energy).epsilon(1e-10));

  ControlField zero;
  zero.samples = RealVector::Zero(g.n_nodes());
  CHECK_THROWS_AS(power_spectrum(zero, g), std::invalid_argument);
}
