#include "bloc/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>

#include "bloc/units.hpp"

namespace bloc {

namespace {

// Quantization step for mask values: multiples of 2^-30 make 1 - m exact.
constexpr double kMaskQuantum = 1.0 / (1 << 30);

double quantize(double m) {
  return std::round(m / kMaskQuantum) * kMaskQuantum;
}

// Continuous mask value at |nu| >= 0 for a raised-cosine edged window set.
double mask_value(const std::vector<std::pair<double, double>>& windows,
                  double edge, double nu) {
  double m = 0.0;
  for (const auto& [lo, hi] : windows) {
    if (nu >= lo && nu <= hi) {
      m += 1.0;
    } else if (edge > 0.0 && nu > lo - edge && nu < lo) {
      const double x = (nu - (lo - edge)) / edge;
      m += 0.5 * (1.0 - std::cos(M_PI * x));
    } else if (edge > 0.0 && nu > hi && nu < hi + edge) {
      const double x = (hi + edge - nu) / edge;
      m += 0.5 * (1.0 - std::cos(M_PI * x));
    }
  }
  return std::min(m, 1.0);
}

void fill_complement(SpectralFilter& f) {
  f.complement.resize(f.mask.size());
  for (int i = 0; i < f.mask.size(); ++i) f.complement[i] = 1.0 - f.mask[i];
}

std::vector<Complex> fft_forward(const RealVector& x) {
  Eigen::FFT<double> fft;
  std::vector<Complex> in(x.size()), out(x.size());
  for (int i = 0; i < x.size(); ++i) in[i] = x[i];
  fft.fwd(out, in);
  return out;
}

RealVector fft_inverse_real(std::vector<Complex>& spectrum, double max_abs_input) {
  Eigen::FFT<double> fft;
  std::vector<Complex> out(spectrum.size());
  fft.inv(out, spectrum);
  RealVector y(static_cast<int>(out.size()));
  double max_imag = 0.0;
  for (size_t i = 0; i < out.size(); ++i) {
    y[static_cast<int>(i)] = out[i].real();
    max_imag = std::max(max_imag, std::abs(out[i].imag()));
  }
  if (max_imag > 1e-12 * std::max(max_abs_input, 1e-300))
    throw std::runtime_error("apply_fourier_filter: imaginary residue above threshold");
  return y;
}

} // namespace

double bin_frequency_cm(const TimeGrid& grid, int bin, int n_fft) {
  const int k = bin <= n_fft / 2 ? bin : bin - n_fft;
  const double omega_au = 2.0 * M_PI * k / (n_fft * grid.dt);
  return units::hartree_to_cm(omega_au);
}

SpectralFilter SpectralFilter::all_pass(const TimeGrid& grid) {
  SpectralFilter f;
  f.grid = grid;
  f.is_all_pass = true;
  f.mask = RealVector::Ones(grid.n_nodes());
  fill_complement(f);
  return f;
}

SpectralFilter SpectralFilter::all_stop(const TimeGrid& grid) {
  SpectralFilter f;
  f.grid = grid;
  f.mask = RealVector::Zero(grid.n_nodes());
  fill_complement(f);
  return f;
}

SpectralFilter band_pass_mask(const std::vector<std::pair<double, double>>& windows_cm,
                              double edge_width_cm, const TimeGrid& grid) {
  if (edge_width_cm < 0.0)
    throw std::invalid_argument("band_pass_mask: negative edge width");
  const double nyquist = grid.nyquist_cm();
  for (const auto& [lo, hi] : windows_cm) {
    if (lo < 0.0 || hi <= lo)
      throw std::invalid_argument("band_pass_mask: malformed window");
    if (hi > nyquist * (1.0 + 1e-12))
      throw std::invalid_argument("band_pass_mask: window above Nyquist");
  }
  // No overlap after widening by the edge width.
  auto widened = windows_cm;
  std::sort(widened.begin(), widened.end());
  for (size_t i = 1; i < widened.size(); ++i) {
    if (widened[i].first - edge_width_cm < widened[i - 1].second + edge_width_cm)
      throw std::invalid_argument("band_pass_mask: windows overlap after edge widening");
  }

  SpectralFilter f;
  f.windows_cm = windows_cm;
  f.edge_width_cm = edge_width_cm;
  f.grid = grid;
  const int n = grid.n_nodes();
  f.mask.resize(n);
  for (int k = 0; k < n; ++k) {
    const double nu = std::abs(bin_frequency_cm(grid, k, n));
    f.mask[k] = quantize(mask_value(windows_cm, edge_width_cm, nu));
  }
  fill_complement(f);
  return f;
}

SpectralFilter complement_mask(const SpectralFilter& f) {
  SpectralFilter c = f;
  std::swap(c.mask, c.complement);
  c.is_all_pass = false;
  return c;
}

RealVector apply_fourier_filter(const RealVector& samples, const SpectralFilter& f) {
  if (samples.size() != f.mask.size())
    throw std::invalid_argument("apply_fourier_filter: grid mismatch");
  auto spectrum = fft_forward(samples);
  for (size_t k = 0; k < spectrum.size(); ++k) spectrum[k] *= f.mask[static_cast<int>(k)];
  const double scale = samples.size() > 0 ? samples.cwiseAbs().maxCoeff() : 0.0;
  return fft_inverse_real(spectrum, scale);
}

ControlField apply_fourier_filter(const ControlField& field, const SpectralFilter& f) {
  ControlField out = field;
  out.samples = apply_fourier_filter(field.samples, f);
  return out;
}

FirFilter fir_from_mask(const SpectralFilter& f, int n_taps) {
  if (n_taps < 3 || n_taps % 2 == 0)
    throw std::invalid_argument("fir_from_mask: n_taps must be odd and >= 3");
  // Sample the continuous mask response on a dense grid, inverse-DFT to a
  // centered impulse response, then apply a Hamming window.
  int m = 4096;
  while (m < 8 * n_taps) m *= 2;
  const TimeGrid& g = f.grid;
  std::vector<double> response(m);
  for (int k = 0; k < m; ++k) {
    const double nu = std::abs(bin_frequency_cm(g, k, m));
    response[k] = f.is_all_pass ? 1.0 : mask_value(f.windows_cm, f.edge_width_cm, nu);
  }
  const int half = (n_taps - 1) / 2;
  FirFilter fir;
  fir.dt = g.dt;
  fir.coeffs.resize(n_taps);
  for (int j = -half; j <= half; ++j) {
    double h = 0.0;
    for (int k = 0; k < m; ++k)
      h += response[k] * std::cos(2.0 * M_PI * k * j / m);
    h /= m;
    const double w = 0.54 + 0.46 * std::cos(M_PI * j / half); // Hamming
    fir.coeffs[j + half] = h * w;
  }
  return fir;
}

double fir_response(const FirFilter& fir, double nu_cm) {
  const double omega = units::cm_to_hartree(nu_cm);
  Complex h = 0.0;
  for (int j = 0; j < fir.coeffs.size(); ++j)
    h += fir.coeffs[j] * std::exp(Complex(0.0, -omega * fir.dt * j));
  return std::abs(h);
}

ControlField fir_apply(const ControlField& field, const FirFilter& fir,
                       const TimeGrid& grid) {
  validate_field(field, grid);
  const int n = static_cast<int>(field.samples.size());
  const int taps = static_cast<int>(fir.coeffs.size());
  if (n <= taps)
    throw std::invalid_argument("fir_apply: field shorter than filter");
  const int half = (taps - 1) / 2;
  ControlField out = field;
  out.samples.setZero();
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < taps; ++j) {
      const int src = i + half - j;
      if (src >= 0 && src < n) acc += fir.coeffs[j] * field.samples[src];
    }
    out.samples[i] = acc;
  }
  return out;
}

double out_of_band_fraction(const RealVector& samples, const SpectralFilter& f) {
  if (samples.size() != f.mask.size())
    throw std::invalid_argument("out_of_band_fraction: grid mismatch");
  auto spectrum = fft_forward(samples);
  double total = 0.0, stopped = 0.0;
  for (size_t k = 0; k < spectrum.size(); ++k) {
    const double p = std::norm(spectrum[k]);
    total += p;
    const double c = f.complement[static_cast<int>(k)];
    stopped += c * c * p;
  }
  if (total <= 0.0)
    throw std::invalid_argument("out_of_band_fraction: zero-energy field");
  return stopped / total;
}

double out_of_band_fraction(const ControlField& field, const SpectralFilter& f) {
  return out_of_band_fraction(field.samples, f);
}

ShapeFunction shape_function(const TimeGrid& grid, ShapeForm form, double s_min) {
  if (s_min <= 0.0 || s_min > 0.05)
    throw std::invalid_argument("shape_function: s_min must be in (0, 0.05]");
  ShapeFunction s;
  s.form = form;
  s.s_min = s_min;
  const int n = grid.n_nodes();
  const double T = grid.total_time();
  s.samples.resize(n);
  for (int j = 0; j < n; ++j) {
    const double t = grid.node(j);
    double v = 1.0;
    if (form == ShapeForm::SinSquared) {
      const double x = std::sin(M_PI * t / T);
      v = x * x;
    } else {
      const double ramp = 0.1 * T;
      if (t < ramp)
        v = 0.5 * (1.0 - std::cos(M_PI * t / ramp));
      else if (t > T - ramp)
        v = 0.5 * (1.0 - std::cos(M_PI * (T - t) / ramp));
    }
    s.samples[j] = std::max(v, s_min);
  }
  return s;
}

std::vector<SpectrumPoint> power_spectrum(const ControlField& field, const TimeGrid& grid) {
  validate_field(field, grid);
  if (field.samples.cwiseAbs().maxCoeff() == 0.0)
    throw std::invalid_argument("power_spectrum: zero field");
  const int n = static_cast<int>(field.samples.size());
  int n_fft = 1;
  while (n_fft < 4 * n) n_fft *= 2;
  RealVector padded = RealVector::Zero(n_fft);
  padded.head(n) = field.samples;
  auto spectrum = fft_forward(padded);
  // Normalized so the sum over all signed bins equals sum eps^2 dt.
  const double norm = grid.dt / n_fft;
  std::vector<SpectrumPoint> out;
  out.reserve(n_fft / 2 + 1);
  for (int k = 0; k <= n_fft / 2; ++k)
    out.push_back({bin_frequency_cm(grid, k, n_fft), std::norm(spectrum[k]) * norm});
  return out;
}

} // namespace bloc
