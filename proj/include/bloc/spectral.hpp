#pragma once

#include <utility>
#include <vector>

#include "bloc/core.hpp"

namespace bloc {

/// Frequency-domain band-pass mask over the FFT bins of a TimeGrid.
/// Values are in [0, 1] with raised-cosine transition edges and are
/// quantized to multiples of 2^-30 so that mask + complement == 1 holds
/// exactly per bin.
struct SpectralFilter {
  std::vector<std::pair<double, double>> windows_cm; // (lo, hi) pass windows
  double edge_width_cm = 0.0;
  TimeGrid grid;
  RealVector mask;       // n_nodes bins, symmetric under omega -> -omega
  RealVector complement; // exactly 1 - mask per bin
  bool is_all_pass = false;

  static SpectralFilter all_pass(const TimeGrid& grid);
  static SpectralFilter all_stop(const TimeGrid& grid);
};

/// Signed frequency (cm^-1) of FFT bin k for an n-point transform on grid.
double bin_frequency_cm(const TimeGrid& grid, int bin, int n_fft);

SpectralFilter band_pass_mask(const std::vector<std::pair<double, double>>& windows_cm,
                              double edge_width_cm, const TimeGrid& grid);

/// Band-stop companion: swaps mask and complement (exact involution).
SpectralFilter complement_mask(const SpectralFilter& f);

/// F^-1[f(omega) . F(eps)]. Forward FFT unnormalized, inverse carries 1/N.
/// Throws if the imaginary residue exceeds 1e-12 relative to the field.
RealVector apply_fourier_filter(const RealVector& samples, const SpectralFilter& f);
ControlField apply_fourier_filter(const ControlField& field, const SpectralFilter& f);

/// Linear-phase FIR filter c_0..c_N (symmetric coefficients).
struct FirFilter {
  RealVector coeffs;
  double dt = 0.0;

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  double group_delay() const { return order() * dt / 2.0; }
};

/// Windowed-sinc (Hamming) linear-phase design approximating the mask's
/// magnitude response. n_taps must be odd.
FirFilter fir_from_mask(const SpectralFilter& f, int n_taps);

/// Magnitude response |sum_j c_j e^{-i omega dt j}| at nu (cm^-1).
double fir_response(const FirFilter& fir, double nu_cm);

/// Zero-padded convolution, delay-compensated by the group delay.
ControlField fir_apply(const ControlField& field, const FirFilter& fir,
                       const TimeGrid& grid);

/// Parseval ratio of complement-band energy to total field energy.
double out_of_band_fraction(const ControlField& field, const SpectralFilter& f);
double out_of_band_fraction(const RealVector& samples, const SpectralFilter& f);

enum class ShapeForm { SinSquared, FlatTopCosineEdges };

/// Temporal envelope s(t) in [s_min, 1] enforcing smooth switch on/off.
struct ShapeFunction {
  RealVector samples; // n_nodes
  ShapeForm form = ShapeForm::SinSquared;
  double s_min = 1e-3;
};

ShapeFunction shape_function(const TimeGrid& grid, ShapeForm form, double s_min = 1e-3);

struct SpectrumPoint {
  double nu_cm = 0.0;
  double power = 0.0;
};

/// |F(eps)|^2 on positive-frequency bins, zero-padded to the next power of
/// two >= 4x the field length. Power is normalized so that the sum over all
/// (signed) bins equals sum eps^2 dt.
std::vector<SpectrumPoint> power_spectrum(const ControlField& field, const TimeGrid& grid);

} // namespace bloc
