#pragma once
///
/// Windowed DFT of uniformly sampled scalar time series, plus peak finding
/// with quadratic (3-bin) interpolation and prominence filtering.
///
/// The transform itself is FFTW (real-to-complex); everything around it is
/// deterministic bookkeeping.  Angular frequencies: omega_j = 2 pi j/(N dt).

#include <string>
#include <vector>

namespace qhd {

struct TimeSeries {
  double t0 = 0.0;
  double dt = 0.0;  // sample spacing, must be > 0 and uniform by construction
  std::vector<double> values;
  std::string label;
};

enum class Window { none, hann };

struct Spectrum {
  std::vector<double> omega_au;  // angular frequency, a.u.
  std::vector<double> omega_eV;
  std::vector<double> amplitude;  // one-sided window-corrected magnitude
  Window window = Window::hann;
  double delta_omega = 0.0;  // bin spacing 2 pi/(N dt), a.u.
  /// Internal Parseval bookkeeping: sum of squared windowed samples and the
  /// matching spectral energy, for the consistency check.
  double energy_time = 0.0;
  double energy_freq = 0.0;
};

/// De-mean, window, transform.  Throws std::invalid_argument for fewer than
/// 8 samples or non-positive dt.
Spectrum spectrum(const TimeSeries& ts, Window w = Window::hann);

struct SpectralPeak {
  double omega_au = 0.0;   // interpolated position
  double omega_eV = 0.0;
  double amplitude = 0.0;  // interpolated height
  double prominence = 0.0;
  int bin = 0;
};

/// Local maxima refined by a quadratic fit through the 3 bins around each
/// peak, filtered by prominence (height above the higher of the two valleys
/// separating the peak from larger neighbors), sorted by amplitude,
/// descending.  min_prominence is relative to the global maximum amplitude.
std::vector<SpectralPeak> find_peaks(const Spectrum& s,
                                     double min_prominence = 0.05);

}  // namespace qhd
