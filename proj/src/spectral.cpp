#include "qhd/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

#include "qhd/units.hpp"

namespace qhd {

Spectrum spectrum(const TimeSeries& ts, Window w) {
  const std::size_t N = ts.values.size();
  if (N < 8) throw std::invalid_argument("spectrum: need at least 8 samples");
  if (!(ts.dt > 0.0)) throw std::invalid_argument("spectrum: dt must be > 0");

  double mean = 0.0;
  for (double v : ts.values) mean += v;
  mean /= static_cast<double>(N);

  std::vector<double> win(N, 1.0);
  if (w == Window::hann) {
    for (std::size_t i = 0; i < N; ++i)
      win[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                     static_cast<double>(N - 1)));
  }
  double gain = 0.0;  // coherent gain, used to keep peak amplitudes physical
  for (double v : win) gain += v;
  gain /= static_cast<double>(N);

  double* in = fftw_alloc_real(N);
  fftw_complex* out = fftw_alloc_complex(N / 2 + 1);
  double energy_time = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    in[i] = (ts.values[i] - mean) * win[i];
    energy_time += in[i] * in[i];
  }
  // Plan creation/destruction is not thread-safe (execution is); sweeps may
  // transform concurrently.
  static std::mutex plan_mutex;
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(N), in, out,
                                FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }
  fftw_execute(plan);

  Spectrum s;
  s.window = w;
  s.delta_omega = 2.0 * M_PI / (static_cast<double>(N) * ts.dt);
  const std::size_t nb = N / 2 + 1;
  s.omega_au.resize(nb);
  s.omega_eV.resize(nb);
  s.amplitude.resize(nb);
  double energy_freq = 0.0;
  for (std::size_t j = 0; j < nb; ++j) {
    s.omega_au[j] = s.delta_omega * static_cast<double>(j);
    s.omega_eV[j] = hartree_to_eV(s.omega_au[j]);
    const double re = out[j][0], im = out[j][1];
    const double mag2 = re * re + im * im;
    // interior bins count twice in the two-sided sum
    const bool shared = (j == 0) || (2 * j == N);
    energy_freq += (shared ? 1.0 : 2.0) * mag2;
    // calibrated so a unit cosine at a bin center reports amplitude ~1
    s.amplitude[j] = (shared ? 1.0 : 2.0) * std::sqrt(mag2) /
                     (static_cast<double>(N) * gain);
  }
  s.energy_time = energy_time;
  s.energy_freq = energy_freq / static_cast<double>(N);

  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
  return s;
}

std::vector<SpectralPeak> find_peaks(const Spectrum& s, double min_prominence) {
  std::vector<SpectralPeak> peaks;
  const std::size_t nb = s.amplitude.size();
  if (nb < 3) return peaks;
  double amax = 0.0;
  for (std::size_t j = 1; j + 1 < nb; ++j) amax = std::max(amax, s.amplitude[j]);
  if (amax <= 0.0) return peaks;

  for (std::size_t j = 1; j + 1 < nb; ++j) {
    const double a0 = s.amplitude[j - 1], a1 = s.amplitude[j],
                 a2 = s.amplitude[j + 1];
    if (!(a1 > a0 && a1 >= a2)) continue;
    const double prom = a1 / amax;
    if (prom < min_prominence) continue;
    // quadratic vertex through the three bins
    const double den = a0 - 2.0 * a1 + a2;
    double p = 0.0;
    if (den < 0.0) p = 0.5 * (a0 - a2) / den;
    p = std::clamp(p, -0.5, 0.5);
    SpectralPeak pk;
    pk.bin = j;
    pk.omega_au = s.omega_au[j] + p * s.delta_omega;
    pk.omega_eV = hartree_to_eV(pk.omega_au);
    pk.amplitude = a1 - 0.25 * (a0 - a2) * p;
    pk.prominence = prom;
    peaks.push_back(pk);
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const SpectralPeak& a, const SpectralPeak& b) {
              return a.amplitude > b.amplitude;
            });
  return peaks;
}

}  // namespace qhd
