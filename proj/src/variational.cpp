#include "qhd/variational.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "qhd/closures.hpp"
#include "qhd/errors.hpp"

namespace qhd {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kSqrt3 = 1.7320508075688772;

void check_1d(const Well1DParams& p) {
  if (!(p.A >= 0.0)) throw std::domain_error("well1d: A must be >= 0");
  if (!(p.H > 0.0)) throw std::domain_error("well1d: H must be > 0");
  if (!(p.n_bar > 0.0)) throw std::domain_error("well1d: n_bar must be > 0");
}

void check_3d(const Well3DParams& p) {
  for (double k : p.k)
    if (!(k > 0.0)) throw std::domain_error("well3d: stiffnesses must be > 0");
  if (!(p.zeta_anh >= 0.0)) throw std::domain_error("well3d: zeta_anh >= 0");
  if (!(p.N > 0.0)) throw std::domain_error("well3d: N must be > 0");
}

void check_sigma(const std::array<double, 3>& sigma) {
  for (double s : sigma)
    if (!(s > 0.0)) throw std::domain_error("well3d: sigma must stay > 0");
}

}  // namespace

// ---------------------------------------------------------------- 1D model

double potential_1d(const State1D& s, const Well1DParams& p) {
  check_1d(p);
  if (!(s.sigma > 0.0)) throw std::domain_error("potential_1d: sigma <= 0");
  const double sig2 = s.sigma * s.sigma;
  return 0.5 * s.d * s.d + 0.5 * sig2 - 0.5 * kSqrt2 * p.A * s.sigma +
         kSqrt3 * p.A * p.A / (6.0 * p.n_bar * p.n_bar * sig2) +
         p.H * p.H / (8.0 * sig2);
}

void accel_1d(const State1D& s, const Well1DParams& p, double& d_acc,
              double& sigma_acc) {
  check_1d(p);
  if (!(s.sigma > 0.0)) throw std::domain_error("accel_1d: sigma <= 0");
  const double s3 = s.sigma * s.sigma * s.sigma;
  d_acc = -s.d;
  sigma_acc = -s.sigma + 0.5 * kSqrt2 * p.A +
              kSqrt3 * p.A * p.A / (3.0 * p.n_bar * p.n_bar * s3) +
              p.H * p.H / (4.0 * s3);
}

double equilibrium_sigma(const Well1DParams& p) {
  check_1d(p);
  // root of f(s) = s - c1 - c2/s^3, monotone increasing, unique positive root
  const double c1 = 0.5 * kSqrt2 * p.A;
  const double c2 =
      kSqrt3 * p.A * p.A / (3.0 * p.n_bar * p.n_bar) + 0.25 * p.H * p.H;
  auto f = [&](double s) { return s - c1 - c2 / (s * s * s); };
  double hi = c1 + std::pow(c2, 0.25) + 1.0;
  double lo = std::min(1e-3, 1e-6 * hi);
  while (f(lo) > 0.0) lo *= 0.5;
  double s = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fs = f(s);
    if (fs > 0.0) hi = s;
    else lo = s;
    const double df = 1.0 + 3.0 * c2 / (s * s * s * s);
    double next = s - fs / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - s) <= 1e-13 * s) return next;
    s = next;
  }
  return s;
}

double breathing_frequency(const Well1DParams& p) {
  const double se = equilibrium_sigma(p);
  const double se4 = se * se * se * se;
  const double upp = 1.0 + (kSqrt3 * p.A * p.A / (p.n_bar * p.n_bar) +
                            0.75 * p.H * p.H) /
                               se4;
  return std::sqrt(upp);
}

Trajectory1D integrate_1d(const State1D& init, const Well1DParams& p,
                          double t_end, double dt, int sample_stride) {
  check_1d(p);
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_1d: t_end > 0");
  if (sample_stride < 1) sample_stride = 1;
  if (dt <= 0.0) {
    const double om = std::max(1.0, breathing_frequency(p));
    dt = 2.0 * M_PI / om / 1000.0;
  }
  const auto deriv = [&](const State1D& s, State1D& ds) {
    ds.d = s.d_dot;
    ds.sigma = s.sigma_dot;
    accel_1d(s, p, ds.d_dot, ds.sigma_dot);
  };
  const auto axpy = [](const State1D& s, double a, const State1D& k) {
    State1D r;
    r.d = s.d + a * k.d;
    r.sigma = s.sigma + a * k.sigma;
    r.d_dot = s.d_dot + a * k.d_dot;
    r.sigma_dot = s.sigma_dot + a * k.sigma_dot;
    return r;
  };

  const long n_steps = std::lround(std::ceil(t_end / dt - 1e-9));
  Trajectory1D tr;
  State1D s = init;
  State1D k1, k2, k3, k4;
  for (long n = 0; n <= n_steps; ++n) {
    const double t = dt * static_cast<double>(n);
    if (n % sample_stride == 0) {
      tr.t.push_back(t);
      tr.state.push_back(s);
      tr.energy.push_back(0.5 * (s.d_dot * s.d_dot + s.sigma_dot * s.sigma_dot) +
                          potential_1d(s, p));
    }
    if (n == n_steps) break;
    deriv(s, k1);
    deriv(axpy(s, 0.5 * dt, k1), k2);
    deriv(axpy(s, 0.5 * dt, k2), k3);
    deriv(axpy(s, dt, k3), k4);
    s.d += dt / 6.0 * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
    s.sigma += dt / 6.0 * (k1.sigma + 2.0 * k2.sigma + 2.0 * k3.sigma + k4.sigma);
    s.d_dot += dt / 6.0 * (k1.d_dot + 2.0 * k2.d_dot + 2.0 * k3.d_dot + k4.d_dot);
    s.sigma_dot +=
        dt / 6.0 * (k1.sigma_dot + 2.0 * k2.sigma_dot + 2.0 * k3.sigma_dot +
                    k4.sigma_dot);
    if (!(s.sigma > 0.0))
      throw NumericalError("integrate_1d: sigma collapsed to " +
                           std::to_string(s.sigma) + " at t = " +
                           std::to_string(t + dt));
  }
  return tr;
}

// ---------------------------------------------------------------- 3D model

namespace {

// Gauss-Legendre nodes/weights on [-1, 1], Newton on the recurrence.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

struct AnsatzIntegrals {
  double hartree = 0.0;      // E_H, full double integral via the theta map
  double fermi = 0.0;        // integral of (3/10)(3pi^2)^{2/3} n^{5/3}
  double exchange = 0.0;     // integral of -(3/4)(3/pi)^{1/3} n^{4/3}
  double correlation = 0.0;  // integral of the closed-form Brey density
};

AnsatzIntegrals ansatz_integrals(double N, const std::array<double, 3>& sig,
                                 int order) {
  std::vector<double> x, w;
  gauss_legendre(order, x, w);

  const double V = sig[0] * sig[1] * sig[2];
  const double C = N / (std::pow(2.0 * M_PI, 1.5) * V);
  const double cF = 0.3 * std::pow(3.0 * M_PI * M_PI, 2.0 / 3.0);
  const double cX = 0.75 * std::cbrt(3.0 / M_PI);

  AnsatzIntegrals out;
  // local terms: n depends only on rho = |scaled coordinate|
  const double R = 15.0;
  for (int i = 0; i < order; ++i) {
    const double rho = 0.5 * R * (x[i] + 1.0);
    const double wr = 0.5 * R * w[i] * 4.0 * M_PI * rho * rho * V;
    const double n = C * std::exp(-0.5 * rho * rho);
    out.fermi += wr * cF * std::pow(n, 5.0 / 3.0);
    out.exchange -= wr * cX * std::pow(n, 4.0 / 3.0);
    out.correlation += wr * correlation_energy_density_brey(n);
  }
  // Hartree: E_H = N^2/(4 sqrt(pi)) * int_0^inf ds / sqrt(prod(sigma_i^2+s)),
  // mapped with s = g^2 tan^2(theta) which makes the integrand smooth on
  // [0, pi/2] (g = geometric-mean width).
  const double g2 = std::cbrt(V) * std::cbrt(V);
  for (int i = 0; i < order; ++i) {
    const double th = 0.25 * M_PI * (x[i] + 1.0);
    const double tn = std::tan(th), sc = 1.0 / std::cos(th);
    const double s = g2 * tn * tn;
    const double ds = 2.0 * g2 * tn * sc * sc;
    double prod = 1.0;
    for (double sg : sig) prod *= sg * sg + s;
    out.hartree += 0.25 * M_PI * w[i] * ds / std::sqrt(prod);
  }
  out.hartree *= N * N / (4.0 * std::sqrt(M_PI));
  return out;
}

}  // namespace

AlphaReport derive_alpha_coefficients(int quadrature_order,
                                      const AnsatzReference& ref) {
  if (quadrature_order < 20)
    throw std::invalid_argument("derive_alpha_coefficients: order too low");
  check_sigma(ref.sigma);
  if (!(ref.N > 0.0))
    throw std::invalid_argument("derive_alpha_coefficients: N must be > 0");

  const double V = ref.sigma[0] * ref.sigma[1] * ref.sigma[2];
  const double S2 = 1.0 / (ref.sigma[0] * ref.sigma[0]) +
                    1.0 / (ref.sigma[1] * ref.sigma[1]) +
                    1.0 / (ref.sigma[2] * ref.sigma[2]);
  const double N = ref.N;

  auto to_alphas = [&](const AnsatzIntegrals& I, AlphaReport& r) {
    r.alpha1 = I.hartree / (N * N * S2 * std::cbrt(V));
    r.alpha3 = (I.fermi / N) * std::pow(V / N, 2.0 / 3.0);
    r.alpha4 = -(I.exchange / N) * std::cbrt(V / N);
    r.alpha2 = -(I.correlation / N) / (S2 * r.beta * std::cbrt(V / N));
  };

  AlphaReport rep;
  rep.beta = brey::gamma_c;
  AnsatzIntegrals I1 = ansatz_integrals(N, ref.sigma, quadrature_order);
  to_alphas(I1, rep);
  AlphaReport rep2;
  rep2.beta = rep.beta;
  AnsatzIntegrals I2 = ansatz_integrals(N, ref.sigma, 2 * quadrature_order);
  to_alphas(I2, rep2);
  rep.quad_error = {std::abs(rep.alpha1 - rep2.alpha1),
                    std::abs(rep.alpha2 - rep2.alpha2),
                    std::abs(rep.alpha3 - rep2.alpha3),
                    std::abs(rep.alpha4 - rep2.alpha4)};
  const std::array<double, 4> vals = {rep.alpha1, rep.alpha2, rep.alpha3,
                                      rep.alpha4};
  for (std::size_t j = 0; j < 4; ++j) {
    if (rep.quad_error[j] > 1e-9 * (std::abs(vals[j]) + 1e-12))
      throw ConvergenceError(
          "derive_alpha_coefficients: quadrature did not converge",
          {rep.quad_error.begin(), rep.quad_error.end()});
  }
  rep.convention =
      "alpha1/alpha3/alpha4 factor out of the Gaussian-ansatz quadrature and "
      "are reference-independent; the correlation term does not factor, so "
      "alpha2 is defined at the reference (N, sigma) with beta = 0.03349, the "
      "strength constant of the correlation fit whose ln(1+x) form it "
      "integrates.";
  return rep;
}

Well3DParams make_well3d(const std::array<double, 3>& k, double zeta_anh,
                         double N, int quadrature_order) {
  AnsatzReference ref;
  ref.N = N;
  AlphaReport rep = derive_alpha_coefficients(quadrature_order, ref);
  Well3DParams p;
  p.k = k;
  p.zeta_anh = zeta_anh;
  p.N = N;
  p.alpha1 = rep.alpha1;
  p.alpha2 = rep.alpha2;
  p.alpha3 = rep.alpha3;
  p.alpha4 = rep.alpha4;
  p.beta = rep.beta;
  check_3d(p);
  return p;
}

double potential_3d(const State3D& s, const Well3DParams& p) {
  check_3d(p);
  check_sigma(s.sigma);
  const double V = s.sigma[0] * s.sigma[1] * s.sigma[2];
  double Ud = 0.0, S2 = 0.0, quad = 0.0, cross = 0.0, sum_s = 0.0;
  std::array<double, 3> sq{};
  for (int i = 0; i < 3; ++i) {
    Ud += 0.5 * p.k[i] * s.d[i] * s.d[i];
    S2 += 1.0 / (s.sigma[i] * s.sigma[i]);
    sq[i] = s.sigma[i] * s.sigma[i] + s.d[i] * s.d[i];
    sum_s += sq[i];
  }
  const double bracket = 0.125 + p.alpha1 * p.N * std::cbrt(V) -
                         p.alpha2 * p.beta * std::cbrt(V / p.N);
  double Usig = 0.0;
  for (int i = 0; i < 3; ++i) Usig += 0.5 * p.k[i] * s.sigma[i] * s.sigma[i];
  Usig += S2 * bracket + p.alpha3 * std::pow(p.N / V, 2.0 / 3.0) -
          p.alpha4 * std::cbrt(p.N / V);
  for (int i = 0; i < 3; ++i) {
    const double si2 = s.sigma[i] * s.sigma[i];
    const double di2 = s.d[i] * s.d[i];
    quad += 3.0 * si2 * si2 + 6.0 * di2 * si2 + di2 * di2;
    cross += sq[i] * (sum_s - sq[i]);
  }
  const double Udsig = p.zeta_anh * (quad + cross);
  return Ud + Usig + Udsig;
}

void grad_potential_3d(const State3D& s, const Well3DParams& p,
                       std::array<double, 3>& dU_dd,
                       std::array<double, 3>& dU_dsigma) {
  check_3d(p);
  check_sigma(s.sigma);
  const double V = s.sigma[0] * s.sigma[1] * s.sigma[2];
  const double NV13 = p.alpha1 * p.N * std::cbrt(V);
  const double VN13 = p.alpha2 * p.beta * std::cbrt(V / p.N);
  const double bracket = 0.125 + NV13 - VN13;
  double S2 = 0.0, sum_s = 0.0;
  std::array<double, 3> sq{};
  for (int i = 0; i < 3; ++i) {
    S2 += 1.0 / (s.sigma[i] * s.sigma[i]);
    sq[i] = s.sigma[i] * s.sigma[i] + s.d[i] * s.d[i];
    sum_s += sq[i];
  }
  const double fermi = p.alpha3 * std::pow(p.N / V, 2.0 / 3.0);
  const double exch = p.alpha4 * std::cbrt(p.N / V);
  for (int i = 0; i < 3; ++i) {
    const double sig = s.sigma[i], d = s.d[i];
    const double others = sum_s - sq[i];
    dU_dd[i] = p.k[i] * d +
               p.zeta_anh * (12.0 * d * sig * sig + 4.0 * d * d * d +
                             4.0 * d * others);
    dU_dsigma[i] = p.k[i] * sig - 2.0 * bracket / (sig * sig * sig) +
                   S2 * (NV13 - VN13) / (3.0 * sig) -
                   (2.0 / 3.0) * fermi / sig + (1.0 / 3.0) * exch / sig +
                   p.zeta_anh * (12.0 * sig * sig * sig +
                                 12.0 * d * d * sig + 4.0 * sig * others);
  }
}

double energy_3d(const State3D& s, const Well3DParams& p) {
  double kin = 0.0;
  for (int i = 0; i < 3; ++i)
    kin += 0.5 * (s.d_dot[i] * s.d_dot[i] + s.sigma_dot[i] * s.sigma_dot[i]);
  return kin + potential_3d(s, p);
}

std::array<double, 3> equilibrium_sigma3(const Well3DParams& p) {
  check_3d(p);
  State3D s;
  const double G0 = 0.125 + p.alpha1 * p.N;
  for (int i = 0; i < 3; ++i)
    s.sigma[i] = std::pow(2.0 * G0 / p.k[i], 0.25);

  std::array<double, 3> gd{}, g{};
  auto grad_norm = [&](const std::array<double, 3>& sig) {
    State3D q;
    q.sigma = sig;
    grad_potential_3d(q, p, gd, g);
    return std::max({std::abs(g[0]), std::abs(g[1]), std::abs(g[2])});
  };

  double gn = grad_norm(s.sigma);
  for (int it = 0; it < 200 && gn > 1e-12 * (1.0 + p.k[0] * s.sigma[0]); ++it) {
    // numerical Jacobian of the sigma-gradient
    double J[3][3];
    std::array<double, 3> gp{}, gm{}, base = s.sigma;
    grad_potential_3d(s, p, gd, g);
    for (int j = 0; j < 3; ++j) {
      const double h = 1e-6 * base[j];
      State3D q;
      q.sigma = base;
      q.sigma[j] = base[j] + h;
      grad_potential_3d(q, p, gd, gp);
      q.sigma[j] = base[j] - h;
      grad_potential_3d(q, p, gd, gm);
      for (int i = 0; i < 3; ++i) J[i][j] = (gp[i] - gm[i]) / (2.0 * h);
    }
    // solve J dx = -g (Gaussian elimination, 3x3)
    double A[3][4];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) A[i][j] = J[i][j];
      A[i][3] = -g[i];
    }
    for (int c = 0; c < 3; ++c) {
      int piv = c;
      for (int r = c + 1; r < 3; ++r)
        if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
      for (int j = 0; j < 4; ++j) std::swap(A[c][j], A[piv][j]);
      if (std::abs(A[c][c]) < 1e-300)
        throw NumericalError("equilibrium_sigma3: singular Jacobian");
      for (int r = 0; r < 3; ++r) {
        if (r == c) continue;
        const double f = A[r][c] / A[c][c];
        for (int j = c; j < 4; ++j) A[r][j] -= f * A[c][j];
      }
    }
    std::array<double, 3> dx = {A[0][3] / A[0][0], A[1][3] / A[1][1],
                                A[2][3] / A[2][2]};
    double step = 1.0;
    bool stalled = true;
    for (int bt = 0; bt < 60; ++bt) {
      std::array<double, 3> trial = base;
      bool ok = true;
      for (int j = 0; j < 3; ++j) {
        trial[j] = base[j] + step * dx[j];
        if (!(trial[j] > 0.0)) ok = false;
      }
      if (ok && grad_norm(trial) < gn) {
        s.sigma = trial;
        stalled = false;
        break;
      }
      step *= 0.5;
    }
    if (stalled) break;  // roundoff-limited; the final check decides
    gn = grad_norm(s.sigma);
  }
  if (gn > 1e-8)
    throw ConvergenceError("equilibrium_sigma3: no convergence", {gn});
  return s.sigma;
}

namespace {

void deriv_3d(const State3D& s, const Well3DParams& p, State3D& ds) {
  std::array<double, 3> gd{}, gs{};
  grad_potential_3d(s, p, gd, gs);
  for (int i = 0; i < 3; ++i) {
    ds.d[i] = s.d_dot[i];
    ds.sigma[i] = s.sigma_dot[i];
    ds.d_dot[i] = -gd[i];
    ds.sigma_dot[i] = -gs[i];
  }
}

State3D axpy_3d(const State3D& s, double a, const State3D& k) {
  State3D r;
  for (int i = 0; i < 3; ++i) {
    r.d[i] = s.d[i] + a * k.d[i];
    r.sigma[i] = s.sigma[i] + a * k.sigma[i];
    r.d_dot[i] = s.d_dot[i] + a * k.d_dot[i];
    r.sigma_dot[i] = s.sigma_dot[i] + a * k.sigma_dot[i];
  }
  return r;
}

void rk4_step_3d(State3D& s, const Well3DParams& p, double dt) {
  State3D k1, k2, k3, k4;
  deriv_3d(s, p, k1);
  deriv_3d(axpy_3d(s, 0.5 * dt, k1), p, k2);
  deriv_3d(axpy_3d(s, 0.5 * dt, k2), p, k3);
  deriv_3d(axpy_3d(s, dt, k3), p, k4);
  for (int i = 0; i < 3; ++i) {
    s.d[i] += dt / 6.0 * (k1.d[i] + 2.0 * k2.d[i] + 2.0 * k3.d[i] + k4.d[i]);
    s.sigma[i] += dt / 6.0 * (k1.sigma[i] + 2.0 * k2.sigma[i] +
                              2.0 * k3.sigma[i] + k4.sigma[i]);
    s.d_dot[i] += dt / 6.0 * (k1.d_dot[i] + 2.0 * k2.d_dot[i] +
                              2.0 * k3.d_dot[i] + k4.d_dot[i]);
    s.sigma_dot[i] += dt / 6.0 * (k1.sigma_dot[i] + 2.0 * k2.sigma_dot[i] +
                                  2.0 * k3.sigma_dot[i] + k4.sigma_dot[i]);
  }
}

}  // namespace

double default_dt_3d(const Well3DParams& p) {
  check_3d(p);
  double om_max = 0.0;
  for (double k : p.k) om_max = std::max(om_max, std::sqrt(k));
  // width-sector frequencies from the diagonal Hessian at equilibrium
  std::array<double, 3> se = equilibrium_sigma3(p);
  State3D q;
  q.sigma = se;
  std::array<double, 3> gd{}, gp{}, gm{};
  for (int j = 0; j < 3; ++j) {
    const double h = 1e-5 * se[j];
    q.sigma = se;
    q.sigma[j] = se[j] + h;
    grad_potential_3d(q, p, gd, gp);
    q.sigma[j] = se[j] - h;
    grad_potential_3d(q, p, gd, gm);
    const double hess = (gp[j] - gm[j]) / (2.0 * h);
    if (hess > 0.0) om_max = std::max(om_max, std::sqrt(hess));
  }
  // period/1000 holds the RK4 energy decay near n (omega dt)^6/72, which
  // keeps |dE/E| under 1e-7 over 1e4 time units; period/200 would not.
  return 2.0 * M_PI / om_max / 1000.0;
}

Trajectory3D integrate_3d(const State3D& init, const Well3DParams& p,
                          double t_end, double dt, int sample_stride) {
  check_3d(p);
  check_sigma(init.sigma);
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_3d: t_end > 0");
  if (sample_stride < 1) sample_stride = 1;
  if (dt <= 0.0) dt = default_dt_3d(p);

  const long n_steps = std::lround(std::ceil(t_end / dt - 1e-9));
  Trajectory3D tr;
  tr.t.reserve(static_cast<std::size_t>(n_steps / sample_stride + 2));
  State3D s = init;
  for (long n = 0; n <= n_steps; ++n) {
    if (n % sample_stride == 0) {
      tr.t.push_back(dt * static_cast<double>(n));
      tr.state.push_back(s);
      tr.energy.push_back(energy_3d(s, p));
    }
    if (n == n_steps) break;
    rk4_step_3d(s, p, dt);
    for (double sg : s.sigma)
      if (!(sg > 0.0))
        throw NumericalError("integrate_3d: sigma collapsed at t = " +
                             std::to_string(dt * static_cast<double>(n + 1)));
  }
  return tr;
}

// ------------------------------------------------------- chaos diagnostics

double area_coverage(const std::vector<double>& x,
                     const std::vector<double>& y, int bins) {
  if (x.size() != y.size() || x.empty() || bins < 2) return 0.0;
  auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
  auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
  double xmin = *xmin_it, xmax = *xmax_it, ymin = *ymin_it, ymax = *ymax_it;
  if (xmax - xmin < 1e-12) {
    xmin -= 1e-6;
    xmax += 1e-6;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 1e-6;
    ymax += 1e-6;
  }
  std::vector<char> occ(static_cast<std::size_t>(bins) * bins, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    int ix = static_cast<int>((x[i] - xmin) / (xmax - xmin) * bins);
    int iy = static_cast<int>((y[i] - ymin) / (ymax - ymin) * bins);
    ix = std::clamp(ix, 0, bins - 1);
    iy = std::clamp(iy, 0, bins - 1);
    occ[static_cast<std::size_t>(iy) * bins + ix] = 1;
  }
  std::size_t count = 0;
  for (char c : occ) count += static_cast<std::size_t>(c);
  return static_cast<double>(count) / (static_cast<double>(bins) * bins);
}

namespace {

// Cubic Hermite value at fraction u of a step, given endpoint values/slopes.
double hermite(double f0, double m0, double f1, double m1, double dt,
               double u) {
  const double u2 = u * u, u3 = u2 * u;
  return (2.0 * u3 - 3.0 * u2 + 1.0) * f0 + (u3 - 2.0 * u2 + u) * dt * m0 +
         (-2.0 * u3 + 3.0 * u2) * f1 + (u3 - u2) * dt * m1;
}

// Collect (d_x, d_y) at rising zero crossings of the scalar v(state).
template <typename V, typename VDot>
void stream_crossings(const State3D& init, const Well3DParams& p, double t_end,
                      double dt, V&& val, VDot&& vdot, std::vector<double>& px,
                      std::vector<double>& py, double* max_abs) {
  const long n_steps = std::lround(std::ceil(t_end / dt - 1e-9));
  State3D s = init;
  double v0 = val(s), vd0 = vdot(s);
  if (max_abs) *max_abs = std::abs(v0);
  for (long n = 0; n < n_steps; ++n) {
    State3D prev = s;
    rk4_step_3d(s, p, dt);
    for (double sg : s.sigma)
      if (!(sg > 0.0))
        throw NumericalError("poincare_section: sigma collapsed");
    const double v1 = val(s), vd1 = vdot(s);
    if (max_abs) *max_abs = std::max(*max_abs, std::abs(v1));
    if (v0 < 0.0 && v1 >= 0.0) {
      // locate the crossing inside the step on the Hermite cubic
      double u = v0 / (v0 - v1);
      for (int it = 0; it < 20; ++it) {
        const double f = hermite(v0, vd0, v1, vd1, dt, u);
        const double df = (hermite(v0, vd0, v1, vd1, dt, u + 1e-7) - f) / 1e-7;
        if (std::abs(df) < 1e-300) break;
        const double un = u - f / df;
        if (!(un >= 0.0 && un <= 1.0)) break;
        if (std::abs(un - u) < 1e-12) {
          u = un;
          break;
        }
        u = un;
      }
      px.push_back(hermite(prev.d[0], prev.d_dot[0], s.d[0], s.d_dot[0], dt, u));
      py.push_back(hermite(prev.d[1], prev.d_dot[1], s.d[1], s.d_dot[1], dt, u));
    }
    v0 = v1;
    vd0 = vd1;
  }
}

}  // namespace

PoincareSet poincare_section(const State3D& init, const Well3DParams& p,
                             double t_end, double dt) {
  check_3d(p);
  check_sigma(init.sigma);
  if (dt <= 0.0) dt = default_dt_3d(p);

  PoincareSet out;
  out.surface.kind = SurfaceSpec::Kind::dz_zero;
  double amp = 0.0;
  stream_crossings(
      init, p, t_end, dt, [](const State3D& s) { return s.d[2]; },
      [](const State3D& s) { return s.d_dot[2]; }, out.d_x, out.d_y, &amp);
  if (amp < 1e-8) {
    // degenerate d_z: fall back to the width surface sigma_z = sigma_z,eq
    out.d_x.clear();
    out.d_y.clear();
    const double sz_eq = equilibrium_sigma3(p)[2];
    out.surface.kind = SurfaceSpec::Kind::sigma_z_eq;
    out.surface.sigma_z_eq = sz_eq;
    stream_crossings(
        init, p, t_end, dt,
        [sz_eq](const State3D& s) { return s.sigma[2] - sz_eq; },
        [](const State3D& s) { return s.sigma_dot[2]; }, out.d_x, out.d_y,
        nullptr);
  }
  out.area_coverage = area_coverage(out.d_x, out.d_y);
  return out;
}

LyapunovEstimate lyapunov_max(const State3D& init, const Well3DParams& p,
                              double t_end, double dt, double renorm_interval,
                              double eps0) {
  check_3d(p);
  check_sigma(init.sigma);
  if (!(renorm_interval > 0.0) || !(eps0 > 0.0))
    throw std::invalid_argument("lyapunov_max: bad interval or offset");
  if (dt <= 0.0) dt = default_dt_3d(p);
  const long per = std::max(1l, std::lround(renorm_interval / dt));
  const double dt_eff = renorm_interval / static_cast<double>(per);
  const long n_ren = std::lround(std::ceil(t_end / renorm_interval - 1e-9));

  State3D a = init, b = init;
  const double off = eps0 / std::sqrt(3.0);
  for (int i = 0; i < 3; ++i) b.d[i] += off;

  auto diff_norm = [](const State3D& u, const State3D& v) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      s += (u.d[i] - v.d[i]) * (u.d[i] - v.d[i]);
      s += (u.sigma[i] - v.sigma[i]) * (u.sigma[i] - v.sigma[i]);
      s += (u.d_dot[i] - v.d_dot[i]) * (u.d_dot[i] - v.d_dot[i]);
      s += (u.sigma_dot[i] - v.sigma_dot[i]) * (u.sigma_dot[i] - v.sigma_dot[i]);
    }
    return std::sqrt(s);
  };

  LyapunovEstimate est;
  double log_sum = 0.0;
  for (long r = 1; r <= n_ren; ++r) {
    for (long n = 0; n < per; ++n) {
      rk4_step_3d(a, p, dt_eff);
      rk4_step_3d(b, p, dt_eff);
    }
    const double dist = diff_norm(a, b);
    if (!(dist > 0.0))
      throw NumericalError("lyapunov_max: shadow trajectory merged");
    log_sum += std::log(dist / eps0);
    const double t_now = renorm_interval * static_cast<double>(r);
    est.t_trace.push_back(t_now);
    est.lambda_trace.push_back(log_sum / t_now);
    // pull the shadow back to the fixed separation along the current offset
    const double f = eps0 / dist;
    for (int i = 0; i < 3; ++i) {
      b.d[i] = a.d[i] + (b.d[i] - a.d[i]) * f;
      b.sigma[i] = a.sigma[i] + (b.sigma[i] - a.sigma[i]) * f;
      b.d_dot[i] = a.d_dot[i] + (b.d_dot[i] - a.d_dot[i]) * f;
      b.sigma_dot[i] = a.sigma_dot[i] + (b.sigma_dot[i] - a.sigma_dot[i]) * f;
    }
    for (double sg : b.sigma)
      if (!(sg > 0.0)) throw NumericalError("lyapunov_max: sigma collapsed");
  }
  est.lambda = est.lambda_trace.empty() ? 0.0 : est.lambda_trace.back();
  return est;
}

}  // namespace qhd
