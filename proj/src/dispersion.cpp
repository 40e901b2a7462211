#include "qhd/dispersion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qhd/units.hpp"

namespace qhd {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

KineticOmega2 omega2_langmuir_kinetic(double k, const LangmuirParams& p) {
  require(p.omega_p > 0.0, "langmuir: omega_p must be > 0");
  require(p.v2_mean >= 0.0, "langmuir: v2_mean must be >= 0");
  require(k >= 0.0, "langmuir: k must be >= 0");
  KineticOmega2 r;
  r.omega2 = p.omega_p * p.omega_p + 3.0 * k * k * p.v2_mean +
             0.25 * k * k * k * k;
  r.outside_validity = k * std::sqrt(p.v2_mean) > 0.3 * std::sqrt(r.omega2);
  return r;
}

double omega2_langmuir_fluid(double k, const LangmuirParams& p, double gamma,
                             double zeta) {
  require(p.omega_p > 0.0, "langmuir: omega_p must be > 0");
  require(p.v2_mean >= 0.0, "langmuir: v2_mean must be >= 0");
  require(k >= 0.0, "langmuir: k must be >= 0");
  return p.omega_p * p.omega_p + gamma * k * k * p.v2_mean +
         0.25 * zeta * k * k * k * k;
}

double omega2_acoustic_kinetic(double k, const AcousticParams& p) {
  require(p.omega_pe > 0.0 && p.omega_pi > 0.0,
          "acoustic: plasma frequencies must be > 0");
  require(p.lambda_D > 0.0, "acoustic: lambda_D must be > 0");
  require(k >= 0.0, "acoustic: k must be >= 0");
  const double u = k * k * p.lambda_D * p.lambda_D;
  const double den = 1.0 + (1.0 - p.H * p.H / 12.0) * u;
  if (!(den > 0.0))
    throw std::domain_error(
        "acoustic kinetic dispersion outside validity: 1 + (1 - H^2/12) "
        "k^2 lambda_D^2 <= 0 at this k");
  const double cs = p.c_s_kinetic();
  return cs * cs * k * k / den;
}

double omega2_acoustic_fluid(double k, const AcousticParams& p, double gamma,
                             double zeta) {
  require(p.omega_pe > 0.0 && p.omega_pi > 0.0,
          "acoustic: plasma frequencies must be > 0");
  require(p.lambda_D > 0.0, "acoustic: lambda_D must be > 0");
  require(k >= 0.0, "acoustic: k must be >= 0");
  require(gamma > 0.0, "acoustic: gamma must be > 0");
  require(zeta >= 0.0, "acoustic: zeta must be >= 0");
  // omega^2 = omega_pi^2 (gamma u + zeta H^2/4 u^2)/(1 + gamma u + zeta H^2/4 u^2),
  // u = k^2 lambda_D^2.  The numerator is c_s^2 k^2 + zeta H^2/4 k^4
  // lambda_D^4 omega_pi^2 with c_s^2 = gamma k_B T_e/m_i; the same
  // dimensional bookkeeping fixes the k^4 term of the bracket, which is why
  // omega^2 saturates at omega_pi^2 for large k.
  const double u = k * k * p.lambda_D * p.lambda_D;
  const double q = gamma * u + 0.25 * zeta * p.H * p.H * u * u;
  return p.omega_pi * p.omega_pi * q / (1.0 + q);
}

double omega2_spin(double k, const SpinDispersionParams& p) {
  require(p.omega_p > 0.0, "spin dispersion: omega_p must be > 0");
  require(p.T_e >= 0.0, "spin dispersion: T_e must be >= 0");
  require(p.n0 >= 0.0, "spin dispersion: n0 must be >= 0");
  require(std::abs(p.eta0) <= 1.0, "spin dispersion: |eta0| must be <= 1");
  require(k >= 0.0, "spin dispersion: k must be >= 0");
  const double muB = consts::mu_bohr;
  double w2 = p.omega_p * p.omega_p + p.gamma * k * k * p.T_e;
  w2 += k * k * p.n0 *
        (p.dVxc_dn + p.eta0 * p.dVxc_dmz + p.eta0 * muB * p.dBxc_dn +
         p.eta0 * p.eta0 * muB * p.dBxc_dmz);
  if (p.include_magnetostatic)
    w2 -= k * k * muB * muB * consts::mu0 * p.n0 * p.eta0 * p.eta0;
  return w2;
}

TaylorFit fit_even_taylor(const std::vector<double>& k,
                          const std::vector<double>& omega2, int n_terms) {
  if (k.size() != omega2.size() || k.size() < static_cast<std::size_t>(n_terms))
    throw std::invalid_argument("fit_even_taylor: need >= n_terms samples");
  const int m = static_cast<int>(k.size());
  double k_max = 0.0;
  for (double kk : k) k_max = std::max(k_max, std::abs(kk));
  if (!(k_max > 0.0)) throw std::invalid_argument("fit_even_taylor: k all zero");

  // Least squares on the scaled basis s^j, s = (k/k_max)^2 in [0, 1], via
  // normal equations + Cholesky.  Well conditioned for n_terms <= 4.
  std::vector<double> A(n_terms * n_terms, 0.0), b(n_terms, 0.0);
  for (int i = 0; i < m; ++i) {
    const double s = (k[i] / k_max) * (k[i] / k_max);
    double pj = 1.0;
    std::vector<double> row(n_terms);
    for (int j = 0; j < n_terms; ++j) {
      row[j] = pj;
      pj *= s;
    }
    for (int a = 0; a < n_terms; ++a) {
      for (int c = 0; c < n_terms; ++c) A[a * n_terms + c] += row[a] * row[c];
      b[a] += row[a] * omega2[i];
    }
  }
  // Cholesky A = L L^T
  std::vector<double> L(A);
  for (int i = 0; i < n_terms; ++i) {
    for (int j = 0; j <= i; ++j) {
      double s = L[i * n_terms + j];
      for (int t = 0; t < j; ++t) s -= L[i * n_terms + t] * L[j * n_terms + t];
      if (i == j) {
        if (!(s > 0.0))
          throw std::runtime_error("fit_even_taylor: ill-conditioned fit");
        L[i * n_terms + i] = std::sqrt(s);
      } else {
        L[i * n_terms + j] = s / L[j * n_terms + j];
      }
    }
    for (int j = i + 1; j < n_terms; ++j) L[i * n_terms + j] = 0.0;
  }
  std::vector<double> y(n_terms), c(n_terms);
  for (int i = 0; i < n_terms; ++i) {
    double s = b[i];
    for (int t = 0; t < i; ++t) s -= L[i * n_terms + t] * y[t];
    y[i] = s / L[i * n_terms + i];
  }
  for (int i = n_terms - 1; i >= 0; --i) {
    double s = y[i];
    for (int t = i + 1; t < n_terms; ++t) s -= L[t * n_terms + i] * c[t];
    c[i] = s / L[i * n_terms + i];
  }

  TaylorFit fit;
  fit.coeff.resize(n_terms);
  double scale = 1.0;  // undo the s-scaling: coeff of k^{2j} is c_j / k_max^{2j}
  for (int j = 0; j < n_terms; ++j) {
    fit.coeff[j] = c[j] / scale;
    scale *= (k_max * k_max);
  }
  double res = 0.0;
  for (int i = 0; i < m; ++i) {
    double v = 0.0, kp = 1.0;
    for (int j = 0; j < n_terms; ++j) {
      v += fit.coeff[j] * kp;
      kp *= k[i] * k[i];
    }
    res = std::max(res, std::abs(v - omega2[i]));
  }
  fit.residual = res;
  // crude condition estimate: ratio of extreme diagonal Cholesky pivots^2
  double dmin = L[0], dmax = L[0];
  for (int i = 0; i < n_terms; ++i) {
    dmin = std::min(dmin, L[i * n_terms + i]);
    dmax = std::max(dmax, L[i * n_terms + i]);
  }
  fit.condition = (dmax / dmin) * (dmax / dmin);
  if (fit.condition > 1e12)
    throw std::runtime_error("fit_even_taylor: ill-conditioned fit (condition " +
                             std::to_string(fit.condition) + ")");
  return fit;
}

namespace {

// Taylor coefficients of W(u) around u = 0 extracted from evaluations on a
// small symmetric stencil u in [-S, S], least squares in a Legendre basis,
// long double throughout.  Every branch here is rational in u = (k lambda)^2
// (or u = k^2), so evaluating at small negative u (imaginary k) is the same
// closed-form expression; the symmetric stencil removes the one-sided bias
// that a real-k-only fit would leave in the low-order coefficients.
struct UTaylor {
  std::vector<double> coeff;  // c0, c1, c2 (coefficients of u^j)
  double residual = 0.0;
  double condition = 0.0;
};

long double legendre(int n, long double x) {
  long double p0 = 1.0L, p1 = x;
  if (n == 0) return p0;
  if (n == 1) return p1;
  for (int j = 2; j <= n; ++j) {
    const long double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

// d^m/dx^m P_n at x = 0, m = 0, 1, 2 (enough for c0..c2).
long double legendre_deriv0(int n, int m) {
  // From the explicit series: P_n(x) = sum_j a_{n,j} x^j; derivatives at 0
  // follow from the monomial coefficients, computed by recurrence.
  std::vector<long double> a(n + 1, 0.0L), b(n + 1, 0.0L), c(n + 1, 0.0L);
  a[0] = 1.0L;
  if (n >= 1) b[1] = 1.0L;
  if (n == 0) c = a;
  else if (n == 1) c = b;
  else {
    for (int j = 2; j <= n; ++j) {
      for (int t = 0; t <= n; ++t) c[t] = 0.0L;
      for (int t = 0; t < n; ++t) c[t + 1] += (2 * j - 1) * b[t] / j;
      for (int t = 0; t <= n; ++t) c[t] -= (long double)(j - 1) * a[t] / j;
      a = b;
      b = c;
    }
  }
  if (m == 0) return c[0];
  if (m == 1) return n >= 1 ? c[1] : 0.0L;
  return n >= 2 ? 2.0L * c[2] : 0.0L;
}

template <typename F>
UTaylor taylor_u(F&& W, double S, int degree, int n_nodes) {
  const int M = n_nodes;
  std::vector<long double> xs(M), ys(M);
  for (int i = 0; i < M; ++i) {
    xs[i] = -1.0L + 2.0L * i / (M - 1);
    ys[i] = W((long double)S * xs[i]);
  }
  const int nb = degree + 1;
  std::vector<long double> A(nb * nb, 0.0L), rhs(nb, 0.0L);
  std::vector<long double> row(nb);
  for (int i = 0; i < M; ++i) {
    for (int j = 0; j < nb; ++j) row[j] = legendre(j, xs[i]);
    for (int a = 0; a < nb; ++a) {
      for (int b2 = 0; b2 < nb; ++b2) A[a * nb + b2] += row[a] * row[b2];
      rhs[a] += row[a] * ys[i];
    }
  }
  // Cholesky in long double.
  std::vector<long double> L(A);
  long double dmin = 0.0L, dmax = 0.0L;
  for (int i = 0; i < nb; ++i) {
    for (int j = 0; j <= i; ++j) {
      long double s = L[i * nb + j];
      for (int t = 0; t < j; ++t) s -= L[i * nb + t] * L[j * nb + t];
      if (i == j) {
        if (!(s > 0.0L))
          throw std::runtime_error("match_closure: ill-conditioned fit");
        L[i * nb + i] = std::sqrt((double)s);
        if (i == 0) dmin = dmax = L[0];
        dmin = std::min(dmin, L[i * nb + i]);
        dmax = std::max(dmax, L[i * nb + i]);
      } else {
        L[i * nb + j] = s / L[j * nb + j];
      }
    }
  }
  std::vector<long double> y(nb), coef(nb);
  for (int i = 0; i < nb; ++i) {
    long double s = rhs[i];
    for (int t = 0; t < i; ++t) s -= L[i * nb + t] * y[t];
    y[i] = s / L[i * nb + i];
  }
  for (int i = nb - 1; i >= 0; --i) {
    long double s = y[i];
    for (int t = i + 1; t < nb; ++t) s -= L[t * nb + i] * coef[t];
    coef[i] = s / L[i * nb + i];
  }
  UTaylor out;
  out.coeff.resize(3, 0.0);
  // c_m = f^(m)(0)/m! with f(x-scaled); undo x = u/S.
  for (int m = 0; m <= 2; ++m) {
    long double d = 0.0L;
    for (int j = 0; j < nb; ++j) d += coef[j] * legendre_deriv0(j, m);
    long double fact = (m == 2) ? 2.0L : 1.0L;
    long double Spow = 1.0L;
    for (int t = 0; t < m; ++t) Spow *= S;
    out.coeff[m] = (double)(d / (fact * Spow));
  }
  long double res = 0.0L;
  for (int i = 0; i < M; ++i) {
    long double v = 0.0L;
    for (int j = 0; j < nb; ++j) v += coef[j] * legendre(j, xs[i]);
    res = std::max(res, (long double)std::abs((double)(v - ys[i])));
  }
  out.residual = (double)res;
  out.condition = (double)((dmax / dmin) * (dmax / dmin));
  return out;
}

}  // namespace

ClosureMatchReport match_closure(Branch branch, const LangmuirParams& lp,
                                 const AcousticParams& ap, double gamma,
                                 double zeta, const MatchConfig& cfg) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("match_closure: gamma must be positive");
  if (!(zeta >= 0.0) || !std::isfinite(zeta))
    throw std::invalid_argument("match_closure: zeta must be >= 0");
  if (branch == Branch::acoustic && !(ap.lambda_D > 0.0))
    throw std::invalid_argument("match_closure: lambda_D must be positive");
  ClosureMatchReport rep;
  rep.branch = branch;
  const int M = std::max(cfg.n_stencil, 4) * 2 + 9;  // symmetric, odd count
  const int degree = 7;

  if (branch == Branch::langmuir) {
    // u = k^2; both forms are polynomials in u, recovered exactly.
    const double vt2 = lp.v2_mean;
    const double wp2 = lp.omega_p * lp.omega_p;
    const double S = cfg.k_max > 0.0 ? cfg.k_max * cfg.k_max
                                     : 0.01 * wp2 / std::max(vt2, 0.01 * wp2);
    auto Wkin = [&](long double u) {
      return (long double)wp2 + 3.0L * u * vt2 + 0.25L * u * u;
    };
    auto Wfl = [&](long double u) {
      return (long double)wp2 + (long double)gamma * u * vt2 +
             0.25L * (long double)zeta * u * u;
    };
    UTaylor tk = taylor_u(Wkin, S, degree, M);
    UTaylor tf = taylor_u(Wfl, S, degree, M);
    rep.coeff_kinetic = tk.coeff;  // coefficients of k^0, k^2, k^4
    rep.coeff_fluid = tf.coeff;
    rep.fit_residual = std::max(tk.residual, tf.residual);
    rep.condition = std::max(tk.condition, tf.condition);
  } else {
    // u = (k lambda_D)^2; fit the ratios omega^2/(c_s^2 k^2), each branch
    // normalized by its own k -> 0 sound speed (the fluid one carries gamma).
    const long double H2 = (long double)ap.H * ap.H;
    const long double b = 0.25L * (long double)zeta * H2;
    const long double g = gamma;
    auto Rkin = [&](long double u) {
      return 1.0L / (1.0L + (1.0L - H2 / 12.0L) * u);
    };
    auto Rfl = [&](long double u) {
      const long double q = g * u + b * u * u;
      return (1.0L + (b / g) * u) / (1.0L + q);
    };
    const double S =
        cfg.k_max > 0.0 ? std::pow(cfg.k_max * ap.lambda_D, 2) : 0.03;
    UTaylor tk = taylor_u(Rkin, S, degree, M);
    UTaylor tf = taylor_u(Rfl, S, degree, M);
    rep.coeff_kinetic = {tk.coeff[0], tk.coeff[1]};  // in powers of (k lambda)^2
    rep.coeff_fluid = {tf.coeff[0], tf.coeff[1]};
    rep.fit_residual = std::max(tk.residual, tf.residual);
    rep.condition = std::max(tk.condition, tf.condition);
  }
  rep.abs_diff.resize(rep.coeff_kinetic.size());
  rep.rel_diff.resize(rep.coeff_kinetic.size());
  for (std::size_t j = 0; j < rep.coeff_kinetic.size(); ++j) {
    rep.abs_diff[j] = std::abs(rep.coeff_fluid[j] - rep.coeff_kinetic[j]);
    const double scale = std::max(std::abs(rep.coeff_kinetic[j]), 1e-300);
    rep.rel_diff[j] = rep.abs_diff[j] / scale;
  }
  return rep;
}

}  // namespace qhd
