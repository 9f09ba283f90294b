// SPDX-License-Identifier: Apache-2.0
#include "dires/kernels.hpp"

#include <cmath>
#include <limits>

namespace dires {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

// Power series of J0 and Y0 about z = 0, accurate to ~1e-11 relative for
// |z| <= 12.  Beyond that the max series term (~|z|^2/4)^k/(k!)^2 amplifies
// roundoff past the budget, so the large-argument expansion takes over.
void bessel_j0y0_series(Complex z, Complex& j0, Complex& y0) {
  const Complex q = 0.25 * z * z;
  Complex term = 1.0, sum_j = 1.0, sum_s = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k <= 60; ++k) {
    term *= -q / double(k * k);
    harmonic += 1.0 / k;
    sum_j += term;
    sum_s += -harmonic * term;  // (-1)^{k+1} H_k q^k/(k!)^2
    if (std::abs(term) < 1e-18 * (std::abs(sum_j) + 1.0)) break;
  }
  j0 = sum_j;
  y0 = (2.0 / kPi) * ((std::log(0.5 * z) + kEulerGamma) * sum_j + sum_s);
}

// Derivatives J0'(z), Y0'(z) from the term-by-term differentiated series.
void bessel_j0y0_deriv_series(Complex z, Complex& dj0, Complex& dy0) {
  const Complex q = 0.25 * z * z;
  Complex term = 1.0, sum_j = 1.0, sum_dj = 0.0, sum_ds = 0.0;
  double harmonic = 0.0;
  for (int k = 1; k <= 60; ++k) {
    term *= -q / double(k * k);
    harmonic += 1.0 / k;
    sum_j += term;
    const Complex dterm = double(k) * term * (0.5 * z) / q;  // d/dz of term
    sum_dj += dterm;
    sum_ds += -harmonic * dterm;
    if (std::abs(term) < 1e-18 * (std::abs(sum_j) + 1.0)) break;
  }
  dj0 = sum_dj;
  dy0 = (2.0 / kPi) * (sum_j / z + (std::log(0.5 * z) + kEulerGamma) * sum_dj + sum_ds);
}

// Large-argument expansion H_nu^(1)(z) ~ sqrt(2/(pi z)) e^{i(z - nu pi/2 - pi/4)}
// * sum_k i^k a_k(nu) z^{-k}, truncated at the smallest term.
Complex hankel1_asymptotic(int nu, Complex z) {
  Complex sum = 1.0, term = 1.0;
  double prev = std::numeric_limits<double>::max();
  const double nu2 = 4.0 * nu * nu;
  for (int k = 1; k <= 40; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= Complex(0, 1) * (nu2 - odd * odd) / (8.0 * k) / z;
    const double mag = std::abs(term);
    if (mag > prev) break;  // divergent tail reached
    sum += term;
    prev = mag;
    if (mag < 1e-17) break;
  }
  const Complex phase = z - (0.5 * nu + 0.25) * kPi;
  return std::sqrt(2.0 / (kPi * z)) * std::exp(Complex(0, 1) * phase) * sum;
}

}  // namespace

Complex hankel1_0(Complex z) {
  if (std::abs(z) <= 12.0) {
    Complex j0, y0;
    bessel_j0y0_series(z, j0, y0);
    return j0 + Complex(0, 1) * y0;
  }
  return hankel1_asymptotic(0, z);
}

Complex hankel1_1(Complex z) {
  if (std::abs(z) <= 12.0) {
    Complex dj0, dy0;
    bessel_j0y0_deriv_series(z, dj0, dy0);
    return -(dj0 + Complex(0, 1) * dy0);  // H1 = -H0'
  }
  return hankel1_asymptotic(1, z);
}

Complex green(const KernelParams& params, double r) {
  if (!(r > 0.0)) throw std::domain_error("green: singular point (r = 0)");
  if (params.dimension == 3) {
    return std::exp(Complex(0, 1) * params.omega * r) / (4.0 * kPi * r);
  }
  if (params.dimension == 2) {
    if (params.omega == 0.0) return -std::log(r) / (2.0 * kPi);
    return Complex(0, 0.25) * hankel1_0(params.omega * r);
  }
  throw std::invalid_argument("green: dimension must be 2 or 3");
}

Complex green_domega(const KernelParams& params, double r) {
  if (!(r > 0.0)) throw std::domain_error("green_domega: singular point (r = 0)");
  if (params.dimension == 3) {
    return Complex(0, 1) * std::exp(Complex(0, 1) * params.omega * r) / (4.0 * kPi);
  }
  if (params.dimension == 2) {
    if (params.omega == 0.0)
      throw std::domain_error("green_domega: 2D kernel derivative singular at omega = 0");
    return -Complex(0, 0.25) * r * hankel1_1(params.omega * r);
  }
  throw std::invalid_argument("green_domega: dimension must be 2 or 3");
}

Complex green_series_term_3d(int n, double r) {
  if (n < 0) throw std::invalid_argument("green_series_term_3d: n >= 0 required");
  if (n == 0 && !(r > 0.0))
    throw std::domain_error("green_series_term_3d: singular at n = 0, r = 0");
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  static const Complex ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  return ipow[n % 4] * std::pow(r, n - 1) / (4.0 * kPi * fact);
}

Complex eta_omega(Complex omega) {
  if (omega == 0.0) throw std::domain_error("eta_omega: logarithmic singularity at 0");
  return (std::log(omega) + gamma_hat()) / (2.0 * kPi);
}

Complex eta_omega_domega(Complex omega) {
  if (omega == 0.0) throw std::domain_error("eta_omega_domega: singular at 0");
  return 1.0 / (2.0 * kPi * omega);
}

double lambert_w_minus1(double x) {
  const double brk = -std::exp(-1.0);
  if (x == brk) return -1.0;
  if (!(x > brk && x < 0.0))
    throw std::domain_error("lambert_w_minus1: x must lie in (-1/e, 0)");

  const double t = 1.0 + std::exp(1.0) * x;  // distance from the branch point
  double w;
  if (t < 0.02) {
    const double p = std::sqrt(2.0 * t);
    w = -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-x);
    w = l1 - std::log(-l1);
  }
  for (int it = 0; it < 50; ++it) {
    const double e = std::exp(w);
    const double f = w * e - x;
    // Halley step
    const double denom = e * (w + 1.0) - (w + 2.0) * f / (2.0 * (w + 1.0));
    const double dw = f / denom;
    w -= dw;
    if (std::abs(dw) <= 1e-16 * std::abs(w)) break;
  }
  return w;
}

double log_series_b(int j) {
  if (j < 1) throw std::invalid_argument("log_series_b: j >= 1 required");
  double denom = 1.0;
  for (int k = 1; k <= j; ++k) denom *= 2.0 * k;  // 2^j j!
  return (j % 2 ? -1.0 : 1.0) / (2.0 * kPi * denom * denom);
}

Complex log_series_c(int j) {
  double harmonic = 0.0;
  for (int k = 1; k <= j; ++k) harmonic += 1.0 / k;
  return log_series_b(j) * (gamma_hat() - harmonic);
}

Complex green2d_expansion(Complex omega, double r, int j_max) {
  Complex sum = -std::log(r) / (2.0 * kPi) - eta_omega(omega);
  const Complex lw = std::log(omega);
  Complex w2j = 1.0;
  for (int j = 1; j <= j_max; ++j) {
    w2j *= omega * omega;
    const double r2j = std::pow(r, 2 * j);
    sum += w2j * lw * (-log_series_b(j) * r2j);
    sum += w2j * (-(log_series_b(j) * std::log(r) + log_series_c(j)) * r2j);
  }
  return sum;
}

double principal_2d_leading(double epsilon, double area) {
  if (!(epsilon > 0.0) || !(area > 0.0))
    throw std::invalid_argument("principal_2d_leading: epsilon, area must be positive");
  const double arg = -4.0 * kPi * epsilon * epsilon / area;
  if (arg <= -std::exp(-1.0))
    throw std::domain_error("principal_2d_leading: contrast too low (W_{-1} argument below -1/e)");
  const double s = lambert_w_minus1(arg);
  return std::sqrt(-4.0 * kPi / (area * s));
}

}  // namespace dires
