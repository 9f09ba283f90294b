// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>

namespace dires {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

struct KernelParams {
  int dimension = 3;  // 2 or 3
  Complex omega = 0.0;
};

// Outgoing free-space Green's function of -(Laplace + omega^2) at distance r > 0.
// d = 3: e^{i omega r}/(4 pi r).  d = 2: (i/4) H0^(1)(omega r), with the static
// limit -ln(r)/(2 pi) at omega = 0.
Complex green(const KernelParams& params, double r);

// Derivative of green(...) with respect to omega at fixed r.
Complex green_domega(const KernelParams& params, double r);

// n-th coefficient of the 3D small-omega expansion: i^n r^{n-1} / (4 pi n!).
Complex green_series_term_3d(int n, double r);

// eta_omega = (ln omega + gamma - ln 2 - i pi/2) / (2 pi), principal log.
Complex eta_omega(Complex omega);
Complex eta_omega_domega(Complex omega);

// gamma_hat = gamma - ln 2 - i pi/2
inline Complex gamma_hat() { return {kEulerGamma - 0.6931471805599453094, -kPi / 2}; }

// Coefficients of the 2D small-omega kernel expansion
// G^omega = -ln|x|/(2 pi) - eta_omega + sum_j (omega^{2j} ln omega) G_j^(1)
//           + omega^{2j} G_j^(2),
// with G_j^(1) = -b_j |x|^{2j} and G_j^(2) = -(b_j ln|x| + c_j) |x|^{2j}.
double log_series_b(int j);
Complex log_series_c(int j);
// partial sum of the 2D expansion through order j_max (j_max = 1 suffices for
// every remainder bound used here)
Complex green2d_expansion(Complex omega, double r, int j_max);

// Lower real branch W_{-1} on (-1/e, 0): returns w <= -1 with w e^w = x,
// relative residual below 1e-14.
double lambert_w_minus1(double x);

// Leading 2D principal scaled resonance: omega_hat_0 = sqrt(-4 pi / (|D| s)),
// s = W_{-1}(-4 pi eps^2 / |D|), solving omega_hat_0^2 ln(eps omega_hat_0) = -2 pi/|D|.
double principal_2d_leading(double epsilon, double area);

// Bessel/Hankel evaluations used by the 2D kernel (order 0 and 1, complex z).
Complex hankel1_0(Complex z);
Complex hankel1_1(Complex z);

}  // namespace dires
