#pragma once

#include <complex>
#include <vector>

#include "landau_ee/calibration.hpp"
#include "landau_ee/specfun.hpp"

namespace landau_ee {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Inverse field strength K (B = 1/K, chemical potential fixed at 2).
struct LandauParams {
  int K;
  explicit LandauParams(int k);
  double nu(double alpha) const { return 4.0 * K + 2.0 * (alpha - 1.0); }
};

struct KernelValue {
  std::complex<double> value;
  RegimeLabel regime;
  double error_estimate;
};

// Radial part of the Fermi projection kernel,
// G_K(t) = exp(-2t^2/K) L_{K-1}^{(1)}(4t^2/K) / (2 pi K).
double g_K_exact(const LandauParams& p, double t);

// 2^a sqrt(nu) x^{a/2+1/4} |1-x|^{1/4} exp(-nu x/2) L_{K-1}^{(a)}(nu x), a in {-1/2, 1/2, 1}.
double f_K_alpha(const LandauParams& p, double alpha, double x);

// Symmetric-gauge kernel exp(i x^y/(2K)) G_K(|x-y|/sqrt 8).
std::complex<double> p_K(const LandauParams& p, Point2 x, Point2 y);

// Regime-dispatched approximation of G_K(t) with a fitted error estimate.
KernelValue g_K_asymptotic(const LandauParams& p, double t,
                           const CalibrationTable& table = CalibrationTable::builtin());

// Regime boundaries as functions of (K, t).
RegimeLabel regime_of(const LandauParams& p, double t,
                      const CalibrationTable& table = CalibrationTable::builtin());

// The individual bound shapes with unit constant, used by calibration.
double bessel_small_shape(int K, double t);
double oscillatory_bulk_shape(double t);
double airy_transition_shape(int K, double t);
double bessel_small_value(double t);
double oscillatory_bulk_value(int K, double t);

// int_R^inf G_K(t)^2 t dt.
double gk_tail_integral(const LandauParams& p, double R);

// Free (K -> infinity) kernel J_1(sqrt2 r)/(sqrt2 pi r).
double p_infinity(Point2 x, Point2 y);

// Rank-K Hermite projection kernel sum_{l<K} psi_l(x) psi_l(y).
double hermite_kernel(const LandauParams& p, double x, double y);
// Same kernel from precomputed (psi_{K-1}, psi_K) at both points; falls back
// to the direct sum when the arguments nearly coincide.
double hermite_kernel_cd(int K, double x, double y, double psi_km1_x, double psi_k_x,
                         double psi_km1_y, double psi_k_y);

double sine_kernel(double s, double t);

// lambda * eta(x / sqrt(lambda)) and its inverse on the oscillatory range.
double eta_scaled(double lambda, double x);
double eta_scaled_inverse(double lambda, double u);
// Derivative of the inverse map, 1/sqrt(lambda - x^2) at x = eta_scaled_inverse(u).
double eta_scaled_inverse_derivative(double lambda, double u);

// Hermite kernel in the eta-rescaled coordinates, lambda = 2K - 1.
double hat_kernel(const LandauParams& p, double s, double t);

struct CalibrationGrid {
  int K = 100;
  double t_max_factor = 2.5;  // grid spans [0, t_max_factor * K]
  double dt = 0.25;
  std::string describe() const;
};

// Fits C (and beta for the exponential tail) of every G_K bound on one grid.
CalibrationTable calibrate_kernel_bounds(const CalibrationGrid& grid);

}  // namespace landau_ee
