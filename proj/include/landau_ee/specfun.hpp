#pragma once

#include <complex>
#include <span>
#include <string_view>

namespace landau_ee {

enum class RegimeLabel { BesselSmall, OscillatoryBulk, AiryTransition, ExponentialTail };

std::string_view regime_name(RegimeLabel r);

// Normalized Hermite function psi_ell(s) = (sqrt(pi) 2^ell ell!)^{-1/2} H_ell(s) exp(-s^2/2).
double hermite_psi(int ell, double s);

// Fills out[0..n) with psi_0(s), ..., psi_{n-1}(s) in one recurrence sweep.
void hermite_psi_all(double s, std::span<double> out);

// Generalized Laguerre polynomial L_n^{(alpha)}(x) by the three-term recurrence.
double laguerre(int n, double alpha, double x);

// exp(-x/2) * L_n^{(alpha)}(x), with overflow-safe scaling for large n and x.
double laguerre_weighted(int n, double alpha, double x);

// Bessel J_alpha(s) for alpha in {-1/2, 1/2, 1, 2}.
double bessel_j(double alpha, double s);
// Bessel Y_alpha(s) for the same orders, s > 0.
double bessel_y(double alpha, double s);
// Envelope in the DLMF sense: sqrt(2)|J| below the first crossing of J and Y,
// the modulus sqrt(J^2 + Y^2) above it.
double bessel_env(double alpha, double s);

struct AiryValue {
  double ai;
  double ai_prime;
  double bi;
  double env;  // sqrt(Ai^2 + Bi^2) left of the Ai = Bi crossing, Ai to the right
};

AiryValue airy(double s);

// eta(t) = (t sqrt(1-t^2) + arcsin t)/2 on [-1,1], analytically continued for t > 1.
std::complex<double> eta(double t);
// Inverse of eta restricted to [-1,1]; u must lie in [-pi/4, pi/4].
double eta_inverse(double u);

double xi(double x);
double zeta(double x);
double omega_K(int K, double t);
double f0_coefficient(double x);

}  // namespace landau_ee
