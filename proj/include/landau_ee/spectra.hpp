#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "landau_ee/geometry.hpp"
#include "landau_ee/landau_kernel.hpp"
#include "landau_ee/quadrature.hpp"

namespace landau_ee {

enum class KernelId { LandauP, Hermite, Sine, Hat, Free, Generic };

std::string kernel_name(KernelId k);

struct Provenance {
  KernelId kernel = KernelId::Generic;
  std::string domain;
  int K = 0;
};

// Weighted kernel matrix sqrt(w_i w_j) k(x_i, x_j). Complex storage is used
// only for the magnetic kernel.
struct RestrictedOperator {
  bool is_complex = false;
  Eigen::MatrixXd real_matrix;
  Eigen::MatrixXcd complex_matrix;
  std::vector<double> weights;
  Provenance provenance;

  std::size_t size() const { return weights.size(); }
  bool is_projection_restriction() const { return provenance.kernel != KernelId::Generic; }
  static RestrictedOperator from_matrix(Eigen::MatrixXd m);
};

struct SpectraOptions {
  std::size_t max_dim = 6000;
  int threads = 1;
};

RestrictedOperator nystrom_restrict(KernelId kernel, const LandauParams& p, const std::vector<QuadNode>& grid,
                                    const std::string& domain_id = "grid", const SpectraOptions& opt = {});
RestrictedOperator nystrom_restrict(KernelId kernel, const LandauParams& p, const Rule1D& grid,
                                    const std::string& domain_id = "interval", const SpectraOptions& opt = {});

// Descending eigenvalues. For projection restrictions the values are checked
// against [-tol, 1 + tol] and clipped to [0, 1].
std::vector<double> eigenvalues(const RestrictedOperator& op, double tol = 1e-6);

// f(t) = sum_m c_m t (1-t)^m + c_0 t.
class TestPolynomial {
 public:
  std::map<int, double> basis_coeffs;
  double linear_coeff = 0.0;

  static TestPolynomial basis(int m);
  static TestPolynomial linear(double c = 1.0);
  // a[k] multiplies t^k; a[0] must vanish.
  static TestPolynomial from_monomial(const std::vector<double>& a);

  std::vector<double> to_monomial() const;
  double operator()(double t) const;
  bool vanishes_at_one() const { return linear_coeff == 0.0; }
  int degree() const;
  // t -> f(1 - t); requires f(1) = 0.
  TestPolynomial reflected() const;
  std::string id() const;

  TestPolynomial operator+(const TestPolynomial& o) const;
  TestPolynomial operator*(double s) const;
};

double trace_f(const RestrictedOperator& op, const TestPolynomial& f, double tol = 1e-6);
// sum_k a_k tr(A^k) from the monomial expansion, no eigensolve.
double trace_f_moments(const RestrictedOperator& op, const TestPolynomial& f);
// tr f(A) for the magnetic kernel on a 2D grid and deg f <= 2, without forming
// the matrix: only |P_K(x, y)|^2 = G_K^2 enters.
double landau_trace_quadratic_matrix_free(const LandauParams& p, const std::vector<QuadNode>& grid,
                                          const TestPolynomial& f, int threads = 1);

// tr 1_E P_K 1_{E^c} P_K 1_E by one-dimensional quadrature of |G_K(s/sqrt 8)|^2 F(s).
double fluctuation_trace_fast(const LandauParams& p, const Domain& d, int threads = 1);

// M_ij(p) = int_p^inf psi_i psi_j, i, j < K.
Eigen::MatrixXd overlap_matrix(const LandauParams& p, double pval);

struct MkOptions {
  int p_nodes = 0;    // trapezoid intervals on (0, P); 0 selects max(8K, 64)
  bool fold = true;   // integrate (0, P) of f + f(1 - .) instead of (-P, P) of f
  int threads = 1;
  int max_K = 256;
};

double mk_coefficient(const LandauParams& p, const TestPolynomial& f, const MkOptions& opt = {});

// J_m([0,1) x R^-, R x R^+; K) through its half-line Hermite representation.
double jm_halfplane(const LandauParams& p, int m, const MkOptions& opt = {});
// J_1 of the same pair from the radial profile of G_K.
double jm1_halfplane_radial(const LandauParams& p);

struct StripNystromOptions {
  double h = 0.25;
  double depth = std::numeric_limits<double>::quiet_NaN();  // NaN selects max(4K, 40)
  std::size_t max_dim = 6000;
  int threads = 1;
};

// J_m([x0, x0 + a) x (-c, 0), R x R^+; K) by 2D Nystrom, the half-plane
// truncated to [x0 - depth, x0 + a + depth] x [0, depth).
double jm_direct_strip(const LandauParams& p, double x0, double a, double c, int m,
                       const StripNystromOptions& opt = {});

struct WidomOptions {
  double complement_cutoff = std::numeric_limits<double>::infinity();
  double nodes_per_unit = 8.0;
  std::size_t max_dim = 2000;
};

// tr (1_I T 1_{I^c} T 1_I)^m, I = (0, lambda).
double landau_widom_trace(double lambda, int m, const WidomOptions& opt = {});

enum class WindowPolicy { Theorem, DeskScale };

struct SineWindow {
  double epsilon;
  double lower;        // (2K-1) eta(-1/2)
  double upper;        // (2K-1) eta(1 - eps)
  double min_gap = 0.5;
  double max_gap;      // K eps^6, or max(K eps^6, sqrt K) for the desk window
  bool empty() const { return !(max_gap >= min_gap) || upper - lower <= min_gap; }
};

SineWindow sine_window(const LandauParams& p, WindowPolicy policy);

struct SineReport {
  int K;
  double epsilon;
  int samples;
  int admissible;
  double max_scaled_residual;
  double fitted_C;
  bool empty;
  SineWindow window;
};

SineReport sine_window_check(const LandauParams& p, int samples, std::uint64_t seed = 1,
                             WindowPolicy policy = WindowPolicy::Theorem);

// Interval pair (I_p, J_p) in original coordinates; empty intervals have lo >= hi.
struct IntervalPair {
  double i_lo, i_hi, j_lo, j_hi;
  bool empty() const { return !(i_hi > i_lo) || !(j_hi > j_lo); }
};
IntervalPair window_intervals(const LandauParams& p, double pval, WindowPolicy policy);

struct EkReport {
  double value;           // by overlap and interval Gram matrices
  double value_direct;    // mk route minus a direct 2D kernel quadrature
  double full_term;       // (1/sqrt K) M(t(1-t))
  double interval_term;
};

EkReport ek_diagnostic(const LandauParams& p, WindowPolicy policy = WindowPolicy::DeskScale, int max_K = 128);

// ||1_E (P_K - P_inf) 1_E||_2^2 on a 2D grid.
double hs_distance_landau_free(const LandauParams& p, const std::vector<QuadNode>& grid, int threads = 1);

}  // namespace landau_ee
