#include "landau_ee/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>

#include "landau_ee/errors.hpp"
#include "landau_ee/parallel.hpp"

namespace landau_ee {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kSqrt8 = std::sqrt(8.0);

void check_dim(std::size_t n, std::size_t cap, const char* what) {
  if (n == 0) throw DomainError(std::string(what) + ": empty grid");
  if (n > cap) {
    std::ostringstream os;
    os << what << ": dimension " << n << " exceeds cap " << cap;
    throw ResourceError(os.str());
  }
}

// Clipped descending spectrum of a real symmetric matrix (lower triangle read).
std::vector<double> sym_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + m.rows());
  for (double& v : ev) v = std::clamp(v, 0.0, 1.0);
  return ev;
}

// Values and psi_{K-1}, psi_K at a set of points, for the Christoffel-Darboux form.
struct PsiPair {
  std::vector<double> km1, k;
};

PsiPair psi_pair(int K, const std::vector<double>& x) {
  PsiPair out{std::vector<double>(x.size()), std::vector<double>(x.size())};
  std::vector<double> buf(static_cast<std::size_t>(K) + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    hermite_psi_all(x[i], buf);
    out.km1[i] = buf[K - 1];
    out.k[i] = buf[K];
  }
  return out;
}

Eigen::MatrixXd psi_table(int K, const std::vector<double>& x) {
  Eigen::MatrixXd t(K, static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    hermite_psi_all(x[i], std::span<double>(t.col(static_cast<Eigen::Index>(i)).data(), K));
  return t;
}

template <class Matrix>
double trace_power_sum(const Matrix& a, const std::vector<double>& mono) {
  double total = 0.0;
  Matrix pw = a;
  for (std::size_t k = 1; k < mono.size(); ++k) {
    if (k > 1) pw = pw * a;
    if (mono[k] != 0.0) total += mono[k] * std::real(pw.trace());
  }
  return total;
}

long double binomial(int n, int k) {
  long double r = 1.0L;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::string kernel_name(KernelId k) {
  switch (k) {
    case KernelId::LandauP: return "P_K";
    case KernelId::Hermite: return "hermite";
    case KernelId::Sine: return "sine";
    case KernelId::Hat: return "hat";
    case KernelId::Free: return "P_inf";
    case KernelId::Generic: return "generic";
  }
  return "unknown";
}

RestrictedOperator RestrictedOperator::from_matrix(Eigen::MatrixXd m) {
  if (m.rows() != m.cols()) throw DomainError("from_matrix: matrix must be square");
  RestrictedOperator op;
  op.weights.assign(static_cast<std::size_t>(m.rows()), 1.0);
  op.real_matrix = 0.5 * (m + m.transpose());
  return op;
}

RestrictedOperator nystrom_restrict(KernelId kernel, const LandauParams& p, const std::vector<QuadNode>& grid,
                                    const std::string& domain_id, const SpectraOptions& opt) {
  if (kernel != KernelId::LandauP && kernel != KernelId::Free)
    throw DomainError("nystrom_restrict: planar grids take P_K or P_inf");
  check_dim(grid.size(), opt.max_dim, "nystrom_restrict");
  const auto n = static_cast<Eigen::Index>(grid.size());
  RestrictedOperator op;
  op.provenance = {kernel, domain_id, p.K};
  op.weights.reserve(grid.size());
  for (const auto& q : grid) op.weights.push_back(q.w);
  if (kernel == KernelId::LandauP) {
    op.is_complex = true;
    op.complex_matrix.resize(n, n);
    parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j <= i; ++j) {
        const double s = std::sqrt(grid[i].w * grid[j].w);
        op.complex_matrix(ii, static_cast<Eigen::Index>(j)) = s * p_K(p, grid[i].x, grid[j].x);
      }
    });
    for (Eigen::Index i = 0; i < n; ++i) {
      op.complex_matrix(i, i) = op.complex_matrix(i, i).real();
      for (Eigen::Index j = 0; j < i; ++j) op.complex_matrix(j, i) = std::conj(op.complex_matrix(i, j));
    }
  } else {
    op.real_matrix.resize(n, n);
    parallel_for(grid.size(), opt.threads, [&](std::size_t i) {
      const auto ii = static_cast<Eigen::Index>(i);
      for (std::size_t j = 0; j <= i; ++j)
        op.real_matrix(ii, static_cast<Eigen::Index>(j)) =
            std::sqrt(grid[i].w * grid[j].w) * p_infinity(grid[i].x, grid[j].x);
    });
    op.real_matrix.triangularView<Eigen::StrictlyUpper>() = op.real_matrix.transpose();
  }
  return op;
}

RestrictedOperator nystrom_restrict(KernelId kernel, const LandauParams& p, const Rule1D& grid,
                                    const std::string& domain_id, const SpectraOptions& opt) {
  if (kernel != KernelId::Hermite && kernel != KernelId::Sine && kernel != KernelId::Hat)
    throw DomainError("nystrom_restrict: line grids take the Hermite, sine or rescaled kernel");
  check_dim(grid.nodes.size(), opt.max_dim, "nystrom_restrict");
  const std::size_t N = grid.nodes.size();
  RestrictedOperator op;
  op.provenance = {kernel, domain_id, p.K};
  op.weights = grid.weights;
  op.real_matrix.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));

  std::vector<double> x = grid.nodes, jac(N, 1.0);
  if (kernel == KernelId::Hat) {
    const double lambda = 2.0 * p.K - 1.0;
    const double edge = lambda * 0.25 * kPi;
    for (std::size_t i = 0; i < N; ++i) {
      if (!(std::abs(grid.nodes[i]) < edge)) throw DomainError("nystrom_restrict: node outside rescaled range");
      x[i] = eta_scaled_inverse(lambda, grid.nodes[i]);
      jac[i] = 1.0 / std::sqrt(lambda - x[i] * x[i]);
    }
  }
  PsiPair psi;
  if (kernel != KernelId::Sine) psi = psi_pair(p.K, x);

  parallel_for(N, opt.threads, [&](std::size_t i) {
    const auto ii = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j <= i; ++j) {
      double k;
      if (kernel == KernelId::Sine) {
        k = sine_kernel(grid.nodes[i], grid.nodes[j]);
      } else {
        k = std::sqrt(jac[i] * jac[j]) *
            hermite_kernel_cd(p.K, x[i], x[j], psi.km1[i], psi.k[i], psi.km1[j], psi.k[j]);
      }
      op.real_matrix(ii, static_cast<Eigen::Index>(j)) = std::sqrt(grid.weights[i] * grid.weights[j]) * k;
    }
  });
  op.real_matrix.triangularView<Eigen::StrictlyUpper>() = op.real_matrix.transpose();
  return op;
}

std::vector<double> eigenvalues(const RestrictedOperator& op, double tol) {
  std::vector<double> ev;
  if (op.is_complex) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.complex_matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed");
    ev.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.real_matrix, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
    ev.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  std::sort(ev.begin(), ev.end(), std::greater<>());
  if (op.is_projection_restriction()) {
    for (double& v : ev) {
      if (v < -tol || v > 1.0 + tol) {
        std::ostringstream os;
        os.precision(17);
        os << "eigenvalue " << v << " of a projection restriction lies outside [-tol, 1 + tol]";
        throw ConvergenceError(os.str());
      }
      v = std::clamp(v, 0.0, 1.0);
    }
  }
  return ev;
}

TestPolynomial TestPolynomial::basis(int m) {
  if (m < 1) throw DomainError("TestPolynomial::basis: m must be positive");
  TestPolynomial f;
  f.basis_coeffs[m] = 1.0;
  return f;
}

TestPolynomial TestPolynomial::linear(double c) {
  TestPolynomial f;
  f.linear_coeff = c;
  return f;
}

// t(1-t)^m has monomial coefficients (-1)^j C(m, j) at t^{j+1}. The basis is
// triangular in the degree, so peel off the top coefficient repeatedly.
TestPolynomial TestPolynomial::from_monomial(const std::vector<double>& a) {
  if (!a.empty() && a[0] != 0.0) throw DomainError("TestPolynomial: constant term must vanish");
  std::vector<long double> rest(a.begin(), a.end());
  TestPolynomial f;
  for (int d = static_cast<int>(rest.size()) - 1; d >= 2; --d) {
    const int m = d - 1;
    const long double lead = rest[d];
    if (lead == 0.0L) continue;
    // t(1-t)^m leads with (-1)^m t^{m+1}
    const long double c = (m % 2 == 0) ? lead : -lead;
    f.basis_coeffs[m] = static_cast<double>(c);
    for (int j = 0; j <= m; ++j) rest[j + 1] -= c * ((j % 2 == 0) ? 1.0L : -1.0L) * binomial(m, j);
  }
  if (rest.size() > 1) f.linear_coeff = static_cast<double>(rest[1]);
  return f;
}

std::vector<double> TestPolynomial::to_monomial() const {
  std::vector<long double> a(static_cast<std::size_t>(std::max(degree(), 1)) + 1, 0.0L);
  a[1] += linear_coeff;
  for (const auto& [m, c] : basis_coeffs)
    for (int j = 0; j <= m; ++j) a[j + 1] += c * ((j % 2 == 0) ? 1.0L : -1.0L) * binomial(m, j);
  return std::vector<double>(a.begin(), a.end());
}

double TestPolynomial::operator()(double t) const {
  double v = linear_coeff * t;
  for (const auto& [m, c] : basis_coeffs) v += c * t * std::pow(1.0 - t, m);
  return v;
}

int TestPolynomial::degree() const {
  int d = linear_coeff != 0.0 ? 1 : 0;
  for (const auto& [m, c] : basis_coeffs)
    if (c != 0.0) d = std::max(d, m + 1);
  return d;
}

TestPolynomial TestPolynomial::reflected() const {
  if (!vanishes_at_one()) throw DomainError("TestPolynomial::reflected: f(1) must vanish");
  // g(t) = f(1-t) = sum_k a_k (1-t)^k
  const std::vector<double> a = to_monomial();
  std::vector<double> g(a.size(), 0.0);
  for (std::size_t k = 1; k < a.size(); ++k)
    for (std::size_t j = 0; j <= k; ++j)
      g[j] += a[k] * static_cast<double>(binomial(static_cast<int>(k), static_cast<int>(j))) *
              ((j % 2 == 0) ? 1.0 : -1.0);
  g[0] = 0.0;
  return from_monomial(g);
}

std::string TestPolynomial::id() const {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  if (linear_coeff != 0.0) {
    os << linear_coeff << "*t";
    first = false;
  }
  for (const auto& [m, c] : basis_coeffs) {
    if (c == 0.0) continue;
    if (!first) os << '+';
    first = false;
    if (c != 1.0) os << c << '*';
    os << "t(1-t)^" << m;
  }
  return first ? "0" : os.str();
}

TestPolynomial TestPolynomial::operator+(const TestPolynomial& o) const {
  TestPolynomial r = *this;
  r.linear_coeff += o.linear_coeff;
  for (const auto& [m, c] : o.basis_coeffs) r.basis_coeffs[m] += c;
  return r;
}

TestPolynomial TestPolynomial::operator*(double s) const {
  TestPolynomial r = *this;
  r.linear_coeff *= s;
  for (auto& kv : r.basis_coeffs) kv.second *= s;
  return r;
}

double trace_f(const RestrictedOperator& op, const TestPolynomial& f, double tol) {
  if (!op.is_projection_restriction()) throw DomainError("trace_f: needs a projection-kernel restriction");
  const auto ev = eigenvalues(op, tol);
  std::vector<double> vals;
  vals.reserve(ev.size());
  for (double v : ev) vals.push_back(f(v));
  return pairwise_sum(vals);
}

double trace_f_moments(const RestrictedOperator& op, const TestPolynomial& f) {
  const auto mono = f.to_monomial();
  return op.is_complex ? trace_power_sum(op.complex_matrix, mono) : trace_power_sum(op.real_matrix, mono);
}

double landau_trace_quadratic_matrix_free(const LandauParams& p, const std::vector<QuadNode>& grid,
                                          const TestPolynomial& f, int threads) {
  if (f.degree() > 2) throw DomainError("landau_trace_quadratic_matrix_free: degree above 2");
  const auto a = f.to_monomial();
  const double a1 = a.size() > 1 ? a[1] : 0.0;
  const double a2 = a.size() > 2 ? a[2] : 0.0;
  const std::size_t n = grid.size();
  const double g0 = g_K_exact(p, 0.0);
  std::vector<double> w(n), row(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) w[i] = grid[i].w;
  const double tr1 = g0 * pairwise_sum(w);
  if (a2 != 0.0) {
    parallel_for(n, threads, [&](std::size_t i) {
      double acc = 0.5 * w[i] * g0 * g0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double r = std::hypot(grid[i].x.x - grid[j].x.x, grid[i].x.y - grid[j].x.y);
        const double g = g_K_exact(p, r / kSqrt8);
        acc += w[j] * g * g;
      }
      row[i] = 2.0 * w[i] * acc;
    });
  }
  return a1 * tr1 + a2 * pairwise_sum(row);
}

double fluctuation_trace_fast(const LandauParams& p, const Domain& d, int threads) {
  if (!d.bounded()) throw DomainError("fluctuation_trace_fast: domain must be bounded");
  const double s_max = std::max(4.0 * p.K, 4.0 * diameter(d));
  const auto panels = static_cast<std::size_t>(std::ceil(s_max));
  const double width = s_max / static_cast<double>(panels);
  std::vector<double> part(panels, 0.0);
  parallel_for(panels, threads, [&](std::size_t k) {
    const auto integrand = [&](double s) {
      const double g = g_K_exact(p, s / kSqrt8);
      return g == 0.0 ? 0.0 : g * g * boundary_overlap_F(d, s);
    };
    part[k] = integrate_adaptive(integrand, k * width, (k + 1) * width, 1e-16, 1e-11, 24).value;
  });
  // Beyond the diameter F(s) = 2 pi s |L Lambda|, so the tail is closed form.
  const double tail = 16.0 * kPi * area(d) * gk_tail_integral(p, s_max / kSqrt8);
  return pairwise_sum(part) + tail;
}

namespace {

double overlap_upper(int K) { return std::sqrt(2.0 * K + 1.0) + 10.0; }

// Adds sum_q w_q psi(x_q) psi(x_q)^T over a composite rule on [a, b] to the lower triangle of m.
void accumulate_gram(Eigen::MatrixXd& m, int K, double a, double b, double max_width, int order) {
  if (!(b > a)) return;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
  const Rule1D r = composite_gauss_legendre(a, b, panels, order);
  const Eigen::MatrixXd tab = psi_table(K, r.nodes);
  Eigen::MatrixXd scaled = tab;
  for (Eigen::Index q = 0; q < tab.cols(); ++q) scaled.col(q) *= r.weights[static_cast<std::size_t>(q)];
  m.triangularView<Eigen::Lower>() += scaled * tab.transpose();
}

Eigen::MatrixXd full_symmetric(Eigen::MatrixXd m) {
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
  return m;
}

}  // namespace

Eigen::MatrixXd overlap_matrix(const LandauParams& p, double pval) {
  if (!std::isfinite(pval)) throw DomainError("overlap_matrix: p must be finite");
  const double S = overlap_upper(p.K);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p.K, p.K);
  accumulate_gram(m, p.K, std::max(pval, -S), S, 0.25, 16);
  return full_symmetric(std::move(m));
}

double mk_coefficient(const LandauParams& p, const TestPolynomial& f, const MkOptions& opt) {
  if (!f.vanishes_at_one()) throw DomainError("mk_coefficient: f(1) must vanish");
  if (p.K > opt.max_K) throw ResourceError("mk_coefficient: K above the configured cap");
  const int K = p.K;
  const double P = 1.5 * std::sqrt(2.0 * K + 1.0);
  const int half = opt.p_nodes > 0 ? opt.p_nodes : std::max(8 * K, 64);
  const int intervals = opt.fold ? half : 2 * half;
  const double lo = opt.fold ? 0.0 : -P;
  const double dp = (P - lo) / intervals;
  const auto nodes = static_cast<std::size_t>(intervals) + 1;
  const auto node = [&](std::size_t j) { return j + 1 == nodes ? P : lo + dp * static_cast<double>(j); };

  std::vector<double> h(nodes, 0.0);
  // Fixed chunking keeps the result independent of the thread count.
  const std::size_t chunks = std::min<std::size_t>(16, nodes);
  parallel_for(chunks, opt.threads, [&](std::size_t c) {
    const std::size_t jlo = nodes * c / chunks, jhi = nodes * (c + 1) / chunks;
    if (jlo >= jhi) return;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(K, K);
    accumulate_gram(m, K, std::max(node(jhi - 1), -overlap_upper(K)), overlap_upper(K), 0.25, 16);
    for (std::size_t j = jhi; j-- > jlo;) {
      if (j + 1 < jhi) accumulate_gram(m, K, node(j), node(j + 1), 0.25, 8);
      const auto mu = sym_eigenvalues(m);
      double acc = 0.0;
      for (double v : mu) acc += opt.fold ? f(v) + f(1.0 - v) : f(v);
      h[j] = acc;
    }
  });
  h.front() *= 0.5;
  h.back() *= 0.5;
  return dp * pairwise_sum(h) / (2.0 * kPi);
}

double jm_halfplane(const LandauParams& p, int m, const MkOptions& opt) {
  if (m < 1 || m > 5) throw DomainError("jm_halfplane: m must lie in [1, 5]");
  return mk_coefficient(p, TestPolynomial::basis(m), opt) / std::sqrt(static_cast<double>(p.K));
}

double jm1_halfplane_radial(const LandauParams& p) {
  // int_0^inf 2 r^2 G_K(r/sqrt8)^2 dr with r = sqrt8 t
  const double t_max = 2.5 * p.K + 40.0;
  const auto panels = static_cast<std::size_t>(std::ceil(t_max / 0.5));
  std::vector<double> part(panels);
  for (std::size_t k = 0; k < panels; ++k) {
    part[k] = integrate_adaptive(
                  [&](double t) {
                    const double g = g_K_exact(p, t);
                    return t * t * g * g;
                  },
                  0.5 * k, 0.5 * (k + 1), 1e-18, 1e-12, 24)
                  .value;
  }
  return 16.0 * kSqrt8 * pairwise_sum(part);
}

double jm_direct_strip(const LandauParams& p, double x0, double a, double c, int m,
                       const StripNystromOptions& opt) {
  if (m < 1 || m > 5) throw DomainError("jm_direct_strip: m must lie in [1, 5]");
  if (!(a > 0.0 && c > 0.0 && opt.h > 0.0)) throw DomainError("jm_direct_strip: a, c, h must be positive");
  const double depth = std::isnan(opt.depth) ? std::max(4.0 * p.K, 40.0) : opt.depth;
  const double h = opt.h;
  const auto cells = [h](double len) { return std::max(1, static_cast<int>(std::llround(len / h))); };

  std::vector<Point2> e, ep;
  const int ex = cells(a), ey = cells(c);
  const double hx = a / ex, hy = c / ey;
  for (int i = 0; i < ey; ++i)
    for (int j = 0; j < ex; ++j) e.push_back({x0 + (j + 0.5) * hx, -c + (i + 0.5) * hy});
  const double we = hx * hy;
  const int px = cells(a + 2.0 * depth), py = cells(depth);
  const double gx = (a + 2.0 * depth) / px, gy = depth / py;
  for (int i = 0; i < py; ++i)
    for (int j = 0; j < px; ++j) ep.push_back({x0 - depth + (j + 0.5) * gx, (i + 0.5) * gy});
  const double wp = gx * gy;

  if (m == 1) {
    std::vector<double> row(e.size());
    parallel_for(e.size(), opt.threads, [&](std::size_t i) {
      std::vector<double> terms(ep.size());
      for (std::size_t j = 0; j < ep.size(); ++j) {
        const double g = g_K_exact(p, std::hypot(e[i].x - ep[j].x, e[i].y - ep[j].y) / kSqrt8);
        terms[j] = g * g;
      }
      row[i] = we * wp * pairwise_sum(terms);
    });
    return pairwise_sum(row);
  }

  check_dim(ep.size(), opt.max_dim, "jm_direct_strip");
  const auto ne = static_cast<Eigen::Index>(e.size()), np = static_cast<Eigen::Index>(ep.size());
  Eigen::MatrixXcd B(ne, np), C(np, np);
  const double sb = std::sqrt(we * wp);
  parallel_for(e.size(), opt.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < ep.size(); ++j)
      B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sb * p_K(p, e[i], ep[j]);
  });
  parallel_for(ep.size(), opt.threads, [&](std::size_t i) {
    for (std::size_t j = 0; j <= i; ++j)
      C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = wp * p_K(p, ep[i], ep[j]);
  });
  for (Eigen::Index i = 0; i < np; ++i)
    for (Eigen::Index j = 0; j < i; ++j) C(j, i) = std::conj(C(i, j));
  Eigen::MatrixXcd X = B;
  for (int k = 1; k < m; ++k) X = X * C;
  return (X * B.adjoint()).trace().real();
}

double landau_widom_trace(double lambda, int m, const WidomOptions& opt) {
  if (!(lambda > 0.0) || m < 1) throw DomainError("landau_widom_trace: need lambda > 0 and m >= 1");
  constexpr int kOrder = 16;
  const auto rule_on = [&](double a, double b) {
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) * opt.nodes_per_unit / kOrder)));
    return composite_gauss_legendre(a, b, panels, kOrder);
  };
  const Rule1D inner = rule_on(0.0, lambda);
  check_dim(inner.nodes.size(), opt.max_dim, "landau_widom_trace");
  const LandauParams unused(1);
  const auto A = nystrom_restrict(KernelId::Sine, unused, inner, "interval");

  if (std::isinf(opt.complement_cutoff)) {
    // 1_I T 1_{I^c} T 1_I = A - A^2 on the range of 1_I
    const auto mu = sym_eigenvalues(A.real_matrix);
    std::vector<double> terms;
    for (double v : mu) terms.push_back(std::pow(v * (1.0 - v), m));
    return pairwise_sum(terms);
  }

  const double cut = opt.complement_cutoff;
  Rule1D outer = rule_on(-cut, 0.0);
  const Rule1D right = rule_on(lambda, lambda + cut);
  outer.nodes.insert(outer.nodes.end(), right.nodes.begin(), right.nodes.end());
  outer.weights.insert(outer.weights.end(), right.weights.begin(), right.weights.end());
  check_dim(outer.nodes.size(), opt.max_dim, "landau_widom_trace");
  const auto ni = static_cast<Eigen::Index>(inner.nodes.size());
  const auto no = static_cast<Eigen::Index>(outer.nodes.size());
  Eigen::MatrixXd B(ni, no);
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < no; ++j)
      B(i, j) = std::sqrt(inner.weights[i] * outer.weights[j]) * sine_kernel(inner.nodes[i], outer.nodes[j]);
  Eigen::MatrixXd S = B * B.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("landau_widom_trace: eigensolver failed");
  std::vector<double> terms;
  for (Eigen::Index i = 0; i < ni; ++i) terms.push_back(std::pow(std::max(0.0, es.eigenvalues()(i)), m));
  return pairwise_sum(terms);
}

SineWindow sine_window(const LandauParams& p, WindowPolicy policy) {
  const double K = p.K;
  const double lambda = 2.0 * K - 1.0;
  SineWindow w;
  w.epsilon = 1.0 / std::log(K);
  w.lower = lambda * eta(-0.5).real();
  w.upper = lambda * eta(1.0 - w.epsilon).real();
  const double theorem_cap = K * std::pow(w.epsilon, 6);
  w.max_gap = policy == WindowPolicy::Theorem ? theorem_cap : std::max(theorem_cap, std::sqrt(K));
  return w;
}

SineReport sine_window_check(const LandauParams& p, int samples, std::uint64_t seed, WindowPolicy policy) {
  if (p.K < 100) throw DomainError("sine_window_check: K must be at least 100");
  if (samples < 0) throw DomainError("sine_window_check: negative sample count");
  SineReport rep{p.K, 0.0, samples, 0, 0.0, 0.0, false, sine_window(p, policy)};
  const SineWindow& w = rep.window;
  rep.epsilon = w.epsilon;
  rep.empty = w.empty() || samples == 0;
  if (rep.empty) return rep;

  // Uniform on {lower < s < t < upper, min_gap <= t - s <= max_gap}: the gap d
  // has density proportional to (W - d), then s is uniform given d.
  const double W = w.upper - w.lower;
  const double d0 = w.min_gap, d1 = std::min(w.max_gap, W);
  const double mass = (W - d0) * (W - d0) - (W - d1) * (W - d1);
  std::mt19937_64 rng(seed);
  const auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<double> resid(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double u = unit();
    const double d = W - std::sqrt((W - d0) * (W - d0) - u * mass);
    const double s = w.lower + unit() * (W - d);
    const double t = s + d;
    resid[static_cast<std::size_t>(k)] = std::abs(hat_kernel(p, s, t) - sine_kernel(s, t)) * d / w.epsilon;
  }
  rep.admissible = samples;
  rep.max_scaled_residual = *std::max_element(resid.begin(), resid.end());
  rep.fitted_C = rep.max_scaled_residual;
  return rep;
}

IntervalPair window_intervals(const LandauParams& p, double pval, WindowPolicy policy) {
  const double lambda = 2.0 * p.K - 1.0;
  const SineWindow w = sine_window(p, policy);
  IntervalPair ip{0.0, 0.0, 0.0, 0.0};
  if (!(pval > 0.0) || pval > (1.0 - 2.0 * w.epsilon) * std::sqrt(lambda)) return ip;
  const double half = 0.5 * w.max_gap;
  if (!(half > w.min_gap)) return ip;
  const double centre = eta_scaled(lambda, pval);
  const double edge = lambda * 0.25 * kPi * (1.0 - 1e-12);
  const auto back = [&](double u) { return eta_scaled_inverse(lambda, std::clamp(u, -edge, edge)); };
  ip.i_lo = back(centre - half);
  ip.i_hi = back(centre - w.min_gap);
  ip.j_lo = back(centre);
  ip.j_hi = back(centre + half);
  return ip;
}

EkReport ek_diagnostic(const LandauParams& p, WindowPolicy policy, int max_K) {
  if (p.K > max_K) throw ResourceError("ek_diagnostic: K above the configured cap");
  const int K = p.K;
  const double rootK = std::sqrt(static_cast<double>(K));
  const double lambda = 2.0 * K - 1.0;
  const double eps = 1.0 / std::log(static_cast<double>(K));
  const double p_int = std::max(0.0, (1.0 - 2.0 * eps) * std::sqrt(lambda));
  const double P = 1.5 * std::sqrt(2.0 * K + 1.0);

  EkReport rep{};
  rep.full_term = mk_coefficient(p, TestPolynomial::basis(1)) / rootK;

  // Full term by Gauss-Legendre in p of tr(M - M^2).
  const Rule1D pf = composite_gauss_legendre(0.0, P, std::max(4, K / 2), 12);
  std::vector<double> full(pf.nodes.size());
  for (std::size_t q = 0; q < pf.nodes.size(); ++q) {
    const Eigen::MatrixXd m = overlap_matrix(p, pf.nodes[q]);
    full[q] = pf.weights[q] * (m.trace() - m.cwiseProduct(m).sum());
  }
  const double full_gl = pairwise_sum(full) / (kPi * rootK);

  // Interval term two ways: Gram matrices tr(G_I G_J), and a direct double
  // quadrature of the squared kernel.
  double gram = 0.0, direct = 0.0;
  if (p_int > 0.0) {
    const Rule1D pr = composite_gauss_legendre(0.0, p_int, std::max(4, K / 2), 12);
    std::vector<double> g_terms(pr.nodes.size()), d_terms(pr.nodes.size());
    for (std::size_t q = 0; q < pr.nodes.size(); ++q) {
      const IntervalPair ip = window_intervals(p, pr.nodes[q], policy);
      if (ip.empty()) continue;
      Eigen::MatrixXd gi = Eigen::MatrixXd::Zero(K, K), gj = Eigen::MatrixXd::Zero(K, K);
      accumulate_gram(gi, K, ip.i_lo, ip.i_hi, 0.1, 12);
      accumulate_gram(gj, K, ip.j_lo, ip.j_hi, 0.1, 12);
      g_terms[q] = pr.weights[q] * full_symmetric(gi).cwiseProduct(full_symmetric(gj)).sum();

      const auto rule = [](double a, double b) {
        return composite_gauss_legendre(a, b, std::max(1, static_cast<int>(std::ceil((b - a) / 0.08))), 10);
      };
      const Rule1D ri = rule(ip.i_lo, ip.i_hi), rj = rule(ip.j_lo, ip.j_hi);
      const PsiPair si = psi_pair(K, ri.nodes), sj = psi_pair(K, rj.nodes);
      std::vector<double> row(ri.nodes.size());
      for (std::size_t a = 0; a < ri.nodes.size(); ++a) {
        double acc = 0.0;
        for (std::size_t b = 0; b < rj.nodes.size(); ++b) {
          const double k = hermite_kernel_cd(K, ri.nodes[a], rj.nodes[b], si.km1[a], si.k[a], sj.km1[b], sj.k[b]);
          acc += rj.weights[b] * k * k;
        }
        row[a] = ri.weights[a] * acc;
      }
      d_terms[q] = pr.weights[q] * pairwise_sum(row);
    }
    gram = pairwise_sum(g_terms) / (kPi * rootK);
    direct = pairwise_sum(d_terms) / (kPi * rootK);
  }
  rep.interval_term = gram;
  rep.value = full_gl - gram;
  rep.value_direct = rep.full_term - direct;
  return rep;
}

double hs_distance_landau_free(const LandauParams& p, const std::vector<QuadNode>& grid, int threads) {
  const std::size_t n = grid.size();
  std::vector<double> row(n);
  parallel_for(n, threads, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::norm(p_K(p, grid[i].x, grid[j].x) - p_infinity(grid[i].x, grid[j].x));
      acc += grid[j].w * d;
    }
    row[i] = grid[i].w * acc;
  });
  return pairwise_sum(row);
}

}  // namespace landau_ee
