#pragma once

// Fundamental martingales of the odd/even fractional Brownian parts, built
// two independent ways: exact Gaussian projection of the dual-index field
// onto the grid-observed past, and discretized stochastic integrals against
// closed-form kernels.  A deterministic audit checks the martingale
// property, the variance scaling, and increment orthogonality.

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fbfield/gaussfield.hpp"
#include "fbfield/kernels.hpp"
#include "fbfield/specfun.hpp"

namespace fbfield {

enum class MartMethod { projection, stieltjes };

struct MartingaleSpec {
  Hurst h;
  Parity parity = Parity::odd;
  std::vector<double> grid;  // strictly increasing, all > 0
  MartMethod method = MartMethod::projection;

  // Throws std::invalid_argument on an invalid grid, or for method
  // stieltjes with parity even and h > 1/2 (the kernel's boundary term
  // diverges there; the projection route is authoritative).
  void validate() const;
};

// Kernel of the odd-part martingale on 0 <= s < t:
//   (sqrt(pi) coef_alpha(h) / gamma(1 - h)) * (t^2 - s^2)^(1/2 - h).
// Unbounded as s -> t for h > 1/2 (square-integrable).  Throws
// std::domain_error at h = 1/2 (the unit-kernel limit is applied by
// build_martingale directly) and outside 0 <= s < t.
double mart_kernel_odd(Hurst h, double t, double s);

// Inner integral of the even-part kernel: psi(s) = integral over [s, t] of
// (x^2 - s^2)^(1/2 - h) dx, by adaptive quadrature under the substitution
// x = s + (t - s) v.  Extended evenly in s; zero for |s| >= t.
double mart_psi(Hurst h, double t, double s);

// Kernel of the even-part martingale on 0 <= s < t, h < 1/2:
//   -(coef_alpha(h) / gamma(3/2 - h)) * psi'(s),
// the derivative taken by central differences with step fd_step plus one
// Richardson extrapolation.  Throws std::domain_error for h >= 1/2.
double mart_kernel_even(Hurst h, double t, double s, double fd_step);

// Projection weights on a grid: row k solves Gram w = cross over the prefix
// [0..k], where Gram is the parity covariance at index h and cross[i] =
// coef_a(h, 1-h) * grid[i] / 2 is the dual-index cross-covariance.  Solves
// are iteratively refined so the prefix residuals reach roundoff.
struct MartingaleWeights {
  std::vector<double> grid;
  std::vector<double> w;  // packed lower triangle; row k starts at k(k+1)/2
  double cross_coef = 0.0;

  std::size_t size() const { return grid.size(); }
  double weight(std::size_t k, std::size_t i) const {
    return w[k * (k + 1) / 2 + i];
  }
};

// jitter_budget bounds the diagonal jitter allowed when factorizing the
// Gram (0 demands the plain factorization or failure).
MartingaleWeights mart_weights(Hurst h, Parity parity,
                               std::span<const double> grid,
                               double jitter_budget);

// Variance of the projection-route martingale at each grid time:
// Var M(t_k) = w_k . cross over the prefix.
std::vector<double> mart_variances(const MartingaleWeights& weights);

// Builds martingale paths from a driver ensemble of the matching parity
// field sampled on spec.grid.  projection: M(t_k) = w_k . driver values up
// to k.  stieltjes: left-point sums of kernel(s_j, t_k) against driver
// increments from s_0 = 0 (for parity odd with h > 1/2 the final cell is
// evaluated at its midpoint to temper the endpoint singularity).  At
// h = 1/2 both routes reduce to M = driver (unit kernel).
PathEnsemble build_martingale(const MartingaleSpec& spec,
                              const PathEnsemble& driver);

struct AuditOptions {
  double martingale_rel_tol = 1e-10;
  double orth_rel_tol = 1e-10;
  double slope_tol = 0.05;
  // The variance-slope fit uses its own geometric observation grid
  // 2^(-k/32) up to t = 1, evaluated at the dyadic times in [slope_t_min, 1].
  std::size_t slope_grid_size = 256;
  double slope_t_min = 1.0 / 64.0;
};

struct AuditReport {
  double max_rel_martingale = 0.0;  // (a) max |E M(t)M(u) - E M(u)^2| rel
  double slope = 0.0;               // (b) log-log variance slope
  double slope_target = 0.0;        // 2 (1 - h)
  double max_rel_orth = 0.0;        // (c) increment-vs-driver orthogonality
  bool martingale_ok = false;
  bool slope_ok = false;
  bool orth_ok = false;
  bool pass = false;
};

// Deterministic audit (no sampling) of the projection route on spec.grid:
// (a) E M(t)M(u) = E M(u)^2 for grid u <= t, (b) least-squares slope of
// log Var M(t) vs log t equals 2(1 - h), (c) E[(M(t) - M(u)) B(r)] = 0 for
// grid r <= u < t.  spec.method is ignored; the audit is projection-based.
AuditReport martingale_audit(const MartingaleSpec& spec,
                             const AuditOptions& options = {});

}  // namespace fbfield
