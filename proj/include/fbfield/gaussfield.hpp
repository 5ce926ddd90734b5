#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fbfield/kernels.hpp"
#include "fbfield/specfun.hpp"

namespace fbfield {

struct FieldPoint {
  double t;
  Hurst h;
};

inline bool operator==(const FieldPoint& a, const FieldPoint& b) {
  return a.t == b.t && a.h == b.h;
}

struct NotPositiveDefiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Kernel covariance of two field points.  Single-index kernels (fbm and its
// parity parts) require equal Hurst values on both points.
double point_cov(const KernelId& kernel, const FieldPoint& a,
                 const FieldPoint& b);

struct CovMatrix {
  std::vector<FieldPoint> points;
  KernelId kernel;
  std::vector<double> entries;  // row-major, size n*n, symmetric

  std::size_t size() const { return points.size(); }
  double at(std::size_t i, std::size_t j) const {
    return entries[i * points.size() + j];
  }
};

// Gram matrix of the kernel over the given points.  Parity kernels reject
// negative times; field_parity accepts only equal-parity pairs here (the
// mixed cross-covariance is not symmetric, hence not a Gram matrix).
CovMatrix build_cov(std::span<const FieldPoint> points, const KernelId& kernel);

struct CholeskyFactor {
  std::size_t n = 0;
  std::vector<double> lower;  // row-major lower triangle, full n*n storage
  double jitter_applied = 0.0;

  // Solves (L L^T) x = b restricted to the leading k-by-k block, which is the
  // factor of the leading principal submatrix.
  std::vector<double> solve_prefix(std::size_t k,
                                   std::span<const double> b) const;
  std::vector<double> solve(std::span<const double> b) const;
};

// Cholesky factorization with diagonal jitter escalated geometrically from
// 1e-12 * (max diagonal) up to max_jitter; throws NotPositiveDefiniteError
// when the budget is exhausted.
CholeskyFactor factorize(const CovMatrix& m, double max_jitter);

inline double default_max_jitter(const CovMatrix& m) {
  double d = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    d = std::max(d, std::fabs(m.at(i, i)));
  return 1e-8 * d;
}

enum class SampleMethod { cholesky, moving_average };

struct PathEnsemble {
  std::vector<FieldPoint> points;
  KernelId kernel;
  SampleMethod method = SampleMethod::cholesky;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  std::vector<double> values;  // row-major, n_paths rows of points.size()

  double value(std::size_t path, std::size_t point) const {
    return values[path * points.size() + point];
  }
};

// Exact Gaussian sampling: per-path standard normals from disjoint seeded
// substreams, mapped through the Cholesky factor.  Identical inputs give
// bit-identical ensembles.
PathEnsemble sample(const CovMatrix& m, std::size_t n_paths,
                    std::uint64_t seed);
PathEnsemble sample(const CovMatrix& m, std::size_t n_paths, std::uint64_t seed,
                    double max_jitter);

// Projection weights w solving Gram w = cross, refined to a residual no
// larger than 1e-8 * |cross|.
std::vector<double> condition(const CovMatrix& gram,
                              std::span<const double> cross);

// Combines two independent dependent-field ensembles over a grid containing
// both signs of every time into one ensemble of the stationary-increment
// field: even part of the first plus (sign t) odd part of the second.
PathEnsemble assemble_fbf(const PathEnsemble& b_paths,
                          const PathEnsemble& w_paths);

// Sample covariance of two coordinates together with the standard error of
// the estimate, computed from the sample fourth moments.
struct CovEstimate {
  double value;
  double std_error;
};
CovEstimate estimate_cov(const PathEnsemble& e, std::size_t i, std::size_t j);

// Standard error of a Gaussian covariance estimate with known true matrix:
// sqrt((C_ii C_jj + C_ij^2) / n).
double gaussian_cov_std_error(const CovMatrix& m, std::size_t i, std::size_t j,
                              std::size_t n_paths);

}  // namespace fbfield
