#pragma once

// Monte Carlo oracle for the moving-average representations.  The defining
// stochastic integrals are discretized against simulated white noise on a
// truncated window, giving covariance estimates with confidence intervals
// that check the closed-form kernels from the opposite direction.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fbfield/gaussfield.hpp"
#include "fbfield/kernels.hpp"

namespace fbfield {

// Discretization scheme for a moving-average integral: the window is
// truncated at -cutoff on the left and tiled with cells of width mesh.
// For the nonanticipating kernel the window ends at max(0, max t) (the
// kernel vanishes to the right); the two-sided kernels extend the window
// by +cutoff past max(0, max t).
struct MAScheme {
  double cutoff = 100.0;
  double mesh = 1.0 / 512.0;
  MaKind kind = MaKind::nonanticipating;

  // Throws std::invalid_argument unless 0 < mesh < cutoff and both finite.
  void validate() const;
};

// A moving-average path ensemble together with the scheme and the actual
// integration window that produced it (the window bounds feed the
// truncation-bias budget).
struct MaEnsemble {
  PathEnsemble paths;
  MAScheme scheme;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

// Discretizes Z(t_i) = (1/norm) * integral of k(t_i, x) dW(x) for all points
// simultaneously from one white-noise realization per path, so cross-time and
// cross-index dependence is preserved.  Cells are midpoint-evaluated; cells
// containing a kernel center (x = 0 or x = t_i) use the exact cell integral
// instead.  Cells are aligned to the right window edge, so enlarging the
// cutoff with the same seed extends a path's noise without changing the
// shared cells.  Normalization: the variance-one constants of the matching
// representation (log kernel normalizer for kind log, and for a point with
// h = 1/2 under kind well_balanced).
MaEnsemble ma_sample(std::span<const FieldPoint> points, const MAScheme& scheme,
                     std::size_t n_paths, std::uint64_t seed);

// Single-index convenience overload: every grid time carries the same h.
MaEnsemble ma_sample(std::span<const double> grid, Hurst h,
                     const MAScheme& scheme, std::size_t n_paths,
                     std::uint64_t seed);

// Upper bound on the L2 norm of the window-truncation error of one
// discretized coordinate (the part of the integral dropped outside
// [window_lo, window_hi]).  Derived from the mean-value bound
// |k(t, x)| <= |nu| |t| dist(x, centers)^(nu-1) integrated over the dropped
// region(s); the log kernel uses the same bound with |nu| replaced by 1.
double truncation_l2_bound(const MaEnsemble& e, std::size_t i);

struct VerifyRow {
  std::size_t i = 0;
  std::size_t j = 0;
  double closed = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  double trunc_bound = 0.0;
  bool ok = false;
};

struct VerifyReport {
  std::vector<VerifyRow> rows;
  double tolerance_sigmas = 0.0;
  double worst_z = 0.0;  // max over rows of (|estimate-closed| - trunc)/SE
  bool pass = false;
};

// Compares every pair (i <= j) of the ensemble against the closed-form
// kernel: pass iff |estimate - closed| <= tolerance_sigmas * SE + truncation
// budget, where the budget is a Cauchy-Schwarz combination of the per-point
// truncation bounds.
VerifyReport verify_against(const KernelId& kernel, const MaEnsemble& e,
                            double tolerance_sigmas);

}  // namespace fbfield
