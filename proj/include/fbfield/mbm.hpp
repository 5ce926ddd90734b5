#pragma once

// Multifractional Brownian motion along a deterministic Hurst profile:
// exact covariances and exact sampling for the nonanticipating variant
// (the dependent field on its diagonal) and for the well-balanced /
// harmonizable variant, plus the quantitative demonstration that the two
// laws differ at dual index pairs.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "fbfield/gaussfield.hpp"
#include "fbfield/specfun.hpp"

namespace fbfield {

// Profile evaluations are clamped into [kProfileClamp, 1 - kProfileClamp]
// to keep the gamma/trig constants away from the index boundaries.
inline constexpr double kProfileClamp = 1e-3;

// Deterministic Hurst function H(t) on [0, inf), piecewise linear.
class HurstProfile {
 public:
  static HurstProfile constant(double h);
  // Linear ramp from h0 at t = 0 to h1 at t = horizon, constant beyond.
  static HurstProfile ramp(double h0, double h1, double horizon);
  // Piecewise linear through the knots (t strictly increasing); constant
  // before the first knot and after the last.
  static HurstProfile table(std::vector<std::pair<double, double>> knots);

  double operator()(double t) const;  // H(t), clamped
  Hurst at(double t) const { return Hurst((*this)(t)); }
  // Holder-exponent metadata: 1 for the piecewise-linear representations,
  // +infinity for a constant profile.
  double holder_beta() const { return beta_; }

 private:
  HurstProfile() = default;
  std::vector<std::pair<double, double>> knots_;
  double beta_ = 1.0;
};

// Parses a two-column text table (lines "t H"); '#' starts a comment and a
// single leading non-numeric header line is tolerated.
HurstProfile load_profile_table(std::istream& in);

enum class MbmWhich { x, y };  // x: nonanticipating law; y: well-balanced law

// Covariance of the nonanticipating mBm: the dependent field at the
// diagonal points (t, H(t)), (s, H(s)).  Times must be >= 0.
double mbm_cov_x(const HurstProfile& profile, double t, double s);

// Covariance of the harmonizable mBm, realized through the well-balanced
// field at the same diagonal points.
double mbm_cov_y(const HurstProfile& profile, double t, double s);

// Exact Gaussian sampling on the diagonal point set {(t_i, H(t_i))} with
// the kernel matching `which`; no moving-average discretization error.
PathEnsemble mbm_sample(const HurstProfile& profile,
                        std::span<const double> grid, MbmWhich which,
                        std::size_t n_paths, std::uint64_t seed);

// Scale ratios of the two laws at a dual index pair (h, 1-h): r_x is not
// constant in (t, s) while r_y is, so no unimodular deterministic factor
// can map one law onto the other.
struct CohenPoint {
  double t = 0.0;
  double s = 0.0;
  double r_x = 0.0;  // dependent-field cross-covariance / min(t, s)
  double r_y = 0.0;  // well-balanced cross-covariance / min(t, s)
};

struct CohenReport {
  double h = 0.0;
  std::vector<CohenPoint> points;
  double r_x_spread = 0.0;  // max - min of r_x over the pairs
  double r_y_spread = 0.0;
  bool no_discrepancy_expected = false;  // h = 1/2: the pair degenerates
  bool pass = false;
};

// Ratios for one (t, s) pair; t, s > 0.
CohenPoint cohen_discrepancy(Hurst h, double t, double s);

// Aggregates cohen_discrepancy over several pairs.  For h != 1/2 the report
// passes when r_y is constant to 1e-12 while r_x spreads by more than 1e-3;
// at h = 1/2 both ratios must be the constant 1.
CohenReport cohen_check(Hurst h,
                        std::span<const std::pair<double, double>> pairs);

}  // namespace fbfield
