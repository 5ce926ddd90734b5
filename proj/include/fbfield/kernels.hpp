#pragma once

#include <complex>
#include <stdexcept>

#include "fbfield/specfun.hpp"

namespace fbfield {

enum class Parity { odd, even };

// Tags for the covariance families handled by the library.  field_parity
// carries the parity pair of its two arguments.
struct KernelId {
  enum class Tag { fbm, fbm_odd, fbm_even, dfbf, field_parity, fbf, well_balanced };

  Tag tag;
  Parity parity_i = Parity::odd;
  Parity parity_j = Parity::odd;

  static KernelId fbm() { return {Tag::fbm}; }
  static KernelId fbm_odd() { return {Tag::fbm_odd}; }
  static KernelId fbm_even() { return {Tag::fbm_even}; }
  static KernelId dfbf() { return {Tag::dfbf}; }
  static KernelId field_parity(Parity i, Parity j) {
    return {Tag::field_parity, i, j};
  }
  static KernelId fbf() { return {Tag::fbf}; }
  static KernelId well_balanced() { return {Tag::well_balanced}; }
};

enum class MaKind { nonanticipating, well_balanced, log_kernel };

struct SingularityError : std::domain_error {
  using std::domain_error::domain_error;
};

// Controls for the frequency-domain quadrature oracle.
struct QuadSpec {
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  double split_point = 1.0;  // boundary between the origin region and the sweep
  int max_intervals = 40000;

  void validate() const;
};

// Two-sided fractional Brownian covariance
//   (|s|^2h + |t|^2h - |s-t|^2h) / 2.
double fbm_cov(Hurst h, double t, double s);

// Covariance of the odd/even part of a single fractional Brownian motion;
// t, s >= 0.
double fbm_parity_cov(Parity parity, Hurst h, double t, double s);

// Cross-covariance K(t, s) of the dependent field built from one white noise:
// powers of |t|, |s|, |t-s| with signed terms away from h + h' = 1, and the
// logarithmic limit form within kDualBand of the dual line.
double dfbf_cov(Hurst h, Hurst h2, double t, double s);

// Same covariance assembled from the two one-dimensional frequency integrals;
// agrees with dfbf_cov identically.
double dfbf_cov_via_integrals(Hurst h, Hurst h2, double t, double s);

// Closed forms of the two frequency integrals behind dfbf_cov.
//   i1: integrand (sin^2(t xi/2) + sin^2(s xi/2) - sin^2((t-s) xi/2)) / xi^(1+p)
//   i2: integrand (sin((t-s) xi) + sin(s xi) - sin(t xi)) / xi^(1+p)
// with p = h + h'; i2 is antisymmetric in (t, s).
double i1_closed(Hurst h, Hurst h2, double t, double s);
double i2_closed(Hurst h, Hurst h2, double t, double s);

enum class FreqIntegral { i1, i2 };

// Independent numerical evaluation of i1/i2: adaptive panels near the origin
// and across the oscillatory range, plus an analytic bound on the discarded
// tail.  Throws QuadratureError when the tolerance cannot be certified.
double freq_quad_oracle(FreqIntegral which, Hurst h, Hurst h2, double t,
                        double s, const QuadSpec& spec);

// Cross-covariance of odd/even parts of the dependent field.  Equal parities
// use the amplitude coef_a; mixed parities are assembled from dfbf_cov over
// the four sign quadrants.  t, s >= 0.
double field_parity_cov(Parity pi, Parity pj, Hurst h, Hurst h2, double t,
                        double s);

// Two-sided field with stationary increments:
//   coef_a(h,h') (|t|^p + |s|^p - |t-s|^p) / 2,  p = h + h'.
double fbf_cov(Hurst h, Hurst h2, double t, double s);

// Cross-covariance of well-balanced fields driven by one noise; proportional
// to the fbm covariance at the mean index (h + h') / 2.
double wb_field_cov(Hurst h, Hurst h2, double t, double s);

// Moving-average kernels in the time domain.  Power kernels with h < 1/2 are
// singular at x = 0 and x = t (SingularityError); the log kernel requires
// h = 1/2.
double ma_kernel(MaKind kind, Hurst h, double t, double x);

// Fourier transform of ma_kernel(kind, h, t, .) at frequency xi != 0, with
// the convention f^(xi) = integral e^(i xi x) f(x) dx.
std::complex<double> ft_closed(MaKind kind, Hurst h, double t, double xi);

}  // namespace fbfield
