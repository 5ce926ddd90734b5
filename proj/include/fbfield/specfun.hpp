#pragma once

namespace fbfield {

// Hurst index, restricted to the open interval (0, 1).
class Hurst {
 public:
  explicit Hurst(double value);
  double value() const { return value_; }

 private:
  double value_;
};

inline bool operator==(Hurst a, Hurst b) { return a.value() == b.value(); }
inline bool operator!=(Hurst a, Hurst b) { return !(a == b); }

// Pair (h, 1 - h); the dual index is always derived, never stored.
class DualPair {
 public:
  explicit DualPair(Hurst h) : h_(h) {}
  Hurst h() const { return h_; }
  Hurst h_dual() const { return Hurst(1.0 - h_.value()); }

 private:
  Hurst h_;
};

// Indices whose sum lies within this distance of 1 are evaluated with the
// dual-line (logarithmic) covariance formulas.
inline constexpr double kDualBand = 1e-3;

// Gamma function on the real line, poles excluded.  Lanczos approximation
// with reflection for arguments below 1/2.
double gamma_real(double x);

// sin(pi*x) with exact argument reduction; accurate near integer x.
double sin_pi(double x);

// Normalizer of the nonanticipating moving-average kernel:
//   gamma(h + 1/2) / sqrt(gamma(2h + 1) * sin(pi h)).
double coef_c(Hurst h);

// Normalizer of the well-balanced moving-average kernel:
//   gamma(h + 1/2) / sqrt(gamma(2h + 1)) * sqrt(2 (1 - sin(pi h)) / sin(pi h)),
// extended by pi at h = 1/2 (logarithmic kernel).
double coef_d(Hurst h);

// Fourier coefficient of the well-balanced kernel:
//   -2 gamma(h + 1/2) sin((h - 1/2) pi / 2), extended by pi at h = 1/2.
double coef_k(Hurst h);

// Cross-field constant:
//   sqrt(gamma(2h+1) sin(pi h)) * sqrt(gamma(2h'+1) sin(pi h')) / pi.
double coef_cc(Hurst h, Hurst h2);

// Parity-field amplitude
//   -2 coef_cc(h, h') gamma(-(h+h')) cos((h'-h) pi/2) cos((h+h') pi/2),
// which equals 1 on the diagonal h = h'.  Within kDualBand of h + h' = 1 the
// limit value sqrt(gamma(2h+1) gamma(2h'+1)) sin(pi h) sin(pi h') is used.
double coef_a(Hurst h, Hurst h2);

// Martingale normalizer
//   2^(2h-1) sqrt(gamma(3-2h)) sin(pi h) / (gamma(3/2-h) sqrt(gamma(2h+1))).
double coef_alpha(Hurst h);

}  // namespace fbfield
