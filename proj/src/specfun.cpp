#include "fbfield/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace fbfield {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_nonpositive_integer(double x) {
  return x <= 0.0 && x == std::floor(x);
}

// Lanczos coefficients, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,    676.5203681218851,     -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6, 1.5056327351493116e-7};

double gamma_positive(double x) {
  // Valid for x >= 1/2.
  const double z = x - 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
  const double t = z + 7.5;
  return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace

Hurst::Hurst(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0))
    throw std::domain_error("hurst index must lie in (0, 1)");
}

double sin_pi(double x) {
  // Reduce to [-1/2, 1/2] before scaling by pi so that zeros at integers
  // are exact.
  double r = std::fmod(x, 2.0);
  if (r > 1.0)
    r -= 2.0;
  else if (r < -1.0)
    r += 2.0;
  if (r > 0.5)
    r = 1.0 - r;
  else if (r < -0.5)
    r = -1.0 - r;
  return std::sin(kPi * r);
}

double gamma_real(double x) {
  if (std::isnan(x)) throw std::domain_error("gamma argument is nan");
  if (is_nonpositive_integer(x))
    throw std::domain_error("gamma pole at nonpositive integer");
  if (x >= 0.5) return gamma_positive(x);
  // Reflection: gamma(x) gamma(1-x) = pi / sin(pi x).
  return kPi / (sin_pi(x) * gamma_positive(1.0 - x));
}

double coef_c(Hurst h) {
  const double H = h.value();
  return gamma_real(H + 0.5) / std::sqrt(gamma_real(2.0 * H + 1.0) * sin_pi(H));
}

double coef_d(Hurst h) {
  const double H = h.value();
  if (H == 0.5) return kPi;
  // 1 - sin(pi H) = 2 sin^2(pi (2H-1) / 4), stable through H = 1/2.
  const double s = std::fabs(sin_pi((2.0 * H - 1.0) / 4.0));
  return gamma_real(H + 0.5) / std::sqrt(gamma_real(2.0 * H + 1.0)) * 2.0 * s /
         std::sqrt(sin_pi(H));
}

double coef_k(Hurst h) {
  const double H = h.value();
  if (H == 0.5) return kPi;
  return -2.0 * gamma_real(H + 0.5) * sin_pi((H - 0.5) / 2.0);
}

double coef_cc(Hurst h, Hurst h2) {
  const double H = h.value();
  const double Hp = h2.value();
  return std::sqrt(gamma_real(2.0 * H + 1.0) * sin_pi(H)) *
         std::sqrt(gamma_real(2.0 * Hp + 1.0) * sin_pi(Hp)) / kPi;
}

double coef_a(Hurst h, Hurst h2) {
  const double H = h.value();
  const double Hp = h2.value();
  const double p = H + Hp;
  if (std::fabs(p - 1.0) < kDualBand) {
    return std::sqrt(gamma_real(2.0 * H + 1.0) * gamma_real(2.0 * Hp + 1.0)) *
           sin_pi(H) * sin_pi(Hp);
  }
  return -2.0 * coef_cc(h, h2) * gamma_real(-p) * std::cos((Hp - H) * kPi / 2.0) *
         std::cos(p * kPi / 2.0);
}

double coef_alpha(Hurst h) {
  const double H = h.value();
  return std::pow(2.0, 2.0 * H - 1.0) * std::sqrt(gamma_real(3.0 - 2.0 * H)) *
         sin_pi(H) / (gamma_real(1.5 - H) * std::sqrt(gamma_real(2.0 * H + 1.0)));
}

}  // namespace fbfield
