#pragma once

#include <functional>
#include <stdexcept>

namespace fbfield {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QuadResult {
  double value;
  double error;  // estimated absolute error bound
};

// Single 15-point Gauss-Kronrod panel on [a, b] with embedded 7-point error
// estimate.
QuadResult gk15_panel(const std::function<double(double)>& f, double a,
                      double b);

// Globally adaptive quadrature on [a, b]: bisects the interval with the
// largest error estimate until the accumulated error falls below
// max(abs_tol, rel_tol * |integral|).  Throws QuadratureError when the
// interval budget is exhausted before the tolerance is met.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, double rel_tol,
                              int max_intervals = 20000);

}  // namespace fbfield
