#include "fbfield/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace fbfield {

namespace {

// 15-point Kronrod abscissae on [-1, 1] (nonnegative half) and weights,
// with the embedded 7-point Gauss weights.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value;
  double error;
};

struct PanelWorse {
  bool operator()(const Panel& x, const Panel& y) const {
    return x.error < y.error;
  }
};

}  // namespace

QuadResult gk15_panel(const std::function<double(double)>& f, double a,
                      double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);

  double fv[15];
  const double fc = f(c);
  fv[7] = fc;
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    fv[j] = f(c - dx);
    fv[14 - j] = f(c + dx);
  }

  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  double resabs = std::fabs(resk);
  for (int j = 0; j < 7; ++j) {
    const double fsum = fv[j] + fv[14 - j];
    resk += kWgk[j] * fsum;
    resabs += kWgk[j] * (std::fabs(fv[j]) + std::fabs(fv[14 - j]));
    if (j % 2 == 1) resg += kWg[j / 2] * fsum;
  }

  const double reskh = 0.5 * resk;
  double resasc = kWgk[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc +=
        kWgk[j] * (std::fabs(fv[j] - reskh) + std::fabs(fv[14 - j] - reskh));

  const double value = resk * h;
  resabs *= std::fabs(h);
  resasc *= std::fabs(h);
  double err = std::fabs((resk - resg) * h);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  err = std::max(err, 50.0 * eps * resabs);
  return {value, err};
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a,
                              double b, double abs_tol, double rel_tol,
                              int max_intervals) {
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0))
    throw std::invalid_argument("quadrature tolerances must be nonnegative");
  if (a == b) return {0.0, 0.0};

  std::priority_queue<Panel, std::vector<Panel>, PanelWorse> queue;
  QuadResult first = gk15_panel(f, a, b);
  queue.push({a, b, first.value, first.error});
  double total = first.value;
  double total_err = first.error;
  int used = 1;

  const double eps = std::numeric_limits<double>::epsilon();
  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (used >= max_intervals)
      throw QuadratureError("quadrature tolerance not met within budget");
    Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b ||
        (worst.b - worst.a) < eps * (std::fabs(worst.a) + std::fabs(worst.b)))
      throw QuadratureError("quadrature interval underflow before tolerance");
    QuadResult left = gk15_panel(f, worst.a, mid);
    QuadResult right = gk15_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    queue.push({worst.a, mid, left.value, left.error});
    queue.push({mid, worst.b, right.value, right.error});
    ++used;
  }
  return {total, total_err};
}

}  // namespace fbfield
