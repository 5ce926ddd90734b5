#include "fbfield/martingales.hpp"

#include <algorithm>
#include <cmath>

#include "fbfield/quadrature.hpp"

namespace fbfield {

namespace {

constexpr double kSqrtPi = 1.77245385090551602729816748334;

KernelId parity_kernel(Parity parity) {
  return parity == Parity::odd ? KernelId::fbm_odd() : KernelId::fbm_even();
}

// Prefix solve with iterative refinement: drives the prefix residual
// Gram w - cross to roundoff, which is what the grid martingale identity
// depends on.
std::vector<double> refined_prefix_solve(const CovMatrix& gram,
                                         const CholeskyFactor& factor,
                                         std::size_t k,
                                         std::span<const double> cross) {
  std::vector<double> w = factor.solve_prefix(k, cross);
  std::vector<double> residual(k);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < k; ++i) {
      double sum = cross[i];
      for (std::size_t j = 0; j < k; ++j) sum -= gram.at(i, j) * w[j];
      residual[i] = sum;
    }
    const std::vector<double> dw = factor.solve_prefix(k, residual);
    for (std::size_t i = 0; i < k; ++i) w[i] += dw[i];
  }
  return w;
}

}  // namespace

void MartingaleSpec::validate() const {
  if (grid.empty()) throw std::invalid_argument("empty grid");
  double prev = 0.0;
  for (double t : grid) {
    if (!std::isfinite(t) || !(t > prev))
      throw std::invalid_argument(
          "grid must be positive and strictly increasing");
    prev = t;
  }
  if (method == MartMethod::stieltjes && parity == Parity::even &&
      h.value() > 0.5)
    throw std::invalid_argument(
        "discretized even-part route requires h <= 1/2; use projection");
}

double mart_kernel_odd(Hurst h, double t, double s) {
  const double H = h.value();
  if (H == 0.5)
    throw std::domain_error("odd-part kernel defined for h != 1/2");
  if (!(t > 0.0) || s < 0.0 || s >= t)
    throw std::domain_error("odd-part kernel needs 0 <= s < t");
  const double coef = kSqrtPi * coef_alpha(h) / gamma_real(1.0 - H);
  return coef * std::pow(t * t - s * s, 0.5 - H);
}

double mart_psi(Hurst h, double t, double s) {
  if (!(t > 0.0)) throw std::domain_error("psi needs t > 0");
  s = std::fabs(s);
  if (s >= t) return 0.0;
  const double e = 0.5 - h.value();
  const double width = t - s;
  const auto f = [s, e, width](double v) {
    const double x = s + width * v;
    return std::pow(x * x - s * s, e) * width;
  };
  return integrate_adaptive(f, 0.0, 1.0, 1e-13, 1e-11).value;
}

double mart_kernel_even(Hurst h, double t, double s, double fd_step) {
  const double H = h.value();
  if (H >= 0.5)
    throw std::domain_error("even-part kernel requires h < 1/2");
  if (!(t > 0.0) || s < 0.0 || s >= t)
    throw std::domain_error("even-part kernel needs 0 <= s < t");
  if (!(fd_step > 0.0) || !std::isfinite(fd_step))
    throw std::invalid_argument("fd_step must be positive");
  const double coef = -coef_alpha(h) / gamma_real(1.5 - H);
  const auto central = [&](double step) {
    return (mart_psi(h, t, s + step) - mart_psi(h, t, s - step)) /
           (2.0 * step);
  };
  const double d1 = central(fd_step);
  const double d2 = central(fd_step / 2.0);
  return coef * (4.0 * d2 - d1) / 3.0;
}

MartingaleWeights mart_weights(Hurst h, Parity parity,
                               std::span<const double> grid,
                               double jitter_budget) {
  MartingaleSpec check{h, parity, {grid.begin(), grid.end()},
                       MartMethod::projection};
  check.validate();

  std::vector<FieldPoint> points;
  points.reserve(grid.size());
  for (double t : grid) points.push_back({t, h});
  const CovMatrix gram = build_cov(points, parity_kernel(parity));
  const CholeskyFactor factor = factorize(gram, jitter_budget);

  MartingaleWeights out;
  out.grid.assign(grid.begin(), grid.end());
  out.cross_coef = coef_a(h, DualPair(h).h_dual());
  const std::size_t m = grid.size();
  out.w.reserve(m * (m + 1) / 2);
  std::vector<double> cross(m);
  for (std::size_t i = 0; i < m; ++i)
    cross[i] = out.cross_coef * grid[i] / 2.0;
  for (std::size_t k = 0; k < m; ++k) {
    const std::vector<double> wk = refined_prefix_solve(
        gram, factor, k + 1, std::span<const double>(cross.data(), k + 1));
    out.w.insert(out.w.end(), wk.begin(), wk.end());
  }
  return out;
}

std::vector<double> mart_variances(const MartingaleWeights& weights) {
  const std::size_t m = weights.size();
  std::vector<double> var(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i <= k; ++i)
      sum += weights.weight(k, i) * weights.cross_coef * weights.grid[i] / 2.0;
    var[k] = sum;
  }
  return var;
}

PathEnsemble build_martingale(const MartingaleSpec& spec,
                              const PathEnsemble& driver) {
  spec.validate();
  const std::size_t m = spec.grid.size();
  if (driver.points.size() != m)
    throw std::invalid_argument("driver ensemble does not match the grid");
  const KernelId expected = parity_kernel(spec.parity);
  if (driver.kernel.tag != expected.tag)
    throw std::invalid_argument("driver ensemble has the wrong parity kernel");
  for (std::size_t i = 0; i < m; ++i) {
    if (driver.points[i].t != spec.grid[i] || driver.points[i].h != spec.h)
      throw std::invalid_argument("driver ensemble does not match the grid");
  }

  PathEnsemble out{driver.points, driver.kernel,  driver.method,
                   driver.seed,   driver.n_paths, {}};
  out.values.assign(driver.n_paths * m, 0.0);
  const double H = spec.h.value();

  if (spec.method == MartMethod::projection) {
    std::vector<FieldPoint> points(driver.points);
    const CovMatrix gram = build_cov(points, expected);
    const MartingaleWeights weights =
        mart_weights(spec.h, spec.parity, spec.grid, default_max_jitter(gram));
    for (std::size_t p = 0; p < driver.n_paths; ++p) {
      for (std::size_t k = 0; k < m; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i <= k; ++i)
          sum += weights.weight(k, i) * driver.value(p, i);
        out.values[p * m + k] = sum;
      }
    }
    return out;
  }

  // Stieltjes route: precompute the kernel on every (cell, target) pair.
  // Cell j is [e_j, e_{j+1}] with e_0 = 0; the kernel of target t_k is
  // evaluated at the cell's left edge (midpoint on the final cell for the
  // odd singular case); h = 1/2 uses the unit kernel for both parities.
  std::vector<double> edges(m + 1);
  edges[0] = 0.0;
  for (std::size_t i = 0; i < m; ++i) edges[i + 1] = spec.grid[i];
  const auto kernel_at = [&](double s, double t) {
    if (H == 0.5) return 1.0;
    if (spec.parity == Parity::odd) return mart_kernel_odd(spec.h, t, s);
    return mart_kernel_even(spec.h, t, s, 1e-4 * t);
  };
  std::vector<double> kern(m * (m + 1) / 2);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = spec.grid[k];
    for (std::size_t j = 0; j <= k; ++j) {
      double s = edges[j];
      if (spec.parity == Parity::odd && H > 0.5 && j == k)
        s = (edges[j] + edges[j + 1]) / 2.0;
      kern[k * (k + 1) / 2 + j] = kernel_at(s, t);
    }
  }
  std::vector<double> incr(m);
  for (std::size_t p = 0; p < driver.n_paths; ++p) {
    double prev = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double v = driver.value(p, j);
      incr[j] = v - prev;
      prev = v;
    }
    for (std::size_t k = 0; k < m; ++k) {
      double sum = 0.0;
      const double* row = kern.data() + k * (k + 1) / 2;
      for (std::size_t j = 0; j <= k; ++j) sum += row[j] * incr[j];
      out.values[p * m + k] = sum;
    }
  }
  return out;
}

AuditReport martingale_audit(const MartingaleSpec& spec,
                             const AuditOptions& options) {
  MartingaleSpec proj = spec;
  proj.method = MartMethod::projection;
  proj.validate();

  // (a) and (c) on spec.grid with the plain (jitter-free) factorization.
  const MartingaleWeights weights =
      mart_weights(spec.h, spec.parity, spec.grid, 0.0);
  const std::size_t m = weights.size();
  std::vector<FieldPoint> points;
  points.reserve(m);
  for (double t : spec.grid) points.push_back({t, spec.h});
  const CovMatrix gram = build_cov(points, parity_kernel(spec.parity));
  const std::vector<double> var = mart_variances(weights);

  // g[k][r] = E M(t_k) B(r) for r <= k; exact value is cross[r] for every k.
  std::vector<std::vector<double>> g(m);
  for (std::size_t k = 0; k < m; ++k) {
    g[k].assign(k + 1, 0.0);
    for (std::size_t r = 0; r <= k; ++r) {
      double sum = 0.0;
      for (std::size_t i = 0; i <= k; ++i)
        sum += weights.weight(k, i) * gram.at(i, r);
      g[k][r] = sum;
    }
  }

  AuditReport report;
  report.slope_target = 2.0 * (1.0 - spec.h.value());

  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < k; ++l) {
      double m2 = 0.0;
      for (std::size_t j = 0; j <= l; ++j) m2 += g[k][j] * weights.weight(l, j);
      report.max_rel_martingale = std::max(
          report.max_rel_martingale, std::fabs(m2 - var[l]) / var[l]);
    }
  }

  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t u = 0; u < k; ++u) {
      for (std::size_t r = 0; r <= u; ++r) {
        const double scale =
            std::fabs(weights.cross_coef) * weights.grid[r] / 2.0;
        report.max_rel_orth = std::max(
            report.max_rel_orth, std::fabs(g[k][r] - g[u][r]) / scale);
      }
    }
  }

  // (b): variance slope on the geometric observation grid, fitted at the
  // dyadic times within [slope_t_min, 1].
  const std::size_t n = options.slope_grid_size;
  std::vector<double> geo(n);
  for (std::size_t j = 0; j < n; ++j)
    geo[j] = std::pow(2.0, -static_cast<double>(n - 1 - j) / 32.0);
  const MartingaleWeights slope_weights =
      mart_weights(spec.h, spec.parity, geo, 1e-10);
  const std::vector<double> slope_var = mart_variances(slope_weights);
  std::vector<double> xs, ys;
  for (std::size_t j = 0; 32 * j + 1 <= n; ++j) {
    const std::size_t idx = n - 1 - 32 * j;
    if (geo[idx] < options.slope_t_min * (1.0 - 1e-12)) break;
    xs.push_back(std::log(geo[idx]));
    ys.push_back(std::log(slope_var[idx]));
  }
  if (xs.size() < 2)
    throw std::invalid_argument("slope grid too short for the variance fit");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  report.slope = sxy / sxx;

  report.martingale_ok =
      report.max_rel_martingale <= options.martingale_rel_tol;
  report.orth_ok = report.max_rel_orth <= options.orth_rel_tol;
  report.slope_ok =
      std::fabs(report.slope - report.slope_target) <= options.slope_tol;
  report.pass = report.martingale_ok && report.orth_ok && report.slope_ok;
  return report;
}

}  // namespace fbfield
