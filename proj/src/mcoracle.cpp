#include "fbfield/mcoracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbfield/rng.hpp"
#include "fbfield/specfun.hpp"

namespace fbfield {

namespace {

constexpr double kPi = 3.14159265358979323846;

// The well-balanced family degenerates to the log kernel at h = 1/2; a
// point at exactly h = 1/2 under kind well_balanced uses the log member.
MaKind effective_kind(MaKind scheme_kind, Hurst h) {
  if (scheme_kind == MaKind::well_balanced && h.value() == 0.5)
    return MaKind::log_kernel;
  return scheme_kind;
}

double normalizer(MaKind kind, Hurst h) {
  switch (kind) {
    case MaKind::nonanticipating:
      return coef_c(h);
    case MaKind::well_balanced:
      return coef_d(h);
    case MaKind::log_kernel:
      return kPi;
  }
  throw std::logic_error("unknown moving-average kernel kind");
}

double pow_plus(double x, double e) { return x > 0.0 ? std::pow(x, e) : 0.0; }

double spow(double x, double e) {
  if (x == 0.0) return 0.0;
  return x > 0.0 ? std::pow(x, e) : -std::pow(-x, e);
}

double xlog(double x) {
  return x == 0.0 ? 0.0 : x * std::log(std::fabs(x));
}

// Kernel atom centered at c, evaluated at x; the kernel of a point at time t
// is atom(t, x) - atom(0, x).
double atom_value(MaKind kind, double nu, double c, double x) {
  switch (kind) {
    case MaKind::nonanticipating:
      return pow_plus(c - x, nu);
    case MaKind::well_balanced:
      return c == x ? 0.0 : std::pow(std::fabs(c - x), nu);
    case MaKind::log_kernel:
      return -std::log(std::fabs(c - x));
  }
  throw std::logic_error("unknown moving-average kernel kind");
}

// Exact integral of the atom over the cell [l, u]; elementary antiderivatives
// stay finite across the center (the integrable singularity at x = c).
double atom_cell_integral(MaKind kind, double nu, double c, double l,
                          double u) {
  switch (kind) {
    case MaKind::nonanticipating:
      return (pow_plus(c - l, nu + 1.0) - pow_plus(c - u, nu + 1.0)) /
             (nu + 1.0);
    case MaKind::well_balanced:
      return (spow(c - l, nu + 1.0) - spow(c - u, nu + 1.0)) / (nu + 1.0);
    case MaKind::log_kernel:
      // Antiderivative of -log|c - x| is (c - x) log|c - x| + x.
      return (xlog(c - u) + u) - (xlog(c - l) + l);
  }
  throw std::logic_error("unknown moving-average kernel kind");
}

}  // namespace

void MAScheme::validate() const {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw std::invalid_argument("cutoff must be positive and finite");
  if (!(mesh > 0.0) || !std::isfinite(mesh))
    throw std::invalid_argument("mesh must be positive and finite");
  if (!(mesh < cutoff))
    throw std::invalid_argument("mesh must be smaller than the cutoff");
}

MaEnsemble ma_sample(std::span<const FieldPoint> points, const MAScheme& scheme,
                     std::size_t n_paths, std::uint64_t seed) {
  scheme.validate();
  if (points.empty()) throw std::invalid_argument("empty point set");
  if (n_paths == 0) throw std::invalid_argument("need at least one path");
  for (const auto& pt : points) {
    if (!std::isfinite(pt.t)) throw std::invalid_argument("nonfinite time");
    if (scheme.kind == MaKind::log_kernel && pt.h.value() != 0.5)
      throw std::invalid_argument("log kernel requires h = 1/2");
  }

  double max_t = -std::numeric_limits<double>::infinity();
  double min_t = std::numeric_limits<double>::infinity();
  for (const auto& pt : points) {
    max_t = std::max(max_t, pt.t);
    min_t = std::min(min_t, pt.t);
  }
  const double lo = -scheme.cutoff;
  double hi = std::max(0.0, max_t);
  if (scheme.kind != MaKind::nonanticipating) hi += scheme.cutoff;
  if (std::min(0.0, min_t) <= lo)
    throw std::invalid_argument("cutoff window does not cover the grid");

  const double cells_real = (hi - lo) / scheme.mesh;
  const auto n_cells = static_cast<std::size_t>(std::llround(cells_real));
  if (n_cells == 0 ||
      std::fabs(cells_real - static_cast<double>(n_cells)) > 1e-9 * cells_real)
    throw std::invalid_argument("mesh must divide the window span");

  // Per-point, per-cell noise coefficients.  Cell j is
  // [hi - (j+1) mesh, hi - j mesh]: right-aligned, so the cell at a given
  // index is the same physical interval whatever the cutoff.
  const std::size_t n = points.size();
  const double h = scheme.mesh;
  const double sqrt_h = std::sqrt(h);
  std::vector<double> coef(n * n_cells, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = points[i].t;
    const MaKind kind = effective_kind(scheme.kind, points[i].h);
    const double nu = points[i].h.value() - 0.5;
    const double norm = normalizer(kind, points[i].h);
    double* row = coef.data() + i * n_cells;
    const auto atom_part = [&](double c, double l, double u, double mid) {
      if (l <= c && c <= u) return atom_cell_integral(kind, nu, c, l, u);
      return h * atom_value(kind, nu, c, mid);
    };
    for (std::size_t j = 0; j < n_cells; ++j) {
      const double u = hi - static_cast<double>(j) * h;
      const double l = u - h;
      const double mid = u - 0.5 * h;
      row[j] = (atom_part(t, l, u, mid) - atom_part(0.0, l, u, mid)) /
               (norm * sqrt_h);
    }
  }

  MaEnsemble out;
  out.scheme = scheme;
  out.window_lo = lo;
  out.window_hi = hi;
  out.paths.points.assign(points.begin(), points.end());
  out.paths.kernel = scheme.kind == MaKind::nonanticipating
                         ? KernelId::dfbf()
                         : KernelId::well_balanced();
  out.paths.method = SampleMethod::moving_average;
  out.paths.seed = seed;
  out.paths.n_paths = n_paths;
  out.paths.values.assign(n_paths * n, 0.0);

  std::vector<double> noise(n_cells);
  for (std::size_t p = 0; p < n_paths; ++p) {
    NormalStream stream(seed, p);
    for (std::size_t j = 0; j < n_cells; ++j) noise[j] = stream.next_normal();
    double* row = out.paths.values.data() + p * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double* ci = coef.data() + i * n_cells;
      double sum = 0.0;
      for (std::size_t j = 0; j < n_cells; ++j) sum += ci[j] * noise[j];
      row[i] = sum;
    }
  }
  return out;
}

MaEnsemble ma_sample(std::span<const double> grid, Hurst h,
                     const MAScheme& scheme, std::size_t n_paths,
                     std::uint64_t seed) {
  std::vector<FieldPoint> points;
  points.reserve(grid.size());
  for (double t : grid) points.push_back({t, h});
  return ma_sample(points, scheme, n_paths, seed);
}

double truncation_l2_bound(const MaEnsemble& e, std::size_t i) {
  if (i >= e.paths.points.size()) throw std::out_of_range("point index");
  const FieldPoint& pt = e.paths.points[i];
  if (pt.t == 0.0) return 0.0;
  const MaKind kind = effective_kind(e.scheme.kind, pt.h);
  const double H = pt.h.value();
  if (kind == MaKind::nonanticipating && H == 0.5)
    return 0.0;  // indicator kernel: compact support inside the window
  const double nu = H - 0.5;
  const double fac = kind == MaKind::log_kernel ? 1.0 : nu * nu;
  const double norm = normalizer(kind, pt.h);
  // Dropped tail at distance delta from the nearest kernel center
  // contributes at most fac t^2 delta^(2H-2) / (2-2H) to the squared norm.
  const auto tail_sq = [&](double delta) {
    return fac * pt.t * pt.t * std::pow(delta, 2.0 * H - 2.0) / (2.0 - 2.0 * H);
  };
  double sq = tail_sq(std::min(0.0, pt.t) - e.window_lo);
  if (kind != MaKind::nonanticipating)
    sq += tail_sq(e.window_hi - std::max(0.0, pt.t));
  return std::sqrt(sq) / norm;
}

VerifyReport verify_against(const KernelId& kernel, const MaEnsemble& e,
                            double tolerance_sigmas) {
  const auto& pts = e.paths.points;
  const std::size_t n = pts.size();
  if (e.paths.n_paths < 2)
    throw std::invalid_argument("need at least two paths");

  std::vector<double> sigma(n), drop(n);
  for (std::size_t i = 0; i < n; ++i) {
    sigma[i] = std::sqrt(std::max(0.0, point_cov(kernel, pts[i], pts[i])));
    drop[i] = truncation_l2_bound(e, i);
  }

  VerifyReport report;
  report.tolerance_sigmas = tolerance_sigmas;
  report.worst_z = -std::numeric_limits<double>::infinity();
  report.pass = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      VerifyRow row;
      row.i = i;
      row.j = j;
      row.closed = point_cov(kernel, pts[i], pts[j]);
      const CovEstimate est = estimate_cov(e.paths, i, j);
      row.estimate = est.value;
      row.std_error = est.std_error;
      row.trunc_bound = drop[i] * sigma[j] + sigma[i] * drop[j];
      const double diff = std::fabs(row.estimate - row.closed);
      row.ok = diff <= tolerance_sigmas * row.std_error + row.trunc_bound;
      double z;
      if (row.std_error > 0.0)
        z = (diff - row.trunc_bound) / row.std_error;
      else
        z = diff <= row.trunc_bound
                ? 0.0
                : std::numeric_limits<double>::infinity();
      report.worst_z = std::max(report.worst_z, z);
      report.pass = report.pass && row.ok;
      report.rows.push_back(row);
    }
  }
  return report;
}

}  // namespace fbfield
