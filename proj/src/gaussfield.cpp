#include "fbfield/gaussfield.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "fbfield/rng.hpp"

namespace fbfield {

namespace {

bool uses_single_index(KernelId::Tag tag) {
  return tag == KernelId::Tag::fbm || tag == KernelId::Tag::fbm_odd ||
         tag == KernelId::Tag::fbm_even;
}

bool requires_nonnegative_time(const KernelId& k) {
  return k.tag == KernelId::Tag::fbm_odd || k.tag == KernelId::Tag::fbm_even ||
         k.tag == KernelId::Tag::field_parity;
}

// Plain Cholesky; returns false on a negative pivot.  Exactly-zero pivots
// (degenerate coordinates such as t = 0, whose rows vanish identically) get
// a zero row in the factor, so semidefinite matrices with exact zeros pass.
bool try_cholesky(const std::vector<double>& a, std::size_t n,
                  std::vector<double>& l) {
  l.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) sum -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (sum > 0.0)
          l[i * n + i] = std::sqrt(sum);
        else if (sum != 0.0)
          return false;
      } else if (l[j * n + j] > 0.0) {
        l[i * n + j] = sum / l[j * n + j];
      } else if (sum != 0.0) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

double point_cov(const KernelId& kernel, const FieldPoint& a,
                 const FieldPoint& b) {
  if (uses_single_index(kernel.tag) && a.h != b.h)
    throw std::invalid_argument(
        "single-index kernel evaluated on points with different hurst values");
  switch (kernel.tag) {
    case KernelId::Tag::fbm:
      return fbm_cov(a.h, a.t, b.t);
    case KernelId::Tag::fbm_odd:
      return fbm_parity_cov(Parity::odd, a.h, a.t, b.t);
    case KernelId::Tag::fbm_even:
      return fbm_parity_cov(Parity::even, a.h, a.t, b.t);
    case KernelId::Tag::dfbf:
      return dfbf_cov(a.h, b.h, a.t, b.t);
    case KernelId::Tag::field_parity:
      return field_parity_cov(kernel.parity_i, kernel.parity_j, a.h, b.h, a.t,
                              b.t);
    case KernelId::Tag::fbf:
      return fbf_cov(a.h, b.h, a.t, b.t);
    case KernelId::Tag::well_balanced:
      return wb_field_cov(a.h, b.h, a.t, b.t);
  }
  throw std::logic_error("unknown kernel tag");
}

CovMatrix build_cov(std::span<const FieldPoint> points,
                    const KernelId& kernel) {
  if (points.empty()) throw std::invalid_argument("empty point set");
  if (kernel.tag == KernelId::Tag::field_parity &&
      kernel.parity_i != kernel.parity_j)
    throw std::invalid_argument(
        "mixed-parity cross-covariance is not symmetric; build equal-parity "
        "matrices");
  if (requires_nonnegative_time(kernel)) {
    for (const auto& pt : points)
      if (pt.t < 0.0)
        throw std::domain_error("parity kernels require nonnegative times");
  }
  const std::size_t n = points.size();
  CovMatrix m{std::vector<FieldPoint>(points.begin(), points.end()), kernel,
              std::vector<double>(n * n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = point_cov(kernel, points[i], points[j]);
      m.entries[i * n + j] = v;
      m.entries[j * n + i] = v;
    }
  }
  return m;
}

std::vector<double> CholeskyFactor::solve_prefix(
    std::size_t k, std::span<const double> b) const {
  if (k > n || b.size() != k)
    throw std::invalid_argument("prefix solve size mismatch");
  std::vector<double> x(b.begin(), b.end());
  for (std::size_t i = 0; i < k; ++i) {
    double sum = x[i];
    for (std::size_t j = 0; j < i; ++j) sum -= lower[i * n + j] * x[j];
    x[i] = sum / lower[i * n + i];
  }
  for (std::size_t i = k; i-- > 0;) {
    double sum = x[i];
    for (std::size_t j = i + 1; j < k; ++j) sum -= lower[j * n + i] * x[j];
    x[i] = sum / lower[i * n + i];
  }
  return x;
}

std::vector<double> CholeskyFactor::solve(std::span<const double> b) const {
  return solve_prefix(n, b);
}

CholeskyFactor factorize(const CovMatrix& m, double max_jitter) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("empty covariance matrix");
  double max_diag = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    max_diag = std::max(max_diag, std::fabs(m.at(i, i)));

  CholeskyFactor f;
  f.n = n;
  if (try_cholesky(m.entries, n, f.lower)) return f;

  std::vector<double> jittered = m.entries;
  for (double jitter = 1e-12 * max_diag; jitter <= max_jitter; jitter *= 10.0) {
    for (std::size_t i = 0; i < n; ++i)
      jittered[i * n + i] = m.at(i, i) + jitter;
    if (try_cholesky(jittered, n, f.lower)) {
      f.jitter_applied = jitter;
      return f;
    }
  }
  throw NotPositiveDefiniteError(
      "covariance not positive definite within jitter budget");
}

PathEnsemble sample(const CovMatrix& m, std::size_t n_paths, std::uint64_t seed,
                    double max_jitter) {
  const CholeskyFactor f = factorize(m, max_jitter);
  const std::size_t n = m.size();
  PathEnsemble e{m.points, m.kernel, SampleMethod::cholesky,
                 seed,     n_paths,  std::vector<double>(n_paths * n, 0.0)};
  std::vector<double> z(n);
  for (std::size_t p = 0; p < n_paths; ++p) {
    NormalStream stream(seed, p);
    for (std::size_t i = 0; i < n; ++i) z[i] = stream.next_normal();
    double* row = e.values.data() + p * n;
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j <= i; ++j) sum += f.lower[i * n + j] * z[j];
      row[i] = sum;
    }
  }
  return e;
}

PathEnsemble sample(const CovMatrix& m, std::size_t n_paths,
                    std::uint64_t seed) {
  return sample(m, n_paths, seed, default_max_jitter(m));
}

std::vector<double> condition(const CovMatrix& gram,
                              std::span<const double> cross) {
  const std::size_t n = gram.size();
  if (cross.size() != n)
    throw std::invalid_argument("cross-covariance size mismatch");
  const CholeskyFactor f = factorize(gram, default_max_jitter(gram));
  std::vector<double> w = f.solve(cross);

  // One step of iterative refinement, then enforce the residual contract.
  double cross_norm = 0.0;
  for (double v : cross) cross_norm += v * v;
  cross_norm = std::sqrt(cross_norm);
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) sum += gram.at(i, j) * w[j];
      r[i] = cross[i] - sum;
    }
    double res_norm = 0.0;
    for (double v : r) res_norm += v * v;
    res_norm = std::sqrt(res_norm);
    if (res_norm <= 1e-8 * cross_norm) return w;
    if (pass == 1)
      throw std::runtime_error("conditioning residual exceeds tolerance");
    std::vector<double> dw = f.solve(r);
    for (std::size_t i = 0; i < n; ++i) w[i] += dw[i];
  }
  return w;
}

PathEnsemble assemble_fbf(const PathEnsemble& b_paths,
                          const PathEnsemble& w_paths) {
  if (b_paths.points.size() != w_paths.points.size() ||
      !std::equal(b_paths.points.begin(), b_paths.points.end(),
                  w_paths.points.begin()))
    throw std::invalid_argument("component ensembles use different grids");
  if (b_paths.n_paths != w_paths.n_paths)
    throw std::invalid_argument("component ensembles have different sizes");
  if (b_paths.seed == w_paths.seed)
    throw std::invalid_argument("component ensembles must use distinct seeds");

  const std::size_t n = b_paths.points.size();
  std::vector<std::size_t> twin(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool found = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (b_paths.points[j].t == -b_paths.points[i].t &&
          b_paths.points[j].h == b_paths.points[i].h) {
        twin[i] = j;
        found = true;
        break;
      }
    }
    if (!found)
      throw std::invalid_argument("grid must contain both signs of each time");
  }

  PathEnsemble out{b_paths.points,
                   KernelId::fbf(),
                   SampleMethod::cholesky,
                   b_paths.seed,
                   b_paths.n_paths,
                   std::vector<double>(b_paths.values.size(), 0.0)};
  for (std::size_t p = 0; p < out.n_paths; ++p) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t pos = b_paths.points[i].t >= 0.0 ? i : twin[i];
      const std::size_t neg = b_paths.points[i].t >= 0.0 ? twin[i] : i;
      const double be = 0.5 * (b_paths.value(p, pos) + b_paths.value(p, neg));
      const double wo = 0.5 * (w_paths.value(p, pos) - w_paths.value(p, neg));
      out.values[p * n + i] =
          b_paths.points[i].t >= 0.0 ? be + wo : be - wo;
    }
  }
  return out;
}

CovEstimate estimate_cov(const PathEnsemble& e, std::size_t i, std::size_t j) {
  const std::size_t n = e.n_paths;
  if (n < 2) throw std::invalid_argument("need at least two paths");
  double mean = 0.0;
  for (std::size_t p = 0; p < n; ++p) mean += e.value(p, i) * e.value(p, j);
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double d = e.value(p, i) * e.value(p, j) - mean;
    var += d * d;
  }
  var /= static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

double gaussian_cov_std_error(const CovMatrix& m, std::size_t i, std::size_t j,
                              std::size_t n_paths) {
  const double cii = m.at(i, i);
  const double cjj = m.at(j, j);
  const double cij = m.at(i, j);
  return std::sqrt((cii * cjj + cij * cij) / static_cast<double>(n_paths));
}

}  // namespace fbfield
