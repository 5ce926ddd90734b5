#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fbfield/gaussfield.hpp"
#include "fbfield/rng.hpp"

using namespace fbfield;

namespace {
CovMatrix hand_matrix(std::vector<double> entries, std::size_t n) {
  CovMatrix m;
  m.kernel = KernelId::fbm();
  for (std::size_t i = 0; i < n; ++i)
    m.points.push_back({static_cast<double>(i + 1), Hurst(0.5)});
  m.entries = std::move(entries);
  return m;
}
}  // namespace

TEST_CASE("point covariance dispatches per kernel and validates indices") {
  const FieldPoint a{1.2, Hurst(0.3)};
  const FieldPoint b{0.7, Hurst(0.3)};
  CHECK(point_cov(KernelId::fbm(), a, b) ==
        doctest::Approx(fbm_cov(Hurst(0.3), 1.2, 0.7)).epsilon(1e-15));
  const FieldPoint c{0.7, Hurst(0.6)};
  CHECK(point_cov(KernelId::dfbf(), a, c) ==
        doctest::Approx(dfbf_cov(Hurst(0.3), Hurst(0.6), 1.2, 0.7))
            .epsilon(1e-15));
  // Single-index kernels refuse mixed Hurst values.
  CHECK_THROWS_AS(point_cov(KernelId::fbm(), a, c), std::invalid_argument);
  CHECK_THROWS_AS(point_cov(KernelId::fbm_odd(), a, c), std::invalid_argument);
}

TEST_CASE("covariance assembly validates the point set") {
  CHECK_THROWS_AS(build_cov({}, KernelId::fbm()), std::invalid_argument);
  const std::vector<FieldPoint> neg = {{-1.0, Hurst(0.4)}, {1.0, Hurst(0.4)}};
  CHECK_THROWS_AS(build_cov(neg, KernelId::fbm_odd()), std::domain_error);
  const std::vector<FieldPoint> pos = {{0.5, Hurst(0.4)}, {1.0, Hurst(0.4)}};
  CHECK_THROWS_AS(
      build_cov(pos, KernelId::field_parity(Parity::odd, Parity::even)),
      std::invalid_argument);
  const CovMatrix m = build_cov(pos, KernelId::fbm_even());
  CHECK(m.size() == 2);
  CHECK(m.at(0, 1) == m.at(1, 0));
  CHECK(m.at(0, 1) ==
        doctest::Approx(fbm_parity_cov(Parity::even, Hurst(0.4), 0.5, 1.0))
            .epsilon(1e-15));
}

TEST_CASE("factorization handles clean, rank-deficient and indefinite input") {
  SUBCASE("positive definite, no jitter") {
    const std::vector<FieldPoint> pts = {{0.5, Hurst(0.7)}, {1.0, Hurst(0.7)},
                                         {2.0, Hurst(0.7)}};
    const CovMatrix m = build_cov(pts, KernelId::fbm());
    const CholeskyFactor f = factorize(m, default_max_jitter(m));
    CHECK(f.jitter_applied == 0.0);
    CHECK(f.n == 3);
  }
  SUBCASE("exact zero row from t = 0 stays exact") {
    const std::vector<FieldPoint> pts = {{0.0, Hurst(0.3)}, {1.0, Hurst(0.3)}};
    const CovMatrix m = build_cov(pts, KernelId::fbm());
    CHECK(m.at(0, 0) == 0.0);
    const CholeskyFactor f = factorize(m, default_max_jitter(m));
    CHECK(f.jitter_applied == 0.0);
    const PathEnsemble e = sample(m, 64, 99);
    for (std::size_t p = 0; p < e.n_paths; ++p) CHECK(e.value(p, 0) == 0.0);
  }
  SUBCASE("duplicated point gives a consistent rank-deficient factor") {
    const std::vector<FieldPoint> pts = {{1.0, Hurst(0.6)}, {1.0, Hurst(0.6)}};
    const CovMatrix m = build_cov(pts, KernelId::fbm());
    const CholeskyFactor f = factorize(m, default_max_jitter(m));
    CHECK(f.jitter_applied == 0.0);
    const PathEnsemble e = sample(m, 16, 5);
    for (std::size_t p = 0; p < e.n_paths; ++p)
      CHECK(e.value(p, 0) == e.value(p, 1));
  }
  SUBCASE("indefinite matrices are rejected after the jitter budget") {
    const CovMatrix bad = hand_matrix({1.0, 2.0, 2.0, 1.0}, 2);
    CHECK_THROWS_AS(factorize(bad, 1e-8), NotPositiveDefiniteError);
  }
}

TEST_CASE("prefix solves act on leading principal blocks") {
  // Dyadic fixture: G w = cross with w = (-0.1875, 0.375, 0.5).
  const CovMatrix g = hand_matrix(
      {4.0, 2.0, 0.0, 2.0, 4.0, 2.0, 0.0, 2.0, 4.0}, 3);
  const std::vector<double> cross = {0.0, 2.125, 2.75};
  const std::vector<double> w = condition(g, cross);
  REQUIRE(w.size() == 3);
  CHECK(w[0] == doctest::Approx(-0.1875).epsilon(1e-13));
  CHECK(w[1] == doctest::Approx(0.375).epsilon(1e-13));
  CHECK(w[2] == doctest::Approx(0.5).epsilon(1e-13));
  // Leading 2x2 block solve: [[4,2],[2,4]] x = (0, 2.125).
  const CholeskyFactor f = factorize(g, 0.0);
  const std::vector<double> x2 =
      f.solve_prefix(2, std::vector<double>{0.0, 2.125});
  REQUIRE(x2.size() == 2);
  CHECK(x2[0] == doctest::Approx(-2.125 / 6.0).epsilon(1e-13));
  CHECK(x2[1] == doctest::Approx(2.125 / 3.0).epsilon(1e-13));
}

TEST_CASE("conditioning drives the residual below the advertised bound") {
  std::vector<FieldPoint> pts;
  for (int i = 1; i <= 24; ++i) pts.push_back({i / 8.0, Hurst(0.7)});
  const CovMatrix g = build_cov(pts, KernelId::fbm());
  std::vector<double> cross(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    cross[i] = fbm_cov(Hurst(0.7), pts[i].t, 3.5);
  const std::vector<double> w = condition(g, cross);
  double cross_norm = 0.0, res_norm = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double gi = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j) gi += g.at(i, j) * w[j];
    res_norm += (gi - cross[i]) * (gi - cross[i]);
    cross_norm += cross[i] * cross[i];
  }
  CHECK(std::sqrt(res_norm) <= 1e-8 * std::sqrt(cross_norm));
}

TEST_CASE("sampling is deterministic and path-indexed") {
  const std::vector<FieldPoint> pts = {{0.5, Hurst(0.4)}, {1.5, Hurst(0.4)}};
  const CovMatrix m = build_cov(pts, KernelId::fbm());
  const PathEnsemble a = sample(m, 8, 1234);
  const PathEnsemble b = sample(m, 8, 1234);
  CHECK(a.values == b.values);
  const PathEnsemble c = sample(m, 8, 1235);
  CHECK(a.values != c.values);
  // Path p depends only on (seed, p), not on the ensemble size.
  const PathEnsemble d = sample(m, 3, 1234);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t i = 0; i < 2; ++i)
      CHECK(a.value(p, i) == d.value(p, i));
}

TEST_CASE("sampled ensembles reproduce the target covariance") {
  const std::vector<FieldPoint> pts = {{1.0, Hurst(0.5)}, {2.0, Hurst(0.5)}};
  const CovMatrix m = build_cov(pts, KernelId::fbm());
  const std::size_t n = 6000;
  const PathEnsemble e = sample(m, n, 777);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = i; j < 2; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      const CovEstimate est = estimate_cov(e, i, j);
      const double se = gaussian_cov_std_error(m, i, j, n);
      CHECK(std::fabs(est.value - m.at(i, j)) <= 4.0 * se);
    }
}

TEST_CASE("covariance estimator worked example") {
  PathEnsemble e;
  e.points = {{1.0, Hurst(0.5)}, {2.0, Hurst(0.5)}};
  e.kernel = KernelId::fbm();
  e.n_paths = 4;
  e.values = {1.0, 1.0, -1.0, 1.0, 2.0, 0.0, 0.0, 2.0};
  const CovEstimate est = estimate_cov(e, 0, 1);
  CHECK(est.value == 0.0);
  CHECK(est.std_error == doctest::Approx(std::sqrt(1.0 / 6.0)).epsilon(1e-14));
  CHECK(gaussian_cov_std_error(hand_matrix({2.0, 1.0, 1.0, 3.0}, 2), 0, 1,
                               100) ==
        doctest::Approx(std::sqrt(0.07)).epsilon(1e-14));
}

TEST_CASE("two-noise assembly follows the parity algebra") {
  const std::vector<FieldPoint> pts = {{-1.0, Hurst(0.4)}, {1.0, Hurst(0.4)},
                                       {0.0, Hurst(0.4)}};
  PathEnsemble bp, wp;
  bp.points = wp.points = pts;
  bp.kernel = wp.kernel = KernelId::dfbf();
  bp.n_paths = wp.n_paths = 1;
  bp.seed = 1;
  wp.seed = 2;
  bp.values = {3.0, 5.0, 0.5};   // B(-1), B(1), B(0)
  wp.values = {-2.0, 6.0, 0.25}; // W(-1), W(1), W(0)
  const PathEnsemble out = assemble_fbf(bp, wp);
  const double be = (5.0 + 3.0) / 2.0;
  const double wo = (6.0 - (-2.0)) / 2.0;
  CHECK(out.value(0, 1) == be + wo);   // t = +1
  CHECK(out.value(0, 0) == be - wo);   // t = -1
  CHECK(out.value(0, 2) == 0.5);       // t = 0: even part of B only
  CHECK((out.kernel.tag == KernelId::Tag::fbf));
  // Shared seeds are rejected: the two noises must be independent.
  wp.seed = 1;
  CHECK_THROWS_AS(assemble_fbf(bp, wp), std::invalid_argument);
}

TEST_CASE("assembled field matches its closed covariance empirically") {
  const Hurst h{0.35}, h2{0.65};
  std::vector<FieldPoint> pts;
  for (double t : {-1.0, -0.5, 0.5, 1.0}) {
    pts.push_back({t, h});
    pts.push_back({t, h2});
  }
  const CovMatrix bm = build_cov(pts, KernelId::dfbf());
  const std::size_t n = 4000;
  const PathEnsemble b = sample(bm, n, 41);
  const PathEnsemble w = sample(bm, n, 42);
  const PathEnsemble x = assemble_fbf(b, w);
  const CovMatrix target = build_cov(pts, KernelId::fbf());
  for (std::size_t i = 0; i < pts.size(); i += 3)
    for (std::size_t j = i; j < pts.size(); j += 2) {
      CAPTURE(i);
      CAPTURE(j);
      const CovEstimate est = estimate_cov(x, i, j);
      const double se = gaussian_cov_std_error(target, i, j, n);
      CHECK(std::fabs(est.value - target.at(i, j)) <= 4.0 * se);
    }
}

namespace {

// Smallest eigenvalue by cyclic Jacobi sweeps on a dense copy.
double min_eig(const CovMatrix& m) {
  const std::size_t n = m.size();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m.at(i, j);
  for (int sweep = 0; sweep < 60; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    if (off <= 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (std::fabs(apq) < 1e-300) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double tt = (theta >= 0.0 ? 1.0 : -1.0) /
                          (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(tt * tt + 1.0), s = tt * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
      }
  }
  double lo = a[0];
  for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, a[i * n + i]);
  return lo;
}

std::vector<KernelId> all_kernels() {
  return {KernelId::fbm(),
          KernelId::fbm_odd(),
          KernelId::fbm_even(),
          KernelId::dfbf(),
          KernelId::field_parity(Parity::odd, Parity::odd),
          KernelId::field_parity(Parity::even, Parity::even),
          KernelId::fbf(),
          KernelId::well_balanced()};
}

bool needs_positive_time(const KernelId& id) {
  return id.tag == KernelId::Tag::fbm_odd ||
         id.tag == KernelId::Tag::fbm_even ||
         id.tag == KernelId::Tag::field_parity;
}

bool needs_single_index(const KernelId& id) {
  return id.tag == KernelId::Tag::fbm || id.tag == KernelId::Tag::fbm_odd ||
         id.tag == KernelId::Tag::fbm_even;
}

std::vector<FieldPoint> random_grid(NormalStream& rng, const KernelId& id,
                                    std::size_t max_points) {
  const std::size_t n =
      2 + static_cast<std::size_t>(rng.next_uniform() * double(max_points - 1));
  const double shared_h = 0.1 + 0.8 * rng.next_uniform();
  std::vector<FieldPoint> pts;
  for (std::size_t i = 0; i < std::min(n, max_points); ++i) {
    double t = -2.0 + 4.0 * rng.next_uniform();
    if (needs_positive_time(id))
      t = 0.05 + 1.95 * rng.next_uniform();
    else if (std::fabs(t) < 0.05)
      t = t < 0.0 ? -0.05 : 0.05;
    const double h =
        needs_single_index(id) ? shared_h : 0.1 + 0.8 * rng.next_uniform();
    pts.push_back({t, Hurst(h)});
  }
  return pts;
}

}  // namespace

TEST_CASE("kernel Gram matrices stay positive semidefinite on random grids") {
  NormalStream rng(0x9D5Dull, 0);
  for (const KernelId& id : all_kernels()) {
    for (int rep = 0; rep < 20; ++rep) {
      const std::vector<FieldPoint> pts = random_grid(rng, id, 16);
      const CovMatrix m = build_cov(pts, id);
      double max_diag = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i)
        max_diag = std::max(max_diag, m.at(i, i));
      const double lo = min_eig(m);
      CAPTURE(static_cast<int>(id.tag));
      CAPTURE(rep);
      CHECK(lo >= -1e-8 * std::max(max_diag, 1.0));
    }
  }
}

TEST_CASE("every kernel's ensembles reproduce their Gram matrix entrywise") {
  NormalStream rng(0x6A1Dull, 1);
  const std::size_t n_paths = 20000;
  std::uint64_t seed = 0xC0C0Aull;
  for (const KernelId& id : all_kernels()) {
    for (int rep = 0; rep < 10; ++rep) {
      const std::vector<FieldPoint> pts = random_grid(rng, id, 12);
      const CovMatrix m = build_cov(pts, id);
      const PathEnsemble e = sample(m, n_paths, seed++);
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = i; j < m.size(); ++j) {
          const double est = estimate_cov(e, i, j).value;
          const double se = gaussian_cov_std_error(m, i, j, n_paths);
          CAPTURE(static_cast<int>(id.tag));
          CAPTURE(rep);
          CAPTURE(i);
          CAPTURE(j);
          CHECK(std::fabs(est - m.at(i, j)) <= 4.0 * se);
        }
    }
  }
}

TEST_CASE("sampled means vanish and empty ensembles keep their metadata") {
  const std::vector<FieldPoint> pts = {
      {0.5, Hurst(0.7)}, {1.0, Hurst(0.7)}, {2.0, Hurst(0.7)}};
  const CovMatrix m = build_cov(pts, KernelId::fbm());
  const std::size_t n = 100000;
  const PathEnsemble e = sample(m, n, 24601);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double mean = 0.0;
    for (std::size_t p = 0; p < n; ++p) mean += e.value(p, i);
    mean /= double(n);
    const double se = std::sqrt(m.at(i, i) / double(n));
    CAPTURE(i);
    CHECK(std::fabs(mean) <= 4.0 * se);
  }
  const PathEnsemble empty = sample(m, 0, 24601);
  CHECK(empty.n_paths == 0);
  CHECK(empty.values.empty());
  CHECK(empty.points.size() == pts.size());
  CHECK(empty.kernel.tag == KernelId::Tag::fbm);
}

TEST_CASE("assembled unit-time variance hits the corrected normalization") {
  // Var Z(1) = a(h, h) * 1 = 1 for the symmetrized field.
  const Hurst h{0.3};
  const std::vector<FieldPoint> pts = {{1.0, h}, {-1.0, h}};
  const CovMatrix m = build_cov(pts, KernelId::dfbf());
  const std::size_t n = 100000;
  const PathEnsemble b = sample(m, n, 1111);
  const PathEnsemble w = sample(m, n, 2222);
  const PathEnsemble z = assemble_fbf(b, w);
  double var = 0.0;
  for (std::size_t p = 0; p < n; ++p) var += z.value(p, 0) * z.value(p, 0);
  var /= double(n);
  const double se = std::sqrt(2.0 / double(n));  // Var of a unit Gaussian^2 mean
  CHECK(std::fabs(var - 1.0) <= 4.0 * se);
}
