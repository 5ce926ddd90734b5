#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fbfield/gaussfield.hpp"
#include "fbfield/mbm.hpp"
#include "fbfield/mcoracle.hpp"

using namespace fbfield;

TEST_CASE("profile constructors validate their arguments") {
  CHECK_NOTHROW(HurstProfile::constant(0.5));
  CHECK_THROWS_AS(HurstProfile::constant(0.0), std::domain_error);
  CHECK_THROWS_AS(HurstProfile::ramp(0.2, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(HurstProfile::ramp(0.2, 0.8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(HurstProfile::table({}), std::invalid_argument);
  CHECK_THROWS_AS(HurstProfile::table({{1.0, 0.4}, {1.0, 0.6}}),
                  std::invalid_argument);
}

TEST_CASE("profiles interpolate, extend and clamp") {
  const HurstProfile ramp = HurstProfile::ramp(0.2, 0.8, 2.0);
  CHECK(ramp(0.0) == 0.2);
  CHECK(ramp(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ramp(2.0) == 0.8);
  CHECK(ramp(5.0) == 0.8);  // constant extension
  const HurstProfile table =
      HurstProfile::table({{1.0, 0.3}, {2.0, 0.7}, {4.0, 0.5}});
  CHECK(table(0.5) == 0.3);
  CHECK(table(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(table(3.0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(table(9.0) == 0.5);
  // Values hugging the ends of (0, 1) are clamped away from the boundary.
  const HurstProfile high = HurstProfile::constant(0.9995);
  CHECK(high(1.0) == 0.999);
  CHECK(high.at(1.0).value() == 0.999);
}

TEST_CASE("profile tables parse comments, headers and report bad lines") {
  std::istringstream good(
      "# piecewise profile\n"
      "t H\n"
      "0.5 0.30\n"
      "\n"
      "1.5 0.70  # knee\n");
  const HurstProfile p = load_profile_table(good);
  CHECK(p(0.5) == 0.30);
  CHECK(p(1.0) == doctest::Approx(0.5).epsilon(1e-15));
  std::istringstream bad(
      "0.5 0.30\n"
      "1.5 banana\n");
  CHECK_THROWS_AS(load_profile_table(bad), std::runtime_error);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(load_profile_table(empty), std::invalid_argument);
}

TEST_CASE("constant profiles reduce to the one-index laws") {
  const HurstProfile p = HurstProfile::constant(0.35);
  for (double t : {0.5, 1.0, 2.5})
    for (double s : {0.4, 1.7}) {
      CAPTURE(t);
      CAPTURE(s);
      CHECK(mbm_cov_x(p, t, s) ==
            doctest::Approx(fbm_cov(Hurst(0.35), t, s)).epsilon(1e-13));
      CHECK(mbm_cov_y(p, t, s) ==
            doctest::Approx(fbm_cov(Hurst(0.35), t, s)).epsilon(1e-13));
    }
}

TEST_CASE("diagonal variance follows the local index") {
  const HurstProfile p = HurstProfile::ramp(0.25, 0.75, 2.0);
  for (double t : {0.25, 0.8, 1.5, 2.0}) {
    CAPTURE(t);
    const double want = std::pow(t, 2.0 * p(t));
    CHECK(std::fabs(mbm_cov_x(p, t, t) - want) <= 1e-12 * want);
    CHECK(std::fabs(mbm_cov_y(p, t, t) - want) <= 1e-12 * want);
  }
}

TEST_CASE("the two variants disagree off the diagonal for varying profiles") {
  const HurstProfile p = HurstProfile::ramp(0.25, 0.75, 2.0);
  const double x = mbm_cov_x(p, 0.5, 1.5);
  const double y = mbm_cov_y(p, 0.5, 1.5);
  CHECK(std::fabs(x - y) > 1e-3);
}

TEST_CASE("multifractional sampling matches its covariance") {
  const HurstProfile p = HurstProfile::ramp(0.3, 0.7, 2.0);
  const std::vector<double> grid = {0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0};
  const std::size_t g = grid.size();
  const std::size_t n = 20000;
  for (MbmWhich which : {MbmWhich::x, MbmWhich::y}) {
    CAPTURE(which == MbmWhich::x);
    const PathEnsemble e = mbm_sample(p, grid, which, n, 321);
    CovMatrix target;
    target.kernel =
        which == MbmWhich::x ? KernelId::dfbf() : KernelId::well_balanced();
    for (double t : grid) target.points.push_back({t, p.at(t)});
    target.entries.assign(g * g, 0.0);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = 0; j < g; ++j)
        target.entries[i * g + j] =
            which == MbmWhich::x ? mbm_cov_x(p, grid[i], grid[j])
                                 : mbm_cov_y(p, grid[i], grid[j]);
    for (std::size_t i = 0; i < g; ++i)
      for (std::size_t j = i; j < g; ++j) {
        CAPTURE(i);
        CAPTURE(j);
        const CovEstimate est = estimate_cov(e, i, j);
        const double se = gaussian_cov_std_error(target, i, j, n);
        CHECK(std::fabs(est.value - target.at(i, j)) <= 4.0 * se);
      }
  }
}

TEST_CASE("nonanticipating variant agrees with the moving-average oracle") {
  const HurstProfile p = HurstProfile::ramp(0.3, 0.7, 2.0);
  const std::vector<double> grid = {0.5, 1.5};
  std::vector<FieldPoint> pts;
  for (double t : grid) pts.push_back({t, p.at(t)});
  MAScheme s;
  s.cutoff = 25.0;
  s.mesh = 1.0 / 128.0;
  const MaEnsemble e = ma_sample(pts, s, 1500, 642);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = i; j < 2; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      const CovEstimate est = estimate_cov(e.paths, i, j);
      const double closed = mbm_cov_x(p, grid[i], grid[j]);
      const double allowance =
          truncation_l2_bound(e, i) * std::sqrt(mbm_cov_x(p, grid[j], grid[j])) +
          truncation_l2_bound(e, j) * std::sqrt(mbm_cov_x(p, grid[i], grid[i]));
      CHECK(std::fabs(est.value - closed) <= 4.0 * est.std_error + allowance);
    }
}

TEST_CASE("discrepancy report separates the two variants") {
  const std::vector<std::pair<double, double>> pairs = {
      {2.0, 1.0}, {4.0, 2.0}, {3.0, 1.0}};
  const CohenReport r = cohen_check(Hurst(0.3), pairs);
  CHECK(r.pass);
  CHECK_FALSE(r.no_discrepancy_expected);
  CHECK(r.r_y_spread <= 1e-12);
  CHECK(r.r_x_spread > 1e-3);
  REQUIRE(r.points.size() == 3);
  // Proportional scaling leaves r_x unchanged; only shape changes move it.
  CHECK(std::fabs(r.points[0].r_x - r.points[1].r_x) <= 1e-12);
  CHECK(std::fabs(r.points[0].r_x - r.points[2].r_x) > 1e-3);
}

TEST_CASE("at the midpoint index no discrepancy is expected or found") {
  const std::vector<std::pair<double, double>> pairs = {
      {2.0, 1.0}, {3.0, 1.0}};
  const CohenReport r = cohen_check(Hurst(0.5), pairs);
  CHECK(r.no_discrepancy_expected);
  CHECK(r.pass);
  CHECK(r.r_x_spread <= 1e-12);
  CHECK(r.r_y_spread <= 1e-12);
}

TEST_CASE("discrepancy inputs are validated") {
  const std::vector<std::pair<double, double>> one = {{2.0, 1.0}};
  CHECK_THROWS_AS(cohen_check(Hurst(0.3), one), std::invalid_argument);
  CHECK_THROWS_AS(cohen_discrepancy(Hurst(0.3), 0.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cohen_discrepancy(Hurst(0.3), 1.0, -1.0),
                  std::invalid_argument);
}
