#include "fbfield/mbm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fbfield/kernels.hpp"

namespace fbfield {

namespace {

double clamp_h(double h) {
  return std::clamp(h, kProfileClamp, 1.0 - kProfileClamp);
}

}  // namespace

HurstProfile HurstProfile::constant(double h) {
  (void)Hurst(h);  // range check
  HurstProfile p;
  p.knots_ = {{0.0, h}};
  p.beta_ = std::numeric_limits<double>::infinity();
  return p;
}

HurstProfile HurstProfile::ramp(double h0, double h1, double horizon) {
  (void)Hurst(h0);
  (void)Hurst(h1);
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw std::invalid_argument("ramp horizon must be positive");
  HurstProfile p;
  p.knots_ = {{0.0, h0}, {horizon, h1}};
  return p;
}

HurstProfile HurstProfile::table(
    std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) throw std::invalid_argument("empty profile table");
  double prev_t = -std::numeric_limits<double>::infinity();
  for (const auto& [t, h] : knots) {
    if (!std::isfinite(t) || t <= prev_t)
      throw std::invalid_argument("profile knots must increase strictly in t");
    (void)Hurst(h);
    prev_t = t;
  }
  HurstProfile p;
  p.knots_ = std::move(knots);
  return p;
}

double HurstProfile::operator()(double t) const {
  if (!std::isfinite(t)) throw std::invalid_argument("nonfinite time");
  if (knots_.size() == 1 || t <= knots_.front().first)
    return clamp_h(knots_.front().second);
  if (t >= knots_.back().first) return clamp_h(knots_.back().second);
  const auto hi = std::upper_bound(
      knots_.begin(), knots_.end(), t,
      [](double v, const std::pair<double, double>& k) { return v < k.first; });
  const auto lo = hi - 1;
  const double w = (t - lo->first) / (hi->first - lo->first);
  return clamp_h(lo->second + w * (hi->second - lo->second));
}

HurstProfile load_profile_table(std::istream& in) {
  std::vector<std::pair<double, double>> knots;
  std::string line;
  bool header_allowance = true;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double t, h;
    if (row >> t >> h) {
      knots.emplace_back(t, h);
      header_allowance = false;
      continue;
    }
    std::istringstream blank_check(line);
    std::string token;
    if (!(blank_check >> token)) continue;  // blank or comment-only line
    if (header_allowance) {
      header_allowance = false;  // one non-numeric header line is fine
      continue;
    }
    throw std::runtime_error("unparsable profile line " +
                             std::to_string(line_no) + ": " + line);
  }
  return HurstProfile::table(std::move(knots));
}

namespace {

void check_mbm_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t))
    throw std::invalid_argument("mbm times must be >= 0");
}

}  // namespace

double mbm_cov_x(const HurstProfile& profile, double t, double s) {
  check_mbm_time(t);
  check_mbm_time(s);
  return dfbf_cov(profile.at(t), profile.at(s), t, s);
}

double mbm_cov_y(const HurstProfile& profile, double t, double s) {
  check_mbm_time(t);
  check_mbm_time(s);
  return wb_field_cov(profile.at(t), profile.at(s), t, s);
}

PathEnsemble mbm_sample(const HurstProfile& profile,
                        std::span<const double> grid, MbmWhich which,
                        std::size_t n_paths, std::uint64_t seed) {
  std::vector<FieldPoint> points;
  points.reserve(grid.size());
  for (double t : grid) {
    check_mbm_time(t);
    points.push_back({t, profile.at(t)});
  }
  const KernelId kernel =
      which == MbmWhich::x ? KernelId::dfbf() : KernelId::well_balanced();
  return sample(build_cov(points, kernel), n_paths, seed);
}

CohenPoint cohen_discrepancy(Hurst h, double t, double s) {
  if (!(t > 0.0) || !(s > 0.0) || !std::isfinite(t) || !std::isfinite(s))
    throw std::invalid_argument("cohen ratios need t > 0 and s > 0");
  const Hurst dual = DualPair(h).h_dual();
  const double m = std::min(t, s);
  CohenPoint p;
  p.t = t;
  p.s = s;
  p.r_x = dfbf_cov(h, dual, t, s) / m;
  p.r_y = wb_field_cov(h, dual, t, s) / m;
  return p;
}

CohenReport cohen_check(Hurst h,
                        std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 2)
    throw std::invalid_argument("need at least two (t, s) pairs");
  CohenReport report;
  report.h = h.value();
  report.no_discrepancy_expected = h.value() == 0.5;
  double rx_lo = std::numeric_limits<double>::infinity(), rx_hi = -rx_lo;
  double ry_lo = rx_lo, ry_hi = -rx_lo;
  for (const auto& [t, s] : pairs) {
    const CohenPoint p = cohen_discrepancy(h, t, s);
    rx_lo = std::min(rx_lo, p.r_x);
    rx_hi = std::max(rx_hi, p.r_x);
    ry_lo = std::min(ry_lo, p.r_y);
    ry_hi = std::max(ry_hi, p.r_y);
    report.points.push_back(p);
  }
  report.r_x_spread = rx_hi - rx_lo;
  report.r_y_spread = ry_hi - ry_lo;
  constexpr double kConstantTol = 1e-12;
  constexpr double kSpreadFloor = 1e-3;
  if (report.no_discrepancy_expected)
    report.pass = report.r_x_spread <= kConstantTol &&
                  report.r_y_spread <= kConstantTol;
  else
    report.pass = report.r_y_spread <= kConstantTol &&
                  report.r_x_spread > kSpreadFloor;
  return report;
}

}  // namespace fbfield
