// Command-line front end: kernel evaluation, covariance matrices, exact and
// moving-average sampling, Monte Carlo verification, martingale audits, and
// the multifractional law-discrepancy report.  Deterministic seeded runs,
// CSV or JSON artifacts.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fbfield/gaussfield.hpp"
#include "fbfield/kernels.hpp"
#include "fbfield/martingales.hpp"
#include "fbfield/mbm.hpp"
#include "fbfield/mcoracle.hpp"
#include "fbfield/quadrature.hpp"
#include "fbfield/specfun.hpp"

namespace {

using fbfield::FieldPoint;
using fbfield::Hurst;
using fbfield::KernelId;
using fbfield::Parity;
using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// "a:b:n" (n equispaced points on [a, b]) or a comma-separated list.
std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  const bool range = text.find(':') != std::string::npos;
  std::istringstream in(text);
  std::string item;
  const char sep = range ? ':' : ',';
  std::vector<std::string> parts;
  while (std::getline(in, item, sep)) parts.push_back(item);
  const auto to_double = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
  };
  if (range) {
    if (parts.size() != 3)
      throw std::invalid_argument("grid range must be a:b:n");
    const double a = to_double(parts[0]);
    const double b = to_double(parts[1]);
    const long n = std::lround(to_double(parts[2]));
    if (n < 1) throw std::invalid_argument("grid count must be >= 1");
    if (n == 1) {
      out.push_back(a);
      return out;
    }
    for (long i = 0; i < n; ++i)
      out.push_back(a + (b - a) * static_cast<double>(i) /
                            static_cast<double>(n - 1));
    return out;
  }
  for (const auto& p : parts) out.push_back(to_double(p));
  if (out.empty()) throw std::invalid_argument("empty grid");
  return out;
}

// "t,s;t,s;..."
std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::istringstream in(text);
  std::string chunk;
  while (std::getline(in, chunk, ';')) {
    const auto comma = chunk.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("pair must be t,s: " + chunk);
    out.emplace_back(std::stod(chunk.substr(0, comma)),
                     std::stod(chunk.substr(comma + 1)));
  }
  if (out.empty()) throw std::invalid_argument("no pairs given");
  return out;
}

Parity parse_parity(const std::string& s) {
  if (s == "odd") return Parity::odd;
  if (s == "even") return Parity::even;
  throw std::invalid_argument("parity must be odd or even: " + s);
}

KernelId parse_kernel(const std::string& name, const std::string& parity_i,
                      const std::string& parity_j) {
  if (name == "fbm") return KernelId::fbm();
  if (name == "fbm-odd") return KernelId::fbm_odd();
  if (name == "fbm-even") return KernelId::fbm_even();
  if (name == "dfbf") return KernelId::dfbf();
  if (name == "fbf") return KernelId::fbf();
  if (name == "wb") return KernelId::well_balanced();
  if (name == "field-parity")
    return KernelId::field_parity(parse_parity(parity_i),
                                  parse_parity(parity_j));
  throw std::invalid_argument("unknown kernel id: " + name);
}

fbfield::MaKind parse_kind(const std::string& name) {
  if (name == "nonanticipating") return fbfield::MaKind::nonanticipating;
  if (name == "well-balanced") return fbfield::MaKind::well_balanced;
  if (name == "log") return fbfield::MaKind::log_kernel;
  throw std::invalid_argument("unknown moving-average kind: " + name);
}

fbfield::HurstProfile parse_profile(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument(
        "profile must be constant:H, ramp:h0,h1,T or table:path");
  const std::string head = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (head == "constant") return fbfield::HurstProfile::constant(std::stod(rest));
  if (head == "ramp") {
    std::istringstream in(rest);
    std::string a, b, c;
    if (!std::getline(in, a, ',') || !std::getline(in, b, ',') ||
        !std::getline(in, c, ','))
      throw std::invalid_argument("ramp profile needs h0,h1,T");
    return fbfield::HurstProfile::ramp(std::stod(a), std::stod(b),
                                       std::stod(c));
  }
  if (head == "table") {
    std::ifstream file(rest);
    if (!file) throw std::invalid_argument("cannot open profile table: " + rest);
    return fbfield::load_profile_table(file);
  }
  throw std::invalid_argument("unknown profile kind: " + head);
}

// Builds the FieldPoint set for covmat/sample: an explicit per-point Hurst
// list, a two-index pairing (each time at both --H and --H2), or one shared
// --H value.
std::vector<FieldPoint> build_points(const std::vector<double>& grid, double h,
                                     const std::optional<double>& h2,
                                     const std::string& h_list) {
  std::vector<FieldPoint> points;
  if (!h_list.empty()) {
    const std::vector<double> hs = parse_grid(h_list);
    if (hs.size() != grid.size())
      throw std::invalid_argument("--H-list length must match the grid");
    for (std::size_t i = 0; i < grid.size(); ++i)
      points.push_back({grid[i], Hurst(hs[i])});
    return points;
  }
  for (double t : grid) {
    points.push_back({t, Hurst(h)});
    if (h2 && *h2 != h) points.push_back({t, Hurst(*h2)});
  }
  return points;
}

struct Artifact {
  json config;
  std::vector<std::string> columns;
  std::vector<json> rows;  // each row: array of cells
  json summary;            // optional; included in JSON output when non-null

  Artifact(std::string subcommand) : config(json::object()) {
    config["subcommand"] = std::move(subcommand);
  }
};

std::string render_csv(const Artifact& a) {
  std::ostringstream out;
  for (std::size_t c = 0; c < a.columns.size(); ++c)
    out << (c ? "," : "") << a.columns[c];
  out << "\n";
  for (const auto& row : a.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ",";
      const auto& cell = row[c];
      if (cell.is_number_float())
        out << fmt(cell.get<double>());
      else if (cell.is_boolean())
        out << (cell.get<bool>() ? 1 : 0);
      else if (cell.is_string())
        out << cell.get<std::string>();
      else
        out << cell.dump();
    }
    out << "\n";
  }
  return out.str();
}

std::string render_json(const Artifact& a) {
  json doc;
  doc["config"] = a.config;
  doc["columns"] = a.columns;
  doc["rows"] = a.rows;
  if (!a.summary.is_null()) doc["summary"] = a.summary;
  return doc.dump(2) + "\n";
}

void write_artifact(const Artifact& a, const std::string& format,
                    const std::string& out_path) {
  std::string text;
  if (format == "csv")
    text = render_csv(a);
  else if (format == "json")
    text = render_json(a);
  else
    throw std::invalid_argument("format must be csv or json");
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output: " + out_path);
  file << text;
}

struct CommonOut {
  std::string format = "csv";
  std::string out_path;
};

void add_output_flags(CLI::App* cmd, CommonOut* out) {
  cmd->add_option("--format", out->format, "artifact format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--out", out->out_path, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fractional Brownian field toolkit"};
  app.require_subcommand(1);

  // ---- kernel ----
  struct {
    std::string id;
    double h = 0.5;
    std::optional<double> h2;
    double t = 0.0, s = 0.0;
    std::string parity_i = "odd", parity_j = "odd";
  } kern;
  auto* kernel_cmd = app.add_subcommand("kernel", "evaluate a covariance kernel");
  kernel_cmd->add_option("--id", kern.id, "kernel id")->required();
  kernel_cmd->add_option("--H", kern.h, "first Hurst index")->required();
  kernel_cmd->add_option("--H2", kern.h2, "second Hurst index (default --H)");
  kernel_cmd->add_option("--t", kern.t, "first time")->required();
  kernel_cmd->add_option("--s", kern.s, "second time")->required();
  kernel_cmd->add_option("--parity-i", kern.parity_i, "field-parity row parity");
  kernel_cmd->add_option("--parity-j", kern.parity_j, "field-parity column parity");

  // ---- covmat ----
  struct {
    std::string kernel, grid, h_list;
    double h = 0.5;
    std::optional<double> h2;
    std::string parity_i = "odd", parity_j = "odd";
    CommonOut out;
  } cm;
  auto* covmat_cmd = app.add_subcommand("covmat", "emit a covariance matrix");
  covmat_cmd->add_option("--kernel", cm.kernel, "kernel id")->required();
  covmat_cmd->add_option("--grid", cm.grid, "times: a:b:n or list")->required();
  covmat_cmd->add_option("--H", cm.h, "Hurst index")->required();
  covmat_cmd->add_option("--H2", cm.h2, "second Hurst index (pairs each time)");
  covmat_cmd->add_option("--H-list", cm.h_list, "per-point Hurst values");
  covmat_cmd->add_option("--parity-i", cm.parity_i, "field-parity row parity");
  covmat_cmd->add_option("--parity-j", cm.parity_j, "field-parity column parity");
  add_output_flags(covmat_cmd, &cm.out);

  // ---- sample ----
  struct {
    std::string kernel, grid, h_list;
    double h = 0.5;
    std::optional<double> h2;
    std::string parity_i = "odd", parity_j = "odd";
    std::size_t n = 0;
    std::uint64_t seed = 0;
    CommonOut out;
  } sm;
  auto* sample_cmd = app.add_subcommand("sample", "exact Gaussian sampling");
  sample_cmd->add_option("--kernel", sm.kernel, "kernel id")->required();
  sample_cmd->add_option("--grid", sm.grid, "times: a:b:n or list")->required();
  sample_cmd->add_option("--H", sm.h, "Hurst index")->required();
  sample_cmd->add_option("--H2", sm.h2, "second Hurst index (pairs each time)");
  sample_cmd->add_option("--H-list", sm.h_list, "per-point Hurst values");
  sample_cmd->add_option("--parity-i", sm.parity_i, "field-parity row parity");
  sample_cmd->add_option("--parity-j", sm.parity_j, "field-parity column parity");
  sample_cmd->add_option("--n", sm.n, "number of paths")->required();
  sample_cmd->add_option("--seed", sm.seed, "random seed (required)")->required();
  add_output_flags(sample_cmd, &sm.out);

  // ---- mc-verify ----
  struct {
    std::string kind = "nonanticipating";
    std::string kernel;  // default chosen from kind
    std::string grid, h_list;
    double h = 0.5;
    std::optional<double> h2;
    double cutoff = 100.0, mesh = 1.0 / 512.0, sigmas = 4.0;
    std::size_t n = 20000;
    std::uint64_t seed = 0;
    CommonOut out;
  } mv;
  auto* mc_cmd = app.add_subcommand(
      "mc-verify", "moving-average Monte Carlo vs closed-form covariance");
  mc_cmd->add_option("--kind", mv.kind,
                     "moving-average kind: nonanticipating, well-balanced, log");
  mc_cmd->add_option("--kernel", mv.kernel,
                     "closed-form kernel to verify against (default by kind)");
  mc_cmd->add_option("--grid", mv.grid, "times: a:b:n or list")->required();
  mc_cmd->add_option("--H", mv.h, "Hurst index")->required();
  mc_cmd->add_option("--H2", mv.h2, "second Hurst index (pairs each time)");
  mc_cmd->add_option("--H-list", mv.h_list, "per-point Hurst values");
  mc_cmd->add_option("--cutoff", mv.cutoff, "window cutoff L");
  mc_cmd->add_option("--mesh", mv.mesh, "cell width");
  mc_cmd->add_option("--sigmas", mv.sigmas, "tolerance in standard errors");
  mc_cmd->add_option("--n", mv.n, "number of paths");
  mc_cmd->add_option("--seed", mv.seed, "random seed (required)")->required();
  add_output_flags(mc_cmd, &mv.out);

  // ---- martingale ----
  struct {
    double h = 0.5;
    std::string parity = "odd";
    std::string grid = "0.015625:1:64";
    std::string emit = "audit";  // audit | paths
    std::string method = "projection";
    double mart_tol = 1e-10, slope_tol = 0.05;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    CommonOut out;
  } mg;
  auto* mart_cmd =
      app.add_subcommand("martingale", "build and audit a fundamental martingale");
  mart_cmd->add_option("--H", mg.h, "Hurst index")->required();
  mart_cmd->add_option("--parity", mg.parity, "odd or even")->required();
  mart_cmd->add_option("--grid", mg.grid, "times: a:b:n or list");
  mart_cmd->add_option("--emit", mg.emit, "audit (default) or paths")
      ->check(CLI::IsMember({"audit", "paths"}));
  mart_cmd->add_option("--method", mg.method, "projection or stieltjes")
      ->check(CLI::IsMember({"projection", "stieltjes"}));
  mart_cmd->add_option("--mart-tol", mg.mart_tol, "martingale identity tolerance");
  mart_cmd->add_option("--slope-tol", mg.slope_tol, "variance slope tolerance");
  mart_cmd->add_option("--n", mg.n, "paths (emit=paths)");
  mart_cmd->add_option("--seed", mg.seed, "random seed (emit=paths)");
  add_output_flags(mart_cmd, &mg.out);

  // ---- mbm ----
  struct {
    std::string profile, grid;
    std::string which = "x";
    bool do_sample = false;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    CommonOut out;
  } mb;
  auto* mbm_cmd = app.add_subcommand(
      "mbm", "multifractional covariance or sampling along a profile");
  mbm_cmd->add_option("--profile", mb.profile,
                      "constant:H, ramp:h0,h1,T or table:path")->required();
  mbm_cmd->add_option("--grid", mb.grid, "times: a:b:n or list")->required();
  mbm_cmd->add_option("--which", mb.which, "law: x (nonanticipating) or y")
      ->check(CLI::IsMember({"x", "y"}));
  mbm_cmd->add_flag("--sample", mb.do_sample, "emit paths instead of covariance");
  mbm_cmd->add_option("--n", mb.n, "paths (with --sample)");
  mbm_cmd->add_option("--seed", mb.seed, "random seed (with --sample)");
  add_output_flags(mbm_cmd, &mb.out);

  // ---- cohen-check ----
  struct {
    double h = 0.3;
    std::string pairs = "2,1;4,2;3,1";
    CommonOut out;
  } cc;
  auto* cohen_cmd = app.add_subcommand(
      "cohen-check", "law discrepancy of the two multifractional variants");
  cohen_cmd->add_option("--H", cc.h, "Hurst index of the dual pair")->required();
  cohen_cmd->add_option("--pairs", cc.pairs, "time pairs t,s;t,s;...");
  add_output_flags(cohen_cmd, &cc.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(kernel_cmd)) {
      const KernelId id = parse_kernel(kern.id, kern.parity_i, kern.parity_j);
      const FieldPoint a{kern.t, Hurst(kern.h)};
      const FieldPoint b{kern.s, Hurst(kern.h2.value_or(kern.h))};
      std::cout << fmt(fbfield::point_cov(id, a, b)) << "\n";
      return 0;
    }

    if (app.got_subcommand(covmat_cmd)) {
      const KernelId id = parse_kernel(cm.kernel, cm.parity_i, cm.parity_j);
      const auto points = build_points(parse_grid(cm.grid), cm.h, cm.h2,
                                       cm.h_list);
      const fbfield::CovMatrix m = fbfield::build_cov(points, id);
      Artifact art("covmat");
      art.config["kernel"] = cm.kernel;
      art.config["grid"] = cm.grid;
      art.config["H"] = cm.h;
      if (cm.h2) art.config["H2"] = *cm.h2;
      if (!cm.h_list.empty()) art.config["H_list"] = cm.h_list;
      art.columns = {"i", "j", "t_i", "H_i", "t_j", "H_j", "value"};
      for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
          art.rows.push_back(json::array(
              {i, j, m.points[i].t, m.points[i].h.value(), m.points[j].t,
               m.points[j].h.value(), m.at(i, j)}));
      write_artifact(art, cm.out.format, cm.out.out_path);
      return 0;
    }

    if (app.got_subcommand(sample_cmd)) {
      const KernelId id = parse_kernel(sm.kernel, sm.parity_i, sm.parity_j);
      const auto points = build_points(parse_grid(sm.grid), sm.h, sm.h2,
                                       sm.h_list);
      const fbfield::CovMatrix m = fbfield::build_cov(points, id);
      const fbfield::PathEnsemble e = fbfield::sample(m, sm.n, sm.seed);
      Artifact art("sample");
      art.config["kernel"] = sm.kernel;
      art.config["grid"] = sm.grid;
      art.config["H"] = sm.h;
      if (sm.h2) art.config["H2"] = *sm.h2;
      if (!sm.h_list.empty()) art.config["H_list"] = sm.h_list;
      art.config["n"] = sm.n;
      art.config["seed"] = sm.seed;
      art.columns = {"path_id", "point_index", "t", "H", "value"};
      for (std::size_t p = 0; p < e.n_paths; ++p)
        for (std::size_t i = 0; i < points.size(); ++i)
          art.rows.push_back(json::array({p, i, points[i].t,
                                          points[i].h.value(), e.value(p, i)}));
      write_artifact(art, sm.out.format, sm.out.out_path);
      return 0;
    }

    if (app.got_subcommand(mc_cmd)) {
      fbfield::MAScheme scheme;
      scheme.kind = parse_kind(mv.kind);
      scheme.cutoff = mv.cutoff;
      scheme.mesh = mv.mesh;
      std::string kernel_name = mv.kernel;
      if (kernel_name.empty())
        kernel_name =
            scheme.kind == fbfield::MaKind::nonanticipating ? "dfbf" : "wb";
      const KernelId id = parse_kernel(kernel_name, "odd", "odd");
      const auto points = build_points(parse_grid(mv.grid), mv.h, mv.h2,
                                       mv.h_list);
      const fbfield::MaEnsemble e =
          fbfield::ma_sample(points, scheme, mv.n, mv.seed);
      const fbfield::VerifyReport report =
          fbfield::verify_against(id, e, mv.sigmas);
      Artifact art("mc-verify");
      art.config["kind"] = mv.kind;
      art.config["kernel"] = kernel_name;
      art.config["grid"] = mv.grid;
      art.config["H"] = mv.h;
      if (mv.h2) art.config["H2"] = *mv.h2;
      if (!mv.h_list.empty()) art.config["H_list"] = mv.h_list;
      art.config["cutoff"] = mv.cutoff;
      art.config["mesh"] = mv.mesh;
      art.config["sigmas"] = mv.sigmas;
      art.config["n"] = mv.n;
      art.config["seed"] = mv.seed;
      art.columns = {"i",      "j",        "t_i",       "H_i",
                     "t_j",    "H_j",      "closed",    "estimate",
                     "std_error", "trunc_bound", "ok"};
      for (const auto& row : report.rows)
        art.rows.push_back(json::array(
            {row.i, row.j, points[row.i].t, points[row.i].h.value(),
             points[row.j].t, points[row.j].h.value(), row.closed,
             row.estimate, row.std_error, row.trunc_bound, row.ok}));
      art.summary = json{{"pass", report.pass}, {"worst_z", report.worst_z}};
      write_artifact(art, mv.out.format, mv.out.out_path);
      std::cerr << "mc-verify: " << (report.pass ? "pass" : "FAIL")
                << " worst_z=" << fmt(report.worst_z) << "\n";
      return report.pass ? 0 : 1;
    }

    if (app.got_subcommand(mart_cmd)) {
      fbfield::MartingaleSpec spec{Hurst(mg.h), parse_parity(mg.parity),
                                   parse_grid(mg.grid),
                                   mg.method == "projection"
                                       ? fbfield::MartMethod::projection
                                       : fbfield::MartMethod::stieltjes};
      Artifact art("martingale");
      art.config["H"] = mg.h;
      art.config["parity"] = mg.parity;
      art.config["grid"] = mg.grid;
      art.config["emit"] = mg.emit;
      if (mg.emit == "paths") {
        if (mg.n == 0 || mart_cmd->count("--seed") == 0)
          throw std::invalid_argument("--n and --seed required for paths");
        art.config["method"] = mg.method;
        art.config["n"] = mg.n;
        art.config["seed"] = mg.seed;
        std::vector<FieldPoint> points;
        for (double t : spec.grid) points.push_back({t, spec.h});
        const KernelId driver_kernel = spec.parity == Parity::odd
                                           ? KernelId::fbm_odd()
                                           : KernelId::fbm_even();
        const fbfield::PathEnsemble driver = fbfield::sample(
            fbfield::build_cov(points, driver_kernel), mg.n, mg.seed);
        const fbfield::PathEnsemble m = fbfield::build_martingale(spec, driver);
        art.columns = {"path_id", "point_index", "t", "H", "value"};
        for (std::size_t p = 0; p < m.n_paths; ++p)
          for (std::size_t i = 0; i < spec.grid.size(); ++i)
            art.rows.push_back(json::array(
                {p, i, spec.grid[i], mg.h, m.value(p, i)}));
        write_artifact(art, mg.out.format, mg.out.out_path);
        return 0;
      }
      fbfield::AuditOptions options;
      options.martingale_rel_tol = mg.mart_tol;
      options.orth_rel_tol = mg.mart_tol;
      options.slope_tol = mg.slope_tol;
      const fbfield::AuditReport report = fbfield::martingale_audit(spec, options);
      art.columns = {"metric", "value"};
      art.rows.push_back(json::array(
          {"max_rel_martingale", report.max_rel_martingale}));
      art.rows.push_back(json::array({"slope", report.slope}));
      art.rows.push_back(json::array({"slope_target", report.slope_target}));
      art.rows.push_back(json::array({"max_rel_orth", report.max_rel_orth}));
      art.rows.push_back(json::array({"martingale_ok", report.martingale_ok}));
      art.rows.push_back(json::array({"slope_ok", report.slope_ok}));
      art.rows.push_back(json::array({"orth_ok", report.orth_ok}));
      art.rows.push_back(json::array({"pass", report.pass}));
      art.summary = json{{"pass", report.pass}};
      write_artifact(art, mg.out.format, mg.out.out_path);
      std::cerr << "martingale audit: " << (report.pass ? "pass" : "FAIL")
                << "\n";
      return report.pass ? 0 : 1;
    }

    if (app.got_subcommand(mbm_cmd)) {
      const fbfield::HurstProfile profile = parse_profile(mb.profile);
      const std::vector<double> grid = parse_grid(mb.grid);
      const fbfield::MbmWhich which =
          mb.which == "x" ? fbfield::MbmWhich::x : fbfield::MbmWhich::y;
      Artifact art("mbm");
      art.config["profile"] = mb.profile;
      art.config["grid"] = mb.grid;
      art.config["which"] = mb.which;
      if (mb.do_sample) {
        if (mb.n == 0 || mbm_cmd->count("--seed") == 0)
          throw std::invalid_argument("--n and --seed required with --sample");
        art.config["n"] = mb.n;
        art.config["seed"] = mb.seed;
        const fbfield::PathEnsemble e =
            fbfield::mbm_sample(profile, grid, which, mb.n, mb.seed);
        art.columns = {"path_id", "point_index", "t", "H", "value"};
        for (std::size_t p = 0; p < e.n_paths; ++p)
          for (std::size_t i = 0; i < grid.size(); ++i)
            art.rows.push_back(json::array(
                {p, i, grid[i], profile(grid[i]), e.value(p, i)}));
        write_artifact(art, mb.out.format, mb.out.out_path);
        return 0;
      }
      art.columns = {"i", "j", "t_i", "H_i", "t_j", "H_j", "value"};
      for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = 0; j < grid.size(); ++j) {
          const double v = which == fbfield::MbmWhich::x
                               ? fbfield::mbm_cov_x(profile, grid[i], grid[j])
                               : fbfield::mbm_cov_y(profile, grid[i], grid[j]);
          art.rows.push_back(json::array({i, j, grid[i], profile(grid[i]),
                                          grid[j], profile(grid[j]), v}));
        }
      write_artifact(art, mb.out.format, mb.out.out_path);
      return 0;
    }

    if (app.got_subcommand(cohen_cmd)) {
      const auto pairs = parse_pairs(cc.pairs);
      const fbfield::CohenReport report =
          fbfield::cohen_check(Hurst(cc.h), pairs);
      Artifact art("cohen-check");
      art.config["H"] = cc.h;
      art.config["pairs"] = cc.pairs;
      art.columns = {"t", "s", "r_x", "r_y"};
      for (const auto& p : report.points)
        art.rows.push_back(json::array({p.t, p.s, p.r_x, p.r_y}));
      art.summary = json{{"r_x_spread", report.r_x_spread},
                         {"r_y_spread", report.r_y_spread},
                         {"no_discrepancy_expected",
                          report.no_discrepancy_expected},
                         {"pass", report.pass}};
      write_artifact(art, cc.out.format, cc.out.out_path);
      std::cerr << "cohen-check: " << (report.pass ? "pass" : "FAIL")
                << " r_x_spread=" << fmt(report.r_x_spread)
                << " r_y_spread=" << fmt(report.r_y_spread) << "\n";
      return report.pass ? 0 : 1;
    }
  } catch (const fbfield::NotPositiveDefiniteError& e) {
    std::cerr << "error (factorization): " << e.what() << "\n";
    return 1;
  } catch (const fbfield::QuadratureError& e) {
    std::cerr << "error (quadrature): " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
