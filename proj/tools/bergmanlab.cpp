// bergmanlab: command-line front end for the kernel/metric/moment laboratory.
//
// Subcommands: verify, curvature, moments, kernel-eval, repcoords,
// support-reach, examples. Every run is deterministic given --seed; data
// files never contain wall-clock fields, so identical invocations produce
// identical files.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bergman/diffgeo.hpp"
#include "bergman/errors.hpp"
#include "bergman/kernels.hpp"
#include "bergman/maps.hpp"
#include "bergman/moments.hpp"
#include "bergman/verify.hpp"

using namespace bergman;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir;
  std::vector<std::string> formats = {"table", "json"};
  double tol_scale = 1.0;

  bool wants(const std::string& f) const {
    return std::find(formats.begin(), formats.end(), f) != formats.end();
  }
};

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& contents) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << contents;
  std::cout << "wrote " << path << "\n";
}

json parse_point_arg(const std::string& text) {
  return json::parse(text);
}

DomainDescriptor domain_from_flags(const std::string& name, int n,
                                   double radius, double inner_r, double eps) {
  if (name == "ball") return domains::ball(n, radius);
  if (name == "slit-ball") return domains::slit_ball(n);
  if (name == "annulus") return domains::annulus(inner_r);
  if (name == "blowdown-image") return domains::blowdown_image(n);
  if (name == "hartogs-removed") return domains::hartogs_removed_ball(n, eps);
  throw ValidationError({"--domain"}, "unknown domain: " + name);
}

KernelPtr kernel_from_flags(const std::string& name, const std::string& domain,
                            int n, double lambda, double inner_r) {
  std::string kind = name;
  if (kind == "auto") {
    if (domain == "annulus") kind = "annulus";
    else if (domain == "blowdown-image") kind = "pullback-blowdown";
    else kind = "ball";
  }
  if (kind == "ball") return ball_kernel_model(n);
  if (kind == "powered") return powered_kernel_model(n, lambda);
  if (kind == "annulus") return annulus_kernel_model(inner_r);
  if (kind == "pullback-blowdown")
    return pullback_kernel_model(ball_kernel_model(n), maps::blowdown_inverse(n),
                                 domains::blowdown_image(n));
  throw ValidationError({"--kernel"}, "unknown kernel: " + name);
}

DerivConfig engine_from_flag(const std::string& engine) {
  DerivConfig cfg;
  if (engine == "analytic") cfg.path = DerivConfig::Path::Analytic;
  else if (engine == "spectral") cfg.path = DerivConfig::Path::Spectral;
  else if (engine == "central") cfg.path = DerivConfig::Path::Central;
  else if (engine != "auto")
    throw ValidationError({"--engine"}, "unknown engine: " + engine);
  return cfg;
}

int run_verify(const GlobalOptions& g, const std::string& suite,
               const std::vector<std::string>& scenario_files) {
  std::vector<verify::Scenario> scenarios;
  if (suite == "builtin") scenarios = verify::built_in_suite();
  else if (!suite.empty() && suite != "none")
    throw ValidationError({"--suite"}, "unknown suite: " + suite);
  for (const auto& path : scenario_files)
    for (auto& s : verify::load_scenario_file(path))
      scenarios.push_back(std::move(s));
  if (scenarios.empty())
    throw ValidationError({"--suite"}, "no scenarios selected");

  const auto report = verify::run_suite(scenarios, g.seed);
  if (g.wants("table")) std::cout << report.to_table();
  if (g.wants("json"))
    write_file(g.out_dir, "verify-report.json", report.to_json(false).dump(2) + "\n");
  if (g.wants("csv")) {
    std::string csv = "name,check,negative_control,pass,margin,seed\n";
    for (const auto& r : report.results)
      csv += r.name + "," + r.kind + "," + (r.negative_control ? "1" : "0") +
             "," + (r.pass ? "1" : "0") + "," + fmt17(r.margin) + "," +
             std::to_string(r.seed) + "\n";
    write_file(g.out_dir, "verify-report.csv", csv);
  }
  return report.all_pass() ? 0 : 1;
}

int run_curvature(const GlobalOptions& g, const std::string& domain_name,
                  int n, double radius, double inner_r, double eps,
                  const std::string& kernel_name, double lambda, int samples,
                  const std::string& engine, double min_clearance,
                  double min_abs_last) {
  const auto dom = domain_from_flags(domain_name, n, radius, inner_r, eps);
  const auto kernel =
      kernel_from_flags(kernel_name, domain_name, dom.dim, lambda, inner_r);
  ScanOptions opt;
  opt.deriv = engine_from_flag(engine);
  opt.min_clearance = min_clearance;
  opt.constancy_tolerance = 1e-6 * g.tol_scale;
  if (min_abs_last > 0.0) {
    const int d = dom.dim;
    opt.point_filter = [min_abs_last, d](const CVector& z) {
      return std::abs(z[d - 1]) >= min_abs_last;
    };
  }
  const auto report = curvature_scan(*kernel, dom, samples, g.seed, opt);
  if (g.wants("table")) {
    std::printf("curvature scan: %s on %s, %d samples, engine %s\n",
                kernel->describe().c_str(), dom.name.c_str(), samples,
                report.engine.c_str());
    for (const auto& s : report.samples) std::printf("  H = %.17g\n", s.h);
    std::printf("min %.17g  max %.17g  mean %.17g  spread %.3g  constant %s\n",
                report.min_h, report.max_h, report.mean_h, report.spread,
                report.constant ? "yes" : "no");
  }
  if (g.wants("json"))
    write_file(g.out_dir, "curvature-report.json",
               report.to_json().dump(2) + "\n");
  if (g.wants("csv"))
    write_file(g.out_dir, "curvature-report.csv", report.to_csv());
  return 0;
}

int run_moments(const GlobalOptions& g, const std::string& domain_name, int n,
                double radius, double inner_r, double eps, double lambda,
                int max_degree, const std::string& engine,
                std::size_t samples) {
  MomentMeasure measure =
      (domain_name == "ball" && lambda != 1.0)
          ? powered_ball_measure(n, lambda)
          : (domain_name == "ball"
                 ? ball_measure(n, radius)
                 : lebesgue_measure(
                       domain_from_flags(domain_name, n, radius, inner_r, eps)));
  MomentConfig cfg;
  cfg.engine = engine == "quadrature" ? Engine::Quadrature : Engine::MonteCarlo;
  cfg.mc_samples = samples;
  cfg.seed = g.seed;
  const auto table = build_moment_table(measure, max_degree, cfg);
  if (g.wants("table")) {
    std::printf("moment table for %s, degree <= %d (%zu cells)\n",
                measure.name.c_str(), max_degree, table.cells.size());
    const std::size_t k = table.indices.size();
    for (std::size_t a = 0; a < k; ++a) {
      const auto& cell = table.at(a, a);
      std::printf("  diag %-10s  %.17g  (stderr %.3g)\n",
                  cell.alpha.to_string().c_str(), cell.estimate.real(),
                  cell.stderr_est);
    }
  }
  if (g.wants("json"))
    write_file(g.out_dir, "moment-table.json", table.to_json().dump(2) + "\n");
  if (g.wants("csv")) write_file(g.out_dir, "moment-table.csv", table.to_csv());
  return 0;
}

int run_kernel_eval(const GlobalOptions& g, const std::string& kernel_name,
                    int n, double lambda, double inner_r,
                    const std::string& z_text, const std::string& w_text) {
  const auto kernel =
      kernel_from_flags(kernel_name, "", n, lambda, inner_r);
  const CVector z = verify::parse_cvector(parse_point_arg(z_text));
  const CVector w = w_text.empty()
                        ? z
                        : verify::parse_cvector(parse_point_arg(w_text));
  const Complex value = kernel->eval(z, w);
  const Complex sym = kernel->eval(w, z);
  const double herm = std::abs(value - std::conj(sym)) / (1.0 + std::abs(value));
  std::printf("K(z,w) = %.17g %+.17gi\n", value.real(), value.imag());
  std::printf("hermitian residual = %.3g\n", herm);
  if (g.wants("json")) {
    json j;
    j["schema"] = 1;
    j["kernel"] = kernel->describe();
    j["seed"] = g.seed;
    j["re"] = value.real();
    j["im"] = value.imag();
    j["hermitian_residual"] = herm;
    write_file(g.out_dir, "kernel-eval.json", j.dump(2) + "\n");
  }
  return 0;
}

int run_repcoords(const GlobalOptions& g, int n, const std::string& p_text,
                  const std::string& z_text, int check_samples) {
  const CVector p = verify::parse_cvector(parse_point_arg(p_text));
  const auto kernel = ball_kernel_model(n);
  const auto tp = maps::representative_map(kernel, p);
  json j;
  j["schema"] = 1;
  j["seed"] = g.seed;
  j["p"] = parse_point_arg(p_text);
  if (!z_text.empty()) {
    const CVector z = verify::parse_cvector(parse_point_arg(z_text));
    const CVector w = tp.eval(z);
    std::printf("T_p(z) =");
    for (int i = 0; i < n; ++i)
      std::printf(" (%.17g %+.17gi)", w[i].real(), w[i].imag());
    std::printf("\n");
    for (int i = 0; i < n; ++i) j["image"].push_back({w[i].real(), w[i].imag()});
  }
  if (check_samples > 0) {
    const double at_p = tp.eval(p).norm();
    const HermitianForm gp(bergman_metric(*kernel, p).g);
    int failures = 0;
    const auto zs = sample_points(domains::ball(n),
                                  static_cast<std::size_t>(check_samples),
                                  g.seed);
    for (const auto& z : zs)
      if (!maps::ellipsoid_membership(gp, tp.eval(z))) ++failures;
    std::printf("|T_p(p)| = %.3g, containment failures %d/%d\n", at_p,
                failures, check_samples);
    j["norm_at_p"] = at_p;
    j["containment_failures"] = failures;
  }
  if (g.wants("json"))
    write_file(g.out_dir, "repcoords.json", j.dump(2) + "\n");
  return 0;
}

int run_support_reach(const GlobalOptions& g, const std::string& domain_name,
                      int n, double radius, double lambda, int m_max) {
  MomentMeasure measure = lambda != 1.0 ? powered_ball_measure(n, lambda)
                                        : ball_measure(n, radius);
  if (domain_name != "ball")
    measure = lebesgue_measure(domain_from_flags(domain_name, n, radius,
                                                 0.5, 0.01));
  MomentConfig cfg;
  cfg.seed = g.seed;
  const double est = support_reach_estimate(measure, m_max, cfg);
  std::printf("support reach estimate at m_max=%d: %.17g\n", m_max, est);
  if (g.wants("json")) {
    json j;
    j["schema"] = 1;
    j["seed"] = g.seed;
    j["measure"] = measure.name;
    j["m_max"] = m_max;
    j["estimate"] = est;
    write_file(g.out_dir, "support-reach.json", j.dump(2) + "\n");
  }
  return 0;
}

int run_examples(const GlobalOptions& g) {
  std::vector<verify::Scenario> scenarios;
  for (const auto& s : verify::built_in_suite())
    if (s.name == "blowdown-roundtrip" ||
        s.name == "jacobian-lift-identity-n2" ||
        s.name == "jacobian-lift-identity-n3" ||
        s.name == "slit-mobius-kernel-invariance" ||
        s.name == "ellipsoid-kernel-consistency")
      scenarios.push_back(s);
  const auto report = verify::run_suite(scenarios, g.seed);
  std::cout << report.to_table();
  if (g.wants("json"))
    write_file(g.out_dir, "examples-report.json",
               report.to_json(false).dump(2) + "\n");
  return report.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bergmanlab: numerical laboratory for Bergman kernels, metrics, "
      "curvature, moment identities and representative coordinates"};
  app.require_subcommand(1);

  GlobalOptions g;
  const char* env_out = std::getenv("BERGMANLAB_OUTDIR");
  g.out_dir = env_out ? env_out : ".";
  app.add_option("--seed", g.seed,
                 "master seed; every report echoes it (default 0xB352474D414E)")
      ->capture_default_str();
  app.add_option("--out", g.out_dir, "output directory for report files")
      ->capture_default_str();
  app.add_option("--format", g.formats,
                 "output formats: table, json, csv (repeatable)")
      ->capture_default_str();
  app.add_option("--tol-scale", g.tol_scale,
                 "multiplies scan constancy tolerances")
      ->capture_default_str();

  auto* verify_cmd =
      app.add_subcommand("verify", "run the scenario suite and report margins");
  std::string suite = "builtin";
  std::vector<std::string> scenario_files;
  verify_cmd->add_option("--suite", suite, "builtin | none")
      ->capture_default_str();
  verify_cmd->add_option("--scenario", scenario_files,
                         "scenario JSON file (repeatable)");

  auto* curvature_cmd = app.add_subcommand(
      "curvature", "sectional-curvature scan of a kernel over a domain");
  std::string c_domain = "ball", c_kernel = "auto", c_engine = "auto";
  int c_n = 2, c_samples = 100;
  double c_radius = 1.0, c_inner = 0.5, c_eps = 0.01, c_lambda = 1.0;
  double c_clear = 0.05, c_min_last = 0.0;
  curvature_cmd->add_option("--domain", c_domain,
                            "ball | slit-ball | annulus | blowdown-image | "
                            "hartogs-removed")
      ->capture_default_str();
  curvature_cmd->add_option("--n", c_n, "complex dimension")
      ->capture_default_str();
  curvature_cmd->add_option("--radius", c_radius, "ball radius")
      ->capture_default_str();
  curvature_cmd->add_option("--r", c_inner, "annulus inner radius")
      ->capture_default_str();
  curvature_cmd->add_option("--eps", c_eps, "removed-set size parameter")
      ->capture_default_str();
  curvature_cmd
      ->add_option("--kernel", c_kernel,
                   "auto | ball | powered | annulus | pullback-blowdown")
      ->capture_default_str();
  curvature_cmd->add_option("--lambda", c_lambda, "power for powered kernels")
      ->capture_default_str();
  curvature_cmd->add_option("--samples", c_samples, "number of (z,X) samples")
      ->capture_default_str();
  curvature_cmd
      ->add_option("--engine", c_engine, "auto | analytic | spectral | central")
      ->capture_default_str();
  curvature_cmd->add_option("--min-clearance", c_clear,
                            "reject points closer to the complement")
      ->capture_default_str();
  curvature_cmd->add_option("--min-abs-last", c_min_last,
                            "reject points with |z_n| below this")
      ->capture_default_str();

  auto* moments_cmd =
      app.add_subcommand("moments", "moment table of a measure");
  std::string m_domain = "ball", m_engine = "mc";
  int m_n = 1, m_degree = 3;
  double m_radius = 1.0, m_inner = 0.5, m_eps = 0.01, m_lambda = 1.0;
  std::size_t m_samples = 1000000;
  moments_cmd->add_option("--domain", m_domain, "ball | slit-ball | annulus")
      ->capture_default_str();
  moments_cmd->add_option("--n", m_n, "complex dimension")
      ->capture_default_str();
  moments_cmd->add_option("--radius", m_radius, "ball radius")
      ->capture_default_str();
  moments_cmd->add_option("--r", m_inner, "annulus inner radius")
      ->capture_default_str();
  moments_cmd->add_option("--eps", m_eps, "removed-set size parameter")
      ->capture_default_str();
  moments_cmd->add_option("--lambda", m_lambda,
                          "power weight on the unit ball")
      ->capture_default_str();
  moments_cmd->add_option("--max-degree", m_degree, "max |alpha|, |beta|")
      ->capture_default_str();
  moments_cmd->add_option("--engine", m_engine, "mc | quadrature")
      ->capture_default_str();
  moments_cmd->add_option("--samples", m_samples, "Monte Carlo samples per cell")
      ->capture_default_str();

  auto* kernel_cmd =
      app.add_subcommand("kernel-eval", "evaluate a kernel at a pair of points");
  std::string k_kernel = "ball", k_z = "[[0.0,0.0]]", k_w;
  int k_n = 1;
  double k_lambda = 1.0, k_inner = 0.5;
  kernel_cmd->add_option("--kernel", k_kernel,
                         "ball | powered | annulus | pullback-blowdown")
      ->capture_default_str();
  kernel_cmd->add_option("--n", k_n, "complex dimension")->capture_default_str();
  kernel_cmd->add_option("--lambda", k_lambda, "power for powered kernels")
      ->capture_default_str();
  kernel_cmd->add_option("--r", k_inner, "annulus inner radius")
      ->capture_default_str();
  kernel_cmd
      ->add_option("--z", k_z, "point as JSON, e.g. [[0.1,0.2],[0.0,0.3]]")
      ->capture_default_str();
  kernel_cmd->add_option("--w", k_w, "second point (defaults to z)");

  auto* rep_cmd = app.add_subcommand(
      "repcoords", "representative coordinates of the ball kernel at p");
  int r_n = 2, r_checks = 0;
  std::string r_p = "[[0.0,0.0],[0.0,0.0]]", r_z;
  rep_cmd->add_option("--n", r_n, "complex dimension")->capture_default_str();
  rep_cmd->add_option("--p", r_p, "base point as JSON")->capture_default_str();
  rep_cmd->add_option("--z", r_z, "point to map (JSON)");
  rep_cmd->add_option("--check-samples", r_checks,
                      "also run containment checks on this many samples")
      ->capture_default_str();

  auto* reach_cmd = app.add_subcommand(
      "support-reach", "even-moment root estimate of sup |Re z_1|");
  std::string s_domain = "ball";
  int s_n = 1, s_mmax = 200;
  double s_radius = 1.0, s_lambda = 1.0;
  reach_cmd->add_option("--domain", s_domain, "ball | annulus | slit-ball")
      ->capture_default_str();
  reach_cmd->add_option("--n", s_n, "complex dimension")->capture_default_str();
  reach_cmd->add_option("--radius", s_radius, "ball radius")
      ->capture_default_str();
  reach_cmd->add_option("--lambda", s_lambda, "power weight")
      ->capture_default_str();
  reach_cmd->add_option("--m-max", s_mmax, "top even moment order")
      ->capture_default_str();

  app.add_subcommand("examples",
                     "run the automorphism and biholomorphism identity checks");

  for (CLI::App* sc : app.get_subcommands(nullptr)) sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("verify")) return run_verify(g, suite, scenario_files);
    if (app.got_subcommand("curvature"))
      return run_curvature(g, c_domain, c_n, c_radius, c_inner, c_eps, c_kernel,
                           c_lambda, c_samples, c_engine, c_clear, c_min_last);
    if (app.got_subcommand("moments"))
      return run_moments(g, m_domain, m_n, m_radius, m_inner, m_eps, m_lambda,
                         m_degree, m_engine, m_samples);
    if (app.got_subcommand("kernel-eval"))
      return run_kernel_eval(g, k_kernel, k_n, k_lambda, k_inner, k_z, k_w);
    if (app.got_subcommand("repcoords"))
      return run_repcoords(g, r_n, r_p, r_z, r_checks);
    if (app.got_subcommand("support-reach"))
      return run_support_reach(g, s_domain, s_n, s_radius, s_lambda, s_mmax);
    if (app.got_subcommand("examples")) return run_examples(g);
  } catch (const ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
