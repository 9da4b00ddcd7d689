#include "bergman/verify.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bergman/errors.hpp"
#include "bergman/maps.hpp"
#include "bergman/parallel.hpp"
#include "bergman/rng.hpp"

namespace bergman::verify {

using nlohmann::json;

std::string to_string(CheckKind kind) {
  switch (kind) {
    case CheckKind::CurvatureConstancy: return "curvature-constancy";
    case CheckKind::MomentIdentity: return "moment-identity";
    case CheckKind::KernelEquality: return "kernel-equality";
    case CheckKind::StirlingLimit: return "stirling-limit";
    case CheckKind::Isometry: return "isometry";
    case CheckKind::MapIdentity: return "map-identity";
    case CheckKind::SupportReach: return "support-reach";
  }
  return "unknown";
}

CheckKind check_kind_from_string(const std::string& s) {
  for (CheckKind k : {CheckKind::CurvatureConstancy, CheckKind::MomentIdentity,
                      CheckKind::KernelEquality, CheckKind::StirlingLimit,
                      CheckKind::Isometry, CheckKind::MapIdentity,
                      CheckKind::SupportReach})
    if (to_string(k) == s) return k;
  throw ValidationError({"check"}, "unknown check kind: " + s);
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Oracle: return "independent-oracle";
    case Provenance::Definition: return "definition";
  }
  return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
  for (Provenance p :
       {Provenance::ClosedForm, Provenance::Oracle, Provenance::Definition})
    if (to_string(p) == s) return p;
  throw ValidationError({"provenance"}, "unknown provenance tag: " + s);
}

json Scenario::to_json() const {
  json j;
  j["name"] = name;
  j["check"] = to_string(kind);
  j["provenance"] = to_string(provenance);
  j["negative_control"] = negative_control;
  j["params"] = params;
  if (seed_override) j["seed"] = *seed_override;
  return j;
}

Scenario Scenario::from_json(const json& j) {
  std::vector<std::string> missing;
  for (const char* key : {"name", "check", "provenance", "params"})
    if (!j.contains(key)) missing.emplace_back(key);
  if (!missing.empty())
    throw ValidationError(missing, "scenario: missing required fields");
  Scenario s;
  s.name = j["name"].get<std::string>();
  s.kind = check_kind_from_string(j["check"].get<std::string>());
  s.provenance = provenance_from_string(j["provenance"].get<std::string>());
  s.negative_control = j.value("negative_control", false);
  s.params = j["params"];
  if (j.contains("seed")) s.seed_override = j["seed"].get<std::uint64_t>();
  return s;
}

json ScenarioResult::to_json(bool include_wall) const {
  json j;
  j["name"] = name;
  j["check"] = kind;
  j["negative_control"] = negative_control;
  j["positive_pass"] = positive_pass;
  j["pass"] = pass;
  j["margin"] = margin;
  j["observed"] = observed;
  j["expected"] = expected_desc;
  j["provenance"] = provenance;
  j["engine"] = engine;
  j["seed"] = seed;
  if (include_wall) j["wall_ms"] = wall_ms;
  if (!error.empty()) j["error"] = error;
  return j;
}

bool VerificationReport::all_pass() const {
  for (const auto& r : results)
    if (!r.pass) return false;
  return !results.empty();
}

json VerificationReport::to_json(bool include_wall) const {
  json j;
  j["schema"] = 1;
  j["master_seed"] = master_seed;
  j["all_pass"] = all_pass();
  j["results"] = json::array();
  for (const auto& r : results) j["results"].push_back(r.to_json(include_wall));
  return j;
}

std::string VerificationReport::to_table() const {
  std::ostringstream os;
  os << "scenario                                  verdict   margin      "
        "wall_ms  note\n";
  for (const auto& r : results) {
    std::string verdict = r.pass ? "PASS" : "FAIL";
    if (r.negative_control) verdict += r.pass ? " (neg)" : "!(neg)";
    char line[256];
    std::snprintf(line, sizeof(line), "%-40s  %-8s  %-10.3g  %-8.0f %s\n",
                  r.name.c_str(), verdict.c_str(), r.margin, r.wall_ms,
                  r.error.empty() ? "" : r.error.c_str());
    os << line;
  }
  os << (all_pass() ? "ALL PASS" : "FAILURES PRESENT") << "\n";
  return os.str();
}

std::uint64_t scenario_seed(const std::string& name, std::uint64_t master) {
  return fnv1a(name) ^ master;
}

// ---- descriptor parsing ----

Complex parse_complex(const json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2)
    return Complex(j[0].get<double>(), j[1].get<double>());
  if (j.is_object() && j.contains("re"))
    return Complex(j["re"].get<double>(), j.value("im", 0.0));
  throw ValidationError({"complex"}, "cannot parse complex number");
}

CVector parse_cvector(const json& j) {
  CVector v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) v[i++] = parse_complex(e);
  return v;
}

CMatrix parse_cmatrix(const json& j) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) throw ValidationError({"matrix"}, "empty matrix");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = parse_complex(j[r][c]);
  return m;
}

DomainDescriptor parse_domain(const json& j) {
  if (!j.contains("kind"))
    throw ValidationError({"kind"}, "domain descriptor: missing kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "ball") {
    std::optional<CVector> center;
    if (j.contains("center")) center = parse_cvector(j["center"]);
    return domains::ball(j.at("n").get<int>(), j.value("radius", 1.0), center);
  }
  if (kind == "slit_ball") return domains::slit_ball(j.at("n").get<int>());
  if (kind == "hartogs_removed")
    return domains::hartogs_removed_ball(j.at("n").get<int>(),
                                         j.at("eps").get<double>());
  if (kind == "blowdown_image")
    return domains::blowdown_image(j.at("n").get<int>());
  if (kind == "ellipsoid")
    return domains::ellipsoid(HermitianForm(parse_cmatrix(j.at("h"))));
  if (kind == "annulus") return domains::annulus(j.at("r").get<double>());
  throw ValidationError({"kind"}, "unknown domain kind: " + kind);
}

namespace {

HoloFunctionPtr parse_phi(const json& j) {
  if (j.is_null()) return phi_one();
  const std::string kind = j.value("kind", "one");
  if (kind == "one") return phi_one();
  if (kind == "constant") return phi_constant(parse_complex(j.at("value")));
  if (kind == "coordinate") return phi_coordinate(j.at("j").get<int>());
  throw ValidationError({"phi"}, "unknown phi kind: " + kind);
}

BasisDictionary parse_dictionary(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "monomials")
    return BasisDictionary::monomials(j.at("n").get<int>(),
                                      j.at("degree").get<int>());
  if (kind == "laurent")
    return BasisDictionary::laurent(j.at("kmin").get<int>(),
                                    j.at("kmax").get<int>());
  throw ValidationError({"dictionary"}, "unknown dictionary kind: " + kind);
}

KernelPtr parse_kernel_seeded(const json& j, std::uint64_t seed) {
  if (!j.contains("kind"))
    throw ValidationError({"kind"}, "kernel descriptor: missing kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "ball" || kind == "restricted-ball")
    return ball_kernel_model(j.at("n").get<int>());
  if (kind == "powered")
    return powered_kernel_model(j.at("n").get<int>(),
                                j.at("lambda").get<double>(),
                                parse_phi(j.value("phi", json())));
  if (kind == "ellipsoid")
    return ellipsoid_kernel_model(HermitianForm(parse_cmatrix(j.at("h"))));
  if (kind == "annulus") return annulus_kernel_model(j.at("r").get<double>());
  if (kind == "series")
    return series_kernel_model(CoefficientTable::from_json(j.at("table")),
                               parse_phi(j.value("phi", json())));
  if (kind == "series-auto")
    return series_kernel_model(
        CoefficientTable::powered_ball(j.at("n").get<int>(),
                                       j.value("lambda", 1.0),
                                       j.at("degree").get<int>()),
        parse_phi(j.value("phi", json())));
  if (kind == "pullback-blowdown") {
    const int n = j.at("n").get<int>();
    return pullback_kernel_model(ball_kernel_model(n),
                                 maps::blowdown_inverse(n),
                                 domains::blowdown_image(n));
  }
  if (kind == "gram") {
    IntegrationConfig cfg;
    const std::string engine = j.value("engine", "quadrature");
    cfg.engine = engine == "mc" ? Engine::MonteCarlo : Engine::Quadrature;
    cfg.quadrature_degree = j.value("degree", 12);
    cfg.mc_samples = j.value("samples", std::size_t{200000});
    cfg.seed = seed;
    return gram_kernel_estimate(parse_domain(j.at("domain")),
                                parse_dictionary(j.at("dictionary")), cfg);
  }
  throw ValidationError({"kind"}, "unknown kernel kind: " + kind);
}

}  // namespace

KernelPtr parse_kernel(const json& j) {
  return parse_kernel_seeded(j, kDefaultSeed);
}

HolomorphicMap parse_map(const json& j) {
  if (!j.contains("kind"))
    throw ValidationError({"kind"}, "map descriptor: missing kind");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "identity") return maps::identity(j.at("n").get<int>());
  if (kind == "mobius_5_1")
    return maps::disc_mobius_lift(parse_complex(j.at("a")));
  if (kind == "phi_5_2") return maps::blowdown(j.value("n", 2));
  if (kind == "phi_5_2_inverse") return maps::blowdown_inverse(j.value("n", 2));
  if (kind == "unitary") return maps::unitary(parse_cmatrix(j.at("matrix")));
  if (kind == "jacobian_root_lift")
    return maps::jacobian_root_lift(j.at("n").get<int>(),
                                    parse_complex(j.at("a")))
        .map;
  if (kind == "ellipsoid_normalizer")
    return maps::ellipsoid_normalizer(HermitianForm(parse_cmatrix(j.at("h"))));
  if (kind == "rep_coords")
    return maps::representative_map(parse_kernel(j.at("kernel")),
                                    parse_cvector(j.at("p")));
  throw ValidationError({"kind"}, "unknown map kind: " + kind);
}

std::vector<Scenario> load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario file: " + path);
  json j;
  in >> j;
  std::vector<Scenario> out;
  if (j.is_array())
    for (const auto& e : j) out.push_back(Scenario::from_json(e));
  else if (j.contains("scenarios"))
    for (const auto& e : j["scenarios"]) out.push_back(Scenario::from_json(e));
  else
    out.push_back(Scenario::from_json(j));
  return out;
}

double kernel_equality_check(const Kernel& ka, const Kernel& kb,
                             const DomainDescriptor& sample_domain, int samples,
                             std::uint64_t seed) {
  double worst = 0.0;
  if (samples > 0) {
    const auto zs = sample_points(sample_domain, 2 * samples, seed);
    for (int i = 0; i < samples; ++i) {
      const CVector& z = zs[static_cast<std::size_t>(2 * i)];
      const CVector& w = zs[static_cast<std::size_t>(2 * i + 1)];
      const Complex da = ka.eval(z, z), db = kb.eval(z, z);
      worst = std::max(worst, std::abs(da - db) / (1.0 + std::abs(db)));
      const Complex oa = ka.eval(z, w), ob = kb.eval(z, w);
      worst = std::max(worst, std::abs(oa - ob) / (1.0 + std::abs(ob)));
    }
  }
  return worst;
}

// ---- scenario runners ----

namespace {

struct RunState {
  ScenarioResult* r;
  std::uint64_t seed;
};

DerivConfig engine_config(const json& params) {
  DerivConfig cfg;
  const std::string e = params.value("engine", "auto");
  if (e == "analytic") cfg.path = DerivConfig::Path::Analytic;
  else if (e == "spectral") cfg.path = DerivConfig::Path::Spectral;
  else if (e == "central") cfg.path = DerivConfig::Path::Central;
  return cfg;
}

MomentMeasure parse_measure(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "powered-ball")
    return powered_ball_measure(j.at("n").get<int>(),
                                j.value("lambda", 1.0));
  if (kind == "ball")
    return ball_measure(j.at("n").get<int>(), j.value("radius", 1.0));
  if (kind == "lebesgue") return lebesgue_measure(parse_domain(j.at("domain")));
  if (kind == "point-mass") return point_mass_measure(j.at("n").get<int>());
  throw ValidationError({"measure"}, "unknown measure kind: " + kind);
}

void run_curvature(const Scenario& s, RunState st) {
  const json& p = s.params;
  const DomainDescriptor dom = parse_domain(p.at("domain"));
  const KernelPtr k = parse_kernel_seeded(p.at("kernel"), st.seed);
  ScanOptions opt;
  opt.deriv = engine_config(p);
  opt.min_clearance = p.value("min_clearance", 0.02);
  opt.constancy_tolerance =
      p.value("spread_tolerance", p.value("value_tolerance", 1e-6));
  if (p.contains("min_abs_last")) {
    const double floor = p["min_abs_last"].get<double>();
    const int n = dom.dim;
    opt.point_filter = [floor, n](const CVector& z) {
      return std::abs(z[n - 1]) >= floor;
    };
  }
  const int samples = p.value("samples", 50);
  const CurvatureReport rep =
      curvature_scan(*k, dom, samples, st.seed, opt);
  st.r->engine = rep.engine;
  st.r->observed["mean"] = rep.mean_h;
  st.r->observed["min"] = rep.min_h;
  st.r->observed["max"] = rep.max_h;
  st.r->observed["spread"] = rep.spread;

  if (s.negative_control) {
    const double min_spread = p.at("min_spread").get<double>();
    st.r->expected_desc = "curvature spread > " + std::to_string(min_spread);
    st.r->positive_pass = rep.spread <= opt.constancy_tolerance;
    st.r->pass = rep.spread > min_spread;
    st.r->margin = rep.spread - min_spread;
    return;
  }
  const double expected = p.at("expected").get<double>();
  const double tol = p.at("value_tolerance").get<double>();
  double worst = 0.0;
  for (const auto& smp : rep.samples)
    worst = std::max(worst, std::abs(smp.h - expected));
  st.r->observed["worst_dev"] = worst;
  st.r->expected_desc = "H = " + std::to_string(expected);
  bool ok = worst <= tol;
  double margin = tol - worst;
  if (p.contains("spread_tolerance")) {
    const double stol = p["spread_tolerance"].get<double>();
    ok = ok && rep.spread <= stol;
    margin = std::min(margin, stol - rep.spread);
  }
  st.r->positive_pass = ok;
  st.r->pass = ok;
  st.r->margin = margin;
}

void run_even_moment(const Scenario& s, RunState st) {
  const json& p = s.params;
  const int n = p.at("n").get<int>();
  const double lambda = p.value("lambda", 1.0);
  const int m_max = p.value("m_max", 5);
  const double rel_tol = p.value("rel_tolerance", 1e-6);
  const MomentMeasure meas = powered_ball_measure(n, lambda);
  double worst = 0.0;
  for (int m = 1; m <= m_max; ++m) {
    auto f = [&](const CVector& z) {
      return Complex(std::pow(z[0].real(), 2.0 * m) * meas.density_at(z), 0.0);
    };
    const IntegralEstimate est = integrate_quadrature(meas.domain, f, 2 * m + 4);
    const double expected = even_moment_closed_form(m, lambda, n);
    worst = std::max(worst, std::abs(est.value.real() - expected) / expected);
  }
  st.r->engine = "quadrature";
  st.r->observed["worst_rel_error"] = worst;
  st.r->expected_desc = "quadrature matches closed form to " +
                        std::to_string(rel_tol) + " relative";
  st.r->positive_pass = worst <= rel_tol;
  st.r->pass = st.r->positive_pass;
  st.r->margin = rel_tol - worst;
}

void run_unitary_invariance(const Scenario& s, RunState st) {
  const json& p = s.params;
  const int max_degree = p.value("max_degree", 3);
  const std::size_t samples = p.value("samples", std::size_t{200000});
  const int n_unitaries = p.value("unitaries", 5);
  TolerancePolicy pol;
  double worst_ratio = 0.0;
  int dom_idx = 0;
  for (const auto& dj : p.at("domains")) {
    const MomentMeasure base = parse_measure(dj);
    MomentConfig cfg;
    cfg.mc_samples = samples;
    cfg.seed = derive_seed(st.seed, static_cast<std::uint64_t>(dom_idx));
    const MomentTable t0 = build_moment_table(base, max_degree, cfg);
    for (int ui = 0; ui < n_unitaries; ++ui) {
      const CMatrix u = maps::haar_unitary(
          base.dim(), derive_seed(st.seed, 100 + 10 * dom_idx + ui));
      const MomentMeasure rotated = unitary_pushforward(base, u);
      MomentConfig ucfg = cfg;
      ucfg.seed = derive_seed(st.seed, 1000 + 10 * dom_idx + ui);
      const MomentTable tu = build_moment_table(rotated, max_degree, ucfg);
      for (std::size_t c = 0; c < t0.cells.size(); ++c) {
        const auto& a = t0.cells[c];
        const auto& b = tu.cells[c];
        const double dev = std::abs(a.estimate - b.estimate);
        const double se = std::hypot(a.stderr_est, b.stderr_est);
        const double bound = pol.monte_carlo_bound(std::abs(a.estimate), se);
        worst_ratio = std::max(worst_ratio, dev / bound);
      }
    }
    ++dom_idx;
  }
  st.r->engine = "mc";
  st.r->observed["worst_ratio"] = worst_ratio;
  st.r->expected_desc = "rotated moment tables agree with base tables";
  st.r->positive_pass = worst_ratio <= 1.0;
  st.r->pass = st.r->positive_pass;
  st.r->margin = 1.0 - worst_ratio;
}

void run_moment_identity(const Scenario& s, RunState st) {
  const json& p = s.params;
  const std::string variant = p.value("variant", "identity");
  if (variant == "even-moment") return run_even_moment(s, st);
  if (variant == "unitary-invariance") return run_unitary_invariance(s, st);

  const MomentMeasure meas = parse_measure(p.at("measure"));
  const double lambda = p.value("lambda", 1.0);
  const int max_degree = p.value("max_degree", 4);
  MomentConfig cfg;
  cfg.engine =
      p.value("engine", "mc") == std::string("quadrature") ? Engine::Quadrature
                                                           : Engine::MonteCarlo;
  cfg.mc_samples = p.value("samples", std::size_t{1000000});
  cfg.seed = st.seed;
  const MomentIdentityResult res =
      moment_identity_residual(meas, lambda, max_degree, cfg);
  st.r->engine = cfg.engine == Engine::Quadrature ? "quadrature" : "mc";
  st.r->observed["max_residual"] = res.max_residual;
  st.r->observed["worst_ratio"] = res.worst_ratio;
  st.r->observed["hermitian_violation"] = res.table.hermitian_violation();
  st.r->expected_desc = "moments match delta_ab / c_a^2 (lambda=" +
                        std::to_string(lambda) + ")";
  st.r->positive_pass = res.pass;
  if (s.negative_control) {
    const double need = p.at("min_worst_ratio").get<double>();
    st.r->pass = res.worst_ratio >= need;
    st.r->margin = res.worst_ratio - need;
  } else {
    st.r->pass = res.pass;
    st.r->margin = 1.0 - res.worst_ratio;
  }
}

void run_kernel_equality(const Scenario& s, RunState st) {
  const json& p = s.params;
  const KernelPtr ka = parse_kernel_seeded(p.at("kernel_a"), st.seed);
  const KernelPtr kb =
      parse_kernel_seeded(p.at("kernel_b"), derive_seed(st.seed, 2));
  double gap = 0.0;
  if (p.contains("sample_domain")) {
    const DomainDescriptor dom = parse_domain(p["sample_domain"]);
    gap = kernel_equality_check(*ka, *kb, dom, p.value("samples", 100),
                                st.seed);
  }
  if (p.contains("fixed_points")) {
    for (const auto& pt : p["fixed_points"]) {
      const CVector z = parse_cvector(pt);
      const Complex da = ka->eval(z, z), db = kb->eval(z, z);
      gap = std::max(gap, std::abs(da - db) / (1.0 + std::abs(db)));
    }
  }
  st.r->engine = ka->describe();
  st.r->observed["max_gap"] = gap;
  if (s.negative_control) {
    const double need = p.at("min_gap").get<double>();
    st.r->expected_desc = "kernels differ by more than " + std::to_string(need);
    st.r->positive_pass = gap <= need;
    st.r->pass = gap > need;
    st.r->margin = gap - need;
  } else {
    const double tol = p.at("max_gap").get<double>();
    st.r->expected_desc = "kernels agree to " + std::to_string(tol);
    st.r->positive_pass = gap <= tol;
    st.r->pass = st.r->positive_pass;
    st.r->margin = tol - gap;
  }
}

void run_stirling(const Scenario& s, RunState st) {
  const json& p = s.params;
  const double mu = p.at("mu").get<double>();
  const int m = p.value("m", 200);
  const double tol = p.value("tolerance", 0.02);
  const auto seq = stirling_ratio_sequence(mu, m);
  const double expected = std::exp(-mu);
  const double dev = std::abs(seq.back() - expected);
  bool monotone = true;
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (seq[i] > seq[i - 1] + 1e-15) monotone = false;
  st.r->engine = "closed-form";
  st.r->observed["value"] = seq.back();
  st.r->observed["deviation"] = dev;
  st.r->observed["monotone"] = monotone ? 1.0 : 0.0;
  st.r->expected_desc = "(m/(mu+m))^m -> exp(-mu) = " + std::to_string(expected);
  st.r->positive_pass = dev <= tol && monotone;
  st.r->pass = st.r->positive_pass;
  st.r->margin = tol - dev;
}

void run_repcoords_ball(const Scenario& s, RunState st) {
  const json& p = s.params;
  const int n = p.at("n").get<int>();
  const CVector pt = parse_cvector(p.at("p"));
  const double iso_tol = p.value("tolerance", 1e-6);
  const double t0_tol = p.value("t0_tolerance", 1e-8);
  const int samples = p.value("samples", 50);
  const int containment_samples = p.value("containment_samples", 1000);

  const KernelPtr k = ball_kernel_model(n);
  const DomainDescriptor ball = domains::ball(n);

  // T_0 is the identity
  const HolomorphicMap t0 = maps::representative_map(k, CVector::Zero(n));
  double worst_t0 = 0.0;
  {
    const auto zs = sample_points(ball, static_cast<std::size_t>(samples),
                                  derive_seed(st.seed, 1));
    for (const auto& z : zs)
      worst_t0 = std::max(worst_t0, (t0.eval(z) - z).norm());
  }

  const HolomorphicMap tp = maps::representative_map(k, pt);
  const double at_p = tp.eval(pt).norm();  // maps p to 0

  // image containment in E_{g(p)} and closed-form agreement
  const MetricValue mv = bergman_metric(*k, pt);
  const HermitianForm gp(mv.g);
  const HolomorphicMap oracle = maps::ball_representative_map(n, pt);
  int containment_failures = 0;
  double worst_oracle_gap = 0.0;
  {
    const auto zs =
        sample_points(ball, static_cast<std::size_t>(containment_samples),
                      derive_seed(st.seed, 2));
    for (const auto& z : zs) {
      const CVector w = oracle.eval(z);
      if (!maps::ellipsoid_membership(gp, w)) ++containment_failures;
    }
    const auto zs2 = sample_points(ball, static_cast<std::size_t>(samples),
                                   derive_seed(st.seed, 3));
    for (const auto& z : zs2)
      worst_oracle_gap =
          std::max(worst_oracle_gap, (tp.eval(z) - oracle.eval(z)).norm());
  }

  // local isometry onto the ellipsoid
  const KernelPtr ke = ellipsoid_kernel_model(gp);
  double worst_iso = 0.0;
  {
    const auto zs = sample_points(ball, static_cast<std::size_t>(samples),
                                  derive_seed(st.seed, 4));
    for (const auto& z : zs) {
      if (ball.clearance(z) < 0.1) continue;
      worst_iso =
          std::max(worst_iso, isometry_residual(tp, *k, *ke, z));
    }
  }

  st.r->engine = "spectral";
  st.r->observed["worst_t0_identity_gap"] = worst_t0;
  st.r->observed["norm_at_p"] = at_p;
  st.r->observed["containment_failures"] = containment_failures;
  st.r->observed["worst_oracle_gap"] = worst_oracle_gap;
  st.r->observed["worst_isometry_residual"] = worst_iso;
  st.r->expected_desc =
      "T_0 = id, T_p(p) = 0, image in E_{g(p)}, local isometry";
  const bool ok = worst_t0 <= t0_tol && at_p == 0.0 &&
                  containment_failures == 0 && worst_iso <= iso_tol &&
                  worst_oracle_gap <= iso_tol;
  st.r->positive_pass = ok;
  st.r->pass = ok;
  st.r->margin = std::min(t0_tol - worst_t0, iso_tol - worst_iso);
}

void run_isometry(const Scenario& s, RunState st) {
  const json& p = s.params;
  if (p.value("variant", "map") == std::string("representative-ball"))
    return run_repcoords_ball(s, st);
  const HolomorphicMap map = parse_map(p.at("map"));
  const KernelPtr src = parse_kernel_seeded(p.at("kernel_src"), st.seed);
  const KernelPtr tgt = parse_kernel_seeded(p.at("kernel_tgt"), st.seed);
  const DomainDescriptor dom = parse_domain(p.at("domain"));
  const double tol = p.at("tolerance").get<double>();
  const int samples = p.value("samples", 50);
  double worst = 0.0;
  const auto zs =
      sample_points(dom, static_cast<std::size_t>(samples), st.seed);
  for (const auto& z : zs)
    worst = std::max(worst, isometry_residual(map, *src, *tgt, z));
  st.r->engine = "spectral";
  st.r->observed["worst_residual"] = worst;
  st.r->expected_desc = "pullback metric matches to " + std::to_string(tol);
  st.r->positive_pass = worst <= tol;
  st.r->pass = st.r->positive_pass;
  st.r->margin = tol - worst;
}

void run_roundtrip(const Scenario& s, RunState st) {
  const json& p = s.params;
  const HolomorphicMap fwd = parse_map(p.at("map"));
  const HolomorphicMap inv = parse_map(p.at("inverse"));
  const DomainDescriptor dom = parse_domain(p.at("domain"));
  const double tol = p.at("tolerance").get<double>();
  const int samples = p.value("samples", 1000);
  double worst = 0.0;
  int membership_failures = 0;
  const auto zs =
      sample_points(dom, static_cast<std::size_t>(samples), st.seed);
  for (const auto& z : zs) {
    const CVector w = fwd.eval(z);
    if (fwd.target && !fwd.target->contains(w)) ++membership_failures;
    worst = std::max(worst, (inv.eval(w) - z).norm());
  }
  st.r->engine = "algebraic";
  st.r->observed["worst_roundtrip"] = worst;
  st.r->observed["membership_failures"] = membership_failures;
  st.r->expected_desc = "inverse(map(z)) = z to " + std::to_string(tol);
  st.r->positive_pass = worst <= tol && membership_failures == 0;
  st.r->pass = st.r->positive_pass;
  st.r->margin = tol - worst;
}

void run_det_identity(const Scenario& s, RunState st) {
  const json& p = s.params;
  const int n = p.at("n").get<int>();
  const double tol = p.value("tolerance", 1e-10);
  const int samples = p.value("samples", 200);
  const int ball_samples = p.value("ball_samples", 1000);
  const DomainDescriptor base_ball = domains::ball(n - 1, 0.95);
  const DomainDescriptor full_ball = domains::ball(n);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    Rng rng(derive_seed(st.seed, static_cast<std::uint64_t>(i)));
    const Complex a =
        0.9 * std::sqrt(rng.uniform()) *
        std::exp(Complex(0.0, 2.0 * kPi * rng.uniform()));
    const auto lift = maps::jacobian_root_lift(n, a);
    const CVector zp =
        sample_one(base_ball, derive_seed(st.seed, 5000 + i));
    const double lhs = std::pow(1.0 - zp.squaredNorm(), n) *
                       std::norm(lift.base_jacobian_det(zp));
    const double rhs =
        std::pow(1.0 - lift.base_map(zp).squaredNorm(), n);
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
  }
  int outside = 0;
  double slit_image = 0.0;
  {
    const auto lift = maps::jacobian_root_lift(n, Complex(0.5, 0.2));
    const auto zs = sample_points(
        full_ball, static_cast<std::size_t>(ball_samples),
        derive_seed(st.seed, 99));
    for (const auto& z : zs)
      if (lift.map.eval(z).norm() >= 1.0) ++outside;
    CVector on_slit = zs.front();
    on_slit[n - 1] = 0.0;
    slit_image = std::abs(lift.map.eval(on_slit)[n - 1]);
  }
  st.r->engine = "closed-form";
  st.r->observed["worst_identity_dev"] = worst;
  st.r->observed["ball_escapes"] = outside;
  st.r->observed["slit_image_last_coordinate"] = slit_image;
  st.r->expected_desc = "(1-|z'|^2)^n |T|^2 = (1-|A z'|^2)^n";
  st.r->positive_pass = worst <= tol && outside == 0 && slit_image == 0.0;
  st.r->pass = st.r->positive_pass;
  st.r->margin = tol - worst;
}

void run_transform_law(const Scenario& s, RunState st) {
  const json& p = s.params;
  const KernelPtr src = parse_kernel_seeded(p.at("kernel_src"), st.seed);
  const KernelPtr tgt = parse_kernel_seeded(p.at("kernel_tgt"), st.seed);
  const DomainDescriptor dom = parse_domain(p.at("domain"));
  const double tol = p.at("tolerance").get<double>();
  const int pairs = p.value("pairs", 100);
  double worst = 0.0;
  if (p.contains("map")) {
    const HolomorphicMap map = parse_map(p["map"]);
    const auto zs =
        sample_points(dom, static_cast<std::size_t>(2 * pairs), st.seed);
    for (int i = 0; i < pairs; ++i)
      worst = std::max(
          worst, transformation_law_residual(
                     map, *src, *tgt, zs[static_cast<std::size_t>(2 * i)],
                     zs[static_cast<std::size_t>(2 * i + 1)]));
  } else {
    // a fresh map per index from the declared family
    const std::string family = p.at("map_family").get<std::string>();
    for (int i = 0; i < pairs; ++i) {
      Rng rng(derive_seed(st.seed, static_cast<std::uint64_t>(i)));
      HolomorphicMap map;
      if (family == "mobius_5_1") {
        const Complex a = 0.85 * std::sqrt(rng.uniform()) *
                          std::exp(Complex(0.0, 2.0 * kPi * rng.uniform()));
        map = maps::disc_mobius_lift(a);
      } else if (family == "unitary") {
        map = maps::unitary(
            maps::haar_unitary(dom.dim, derive_seed(st.seed, 700 + i)));
      } else if (family == "jacobian_root_lift") {
        const Complex a = 0.85 * std::sqrt(rng.uniform()) *
                          std::exp(Complex(0.0, 2.0 * kPi * rng.uniform()));
        map = maps::jacobian_root_lift(dom.dim, a).map;
      } else {
        throw ValidationError({"map_family"}, "unknown family: " + family);
      }
      const auto zs = sample_points(dom, 2, derive_seed(st.seed, 9000 + i));
      worst = std::max(worst, transformation_law_residual(map, *src, *tgt,
                                                          zs[0], zs[1]));
    }
  }
  st.r->engine = "closed-form";
  st.r->observed["worst_residual"] = worst;
  st.r->expected_desc =
      "K_src(z,w) = det J(z) K_tgt(fz,fw) conj(det J(w)) to " +
      std::to_string(tol);
  st.r->positive_pass = worst <= tol;
  st.r->pass = st.r->positive_pass;
  st.r->margin = tol - worst;
}

void run_ellipsoid_consistency(const Scenario& s, RunState st) {
  const json& p = s.params;
  const double tol = p.value("tolerance", 1e-12);
  const int trials = p.value("trials", 200);
  double worst = 0.0, worst_const = 0.0;
  int t = 0;
  for (int n : p.value("dims", std::vector<int>{1, 2, 3})) {
    for (int i = 0; i < trials; ++i, ++t) {
      Rng rng(derive_seed(st.seed, static_cast<std::uint64_t>(t)));
      CMatrix g(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) g(r, c) = rng.complex_normal();
      const CMatrix h = g * g.adjoint() +
                        (0.3 + rng.uniform()) * CMatrix::Identity(n, n);
      const HermitianForm form((h + h.adjoint()) / 2.0);
      const KernelPtr ke = ellipsoid_kernel_model(form);
      const KernelPtr kb = ball_kernel_model(n);
      const HolomorphicMap l = maps::ellipsoid_normalizer(form);
      const CVector zeta =
          sample_one(domains::ellipsoid(form), derive_seed(st.seed, 40000 + t));
      const double lhs = ke->diagonal(zeta);
      const double det2 = std::norm(l.jacobian_det(zeta));
      const double rhs = det2 * kb->diagonal(l.eval(zeta));
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
      const double c_closed = ellipsoid_kernel_constant(form);
      const double c_transport = det2 * kb->diagonal(CVector::Zero(n));
      worst_const =
          std::max(worst_const, std::abs(c_closed - c_transport) / c_closed);
    }
  }
  st.r->engine = "closed-form";
  st.r->observed["worst_rel_dev"] = worst;
  st.r->observed["worst_constant_dev"] = worst_const;
  st.r->expected_desc = "K_EH = |det J_L|^2 K_ball(L., L.), C = n!/pi^n det H/(n+1)^n";
  st.r->positive_pass = worst <= tol && worst_const <= tol;
  st.r->pass = st.r->positive_pass;
  st.r->margin = tol - std::max(worst, worst_const);
}

void run_map_identity(const Scenario& s, RunState st) {
  const std::string variant = s.params.value("variant", "transform-law");
  if (variant == "roundtrip") return run_roundtrip(s, st);
  if (variant == "det-identity") return run_det_identity(s, st);
  if (variant == "ellipsoid-consistency") return run_ellipsoid_consistency(s, st);
  return run_transform_law(s, st);
}

void run_support_reach(const Scenario& s, RunState st) {
  const json& p = s.params;
  const MomentMeasure meas = parse_measure(p.at("measure"));
  const int m_max = p.value("m_max", 200);
  MomentConfig cfg;
  cfg.seed = st.seed;
  const double est = support_reach_estimate(meas, m_max, cfg);
  st.r->engine = "closed-form";
  st.r->observed["estimate"] = est;
  double margin = 1e300;
  bool ok = true;
  std::string desc;
  if (p.contains("min_estimate")) {
    const double lo = p["min_estimate"].get<double>();
    ok = ok && est >= lo;
    margin = std::min(margin, est - lo);
    desc += "estimate >= " + std::to_string(lo);
  }
  if (p.contains("max_estimate")) {
    const double hi = p["max_estimate"].get<double>();
    ok = ok && est <= hi;
    margin = std::min(margin, hi - est);
    if (!desc.empty()) desc += ", ";
    desc += "estimate <= " + std::to_string(hi);
  }
  st.r->expected_desc = desc;
  st.r->positive_pass = ok;
  st.r->pass = ok;
  st.r->margin = margin;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& s, std::uint64_t master_seed) {
  ScenarioResult r;
  r.name = s.name;
  r.kind = to_string(s.kind);
  r.negative_control = s.negative_control;
  r.provenance = to_string(s.provenance);
  r.seed = s.seed_override ? *s.seed_override : scenario_seed(s.name, master_seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    RunState st{&r, r.seed};
    switch (s.kind) {
      case CheckKind::CurvatureConstancy: run_curvature(s, st); break;
      case CheckKind::MomentIdentity: run_moment_identity(s, st); break;
      case CheckKind::KernelEquality: run_kernel_equality(s, st); break;
      case CheckKind::StirlingLimit: run_stirling(s, st); break;
      case CheckKind::Isometry: run_isometry(s, st); break;
      case CheckKind::MapIdentity: run_map_identity(s, st); break;
      case CheckKind::SupportReach: run_support_reach(s, st); break;
    }
  } catch (const std::exception& e) {
    r.error = e.what();
    r.pass = false;
    r.positive_pass = false;
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
  return r;
}

VerificationReport run_suite(const std::vector<Scenario>& scenarios,
                             std::uint64_t master_seed) {
  VerificationReport report;
  report.master_seed = master_seed;
  report.results.resize(scenarios.size());
  parallel_for(scenarios.size(), [&](std::size_t i) {
    report.results[i] = run_scenario(scenarios[i], master_seed);
  });
  return report;
}

std::vector<Scenario> built_in_suite() {
  std::vector<Scenario> out;
  auto add = [&](const char* name, CheckKind kind, Provenance prov,
                 bool negative, json params) {
    Scenario s;
    s.name = name;
    s.kind = kind;
    s.provenance = prov;
    s.negative_control = negative;
    s.params = std::move(params);
    out.push_back(std::move(s));
  };

  for (int n : {1, 2, 3}) {
    const double expected = -2.0 / (n + 1);
    const std::string base = "ball-curvature-n" + std::to_string(n);
    add(base.c_str(), CheckKind::CurvatureConstancy, Provenance::ClosedForm,
        false,
        json{{"domain", {{"kind", "ball"}, {"n", n}}},
             {"kernel", {{"kind", "ball"}, {"n", n}}},
             {"samples", 50},
             {"expected", expected},
             {"value_tolerance", 1e-6},
             {"min_clearance", 0.3},
             {"engine", "analytic"}});
    add((base + "-fd").c_str(), CheckKind::CurvatureConstancy,
        Provenance::ClosedForm, false,
        json{{"domain", {{"kind", "ball"}, {"n", n}}},
             {"kernel", {{"kind", "ball"}, {"n", n}}},
             {"samples", 50},
             {"expected", expected},
             {"value_tolerance", 1e-5},
             {"min_clearance", 0.3},
             {"engine", "central"}});
  }

  add("slit-ball-curvature", CheckKind::CurvatureConstancy,
      Provenance::ClosedForm, false,
      json{{"domain", {{"kind", "slit_ball"}, {"n", 2}}},
           {"kernel", {{"kind", "restricted-ball"}, {"n", 2}}},
           {"samples", 200},
           {"expected", -2.0 / 3.0},
           {"value_tolerance", 1e-6},
           {"spread_tolerance", 1e-6},
           {"min_abs_last", 0.05},
           {"min_clearance", 0.02},
           {"engine", "analytic"}});

  add("blowdown-transport-curvature", CheckKind::CurvatureConstancy,
      Provenance::ClosedForm, false,
      json{{"domain", {{"kind", "blowdown_image"}, {"n", 2}}},
           {"kernel", {{"kind", "pullback-blowdown"}, {"n", 2}}},
           {"samples", 50},
           {"expected", -2.0 / 3.0},
           {"value_tolerance", 1e-5},
           {"min_clearance", 0.02},
           {"min_abs_last", 0.25},
           {"engine", "spectral"}});

  add("blowdown-roundtrip", CheckKind::MapIdentity, Provenance::Definition,
      false,
      json{{"variant", "roundtrip"},
           {"map", {{"kind", "phi_5_2"}, {"n", 2}}},
           {"inverse", {{"kind", "phi_5_2_inverse"}, {"n", 2}}},
           {"domain", {{"kind", "slit_ball"}, {"n", 2}}},
           {"samples", 1000},
           {"tolerance", 1e-14}});

  for (int n : {2, 3})
    add(("jacobian-lift-identity-n" + std::to_string(n)).c_str(),
        CheckKind::MapIdentity, Provenance::ClosedForm, false,
        json{{"variant", "det-identity"},
             {"n", n},
             {"samples", 200},
             {"tolerance", 1e-10},
             {"ball_samples", 1000}});

  const std::size_t mc_samples = 1000000;
  for (int n : {1, 2})
    for (double lambda : {1.0, 2.0}) {
      std::string name = "moment-identity-ball-n" + std::to_string(n);
      if (lambda != 1.0) name += "-lambda2";
      add(name.c_str(), CheckKind::MomentIdentity, Provenance::ClosedForm,
          false,
          json{{"measure",
                {{"kind", "powered-ball"}, {"n", n}, {"lambda", lambda}}},
               {"lambda", lambda},
               {"max_degree", 4},
               {"engine", "mc"},
               {"samples", mc_samples}});
    }

  add("moment-identity-slit-ball", CheckKind::MomentIdentity,
      Provenance::ClosedForm, false,
      json{{"measure",
            {{"kind", "lebesgue"},
             {"domain", {{"kind", "slit_ball"}, {"n", 2}}}}},
           {"lambda", 1.0},
           {"max_degree", 4},
           {"engine", "mc"},
           {"samples", mc_samples}});

  add("shrunken-ball-moments", CheckKind::MomentIdentity, Provenance::ClosedForm,
      true,
      json{{"measure", {{"kind", "ball"}, {"n", 1}, {"radius", 0.9}}},
           {"lambda", 1.0},
           {"max_degree", 4},
           {"engine", "mc"},
           {"samples", mc_samples},
           {"min_worst_ratio", 3.0}});

  add("even-moment-quadrature", CheckKind::MomentIdentity, Provenance::Oracle,
      false,
      json{{"variant", "even-moment"},
           {"n", 1},
           {"lambda", 1.0},
           {"m_max", 5},
           {"rel_tolerance", 1e-6}});
  add("even-moment-quadrature-lambda2", CheckKind::MomentIdentity,
      Provenance::Oracle, false,
      json{{"variant", "even-moment"},
           {"n", 1},
           {"lambda", 2.0},
           {"m_max", 5},
           {"rel_tolerance", 1e-6}});

  for (int mu : {2, 3, 4})
    add(("stirling-mu" + std::to_string(mu)).c_str(), CheckKind::StirlingLimit,
        Provenance::ClosedForm, false,
        json{{"mu", static_cast<double>(mu)}, {"m", 200}, {"tolerance", 0.02}});

  add("support-reach-ball", CheckKind::SupportReach, Provenance::ClosedForm,
      false,
      json{{"measure", {{"kind", "powered-ball"}, {"n", 1}, {"lambda", 1.0}}},
           {"m_max", 200},
           {"min_estimate", 0.95}});
  add("support-reach-shrunken-ball", CheckKind::SupportReach,
      Provenance::ClosedForm, false,
      json{{"measure", {{"kind", "ball"}, {"n", 1}, {"radius", 0.8}}},
           {"m_max", 200},
           {"max_estimate", 0.82}});

  add("hartogs-kernel-equality", CheckKind::KernelEquality, Provenance::Oracle,
      false,
      json{{"kernel_a",
            {{"kind", "gram"},
             {"domain",
              {{"kind", "hartogs_removed"}, {"n", 2}, {"eps", 0.01}}},
             {"dictionary", {{"kind", "monomials"}, {"n", 2}, {"degree", 10}}},
             {"engine", "quadrature"},
             {"degree", 12}}},
           {"kernel_b", {{"kind", "ball"}, {"n", 2}}},
           {"sample_domain", {{"kind", "ball"}, {"n", 2}, {"radius", 0.3}}},
           {"samples", 100},
           {"max_gap", 1e-8}});

  // Declared control: the annulus should expose non-constant curvature with
  // spread above 0.1. High-precision evaluation shows the r = 0.5 annulus
  // metric has curvature -1 up to a defect of order exp(-2 pi^2/log(1/r)),
  // i.e. spread ~1e-10, so this control reports failure; it is kept as
  // declared and the finding is documented in the README.
  add("annulus-curvature", CheckKind::CurvatureConstancy, Provenance::Oracle,
      true,
      json{{"domain", {{"kind", "annulus"}, {"r", 0.5}}},
           {"kernel", {{"kind", "annulus"}, {"r", 0.5}}},
           {"samples", 60},
           {"min_clearance", 0.04},
           {"spread_tolerance", 1e-6},
           {"min_spread", 0.1},
           {"engine", "spectral"}});

  {
    // a control with honest discriminating power: a doctored coefficient
    // table is a positive-definite kernel but not a ball kernel
    CoefficientTable doctored = CoefficientTable::powered_ball(1, 1.0, 25);
    for (auto& [a, c] : doctored.coeffs)
      if (a.order() == 1) c *= 2.0;
    add("perturbed-series-curvature", CheckKind::CurvatureConstancy,
        Provenance::Oracle, true,
        json{{"domain", {{"kind", "ball"}, {"n", 1}}},
             {"kernel", {{"kind", "series"}, {"table", doctored.to_json()}}},
             {"samples", 60},
             {"min_clearance", 0.45},
             {"spread_tolerance", 1e-6},
             {"min_spread", 0.1},
             {"engine", "spectral"}});
  }

  add("annulus-vs-disk-kernel", CheckKind::KernelEquality, Provenance::Oracle,
      true,
      json{{"kernel_a",
            {{"kind", "gram"},
             {"domain", {{"kind", "annulus"}, {"r", 0.5}}},
             {"dictionary", {{"kind", "laurent"}, {"kmin", -10}, {"kmax", 10}}},
             {"engine", "mc"},
             {"samples", 200000}}},
           {"kernel_b", {{"kind", "ball"}, {"n", 1}}},
           {"fixed_points", json::array({json::array({json::array({0.6, 0.0})})})},
           {"samples", 0},
           {"min_gap", 0.05}});

  add("ellipsoid-kernel-consistency", CheckKind::MapIdentity,
      Provenance::ClosedForm, false,
      json{{"variant", "ellipsoid-consistency"},
           {"dims", {1, 2, 3}},
           {"trials", 200},
           {"tolerance", 1e-12}});

  add("repcoords-isometry-ball", CheckKind::Isometry, Provenance::ClosedForm,
      false,
      json{{"variant", "representative-ball"},
           {"n", 2},
           {"p", json::array({json::array({0.4, 0.1}),
                              json::array({-0.2, 0.25})})},
           {"samples", 50},
           {"containment_samples", 1000},
           {"tolerance", 1e-6},
           {"t0_tolerance", 1e-8}});

  add("slit-mobius-kernel-invariance", CheckKind::MapIdentity,
      Provenance::ClosedForm, false,
      json{{"variant", "transform-law"},
           {"map_family", "mobius_5_1"},
           {"kernel_src", {{"kind", "ball"}, {"n", 2}}},
           {"kernel_tgt", {{"kind", "ball"}, {"n", 2}}},
           {"domain", {{"kind", "slit_ball"}, {"n", 2}}},
           {"pairs", 100},
           {"tolerance", 1e-10}});

  add("unitary-moment-invariance", CheckKind::MomentIdentity,
      Provenance::Definition, false,
      json{{"variant", "unitary-invariance"},
           {"domains",
            json::array(
                {{{"kind", "powered-ball"}, {"n", 2}, {"lambda", 1.0}},
                 {{"kind", "lebesgue"},
                  {"domain", {{"kind", "slit_ball"}, {"n", 2}}}}})},
           {"unitaries", 5},
           {"max_degree", 3},
           {"samples", 200000}});

  return out;
}

}  // namespace bergman::verify
