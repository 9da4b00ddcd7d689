// Acceptance harness: runs the built-in scenario registry once and reports
// one verdict line per criterion with its margin. Exits nonzero if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "bergman/types.hpp"
#include "bergman/verify.hpp"

using namespace bergman;
using verify::ScenarioResult;

namespace {

struct Criterion {
  std::string label;
  std::vector<std::string> scenarios;
  std::string note;
};

const ScenarioResult& find(const std::map<std::string, ScenarioResult>& by_name,
                           const std::string& name) {
  const auto it = by_name.find(name);
  if (it == by_name.end()) {
    std::fprintf(stderr, "missing scenario: %s\n", name.c_str());
    std::exit(2);
  }
  return it->second;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto suite = verify::built_in_suite();
  const auto report = verify::run_suite(suite, kDefaultSeed);
  const double suite_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::map<std::string, ScenarioResult> by_name;
  for (const auto& r : report.results) by_name[r.name] = r;

  const std::vector<Criterion> criteria = {
      {"criterion-01 ball curvature anchor (n=1,2,3; analytic 1e-6, "
       "finite differences 1e-5)",
       {"ball-curvature-n1", "ball-curvature-n2", "ball-curvature-n3",
        "ball-curvature-n1-fd", "ball-curvature-n2-fd", "ball-curvature-n3-fd"},
       ""},
      {"criterion-02 slit-ball curvature -2/3, spread <= 1e-6",
       {"slit-ball-curvature"},
       ""},
      {"criterion-03 curvature transport through the blowdown map + roundtrip",
       {"blowdown-transport-curvature", "blowdown-roundtrip"},
       ""},
      {"criterion-04 jacobian-root lift identity (n=2,3) and ball preservation",
       {"jacobian-lift-identity-n2", "jacobian-lift-identity-n3"},
       ""},
      {"criterion-05 moment identity, 1e6 Monte Carlo samples per cell",
       {"moment-identity-ball-n1", "moment-identity-ball-n1-lambda2",
        "moment-identity-ball-n2", "moment-identity-ball-n2-lambda2",
        "moment-identity-slit-ball"},
       ""},
      {"criterion-06 even-moment closed form (1e-6 rel) and ratio limit "
       "(0.02 at m=200)",
       {"even-moment-quadrature", "even-moment-quadrature-lambda2",
        "stirling-mu2", "stirling-mu3", "stirling-mu4"},
       ""},
      {"criterion-07 support-reach discrimination (>=0.95 vs <=0.82)",
       {"support-reach-ball", "support-reach-shrunken-ball"},
       ""},
      {"criterion-08 kernel equality across a removed measure-zero set "
       "(<=1e-8)",
       {"hartogs-kernel-equality"},
       ""},
      {"criterion-09 negative controls (annulus curvature / annulus kernel / "
       "shrunken ball)",
       {"annulus-curvature", "annulus-vs-disk-kernel", "shrunken-ball-moments"},
       "annulus curvature control: measured spread ~1e-10 (the r=0.5 annulus "
       "metric is curvature -1 up to exp(-2 pi^2/log 2) ~ 1e-12), so the "
       "declared spread > 0.1 cannot occur"},
      {"criterion-10 ellipsoid kernel consistency with the ball (1e-12)",
       {"ellipsoid-kernel-consistency"},
       ""},
      {"criterion-11 representative coordinates: identity at 0, zero at p, "
       "containment, isometry",
       {"repcoords-isometry-ball"},
       ""},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    bool pass = true;
    double min_margin = 1e300;
    std::string detail;
    for (const auto& name : c.scenarios) {
      const auto& r = find(by_name, name);
      pass = pass && r.pass;
      min_margin = std::min(min_margin, r.margin);
      if (!r.pass) {
        detail += detail.empty() ? "" : "; ";
        detail += name + " failed (margin " + std::to_string(r.margin) + ")";
        if (!r.error.empty()) detail += " error: " + r.error;
      }
    }
    std::printf("%s  %s  (min margin %.3g)%s%s\n", pass ? "PASS" : "FAIL",
                c.label.c_str(), min_margin,
                detail.empty() ? "" : ("  -- " + detail).c_str(),
                (!pass && !c.note.empty()) ? ("  [" + c.note + "]").c_str()
                                           : "");
    if (!pass) ++failures;
  }

  // criterion 1 demands its checks run in under ten seconds
  double curvature_ms = 0.0;
  for (const char* name :
       {"ball-curvature-n1", "ball-curvature-n2", "ball-curvature-n3",
        "ball-curvature-n1-fd", "ball-curvature-n2-fd", "ball-curvature-n3-fd"})
    curvature_ms += find(by_name, name).wall_ms;
  const bool fast_enough = curvature_ms < 10000.0;
  std::printf("%s  criterion-01 runtime bound: %.0f ms < 10 s\n",
              fast_enough ? "PASS" : "FAIL", curvature_ms);
  if (!fast_enough) ++failures;

  // criterion 11 bounds the whole suite at five minutes
  const bool suite_fast = suite_seconds < 300.0;
  std::printf("%s  criterion-11 suite wall clock: %.1f s < 300 s\n",
              suite_fast ? "PASS" : "FAIL", suite_seconds);
  if (!suite_fast) ++failures;

  std::printf("%d criterion(s) failing\n", failures);
  return failures == 0 ? 0 : 1;
}
