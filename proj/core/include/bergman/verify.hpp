#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bergman/diffgeo.hpp"
#include "bergman/domain.hpp"
#include "bergman/holomap.hpp"
#include "bergman/kernels.hpp"
#include "bergman/moments.hpp"

namespace bergman::verify {

enum class CheckKind {
  CurvatureConstancy,
  MomentIdentity,
  KernelEquality,
  StirlingLimit,
  Isometry,
  MapIdentity,
  SupportReach,
};

std::string to_string(CheckKind kind);
CheckKind check_kind_from_string(const std::string& s);

/// Where an expected value comes from. Scenarios without a tag refuse to load.
enum class Provenance {
  ClosedForm,  // evaluated from an explicit formula
  Oracle,      // computed by an independent numerical oracle
  Definition,  // immediate from a definition or construction
};

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

struct Scenario {
  std::string name;
  CheckKind kind = CheckKind::CurvatureConstancy;
  Provenance provenance = Provenance::Definition;
  bool negative_control = false;
  nlohmann::json params;
  std::optional<std::uint64_t> seed_override;

  nlohmann::json to_json() const;
  /// Throws ValidationError listing every missing required field.
  static Scenario from_json(const nlohmann::json& j);
};

struct ScenarioResult {
  std::string name;
  std::string kind;
  bool negative_control = false;
  /// Outcome of the underlying positive check.
  bool positive_pass = false;
  /// Final verdict; negative controls pass by failing their positive check
  /// beyond the declared margin.
  bool pass = false;
  double margin = 0.0;
  std::map<std::string, double> observed;
  std::string expected_desc;
  std::string provenance;
  std::string engine;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
  std::string error;

  nlohmann::json to_json(bool include_wall) const;
};

struct VerificationReport {
  std::uint64_t master_seed = 0;
  std::vector<ScenarioResult> results;

  bool all_pass() const;
  nlohmann::json to_json(bool include_wall = false) const;
  std::string to_table() const;
};

/// Seed of a scenario: FNV-1a of the name folded into the master seed, so
/// adding scenarios never perturbs existing streams.
std::uint64_t scenario_seed(const std::string& name, std::uint64_t master);

ScenarioResult run_scenario(const Scenario& s, std::uint64_t master_seed);
VerificationReport run_suite(const std::vector<Scenario>& scenarios,
                             std::uint64_t master_seed);

/// The registry backing the acceptance checks; names are stable.
std::vector<Scenario> built_in_suite();

/// max over sampled points/pairs of |K_a - K_b| / (1 + |K_b|).
double kernel_equality_check(const Kernel& ka, const Kernel& kb,
                             const DomainDescriptor& sample_domain, int samples,
                             std::uint64_t seed);

// ---- JSON descriptor parsing (scenario files) ----

Complex parse_complex(const nlohmann::json& j);
CVector parse_cvector(const nlohmann::json& j);
CMatrix parse_cmatrix(const nlohmann::json& j);
DomainDescriptor parse_domain(const nlohmann::json& j);
KernelPtr parse_kernel(const nlohmann::json& j);
HolomorphicMap parse_map(const nlohmann::json& j);
std::vector<Scenario> load_scenario_file(const std::string& path);

}  // namespace bergman::verify
