#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "trrsim/addressing.hpp"
#include "trrsim/analysis.hpp"
#include "trrsim/fuzzer.hpp"
#include "trrsim/mitigation.hpp"
#include "trrsim/vulnerability.hpp"

namespace trrsim {

/// Everything a CLI run needs, loaded from a JSON document.
///
/// {
///   "seed": 1,
///   "output_dir": "trrsim-out",
///   "geometry": {"banks": 16, "rows_per_bank": 8192, ...},
///   "timing": {"t_refi_ns": 7800, "t_rfc_ns": 350, "t_rc_ns": 45, "t_refw_ms": 64, "refresh_slots": 8192},
///   "vulnerability": {"ddr_generation": "ddr4", "weak_cell_density": 0.001, ...},
///   "mitigation": "case_one" | {"preset": "case_one", "hidden": true}
///                | {"sampler": {...}, "inhibitor": {...}, "hidden": false},
///   "address_mapping": {"bank_functions": ["0x22000", ...], "row_mask": "...", "column_mask": "..."},
///   "experiments": {"fuzz": {...}, "grid": {...}, ...}
/// }
struct RunConfig {
  std::uint64_t seed = 1;
  std::string output_dir = "trrsim-out";
  DramGeometry geometry;
  TimingParams timing;
  VulnerabilityParams vulnerability = VulnerabilityParams::defaults_for(DdrGeneration::ddr4);
  MitigationConfig mitigation;
  /// Preset name, or "custom" for an explicit configuration.
  std::string mitigation_name = "none";
  /// Keeps the mitigation out of reports.
  bool hidden = false;
  std::optional<AddressMapping> mapping;
  /// Per-experiment parameter sections, keyed by subcommand name.
  nlohmann::json experiments = nlohmann::json::object();

  /// Throws ConfigError on malformed documents.
  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig load(const std::string& path);
  nlohmann::json to_json() const;

  /// Uses `s` for the profile, the campaign and any mitigation randomness.
  void apply_seed(std::uint64_t s);

  /// Section of `experiments`, or an empty object.
  nlohmann::json experiment(const std::string& name) const;

  std::shared_ptr<const VulnerabilityProfile> build_profile() const;

  /// Factory over a shared profile; the mitigation stays inside the closure.
  SimFactory sim_factory(std::shared_ptr<const VulnerabilityProfile> profile) const;
  /// Like sim_factory but PARA draws a fresh seed for every trial.
  TrialFactory trial_factory(std::shared_ptr<const VulnerabilityProfile> profile) const;
  /// Factory with a different mitigation (for controller-side experiments).
  SimFactory sim_factory_with(std::shared_ptr<const VulnerabilityProfile> profile,
                              const MitigationConfig& mitigation) const;
};

nlohmann::json geometry_to_json(const DramGeometry& g);
DramGeometry geometry_from_json(const nlohmann::json& doc);
nlohmann::json timing_to_json(const TimingParams& t);
TimingParams timing_from_json(const nlohmann::json& doc);

}  // namespace trrsim
