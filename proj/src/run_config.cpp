#include "trrsim/run_config.hpp"

#include <fstream>

#include "trrsim/error.hpp"

namespace trrsim {

nlohmann::json geometry_to_json(const DramGeometry& g) {
  return {{"banks", g.banks},
          {"rows_per_bank", g.rows_per_bank},
          {"columns_per_row", g.columns_per_row},
          {"ranks", g.ranks},
          {"pins", g.pins}};
}

DramGeometry geometry_from_json(const nlohmann::json& doc) {
  DramGeometry g;
  g.banks = doc.value("banks", g.banks);
  g.rows_per_bank = doc.value("rows_per_bank", g.rows_per_bank);
  g.columns_per_row = doc.value("columns_per_row", g.columns_per_row);
  g.ranks = doc.value("ranks", g.ranks);
  g.pins = doc.value("pins", g.pins);
  g.validate();
  return g;
}

nlohmann::json timing_to_json(const TimingParams& t) {
  return {{"t_refi_ns", t.t_refi_ns},
          {"t_rfc_ns", t.t_rfc_ns},
          {"t_rc_ns", t.t_rc_ns},
          {"t_refw_ms", t.t_refw_ms},
          {"refresh_slots", t.refresh_slots}};
}

TimingParams timing_from_json(const nlohmann::json& doc) {
  TimingParams t;
  t.t_refi_ns = doc.value("t_refi_ns", t.t_refi_ns);
  t.t_rfc_ns = doc.value("t_rfc_ns", t.t_rfc_ns);
  t.t_rc_ns = doc.value("t_rc_ns", t.t_rc_ns);
  t.t_refw_ms = doc.value("t_refw_ms", t.t_refw_ms);
  t.refresh_slots = doc.value("refresh_slots", t.refresh_slots);
  t.validate();
  return t;
}

namespace {

VulnerabilityParams vulnerability_from_json(const nlohmann::json& doc, std::uint64_t seed) {
  const auto gen = ddr_generation_from_string(doc.value("ddr_generation", std::string("ddr4")));
  auto p = VulnerabilityParams::defaults_for(gen);
  p.seed = doc.value("seed", seed);
  p.weak_cell_density = doc.value("weak_cell_density", p.weak_cell_density);
  p.threshold_mean = doc.value("threshold_mean", p.threshold_mean);
  p.threshold_spread = doc.value("threshold_spread", p.threshold_spread);
  p.validate();
  return p;
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  try {
    c.seed = doc.value("seed", c.seed);
    c.output_dir = doc.value("output_dir", c.output_dir);
    if (doc.contains("geometry")) c.geometry = geometry_from_json(doc["geometry"]);
    if (doc.contains("timing")) c.timing = timing_from_json(doc["timing"]);
    c.vulnerability = vulnerability_from_json(doc.value("vulnerability", nlohmann::json::object()), c.seed);
    if (doc.contains("mitigation")) {
      const auto& m = doc["mitigation"];
      if (m.is_string()) {
        c.mitigation_name = m.get<std::string>();
        c.mitigation = make_preset(c.mitigation_name);
      } else if (m.is_object()) {
        c.hidden = m.value("hidden", false);
        if (m.contains("preset")) {
          c.mitigation_name = m["preset"].get<std::string>();
          c.mitigation = make_preset(c.mitigation_name);
        } else {
          c.mitigation_name = "custom";
          c.mitigation = MitigationConfig::from_json(m);
        }
      } else {
        throw ConfigError("mitigation must be a preset name or an object");
      }
    }
    if (doc.contains("address_mapping") && !doc["address_mapping"].is_null()) {
      c.mapping = AddressMapping::from_json(doc["address_mapping"]);
      c.mapping->check_covers(c.geometry);
    }
    if (doc.contains("experiments")) {
      if (!doc["experiments"].is_object()) throw ConfigError("experiments must be an object");
      c.experiments = doc["experiments"];
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(doc);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json doc{{"seed", seed},
                     {"output_dir", output_dir},
                     {"geometry", geometry_to_json(geometry)},
                     {"timing", timing_to_json(timing)},
                     {"vulnerability",
                      {{"ddr_generation", to_string(vulnerability.generation)},
                       {"seed", vulnerability.seed},
                       {"weak_cell_density", vulnerability.weak_cell_density},
                       {"threshold_mean", vulnerability.threshold_mean},
                       {"threshold_spread", vulnerability.threshold_spread}}},
                     {"experiments", experiments}};
  if (hidden) {
    doc["mitigation"] = {{"hidden", true}};
  } else {
    auto m = mitigation.to_json();
    m["name"] = mitigation_name;
    doc["mitigation"] = std::move(m);
  }
  doc["address_mapping"] = mapping ? mapping->to_json() : nlohmann::json(nullptr);
  return doc;
}

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  vulnerability.seed = s;
  if (mitigation.para) mitigation.para->seed = s;
  for (auto& [name, section] : experiments.items())
    if (section.is_object() && section.contains("seed")) section["seed"] = s;
}

nlohmann::json RunConfig::experiment(const std::string& name) const {
  if (experiments.contains(name) && experiments[name].is_object()) return experiments[name];
  return nlohmann::json::object();
}

std::shared_ptr<const VulnerabilityProfile> RunConfig::build_profile() const {
  return std::make_shared<const VulnerabilityProfile>(build_vulnerability(geometry, vulnerability));
}

SimFactory RunConfig::sim_factory_with(std::shared_ptr<const VulnerabilityProfile> profile,
                                       const MitigationConfig& mitigation_config) const {
  return [geometry = geometry, timing = timing, profile = std::move(profile), mitigation_config] {
    return std::make_unique<DramSimulator>(geometry, timing, profile, mitigation_config);
  };
}

SimFactory RunConfig::sim_factory(std::shared_ptr<const VulnerabilityProfile> profile) const {
  return sim_factory_with(std::move(profile), mitigation);
}

TrialFactory RunConfig::trial_factory(std::shared_ptr<const VulnerabilityProfile> profile) const {
  return [geometry = geometry, timing = timing, profile = std::move(profile), m = mitigation](std::uint64_t trial) {
    auto cfg = m;
    if (cfg.para) cfg.para->seed = Rng::derive(cfg.para->seed, trial);
    return std::make_unique<DramSimulator>(geometry, timing, profile, cfg);
  };
}

}  // namespace trrsim
