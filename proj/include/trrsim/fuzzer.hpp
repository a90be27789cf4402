#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "trrsim/controller.hpp"
#include "trrsim/dram.hpp"
#include "trrsim/pattern.hpp"

namespace trrsim {

/// Produces a fresh simulator per evaluation. The mitigation lives inside the
/// closure, so code holding only a factory cannot inspect it.
using SimFactory = std::function<std::unique_ptr<DramSimulator>()>;

/// floor(floor(tREFW / tRC) / activations_floor): how many rows can each get
/// `activations_floor` ACTs within one refresh window.
std::uint32_t cardinality_cap(const TimingParams& timing, std::uint64_t activations_floor);

struct FuzzConfig {
  std::uint64_t seed = 1;
  std::uint64_t candidate_budget = 10'000;
  BankIndex bank = 0;
  std::uint32_t window_rows = 128;
  /// First row of the window; centered in the bank when unset.
  std::optional<RowIndex> window_start;
  std::uint32_t min_cardinality = 2;
  std::uint32_t max_cardinality = 28;
  std::uint64_t activations_floor = 50'000;
  double refresh_period_multiplier = 3.0;
  /// Off: rows come from anywhere in the bank, ignoring adjacency.
  bool location_control = true;
  RefreshMode refresh_mode = RefreshMode::standard;
  /// Restart the round-robin at the first aggressor after every REF.
  bool sync_to_refresh = true;
  /// Stop at the first candidate that flips a bit.
  bool stop_after_first_hit = false;
  std::uint32_t threads = 1;

  RowIndex resolved_window_start(const DramGeometry& geometry) const;
  /// Throws ConfigError on inconsistent settings.
  void validate(const DramGeometry& geometry, const TimingParams& timing) const;

  nlohmann::json to_json() const;
  static FuzzConfig from_json(const nlohmann::json& doc);
};

/// Cardinality uniform in [min, max], rows uniform without duplicates, in
/// ascending order. Rows come from the window, or from the whole bank when
/// location control is off.
HammerPattern generate_pattern(Rng& rng, const FuzzConfig& config, const DramGeometry& geometry);

/// Pattern for candidate `index` of a campaign; independent of evaluation order.
HammerPattern candidate_pattern(const FuzzConfig& config, const DramGeometry& geometry, std::uint64_t index);

struct Evaluation {
  std::vector<Flip> flips;
  std::size_t unique_flips() const { return flips.size(); }
};

/// Hammers the pattern round-robin under the configured refresh mode for
/// refresh_period_multiplier x tREFW on a fresh simulator, then collects the
/// flips of the pattern's bank.
Evaluation evaluate_pattern(const SimFactory& factory, const HammerPattern& pattern, const FuzzConfig& config);

struct CandidateResult {
  std::uint64_t index = 0;
  HammerPattern pattern;
  std::size_t flips = 0;
};

struct CampaignResult {
  /// Every evaluated candidate in index order.
  std::vector<CandidateResult> evaluated;
  /// Candidates with flips > 0: flips descending, cardinality ascending, index.
  std::vector<CandidateResult> ranked;
  /// Distinct (bank, row, bit) flipped over the whole campaign.
  std::size_t unique_flips = 0;

  bool bypassed() const { return !ranked.empty(); }
  const CandidateResult* best() const { return ranked.empty() ? nullptr : &ranked.front(); }

  nlohmann::json to_json() const;
  /// candidate_index,nomenclature,cardinality,flips
  std::string to_csv() const;
};

/// Evaluates candidates 0..budget-1, in parallel when threads > 1. Results
/// are merged by candidate index, so any thread count gives the same output.
CampaignResult fuzz_campaign(const SimFactory& factory, const FuzzConfig& config);

}  // namespace trrsim
