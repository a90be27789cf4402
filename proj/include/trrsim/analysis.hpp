#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trrsim/controller.hpp"
#include "trrsim/fuzzer.hpp"
#include "trrsim/pattern.hpp"

namespace trrsim {

/// Rows an experiment places patterns in and scans for flips.
struct AnalysisWindow {
  BankIndex bank = 0;
  /// First row; centered in the bank when unset.
  std::optional<RowIndex> start;
  std::uint32_t rows = 128;
  /// Count flips anywhere in the bank instead of only inside the window.
  bool full_bank = false;

  RowIndex resolved_start(const DramGeometry& geometry) const;
  /// Lowest aggressor row of generated patterns: the middle of the window.
  RowIndex pattern_base(const DramGeometry& geometry) const;
  /// Flips that fall inside the scanned area.
  std::vector<Flip> scan(DramSimulator& sim) const;
};

/// n aggressors at stride 2 from the window's pattern base.
std::vector<RowIndex> strided_aggressors(const AnalysisWindow& window, const DramGeometry& geometry,
                                         std::uint32_t n);

/// Smallest per-aggressor ACT count of a double-sided hammer around `row` that
/// flips a bit in `row` with refresh disabled; none when `limit` ACTs per
/// aggressor do not flip it.
std::optional<std::uint64_t> min_activations(const SimFactory& factory, BankIndex bank, RowIndex row,
                                             std::uint64_t limit);

/// min_activations for each row, searched by bisection.
std::map<RowIndex, std::optional<std::uint64_t>> min_activation_sweep(const SimFactory& factory, BankIndex bank,
                                                                      const std::vector<RowIndex>& rows,
                                                                      std::uint64_t limit = 1'000'000);

/// row,hc_first
std::string min_activation_csv(const std::map<RowIndex, std::optional<std::uint64_t>>& result);

struct RefreshGrid {
  std::vector<std::uint32_t> n_values;
  std::vector<std::uint32_t> r_values;
  /// flips[i][j] for n_values[i], r_values[j].
  std::vector<std::vector<std::size_t>> flips;
  std::uint64_t hammers_per_round = 8'000;
  std::uint32_t rounds = 10;
  HammerCount count = HammerCount::per_aggressor;

  std::size_t at(std::uint32_t n, std::uint32_t r) const;
  /// n,r,flips
  std::string to_csv() const;
  nlohmann::json to_json() const;
};

struct GridParams {
  std::vector<std::uint32_t> n_values{2, 3, 4, 5, 6, 7, 8};
  std::vector<std::uint32_t> r_values{0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::uint64_t hammers_per_round = 8'000;
  std::uint32_t rounds = 10;
  HammerCount count = HammerCount::per_aggressor;
  AnalysisWindow window;
};

/// One batch_refresh_experiment per (n, r) cell on a fresh simulator, with
/// strided aggressors.
RefreshGrid refresh_grid(const SimFactory& factory, const GridParams& params);

/// Estimate of the sampler size, or nothing when no plateau is visible.
struct SamplerInference {
  std::optional<std::uint32_t> estimate;
  /// Plateau start per n, when that row of the grid has one.
  std::map<std::uint32_t, std::uint32_t> plateaus;

  bool conclusive() const { return estimate.has_value(); }
  nlohmann::json to_json() const;
};

/// For each n, the plateau start is the smallest r with flips > 0 from which
/// every later r stays > 0 and within a relative `tolerance` of flips(r).
/// Plateaus that start in 1 <= r < n count; the estimate is the smallest of
/// them.
SamplerInference infer_sampler_size(const RefreshGrid& grid, double tolerance = 0);

struct SweepParams {
  std::uint64_t activations_per_aggressor = 500'000;
  RefreshMode mode = RefreshMode::standard;
  /// Restart the round-robin at the first aggressor after every REF.
  bool sync_to_refresh = true;
  AnalysisWindow window;
};

/// n -> unique flips of a strided n-sided hammer.
std::map<std::uint32_t, std::size_t> aggressor_sweep(const SimFactory& factory,
                                                     const std::vector<std::uint32_t>& n_values,
                                                     const SweepParams& params);

/// d -> unique flips of a pair-based pattern with n aggressors.
std::map<std::uint32_t, std::size_t> distance_sweep(const SimFactory& factory, std::uint32_t n,
                                                    const std::vector<std::uint32_t>& d_values,
                                                    const SweepParams& params);

/// key,flips with the given key column name.
std::string sweep_csv(const std::string& key, const std::map<std::uint32_t, std::size_t>& result);

/// Simulator for trial number `trial`; mitigations with randomness draw a
/// per-trial seed from it.
using TrialFactory = std::function<std::unique_ptr<DramSimulator>(std::uint64_t trial)>;

struct RepeatabilityResult {
  std::uint32_t trials = 0;
  /// Trials in which the target row flipped.
  std::uint32_t reproduced = 0;
  /// Distinct flips outside the target row over all trials.
  std::size_t spurious_flips = 0;
  std::vector<bool> per_trial;

  double fraction() const { return trials == 0 ? 0.0 : static_cast<double>(reproduced) / trials; }
  nlohmann::json to_json() const;
  /// trial,target_flipped
  std::string to_csv() const;
};

/// Hammers the pattern on a fresh simulator per trial and records whether
/// `target_row` flips.
RepeatabilityResult repeatability_test(const TrialFactory& factory, const HammerPattern& pattern,
                                       RowIndex target_row, std::uint32_t trials, const SweepParams& params);

/// Upper bound on the pressure any victim can accumulate between two periodic
/// refreshes of its row: every ACT in that interval, back to back.
std::uint64_t max_victim_pressure(const TimingParams& timing, RefreshMode mode);

struct DoubleRefreshResult {
  CampaignResult campaign;
  /// Lowest weak-cell threshold in the fuzzing window.
  std::uint32_t min_threshold = 0;
  std::uint64_t pressure_bound = 0;
  /// True when the bound alone rules out any flip.
  bool provably_safe() const { return min_threshold > pressure_bound; }
  bool bypassed() const { return campaign.bypassed(); }
  nlohmann::json to_json() const;
};

/// Fuzz campaign with the refresh rate doubled.
DoubleRefreshResult double_refresh_test(const SimFactory& factory, FuzzConfig config);

}  // namespace trrsim
