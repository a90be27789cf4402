#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "trrsim/command.hpp"
#include "trrsim/dram.hpp"

namespace trrsim {

enum class RefreshMode : std::uint8_t { disabled, standard, double_rate };

std::string to_string(RefreshMode m);
RefreshMode refresh_mode_from_string(const std::string& s);

/// Interval between periodic REFs, 0 when refresh is disabled.
std::int64_t refresh_interval_ns(RefreshMode mode, const TimingParams& timing);

/// Flips plus timing statistics of one experiment.
struct ExperimentReport {
  std::vector<Flip> flips;
  std::int64_t elapsed_ns = 0;
  std::uint64_t activations = 0;
  std::uint64_t refreshes = 0;
  std::uint64_t targeted_refreshes = 0;
  std::uint64_t inhibitor_calls = 0;

  nlohmann::json to_json() const;
};

enum class DurationPolicy : std::uint8_t { fixed_activations, cover_refresh_periods };

/// Round-robin hammering of a set of aggressors in one bank.
struct HammerSchedule {
  BankIndex bank = 0;
  std::vector<RowIndex> aggressors;
  /// fixed_activations: ACTs per aggressor. cover_refresh_periods: the
  /// minimum each aggressor must receive, checked against the budget.
  std::uint64_t activations_per_aggressor = 0;
  DurationPolicy duration = DurationPolicy::fixed_activations;
  /// Number of tREFW windows to cover in cover_refresh_periods mode.
  double refresh_periods = 3.0;
  /// Restart the round-robin at the first aggressor after every REF instead
  /// of continuing where the previous interval stopped.
  bool sync_to_refresh = false;
};

/// Executes commands verbatim and reports what happened during the script.
ExperimentReport run_script(DramSimulator& sim, std::span<const Command> commands);

/// Hammers per the schedule while inserting periodic REFs. REF deadlines sit
/// on a fixed grid of the refresh interval starting at the current time; a
/// REF is issued at the first command boundary at or after its deadline.
ExperimentReport hammer_with_refresh(DramSimulator& sim, const HammerSchedule& schedule, RefreshMode mode);

enum class HammerCount : std::uint8_t { per_aggressor, total };

struct BatchRefreshParams {
  BankIndex bank = 0;
  std::vector<RowIndex> aggressors;
  std::uint64_t hammers_per_round = 8'000;
  HammerCount count = HammerCount::per_aggressor;
  std::uint32_t refreshes_per_round = 0;
  std::uint32_t rounds = 10;
};

/// Rounds of round-robin hammering each followed by r back-to-back REFs.
/// Returns the number of unique flips latched at the end.
std::size_t batch_refresh_experiment(DramSimulator& sim, const BatchRefreshParams& params);

}  // namespace trrsim
