#include "trrsim/controller.hpp"

#include <cmath>

#include "trrsim/error.hpp"

namespace trrsim {

std::string to_string(RefreshMode m) {
  switch (m) {
    case RefreshMode::disabled: return "disabled";
    case RefreshMode::standard: return "standard";
    case RefreshMode::double_rate: return "double";
  }
  return "standard";
}

RefreshMode refresh_mode_from_string(const std::string& s) {
  if (s == "disabled") return RefreshMode::disabled;
  if (s == "standard") return RefreshMode::standard;
  if (s == "double") return RefreshMode::double_rate;
  throw ConfigError("unknown refresh mode '" + s + "'");
}

std::int64_t refresh_interval_ns(RefreshMode mode, const TimingParams& timing) {
  switch (mode) {
    case RefreshMode::disabled: return 0;
    case RefreshMode::standard: return timing.t_refi_ns;
    case RefreshMode::double_rate: return timing.t_refi_ns / 2;
  }
  return 0;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json flips_doc = nlohmann::json::array();
  for (const auto& f : flips)
    flips_doc.push_back({{"bank", f.bank}, {"row", f.row}, {"bit", f.bit}, {"direction", to_string(f.direction)}});
  return {{"elapsed_ns", elapsed_ns},        {"activations", activations},
          {"refreshes", refreshes},          {"targeted_refreshes", targeted_refreshes},
          {"inhibitor_calls", inhibitor_calls}, {"unique_flips", flips.size()},
          {"flips", flips_doc}};
}

namespace {

struct Snapshot {
  std::int64_t now;
  SimStats stats;
  MitigationStats mitigation;
};

Snapshot snapshot(const DramSimulator& sim) { return {sim.now_ns(), sim.stats(), sim.mitigation().stats()}; }

ExperimentReport finish(DramSimulator& sim, const Snapshot& before) {
  ExperimentReport r;
  r.flips = sim.read_all_flips();
  r.elapsed_ns = sim.now_ns() - before.now;
  r.activations = sim.stats().activations - before.stats.activations;
  r.refreshes = sim.stats().refreshes - before.stats.refreshes;
  r.targeted_refreshes = sim.stats().targeted_row_refreshes - before.stats.targeted_row_refreshes;
  r.inhibitor_calls = sim.mitigation().stats().inhibitor_calls - before.mitigation.inhibitor_calls;
  return r;
}

}  // namespace

ExperimentReport run_script(DramSimulator& sim, std::span<const Command> commands) {
  const auto before = snapshot(sim);
  for (const auto& c : commands) sim.issue(c);
  return finish(sim, before);
}

ExperimentReport hammer_with_refresh(DramSimulator& sim, const HammerSchedule& schedule, RefreshMode mode) {
  const auto& timing = sim.timing();
  const std::size_t n = schedule.aggressors.size();
  if (n == 0) throw ConfigError("hammer schedule: no aggressors");
  const auto interval = refresh_interval_ns(mode, timing);

  std::uint64_t total = 0;
  std::int64_t stop_ns = 0;
  if (schedule.duration == DurationPolicy::fixed_activations) {
    total = schedule.activations_per_aggressor * n;
  } else {
    if (!(schedule.refresh_periods > 0)) throw ConfigError("hammer schedule: refresh_periods must be > 0");
    const auto window = static_cast<std::int64_t>(std::llround(schedule.refresh_periods * timing.t_refw_ns()));
    const auto budget = static_cast<std::uint64_t>(window / timing.t_rc_ns);
    if (schedule.activations_per_aggressor * n > budget)
      throw ConfigError("activation budget exceeded: " + std::to_string(n) + " aggressors x " +
                        std::to_string(schedule.activations_per_aggressor) + " ACTs > floor(window / tRC) = " +
                        std::to_string(budget));
    stop_ns = sim.now_ns() + window;
  }

  const auto before = snapshot(sim);
  std::int64_t deadline = sim.now_ns() + interval;
  std::size_t phase = 0;
  std::uint64_t done = 0;
  const bool timed = schedule.duration == DurationPolicy::cover_refresh_periods;
  while (timed ? sim.now_ns() < stop_ns : done < total) {
    if (interval > 0 && sim.now_ns() >= deadline) {
      sim.issue(Command::ref());
      deadline += interval;
      if (schedule.sync_to_refresh) phase = 0;
      continue;
    }
    std::int64_t horizon = timed ? stop_ns : INT64_MAX;
    if (interval > 0) horizon = std::min(horizon, deadline);
    std::uint64_t chunk;
    if (horizon == INT64_MAX) {
      chunk = total - done;
    } else {
      chunk = static_cast<std::uint64_t>((horizon - sim.now_ns() + timing.t_rc_ns - 1) / timing.t_rc_ns);
      chunk = std::max<std::uint64_t>(chunk, 1);
    }
    if (!timed) chunk = std::min(chunk, total - done);
    sim.activate_run(schedule.bank, schedule.aggressors, phase, chunk);
    phase = (phase + chunk) % n;
    done += chunk;
  }
  return finish(sim, before);
}

std::size_t batch_refresh_experiment(DramSimulator& sim, const BatchRefreshParams& params) {
  const std::size_t n = params.aggressors.size();
  if (n == 0) throw ConfigError("batch refresh: no aggressors");
  const std::uint64_t per_round =
      params.count == HammerCount::per_aggressor ? params.hammers_per_round * n : params.hammers_per_round;
  std::size_t phase = 0;
  for (std::uint32_t round = 0; round < params.rounds; ++round) {
    sim.activate_run(params.bank, params.aggressors, phase, per_round);
    phase = (phase + per_round) % n;
    for (std::uint32_t r = 0; r < params.refreshes_per_round; ++r) sim.issue(Command::ref());
  }
  return sim.read_all_flips().size();
}

}  // namespace trrsim
