#include "trrsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "trrsim/error.hpp"

namespace trrsim {

RowIndex AnalysisWindow::resolved_start(const DramGeometry& geometry) const {
  if (start) return *start;
  return geometry.rows_per_bank / 2 - std::min(geometry.rows_per_bank / 2, rows / 2);
}

RowIndex AnalysisWindow::pattern_base(const DramGeometry& geometry) const {
  return resolved_start(geometry) + rows / 2;
}

std::vector<Flip> AnalysisWindow::scan(DramSimulator& sim) const {
  auto flips = sim.read_flips(bank);
  if (full_bank) return flips;
  const auto lo = resolved_start(sim.geometry());
  const auto hi = std::uint64_t{lo} + rows;
  std::erase_if(flips, [&](const Flip& f) { return f.row < lo || f.row >= hi; });
  return flips;
}

std::vector<RowIndex> strided_aggressors(const AnalysisWindow& window, const DramGeometry& geometry,
                                         std::uint32_t n) {
  return strided_pattern(window.pattern_base(geometry), n, geometry, window.bank).aggressors;
}

namespace {

bool row_flips(const SimFactory& factory, BankIndex bank, RowIndex row, std::uint64_t per_aggressor) {
  auto sim = factory();
  HammerSchedule s;
  s.bank = bank;
  s.aggressors = {row - 1, row + 1};
  s.activations_per_aggressor = per_aggressor;
  hammer_with_refresh(*sim, s, RefreshMode::disabled);
  const auto flips = sim->read_flips(bank);
  return std::any_of(flips.begin(), flips.end(), [&](const Flip& f) { return f.row == row; });
}

}  // namespace

std::optional<std::uint64_t> min_activations(const SimFactory& factory, BankIndex bank, RowIndex row,
                                             std::uint64_t limit) {
  {
    auto probe = factory();
    const auto& g = probe->geometry();
    if (bank >= g.banks) throw IndexError("min_activations: bank out of range");
    if (row == 0 || row + 1 >= g.rows_per_bank)
      throw IndexError("min_activations: row " + std::to_string(row) + " has no neighbor on one side");
    if (probe->profile().cells(bank, row).empty()) return std::nullopt;
  }
  if (limit == 0 || !row_flips(factory, bank, row, limit)) return std::nullopt;
  std::uint64_t lo = 0;
  std::uint64_t hi = limit;
  // invariant: lo does not flip, hi flips
  while (hi - lo > 1) {
    const auto mid = lo + (hi - lo) / 2;
    if (row_flips(factory, bank, row, mid))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::map<RowIndex, std::optional<std::uint64_t>> min_activation_sweep(const SimFactory& factory, BankIndex bank,
                                                                      const std::vector<RowIndex>& rows,
                                                                      std::uint64_t limit) {
  std::map<RowIndex, std::optional<std::uint64_t>> out;
  for (auto r : rows) out[r] = min_activations(factory, bank, r, limit);
  return out;
}

std::string min_activation_csv(const std::map<RowIndex, std::optional<std::uint64_t>>& result) {
  std::ostringstream out;
  out << "row,hc_first\n";
  for (const auto& [row, hc] : result) {
    out << row << ',';
    if (hc) out << *hc;
    out << '\n';
  }
  return out.str();
}

std::size_t RefreshGrid::at(std::uint32_t n, std::uint32_t r) const {
  const auto i = std::find(n_values.begin(), n_values.end(), n);
  const auto j = std::find(r_values.begin(), r_values.end(), r);
  if (i == n_values.end() || j == r_values.end())
    throw IndexError("refresh grid has no cell (" + std::to_string(n) + ", " + std::to_string(r) + ")");
  return flips[static_cast<std::size_t>(i - n_values.begin())][static_cast<std::size_t>(j - r_values.begin())];
}

std::string RefreshGrid::to_csv() const {
  std::ostringstream out;
  out << "n,r,flips\n";
  for (std::size_t i = 0; i < n_values.size(); ++i)
    for (std::size_t j = 0; j < r_values.size(); ++j) out << n_values[i] << ',' << r_values[j] << ',' << flips[i][j] << '\n';
  return out.str();
}

nlohmann::json RefreshGrid::to_json() const {
  return {{"n_values", n_values},
          {"r_values", r_values},
          {"flips", flips},
          {"hammers_per_round", hammers_per_round},
          {"rounds", rounds},
          {"hammer_count", count == HammerCount::per_aggressor ? "per_aggressor" : "total"}};
}

RefreshGrid refresh_grid(const SimFactory& factory, const GridParams& params) {
  RefreshGrid grid;
  grid.n_values = params.n_values;
  grid.r_values = params.r_values;
  grid.hammers_per_round = params.hammers_per_round;
  grid.rounds = params.rounds;
  grid.count = params.count;
  for (auto n : params.n_values) {
    if (n == 0) throw ConfigError("refresh grid: n must be >= 1");
    std::vector<std::size_t> row;
    for (auto r : params.r_values) {
      auto sim = factory();
      BatchRefreshParams p;
      p.bank = params.window.bank;
      p.aggressors = strided_aggressors(params.window, sim->geometry(), n);
      p.hammers_per_round = params.hammers_per_round;
      p.count = params.count;
      p.refreshes_per_round = r;
      p.rounds = params.rounds;
      batch_refresh_experiment(*sim, p);
      row.push_back(params.window.scan(*sim).size());
    }
    grid.flips.push_back(std::move(row));
  }
  return grid;
}

nlohmann::json SamplerInference::to_json() const {
  nlohmann::json plateau_doc = nlohmann::json::object();
  for (const auto& [n, r] : plateaus) plateau_doc[std::to_string(n)] = r;
  return {{"conclusive", conclusive()},
          {"sampler_size", estimate ? nlohmann::json(*estimate) : nlohmann::json(nullptr)},
          {"plateaus", plateau_doc}};
}

SamplerInference infer_sampler_size(const RefreshGrid& grid, double tolerance) {
  if (!(tolerance >= 0)) throw ConfigError("infer_sampler_size: tolerance must be >= 0");
  // columns must be visited in increasing r
  std::vector<std::size_t> order(grid.r_values.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return grid.r_values[a] < grid.r_values[b]; });

  SamplerInference out;
  for (std::size_t i = 0; i < grid.n_values.size(); ++i) {
    const auto n = grid.n_values[i];
    const auto& f = grid.flips[i];
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto base = static_cast<double>(f[order[k]]);
      if (base == 0) break;
      bool stable = true;
      for (std::size_t q = k; q < order.size() && stable; ++q) {
        const auto v = static_cast<double>(f[order[q]]);
        stable = v > 0 && std::abs(v - base) <= tolerance * base;
      }
      if (!stable) continue;
      const auto r = grid.r_values[order[k]];
      out.plateaus[n] = r;
      if (r > 0 && r < n && (!out.estimate || r < *out.estimate)) out.estimate = r;
      break;
    }
  }
  return out;
}

namespace {

std::size_t hammer_window(const SimFactory& factory, const std::vector<RowIndex>& aggressors,
                          const SweepParams& params) {
  auto sim = factory();
  HammerSchedule s;
  s.bank = params.window.bank;
  s.aggressors = aggressors;
  s.activations_per_aggressor = params.activations_per_aggressor;
  s.sync_to_refresh = params.sync_to_refresh;
  hammer_with_refresh(*sim, s, params.mode);
  return params.window.scan(*sim).size();
}

DramGeometry geometry_of(const SimFactory& factory) { return factory()->geometry(); }

}  // namespace

std::map<std::uint32_t, std::size_t> aggressor_sweep(const SimFactory& factory,
                                                     const std::vector<std::uint32_t>& n_values,
                                                     const SweepParams& params) {
  const auto g = geometry_of(factory);
  std::map<std::uint32_t, std::size_t> out;
  for (auto n : n_values) out[n] = hammer_window(factory, strided_aggressors(params.window, g, n), params);
  return out;
}

std::map<std::uint32_t, std::size_t> distance_sweep(const SimFactory& factory, std::uint32_t n,
                                                    const std::vector<std::uint32_t>& d_values,
                                                    const SweepParams& params) {
  const auto g = geometry_of(factory);
  std::map<std::uint32_t, std::size_t> out;
  for (auto d : d_values) {
    const auto p = pair_based_pattern(params.window.pattern_base(g), d, n, g, params.window.bank);
    out[d] = hammer_window(factory, p.aggressors, params);
  }
  return out;
}

std::string sweep_csv(const std::string& key, const std::map<std::uint32_t, std::size_t>& result) {
  std::ostringstream out;
  out << key << ",flips\n";
  for (const auto& [k, v] : result) out << k << ',' << v << '\n';
  return out.str();
}

nlohmann::json RepeatabilityResult::to_json() const {
  return {{"trials", trials},
          {"reproduced", reproduced},
          {"fraction", fraction()},
          {"spurious_flips", spurious_flips}};
}

std::string RepeatabilityResult::to_csv() const {
  std::ostringstream out;
  out << "trial,target_flipped\n";
  for (std::size_t t = 0; t < per_trial.size(); ++t) out << t << ',' << (per_trial[t] ? 1 : 0) << '\n';
  return out.str();
}

RepeatabilityResult repeatability_test(const TrialFactory& factory, const HammerPattern& pattern,
                                       RowIndex target_row, std::uint32_t trials, const SweepParams& params) {
  if (pattern.aggressors.empty()) throw ConfigError("repeatability: empty pattern");
  RepeatabilityResult out;
  out.trials = trials;
  std::set<std::pair<RowIndex, std::uint32_t>> spurious;
  for (std::uint32_t t = 0; t < trials; ++t) {
    auto sim = factory(t);
    if (target_row >= sim->geometry().rows_per_bank) throw IndexError("repeatability: target row out of range");
    HammerSchedule s;
    s.bank = pattern.bank;
    s.aggressors = pattern.aggressors;
    s.activations_per_aggressor = params.activations_per_aggressor;
    s.sync_to_refresh = params.sync_to_refresh;
    hammer_with_refresh(*sim, s, params.mode);
    bool hit = false;
    for (const auto& f : sim->read_flips(pattern.bank)) {
      if (f.row == target_row)
        hit = true;
      else
        spurious.emplace(f.row, f.bit);
    }
    out.per_trial.push_back(hit);
    if (hit) ++out.reproduced;
  }
  out.spurious_flips = spurious.size();
  return out;
}

std::uint64_t max_victim_pressure(const TimingParams& timing, RefreshMode mode) {
  const auto interval = refresh_interval_ns(mode, timing);
  if (interval == 0) return UINT64_MAX;
  const auto span_ns = timing.slot_count() * interval;
  return static_cast<std::uint64_t>(span_ns / timing.t_rc_ns);
}

nlohmann::json DoubleRefreshResult::to_json() const {
  auto doc = campaign.to_json();
  doc["min_threshold"] = min_threshold;
  doc["pressure_bound"] = pressure_bound;
  doc["provably_safe"] = provably_safe();
  doc["bypassed"] = bypassed();
  return doc;
}

DoubleRefreshResult double_refresh_test(const SimFactory& factory, FuzzConfig config) {
  config.refresh_mode = RefreshMode::double_rate;
  DoubleRefreshResult out;
  {
    auto probe = factory();
    const auto& g = probe->geometry();
    out.pressure_bound = max_victim_pressure(probe->timing(), RefreshMode::double_rate);
    const auto mins = probe->profile().bank_min_thresholds(config.bank);
    RowIndex lo = 0;
    RowIndex hi = g.rows_per_bank;
    if (config.location_control) {
      lo = config.resolved_window_start(g);
      hi = static_cast<RowIndex>(std::min<std::uint64_t>(g.rows_per_bank, std::uint64_t{lo} + config.window_rows));
    }
    out.min_threshold = *std::min_element(mins.begin() + lo, mins.begin() + hi);
  }
  out.campaign = fuzz_campaign(factory, config);
  return out;
}

}  // namespace trrsim
