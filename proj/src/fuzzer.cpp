#include "trrsim/fuzzer.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "trrsim/error.hpp"

namespace trrsim {

std::uint32_t cardinality_cap(const TimingParams& timing, std::uint64_t activations_floor) {
  if (activations_floor == 0) throw ConfigError("activations floor must be >= 1");
  const auto budget = static_cast<std::uint64_t>(timing.t_refw_ns() / timing.t_rc_ns);
  return static_cast<std::uint32_t>(budget / activations_floor);
}

RowIndex FuzzConfig::resolved_window_start(const DramGeometry& geometry) const {
  if (window_start) return *window_start;
  return geometry.rows_per_bank / 2 - std::min(geometry.rows_per_bank / 2, window_rows / 2);
}

void FuzzConfig::validate(const DramGeometry& geometry, const TimingParams& timing) const {
  if (bank >= geometry.banks) throw ConfigError("fuzz: bank out of range");
  if (min_cardinality < 1) throw ConfigError("fuzz: min_cardinality must be >= 1");
  if (min_cardinality > max_cardinality) throw ConfigError("fuzz: min_cardinality exceeds max_cardinality");
  const auto cap = cardinality_cap(timing, activations_floor);
  if (max_cardinality > cap)
    throw ConfigError("fuzz: max_cardinality " + std::to_string(max_cardinality) +
                      " exceeds floor(floor(tREFW / tRC) / activations_floor) = " + std::to_string(cap));
  if (!(refresh_period_multiplier > 0)) throw ConfigError("fuzz: refresh_period_multiplier must be > 0");
  if (window_rows < 1) throw ConfigError("fuzz: window_rows must be >= 1");
  if (location_control) {
    if (std::uint64_t{resolved_window_start(geometry)} + window_rows > geometry.rows_per_bank)
      throw ConfigError("fuzz: window extends past the bank");
    if (window_rows < max_cardinality) throw ConfigError("fuzz: window smaller than max_cardinality");
  } else if (geometry.rows_per_bank < max_cardinality) {
    throw ConfigError("fuzz: bank smaller than max_cardinality");
  }
  if (threads < 1) throw ConfigError("fuzz: threads must be >= 1");
}

nlohmann::json FuzzConfig::to_json() const {
  nlohmann::json doc{{"seed", seed},
                     {"candidate_budget", candidate_budget},
                     {"bank", bank},
                     {"window_rows", window_rows},
                     {"min_cardinality", min_cardinality},
                     {"max_cardinality", max_cardinality},
                     {"activations_floor", activations_floor},
                     {"refresh_period_multiplier", refresh_period_multiplier},
                     {"location_control", location_control},
                     {"refresh_mode", to_string(refresh_mode)},
                     {"sync_to_refresh", sync_to_refresh},
                     {"stop_after_first_hit", stop_after_first_hit},
                     {"threads", threads}};
  doc["window_start"] = window_start ? nlohmann::json(*window_start) : nlohmann::json(nullptr);
  return doc;
}

FuzzConfig FuzzConfig::from_json(const nlohmann::json& doc) {
  FuzzConfig c;
  try {
    c.seed = doc.value("seed", c.seed);
    c.candidate_budget = doc.value("candidate_budget", c.candidate_budget);
    c.bank = doc.value("bank", c.bank);
    c.window_rows = doc.value("window_rows", c.window_rows);
    if (doc.contains("window_start") && !doc["window_start"].is_null())
      c.window_start = doc["window_start"].get<RowIndex>();
    c.min_cardinality = doc.value("min_cardinality", c.min_cardinality);
    c.max_cardinality = doc.value("max_cardinality", c.max_cardinality);
    c.activations_floor = doc.value("activations_floor", c.activations_floor);
    c.refresh_period_multiplier = doc.value("refresh_period_multiplier", c.refresh_period_multiplier);
    c.location_control = doc.value("location_control", c.location_control);
    if (doc.contains("refresh_mode")) c.refresh_mode = refresh_mode_from_string(doc["refresh_mode"].get<std::string>());
    c.sync_to_refresh = doc.value("sync_to_refresh", c.sync_to_refresh);
    c.stop_after_first_hit = doc.value("stop_after_first_hit", c.stop_after_first_hit);
    c.threads = doc.value("threads", c.threads);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed fuzz config: ") + e.what());
  }
  return c;
}

namespace {

/// k distinct values from [0, range), Floyd's algorithm, sorted.
std::vector<RowIndex> sample_distinct(Rng& rng, std::uint32_t range, std::uint32_t k) {
  std::set<RowIndex> chosen;
  for (std::uint32_t j = range - k; j < range; ++j) {
    const auto t = static_cast<RowIndex>(rng.below(std::uint64_t{j} + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace

HammerPattern generate_pattern(Rng& rng, const FuzzConfig& config, const DramGeometry& geometry) {
  const auto n = static_cast<std::uint32_t>(rng.between(config.min_cardinality, config.max_cardinality));
  HammerPattern p;
  p.bank = config.bank;
  if (config.location_control) {
    if (n > config.window_rows)
      throw ConfigError("fuzz: window of " + std::to_string(config.window_rows) + " rows cannot hold " +
                        std::to_string(n) + " aggressors");
    const auto start = config.resolved_window_start(geometry);
    if (std::uint64_t{start} + config.window_rows > geometry.rows_per_bank)
      throw ConfigError("fuzz: window extends past the bank");
    p.aggressors = sample_distinct(rng, config.window_rows, n);
    for (auto& r : p.aggressors) r += start;
  } else {
    if (n > geometry.rows_per_bank) throw ConfigError("fuzz: bank cannot hold the pattern");
    p.aggressors = sample_distinct(rng, geometry.rows_per_bank, n);
  }
  p.derivation = PatternKind::arbitrary;
  return p;
}

HammerPattern candidate_pattern(const FuzzConfig& config, const DramGeometry& geometry, std::uint64_t index) {
  Rng rng(Rng::derive(config.seed, index));
  return generate_pattern(rng, config, geometry);
}

Evaluation evaluate_pattern(const SimFactory& factory, const HammerPattern& pattern, const FuzzConfig& config) {
  auto sim = factory();
  HammerSchedule s;
  s.bank = pattern.bank;
  s.aggressors = pattern.aggressors;
  s.duration = DurationPolicy::cover_refresh_periods;
  s.refresh_periods = config.refresh_period_multiplier;
  s.activations_per_aggressor = config.activations_floor;
  s.sync_to_refresh = config.sync_to_refresh;
  hammer_with_refresh(*sim, s, config.refresh_mode);
  return {sim->read_flips(pattern.bank)};
}

nlohmann::json CampaignResult::to_json() const {
  auto ranked_doc = nlohmann::json::array();
  for (const auto& c : ranked) {
    auto entry = c.pattern.to_json();
    entry["candidate_index"] = c.index;
    entry["flips"] = c.flips;
    ranked_doc.push_back(std::move(entry));
  }
  nlohmann::json doc{{"evaluated", evaluated.size()},
                     {"bypassing_patterns", ranked.size()},
                     {"unique_flips", unique_flips},
                     {"ranked", std::move(ranked_doc)}};
  doc["best_pattern"] = best() ? nlohmann::json(classify_pattern(best()->pattern)) : nlohmann::json(nullptr);
  return doc;
}

std::string CampaignResult::to_csv() const {
  std::ostringstream out;
  out << "candidate_index,nomenclature,cardinality,flips\n";
  for (const auto& c : evaluated)
    out << c.index << ",\"" << classify_pattern(c.pattern) << "\"," << c.pattern.cardinality() << ',' << c.flips
        << '\n';
  return out.str();
}

CampaignResult fuzz_campaign(const SimFactory& factory, const FuzzConfig& config) {
  CampaignResult result;
  if (config.candidate_budget == 0) return result;
  DramGeometry geometry;
  {
    auto probe = factory();
    geometry = probe->geometry();
    config.validate(geometry, probe->timing());
  }

  const auto budget = config.candidate_budget;
  std::vector<std::optional<CandidateResult>> slots(budget);
  std::vector<std::vector<Flip>> flips(budget);
  std::atomic<std::uint64_t> next{0};
  std::atomic<std::uint64_t> first_hit{budget};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    try {
      while (true) {
        const auto i = next.fetch_add(1);
        if (i >= budget) break;
        if (config.stop_after_first_hit && i > first_hit.load()) break;
        auto pattern = candidate_pattern(config, geometry, i);
        auto eval = evaluate_pattern(factory, pattern, config);
        const auto count = eval.unique_flips();
        slots[i] = CandidateResult{i, std::move(pattern), count};
        flips[i] = std::move(eval.flips);
        if (count > 0) {
          auto cur = first_hit.load();
          while (i < cur && !first_hit.compare_exchange_weak(cur, i)) {
          }
        }
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      next.store(budget);
    }
  };

  const auto threads = std::min<std::uint64_t>(config.threads, budget);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  const auto last = config.stop_after_first_hit ? std::min(first_hit.load() + 1, budget) : budget;
  std::set<std::tuple<BankIndex, RowIndex, std::uint32_t>> seen;
  for (std::uint64_t i = 0; i < last; ++i) {
    result.evaluated.push_back(std::move(*slots[i]));
    for (const auto& f : flips[i]) seen.emplace(f.bank, f.row, f.bit);
  }
  result.unique_flips = seen.size();
  for (const auto& c : result.evaluated)
    if (c.flips > 0) result.ranked.push_back(c);
  std::sort(result.ranked.begin(), result.ranked.end(), [](const CandidateResult& a, const CandidateResult& b) {
    if (a.flips != b.flips) return a.flips > b.flips;
    if (a.pattern.cardinality() != b.pattern.cardinality()) return a.pattern.cardinality() < b.pattern.cardinality();
    return a.index < b.index;
  });
  return result;
}

}  // namespace trrsim
