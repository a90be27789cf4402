#include "trrsim/mitigation.hpp"

#include <algorithm>
#include <array>

#include "trrsim/error.hpp"
#include "trrsim/kernels.hpp"

namespace trrsim {

std::string to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::none: return "none";
    case SamplerKind::frequency: return "frequency";
    case SamplerKind::command_order: return "command_order";
    case SamplerKind::per_row_counter: return "per_row_counter";
  }
  return "none";
}

std::string to_string(ReplacementPolicy p) { return p == ReplacementPolicy::lru ? "lru" : "lowest_evidence"; }

std::string to_string(VictimChoice v) {
  switch (v) {
    case VictimChoice::least_recently_refreshed: return "least_recently_refreshed";
    case VictimChoice::highest_pressure: return "highest_pressure";
    case VictimChoice::lower: return "lower";
    case VictimChoice::upper: return "upper";
  }
  return "least_recently_refreshed";
}

namespace {

SamplerKind sampler_kind_from_string(const std::string& s) {
  for (auto k : {SamplerKind::none, SamplerKind::frequency, SamplerKind::command_order, SamplerKind::per_row_counter})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown sampler kind '" + s + "'");
}

ReplacementPolicy replacement_from_string(const std::string& s) {
  for (auto p : {ReplacementPolicy::lru, ReplacementPolicy::lowest_evidence})
    if (to_string(p) == s) return p;
  throw ConfigError("unknown replacement policy '" + s + "'");
}

VictimChoice victim_choice_from_string(const std::string& s) {
  for (auto v : {VictimChoice::least_recently_refreshed, VictimChoice::highest_pressure, VictimChoice::lower,
                 VictimChoice::upper})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown victim choice '" + s + "'");
}

bool all_distinct(std::span<const RowIndex> rows) {
  if (rows.size() <= 32) {
    for (std::size_t i = 1; i < rows.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (rows[i] == rows[j]) return false;
    return true;
  }
  std::vector<RowIndex> sorted(rows.begin(), rows.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

}  // namespace

void MitigationConfig::validate() const {
  if (sampler.kind != SamplerKind::none) {
    if (sampler.size < 1) throw ConfigError("mitigation: sampler size must be >= 1");
    if (sampler.kind == SamplerKind::command_order) {
      if (sampler.window < 1 || sampler.window > sampler.size)
        throw ConfigError("mitigation: command_order window must satisfy 1 <= window <= size");
      if (sampler.address_hash_bits > 31) throw ConfigError("mitigation: address_hash_bits must be <= 31");
    }
  }
  if (inhibitor.victims_per_refresh < 1 || inhibitor.victims_per_refresh > 2)
    throw ConfigError("mitigation: victims_per_refresh must be 1 or 2");
  if (inhibitor.cadence < 1) throw ConfigError("mitigation: cadence must be >= 1");
  if (inhibitor.targets_per_cadence < 1) throw ConfigError("mitigation: targets_per_cadence must be >= 1");
  if (para && !(para->probability >= 0.0 && para->probability <= 1.0))
    throw ConfigError("mitigation: PARA probability must lie in [0, 1]");
  if (ptrr && ptrr->limit < 1) throw ConfigError("mitigation: pTRR limit must be >= 1");
}

nlohmann::json MitigationConfig::to_json() const {
  nlohmann::json doc;
  doc["sampler"] = {{"kind", to_string(sampler.kind)},
                    {"size", sampler.size},
                    {"replacement", to_string(sampler.replacement)},
                    {"window", sampler.window},
                    {"address_hash_bits", sampler.address_hash_bits},
                    {"counter_threshold", sampler.counter_threshold}};
  doc["inhibitor"] = {{"victims_per_refresh", inhibitor.victims_per_refresh},
                      {"cadence", inhibitor.cadence},
                      {"discard_on_refresh", inhibitor.discard_on_refresh},
                      {"targets_per_cadence", inhibitor.targets_per_cadence},
                      {"victim_choice", to_string(inhibitor.victim_choice)}};
  doc["para"] = para ? nlohmann::json{{"probability", para->probability}, {"seed", para->seed}} : nlohmann::json();
  doc["ptrr"] = ptrr ? nlohmann::json{{"limit", ptrr->limit}} : nlohmann::json();
  return doc;
}

MitigationConfig MitigationConfig::from_json(const nlohmann::json& doc) {
  MitigationConfig c;
  try {
    if (doc.contains("sampler")) {
      const auto& s = doc.at("sampler");
      c.sampler.kind = sampler_kind_from_string(s.value("kind", std::string("none")));
      c.sampler.size = s.value("size", c.sampler.size);
      c.sampler.replacement = replacement_from_string(s.value("replacement", std::string("lru")));
      c.sampler.window = s.value("window", c.sampler.window);
      c.sampler.address_hash_bits = s.value("address_hash_bits", c.sampler.address_hash_bits);
      c.sampler.counter_threshold = s.value("counter_threshold", c.sampler.counter_threshold);
    }
    if (doc.contains("inhibitor")) {
      const auto& i = doc.at("inhibitor");
      c.inhibitor.victims_per_refresh = i.value("victims_per_refresh", c.inhibitor.victims_per_refresh);
      c.inhibitor.cadence = i.value("cadence", c.inhibitor.cadence);
      c.inhibitor.discard_on_refresh = i.value("discard_on_refresh", c.inhibitor.discard_on_refresh);
      c.inhibitor.targets_per_cadence = i.value("targets_per_cadence", c.inhibitor.targets_per_cadence);
      c.inhibitor.victim_choice =
          victim_choice_from_string(i.value("victim_choice", std::string("highest_pressure")));
    }
    if (doc.contains("para") && !doc.at("para").is_null()) {
      ParaConfig p;
      p.probability = doc.at("para").value("probability", p.probability);
      p.seed = doc.at("para").value("seed", p.seed);
      c.para = p;
    }
    if (doc.contains("ptrr") && !doc.at("ptrr").is_null()) c.ptrr = PtrrConfig{doc.at("ptrr").at("limit").get<std::uint32_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("mitigation config: ") + e.what());
  }
  c.validate();
  return c;
}

MitigationConfig frequency_config(std::uint32_t s) {
  MitigationConfig c;
  c.sampler.kind = SamplerKind::frequency;
  c.sampler.size = s;
  c.inhibitor = InhibitorConfig{};
  return c;
}

std::span<const std::string> preset_names() {
  static const std::array<std::string, 6> names{"case_one", "case_two", "modern", "para", "none", "perfect"};
  return names;
}

MitigationConfig make_preset(const std::string& name) {
  MitigationConfig c;
  if (name == "case_one") return frequency_config(4);
  if (name == "case_two") {
    c.sampler = {SamplerKind::command_order, 6, ReplacementPolicy::lru, 6, 4, 1};
    return c;
  }
  if (name == "modern") {
    c = frequency_config(8);
    c.inhibitor.cadence = 4;
    c.inhibitor.targets_per_cadence = 4;
    c.inhibitor.victims_per_refresh = 2;
    return c;
  }
  if (name == "para") {
    c.para = ParaConfig{};
    return c;
  }
  if (name == "perfect") {
    c = frequency_config(28);
    c.inhibitor.victims_per_refresh = 2;
    c.inhibitor.targets_per_cadence = 56;
    c.inhibitor.discard_on_refresh = false;
    return c;
  }
  if (name == "none") return c;
  throw ConfigError("unknown mitigation preset '" + name + "'");
}

Sampler::Sampler(const SamplerConfig& config) : config_(config) {
  rows_.reserve(config.size);
  evidence_.reserve(config.size);
  inserted_.reserve(config.size);
  last_use_.reserve(config.size);
}

std::vector<SamplerEntry> Sampler::entries() const {
  std::vector<SamplerEntry> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(entry(i));
  return out;
}

bool Sampler::in_window(RowIndex row) {
  if (std::find(window_rows_.begin(), window_rows_.end(), row) != window_rows_.end()) return true;
  if (window_rows_.size() >= config_.window) return false;
  window_rows_.push_back(row);
  return true;
}

std::size_t Sampler::victim_slot() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    if (config_.replacement == ReplacementPolicy::lru || config_.kind == SamplerKind::command_order) {
      if (last_use_[i] < last_use_[best]) best = i;
    } else if (evidence_[i] < evidence_[best] ||
               (evidence_[i] == evidence_[best] && last_use_[i] < last_use_[best])) {
      best = i;
    }
  }
  return best;
}

void Sampler::insert(RowIndex row, std::uint32_t evidence) {
  if (rows_.size() < config_.size) {
    rows_.push_back(row);
    evidence_.push_back(evidence);
    inserted_.push_back(clock_);
    last_use_.push_back(clock_);
    return;
  }
  const auto i = victim_slot();
  rows_[i] = row;
  evidence_[i] = evidence;
  inserted_[i] = clock_;
  last_use_[i] = clock_;
}

void Sampler::touch(RowIndex row) {
  const auto hit = kernels::find_u32(rows_, row);
  if (hit >= 0) {
    ++evidence_[hit];
    last_use_[hit] = clock_;
    return;
  }
  if (config_.kind == SamplerKind::command_order && config_.address_hash_bits > 0) {
    const std::uint32_t mask = (1u << config_.address_hash_bits) - 1;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      if ((rows_[i] & mask) == (row & mask)) {
        rows_[i] = row;
        evidence_[i] = 1;
        inserted_[i] = clock_;
        last_use_[i] = clock_;
        return;
      }
    }
  }
  if (config_.kind == SamplerKind::per_row_counter && rows_.size() >= config_.size) {
    // space-saving: the newcomer inherits the evicted count
    const auto i = victim_slot();
    const auto carried = evidence_[i] + 1;
    rows_[i] = row;
    evidence_[i] = carried;
    inserted_[i] = clock_;
    last_use_[i] = clock_;
    return;
  }
  insert(row, 1);
}

void Sampler::on_activate(RowIndex row) {
  if (config_.kind == SamplerKind::none) return;
  ++clock_;
  if (config_.kind == SamplerKind::command_order && !in_window(row)) return;
  touch(row);
}

void Sampler::on_activate_run(std::span<const RowIndex> rows, std::size_t start, std::uint64_t count) {
  if (config_.kind == SamplerKind::none || rows.empty() || count == 0) {
    clock_ += config_.kind == SamplerKind::none ? 0 : count;
    return;
  }
  const std::size_t n = rows.size();
  // after one pass over the pattern, every ACT hits (n <= s) or misses (n > s)
  const std::uint64_t warmup = n;
  const bool closed_form = config_.kind == SamplerKind::frequency && config_.replacement == ReplacementPolicy::lru &&
                           count > warmup && (n <= config_.size || count - warmup >= config_.size) &&
                           all_distinct(rows);
  const std::uint64_t direct = closed_form ? warmup : count;
  for (std::uint64_t k = 0; k < direct; ++k) on_activate(rows[(start + k) % n]);
  if (!closed_form) return;

  const std::uint64_t remaining = count - warmup;
  const std::size_t offset = (start + warmup) % n;
  const std::uint64_t c0 = clock_;
  if (n <= config_.size) {
    // every pattern row is resident, so each ACT is a hit
    for (std::size_t d = 0; d < n && d < remaining; ++d) {
      const RowIndex row = rows[(offset + d) % n];
      const std::uint64_t hits = (remaining - d + n - 1) / n;
      const auto i = kernels::find_u32(rows_, row);
      evidence_[i] += static_cast<std::uint32_t>(hits);
      last_use_[i] = c0 + d + (hits - 1) * n + 1;
    }
  } else {
    // LRU thrash: every ACT misses, the table holds the last s rows once each
    rows_.clear();
    evidence_.clear();
    inserted_.clear();
    last_use_.clear();
    const std::uint64_t s = config_.size;
    for (std::uint64_t j = remaining - std::min(remaining, s); j < remaining; ++j) {
      rows_.push_back(rows[(offset + j) % n]);
      evidence_.push_back(1);
      inserted_.push_back(c0 + j + 1);
      last_use_.push_back(c0 + j + 1);
    }
  }
  clock_ = c0 + remaining;
}

void Sampler::on_refresh() { window_rows_.clear(); }

std::uint32_t Sampler::service_floor() const {
  return std::max<std::uint32_t>(1, config_.kind == SamplerKind::per_row_counter ? config_.counter_threshold : 1);
}

std::optional<std::size_t> Sampler::best_entry(std::span<const std::size_t> skip) const {
  const std::uint32_t floor = service_floor();
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (evidence_[i] < floor) continue;
    if (std::find(skip.begin(), skip.end(), i) != skip.end()) continue;
    if (!best || evidence_[i] > evidence_[*best] || (evidence_[i] == evidence_[*best] && rows_[i] < rows_[*best]))
      best = i;
  }
  return best;
}

void Sampler::erase(std::size_t i) {
  rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
  evidence_.erase(evidence_.begin() + static_cast<std::ptrdiff_t>(i));
  inserted_.erase(inserted_.begin() + static_cast<std::ptrdiff_t>(i));
  last_use_.erase(last_use_.begin() + static_cast<std::ptrdiff_t>(i));
}

Mitigation::Mitigation(const MitigationConfig& config, const DramGeometry& geometry)
    : config_(config), geometry_(geometry) {
  config_.validate();
  if (config_.sampler.kind != SamplerKind::none) samplers_.assign(geometry.banks, Sampler(config_.sampler));
  if (config_.para) para_rng_.emplace(config_.para->seed);
  if (config_.ptrr) ptrr_counts_.assign(geometry.total_rows(), 0);
}

void Mitigation::push_neighbors(BankIndex bank, RowIndex row, std::vector<TargetedRow>& out) {
  if (row > 0) out.push_back({bank, row - 1});
  if (row + 1 < geometry_.rows_per_bank) out.push_back({bank, row + 1});
}

void Mitigation::on_activate(BankIndex bank, RowIndex row, std::vector<TargetedRow>& out) {
  if (!samplers_.empty()) samplers_[bank].on_activate(row);
  if (para_rng_ && para_rng_->bernoulli(config_.para->probability)) {
    const auto before = out.size();
    push_neighbors(bank, row, out);
    stats_.para_refreshes += out.size() - before;
  }
  if (config_.ptrr) {
    auto& c = ptrr_counts_[std::size_t{bank} * geometry_.rows_per_bank + row];
    if (++c >= config_.ptrr->limit) {
      c = 0;
      const auto before = out.size();
      push_neighbors(bank, row, out);
      stats_.ptrr_refreshes += out.size() - before;
    }
  }
}

void Mitigation::on_activate_run(BankIndex bank, std::span<const RowIndex> rows, std::size_t start,
                                 std::uint64_t count) {
  if (!supports_bulk()) throw ConfigError("mitigation: bulk activation needs a mitigation without per-ACT refresh");
  if (!samplers_.empty()) samplers_[bank].on_activate_run(rows, start, count);
}

void Mitigation::service_bank(BankIndex bank, const DramView& dram, std::uint32_t& budget,
                              std::vector<TargetedRow>& out) {
  auto& sampler = samplers_[bank];
  serviced_.clear();
  const auto rows = dram.rows_per_bank();
  // evidence is fixed while servicing, so one ordering serves the whole loop
  order_.clear();
  const std::uint32_t floor = sampler.service_floor();
  for (std::size_t i = 0; i < sampler.size(); ++i)
    if (sampler.entry(i).evidence >= floor) order_.push_back(i);
  std::sort(order_.begin(), order_.end(), [&](std::size_t x, std::size_t y) {
    const auto& ex = sampler.entry(x);
    const auto& ey = sampler.entry(y);
    if (ex.evidence != ey.evidence) return ex.evidence > ey.evidence;
    return ex.row < ey.row;
  });
  for (const auto best : order_) {
    if (budget == 0) break;
    serviced_.push_back(best);
    const RowIndex a = sampler.entry(best).row;
    const bool has_lower = a > 0;
    const bool has_upper = a + 1 < rows;
    if (config_.inhibitor.victims_per_refresh >= 2 && budget >= 2) {
      const auto before = out.size();
      push_neighbors(bank, a, out);
      budget -= static_cast<std::uint32_t>(std::min<std::size_t>(budget, out.size() - before));
    } else if (has_lower || has_upper) {
      RowIndex victim = a - 1;
      if (!has_lower) {
        victim = a + 1;
      } else if (!has_upper) {
        victim = a - 1;
      } else {
        switch (config_.inhibitor.victim_choice) {
          case VictimChoice::least_recently_refreshed:
            victim = dram.last_refresh(bank, a + 1) < dram.last_refresh(bank, a - 1) ? a + 1 : a - 1;
            break;
          case VictimChoice::highest_pressure: {
            const auto lo = dram.pressure(bank, a - 1);
            const auto up = dram.pressure(bank, a + 1);
            if (lo != up)
              victim = up > lo ? a + 1 : a - 1;
            else
              victim = dram.last_refresh(bank, a + 1) < dram.last_refresh(bank, a - 1) ? a + 1 : a - 1;
            break;
          }
          case VictimChoice::lower: victim = a - 1; break;
          case VictimChoice::upper: victim = a + 1; break;
        }
      }
      out.push_back({bank, victim});
      --budget;
    }
  }
  if (config_.inhibitor.discard_on_refresh) {
    std::sort(serviced_.begin(), serviced_.end(), std::greater<>());
    for (auto i : serviced_) sampler.erase(i);
  } else {
    for (auto i : serviced_) sampler.reset_evidence(i);
  }
}

void Mitigation::on_refresh(std::uint64_t ref_counter, const DramView& dram, std::vector<TargetedRow>& out) {
  if (samplers_.empty()) return;
  const bool service = ref_counter % config_.inhibitor.cadence == 0;
  if (service) ++stats_.inhibitor_calls;
  const auto before = out.size();
  for (BankIndex b = 0; b < samplers_.size(); ++b) {
    if (service && samplers_[b].size() > 0) {
      std::uint32_t budget = config_.inhibitor.targets_per_cadence;
      service_bank(b, dram, budget, out);
    }
    samplers_[b].on_refresh();
  }
  stats_.targeted_refreshes += out.size() - before;
}

void Mitigation::on_row_refreshed(BankIndex bank, RowIndex row) {
  if (config_.ptrr) ptrr_counts_[std::size_t{bank} * geometry_.rows_per_bank + row] = 0;
}

std::optional<MitigationConfig> ptrr_mitigation(const PtrrMode& mode) {
  if (const auto* t = std::get_if<PtrrTargeted>(&mode)) {
    MitigationConfig c;
    c.ptrr = PtrrConfig{t->limit};
    return c;
  }
  return std::nullopt;
}

}  // namespace trrsim
