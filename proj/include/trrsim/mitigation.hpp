#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "trrsim/geometry.hpp"
#include "trrsim/mac_field.hpp"
#include "trrsim/rng.hpp"

namespace trrsim {

enum class SamplerKind : std::uint8_t { none, frequency, command_order, per_row_counter };
enum class ReplacementPolicy : std::uint8_t { lru, lowest_evidence };

/// Which neighbor of a serviced aggressor gets refreshed when only one is.
/// highest_pressure breaks ties toward the less recently refreshed row,
/// least_recently_refreshed breaks ties toward the lower row.
enum class VictimChoice : std::uint8_t { highest_pressure, least_recently_refreshed, lower, upper };

std::string to_string(SamplerKind k);
std::string to_string(ReplacementPolicy p);
std::string to_string(VictimChoice v);

struct SamplerConfig {
  SamplerKind kind = SamplerKind::none;
  /// Table capacity s (table_size for per_row_counter).
  std::uint32_t size = 0;
  ReplacementPolicy replacement = ReplacementPolicy::lru;
  /// command_order: distinct rows recorded after each REF.
  std::uint32_t window = 0;
  /// command_order: table slot = row mod 2^bits; 0 disables address dependence.
  std::uint32_t address_hash_bits = 0;
  /// per_row_counter: minimum count before an entry is serviced.
  std::uint32_t counter_threshold = 1;

  friend bool operator==(const SamplerConfig&, const SamplerConfig&) = default;
};

struct InhibitorConfig {
  std::uint32_t victims_per_refresh = 1;
  std::uint32_t cadence = 1;
  bool discard_on_refresh = true;
  /// Victim rows refreshed per servicing REF.
  std::uint32_t targets_per_cadence = 1;
  VictimChoice victim_choice = VictimChoice::highest_pressure;

  friend bool operator==(const InhibitorConfig&, const InhibitorConfig&) = default;
};

struct ParaConfig {
  double probability = 0.001;
  std::uint64_t seed = 1;

  friend bool operator==(const ParaConfig&, const ParaConfig&) = default;
};

struct PtrrConfig {
  /// Controller-side activation count that triggers a neighbor refresh.
  std::uint32_t limit = 0;

  friend bool operator==(const PtrrConfig&, const PtrrConfig&) = default;
};

struct MitigationConfig {
  SamplerConfig sampler;
  InhibitorConfig inhibitor;
  std::optional<ParaConfig> para;
  std::optional<PtrrConfig> ptrr;

  bool is_none() const { return sampler.kind == SamplerKind::none && !para && !ptrr; }

  void validate() const;

  nlohmann::json to_json() const;
  static MitigationConfig from_json(const nlohmann::json& doc);

  friend bool operator==(const MitigationConfig&, const MitigationConfig&) = default;
};

/// Named configurations: case_one, case_two, modern, para, none, and
/// perfect (tracks up to the cardinality cap and refreshes every victim).
MitigationConfig make_preset(const std::string& name);

/// Names accepted by make_preset.
std::span<const std::string> preset_names();

/// Frequency sampler of size s with cadence 1, discard-on-refresh and one
/// victim per REF.
MitigationConfig frequency_config(std::uint32_t s);

struct SamplerEntry {
  RowIndex row = 0;
  std::uint32_t evidence = 0;
  /// Sampler clock value at insertion.
  std::uint64_t inserted = 0;
  /// Sampler clock value at the most recent hit.
  std::uint64_t last_use = 0;

  friend bool operator==(const SamplerEntry&, const SamplerEntry&) = default;
};

/// Per-bank aggressor tracker.
class Sampler {
 public:
  explicit Sampler(const SamplerConfig& config);

  void on_activate(RowIndex row);

  /// Equivalent to calling on_activate for rows[(start + k) % rows.size()],
  /// k = 0 .. count-1.
  void on_activate_run(std::span<const RowIndex> rows, std::size_t start, std::uint64_t count);

  /// Closes the current post-REF window.
  void on_refresh();

  std::size_t size() const { return rows_.size(); }
  SamplerEntry entry(std::size_t i) const {
    return {rows_[i], evidence_[i], inserted_[i], last_use_[i]};
  }
  std::vector<SamplerEntry> entries() const;
  std::uint64_t clock() const { return clock_; }

  /// Minimum evidence an entry needs before it can be serviced.
  std::uint32_t service_floor() const;

  /// Entry to service next: highest evidence, ties to the lower row.
  /// Entries listed in `skip` or below the counter threshold are ignored.
  std::optional<std::size_t> best_entry(std::span<const std::size_t> skip) const;

  void erase(std::size_t i);
  void reset_evidence(std::size_t i) { evidence_[i] = 0; }

 private:
  void touch(RowIndex row);
  void insert(RowIndex row, std::uint32_t evidence);
  std::size_t victim_slot() const;
  bool in_window(RowIndex row);

  SamplerConfig config_;
  std::uint64_t clock_ = 0;
  // structure of arrays so lookups scan a dense row array
  std::vector<std::uint32_t> rows_;
  std::vector<std::uint32_t> evidence_;
  std::vector<std::uint64_t> inserted_;
  std::vector<std::uint64_t> last_use_;
  std::vector<std::uint32_t> window_rows_;
};

struct TargetedRow {
  BankIndex bank = 0;
  RowIndex row = 0;
  friend bool operator==(const TargetedRow&, const TargetedRow&) = default;
};

/// Read-only view of DRAM state the inhibitor may consult.
class DramView {
 public:
  virtual ~DramView() = default;
  virtual std::uint32_t rows_per_bank() const = 0;
  /// REF count at the row's latest refresh, -1 if never refreshed.
  virtual std::int64_t last_refresh(BankIndex bank, RowIndex row) const = 0;
  virtual std::uint32_t pressure(BankIndex bank, RowIndex row) const = 0;
};

/// Counters exposed for tests and reports.
struct MitigationStats {
  std::uint64_t inhibitor_calls = 0;
  std::uint64_t targeted_refreshes = 0;
  std::uint64_t para_refreshes = 0;
  std::uint64_t ptrr_refreshes = 0;
};

/// Sampler + inhibitor + optional PARA and controller-side pTRR.
class Mitigation {
 public:
  Mitigation(const MitigationConfig& config, const DramGeometry& geometry);

  const MitigationConfig& config() const { return config_; }

  /// True when ACT runs may be fed in bulk (no per-ACT refresh decisions).
  bool supports_bulk() const { return !config_.para && !config_.ptrr; }

  /// Called for every ACT. Appends rows to refresh immediately.
  void on_activate(BankIndex bank, RowIndex row, std::vector<TargetedRow>& out);

  /// Bulk form of on_activate; requires supports_bulk().
  void on_activate_run(BankIndex bank, std::span<const RowIndex> rows, std::size_t start, std::uint64_t count);

  /// Called for every REF with the 1-based REF count. Appends victims.
  void on_refresh(std::uint64_t ref_counter, const DramView& dram, std::vector<TargetedRow>& out);

  /// Called whenever the DRAM refreshes a row for any reason.
  void on_row_refreshed(BankIndex bank, RowIndex row);

  const Sampler* sampler(BankIndex bank) const {
    return samplers_.empty() ? nullptr : &samplers_[bank];
  }
  const MitigationStats& stats() const { return stats_; }

 private:
  void service_bank(BankIndex bank, const DramView& dram, std::uint32_t& budget, std::vector<TargetedRow>& out);
  void push_neighbors(BankIndex bank, RowIndex row, std::vector<TargetedRow>& out);

  MitigationConfig config_;
  DramGeometry geometry_;
  std::vector<Sampler> samplers_;
  std::optional<Rng> para_rng_;
  std::vector<std::uint32_t> ptrr_counts_;
  MitigationStats stats_;
  std::vector<std::size_t> serviced_;
  std::vector<std::size_t> order_;
};

/// Mitigation implementing the controller's reaction to a MAC field.
/// Returns nullopt for no_action and double_refresh (the latter is a refresh
/// mode, not a mitigation).
std::optional<MitigationConfig> ptrr_mitigation(const PtrrMode& mode);

}  // namespace trrsim
