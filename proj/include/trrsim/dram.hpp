#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trrsim/command.hpp"
#include "trrsim/geometry.hpp"
#include "trrsim/mitigation.hpp"
#include "trrsim/vulnerability.hpp"

namespace trrsim {

/// strict: ACT to an open bank and REF with open banks are protocol errors.
/// lenient: both auto-precharge.
enum class PagePolicy : std::uint8_t { strict, lenient };

struct Event {
  std::int64_t time_ns = 0;
  Command command;
};

struct Flip {
  BankIndex bank = 0;
  RowIndex row = 0;
  std::uint32_t bit = 0;
  FlipDirection direction = FlipDirection::one_to_zero;

  friend bool operator==(const Flip&, const Flip&) = default;
  friend auto operator<=>(const Flip&, const Flip&) = default;
};

struct SimStats {
  std::uint64_t activations = 0;
  std::uint64_t precharges = 0;
  std::uint64_t refreshes = 0;
  std::uint64_t idles = 0;
  /// Rows refreshed by the periodic REF chunks.
  std::uint64_t periodic_row_refreshes = 0;
  /// Rows refreshed on behalf of the mitigation.
  std::uint64_t targeted_row_refreshes = 0;
};

/// Discrete-event model of the banks of one rank.
///
/// Each row carries a hammer counter, the number of neighbor ACTs since the
/// row was last refreshed. A weak cell flips once its row's counter reaches
/// the cell's threshold. Counters only grow between refreshes, so flip checks
/// run lazily, right before a counter is reset and when flips are read.
class DramSimulator final : private DramView {
 public:
  DramSimulator(const DramGeometry& geometry, const TimingParams& timing,
                std::shared_ptr<const VulnerabilityProfile> profile,
                const MitigationConfig& mitigation = {}, PagePolicy policy = PagePolicy::lenient);

  DramSimulator(const DramSimulator&) = delete;
  DramSimulator& operator=(const DramSimulator&) = delete;

  /// Executes one command and advances time by its cost.
  Event issue(const Command& cmd);

  /// Issues `count` ACT+PRE pairs to rows[(start + k) % rows.size()] of one
  /// bank. Produces the same state as the per-command path, in time
  /// proportional to the number of rows when the mitigation allows it.
  void activate_run(BankIndex bank, std::span<const RowIndex> rows, std::size_t start, std::uint64_t count);

  /// Latched flips of one bank, ordered by (row, bit).
  std::vector<Flip> read_flips(BankIndex bank);
  /// Latched flips of all banks, ordered by (bank, row, bit).
  std::vector<Flip> read_all_flips();
  /// Models rewriting the victim rows: forgets every latched flip.
  void clear_flips();

  std::uint32_t hammer_counter(BankIndex bank, RowIndex row) const { return counters_[slot(bank, row)]; }
  /// REF number (1-based) at the row's latest refresh, -1 if never refreshed.
  std::int64_t last_refresh_slot(BankIndex bank, RowIndex row) const { return last_refresh_[slot(bank, row)]; }
  std::optional<RowIndex> open_row(BankIndex bank) const;

  std::int64_t now_ns() const { return now_ns_; }
  std::uint64_t ref_count() const { return ref_count_; }
  const SimStats& stats() const { return stats_; }
  const DramGeometry& geometry() const { return geometry_; }
  const TimingParams& timing() const { return timing_; }
  const VulnerabilityProfile& profile() const { return *profile_; }
  const Mitigation& mitigation() const { return mitigation_; }
  PagePolicy policy() const { return policy_; }

  /// Streams every executed command as CSV (time_ns,command,bank,row).
  /// Pass nullptr to stop. The stream must outlive the simulator's use of it.
  void set_event_log(std::ostream* out);

 private:
  static constexpr std::uint32_t kClosed = 0xffffffffu;

  std::size_t slot(BankIndex bank, RowIndex row) const { return std::size_t{bank} * geometry_.rows_per_bank + row; }
  void check_bank(BankIndex bank) const;
  void check_row(BankIndex bank, RowIndex row) const;
  void activate(BankIndex bank, RowIndex row);
  void refresh(std::int64_t start_ns);
  void refresh_row(BankIndex bank, RowIndex row);
  void latch_row(std::size_t row_slot);
  void log(const Event& e);

  std::uint32_t rows_per_bank() const override { return geometry_.rows_per_bank; }
  std::int64_t last_refresh(BankIndex bank, RowIndex row) const override { return last_refresh_slot(bank, row); }
  std::uint32_t pressure(BankIndex bank, RowIndex row) const override { return hammer_counter(bank, row); }

  DramGeometry geometry_;
  TimingParams timing_;
  std::shared_ptr<const VulnerabilityProfile> profile_;
  Mitigation mitigation_;
  PagePolicy policy_;
  std::int64_t slots_;

  std::vector<std::uint32_t> counters_;
  std::vector<std::int64_t> last_refresh_;
  std::vector<std::uint32_t> open_rows_;
  std::vector<std::uint8_t> flipped_;
  std::vector<std::uint32_t> flip_order_;
  std::vector<TargetedRow> targets_;
  std::vector<std::uint32_t> scratch_;

  std::int64_t now_ns_ = 0;
  std::uint64_t ref_count_ = 0;
  SimStats stats_;
  std::ostream* event_log_ = nullptr;
};

/// Writes the event-log CSV header.
void write_event_log_header(std::ostream& out);

}  // namespace trrsim
