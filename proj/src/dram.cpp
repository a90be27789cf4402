#include "trrsim/dram.hpp"

#include <algorithm>
#include <ostream>

#include "trrsim/error.hpp"
#include "trrsim/kernels.hpp"

namespace trrsim {

DramSimulator::DramSimulator(const DramGeometry& geometry, const TimingParams& timing,
                             std::shared_ptr<const VulnerabilityProfile> profile, const MitigationConfig& mitigation,
                             PagePolicy policy)
    : geometry_(geometry),
      timing_(timing),
      profile_(std::move(profile)),
      mitigation_(mitigation, geometry),
      policy_(policy) {
  geometry_.validate();
  timing_.validate();
  if (!profile_) throw ConfigError("simulator: a vulnerability profile is required");
  if (!(profile_->geometry() == geometry_)) throw ConfigError("simulator: profile geometry does not match");
  slots_ = timing_.slot_count();
  counters_.assign(geometry_.total_rows(), 0);
  last_refresh_.assign(geometry_.total_rows(), -1);
  open_rows_.assign(geometry_.banks, kClosed);
  flipped_.assign(profile_->total_cells(), 0);
}

void DramSimulator::check_bank(BankIndex bank) const {
  if (bank >= geometry_.banks)
    throw IndexError("bank " + std::to_string(bank) + " out of range (" + std::to_string(geometry_.banks) + ")");
}

void DramSimulator::check_row(BankIndex bank, RowIndex row) const {
  check_bank(bank);
  if (row >= geometry_.rows_per_bank)
    throw IndexError("row " + std::to_string(row) + " out of range (" + std::to_string(geometry_.rows_per_bank) +
                     ")");
}

std::optional<RowIndex> DramSimulator::open_row(BankIndex bank) const {
  check_bank(bank);
  if (open_rows_[bank] == kClosed) return std::nullopt;
  return open_rows_[bank];
}

void DramSimulator::set_event_log(std::ostream* out) { event_log_ = out; }

void write_event_log_header(std::ostream& out) { out << "time_ns,command,bank,row\n"; }

void DramSimulator::log(const Event& e) {
  if (!event_log_) return;
  *event_log_ << e.time_ns << ',' << to_string(e.command.kind) << ',';
  switch (e.command.kind) {
    case CommandKind::act: *event_log_ << e.command.bank << ',' << e.command.row; break;
    case CommandKind::pre: *event_log_ << e.command.bank << ','; break;
    case CommandKind::ref: *event_log_ << ','; break;
    case CommandKind::idle: *event_log_ << ','; break;
  }
  *event_log_ << '\n';
}

void DramSimulator::latch_row(std::size_t row_slot) {
  const auto bank = static_cast<BankIndex>(row_slot / geometry_.rows_per_bank);
  const auto row = static_cast<RowIndex>(row_slot % geometry_.rows_per_bank);
  const auto pressure = counters_[row_slot];
  if (pressure < profile_->min_threshold(bank, row)) return;
  const auto first = profile_->first_cell(bank, row);
  const auto cells = profile_->cells(bank, row);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].threshold <= pressure && !flipped_[first + i]) {
      flipped_[first + i] = 1;
      flip_order_.push_back(static_cast<std::uint32_t>(first + i));
    }
  }
}

void DramSimulator::refresh_row(BankIndex bank, RowIndex row) {
  const auto s = slot(bank, row);
  if (counters_[s] != 0) latch_row(s);
  counters_[s] = 0;
  last_refresh_[s] = static_cast<std::int64_t>(ref_count_);
  mitigation_.on_row_refreshed(bank, row);
}

void DramSimulator::activate(BankIndex bank, RowIndex row) {
  const auto s = slot(bank, row);
  if (row > 0) ++counters_[s - 1];
  if (row + 1 < geometry_.rows_per_bank) ++counters_[s + 1];
  ++stats_.activations;
  targets_.clear();
  mitigation_.on_activate(bank, row, targets_);
  for (const auto& t : targets_) refresh_row(t.bank, t.row);
  stats_.targeted_row_refreshes += targets_.size();
}

void DramSimulator::refresh(std::int64_t) {
  ++ref_count_;
  ++stats_.refreshes;
  const auto chunk = static_cast<std::int64_t>((ref_count_ - 1) % static_cast<std::uint64_t>(slots_));
  const std::int64_t rows = geometry_.rows_per_bank;
  const auto begin = static_cast<RowIndex>(chunk * rows / slots_);
  const auto end = static_cast<RowIndex>((chunk + 1) * rows / slots_);
  for (BankIndex b = 0; b < geometry_.banks; ++b)
    for (RowIndex r = begin; r < end; ++r) refresh_row(b, r);
  stats_.periodic_row_refreshes += std::uint64_t{end - begin} * geometry_.banks;
  targets_.clear();
  mitigation_.on_refresh(ref_count_, *this, targets_);
  for (const auto& t : targets_) refresh_row(t.bank, t.row);
  stats_.targeted_row_refreshes += targets_.size();
}

Event DramSimulator::issue(const Command& cmd) {
  const Event e{now_ns_, cmd};
  switch (cmd.kind) {
    case CommandKind::act:
      check_row(cmd.bank, cmd.row);
      if (open_rows_[cmd.bank] != kClosed && policy_ == PagePolicy::strict)
        throw ProtocolError("ACT to bank " + std::to_string(cmd.bank) + " while row " +
                            std::to_string(open_rows_[cmd.bank]) + " is open");
      activate(cmd.bank, cmd.row);
      open_rows_[cmd.bank] = cmd.row;
      now_ns_ += timing_.t_rc_ns;
      break;
    case CommandKind::pre:
      check_bank(cmd.bank);
      open_rows_[cmd.bank] = kClosed;
      ++stats_.precharges;
      break;
    case CommandKind::ref:
      if (policy_ == PagePolicy::strict) {
        for (BankIndex b = 0; b < geometry_.banks; ++b)
          if (open_rows_[b] != kClosed) throw ProtocolError("REF while bank " + std::to_string(b) + " is open");
      }
      std::fill(open_rows_.begin(), open_rows_.end(), kClosed);
      refresh(now_ns_);
      now_ns_ += timing_.t_rfc_ns;
      break;
    case CommandKind::idle:
      if (cmd.duration_ns < 0) throw ConfigError("IDLE duration must be >= 0");
      ++stats_.idles;
      now_ns_ += cmd.duration_ns;
      break;
  }
  log(e);
  return e;
}

void DramSimulator::activate_run(BankIndex bank, std::span<const RowIndex> rows, std::size_t start,
                                 std::uint64_t count) {
  check_bank(bank);
  for (auto r : rows)
    if (r >= geometry_.rows_per_bank) check_row(bank, r);
  if (count == 0) return;
  if (rows.empty()) throw ConfigError("activate_run: empty row list");
  if (open_rows_[bank] != kClosed) {
    if (policy_ == PagePolicy::strict)
      throw ProtocolError("ACT to bank " + std::to_string(bank) + " while row " +
                          std::to_string(open_rows_[bank]) + " is open");
    open_rows_[bank] = kClosed;
  }
  const std::size_t n = rows.size();
  if (!mitigation_.supports_bulk() || event_log_) {
    for (std::uint64_t k = 0; k < count; ++k) {
      const RowIndex row = rows[(start + k) % n];
      log({now_ns_, Command::act(bank, row)});
      activate(bank, row);
      now_ns_ += timing_.t_rc_ns;
      log({now_ns_, Command::pre(bank)});
      ++stats_.precharges;
    }
    return;
  }
  for (std::size_t d = 0; d < n && d < count; ++d) {
    const RowIndex row = rows[(start + d) % n];
    const auto hits = static_cast<std::uint32_t>((count - d + n - 1) / n);
    const auto s = slot(bank, row);
    if (row > 0) counters_[s - 1] += hits;
    if (row + 1 < geometry_.rows_per_bank) counters_[s + 1] += hits;
  }
  mitigation_.on_activate_run(bank, rows, start % n, count);
  stats_.activations += count;
  stats_.precharges += count;
  now_ns_ += static_cast<std::int64_t>(count) * timing_.t_rc_ns;
}

std::vector<Flip> DramSimulator::read_flips(BankIndex bank) {
  check_bank(bank);
  const auto begin = slot(bank, 0);
  scratch_.clear();
  kernels::indices_at_or_above(std::span<const std::uint32_t>(counters_).subspan(begin, geometry_.rows_per_bank),
                               profile_->bank_min_thresholds(bank), scratch_);
  for (auto r : scratch_) latch_row(begin + r);

  const auto first = profile_->first_cell(bank, 0);
  const auto last = bank + 1 < geometry_.banks ? profile_->first_cell(bank + 1, 0) : profile_->total_cells();
  std::vector<Flip> out;
  for (auto idx : flip_order_) {
    if (idx < first || idx >= last) continue;
    const auto loc = profile_->locate(idx);
    out.push_back({loc.bank, loc.row, loc.cell.bit, loc.cell.orientation});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Flip> DramSimulator::read_all_flips() {
  std::vector<Flip> out;
  for (BankIndex b = 0; b < geometry_.banks; ++b) {
    auto part = read_flips(b);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

void DramSimulator::clear_flips() {
  for (auto idx : flip_order_) flipped_[idx] = 0;
  flip_order_.clear();
}

}  // namespace trrsim
