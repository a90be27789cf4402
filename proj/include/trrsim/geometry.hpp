#pragma once

#include <cstdint>

namespace trrsim {

using BankIndex = std::uint32_t;
using RowIndex = std::uint32_t;

/// Bank and row topology of the simulated module.
struct DramGeometry {
  std::uint32_t banks = 16;
  std::uint32_t rows_per_bank = 8192;
  /// Only used to bound weak-cell bit positions (8 bits per column).
  std::uint32_t columns_per_row = 1024;
  std::uint32_t ranks = 1;
  std::uint32_t pins = 8;

  std::uint32_t bits_per_row() const { return columns_per_row * 8; }
  std::uint64_t total_rows() const { return std::uint64_t{banks} * rows_per_bank; }

  /// Throws ConfigError when the topology cannot host a VAVAVAV layout.
  void validate() const;

  friend bool operator==(const DramGeometry&, const DramGeometry&) = default;
};

/// DDR timing constants that bound activation and refresh rates.
struct TimingParams {
  std::int64_t t_refi_ns = 7800;
  std::int64_t t_rfc_ns = 350;
  std::int64_t t_rc_ns = 45;
  std::int64_t t_refw_ms = 64;
  /// REF commands per tREFW at the standard rate; each refreshes
  /// rows_per_bank / refresh_slots rows of every bank.
  std::int64_t refresh_slots = 8192;

  std::int64_t t_refw_ns() const { return t_refw_ms * 1'000'000; }

  /// Number of REF commands needed to cover every row once.
  std::int64_t slot_count() const { return refresh_slots; }

  /// Maximum number of ACTs one bank can receive within tREFW.
  std::int64_t max_activations_per_window() const { return t_refw_ns() / t_rc_ns; }

  void validate() const;

  friend bool operator==(const TimingParams&, const TimingParams&) = default;
};

}  // namespace trrsim
