#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

#include "trrsim/geometry.hpp"

namespace trrsim {

struct DramCoord {
  BankIndex bank = 0;
  RowIndex row = 0;
  std::uint32_t column = 0;

  friend bool operator==(const DramCoord&, const DramCoord&) = default;
};

/// Physical address to DRAM coordinate mapping. Each bank bit is the XOR
/// parity of the address bits selected by one function mask; row and column
/// are the address bits under their masks, packed in ascending bit order.
class AddressMapping {
 public:
  AddressMapping(std::vector<std::uint64_t> bank_functions, std::uint64_t row_mask, std::uint64_t column_mask,
                 std::optional<std::vector<RowIndex>> row_remap = std::nullopt);

  /// 16 banks over bits 13..20 (13^17, 14^18, 15^19, 16^20), 8 KiB rows in
  /// bits 0..12, rows in bits 17..29.
  static AddressMapping default_ddr4();

  /// Row bits in the mapping starting at `first_row_bit`, no bank functions.
  static AddressMapping identity(unsigned first_row_bit, unsigned row_bits);

  const std::vector<std::uint64_t>& bank_functions() const { return bank_functions_; }
  std::uint64_t row_mask() const { return row_mask_; }
  std::uint64_t column_mask() const { return column_mask_; }

  std::uint32_t bank_count() const { return 1u << bank_functions_.size(); }
  std::uint64_t row_count() const;
  /// One past the largest address the mapping covers.
  std::uint64_t address_limit() const { return address_limit_; }
  /// Address bits the mapping interprets; other bits must be zero.
  std::uint64_t claimed_bits() const { return claimed_; }

  DramCoord phys_to_dram(std::uint64_t addr) const;
  std::uint64_t dram_to_phys(const DramCoord& coord) const;

  /// In-DRAM row for a controller-visible row (identity without a remap).
  RowIndex internal_row(RowIndex row) const;

  /// Throws ConfigError if the mapping cannot address every bank and row.
  void check_covers(const DramGeometry& geometry) const;

  nlohmann::json to_json() const;
  static AddressMapping from_json(const nlohmann::json& doc);

  friend bool operator==(const AddressMapping&, const AddressMapping&) = default;

 private:
  std::vector<std::uint64_t> bank_functions_;
  std::uint64_t row_mask_ = 0;
  std::uint64_t column_mask_ = 0;
  std::optional<std::vector<RowIndex>> row_remap_;
  std::uint64_t bank_only_mask_ = 0;
  std::uint64_t claimed_ = 0;
  std::uint64_t address_limit_ = 0;
  // inverse of the bank functions restricted to the bank-only bits, one
  // mask of bank bits per bank-only bit
  std::vector<std::uint64_t> solve_;
};

DramCoord phys_to_dram(std::uint64_t addr, const AddressMapping& mapping);
std::uint64_t dram_to_phys(const DramCoord& coord, const AddressMapping& mapping);

/// One address per row of (bank, start_row .. start_row + n_rows - 1), column 0.
std::vector<std::uint64_t> contiguous_row_window(const AddressMapping& mapping, BankIndex bank, RowIndex start_row,
                                                 std::uint32_t n_rows);

}  // namespace trrsim
