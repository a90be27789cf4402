#include "trrsim/addressing.hpp"

#include <bit>
#include <cstdio>

#include "trrsim/error.hpp"

namespace trrsim {

namespace {

std::uint64_t extract_bits(std::uint64_t value, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (unsigned i = 0; mask != 0; ++i) {
    const auto low = mask & (~mask + 1);
    if (value & low) out |= std::uint64_t{1} << i;
    mask &= mask - 1;
  }
  return out;
}

std::uint64_t deposit_bits(std::uint64_t value, std::uint64_t mask) {
  std::uint64_t out = 0;
  for (unsigned i = 0; mask != 0; ++i) {
    const auto low = mask & (~mask + 1);
    if (value & (std::uint64_t{1} << i)) out |= low;
    mask &= mask - 1;
  }
  return out;
}

unsigned parity(std::uint64_t x) { return static_cast<unsigned>(std::popcount(x) & 1); }

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t parse_mask(const nlohmann::json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  const auto s = v.get<std::string>();
  std::size_t used = 0;
  const auto out = std::stoull(s, &used, 0);
  if (used != s.size()) throw ConfigError("address mapping: bad mask '" + s + "'");
  return out;
}

}  // namespace

AddressMapping::AddressMapping(std::vector<std::uint64_t> bank_functions, std::uint64_t row_mask,
                               std::uint64_t column_mask, std::optional<std::vector<RowIndex>> row_remap)
    : bank_functions_(std::move(bank_functions)),
      row_mask_(row_mask),
      column_mask_(column_mask),
      row_remap_(std::move(row_remap)) {
  if (row_mask_ == 0) throw ConfigError("address mapping: row mask is empty");
  if (row_mask_ & column_mask_) throw ConfigError("address mapping: row and column masks overlap");
  if (bank_functions_.size() > 16) throw ConfigError("address mapping: at most 16 bank functions");
  std::uint64_t function_bits = 0;
  for (auto f : bank_functions_) {
    if (f == 0) throw ConfigError("address mapping: empty bank function");
    function_bits |= f;
  }
  bank_only_mask_ = function_bits & ~(row_mask_ | column_mask_);
  const auto k = bank_functions_.size();
  if (static_cast<std::size_t>(std::popcount(bank_only_mask_)) != k)
    throw ConfigError("address mapping: need exactly one bank-only address bit per bank function");

  // Gaussian elimination over GF(2): rows are functions restricted to the
  // bank-only bits, augmented with the identity over the bank bits.
  std::vector<std::uint64_t> lhs(k), rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    lhs[i] = extract_bits(bank_functions_[i], bank_only_mask_);
    rhs[i] = std::uint64_t{1} << i;
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    while (pivot < k && !((lhs[pivot] >> col) & 1)) ++pivot;
    if (pivot == k) throw ConfigError("address mapping: bank functions are not invertible");
    std::swap(lhs[col], lhs[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r != col && ((lhs[r] >> col) & 1)) {
        lhs[r] ^= lhs[col];
        rhs[r] ^= rhs[col];
      }
    }
  }
  solve_ = rhs;

  claimed_ = row_mask_ | column_mask_ | bank_only_mask_;
  if (std::bit_width(claimed_) >= 64) throw ConfigError("address mapping: masks exceed 63 bits");
  address_limit_ = std::uint64_t{1} << std::bit_width(claimed_);

  if (row_remap_) {
    if (row_remap_->size() != row_count()) throw ConfigError("address mapping: remap size must equal the row count");
    std::vector<bool> seen(row_remap_->size());
    for (auto r : *row_remap_) {
      if (r >= seen.size() || seen[r]) throw ConfigError("address mapping: remap is not a permutation");
      seen[r] = true;
    }
  }
}

AddressMapping AddressMapping::default_ddr4() {
  std::vector<std::uint64_t> functions;
  for (unsigned i = 0; i < 4; ++i) functions.push_back((std::uint64_t{1} << (13 + i)) | (std::uint64_t{1} << (17 + i)));
  return AddressMapping(std::move(functions), ((std::uint64_t{1} << 13) - 1) << 17, (std::uint64_t{1} << 13) - 1);
}

AddressMapping AddressMapping::identity(unsigned first_row_bit, unsigned row_bits) {
  const std::uint64_t column = (std::uint64_t{1} << first_row_bit) - 1;
  return AddressMapping({}, ((std::uint64_t{1} << row_bits) - 1) << first_row_bit, column);
}

std::uint64_t AddressMapping::row_count() const { return std::uint64_t{1} << std::popcount(row_mask_); }

DramCoord AddressMapping::phys_to_dram(std::uint64_t addr) const {
  if (addr & ~claimed_) throw IndexError("address " + hex(addr) + " uses bits outside the mapping " + hex(claimed_));
  DramCoord c;
  for (std::size_t i = 0; i < bank_functions_.size(); ++i) c.bank |= parity(addr & bank_functions_[i]) << i;
  c.row = static_cast<RowIndex>(extract_bits(addr, row_mask_));
  c.column = static_cast<std::uint32_t>(extract_bits(addr, column_mask_));
  return c;
}

std::uint64_t AddressMapping::dram_to_phys(const DramCoord& c) const {
  if (c.bank >= bank_count() || c.row >= row_count() ||
      c.column >= (std::uint64_t{1} << std::popcount(column_mask_)))
    throw IndexError("coordinate outside the mapping");
  std::uint64_t addr = deposit_bits(c.row, row_mask_) | deposit_bits(c.column, column_mask_);
  // bank bits the known part already contributes
  std::uint64_t target = c.bank;
  for (std::size_t i = 0; i < bank_functions_.size(); ++i) target ^= std::uint64_t{parity(addr & bank_functions_[i])} << i;
  std::uint64_t free_bits = 0;
  for (std::size_t j = 0; j < solve_.size(); ++j) free_bits |= std::uint64_t{parity(solve_[j] & target)} << j;
  return addr | deposit_bits(free_bits, bank_only_mask_);
}

RowIndex AddressMapping::internal_row(RowIndex row) const {
  if (!row_remap_) return row;
  if (row >= row_remap_->size()) throw IndexError("row outside the remap table");
  return (*row_remap_)[row];
}

void AddressMapping::check_covers(const DramGeometry& g) const {
  if (bank_count() < g.banks) throw ConfigError("address mapping: fewer bank bits than banks");
  if (row_count() < g.rows_per_bank) throw ConfigError("address mapping: fewer row bits than rows");
}

nlohmann::json AddressMapping::to_json() const {
  nlohmann::json functions = nlohmann::json::array();
  for (auto f : bank_functions_) functions.push_back(hex(f));
  nlohmann::json doc{{"bank_functions", functions}, {"row_mask", hex(row_mask_)}, {"column_mask", hex(column_mask_)}};
  if (row_remap_) doc["row_remap"] = *row_remap_;
  return doc;
}

AddressMapping AddressMapping::from_json(const nlohmann::json& doc) {
  try {
    std::vector<std::uint64_t> functions;
    for (const auto& f : doc.at("bank_functions")) functions.push_back(parse_mask(f));
    std::optional<std::vector<RowIndex>> remap;
    if (doc.contains("row_remap")) remap = doc.at("row_remap").get<std::vector<RowIndex>>();
    return AddressMapping(std::move(functions), parse_mask(doc.at("row_mask")), parse_mask(doc.at("column_mask")),
                          std::move(remap));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("address mapping: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ConfigError("address mapping: masks must be integers or hex strings");
  }
}

DramCoord phys_to_dram(std::uint64_t addr, const AddressMapping& mapping) { return mapping.phys_to_dram(addr); }

std::uint64_t dram_to_phys(const DramCoord& coord, const AddressMapping& mapping) {
  return mapping.dram_to_phys(coord);
}

std::vector<std::uint64_t> contiguous_row_window(const AddressMapping& mapping, BankIndex bank, RowIndex start_row,
                                                 std::uint32_t n_rows) {
  if (std::uint64_t{start_row} + n_rows > mapping.row_count())
    throw IndexError("row window " + std::to_string(start_row) + "+" + std::to_string(n_rows) +
                     " overflows the bank");
  std::vector<std::uint64_t> out;
  out.reserve(n_rows);
  for (std::uint32_t i = 0; i < n_rows; ++i) out.push_back(mapping.dram_to_phys({bank, start_row + i, 0}));
  return out;
}

}  // namespace trrsim
