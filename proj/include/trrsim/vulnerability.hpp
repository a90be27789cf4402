#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "trrsim/geometry.hpp"

namespace trrsim {

enum class FlipDirection : std::uint8_t { one_to_zero, zero_to_one };

enum class DdrGeneration : std::uint8_t { ddr3, ddr4 };

std::string to_string(FlipDirection d);
std::string to_string(DdrGeneration g);
FlipDirection flip_direction_from_string(const std::string& s);
DdrGeneration ddr_generation_from_string(const std::string& s);

/// A cell that flips once its row accumulates `threshold` neighbor activations.
struct WeakCell {
  std::uint32_t bit = 0;
  std::uint32_t threshold = 1;
  FlipDirection orientation = FlipDirection::one_to_zero;

  friend bool operator==(const WeakCell&, const WeakCell&) = default;
};

/// A weak cell together with its location, used to build profiles by hand.
struct LocatedCell {
  BankIndex bank = 0;
  RowIndex row = 0;
  WeakCell cell;
};

struct VulnerabilityParams {
  std::uint64_t seed = 1;
  /// Probability that any given bit of a row is a weak cell.
  double weak_cell_density = 0.001;
  double threshold_mean = 50'000;
  double threshold_spread = 10'000;
  DdrGeneration generation = DdrGeneration::ddr4;

  /// Defaults per DRAM generation (DDR4: 50K total double-sided activations,
  /// DDR3: 139K).
  static VulnerabilityParams defaults_for(DdrGeneration g);

  void validate() const;
};

/// Weak cells for every (bank, row), stored row-major in one flat array.
class VulnerabilityProfile {
 public:
  static constexpr std::uint32_t kNoCells = std::numeric_limits<std::uint32_t>::max();

  VulnerabilityProfile() = default;

  /// Builds a profile from explicit cells; cells are sorted by bit within a row.
  static VulnerabilityProfile from_cells(const DramGeometry& geometry,
                                         std::vector<LocatedCell> cells,
                                         VulnerabilityParams params = {});

  const DramGeometry& geometry() const { return geometry_; }
  const VulnerabilityParams& params() const { return params_; }

  std::span<const WeakCell> cells(BankIndex bank, RowIndex row) const;

  /// Index of the first cell of (bank, row) in the flat cell array.
  std::size_t first_cell(BankIndex bank, RowIndex row) const { return offsets_[slot(bank, row)]; }

  /// Smallest threshold in the row, kNoCells for rows without weak cells.
  std::uint32_t min_threshold(BankIndex bank, RowIndex row) const { return row_min_[slot(bank, row)]; }

  /// Per-row minimum thresholds of one bank, indexed by row.
  std::span<const std::uint32_t> bank_min_thresholds(BankIndex bank) const;

  std::size_t total_cells() const { return cells_.size(); }
  std::span<const WeakCell> all_cells() const { return cells_; }

  /// Location of a cell given its flat index.
  LocatedCell locate(std::size_t cell_index) const;

  nlohmann::json to_json() const;
  static VulnerabilityProfile from_json(const nlohmann::json& doc);

  friend bool operator==(const VulnerabilityProfile& a, const VulnerabilityProfile& b) {
    return a.geometry_ == b.geometry_ && a.offsets_ == b.offsets_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t slot(BankIndex bank, RowIndex row) const {
    return std::size_t{bank} * geometry_.rows_per_bank + row;
  }
  void finalize();

  friend VulnerabilityProfile build_vulnerability(const DramGeometry&, const VulnerabilityParams&);

  DramGeometry geometry_;
  VulnerabilityParams params_;
  std::vector<std::uint32_t> offsets_;  // size total_rows + 1
  std::vector<WeakCell> cells_;
  std::vector<std::uint32_t> row_min_;
};

/// Draws a deterministic profile: weak bits form a Bernoulli process of the
/// given density, thresholds are normal around the mean (sd = spread / 2)
/// clamped to [mean - spread, mean + spread], orientation is a fair coin.
VulnerabilityProfile build_vulnerability(const DramGeometry& geometry, const VulnerabilityParams& params);

}  // namespace trrsim
