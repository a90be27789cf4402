#include "trrsim/vulnerability.hpp"

#include <algorithm>
#include <cmath>

#include "trrsim/error.hpp"
#include "trrsim/rng.hpp"

namespace trrsim {

std::string to_string(FlipDirection d) {
  return d == FlipDirection::one_to_zero ? "1to0" : "0to1";
}

std::string to_string(DdrGeneration g) { return g == DdrGeneration::ddr3 ? "ddr3" : "ddr4"; }

FlipDirection flip_direction_from_string(const std::string& s) {
  if (s == "1to0" || s == "one_to_zero") return FlipDirection::one_to_zero;
  if (s == "0to1" || s == "zero_to_one") return FlipDirection::zero_to_one;
  throw ConfigError("unknown flip orientation '" + s + "'");
}

DdrGeneration ddr_generation_from_string(const std::string& s) {
  if (s == "ddr3" || s == "DDR3") return DdrGeneration::ddr3;
  if (s == "ddr4" || s == "DDR4") return DdrGeneration::ddr4;
  throw ConfigError("unknown DDR generation '" + s + "'");
}

VulnerabilityParams VulnerabilityParams::defaults_for(DdrGeneration g) {
  VulnerabilityParams p;
  p.generation = g;
  if (g == DdrGeneration::ddr3) {
    p.threshold_mean = 139'000;
    p.threshold_spread = 27'800;
  } else {
    p.threshold_mean = 50'000;
    p.threshold_spread = 10'000;
  }
  return p;
}

void VulnerabilityParams::validate() const {
  if (!(weak_cell_density >= 0.0 && weak_cell_density <= 1.0))
    throw ConfigError("vulnerability: weak_cell_density must lie in [0, 1]");
  if (!(threshold_mean >= 1.0)) throw ConfigError("vulnerability: threshold_mean must be >= 1");
  if (!(threshold_spread >= 0.0)) throw ConfigError("vulnerability: threshold_spread must be >= 0");
}

std::span<const WeakCell> VulnerabilityProfile::cells(BankIndex bank, RowIndex row) const {
  const auto s = slot(bank, row);
  return std::span<const WeakCell>(cells_).subspan(offsets_[s], offsets_[s + 1] - offsets_[s]);
}

std::span<const std::uint32_t> VulnerabilityProfile::bank_min_thresholds(BankIndex bank) const {
  return std::span<const std::uint32_t>(row_min_).subspan(std::size_t{bank} * geometry_.rows_per_bank,
                                                          geometry_.rows_per_bank);
}

LocatedCell VulnerabilityProfile::locate(std::size_t cell_index) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), static_cast<std::uint32_t>(cell_index));
  const auto s = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  return {static_cast<BankIndex>(s / geometry_.rows_per_bank), static_cast<RowIndex>(s % geometry_.rows_per_bank),
          cells_[cell_index]};
}

void VulnerabilityProfile::finalize() {
  const auto rows = geometry_.total_rows();
  row_min_.assign(rows, kNoCells);
  for (std::size_t s = 0; s < rows; ++s) {
    for (auto i = offsets_[s]; i < offsets_[s + 1]; ++i) row_min_[s] = std::min(row_min_[s], cells_[i].threshold);
  }
}

VulnerabilityProfile VulnerabilityProfile::from_cells(const DramGeometry& geometry, std::vector<LocatedCell> cells,
                                                      VulnerabilityParams params) {
  geometry.validate();
  VulnerabilityProfile p;
  p.geometry_ = geometry;
  p.params_ = params;
  for (const auto& c : cells) {
    if (c.bank >= geometry.banks || c.row >= geometry.rows_per_bank)
      throw IndexError("weak cell outside geometry");
    if (c.cell.bit >= geometry.bits_per_row()) throw IndexError("weak cell bit index outside row");
    if (c.cell.threshold < 1) throw ConfigError("weak cell threshold must be >= 1");
  }
  std::sort(cells.begin(), cells.end(), [](const LocatedCell& a, const LocatedCell& b) {
    if (a.bank != b.bank) return a.bank < b.bank;
    if (a.row != b.row) return a.row < b.row;
    return a.cell.bit < b.cell.bit;
  });
  const auto rows = geometry.total_rows();
  p.offsets_.assign(rows + 1, 0);
  p.cells_.reserve(cells.size());
  std::size_t next = 0;
  for (std::size_t s = 0; s < rows; ++s) {
    p.offsets_[s] = static_cast<std::uint32_t>(p.cells_.size());
    while (next < cells.size() && p.slot(cells[next].bank, cells[next].row) == s) {
      if (!p.cells_.empty() && p.offsets_[s] < p.cells_.size() && p.cells_.back().bit == cells[next].cell.bit)
        throw ConfigError("duplicate weak cell");
      p.cells_.push_back(cells[next].cell);
      ++next;
    }
  }
  p.offsets_[rows] = static_cast<std::uint32_t>(p.cells_.size());
  p.finalize();
  return p;
}

VulnerabilityProfile build_vulnerability(const DramGeometry& geometry, const VulnerabilityParams& params) {
  geometry.validate();
  params.validate();
  VulnerabilityProfile p;
  p.geometry_ = geometry;
  p.params_ = params;
  const auto rows = geometry.total_rows();
  const auto bits = geometry.bits_per_row();
  p.offsets_.assign(rows + 1, 0);

  Rng rng(params.seed);
  const double density = params.weak_cell_density;
  const double lo = std::max(1.0, params.threshold_mean - params.threshold_spread);
  const double hi = params.threshold_mean + params.threshold_spread;
  const double sd = params.threshold_spread / 2.0;
  // log(1 - density) drives geometric skips between weak bits
  const double log_miss = density < 1.0 ? std::log1p(-density) : 0.0;

  for (std::size_t s = 0; s < rows; ++s) {
    p.offsets_[s] = static_cast<std::uint32_t>(p.cells_.size());
    if (density <= 0.0) continue;
    std::uint64_t bit = 0;
    while (true) {
      if (density < 1.0) {
        double u;
        do {
          u = rng.uniform();
        } while (u <= 0.0);
        bit += static_cast<std::uint64_t>(std::floor(std::log(u) / log_miss));
      }
      if (bit >= bits) break;
      const double t = std::clamp(std::round(rng.normal(params.threshold_mean, sd)), lo, hi);
      const auto orientation = (rng.next() >> 63) ? FlipDirection::zero_to_one : FlipDirection::one_to_zero;
      p.cells_.push_back({static_cast<std::uint32_t>(bit), static_cast<std::uint32_t>(t), orientation});
      ++bit;
    }
  }
  p.offsets_[rows] = static_cast<std::uint32_t>(p.cells_.size());
  p.finalize();
  return p;
}

nlohmann::json VulnerabilityProfile::to_json() const {
  nlohmann::json doc;
  doc["geometry"] = {{"banks", geometry_.banks},
                     {"rows_per_bank", geometry_.rows_per_bank},
                     {"columns_per_row", geometry_.columns_per_row},
                     {"ranks", geometry_.ranks},
                     {"pins", geometry_.pins}};
  doc["params"] = {{"seed", params_.seed},
                   {"weak_cell_density", params_.weak_cell_density},
                   {"threshold_mean", params_.threshold_mean},
                   {"threshold_spread", params_.threshold_spread},
                   {"ddr_generation", to_string(params_.generation)}};
  auto cells = nlohmann::json::array();
  const auto rows = geometry_.total_rows();
  for (std::size_t s = 0; s < rows; ++s) {
    for (auto i = offsets_[s]; i < offsets_[s + 1]; ++i) {
      cells.push_back({{"bank", s / geometry_.rows_per_bank},
                       {"row", s % geometry_.rows_per_bank},
                       {"bit", cells_[i].bit},
                       {"threshold", cells_[i].threshold},
                       {"orientation", to_string(cells_[i].orientation)}});
    }
  }
  doc["cells"] = std::move(cells);
  return doc;
}

VulnerabilityProfile VulnerabilityProfile::from_json(const nlohmann::json& doc) {
  try {
    DramGeometry g;
    const auto& jg = doc.at("geometry");
    g.banks = jg.at("banks").get<std::uint32_t>();
    g.rows_per_bank = jg.at("rows_per_bank").get<std::uint32_t>();
    g.columns_per_row = jg.value("columns_per_row", g.columns_per_row);
    g.ranks = jg.value("ranks", g.ranks);
    g.pins = jg.value("pins", g.pins);
    VulnerabilityParams params;
    if (doc.contains("params")) {
      const auto& jp = doc["params"];
      params.seed = jp.value("seed", params.seed);
      params.weak_cell_density = jp.value("weak_cell_density", params.weak_cell_density);
      params.threshold_mean = jp.value("threshold_mean", params.threshold_mean);
      params.threshold_spread = jp.value("threshold_spread", params.threshold_spread);
      params.generation = ddr_generation_from_string(jp.value("ddr_generation", std::string("ddr4")));
    }
    std::vector<LocatedCell> cells;
    for (const auto& c : doc.at("cells")) {
      const auto threshold = c.at("threshold").get<std::int64_t>();
      if (threshold < 1) throw ConfigError("weak cell threshold must be >= 1");
      cells.push_back({c.at("bank").get<BankIndex>(), c.at("row").get<RowIndex>(),
                       {c.at("bit").get<std::uint32_t>(), static_cast<std::uint32_t>(threshold),
                        flip_direction_from_string(c.at("orientation").get<std::string>())}});
    }
    return from_cells(g, std::move(cells), params);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed vulnerability profile: ") + e.what());
  }
}

}  // namespace trrsim
