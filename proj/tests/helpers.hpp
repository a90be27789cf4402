#pragma once

#include <memory>
#include <vector>

#include "trrsim/dram.hpp"
#include "trrsim/fuzzer.hpp"
#include "trrsim/vulnerability.hpp"

namespace trrsim::test {

inline DramGeometry small_geometry(std::uint32_t banks = 2, std::uint32_t rows = 64) {
  DramGeometry g;
  g.banks = banks;
  g.rows_per_bank = rows;
  g.columns_per_row = 16;
  return g;
}

inline std::shared_ptr<const VulnerabilityProfile> cells_profile(const DramGeometry& g,
                                                                 std::vector<LocatedCell> cells) {
  return std::make_shared<const VulnerabilityProfile>(VulnerabilityProfile::from_cells(g, std::move(cells)));
}

inline std::shared_ptr<const VulnerabilityProfile> default_profile(std::uint64_t seed = 1) {
  auto p = VulnerabilityParams::defaults_for(DdrGeneration::ddr4);
  p.seed = seed;
  return std::make_shared<const VulnerabilityProfile>(build_vulnerability(DramGeometry{}, p));
}

inline SimFactory factory(std::shared_ptr<const VulnerabilityProfile> profile, const MitigationConfig& mitigation,
                          const TimingParams& timing = {}) {
  return [profile, mitigation, timing] {
    return std::make_unique<DramSimulator>(profile->geometry(), timing, profile, mitigation);
  };
}

}  // namespace trrsim::test
