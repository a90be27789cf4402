#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "trrsim/geometry.hpp"
#include "trrsim/rng.hpp"

namespace trrsim {

enum class PatternKind : std::uint8_t {
  single_sided,
  double_sided,
  one_location,
  assisted_double_sided,
  strided,
  pair_based,
  arbitrary,
};

std::string to_string(PatternKind k);
PatternKind pattern_kind_from_string(const std::string& s);

/// Aggressor rows of one bank, hammered in list order.
struct HammerPattern {
  BankIndex bank = 0;
  std::vector<RowIndex> aggressors;
  PatternKind derivation = PatternKind::arbitrary;
  /// Inter-pair distance for pair_based patterns.
  std::uint32_t distance = 0;

  std::size_t cardinality() const { return aggressors.size(); }

  nlohmann::json to_json() const;

  friend bool operator==(const HammerPattern&, const HammerPattern&) = default;
};

/// single_sided = {base, base + delta} with delta > 2 (drawn from rng when
/// given, 8 otherwise); double_sided = {base - 1, base + 1};
/// one_location = {base}.
HammerPattern standard_pattern(PatternKind kind, RowIndex base, const DramGeometry& geometry, Rng* rng = nullptr,
                               BankIndex bank = 0);

/// n aggressors at stride 2 starting at first.
HammerPattern strided_pattern(RowIndex first, std::uint32_t n, const DramGeometry& geometry, BankIndex bank = 0);

/// n / 2 pairs {x - 1, x + 1}; d rows separate the upper row of one pair from
/// the lower row of the next. `first` is the lower row of the first pair.
/// d = 2 produces the strided layout and is labeled as such.
HammerPattern pair_based_pattern(RowIndex first, std::uint32_t d, std::uint32_t n, const DramGeometry& geometry,
                                 BankIndex bank = 0);

/// {x - 1, x + 1, x + k}, k > 2.
HammerPattern assisted_double_sided_pattern(RowIndex x, std::uint32_t k, const DramGeometry& geometry,
                                            BankIndex bank = 0);

/// Naming used in reports: "double-sided", "single-sided", "one-location",
/// "3-sided (assisted double-sided)", "n-sided", "(d,n)-sided",
/// "arbitrary(n)".
std::string classify_pattern(const HammerPattern& pattern);

/// Kind that classify_pattern recognizes.
PatternKind classify_kind(const HammerPattern& pattern);

}  // namespace trrsim
