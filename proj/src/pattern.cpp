#include "trrsim/pattern.hpp"

#include <algorithm>

#include "trrsim/error.hpp"

namespace trrsim {

std::string to_string(PatternKind k) {
  switch (k) {
    case PatternKind::single_sided: return "single_sided";
    case PatternKind::double_sided: return "double_sided";
    case PatternKind::one_location: return "one_location";
    case PatternKind::assisted_double_sided: return "assisted_double_sided";
    case PatternKind::strided: return "strided";
    case PatternKind::pair_based: return "pair_based";
    case PatternKind::arbitrary: return "arbitrary";
  }
  return "arbitrary";
}

PatternKind pattern_kind_from_string(const std::string& s) {
  for (auto k : {PatternKind::single_sided, PatternKind::double_sided, PatternKind::one_location,
                 PatternKind::assisted_double_sided, PatternKind::strided, PatternKind::pair_based,
                 PatternKind::arbitrary})
    if (to_string(k) == s) return k;
  throw ConfigError("unknown pattern kind '" + s + "'");
}

nlohmann::json HammerPattern::to_json() const {
  nlohmann::json doc{{"bank", bank},
                     {"aggressors", aggressors},
                     {"cardinality", cardinality()},
                     {"derivation", to_string(derivation)},
                     {"nomenclature", classify_pattern(*this)}};
  if (derivation == PatternKind::pair_based) doc["distance"] = distance;
  return doc;
}

namespace {

void check_rows(const HammerPattern& p, const DramGeometry& g) {
  if (p.bank >= g.banks) throw IndexError("pattern bank out of range");
  for (auto r : p.aggressors)
    if (r >= g.rows_per_bank) throw IndexError("pattern row " + std::to_string(r) + " out of range");
}

}  // namespace

HammerPattern standard_pattern(PatternKind kind, RowIndex base, const DramGeometry& g, Rng* rng, BankIndex bank) {
  HammerPattern p;
  p.bank = bank;
  p.derivation = kind;
  switch (kind) {
    case PatternKind::single_sided: {
      const std::uint32_t delta = rng ? static_cast<std::uint32_t>(rng->between(3, 64)) : 8;
      if (std::uint64_t{base} + delta >= g.rows_per_bank) throw IndexError("single-sided pattern overflows the bank");
      p.aggressors = {base, base + delta};
      break;
    }
    case PatternKind::double_sided:
      if (base == 0) throw IndexError("double-sided pattern needs a row below the victim");
      p.aggressors = {base - 1, base + 1};
      break;
    case PatternKind::one_location: p.aggressors = {base}; break;
    default: throw ConfigError("standard_pattern: kind must be single_sided, double_sided or one_location");
  }
  check_rows(p, g);
  return p;
}

HammerPattern strided_pattern(RowIndex first, std::uint32_t n, const DramGeometry& g, BankIndex bank) {
  if (n == 0) throw ConfigError("strided pattern needs at least one aggressor");
  HammerPattern p;
  p.bank = bank;
  p.derivation = n == 1 ? PatternKind::one_location : n == 2 ? PatternKind::double_sided : PatternKind::strided;
  if (std::uint64_t{first} + 2ull * (n - 1) >= g.rows_per_bank) throw IndexError("strided pattern overflows the bank");
  for (std::uint32_t i = 0; i < n; ++i) p.aggressors.push_back(first + 2 * i);
  return p;
}

HammerPattern pair_based_pattern(RowIndex first, std::uint32_t d, std::uint32_t n, const DramGeometry& g,
                                 BankIndex bank) {
  if (n < 2 || n % 2 != 0) throw ConfigError("pair-based pattern needs an even n >= 2");
  if (d < 1) throw ConfigError("pair-based pattern: distance " + std::to_string(d) + " makes pairs overlap");
  HammerPattern p;
  p.bank = bank;
  p.distance = d;
  p.derivation = n == 2 ? PatternKind::double_sided : d == 2 ? PatternKind::strided : PatternKind::pair_based;
  for (std::uint32_t k = 0; k < n / 2; ++k) {
    const std::uint64_t lo = std::uint64_t{first} + std::uint64_t{k} * (d + 2);
    if (lo + 2 >= g.rows_per_bank) throw IndexError("pair-based pattern overflows the bank");
    p.aggressors.push_back(static_cast<RowIndex>(lo));
    p.aggressors.push_back(static_cast<RowIndex>(lo + 2));
  }
  return p;
}

HammerPattern assisted_double_sided_pattern(RowIndex x, std::uint32_t k, const DramGeometry& g, BankIndex bank) {
  if (k <= 2) throw ConfigError("assisted double-sided pattern needs k > 2");
  if (x == 0 || std::uint64_t{x} + k >= g.rows_per_bank) throw IndexError("assisted pattern overflows the bank");
  HammerPattern p;
  p.bank = bank;
  p.derivation = k == 3 ? PatternKind::strided : PatternKind::assisted_double_sided;
  p.aggressors = {x - 1, x + 1, x + k};
  return p;
}

namespace {

struct Shape {
  PatternKind kind;
  std::size_t n;
  std::uint32_t d;
};

Shape shape_of(const HammerPattern& p) {
  std::vector<RowIndex> r = p.aggressors;
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  const std::size_t n = r.size();
  if (n != p.aggressors.size() || n == 0) return {PatternKind::arbitrary, p.aggressors.size(), 0};
  if (n == 1) return {PatternKind::one_location, 1, 0};
  if (n == 2) {
    const auto gap = r[1] - r[0];
    if (gap == 2) return {PatternKind::double_sided, 2, 0};
    if (gap > 2) return {PatternKind::single_sided, 2, 0};
    return {PatternKind::arbitrary, 2, 0};
  }
  bool strided = true;
  for (std::size_t i = 1; i < n; ++i) strided = strided && r[i] - r[i - 1] == 2;
  if (strided) return {PatternKind::strided, n, 0};
  if (n == 3 && ((r[1] - r[0] == 2 && r[2] - r[1] > 2) || (r[2] - r[1] == 2 && r[1] - r[0] > 2)))
    return {PatternKind::assisted_double_sided, 3, 0};
  if (n % 2 == 0) {
    bool pairs = true;
    const auto d = r[2] - r[1];
    for (std::size_t i = 0; i + 1 < n && pairs; i += 2) {
      pairs = r[i + 1] - r[i] == 2;
      if (i + 2 < n) pairs = pairs && r[i + 2] - r[i + 1] == d;
    }
    if (pairs && d >= 1) return {PatternKind::pair_based, n, d};
  }
  return {PatternKind::arbitrary, n, 0};
}

}  // namespace

PatternKind classify_kind(const HammerPattern& p) { return shape_of(p).kind; }

std::string classify_pattern(const HammerPattern& p) {
  const auto s = shape_of(p);
  switch (s.kind) {
    case PatternKind::one_location: return "one-location";
    case PatternKind::single_sided: return "single-sided";
    case PatternKind::double_sided: return "double-sided";
    case PatternKind::assisted_double_sided: return "3-sided (assisted double-sided)";
    case PatternKind::strided: return std::to_string(s.n) + "-sided";
    case PatternKind::pair_based: return "(" + std::to_string(s.d) + "," + std::to_string(s.n) + ")-sided";
    case PatternKind::arbitrary: return "arbitrary(" + std::to_string(s.n) + ")";
  }
  return "arbitrary(" + std::to_string(s.n) + ")";
}

}  // namespace trrsim
