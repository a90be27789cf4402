#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "trrsim/error.hpp"
#include "trrsim/fuzzer.hpp"

using namespace trrsim;

TEST_CASE("standard_pattern") {
  const DramGeometry g;
  CHECK(standard_pattern(PatternKind::double_sided, 10, g).aggressors == std::vector<RowIndex>{9, 11});
  CHECK(standard_pattern(PatternKind::one_location, 5, g).aggressors == std::vector<RowIndex>{5});
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const auto p = standard_pattern(PatternKind::single_sided, 100, g, &rng);
    REQUIRE(p.cardinality() == 2);
    const auto delta = static_cast<std::int64_t>(p.aggressors[1]) - static_cast<std::int64_t>(p.aggressors[0]);
    CHECK(std::abs(delta) > 2);
  }
  CHECK_THROWS(standard_pattern(PatternKind::double_sided, 0, g));
  CHECK_THROWS(standard_pattern(PatternKind::double_sided, g.rows_per_bank - 1, g));
}

TEST_CASE("classify_pattern") {
  const DramGeometry g;
  HammerPattern p;
  p.aggressors = {9, 11, 15};
  CHECK(classify_pattern(p) == "3-sided (assisted double-sided)");
  p.aggressors = {1, 3, 5, 7, 9, 11, 13, 15, 17};
  CHECK(classify_pattern(p) == "9-sided");
  p.aggressors = {4, 6, 9, 11};
  CHECK(classify_pattern(p) == "(3,4)-sided");
  p.aggressors = {9, 11};
  CHECK(classify_pattern(p) == "double-sided");
  p.aggressors = {5};
  CHECK(classify_pattern(p) == "one-location");
  p.aggressors = {5, 40};
  CHECK(classify_pattern(p) == "single-sided");
  p.aggressors = {5, 6, 40, 41, 100};
  CHECK(classify_pattern(p) == "arbitrary(5)");
}

TEST_CASE("pattern constructors round-trip through classification") {
  const DramGeometry g;
  CHECK(classify_kind(standard_pattern(PatternKind::double_sided, 50, g)) == PatternKind::double_sided);
  CHECK(classify_kind(standard_pattern(PatternKind::one_location, 50, g)) == PatternKind::one_location);
  CHECK(classify_kind(standard_pattern(PatternKind::single_sided, 50, g)) == PatternKind::single_sided);
  for (std::uint32_t k = 3; k < 20; ++k) {
    const auto p = assisted_double_sided_pattern(100, k, g);
    CHECK(classify_kind(p) == p.derivation);
    CHECK(p.derivation == (k == 3 ? PatternKind::strided : PatternKind::assisted_double_sided));
  }
  for (std::uint32_t n = 3; n <= 28; ++n) CHECK(classify_kind(strided_pattern(100, n, g)) == PatternKind::strided);
  for (std::uint32_t n = 4; n <= 12; n += 2)
    for (std::uint32_t d : {1u, 3u, 4u, 12u}) {
      const auto p = pair_based_pattern(100, d, n, g);
      CHECK(classify_kind(p) == PatternKind::pair_based);
      CHECK(classify_pattern(p) == "(" + std::to_string(d) + "," + std::to_string(n) + ")-sided");
    }
  CHECK(pair_based_pattern(4, 3, 4, g).aggressors == std::vector<RowIndex>{4, 6, 9, 11});
  CHECK_THROWS(pair_based_pattern(4, 0, 4, g));
  CHECK_THROWS(pair_based_pattern(4, 3, 5, g));
}

TEST_CASE("cardinality cap") {
  CHECK(cardinality_cap(TimingParams{}, 50'000) == 28);
  FuzzConfig c;
  c.max_cardinality = 29;
  CHECK_THROWS_AS(c.validate(DramGeometry{}, TimingParams{}), ConfigError);
}

TEST_CASE("generate_pattern: exhaustible window") {
  const DramGeometry g;
  FuzzConfig c;
  c.min_cardinality = c.max_cardinality = 2;
  c.window_rows = 3;
  c.window_start = 500;
  Rng rng(1);
  std::set<std::vector<RowIndex>> seen;
  for (int i = 0; i < 300; ++i) {
    const auto p = generate_pattern(rng, c, g);
    for (auto r : p.aggressors) CHECK((r >= 500 && r <= 502));
    seen.insert(p.aggressors);
  }
  CHECK(seen.size() == 3);
}

TEST_CASE("generate_pattern: default cardinalities stay within bounds") {
  const DramGeometry g;
  FuzzConfig c;
  Rng rng(2);
  std::set<std::size_t> sizes;
  for (int i = 0; i < 3000; ++i) {
    const auto p = generate_pattern(rng, c, g);
    CHECK(p.cardinality() >= 2);
    CHECK(p.cardinality() <= 28);
    CHECK(std::set<RowIndex>(p.aggressors.begin(), p.aggressors.end()).size() == p.cardinality());
    sizes.insert(p.cardinality());
  }
  CHECK(sizes.size() == 27);
}

TEST_CASE("generate_pattern: window smaller than cardinality") {
  FuzzConfig c;
  c.window_rows = 10;
  c.min_cardinality = 12;
  c.max_cardinality = 12;
  CHECK_THROWS_AS(c.validate(DramGeometry{}, TimingParams{}), ConfigError);
}

TEST_CASE("generate_pattern: location control off draws from the whole bank") {
  const DramGeometry g;
  FuzzConfig c;
  c.location_control = false;
  Rng rng(3);
  RowIndex lo = g.rows_per_bank, hi = 0;
  for (int i = 0; i < 500; ++i)
    for (auto r : generate_pattern(rng, c, g).aggressors) lo = std::min(lo, r), hi = std::max(hi, r);
  CHECK(lo < 1000);
  CHECK(hi > 7000);
}

TEST_CASE("candidate patterns replay identically") {
  const DramGeometry g;
  FuzzConfig c;
  c.seed = 77;
  for (std::uint64_t i = 0; i < 200; ++i) CHECK(candidate_pattern(c, g, i) == candidate_pattern(c, g, i));
  FuzzConfig other = c;
  other.seed = 78;
  int differ = 0;
  for (std::uint64_t i = 0; i < 50; ++i) differ += candidate_pattern(c, g, i) != candidate_pattern(other, g, i);
  CHECK(differ > 40);
}

TEST_CASE("evaluate_pattern") {
  const auto profile = test::default_profile(1);
  const DramGeometry& g = profile->geometry();
  FuzzConfig c;

  SUBCASE("no weak cells, no flips") {
    const auto empty = test::cells_profile(g, {});
    const auto f = test::factory(empty, make_preset("none"));
    CHECK(evaluate_pattern(f, strided_pattern(4096, 5, g), c).unique_flips() == 0);
  }
  SUBCASE("case_one") {
    const auto f = test::factory(profile, make_preset("case_one"));
    CHECK(evaluate_pattern(f, standard_pattern(PatternKind::double_sided, 4097, g), c).unique_flips() == 0);
    CHECK(evaluate_pattern(f, strided_pattern(4096, 5, g), c).unique_flips() > 0);
  }
  SUBCASE("case_two") {
    const auto f = test::factory(profile, make_preset("case_two"));
    CHECK(evaluate_pattern(f, strided_pattern(4096, 6, g), c).unique_flips() == 0);
    CHECK(evaluate_pattern(f, strided_pattern(4096, 7, g), c).unique_flips() > 0);
  }
}

TEST_CASE("fuzz_campaign") {
  const auto profile = test::default_profile(1);
  FuzzConfig c;
  c.seed = 5;

  SUBCASE("zero budget") {
    c.candidate_budget = 0;
    const auto r = fuzz_campaign(test::factory(profile, make_preset("case_one")), c);
    CHECK(r.evaluated.empty());
    CHECK(r.ranked.empty());
    CHECK(r.best() == nullptr);
  }
  SUBCASE("no mitigation: the first candidate flips") {
    c.candidate_budget = 1;
    const auto r = fuzz_campaign(test::factory(profile, make_preset("none")), c);
    REQUIRE(r.bypassed());
    CHECK(r.best()->index == 0);
  }
  SUBCASE("ranking order and thread independence") {
    c.candidate_budget = 24;
    const auto f = test::factory(profile, make_preset("case_one"));
    const auto serial = fuzz_campaign(f, c);
    c.threads = 3;
    const auto parallel = fuzz_campaign(f, c);
    CHECK(serial.to_csv() == parallel.to_csv());
    CHECK(serial.to_json() == parallel.to_json());
    for (std::size_t i = 1; i < serial.ranked.size(); ++i) {
      const auto& a = serial.ranked[i - 1];
      const auto& b = serial.ranked[i];
      const bool ordered = a.flips > b.flips || (a.flips == b.flips && (a.pattern.cardinality() < b.pattern.cardinality() ||
                                                                       (a.pattern.cardinality() == b.pattern.cardinality() &&
                                                                        a.index < b.index)));
      CHECK(ordered);
    }
    CHECK(serial.to_csv().rfind("candidate_index,nomenclature,cardinality,flips\n", 0) == 0);
  }
  SUBCASE("stop after first hit") {
    c.candidate_budget = 500;
    c.stop_after_first_hit = true;
    const auto r = fuzz_campaign(test::factory(profile, make_preset("case_one")), c);
    REQUIRE(r.bypassed());
    CHECK(r.ranked.size() == 1);
    CHECK(r.evaluated.back().index == r.best()->index);
  }
}

TEST_CASE("fuzz config JSON") {
  FuzzConfig c;
  c.seed = 9;
  c.window_start = 100;
  c.refresh_mode = RefreshMode::double_rate;
  const auto back = FuzzConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
}
