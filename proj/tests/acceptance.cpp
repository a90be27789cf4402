#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "trrsim/analysis.hpp"
#include "trrsim/controller.hpp"
#include "trrsim/error.hpp"
#include "trrsim/fuzzer.hpp"
#include "trrsim/mitigation.hpp"
#include "trrsim/refresh_detect.hpp"
#include "trrsim/spd.hpp"

using namespace trrsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::shared_ptr<const VulnerabilityProfile> ddr4_profile(std::uint64_t seed, const DramGeometry& g = {}) {
  auto p = VulnerabilityParams::defaults_for(DdrGeneration::ddr4);
  p.seed = seed;
  return std::make_shared<const VulnerabilityProfile>(build_vulnerability(g, p));
}

SimFactory factory_for(std::shared_ptr<const VulnerabilityProfile> profile, const MitigationConfig& m) {
  return [profile, m] { return std::make_unique<DramSimulator>(profile->geometry(), TimingParams{}, profile, m); };
}

Outcome sampler_inference() {
  const auto start = Clock::now();
  GridParams params;
  params.n_values = {2, 3, 4, 5, 6, 7, 8, 9, 10};
  params.r_values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  int exact = 0, total = 0;
  std::string misses;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto profile = ddr4_profile(seed);
    for (std::uint32_t s = 1; s <= 8; ++s) {
      const auto est = infer_sampler_size(refresh_grid(factory_for(profile, frequency_config(s)), params)).estimate;
      ++total;
      if (est == s)
        ++exact;
      else
        misses += " s=" + std::to_string(s) + "/seed=" + std::to_string(seed);
    }
  }
  const double t = seconds_since(start);
  std::ostringstream d;
  d << exact << "/" << total << " exact in " << t << " s" << misses;
  return {exact == total && t < 60, d.str()};
}

Outcome case_one_shape() {
  const auto grid = refresh_grid(factory_for(ddr4_profile(1), make_preset("case_one")), {});
  bool ok = true;
  std::ostringstream d;
  for (std::uint32_t r = 2; r <= 8; ++r) ok &= grid.at(2, r) == 0;
  d << "n=2 zero for r>=2: " << (ok ? "yes" : "no");
  // a plateau at r: flips(r) > 0 and constant for every later r, with flips(r-1) different
  auto plateau_at = [&](std::uint32_t n, std::uint32_t r) {
    if (grid.at(n, r) == 0 || grid.at(n, r - 1) == grid.at(n, r)) return false;
    for (std::uint32_t q = r + 1; q <= 8; ++q)
      if (grid.at(n, q) != grid.at(n, r)) return false;
    return true;
  };
  const bool n3 = plateau_at(3, 3);
  d << "; n=3 plateau at r=3: " << (n3 ? "yes" : "no") << " (flips r=0..8:";
  for (std::uint32_t r = 0; r <= 8; ++r) d << " " << grid.at(3, r);
  d << ")";
  bool high = true;
  for (std::uint32_t n = 5; n <= 8; ++n) high &= plateau_at(n, 4);
  d << "; n>=5 plateau at r=4: " << (high ? "yes" : "no");
  return {ok && n3 && high, d.str()};
}

Outcome overflow_thresholds() {
  const auto profile = ddr4_profile(1);
  const std::vector<std::uint32_t> ns{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  bool pass = true;
  std::ostringstream d;
  const std::vector<std::tuple<std::string, MitigationConfig, std::uint32_t>> cases{
      {"case_one", make_preset("case_one"), 5}, {"case_two", make_preset("case_two"), 7},
      {"frequency s=7", frequency_config(7), 8}};
  for (const auto& [name, m, expect] : cases) {
    const auto start = Clock::now();
    std::uint32_t first = 0;
    for (const auto& [n, flips] : aggressor_sweep(factory_for(profile, m), ns, {}))
      if (flips > 0) {
        first = n;
        break;
      }
    const double t = seconds_since(start);
    pass &= first == expect && t < 30;
    d << name << " first n=" << first << " (expected " << expect << ", " << t << " s); ";
  }
  return {pass, d.str()};
}

Outcome cardinality_constant() {
  const auto cap = cardinality_cap(TimingParams{}, 50'000);
  FuzzConfig c;
  c.max_cardinality = cap + 1;
  bool rejects = false;
  try {
    c.validate(DramGeometry{}, TimingParams{});
  } catch (const ConfigError&) {
    rejects = true;
  }
  return {cap == 28 && rejects, "cap " + std::to_string(cap) + ", cap + 1 rejected: " + (rejects ? "yes" : "no")};
}

Outcome fuzzer_effectiveness() {
  bool pass = true;
  std::ostringstream d;
  for (const std::string preset : {"case_one", "case_two", "modern"}) {
    const auto start = Clock::now();
    int hits = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
      FuzzConfig c;
      c.seed = seed;
      c.candidate_budget = 10'000;
      c.stop_after_first_hit = true;
      hits += fuzz_campaign(factory_for(ddr4_profile(seed), make_preset(preset)), c).bypassed();
    }
    const double t = seconds_since(start);
    pass &= hits >= 38 && t < 300;
    d << preset << " " << hits << "/40 (" << t << " s); ";
  }
  const auto start = Clock::now();
  FuzzConfig c;
  c.seed = 1;
  c.candidate_budget = 10'000;
  const auto perfect = fuzz_campaign(factory_for(ddr4_profile(1), make_preset("perfect")), c);
  const double t = seconds_since(start);
  pass &= !perfect.bypassed() && perfect.evaluated.size() == 10'000 && t < 300;
  d << "perfect " << perfect.ranked.size() << " bypassing of " << perfect.evaluated.size() << " (" << t << " s)";
  return {pass, d.str()};
}

Outcome double_refresh_risk() {
  FuzzConfig c;
  c.seed = 3;
  c.candidate_budget = 200;
  c.stop_after_first_hit = true;
  const auto risky = double_refresh_test(factory_for(ddr4_profile(1), make_preset("case_one")), c);

  VulnerabilityParams v;
  v.threshold_mean = 800'000;
  v.threshold_spread = 50'000;
  const auto strong = std::make_shared<const VulnerabilityProfile>(build_vulnerability(DramGeometry{}, v));
  FuzzConfig safe_cfg;
  safe_cfg.seed = 3;
  safe_cfg.candidate_budget = 20;
  const auto safe = double_refresh_test(factory_for(strong, make_preset("none")), safe_cfg);

  std::ostringstream d;
  d << "default profile bypassed: " << (risky.bypassed() ? "yes" : "no");
  if (risky.bypassed()) d << " by candidate " << risky.campaign.best()->index;
  d << "; strong profile min threshold " << safe.min_threshold << " > bound " << safe.pressure_bound
    << ", flips " << safe.campaign.unique_flips;
  return {risky.bypassed() && safe.provably_safe() && !safe.bypassed(), d.str()};
}

std::set<std::tuple<BankIndex, RowIndex, std::uint32_t>> naive_flips(const VulnerabilityProfile& profile,
                                                                     const TimingParams& timing,
                                                                     const std::vector<Command>& commands) {
  const auto& g = profile.geometry();
  std::map<std::pair<BankIndex, RowIndex>, std::uint64_t> counter;
  std::set<std::tuple<BankIndex, RowIndex, std::uint32_t>> flipped;
  auto disturb = [&](BankIndex b, RowIndex r) {
    const auto n = ++counter[{b, r}];
    for (const auto& c : profile.cells(b, r))
      if (n >= c.threshold) flipped.insert({b, r, c.bit});
  };
  const auto slots = static_cast<std::uint64_t>(timing.slot_count());
  std::uint64_t refs = 0;
  for (const auto& c : commands) {
    if (c.kind == CommandKind::act) {
      if (c.row > 0) disturb(c.bank, c.row - 1);
      if (c.row + 1 < g.rows_per_bank) disturb(c.bank, c.row + 1);
    } else if (c.kind == CommandKind::ref) {
      const auto chunk = refs++ % slots;
      for (BankIndex b = 0; b < g.banks; ++b)
        for (auto r = chunk * g.rows_per_bank / slots; r < (chunk + 1) * g.rows_per_bank / slots; ++r)
          counter[{b, static_cast<RowIndex>(r)}] = 0;
    }
  }
  return flipped;
}

Outcome counter_oracle() {
  DramGeometry g;
  g.banks = 2;
  g.rows_per_bank = 32;
  g.columns_per_row = 16;
  TimingParams t;
  t.refresh_slots = 16;
  Rng rng(2024);
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<LocatedCell> cells;
    for (BankIndex b = 0; b < g.banks; ++b)
      for (RowIndex r = 0; r < g.rows_per_bank; ++r)
        if (rng.bernoulli(0.5))
          cells.push_back({b, r, {static_cast<std::uint32_t>(rng.below(g.bits_per_row())),
                                  static_cast<std::uint32_t>(rng.between(1, 400)), FlipDirection::one_to_zero}});
    const auto profile = std::make_shared<const VulnerabilityProfile>(VulnerabilityProfile::from_cells(g, cells));
    std::vector<Command> cmds;
    const auto n = rng.between(1, 10'000);
    for (std::int64_t i = 0; i < n; ++i) {
      const auto k = rng.below(20);
      if (k < 17)
        cmds.push_back(Command::act(static_cast<BankIndex>(rng.below(g.banks)),
                                    static_cast<RowIndex>(rng.below(g.rows_per_bank))));
      else if (k == 17)
        cmds.push_back(Command::ref());
      else
        cmds.push_back(Command::pre(static_cast<BankIndex>(rng.below(g.banks))));
    }
    DramSimulator sim(g, t, profile);
    for (const auto& c : cmds) sim.issue(c);
    std::set<std::tuple<BankIndex, RowIndex, std::uint32_t>> got;
    for (const auto& f : sim.read_all_flips()) got.insert({f.bank, f.row, f.bit});
    agree += got == naive_flips(*profile, t, cmds);
  }
  return {agree == 1000, std::to_string(agree) + "/1000 sequences agree"};
}

Outcome mac_codec() {
  int defined = 0, round_trips = 0, rejected = 0;
  for (int b = 0; b < 256; ++b) {
    const auto byte = static_cast<std::uint8_t>(b);
    try {
      const auto field = decode_mac_byte(byte);
      ++defined;
      round_trips += encode_mac(field) == byte;
    } catch (const DecodeError&) {
      ++rejected;
    }
  }
  const auto targeted = ptrr_controller_mode({MacLimit{400'000}, 0, true});
  const auto untested = ptrr_controller_mode({MacUntested{}, 0, true});
  const bool modes = targeted == PtrrMode{PtrrTargeted{400'000}} && untested == PtrrMode{PtrrDoubleRefresh{}};
  std::ostringstream d;
  d << defined << " defined, " << round_trips << " round trips, " << rejected << " rejected; 400K+flag -> "
    << to_string(targeted) << ", untested -> " << to_string(untested);
  return {defined == 16 && round_trips == 16 && rejected == 240 && modes, d.str()};
}

Outcome refresh_estimator() {
  bool pass = true;
  double worst = 0;
  std::ostringstream d;
  for (double refi : {3900.0, 7800.0, 15600.0}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      TraceParams p;
      p.t_refi_ns = refi;
      p.jitter_ns = 50;
      p.seed = seed;
      const auto e = estimate_refresh_interval(synthesize_trace(p, 30 * refi));
      const double err = std::abs(e.interval_ns - refi) / refi;
      worst = std::max(worst, err);
      pass &= err < 0.02;
      const auto expect = refi == 7800 ? RefreshClass::standard
                          : refi == 3900 ? RefreshClass::double_rate
                                         : RefreshClass::other;
      pass &= e.classification == expect;
    }
  }
  d << "worst relative error " << worst * 100 << "% over 30 traces";
  return {pass, d.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome cli_determinism() {
  const auto dir = fs::temp_directory_path() / "trrsim-acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({"seed": 21, "mitigation": {"preset": "case_one", "hidden": true}})";
  }
  const std::vector<std::vector<std::string>> commands{
      {"fuzz", "--budget", "30", "--threads", "2"}, {"grid"}, {"sweep", "--n-max", "8"},
      {"min-act", "--rows", "4097,4101"}, {"distance", "--d", "3,8,12"}, {"repeat", "--trials", "3"},
      {"double-refresh", "--budget", "10"}};
  std::size_t compared = 0, identical = 0;
  bool ran = true;
  for (const auto& c : commands) {
    for (const char* out : {"a", "b"}) {
      std::vector<std::string> args{"trrsim"};
      args.insert(args.end(), c.begin(), c.end());
      args.insert(args.end(), {"--config", (dir / "config.json").string(), "--out", (dir / out).string()});
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream sink;
      ran &= cli::run_cli(static_cast<int>(argv.size()), argv.data(), sink, sink) == 0;
    }
  }
  for (const auto& entry : fs::directory_iterator(dir / "a"))
    if (entry.path().extension() == ".csv") {
      ++compared;
      identical += slurp(entry.path()) == slurp(dir / "b" / entry.path().filename());
    }
  fs::remove_all(dir);
  return {ran && compared == commands.size() && identical == compared,
          std::to_string(identical) + "/" + std::to_string(compared) + " CSV files byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"sampler-size inference", sampler_inference},
      {"case_one grid shape", case_one_shape},
      {"overflow thresholds", overflow_thresholds},
      {"cardinality cap", cardinality_constant},
      {"fuzzer effectiveness", fuzzer_effectiveness},
      {"double-refresh residual risk", double_refresh_risk},
      {"counter oracle equivalence", counter_oracle},
      {"MAC codec", mac_codec},
      {"refresh-interval estimator", refresh_estimator},
      {"CLI determinism", cli_determinism},
  };
  // optional arguments select criteria by number
  std::set<std::size_t> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::stoul(argv[a]));
  int failed = 0, ran = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!selected.empty() && !selected.contains(i + 1)) continue;
    ++ran;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (ran - failed) << "/" << ran << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
