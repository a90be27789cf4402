#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "trrsim/analysis.hpp"
#include "trrsim/error.hpp"
#include "trrsim/fuzzer.hpp"
#include "trrsim/refresh_detect.hpp"
#include "trrsim/run_config.hpp"
#include "trrsim/spd.hpp"

namespace trrsim::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kOutputEnv = "TRRSIM_OUTPUT_DIR";

/// Raised for runtime failures that are not configuration problems.
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
};

struct FuzzOptions {
  std::uint64_t budget = 0;
  std::uint32_t threads = 0;
  std::uint32_t min_cardinality = 0;
  std::uint32_t max_cardinality = 0;
  bool stop_after_first_hit = false;
  bool no_location_control = false;
  bool no_sync = false;
  std::string refresh_mode;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv);

 private:
  void add_common(CLI::App* sub);
  void add_fuzz_options(CLI::App* sub, FuzzOptions& o);
  void load();
  fs::path output_dir() const;
  void write(const std::string& name, const std::string& content) const;
  void write_json(const std::string& name, const nlohmann::json& doc) const;
  AnalysisWindow window_from(const nlohmann::json& section) const;
  SweepParams sweep_from(const nlohmann::json& section) const;
  FuzzConfig fuzz_config(const std::string& section, const FuzzOptions& o) const;
  nlohmann::json run_header(const std::string& experiment) const;
  nlohmann::json pattern_addresses(const HammerPattern& p) const;

  void cmd_fuzz();
  void cmd_grid();
  void cmd_sweep();
  void cmd_min_act();
  void cmd_distance();
  void cmd_repeat();
  void cmd_double_refresh();
  void cmd_spd();
  void cmd_detect_refresh();
  void cmd_ptrr();

  std::ostream& out_;
  std::ostream& err_;
  RunConfig config_;
  std::shared_ptr<const VulnerabilityProfile> profile_;

  Common common_;
  FuzzOptions fuzz_opts_;
  FuzzOptions double_opts_;
  std::vector<std::uint32_t> grid_n_;
  std::vector<std::uint32_t> grid_r_;
  std::uint64_t grid_hammers_ = 0;
  std::uint32_t grid_rounds_ = 0;
  std::uint32_t sweep_n_min_ = 0;
  std::uint32_t sweep_n_max_ = 0;
  std::uint64_t acts_ = 0;
  std::string mode_;
  bool no_sync_ = false;
  std::vector<RowIndex> rows_;
  std::uint64_t min_act_limit_ = 0;
  std::uint32_t distance_n_ = 0;
  std::vector<std::uint32_t> distance_d_;
  std::vector<RowIndex> aggressors_;
  std::int64_t target_ = -1;
  std::uint32_t trials_ = 0;
  std::string spd_file_;
  std::string generation_;
  std::string trace_file_;
  double t_refi_ = 0;
  double jitter_ = -1;
  double periods_ = 0;
  std::string mac_;
};

void Runner::add_common(CLI::App* sub) {
  sub->add_option("--config", common_.config_path, "Run configuration (JSON)");
  sub->add_option("--seed", common_.seed, "Seed for the profile, the campaign and mitigation randomness");
  sub->add_option("--out", common_.out_dir, std::string("Output directory (default: $") + kOutputEnv +
                                                 ", then the config's output_dir)");
}

void Runner::add_fuzz_options(CLI::App* sub, FuzzOptions& o) {
  sub->add_option("--budget", o.budget, "Number of candidate patterns");
  sub->add_option("--threads", o.threads, "Worker threads");
  sub->add_option("--min-cardinality", o.min_cardinality, "Smallest pattern cardinality");
  sub->add_option("--max-cardinality", o.max_cardinality, "Largest pattern cardinality");
  sub->add_flag("--stop-after-first-hit", o.stop_after_first_hit, "Stop at the first flipping candidate");
  sub->add_flag("--no-location-control", o.no_location_control, "Draw rows from the whole bank");
  sub->add_flag("--no-sync", o.no_sync, "Continue the round-robin across REFs instead of restarting it");
}

void Runner::load() {
  if (!common_.config_path.empty()) config_ = RunConfig::load(common_.config_path);
  if (common_.seed != 0) config_.apply_seed(common_.seed);
}

std::shared_ptr<const VulnerabilityProfile> ensure_profile(std::shared_ptr<const VulnerabilityProfile>& cache,
                                                           const RunConfig& config) {
  if (!cache) cache = config.build_profile();
  return cache;
}

fs::path Runner::output_dir() const {
  if (!common_.out_dir.empty()) return common_.out_dir;
  if (const char* env = std::getenv(kOutputEnv); env != nullptr && *env != '\0') return env;
  return config_.output_dir;
}

void Runner::write(const std::string& name, const std::string& content) const {
  const auto dir = output_dir();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  f << content;
  if (!f) throw RuntimeFailure("write to '" + (dir / name).string() + "' failed");
}

void Runner::write_json(const std::string& name, const nlohmann::json& doc) const { write(name, doc.dump(2) + "\n"); }

AnalysisWindow Runner::window_from(const nlohmann::json& section) const {
  AnalysisWindow w;
  if (section.contains("window")) {
    const auto& j = section["window"];
    w.bank = j.value("bank", w.bank);
    if (j.contains("start") && !j["start"].is_null()) w.start = j["start"].get<RowIndex>();
    w.rows = j.value("rows", w.rows);
    w.full_bank = j.value("full_bank", w.full_bank);
  }
  if (w.bank >= config_.geometry.banks) throw ConfigError("window bank out of range");
  if (std::uint64_t{w.resolved_start(config_.geometry)} + w.rows > config_.geometry.rows_per_bank)
    throw ConfigError("window extends past the bank");
  return w;
}

SweepParams Runner::sweep_from(const nlohmann::json& section) const {
  SweepParams p;
  p.window = window_from(section);
  p.activations_per_aggressor = section.value("activations_per_aggressor", p.activations_per_aggressor);
  if (section.contains("mode")) p.mode = refresh_mode_from_string(section["mode"].get<std::string>());
  p.sync_to_refresh = section.value("sync_to_refresh", p.sync_to_refresh);
  if (acts_ != 0) p.activations_per_aggressor = acts_;
  if (!mode_.empty()) p.mode = refresh_mode_from_string(mode_);
  if (no_sync_) p.sync_to_refresh = false;
  return p;
}

FuzzConfig Runner::fuzz_config(const std::string& section, const FuzzOptions& o) const {
  auto doc = config_.experiment(section);
  if (!doc.contains("seed")) doc["seed"] = config_.seed;
  auto c = FuzzConfig::from_json(doc);
  if (o.budget != 0) c.candidate_budget = o.budget;
  if (o.threads != 0) c.threads = o.threads;
  if (o.min_cardinality != 0) c.min_cardinality = o.min_cardinality;
  if (o.max_cardinality != 0) c.max_cardinality = o.max_cardinality;
  if (o.stop_after_first_hit) c.stop_after_first_hit = true;
  if (o.no_location_control) c.location_control = false;
  if (o.no_sync) c.sync_to_refresh = false;
  if (!o.refresh_mode.empty()) c.refresh_mode = refresh_mode_from_string(o.refresh_mode);
  c.validate(config_.geometry, config_.timing);
  return c;
}

nlohmann::json Runner::run_header(const std::string& experiment) const {
  return {{"experiment", experiment}, {"config", config_.to_json()}};
}

nlohmann::json Runner::pattern_addresses(const HammerPattern& p) const {
  if (!config_.mapping) return nullptr;
  auto out = nlohmann::json::array();
  for (auto r : p.aggressors) {
    std::ostringstream hex;
    hex << "0x" << std::hex << config_.mapping->dram_to_phys({p.bank, r, 0});
    out.push_back(hex.str());
  }
  return out;
}

void Runner::cmd_fuzz() {
  const auto fc = fuzz_config("fuzz", fuzz_opts_);
  const auto result = fuzz_campaign(config_.sim_factory(ensure_profile(profile_, config_)), fc);
  auto doc = run_header("fuzz");
  doc["fuzz"] = fc.to_json();
  doc["result"] = result.to_json();
  if (const auto* best = result.best()) doc["result"]["best_addresses"] = pattern_addresses(best->pattern);
  write("fuzz.csv", result.to_csv());
  write_json("fuzz.json", doc);
  out_ << "fuzz: evaluated " << result.evaluated.size() << " candidates, " << result.ranked.size()
       << " bypassing";
  if (const auto* best = result.best())
    out_ << "; best pattern " << classify_pattern(best->pattern) << " (" << best->flips << " flips, candidate "
         << best->index << ")";
  else
    out_ << "; no pattern flipped a bit";
  out_ << '\n';
}

void Runner::cmd_grid() {
  const auto section = config_.experiment("grid");
  GridParams p;
  p.window = window_from(section);
  if (section.contains("n_values")) p.n_values = section["n_values"].get<std::vector<std::uint32_t>>();
  if (section.contains("r_values")) p.r_values = section["r_values"].get<std::vector<std::uint32_t>>();
  p.hammers_per_round = section.value("hammers_per_round", p.hammers_per_round);
  p.rounds = section.value("rounds", p.rounds);
  if (section.value("hammer_count", std::string("per_aggressor")) == "total") p.count = HammerCount::total;
  if (!grid_n_.empty()) p.n_values = grid_n_;
  if (!grid_r_.empty()) p.r_values = grid_r_;
  if (grid_hammers_ != 0) p.hammers_per_round = grid_hammers_;
  if (grid_rounds_ != 0) p.rounds = grid_rounds_;
  const auto grid = refresh_grid(config_.sim_factory(ensure_profile(profile_, config_)), p);
  const auto inference = infer_sampler_size(grid);
  auto doc = run_header("grid");
  doc["grid"] = grid.to_json();
  doc["inference"] = inference.to_json();
  write("grid.csv", grid.to_csv());
  write_json("grid.json", doc);
  out_ << "grid: " << grid.n_values.size() << "x" << grid.r_values.size() << " cells; sampler size ";
  if (inference.estimate)
    out_ << "estimate " << *inference.estimate;
  else
    out_ << "inconclusive";
  out_ << '\n';
}

void Runner::cmd_sweep() {
  const auto section = config_.experiment("sweep");
  const auto p = sweep_from(section);
  std::uint32_t lo = section.value("n_min", 1u);
  std::uint32_t hi = section.value("n_max", 20u);
  if (sweep_n_min_ != 0) lo = sweep_n_min_;
  if (sweep_n_max_ != 0) hi = sweep_n_max_;
  if (lo < 1 || lo > hi) throw ConfigError("sweep: need 1 <= n_min <= n_max");
  std::vector<std::uint32_t> ns;
  for (auto n = lo; n <= hi; ++n) ns.push_back(n);
  const auto result = aggressor_sweep(config_.sim_factory(ensure_profile(profile_, config_)), ns, p);
  std::optional<std::uint32_t> first;
  for (const auto& [n, flips] : result)
    if (flips > 0 && !first) first = n;
  auto doc = run_header("sweep");
  doc["mode"] = to_string(p.mode);
  doc["activations_per_aggressor"] = p.activations_per_aggressor;
  doc["sync_to_refresh"] = p.sync_to_refresh;
  doc["first_flipping_n"] = first ? nlohmann::json(*first) : nlohmann::json(nullptr);
  write("sweep.csv", sweep_csv("n", result));
  write_json("sweep.json", doc);
  out_ << "sweep: n " << lo << ".." << hi << ", first flipping n = ";
  if (first)
    out_ << *first;
  else
    out_ << "none";
  out_ << '\n';
}

void Runner::cmd_min_act() {
  const auto section = config_.experiment("min-act");
  const auto w = window_from(section);
  std::vector<RowIndex> rows = rows_;
  if (rows.empty() && section.contains("rows")) rows = section["rows"].get<std::vector<RowIndex>>();
  if (rows.empty())
    for (RowIndex r = 0; r < 8; ++r) rows.push_back(w.pattern_base(config_.geometry) + 1 + 2 * r);
  std::uint64_t limit = section.value("limit", std::uint64_t{1'000'000});
  if (min_act_limit_ != 0) limit = min_act_limit_;
  const auto result = min_activation_sweep(config_.sim_factory(ensure_profile(profile_, config_)), w.bank, rows, limit);
  std::size_t found = 0;
  std::optional<std::uint64_t> lowest;
  for (const auto& [row, hc] : result) {
    if (!hc) continue;
    ++found;
    if (!lowest || *hc < *lowest) lowest = hc;
  }
  auto doc = run_header("min-act");
  doc["bank"] = w.bank;
  doc["limit"] = limit;
  doc["rows_with_flips"] = found;
  doc["lowest_hc_first"] = lowest ? nlohmann::json(*lowest) : nlohmann::json(nullptr);
  write("min_act.csv", min_activation_csv(result));
  write_json("min_act.json", doc);
  out_ << "min-act: " << found << " of " << result.size() << " rows flip";
  if (lowest) out_ << ", lowest HC_first " << *lowest << " per aggressor";
  out_ << '\n';
}

void Runner::cmd_distance() {
  const auto section = config_.experiment("distance");
  const auto p = sweep_from(section);
  std::uint32_t n = section.value("n", 4u);
  if (distance_n_ != 0) n = distance_n_;
  std::vector<std::uint32_t> ds = distance_d_;
  if (ds.empty() && section.contains("d_values")) ds = section["d_values"].get<std::vector<std::uint32_t>>();
  if (ds.empty())
    for (std::uint32_t d = 1; d <= 16; ++d) ds.push_back(d);
  const auto result = distance_sweep(config_.sim_factory(ensure_profile(profile_, config_)), n, ds, p);
  std::uint32_t best_d = 0;
  std::size_t best = 0;
  for (const auto& [d, flips] : result)
    if (flips > best) best = flips, best_d = d;
  auto doc = run_header("distance");
  doc["n"] = n;
  doc["mode"] = to_string(p.mode);
  doc["activations_per_aggressor"] = p.activations_per_aggressor;
  write("distance.csv", sweep_csv("d", result));
  write_json("distance.json", doc);
  out_ << "distance: n = " << n << ", " << result.size() << " distances";
  if (best > 0)
    out_ << ", most flips at d = " << best_d << " (" << best << ")";
  else
    out_ << ", no flips";
  out_ << '\n';
}

void Runner::cmd_repeat() {
  const auto section = config_.experiment("repeat");
  auto p = sweep_from(section);
  const auto base = p.window.pattern_base(config_.geometry);
  HammerPattern pattern;
  pattern.bank = p.window.bank;
  pattern.aggressors = aggressors_;
  if (pattern.aggressors.empty() && section.contains("aggressors"))
    pattern.aggressors = section["aggressors"].get<std::vector<RowIndex>>();
  if (pattern.aggressors.empty()) pattern.aggressors = {base, base + 2};
  for (auto r : pattern.aggressors)
    if (r >= config_.geometry.rows_per_bank) throw ConfigError("repeat: aggressor row out of range");
  RowIndex target = section.value("target", pattern.aggressors.front() + 1);
  if (target_ >= 0) target = static_cast<RowIndex>(target_);
  std::uint32_t trials = section.value("trials", 100u);
  if (trials_ != 0) trials = trials_;
  const auto result =
      repeatability_test(config_.trial_factory(ensure_profile(profile_, config_)), pattern, target, trials, p);
  auto doc = run_header("repeat");
  doc["pattern"] = pattern.to_json();
  doc["target_row"] = target;
  doc["result"] = result.to_json();
  write("repeat.csv", result.to_csv());
  write_json("repeat.json", doc);
  out_ << "repeat: row " << target << " flipped in " << result.reproduced << " of " << result.trials
       << " trials, " << result.spurious_flips << " other flips\n";
}

void Runner::cmd_double_refresh() {
  const auto fc = fuzz_config("double-refresh", double_opts_);
  const auto result = double_refresh_test(config_.sim_factory(ensure_profile(profile_, config_)), fc);
  auto doc = run_header("double-refresh");
  doc["fuzz"] = fc.to_json();
  doc["result"] = result.to_json();
  write("double_refresh.csv", result.campaign.to_csv());
  write_json("double_refresh.json", doc);
  out_ << "double-refresh: " << (result.bypassed() ? "bypassed" : "no bypass") << " after "
       << result.campaign.evaluated.size() << " candidates";
  if (const auto* best = result.campaign.best())
    out_ << "; best pattern " << classify_pattern(best->pattern) << " (" << best->flips << " flips)";
  if (result.provably_safe()) out_ << "; lowest threshold exceeds the pressure bound " << result.pressure_bound;
  out_ << '\n';
}

DdrGeneration generation_or(const std::string& s, DdrGeneration fallback) {
  return s.empty() ? fallback : ddr_generation_from_string(s);
}

std::vector<std::uint8_t> read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void Runner::cmd_spd() {
  if (spd_file_.empty()) throw ConfigError("spd: --file is required");
  const auto bytes = read_binary(spd_file_);
  const auto gen = generation_or(generation_, config_.vulnerability.generation);
  const auto doc = describe_spd(bytes, gen);
  write_json("spd.json", doc);
  out_ << doc.dump() << '\n';
}

void Runner::cmd_detect_refresh() {
  const auto section = config_.experiment("detect-refresh");
  LatencyTrace trace;
  std::string source;
  if (!trace_file_.empty()) {
    std::ifstream in(trace_file_);
    if (!in) throw ConfigError("cannot open trace '" + trace_file_ + "'");
    trace = LatencyTrace::read_csv(in);
    source = trace_file_;
  } else {
    TraceParams tp;
    tp.seed = config_.seed;
    tp.t_rfc_ns = static_cast<double>(config_.timing.t_rfc_ns);
    tp.t_refi_ns = section.value("t_refi_ns", static_cast<double>(config_.timing.t_refi_ns));
    tp.jitter_ns = section.value("jitter_ns", 50.0);
    tp.base_latency_ns = section.value("base_latency_ns", tp.base_latency_ns);
    tp.sample_period_ns = section.value("sample_period_ns", tp.sample_period_ns);
    double periods = section.value("periods", 40.0);
    if (t_refi_ > 0) tp.t_refi_ns = t_refi_;
    if (jitter_ >= 0) tp.jitter_ns = jitter_;
    if (periods_ > 0) periods = periods_;
    trace = synthesize_trace(tp, periods * tp.t_refi_ns);
    std::ostringstream csv;
    trace.write_csv(csv);
    write("trace.csv", csv.str());
    source = "synthetic";
  }
  DetectParams dp;
  dp.k_sigma = section.value("k_sigma", dp.k_sigma);
  dp.window_samples = section.value("window_samples", dp.window_samples);
  dp.standard_refi_ns = static_cast<double>(config_.timing.t_refi_ns);
  const auto e = estimate_refresh_interval(trace, dp);
  auto doc = run_header("detect-refresh");
  doc["source"] = source;
  doc["samples"] = trace.samples.size();
  doc["estimate"] = e.to_json();
  write_json("detect_refresh.json", doc);
  out_ << "detect-refresh: t_refi " << e.interval_ns << " ns (" << e.label() << "), " << e.peaks << " peaks\n";
}

std::uint8_t parse_byte(const std::string& s) {
  std::size_t used = 0;
  unsigned long v = 0;
  try {
    v = std::stoul(s, &used, 0);
  } catch (const std::exception&) {
    throw ConfigError("'" + s + "' is not a byte value");
  }
  if (used != s.size() || v > 0xff) throw ConfigError("'" + s + "' is not a byte value");
  return static_cast<std::uint8_t>(v);
}

void Runner::cmd_ptrr() {
  MacField mac;
  const auto gen = generation_or(generation_, config_.vulnerability.generation);
  if (!mac_.empty())
    mac = decode_mac_byte(parse_byte(mac_));
  else if (!spd_file_.empty())
    mac = decode_mac(read_binary(spd_file_), gen);
  else
    throw ConfigError("ptrr: give --mac or --file");
  const auto mode = ptrr_controller_mode(mac);

  // the controller reaction is layered on top of the module's own mitigation
  auto mitigation = config_.mitigation;
  if (const auto extra = ptrr_mitigation(mode)) mitigation.ptrr = extra->ptrr;
  auto p = sweep_from(config_.experiment("ptrr"));
  if (std::holds_alternative<PtrrDoubleRefresh>(mode)) p.mode = RefreshMode::double_rate;
  const auto base = p.window.pattern_base(config_.geometry);
  const auto factory = config_.sim_factory_with(ensure_profile(profile_, config_), mitigation);
  auto sim = factory();
  HammerSchedule s;
  s.bank = p.window.bank;
  s.aggressors = {base, base + 2};
  s.activations_per_aggressor = p.activations_per_aggressor;
  s.sync_to_refresh = p.sync_to_refresh;
  const auto report = hammer_with_refresh(*sim, s, p.mode);
  const auto flips = p.window.scan(*sim);

  auto doc = run_header("ptrr");
  doc["mac"] = {{"value", to_string(mac.value)},
                {"tmaw", mac.tmaw_code},
                {"ptrr_flag", mac.ptrr_flag},
                {"compliance", to_string(classify_compliance(mac))}};
  doc["controller_mode"] = to_string(mode);
  doc["refresh_mode"] = to_string(p.mode);
  doc["report"] = report.to_json();
  doc["report"]["flips_in_window"] = flips.size();
  write_json("ptrr.json", doc);
  out_ << "ptrr: MAC " << to_string(mac.value) << (mac.ptrr_flag ? " with" : " without") << " pTRR flag -> "
       << to_string(mode) << ", double-sided hammer flips " << flips.size() << " bits\n";
}

int Runner::run(int argc, const char* const* argv) {
  CLI::App app{"DRAM RowHammer simulator with TRR models, a many-sided pattern fuzzer and analysis experiments",
               "trrsim"};
  app.require_subcommand(1);

  auto* fuzz = app.add_subcommand("fuzz", "Fuzz campaign against the configured mitigation");
  add_common(fuzz);
  add_fuzz_options(fuzz, fuzz_opts_);
  fuzz->add_option("--refresh-mode", fuzz_opts_.refresh_mode, "standard, double or disabled");

  auto* grid = app.add_subcommand("grid", "Flips per (aggressor count, REFs per round)");
  add_common(grid);
  grid->add_option("--n", grid_n_, "Aggressor counts")->delimiter(',');
  grid->add_option("--r", grid_r_, "REFs per round")->delimiter(',');
  grid->add_option("--hammers", grid_hammers_, "Hammers per round");
  grid->add_option("--rounds", grid_rounds_, "Rounds");

  auto* sweep = app.add_subcommand("sweep", "Flips per strided aggressor count");
  add_common(sweep);
  sweep->add_option("--n-min", sweep_n_min_, "Smallest aggressor count");
  sweep->add_option("--n-max", sweep_n_max_, "Largest aggressor count");
  sweep->add_option("--acts", acts_, "ACTs per aggressor");
  sweep->add_option("--mode", mode_, "standard, double or disabled");
  sweep->add_flag("--no-sync", no_sync_, "Do not restart the round-robin after REFs");

  auto* min_act = app.add_subcommand("min-act", "Smallest double-sided hammer count per row, refresh disabled");
  add_common(min_act);
  min_act->add_option("--rows", rows_, "Victim rows")->delimiter(',');
  min_act->add_option("--limit", min_act_limit_, "Largest ACT count per aggressor to try");

  auto* distance = app.add_subcommand("distance", "Flips of pair-based patterns per inter-pair distance");
  add_common(distance);
  distance->add_option("--n", distance_n_, "Aggressor count (even)");
  distance->add_option("--d", distance_d_, "Distances")->delimiter(',');
  distance->add_option("--acts", acts_, "ACTs per aggressor");
  distance->add_option("--mode", mode_, "standard, double or disabled");
  distance->add_flag("--no-sync", no_sync_, "Do not restart the round-robin after REFs");

  auto* repeat = app.add_subcommand("repeat", "How often a pattern flips its target row on fresh runs");
  add_common(repeat);
  repeat->add_option("--aggressors", aggressors_, "Aggressor rows")->delimiter(',');
  repeat->add_option("--target", target_, "Target row");
  repeat->add_option("--trials", trials_, "Number of trials");
  repeat->add_option("--acts", acts_, "ACTs per aggressor");
  repeat->add_option("--mode", mode_, "standard, double or disabled");

  auto* dbl = app.add_subcommand("double-refresh", "Fuzz campaign with the refresh rate doubled");
  add_common(dbl);
  add_fuzz_options(dbl, double_opts_);

  auto* spd = app.add_subcommand("spd", "Decode the MAC byte of a raw SPD dump");
  add_common(spd);
  spd->add_option("--file", spd_file_, "SPD dump (binary)");
  spd->add_option("--gen", generation_, "ddr3 or ddr4");

  auto* detect = app.add_subcommand("detect-refresh", "Estimate the refresh interval from a latency trace");
  add_common(detect);
  detect->add_option("--trace", trace_file_, "Trace CSV (timestamp_ns,latency_ns); synthesized when absent");
  detect->add_option("--t-refi", t_refi_, "Refresh interval of the synthesized trace (ns)");
  detect->add_option("--jitter", jitter_, "Jitter of the synthesized trace (ns)");
  detect->add_option("--periods", periods_, "Length of the synthesized trace in refresh intervals");

  auto* ptrr = app.add_subcommand("ptrr", "Controller reaction to a MAC value and its effect on a hammer");
  add_common(ptrr);
  ptrr->add_option("--mac", mac_, "MAC byte, e.g. 0x83");
  ptrr->add_option("--file", spd_file_, "SPD dump (binary)");
  ptrr->add_option("--gen", generation_, "ddr3 or ddr4");
  ptrr->add_option("--acts", acts_, "ACTs per aggressor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out_ << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out_ << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err_ << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    load();
    if (fuzz->parsed()) cmd_fuzz();
    else if (grid->parsed()) cmd_grid();
    else if (sweep->parsed()) cmd_sweep();
    else if (min_act->parsed()) cmd_min_act();
    else if (distance->parsed()) cmd_distance();
    else if (repeat->parsed()) cmd_repeat();
    else if (dbl->parsed()) cmd_double_refresh();
    else if (spd->parsed()) cmd_spd();
    else if (detect->parsed()) cmd_detect_refresh();
    else if (ptrr->parsed()) cmd_ptrr();
  } catch (const ConfigError& e) {
    err_ << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const IndexError& e) {
    err_ << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    err_ << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err_ << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Runner runner(out, err);
  return runner.run(argc, argv);
}

}  // namespace trrsim::cli
