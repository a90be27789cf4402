#include "trrsim/refresh_detect.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "trrsim/error.hpp"
#include "trrsim/rng.hpp"

namespace trrsim {

void LatencyTrace::write_csv(std::ostream& out) const {
  out << "timestamp_ns,latency_ns\n";
  const auto old = out.precision(17);
  for (const auto& s : samples) out << s.timestamp_ns << ',' << s.latency_ns << '\n';
  out.precision(old);
}

LatencyTrace LatencyTrace::read_csv(std::istream& in) {
  LatencyTrace t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("timestamp", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ConfigError("trace line " + std::to_string(lineno) + ": expected two fields");
    LatencySample s;
    try {
      std::size_t used = 0;
      s.timestamp_ns = std::stod(line.substr(0, comma), &used);
      s.latency_ns = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("trace line " + std::to_string(lineno) + ": not a number");
    }
    if (!t.samples.empty() && !(s.timestamp_ns > t.samples.back().timestamp_ns))
      throw ConfigError("trace line " + std::to_string(lineno) + ": timestamps must increase");
    t.samples.push_back(s);
  }
  return t;
}

void TraceParams::validate() const {
  if (!(base_latency_ns > 0)) throw ConfigError("trace: base_latency_ns must be > 0");
  if (!(t_rfc_ns > 0)) throw ConfigError("trace: t_rfc_ns must be > 0");
  if (!(t_refi_ns > t_rfc_ns)) throw ConfigError("trace: t_refi_ns must exceed t_rfc_ns");
  if (!(sample_period_ns > 0)) throw ConfigError("trace: sample_period_ns must be > 0");
  if (!(jitter_ns >= 0) || !(jitter_ns < t_refi_ns / 10)) throw ConfigError("trace: jitter must lie in [0, t_refi / 10)");
  if (!(phase_ns >= 0)) throw ConfigError("trace: phase_ns must be >= 0");
}

LatencyTrace synthesize_trace(const TraceParams& params, double duration_ns) {
  params.validate();
  LatencyTrace trace;
  if (!(duration_ns > 0)) return trace;
  Rng rng(params.seed);
  const auto count = static_cast<std::uint64_t>(std::ceil(duration_ns / params.sample_period_ns));
  trace.samples.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * params.sample_period_ns;
    double latency = params.base_latency_ns;
    if (t >= params.phase_ns) {
      const double into = std::fmod(t - params.phase_ns, params.t_refi_ns);
      if (into < params.t_rfc_ns) latency += params.t_rfc_ns - into;
    }
    if (params.jitter_ns > 0) latency += std::abs(rng.normal(0.0, params.jitter_ns));
    trace.samples.push_back({t, latency});
  }
  return trace;
}

std::string to_string(RefreshClass c) {
  switch (c) {
    case RefreshClass::standard: return "standard";
    case RefreshClass::double_rate: return "double";
    case RefreshClass::other: return "other";
  }
  return "other";
}

std::string RefreshEstimate::label() const {
  if (classification != RefreshClass::other) return to_string(classification);
  std::ostringstream out;
  out << "other(" << interval_ns << ")";
  return out.str();
}

nlohmann::json RefreshEstimate::to_json() const {
  return {{"t_refi_ns", interval_ns},
          {"confidence", confidence},
          {"peaks", peaks},
          {"classification", label()}};
}

namespace {

double median(std::vector<double> v) {
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lo + hi) / 2;
}

}  // namespace

RefreshEstimate estimate_refresh_interval(const LatencyTrace& trace, const DetectParams& params) {
  if (trace.samples.size() < 3) throw InsufficientDataError("trace has fewer than 3 samples");
  const std::size_t w = std::max<std::size_t>(1, params.window_samples);
  if (trace.samples.size() < w) throw InsufficientDataError("trace shorter than the smoothing window");
  // jitter only adds latency, so the floor is the base latency
  double baseline = trace.samples.front().latency_ns;
  for (const auto& s : trace.samples) baseline = std::min(baseline, s.latency_ns);
  std::vector<double> level(trace.samples.size() - w + 1);
  double sum = 0;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    sum += trace.samples[i].latency_ns - baseline;
    if (i >= w) sum -= trace.samples[i - w].latency_ns - baseline;
    if (i + 1 >= w) level[i + 1 - w] = sum / static_cast<double>(w);
  }
  double center = 0;
  double sigma = 0;
  if (w == 1) {
    // single samples: the median excess is the half-normal median 0.6745 sigma
    sigma = median(level) / 0.6745;
  } else {
    // window means are close to normal: median and MAD
    center = median(level);
    std::vector<double> dev(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) dev[i] = std::abs(level[i] - center);
    sigma = 1.4826 * median(std::move(dev));
  }
  const double threshold = center + params.k_sigma * sigma;

  // consecutive windows above the threshold belong to one REF; a sample that
  // stalled on it completes at the end of the REF, so the peak time is taken
  // from the highest sample covered by those windows
  std::vector<double> peaks;
  std::size_t i = 0;
  while (i < level.size()) {
    if (!(level[i] > threshold)) {
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < level.size() && level[end] > threshold) ++end;
    std::size_t top = i;
    for (std::size_t j = i; j < end + w - 1; ++j)
      if (trace.samples[j].latency_ns > trace.samples[top].latency_ns) top = j;
    peaks.push_back(trace.samples[top].timestamp_ns + trace.samples[top].latency_ns - baseline);
    i = end;
  }
  if (peaks.size() < 3)
    throw InsufficientDataError("found " + std::to_string(peaks.size()) + " latency peaks, need at least 3");

  std::vector<double> gaps;
  for (std::size_t i = 1; i < peaks.size(); ++i) gaps.push_back(peaks[i] - peaks[i - 1]);
  RefreshEstimate e;
  e.peaks = peaks.size();
  e.interval_ns = median(gaps);
  const auto close = std::count_if(gaps.begin(), gaps.end(), [&](double g) {
    return std::abs(g - e.interval_ns) <= params.class_tolerance * e.interval_ns;
  });
  e.confidence = static_cast<double>(close) / static_cast<double>(gaps.size());
  const auto near = [&](double target) { return std::abs(e.interval_ns - target) <= params.class_tolerance * target; };
  if (near(params.standard_refi_ns))
    e.classification = RefreshClass::standard;
  else if (near(params.standard_refi_ns / 2))
    e.classification = RefreshClass::double_rate;
  return e;
}

}  // namespace trrsim
