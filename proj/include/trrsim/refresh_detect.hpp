#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace trrsim {

struct LatencySample {
  double timestamp_ns = 0;
  double latency_ns = 0;

  friend bool operator==(const LatencySample&, const LatencySample&) = default;
};

struct LatencyTrace {
  std::vector<LatencySample> samples;

  /// CSV with header timestamp_ns,latency_ns.
  void write_csv(std::ostream& out) const;
  static LatencyTrace read_csv(std::istream& in);
};

struct TraceParams {
  double base_latency_ns = 100;
  /// Time a REF blocks the rank.
  double t_rfc_ns = 350;
  double t_refi_ns = 7800;
  /// Scale of the jitter. Jitter is the magnitude of a Gaussian draw, so
  /// latencies never fall below the base.
  double jitter_ns = 0;
  double sample_period_ns = 50;
  /// Start of the first REF.
  double phase_ns = 0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Samples every sample_period_ns over [0, duration_ns). A sample issued
/// while a REF is in progress waits for it to finish.
LatencyTrace synthesize_trace(const TraceParams& params, double duration_ns);

enum class RefreshClass : std::uint8_t { standard, double_rate, other };

std::string to_string(RefreshClass c);

struct RefreshEstimate {
  double interval_ns = 0;
  /// Share of inter-peak intervals within 10% of the estimate.
  double confidence = 0;
  std::size_t peaks = 0;
  RefreshClass classification = RefreshClass::other;

  /// "standard", "double" or "other(<interval>)".
  std::string label() const;
  nlohmann::json to_json() const;
};

struct DetectParams {
  /// Peaks are samples above floor + k * sigma, with the floor the lowest
  /// latency and sigma estimated from the median excess over it.
  double k_sigma = 4;
  /// Detect on the mean of this many consecutive samples. Values above 1
  /// help when the jitter is comparable to the REF stall.
  std::size_t window_samples = 4;
  double standard_refi_ns = 7800;
  /// Relative band around the standard and doubled rates.
  double class_tolerance = 0.10;
};

/// Median interval between latency peaks. Throws InsufficientDataError when
/// fewer than 3 peaks are found.
RefreshEstimate estimate_refresh_interval(const LatencyTrace& trace, const DetectParams& params = {});

}  // namespace trrsim
