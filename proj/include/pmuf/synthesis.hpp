#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmuf/signal_model.hpp"

namespace pmuf {

struct TrendPoint {
  double time_s = 0.0;
  double value = 0.0;
  bool operator==(const TrendPoint&) const = default;
};

/// Clean channel: nominal + piecewise-linear trend + AR(1) dynamics whose
/// expected 5-sample window variance equals dynamics_variability.
struct BaselineSpec {
  std::string pmu_id;
  ChannelKind kind = ChannelKind::FrequencyHz;
  double duration_s = 60.0;
  SamplingSpec spec;
  double nominal_value = 60.0;
  std::vector<TrendPoint> trend;  // offsets from nominal, held flat past the ends
  double dynamics_variability = 0.0;

  std::size_t sample_count() const;
  bool operator==(const BaselineSpec&) const = default;
};

void validate(const BaselineSpec& spec);

/// AR(1) coefficient of the baseline dynamics.
inline constexpr double kBaselineReversion = 0.95;
inline constexpr std::size_t kVariabilityWindow = 5;

struct OutlierInjection {
  double rate = 0.0;
  double magnitude_sigmas = 10.0;
  bool operator==(const OutlierInjection&) const = default;
};

struct MissingInjection {
  double dropout_rate = 0.0;
  std::size_t max_gap_samples = 1;
  std::optional<double> filler_value;  // nullopt writes NaN
  bool operator==(const MissingInjection&) const = default;
};

struct ModeInjection {
  double frequency_hz = 0.0;
  double amplitude = 0.0;
  double damping_factor = 0.0;  // damping ratio zeta
  double start_s = 0.0;
  double duration_s = 0.0;
  bool operator==(const ModeInjection&) const = default;
};

/// Features to add to a baseline. Applied in the fixed order
/// modes -> noise -> outliers -> skew -> missing.
struct InjectionSpec {
  std::uint64_t seed = 0;
  std::optional<double> noise_snr_db;  // +inf leaves the series unchanged
  std::optional<OutlierInjection> outlier;
  std::optional<MissingInjection> missing;
  std::optional<double> skew_s_per_s;
  std::vector<ModeInjection> modes;

  bool operator==(const InjectionSpec&) const = default;
};

void validate(const InjectionSpec& spec);

/// Ground truth written by the injectors.
struct GenerationRecord {
  BaselineSpec baseline;
  InjectionSpec injection;
  std::uint64_t baseline_seed = 0;
  std::vector<std::size_t> outlier_indices;
  std::vector<Segment> missing_runs;
  std::vector<ModeInjection> modes;
  std::optional<double> realized_noise_variance;
  std::optional<double> skew_s_per_s;

  bool operator==(const GenerationRecord&) const = default;
};

struct Generated {
  ChannelSeries series;
  GenerationRecord record;
};

Generated generate_baseline(const BaselineSpec& spec, std::uint64_t seed);

ChannelSeries inject_modes(const ChannelSeries& series, const std::vector<ModeInjection>& modes);

struct NoiseInjected {
  ChannelSeries series;
  double realized_variance = 0.0;
};
/// Gaussian noise with variance var(series) / 10^(snr/10).
NoiseInjected inject_noise(const ChannelSeries& series, double target_snr_db, std::uint64_t seed);

struct OutliersInjected {
  ChannelSeries series;
  std::vector<std::size_t> indices;
};
/// Adds +/- magnitude_sigmas robust sigmas to round(rate * N) distinct valid samples.
OutliersInjected inject_outliers(const ChannelSeries& series, double rate, double magnitude_sigmas,
                                 std::uint64_t seed);

struct MissingInjected {
  ChannelSeries series;
  std::vector<Segment> gaps;
};
/// Drops exactly round(dropout_rate * N) samples in non-touching gaps of
/// length uniform on [1, max_gap_samples].
MissingInjected inject_missing(const ChannelSeries& series, double dropout_rate,
                               std::size_t max_gap_samples, std::optional<double> filler_value,
                               std::uint64_t seed);

/// Drops one contiguous run of samples.
ChannelSeries inject_gap(const ChannelSeries& series, std::size_t start, std::size_t length,
                         std::optional<double> filler_value = std::nullopt);

/// Resamples as a PMU whose clock runs fast by skew seconds per second:
/// the sample stamped t was really taken at t / (1 + skew).
ChannelSeries inject_time_skew(const ChannelSeries& series, double skew_s_per_s);

Generated run_pipeline(const BaselineSpec& baseline, const InjectionSpec& inject);

/// Expected unbiased window variance of a unit-variance AR(1) process.
double ar1_window_variance_factor(double reversion, std::size_t window);

/// 1.4826 * median absolute deviation of the valid samples.
double robust_sigma(const ChannelSeries& series);

}  // namespace pmuf
