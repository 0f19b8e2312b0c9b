#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "pmuf/anomaly.hpp"
#include "pmuf/signal_model.hpp"

namespace pmuf {

/// Default order of the noise-extraction median filter (3 s at 30 fps).
inline constexpr std::size_t kDefaultFilterOrder = 90;
inline constexpr std::size_t kDefaultVariabilityWindow = 5;
inline constexpr std::size_t kDefaultAcfLags = 20;

/// Residual left after median filtering, with its summary statistics.
/// Samples before warmup_samples are exactly zero.
struct NoiseProfile {
  ChannelSeries noise;
  double snr_db = std::numeric_limits<double>::infinity();
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t warmup_samples = 0;
};

/// total = dynamics + noise + anomaly. dynamics is the clamped residual, so
/// the identity holds by construction.
struct VarianceComponents {
  double total = 0.0;
  double dynamics = 0.0;
  double noise = 0.0;
  double anomaly = 0.0;

  bool operator==(const VarianceComponents&) const = default;
};

/// Non-overlapping window means and unbiased variances. Windows with fewer
/// than two valid samples carry NaN variance (and NaN mean when empty) and are
/// left out of average_variability.
struct WindowStats {
  std::size_t window_len = 0;
  std::vector<double> means;
  std::vector<double> variances;
  double average_variability = 0.0;
};

struct AcfResult {
  std::size_t max_lag = 0;
  std::vector<double> coefficients;
  double mean_abs_excl_zero = 0.0;

  bool operator==(const AcfResult&) const = default;
};

/// Causal moving median. output[i] is the median of the valid samples in
/// [i - order + 1, i]; the first order - 1 samples pass through unchanged.
ChannelSeries median_filter(const ChannelSeries& series, std::size_t order);

NoiseProfile extract_noise(const ChannelSeries& series, std::size_t order = kDefaultFilterOrder);

/// 10 log10(var(signal) / var(noise)) with unbiased variances; +inf when the
/// noise variance is zero.
double snr_db(std::span<const double> signal, std::span<const double> noise);

WindowStats windowed_stats(const ChannelSeries& series,
                           std::size_t window_len = kDefaultVariabilityWindow);

VarianceComponents variance_decomposition(const ChannelSeries& series,
                                          std::size_t order = kDefaultFilterOrder,
                                          const OutlierConfig& outlier_cfg = {});

/// Biased (lag-0 normalized) autocorrelation for lags 0..max_lag.
AcfResult autocorrelation(std::span<const double> values, std::size_t max_lag = kDefaultAcfLags);

bool iid_score(const AcfResult& acf, double lag1_threshold = 0.2, double mean_threshold = 0.1);

/// Removes +/-360 degree jumps so each step lies in (-180, 180]. Each valid
/// segment is unwrapped independently.
ChannelSeries angle_unwrap(const ChannelSeries& series);

/// d[i] = x[i+1] - x[i]; differences touching a missing sample are missing.
ChannelSeries angle_first_difference(const ChannelSeries& series);

/// Unbiased sample variance; 0 for fewer than two samples.
double sample_variance(std::span<const double> values);
double sample_mean(std::span<const double> values);

}  // namespace pmuf
