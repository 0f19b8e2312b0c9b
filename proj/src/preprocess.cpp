#include "pmuf/preprocess.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "detail/sorted_window.hpp"
#include "pmuf/error.hpp"

namespace pmuf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_angle(const ChannelSeries& series, const char* op) {
  if (series.kind() != ChannelKind::VoltageAngleDeg) {
    fail(ErrorCode::WrongKind, std::string(op) + " needs a voltage angle channel, got " +
                                   std::string(to_string(series.kind())));
  }
}

}  // namespace

double sample_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double mean = sample_mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(n - 1);
}

ChannelSeries median_filter(const ChannelSeries& series, std::size_t order) {
  if (order == 0) fail(ErrorCode::InvalidArgument, "median filter order must be at least 1");
  const std::size_t n = series.size();
  if (order > n) {
    fail(ErrorCode::OrderTooLarge,
         "order " + std::to_string(order) + " exceeds series length " + std::to_string(n));
  }
  const auto raw = series.values();
  std::vector<double> out(n);
  std::vector<std::uint8_t> mask(n, 0);

  detail::SortedWindow window;
  window.reserve(order);
  for (std::size_t i = 0; i < n; ++i) {
    if (!series.missing(i)) window.insert(raw[i]);
    if (i >= order && !series.missing(i - order)) window.erase(raw[i - order]);

    if (i + 1 < order) {
      out[i] = raw[i];
      mask[i] = series.missing(i) ? 1 : 0;
    } else if (window.empty()) {
      out[i] = kNaN;
      mask[i] = 1;
    } else {
      out[i] = window.median();
    }
  }
  return series.with_samples(std::move(out), std::move(mask));
}

double snr_db(std::span<const double> signal, std::span<const double> noise) {
  if (signal.empty() || noise.empty()) {
    fail(ErrorCode::InvalidArgument, "snr_db needs nonempty signal and noise");
  }
  const double var_signal = sample_variance(signal);
  const double var_noise = sample_variance(noise);
  if (var_noise == 0.0) {
    if (var_signal == 0.0) fail(ErrorCode::DegenerateSignal, "signal and noise both have zero variance");
    return std::numeric_limits<double>::infinity();
  }
  return 10.0 * std::log10(var_signal / var_noise);
}

NoiseProfile extract_noise(const ChannelSeries& series, std::size_t order) {
  const ChannelSeries filtered = median_filter(series, order);
  const std::size_t n = series.size();
  const std::size_t warmup = order - 1;

  std::vector<double> noise(n, 0.0);
  std::vector<std::uint8_t> mask(n, 0);
  std::vector<double> signal_used;
  std::vector<double> noise_used;
  signal_used.reserve(n - warmup);
  noise_used.reserve(n - warmup);

  for (std::size_t i = warmup; i < n; ++i) {
    if (series.missing(i) || filtered.missing(i)) {
      noise[i] = kNaN;
      mask[i] = 1;
      continue;
    }
    noise[i] = series.value(i) - filtered.value(i);
    signal_used.push_back(filtered.value(i));
    noise_used.push_back(noise[i]);
  }
  if (noise_used.empty()) {
    fail(ErrorCode::TooShort, "no valid samples after the " + std::to_string(warmup) +
                                  "-sample filter warm-up");
  }

  const double var_noise = sample_variance(noise_used);
  NoiseProfile profile{
      series.with_samples(std::move(noise), std::move(mask)).with_wrap(AngleWrap::Unwrapped),
      std::numeric_limits<double>::infinity(),
      sample_mean(noise_used),
      std::sqrt(var_noise),
      warmup,
  };
  if (var_noise > 0.0) profile.snr_db = snr_db(signal_used, noise_used);
  return profile;
}

WindowStats windowed_stats(const ChannelSeries& series, std::size_t window_len) {
  if (window_len < 2) fail(ErrorCode::InvalidArgument, "window length must be at least 2");
  const std::size_t count = series.size() / window_len;
  if (count == 0) {
    fail(ErrorCode::WindowTooLarge, "window of " + std::to_string(window_len) +
                                        " samples exceeds series length " +
                                        std::to_string(series.size()));
  }
  WindowStats stats;
  stats.window_len = window_len;
  stats.means.resize(count);
  stats.variances.resize(count);

  std::vector<double> buffer;
  buffer.reserve(window_len);
  double variance_sum = 0.0;
  std::size_t used = 0;
  for (std::size_t w = 0; w < count; ++w) {
    buffer.clear();
    for (std::size_t i = w * window_len; i < (w + 1) * window_len; ++i) {
      if (!series.missing(i)) buffer.push_back(series.value(i));
    }
    stats.means[w] = buffer.empty() ? kNaN : sample_mean(buffer);
    if (buffer.size() < 2) {
      stats.variances[w] = kNaN;
      continue;
    }
    stats.variances[w] = sample_variance(buffer);
    variance_sum += stats.variances[w];
    ++used;
  }
  if (used == 0) {
    fail(ErrorCode::TooFewSamples, "no window holds two or more valid samples");
  }
  stats.average_variability = variance_sum / static_cast<double>(used);
  return stats;
}

namespace {

std::vector<double> valid_after(const ChannelSeries& series, std::size_t first) {
  std::vector<double> out;
  out.reserve(series.size());
  for (std::size_t i = first; i < series.size(); ++i) {
    if (!series.missing(i)) out.push_back(series.value(i));
  }
  return out;
}

}  // namespace

VarianceComponents variance_decomposition(const ChannelSeries& series, std::size_t order,
                                          const OutlierConfig& outlier_cfg) {
  if (series.size() <= order) {
    fail(ErrorCode::TooShort, "series length " + std::to_string(series.size()) +
                                  " must exceed filter order " + std::to_string(order));
  }
  const std::size_t warmup = order - 1;
  const CleanedSeries cleaned = replace_outliers_with_local_median(series, outlier_cfg);

  VarianceComponents out;
  out.total = sample_variance(valid_after(series, warmup));
  const double cleaned_var = sample_variance(valid_after(cleaned.series, warmup));
  out.anomaly = std::max(0.0, out.total - cleaned_var);

  // Residual of the outlier-free series, so spikes are not counted twice.
  const NoiseProfile noise = extract_noise(cleaned.series, order);
  out.noise = std::min(noise.std_dev * noise.std_dev, out.total - out.anomaly);
  out.noise = std::max(0.0, out.noise);
  out.dynamics = std::max(0.0, out.total - out.noise - out.anomaly);
  return out;
}

AcfResult autocorrelation(std::span<const double> values, std::size_t max_lag) {
  if (max_lag == 0) fail(ErrorCode::InvalidArgument, "max_lag must be positive");
  const std::size_t n = values.size();
  if (n <= max_lag + 1) {
    fail(ErrorCode::TooShort, "autocorrelation to lag " + std::to_string(max_lag) + " needs more than " +
                                  std::to_string(max_lag + 1) + " samples, got " + std::to_string(n));
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, "autocorrelation input must be gap-free");
  }
  const double mean = sample_mean(values);
  std::vector<double> centered(n);
  for (std::size_t i = 0; i < n; ++i) centered[i] = values[i] - mean;
  double c0 = 0.0;
  for (double v : centered) c0 += v * v;
  if (c0 == 0.0) fail(ErrorCode::ConstantSeries, "autocorrelation of a constant series is undefined");

  AcfResult acf;
  acf.max_lag = max_lag;
  acf.coefficients.resize(max_lag + 1);
  acf.coefficients[0] = 1.0;
  double abs_sum = 0.0;
  for (std::size_t k = 1; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) ck += centered[t] * centered[t + k];
    acf.coefficients[k] = ck / c0;
    abs_sum += std::abs(acf.coefficients[k]);
  }
  acf.mean_abs_excl_zero = abs_sum / static_cast<double>(max_lag);
  return acf;
}

bool iid_score(const AcfResult& acf, double lag1_threshold, double mean_threshold) {
  if (acf.max_lag < 2 || acf.coefficients.size() < 3) {
    fail(ErrorCode::InvalidArgument, "iid_score needs an ACF with max_lag >= 2");
  }
  return std::abs(acf.coefficients[1]) < lag1_threshold && acf.mean_abs_excl_zero < mean_threshold;
}

ChannelSeries angle_unwrap(const ChannelSeries& series) {
  require_angle(series, "angle_unwrap");
  const std::size_t n = series.size();
  std::vector<double> out(series.values().begin(), series.values().end());
  std::vector<std::uint8_t> mask(series.missing_mask().begin(), series.missing_mask().end());

  // out[i] = raw[i] + 360 * turns keeps each value one rounding away from raw.
  double turns = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (series.missing(i)) continue;
    if (i == 0 || series.missing(i - 1)) {
      turns = 0.0;
      continue;
    }
    const double step = series.value(i) - series.value(i - 1);
    turns += std::floor((180.0 - step) / 360.0);
    out[i] = series.value(i) + 360.0 * turns;
  }
  return ChannelSeries(series.kind(), series.spec(), std::move(out), std::move(mask),
                       series.pmu_id(), AngleWrap::Unwrapped);
}

ChannelSeries angle_first_difference(const ChannelSeries& series) {
  require_angle(series, "angle_first_difference");
  const std::size_t n = series.size();
  if (n < 2) fail(ErrorCode::TooShort, "first difference needs at least two samples");
  std::vector<double> diff(n - 1);
  std::vector<std::uint8_t> mask(n - 1, 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (series.missing(i) || series.missing(i + 1)) {
      diff[i] = kNaN;
      mask[i] = 1;
    } else {
      diff[i] = series.value(i + 1) - series.value(i);
    }
  }
  SamplingSpec spec = series.spec();
  spec.start_time = series.spec().timestamp(1);
  return ChannelSeries(series.kind(), spec, std::move(diff), std::move(mask), series.pmu_id(),
                       AngleWrap::Unwrapped);
}

}  // namespace pmuf
