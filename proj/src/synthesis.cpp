#include "pmuf/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "detail/rng.hpp"
#include "pmuf/error.hpp"
#include "pmuf/preprocess.hpp"

namespace pmuf {

namespace {

std::vector<double> valid_values(const ChannelSeries& series) {
  std::vector<double> out;
  out.reserve(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series.missing(i)) out.push_back(series.value(i));
  }
  return out;
}

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

double trend_at(const std::vector<TrendPoint>& trend, double t) {
  if (trend.empty()) return 0.0;
  if (t <= trend.front().time_s) return trend.front().value;
  if (t >= trend.back().time_s) return trend.back().value;
  const auto hi = std::upper_bound(trend.begin(), trend.end(), t,
                                   [](double x, const TrendPoint& p) { return x < p.time_s; });
  const auto lo = hi - 1;
  const double w = (t - lo->time_s) / (hi->time_s - lo->time_s);
  return lo->value + w * (hi->value - lo->value);
}

// k distinct sorted integers from [0, range), Floyd's algorithm.
std::vector<std::size_t> sample_distinct(detail::Rng& rng, std::size_t range, std::size_t k) {
  std::set<std::size_t> chosen;
  for (std::size_t j = range - k; j < range; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  return {chosen.begin(), chosen.end()};
}

void check_rate(double rate, const char* what) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    fail(ErrorCode::InvalidArgument, std::string(what) + " must lie in [0, 1]");
  }
}

}  // namespace

std::size_t BaselineSpec::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration_s * spec.rate_fps));
}

void validate(const BaselineSpec& s) {
  try {
    validate(s.spec);
  } catch (const Error& e) {
    fail(ErrorCode::InvalidSpec, e.what());
  }
  if (!(s.duration_s > 0.0) || !std::isfinite(s.duration_s)) {
    fail(ErrorCode::InvalidSpec, "duration_s must be positive");
  }
  if (s.sample_count() == 0) fail(ErrorCode::InvalidSpec, "duration shorter than one sample");
  if (!std::isfinite(s.nominal_value)) fail(ErrorCode::InvalidSpec, "nominal_value must be finite");
  if (!(s.dynamics_variability >= 0.0) || !std::isfinite(s.dynamics_variability)) {
    fail(ErrorCode::InvalidSpec, "dynamics_variability must be finite and nonnegative");
  }
  for (std::size_t i = 0; i < s.trend.size(); ++i) {
    const TrendPoint& p = s.trend[i];
    if (!std::isfinite(p.time_s) || !std::isfinite(p.value) || p.time_s < 0.0 ||
        p.time_s > s.duration_s) {
      fail(ErrorCode::InvalidSpec, "trend breakpoint " + std::to_string(i) + " outside [0, duration_s]");
    }
    if (i > 0 && !(p.time_s > s.trend[i - 1].time_s)) {
      fail(ErrorCode::InvalidSpec, "trend breakpoint times must increase strictly");
    }
  }
}

void validate(const InjectionSpec& s) {
  if (s.noise_snr_db && std::isnan(*s.noise_snr_db)) {
    fail(ErrorCode::InvalidArgument, "noise_snr_db is NaN");
  }
  if (s.outlier) {
    check_rate(s.outlier->rate, "outlier rate");
    if (!(s.outlier->magnitude_sigmas >= 3.0) || !std::isfinite(s.outlier->magnitude_sigmas)) {
      fail(ErrorCode::InvalidArgument, "outlier magnitude_sigmas must be at least 3");
    }
  }
  if (s.missing) {
    check_rate(s.missing->dropout_rate, "dropout_rate");
    if (s.missing->max_gap_samples == 0) {
      fail(ErrorCode::InvalidArgument, "max_gap_samples must be positive");
    }
    if (s.missing->filler_value && !std::isfinite(*s.missing->filler_value)) {
      fail(ErrorCode::InvalidArgument, "filler value must be finite");
    }
  }
  if (s.skew_s_per_s && !std::isfinite(*s.skew_s_per_s)) {
    fail(ErrorCode::OutOfRange, "skew must be finite");
  }
  for (const ModeInjection& m : s.modes) {
    if (!(m.frequency_hz >= 0.0) || !std::isfinite(m.amplitude) || !std::isfinite(m.start_s) ||
        !(m.duration_s >= 0.0) || !(std::abs(m.damping_factor) < 1.0)) {
      fail(ErrorCode::InvalidArgument, "mode parameters out of range");
    }
  }
}

double ar1_window_variance_factor(double phi, std::size_t n) {
  double acc = 0.0;
  double phik = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    phik *= phi;
    acc += static_cast<double>(n - k) * phik;
  }
  return 1.0 - 2.0 * acc / static_cast<double>(n * (n - 1));
}

double robust_sigma(const ChannelSeries& series) {
  std::vector<double> v = valid_values(series);
  if (v.empty()) return 0.0;
  const double med = median_of(v);
  for (double& x : v) x = std::abs(x - med);
  return 1.4826 * median_of(std::move(v));
}

Generated generate_baseline(const BaselineSpec& spec, std::uint64_t seed) {
  validate(spec);
  const std::size_t n = spec.sample_count();
  std::vector<double> values(n);

  const double phi = kBaselineReversion;
  const double factor = ar1_window_variance_factor(phi, kVariabilityWindow);
  const double stationary_sd = std::sqrt(spec.dynamics_variability / factor);
  const double innovation_sd = stationary_sd * std::sqrt(1.0 - phi * phi);

  detail::Rng rng(seed);
  double ar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (stationary_sd > 0.0) {
      ar = i == 0 ? stationary_sd * rng.normal() : phi * ar + innovation_sd * rng.normal();
    }
    const double t = static_cast<double>(i) / spec.spec.rate_fps;
    values[i] = spec.nominal_value + trend_at(spec.trend, t) + ar;
  }

  ChannelSeries series(spec.kind, spec.spec, std::move(values), std::vector<std::uint8_t>(n, 0),
                       spec.pmu_id);
  GenerationRecord record;
  record.baseline = spec;
  record.baseline_seed = seed;
  return {std::move(series), std::move(record)};
}

ChannelSeries inject_modes(const ChannelSeries& series, const std::vector<ModeInjection>& modes) {
  const double rate = series.spec().rate_fps;
  for (const ModeInjection& m : modes) {
    if (m.frequency_hz >= series.spec().nyquist_hz()) {
      fail(ErrorCode::AboveNyquist, "mode at " + std::to_string(m.frequency_hz) +
                                        " Hz is not below Nyquist " +
                                        std::to_string(series.spec().nyquist_hz()) + " Hz");
    }
    if (!(std::abs(m.damping_factor) < 1.0)) {
      fail(ErrorCode::InvalidArgument, "damping factor must satisfy |zeta| < 1");
    }
  }
  if (modes.empty()) return series;

  std::vector<double> values(series.values().begin(), series.values().end());
  for (const ModeInjection& m : modes) {
    const double omega = 2.0 * std::numbers::pi * m.frequency_hz;
    const double zeta = m.damping_factor;
    const double sigma = zeta * omega / std::sqrt(1.0 - zeta * zeta);
    const double end = m.start_s + m.duration_s;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (series.missing(i)) continue;
      const double t = static_cast<double>(i) / rate;
      if (t < m.start_s || t >= end) continue;
      const double tau = t - m.start_s;
      values[i] += m.amplitude * std::exp(-sigma * tau) * std::cos(omega * tau);
    }
  }
  return series.with_samples(std::move(values), {series.missing_mask().begin(), series.missing_mask().end()});
}

NoiseInjected inject_noise(const ChannelSeries& series, double target_snr_db, std::uint64_t seed) {
  if (std::isnan(target_snr_db)) fail(ErrorCode::InvalidArgument, "target SNR is NaN");
  if (target_snr_db == std::numeric_limits<double>::infinity()) return {series, 0.0};

  // Wrapped angles are measured on the continuous trajectory.
  const bool wrapped = series.kind() == ChannelKind::VoltageAngleDeg &&
                       series.angle_wrap() == AngleWrap::Wrapped;
  const double var = sample_variance(valid_values(wrapped ? angle_unwrap(series) : series));
  if (!(var > 0.0)) fail(ErrorCode::DegenerateBaseline, "series variance is zero, SNR undefined");
  const double sd = std::sqrt(var / std::pow(10.0, target_snr_db / 10.0));

  detail::Rng rng(seed);
  std::vector<double> values(series.values().begin(), series.values().end());
  std::vector<double> drawn;
  drawn.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (series.missing(i)) continue;
    const double e = sd * rng.normal();
    values[i] += e;
    drawn.push_back(e);
  }
  return {series.with_samples(std::move(values), {series.missing_mask().begin(), series.missing_mask().end()}),
          sample_variance(drawn)};
}

OutliersInjected inject_outliers(const ChannelSeries& series, double rate, double magnitude_sigmas,
                                 std::uint64_t seed) {
  check_rate(rate, "outlier rate");
  const std::size_t n = series.size();
  const auto count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  if (count == 0) return {series, {}};

  std::vector<std::size_t> valid;
  valid.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!series.missing(i)) valid.push_back(i);
  }
  if (count > valid.size()) {
    fail(ErrorCode::InvalidArgument, "requested " + std::to_string(count) + " outliers but only " +
                                         std::to_string(valid.size()) + " valid samples");
  }

  const ChannelSeries& scale_source =
      series.kind() == ChannelKind::VoltageAngleDeg && series.angle_wrap() == AngleWrap::Wrapped
          ? angle_unwrap(series)
          : series;
  double sigma = robust_sigma(scale_source);
  if (sigma == 0.0) sigma = std::sqrt(sample_variance(valid_values(scale_source)));
  if (sigma == 0.0) fail(ErrorCode::DegenerateBaseline, "series has no spread to scale outliers by");
  const double magnitude = magnitude_sigmas * sigma;

  detail::Rng rng(seed);
  std::vector<std::size_t> picks = sample_distinct(rng, valid.size(), count);
  std::vector<double> values(series.values().begin(), series.values().end());
  std::vector<std::size_t> indices;
  indices.reserve(count);
  for (std::size_t p : picks) {
    const std::size_t i = valid[p];
    values[i] += rng.coin() ? magnitude : -magnitude;
    indices.push_back(i);
  }
  return {series.with_samples(std::move(values), {series.missing_mask().begin(), series.missing_mask().end()}),
          std::move(indices)};
}

MissingInjected inject_missing(const ChannelSeries& series, double dropout_rate,
                               std::size_t max_gap_samples, std::optional<double> filler_value,
                               std::uint64_t seed) {
  check_rate(dropout_rate, "dropout_rate");
  if (max_gap_samples == 0) fail(ErrorCode::InvalidArgument, "max_gap_samples must be positive");
  const std::size_t n = series.size();
  const auto total = static_cast<std::size_t>(std::llround(dropout_rate * static_cast<double>(n)));
  if (total == 0) return {series, {}};

  detail::Rng rng(seed);
  std::vector<std::size_t> lengths;
  std::size_t placed = 0;
  while (placed < total) {
    std::size_t len = 1 + static_cast<std::size_t>(rng.below(max_gap_samples));
    len = std::min(len, total - placed);
    lengths.push_back(len);
    placed += len;
  }

  // Stars and bars: the n - total free samples are spread over k + 1 slots,
  // with at least one sample between consecutive gaps.
  const std::size_t k = lengths.size();
  if (n < total + (k - 1)) {
    fail(ErrorCode::InfeasiblePlacement,
         std::to_string(k) + " gaps totalling " + std::to_string(total) +
             " samples cannot be separated in " + std::to_string(n) + " samples");
  }
  const std::size_t slack = n - total - (k - 1);
  const std::vector<std::size_t> u = sample_distinct(rng, slack + k, k);

  std::vector<double> values(series.values().begin(), series.values().end());
  std::vector<std::uint8_t> mask(series.missing_mask().begin(), series.missing_mask().end());
  const double fill = filler_value.value_or(std::numeric_limits<double>::quiet_NaN());
  std::vector<Segment> gaps;
  gaps.reserve(k);
  std::size_t before = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t start = u[j] + before;
    for (std::size_t i = start; i < start + lengths[j]; ++i) {
      values[i] = fill;
      mask[i] = 1;
    }
    gaps.push_back({start, lengths[j]});
    before += lengths[j];
  }
  return {series.with_samples(std::move(values), std::move(mask)), std::move(gaps)};
}

ChannelSeries inject_gap(const ChannelSeries& series, std::size_t start, std::size_t length,
                         std::optional<double> filler_value) {
  if (start > series.size() || length > series.size() - start) {
    fail(ErrorCode::OutOfRange, "gap [" + std::to_string(start) + ", " +
                                    std::to_string(start + length) + ") exceeds series length " +
                                    std::to_string(series.size()));
  }
  std::vector<double> values(series.values().begin(), series.values().end());
  std::vector<std::uint8_t> mask(series.missing_mask().begin(), series.missing_mask().end());
  const double fill = filler_value.value_or(std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = start; i < start + length; ++i) {
    values[i] = fill;
    mask[i] = 1;
  }
  return series.with_samples(std::move(values), std::move(mask));
}

ChannelSeries inject_time_skew(const ChannelSeries& series, double skew) {
  if (!std::isfinite(skew) || std::abs(skew) >= 0.1) {
    fail(ErrorCode::OutOfRange, "skew " + std::to_string(skew) + " s/s outside (-0.1, 0.1)");
  }
  if (skew == 0.0) return series;
  const std::size_t n = series.size();
  if (n < 2) fail(ErrorCode::TooShort, "time skew needs at least two samples");
  if (series.missing_count() > 0) {
    fail(ErrorCode::InvalidArgument, "time skew must be applied before samples go missing");
  }

  const bool angle = series.kind() == ChannelKind::VoltageAngleDeg &&
                     series.angle_wrap() == AngleWrap::Wrapped;
  const ChannelSeries source = angle ? angle_unwrap(series) : series;
  const std::span<const double> x = source.values();

  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = static_cast<double>(i) / (1.0 + skew);
    // Past the last sample the final segment is extended linearly.
    const std::size_t lo = std::min(static_cast<std::size_t>(p), n - 2);
    const double w = p - static_cast<double>(lo);
    values[i] = x[lo] + w * (x[lo + 1] - x[lo]);
  }
  return series.with_samples(std::move(values), std::vector<std::uint8_t>(n, 0));
}

Generated run_pipeline(const BaselineSpec& baseline, const InjectionSpec& inject) {
  validate(inject);
  Generated out = generate_baseline(baseline, detail::stream_seed(inject.seed, "baseline"));
  ChannelSeries series = std::move(out.series);
  GenerationRecord& rec = out.record;
  rec.injection = inject;

  if (!inject.modes.empty()) {
    series = inject_modes(series, inject.modes);
    rec.modes = inject.modes;
  }
  if (inject.noise_snr_db) {
    NoiseInjected r = inject_noise(series, *inject.noise_snr_db, detail::stream_seed(inject.seed, "noise"));
    series = std::move(r.series);
    rec.realized_noise_variance = r.realized_variance;
  }
  if (inject.outlier) {
    OutliersInjected r = inject_outliers(series, inject.outlier->rate, inject.outlier->magnitude_sigmas,
                                         detail::stream_seed(inject.seed, "outliers"));
    series = std::move(r.series);
    rec.outlier_indices = std::move(r.indices);
  }
  if (inject.skew_s_per_s) {
    series = inject_time_skew(series, *inject.skew_s_per_s);
    rec.skew_s_per_s = inject.skew_s_per_s;
  }
  if (inject.missing) {
    MissingInjected r = inject_missing(series, inject.missing->dropout_rate, inject.missing->max_gap_samples,
                                       inject.missing->filler_value,
                                       detail::stream_seed(inject.seed, "missing"));
    series = std::move(r.series);
    rec.missing_runs = std::move(r.gaps);
  }
  out.series = std::move(series);
  return out;
}

}  // namespace pmuf
