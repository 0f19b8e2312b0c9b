#include "pmuf/anomaly.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "detail/sorted_window.hpp"
#include "pmuf/error.hpp"
#include "pmuf/preprocess.hpp"

namespace pmuf {

void validate(const OutlierConfig& cfg) {
  if (cfg.window < 3) fail(ErrorCode::InvalidSpec, "outlier window must be at least 3 samples");
  if (!(cfg.threshold > 0.0)) fail(ErrorCode::InvalidSpec, "outlier threshold must be positive");
  if (!(cfg.robust_scale_factor > 0.0)) {
    fail(ErrorCode::InvalidSpec, "robust scale factor must be positive");
  }
}

namespace {

struct HampelResult {
  std::vector<std::size_t> indices;
  std::vector<double> local_median;  // only meaningful at valid indices
  std::vector<double> deviation;     // x - local median
};

bool exceeds(double deviation, double median, double mad, const OutlierConfig& cfg) {
  const double magnitude = std::abs(deviation);
  if (mad == 0.0) return magnitude > 1e-12 * std::max(1.0, std::abs(median));
  return magnitude > cfg.threshold * cfg.robust_scale_factor * mad;
}

// Window for sample i is [i - w + 1, i]; samples before the first full
// window share the leading window [0, w - 1].
HampelResult hampel(const ChannelSeries& series, const OutlierConfig& cfg) {
  validate(cfg);
  const std::size_t n = series.size();
  const std::size_t w = cfg.window;
  if (w > n) {
    fail(ErrorCode::WindowTooLarge, "outlier window " + std::to_string(w) +
                                        " exceeds series length " + std::to_string(n));
  }
  HampelResult out;
  out.local_median.assign(n, 0.0);
  out.deviation.assign(n, 0.0);

  detail::SortedWindow window;
  window.reserve(w);
  for (std::size_t i = 0; i < w; ++i) {
    if (!series.missing(i)) window.insert(series.value(i));
  }
  auto evaluate = [&](std::size_t i) {
    if (series.missing(i) || window.empty()) return;
    const double m = window.median();
    const double mad = window.median_abs_deviation(m);
    const double d = series.value(i) - m;
    out.local_median[i] = m;
    out.deviation[i] = d;
    if (exceeds(d, m, mad, cfg)) out.indices.push_back(i);
  };
  for (std::size_t i = 0; i < w; ++i) evaluate(i);
  for (std::size_t i = w; i < n; ++i) {
    if (!series.missing(i)) window.insert(series.value(i));
    if (!series.missing(i - w)) window.erase(series.value(i - w));
    evaluate(i);
  }
  return out;
}

OutlierReport make_report(std::vector<std::size_t> indices, std::size_t total) {
  OutlierReport report;
  report.total_samples = total;
  report.percentage = 100.0 * static_cast<double>(indices.size()) / static_cast<double>(total);
  report.indices = std::move(indices);
  return report;
}

}  // namespace

OutlierReport detect_outliers(const ChannelSeries& series, const OutlierConfig& cfg) {
  HampelResult result = hampel(series, cfg);
  return make_report(std::move(result.indices), series.size());
}

CleanedSeries replace_outliers_with_local_median(const ChannelSeries& series,
                                                 const OutlierConfig& cfg) {
  HampelResult result = hampel(series, cfg);
  std::vector<double> values(series.values().begin(), series.values().end());
  std::vector<std::uint8_t> mask(series.missing_mask().begin(), series.missing_mask().end());
  for (std::size_t i : result.indices) values[i] = result.local_median[i];
  return CleanedSeries{series.with_samples(std::move(values), std::move(mask)),
                       make_report(std::move(result.indices), series.size())};
}

OutlierReport angle_outlier_scan(const ChannelSeries& series, const OutlierConfig& cfg) {
  if (series.kind() != ChannelKind::VoltageAngleDeg) {
    fail(ErrorCode::WrongKind, "angle_outlier_scan needs a voltage angle channel");
  }
  validate(cfg);
  if (series.size() < cfg.window + 1) {
    fail(ErrorCode::WindowTooLarge, "angle series needs at least window + 1 samples");
  }
  const ChannelSeries diff = angle_first_difference(angle_unwrap(series));
  const HampelResult result = hampel(diff, cfg);

  // A lone spike shows up as an up-step followed by a down-step; both
  // differences point at the raw sample between them.
  std::vector<std::size_t> raw;
  const auto& flagged = result.indices;
  for (std::size_t k = 0; k < flagged.size(); ++k) {
    const std::size_t i = flagged[k];
    raw.push_back(i + 1);
    if (k + 1 < flagged.size() && flagged[k + 1] == i + 1 &&
        (result.deviation[i] > 0.0) != (result.deviation[i + 1] > 0.0)) {
      ++k;
    }
  }
  raw.erase(std::unique(raw.begin(), raw.end()), raw.end());
  return make_report(std::move(raw), series.size());
}

CompletenessStats completeness(const ChannelSeries& series) {
  CompletenessStats stats;
  stats.expected_samples = series.size();
  std::size_t run = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.missing(i)) {
      ++stats.dropped_samples;
      stats.max_gap_samples = std::max(stats.max_gap_samples, ++run);
    } else {
      run = 0;
    }
  }
  stats.dropout_rate =
      static_cast<double>(stats.dropped_samples) / static_cast<double>(stats.expected_samples);
  stats.max_gap_seconds = static_cast<double>(stats.max_gap_samples) / series.spec().rate_fps;
  return stats;
}

void aggregate_fleet(FleetReport& report) {
  report.high_dropout_count = 0;
  report.long_gap_count = 0;
  report.any_missing_count = 0;
  for (const auto& entry : report.channels) {
    const auto& c = entry.completeness;
    if (c.dropout_rate > report.thresholds.dropout_rate) ++report.high_dropout_count;
    if (c.max_gap_seconds > report.thresholds.gap_seconds) ++report.long_gap_count;
    if (c.dropped_samples > 0) ++report.any_missing_count;
  }
  const double total = report.channels.empty() ? 1.0 : static_cast<double>(report.channels.size());
  report.high_dropout_fraction = static_cast<double>(report.high_dropout_count) / total;
  report.long_gap_fraction = static_cast<double>(report.long_gap_count) / total;
  report.any_missing_fraction = static_cast<double>(report.any_missing_count) / total;
}

FleetReport fleet_summary(const std::vector<ChannelSeries>& channels, const OutlierConfig& cfg,
                          const FleetThresholds& thresholds) {
  if (channels.empty()) fail(ErrorCode::InvalidArgument, "fleet_summary needs at least one channel");
  FleetReport report;
  report.thresholds = thresholds;
  report.channels.reserve(channels.size());
  for (const auto& series : channels) {
    FleetChannelEntry entry;
    entry.pmu_id = series.pmu_id();
    entry.kind = series.kind();
    entry.outliers = series.kind() == ChannelKind::VoltageAngleDeg ? angle_outlier_scan(series, cfg)
                                                                   : detect_outliers(series, cfg);
    entry.completeness = completeness(series);
    report.channels.push_back(std::move(entry));
  }
  std::stable_sort(report.channels.begin(), report.channels.end(),
                   [](const FleetChannelEntry& a, const FleetChannelEntry& b) {
                     return std::tie(a.pmu_id, a.kind) < std::tie(b.pmu_id, b.kind);
                   });
  aggregate_fleet(report);
  return report;
}

}  // namespace pmuf
