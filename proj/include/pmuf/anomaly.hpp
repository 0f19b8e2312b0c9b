#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pmuf/signal_model.hpp"

namespace pmuf {

/// Hampel identifier settings: a sample is an outlier when it sits more than
/// threshold * robust_scale_factor * MAD from the trailing-window median.
struct OutlierConfig {
  std::size_t window = 90;
  double threshold = 3.0;
  double robust_scale_factor = 1.4826;

  bool operator==(const OutlierConfig&) const = default;
};

void validate(const OutlierConfig& cfg);

struct OutlierReport {
  std::vector<std::size_t> indices;
  double percentage = 0.0;
  std::size_t total_samples = 0;

  bool operator==(const OutlierReport&) const = default;
};

/// Drop-out rate and longest gap of a channel.
struct CompletenessStats {
  double dropout_rate = 0.0;
  std::size_t max_gap_samples = 0;
  double max_gap_seconds = 0.0;
  std::size_t expected_samples = 0;
  std::size_t dropped_samples = 0;

  bool operator==(const CompletenessStats&) const = default;
};

OutlierReport detect_outliers(const ChannelSeries& series, const OutlierConfig& cfg = {});

/// Same detector, but also returns the series with every flagged sample
/// replaced by its trailing-window median.
struct CleanedSeries {
  ChannelSeries series;
  OutlierReport report;
};
CleanedSeries replace_outliers_with_local_median(const ChannelSeries& series,
                                                 const OutlierConfig& cfg = {});

/// Outliers of an angle channel, found on its first-difference series and
/// mapped back to raw sample indices.
OutlierReport angle_outlier_scan(const ChannelSeries& series, const OutlierConfig& cfg = {});

CompletenessStats completeness(const ChannelSeries& series);

struct FleetThresholds {
  double dropout_rate = 0.02;
  double gap_seconds = 3.0;

  bool operator==(const FleetThresholds&) const = default;
};

struct FleetChannelEntry {
  std::string pmu_id;
  ChannelKind kind = ChannelKind::VoltageMagnitudePU;
  OutlierReport outliers;
  CompletenessStats completeness;

  bool operator==(const FleetChannelEntry&) const = default;
};

struct FleetReport {
  std::vector<FleetChannelEntry> channels;
  FleetThresholds thresholds;
  std::size_t high_dropout_count = 0;
  double high_dropout_fraction = 0.0;
  std::size_t long_gap_count = 0;
  double long_gap_fraction = 0.0;
  std::size_t any_missing_count = 0;
  double any_missing_fraction = 0.0;

  bool operator==(const FleetReport&) const = default;
};

/// Per-channel outlier and completeness statistics plus fleet-wide counts.
/// Entries are ordered by (pmu_id, kind).
FleetReport fleet_summary(const std::vector<ChannelSeries>& channels,
                          const OutlierConfig& cfg = {}, const FleetThresholds& thresholds = {});

/// Fleet aggregates recomputed from already-computed per-channel entries.
void aggregate_fleet(FleetReport& report);

}  // namespace pmuf
