#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pmuf/anomaly.hpp"
#include "pmuf/modal.hpp"
#include "pmuf/preprocess.hpp"
#include "pmuf/synthesis.hpp"

namespace pmuf {

/// Analyses selectable on the command line.
struct AnalysisSet {
  bool noise = true;
  bool variability = true;
  bool variance = true;
  bool acf = true;
  bool outliers = true;
  bool completeness = true;
  bool modal = true;

  bool operator==(const AnalysisSet&) const = default;
};

struct AnalyzeOptions {
  AnalysisSet analyses;
  std::size_t filter_order = kDefaultFilterOrder;
  std::size_t variability_window = kDefaultVariabilityWindow;
  std::size_t acf_lags = kDefaultAcfLags;
  OutlierConfig outlier;
  PencilConfig pencil;
  std::size_t disturbance_mode_count = 4;
  double disturbance_low_hz = 0.3;
  FleetThresholds fleet;

  bool operator==(const AnalyzeOptions&) const = default;
};

struct NoiseSummary {
  double snr_db = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
  std::size_t warmup_samples = 0;
  bool operator==(const NoiseSummary&) const = default;
};

struct AcfSummary {
  AcfResult acf;
  std::size_t samples_used = 0;
  bool iid = false;
  bool operator==(const AcfSummary&) const = default;
};

struct ModalSummary {
  ModeTrack track;
  std::vector<double> flagged_windows;
  bool operator==(const ModalSummary&) const = default;
};

struct ChannelReport {
  std::string pmu_id;
  ChannelKind kind = ChannelKind::VoltageMagnitudePU;
  std::size_t samples = 0;
  std::optional<NoiseSummary> noise;
  std::optional<double> average_variability;
  std::optional<VarianceComponents> variance;
  std::optional<AcfSummary> acf;
  std::optional<OutlierReport> outliers;
  std::optional<CompletenessStats> completeness;
  std::optional<ModalSummary> modal;
  std::vector<std::string> issues;  // analyses the data could not support

  bool operator==(const ChannelReport&) const = default;
};

/// Fleet counts only; per-channel entries live in `channels`.
struct FleetAggregates {
  FleetThresholds thresholds;
  std::size_t channel_count = 0;
  std::size_t high_dropout_count = 0;
  double high_dropout_fraction = 0.0;
  std::size_t long_gap_count = 0;
  double long_gap_fraction = 0.0;
  std::size_t any_missing_count = 0;
  double any_missing_fraction = 0.0;

  bool operator==(const FleetAggregates&) const = default;
};

struct FeatureReport {
  std::string source;
  SamplingSpec sampling;
  AnalyzeOptions options;
  std::vector<ChannelReport> channels;  // ordered by (pmu_id, kind)
  std::optional<FleetAggregates> fleet;

  bool operator==(const FeatureReport&) const = default;
};

std::string report_to_json(const FeatureReport& report);
FeatureReport report_from_json(const std::string& text);
void write_report(const FeatureReport& report, const std::filesystem::path& path);
FeatureReport read_report(const std::filesystem::path& path);

std::string records_to_json(const std::vector<GenerationRecord>& records);
std::vector<GenerationRecord> records_from_json(const std::string& text);

}  // namespace pmuf
