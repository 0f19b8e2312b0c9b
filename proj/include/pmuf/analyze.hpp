#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pmuf/config.hpp"
#include "pmuf/dataset_io.hpp"
#include "pmuf/report.hpp"

namespace pmuf {

/// Runs every selected analysis on one channel. Conditions the data cannot
/// support (too short, constant, ...) are listed in `issues`; numerical
/// failures propagate.
ChannelReport analyze_channel(const ChannelSeries& series, const AnalyzeOptions& options);

/// Channels are analyzed on `threads` workers (0 picks the hardware count);
/// the report is ordered by (pmu_id, kind) regardless.
FeatureReport analyze_channels(const std::vector<ChannelSeries>& channels, const AnalyzeOptions& options,
                               unsigned threads = 0);

struct AnalyzeCommand {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> out;  // standard output when unset
  AnalyzeOptions options;
  DatasetReadOptions read;
  unsigned threads = 0;
};
FeatureReport cmd_analyze(const AnalyzeCommand& cmd);

struct SynthesisOutput {
  std::vector<ChannelSeries> channels;
  std::vector<GenerationRecord> records;
};
SynthesisOutput synthesize(const SynthesisConfig& config, unsigned threads = 0);

/// Filler policy that recognizes every placeholder the config writes.
FillerPolicy output_policy(const SynthesisConfig& config);

/// Ground truth lands next to the dataset as <stem>.truth.json.
std::filesystem::path truth_path(const std::filesystem::path& dataset_path);

struct SynthesizeCommand {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};
SynthesisOutput cmd_synthesize(const SynthesizeCommand& cmd);

}  // namespace pmuf
