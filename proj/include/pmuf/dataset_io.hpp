#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pmuf/signal_model.hpp"

namespace pmuf {

/// Wide CSV layout: a `timestamp` column followed by `<pmu>_vm`, `<pmu>_va`
/// and `<pmu>_freq` columns. A PMU may carry any subset of the three.
struct DatasetReadOptions {
  FillerPolicy policy;
  double nominal_hz = 60.0;
  double rate_fps_single_row = 30.0;  // a one-row file carries no spacing
};

std::vector<ChannelSeries> read_dataset(const std::filesystem::path& path,
                                        const DatasetReadOptions& options = {});
std::vector<ChannelSeries> parse_dataset(const std::string& text, const DatasetReadOptions& options = {});

/// Missing samples holding NaN become empty cells; filler placeholders are
/// written verbatim and must be recognized by `policy` so the file reads back
/// identically.
void write_dataset(const std::vector<ChannelSeries>& channels, const std::filesystem::path& path,
                   const FillerPolicy& policy = {});
std::string format_dataset(const std::vector<ChannelSeries>& channels, const FillerPolicy& policy = {});

/// "<pmu>_<suffix>"
std::string column_name(const ChannelSeries& series);

}  // namespace pmuf
