#include "pmuf/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string_view>

#include "pmuf/error.hpp"

namespace pmuf {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void split_row(std::string_view line, std::vector<std::string_view>& cells) {
  cells.clear();
  std::size_t begin = 0;
  while (true) {
    const std::size_t comma = line.find(',', begin);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(begin)));
      return;
    }
    cells.push_back(trim(line.substr(begin, comma - begin)));
    begin = comma + 1;
  }
}

std::string location(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

// Returns false when the cell is not a number; empty and NaN spellings give NaN.
bool parse_cell(std::string_view cell, double& out) {
  if (cell.empty() || cell == "NaN" || cell == "nan" || cell == "NAN") {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (cell.front() == '+') cell.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

struct Column {
  std::string pmu;
  ChannelKind kind;
};

Column split_column(std::string_view name, std::size_t col) {
  const std::size_t us = name.rfind('_');
  if (us == std::string_view::npos || us == 0) {
    fail(ErrorCode::ParseError, "header column " + std::to_string(col) + " '" + std::string(name) +
                                    "' is not <pmu>_<vm|va|freq>");
  }
  try {
    return {std::string(name.substr(0, us)), kind_from_suffix(name.substr(us + 1))};
  } catch (const Error&) {
    fail(ErrorCode::ParseError, "header column " + std::to_string(col) + " '" + std::string(name) +
                                    "' has an unknown channel suffix");
  }
}

}  // namespace

std::string column_name(const ChannelSeries& series) {
  return series.pmu_id() + "_" + std::string(column_suffix(series.kind()));
}

std::vector<ChannelSeries> parse_dataset(const std::string& text, const DatasetReadOptions& options) {
  validate(options.policy);
  std::vector<std::string_view> lines;
  {
    std::string_view rest(text);
    while (!rest.empty()) {
      const std::size_t nl = rest.find('\n');
      std::string_view line = rest.substr(0, nl);
      if (!trim(line).empty()) lines.push_back(line);
      if (nl == std::string_view::npos) break;
      rest.remove_prefix(nl + 1);
    }
  }
  if (lines.empty()) fail(ErrorCode::ParseError, "dataset is empty, expected a header row");

  std::vector<std::string_view> cells;
  split_row(lines[0], cells);
  if (cells.empty() || cells[0] != "timestamp") {
    fail(ErrorCode::ParseError, "row 1, column 1: first header cell must be 'timestamp'");
  }
  const std::size_t width = cells.size();
  std::vector<Column> columns;
  for (std::size_t c = 1; c < width; ++c) {
    for (std::size_t prev = 1; prev < c; ++prev) {
      if (cells[prev] == cells[c]) {
        fail(ErrorCode::ParseError, "header column " + std::to_string(c + 1) + " '" + std::string(cells[c]) +
                                        "' repeats column " + std::to_string(prev + 1));
      }
    }
    columns.push_back(split_column(cells[c], c + 1));
  }
  const std::size_t rows = lines.size() - 1;
  if (rows == 0) fail(ErrorCode::EmptySeries, "dataset has a header but no samples");

  std::vector<double> times(rows);
  std::vector<std::vector<double>> values(columns.size(), std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t file_row = r + 2;
    split_row(lines[r + 1], cells);
    if (cells.size() != width) {
      fail(ErrorCode::RaggedRow, "row " + std::to_string(file_row) + " has " +
                                     std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(width));
    }
    if (!parse_cell(cells[0], times[r]) || !std::isfinite(times[r])) {
      fail(ErrorCode::ParseError, location(file_row, 1) + ": bad timestamp '" + std::string(cells[0]) + "'");
    }
    for (std::size_t c = 1; c < width; ++c) {
      if (!parse_cell(cells[c], values[c - 1][r])) {
        fail(ErrorCode::ParseError, location(file_row, c + 1) + ": cannot parse '" + std::string(cells[c]) + "'");
      }
    }
  }

  SamplingSpec spec;
  spec.nominal_hz = options.nominal_hz;
  spec.start_time = times[0];
  if (rows == 1) {
    spec.rate_fps = options.rate_fps_single_row;
  } else {
    for (std::size_t r = 1; r < rows; ++r) {
      if (!(times[r] > times[r - 1])) {
        fail(ErrorCode::NonUniformTimestamps, "row " + std::to_string(r + 2) + ": timestamps must increase");
      }
    }
    double rate = static_cast<double>(rows - 1) / (times[rows - 1] - times[0]);
    const double nearest = std::round(rate);
    if (nearest > 0.0 && std::abs(rate - nearest) <= 1e-6 * nearest) rate = nearest;
    spec.rate_fps = rate;
    for (std::size_t r = 0; r < rows; ++r) {
      if (std::abs(times[r] - spec.timestamp(r)) > 1e-6) {
        fail(ErrorCode::NonUniformTimestamps,
             "row " + std::to_string(r + 2) + ": timestamp " + std::to_string(times[r]) +
                 " is off the " + std::to_string(rate) + " fps grid");
      }
    }
  }
  validate(spec);

  std::vector<ChannelSeries> out;
  out.reserve(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    std::vector<std::uint8_t> mask(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const double v = values[c][r];
      mask[r] = options.policy.is_missing(v) ? 1 : 0;
      if (!mask[r] && !std::isfinite(v)) {
        fail(ErrorCode::ParseError, location(r + 2, c + 2) + ": non-finite sample not covered by the filler policy");
      }
    }
    out.emplace_back(columns[c].kind, spec, std::move(values[c]), std::move(mask), columns[c].pmu);
  }
  return out;
}

std::vector<ChannelSeries> read_dataset(const std::filesystem::path& path, const DatasetReadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open dataset '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_dataset(buf.str(), options);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string format_dataset(const std::vector<ChannelSeries>& channels, const FillerPolicy& policy) {
  if (channels.empty()) fail(ErrorCode::InvalidArgument, "no channels to write");
  const SamplingSpec& spec = channels.front().spec();
  const std::size_t n = channels.front().size();
  for (const ChannelSeries& ch : channels) {
    if (!(ch.spec() == spec)) fail(ErrorCode::MixedRates, "channel " + column_name(ch) + " has a different sampling spec");
    if (ch.size() != n) fail(ErrorCode::MixedRates, "channel " + column_name(ch) + " has a different length");
    if (ch.pmu_id().empty() || ch.pmu_id().find(',') != std::string::npos) {
      fail(ErrorCode::InvalidArgument, "pmu id '" + ch.pmu_id() + "' cannot be written as a column name");
    }
    if (ch.kind() == ChannelKind::VoltageAngleDeg && ch.angle_wrap() == AngleWrap::Unwrapped) {
      fail(ErrorCode::InvalidArgument, "channel " + column_name(ch) + " holds unwrapped angles");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double v = ch.value(i);
      const bool recognized = policy.is_missing(v);
      if (ch.missing(i) != recognized) {
        fail(ErrorCode::InvalidArgument, "channel " + column_name(ch) + " sample " + std::to_string(i) +
                                             (ch.missing(i) ? " is missing with a placeholder the filler policy does not recognize"
                                                            : " collides with a filler value"));
      }
    }
  }

  std::string out;
  out.reserve((channels.size() + 1) * n * 12);
  out += "timestamp";
  for (const ChannelSeries& ch : channels) {
    out += ',';
    out += column_name(ch);
  }
  out += '\n';
  for (std::size_t i = 0; i < n; ++i) {
    append_number(out, spec.timestamp(i));
    for (const ChannelSeries& ch : channels) {
      out += ',';
      const double v = ch.value(i);
      if (!std::isnan(v)) append_number(out, v);
    }
    out += '\n';
  }
  return out;
}

void write_dataset(const std::vector<ChannelSeries>& channels, const std::filesystem::path& path,
                   const FillerPolicy& policy) {
  const std::string text = format_dataset(channels, policy);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) fail(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

}  // namespace pmuf
