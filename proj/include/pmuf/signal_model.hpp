#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pmuf {

/// Uniform reporting grid of a channel. Sample i sits at
/// start_time + i / rate_fps, computed from the integer index so long records
/// do not accumulate drift.
struct SamplingSpec {
  double rate_fps = 30.0;
  double nominal_hz = 60.0;
  double start_time = 0.0;

  double timestamp(std::size_t index) const noexcept {
    return start_time + static_cast<double>(index) / rate_fps;
  }
  double nyquist_hz() const noexcept { return rate_fps / 2.0; }

  bool operator==(const SamplingSpec&) const = default;
};

void validate(const SamplingSpec& spec);

enum class ChannelKind { VoltageMagnitudePU, VoltageAngleDeg, FrequencyHz };

/// Column suffix used by the dataset layout: "vm", "va" or "freq".
std::string_view column_suffix(ChannelKind kind) noexcept;
ChannelKind kind_from_suffix(std::string_view suffix);
std::string_view to_string(ChannelKind kind) noexcept;

/// Which raw values denote a dropped sample.
struct FillerPolicy {
  std::vector<double> filler_values{9999.0, -9999.0};
  bool treat_nan_as_missing = true;

  bool is_missing(double value) const noexcept;

  static FillerPolicy nan_only() { return FillerPolicy{{}, true}; }

  bool operator==(const FillerPolicy&) const = default;
};

void validate(const FillerPolicy& policy);

/// Wraps an angle in degrees into [-180, 180). Values already inside the
/// interval are returned bit-for-bit.
double normalize_angle_deg(double degrees) noexcept;

/// Whether an angle channel is kept inside [-180, 180) or carries unwrapped
/// (continuous) degrees. Ignored for non-angle kinds.
enum class AngleWrap { Wrapped, Unwrapped };

struct Segment {
  std::size_t start = 0;
  std::size_t length = 0;
  bool operator==(const Segment&) const = default;
};

/// One PMU channel: uniformly sampled values plus a missing-sample mask.
/// Missing samples keep their placeholder (a filler value or NaN) in
/// values(). Instances are immutable; every transform returns a new series.
class ChannelSeries {
 public:
  /// Builds a series from values and an explicit mask. Non-missing values
  /// must be finite; angle channels are wrapped into [-180, 180).
  ChannelSeries(ChannelKind kind, SamplingSpec spec, std::vector<double> values,
                std::vector<std::uint8_t> missing_mask, std::string pmu_id = {},
                AngleWrap wrap = AngleWrap::Wrapped);

  ChannelKind kind() const noexcept { return kind_; }
  const SamplingSpec& spec() const noexcept { return spec_; }
  const std::string& pmu_id() const noexcept { return pmu_id_; }
  AngleWrap angle_wrap() const noexcept { return wrap_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<const std::uint8_t> missing_mask() const noexcept { return mask_; }
  double value(std::size_t i) const { return values_[i]; }
  bool missing(std::size_t i) const { return mask_[i] != 0; }
  std::size_t missing_count() const noexcept;
  double duration_s() const noexcept {
    return static_cast<double>(values_.size()) / spec_.rate_fps;
  }

  /// Same metadata, new samples.
  ChannelSeries with_samples(std::vector<double> values,
                             std::vector<std::uint8_t> missing_mask) const;
  ChannelSeries with_kind(ChannelKind kind) const;
  ChannelSeries with_wrap(AngleWrap wrap) const;
  ChannelSeries with_pmu_id(std::string pmu_id) const;

  /// Bitwise equality; NaN placeholders compare equal to NaN placeholders.
  friend bool operator==(const ChannelSeries& a, const ChannelSeries& b);

 private:
  ChannelKind kind_;
  SamplingSpec spec_;
  std::vector<double> values_;
  std::vector<std::uint8_t> mask_;
  std::string pmu_id_;
  AngleWrap wrap_;
};

/// Derives the missing mask by matching each value against the policy.
ChannelSeries new_channel_series(ChannelKind kind, const SamplingSpec& spec,
                                 std::vector<double> values,
                                 const FillerPolicy& policy = {},
                                 std::string pmu_id = {});

/// Maximal runs of contiguous non-missing samples, in order.
std::vector<Segment> valid_segments(const ChannelSeries& series);
std::vector<Segment> missing_runs(std::span<const std::uint8_t> mask);

}  // namespace pmuf
