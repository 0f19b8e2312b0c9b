#include "pmuf/signal_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "pmuf/error.hpp"

namespace pmuf {

void validate(const SamplingSpec& spec) {
  if (!(spec.rate_fps > 0.0) || !std::isfinite(spec.rate_fps)) {
    fail(ErrorCode::InvalidSpec, "rate_fps must be positive, got " + std::to_string(spec.rate_fps));
  }
  if (!(spec.nominal_hz > 0.0) || !std::isfinite(spec.nominal_hz)) {
    fail(ErrorCode::InvalidSpec, "nominal_hz must be positive, got " + std::to_string(spec.nominal_hz));
  }
  if (!std::isfinite(spec.start_time)) {
    fail(ErrorCode::InvalidSpec, "start_time must be finite");
  }
}

std::string_view column_suffix(ChannelKind kind) noexcept {
  switch (kind) {
    case ChannelKind::VoltageMagnitudePU: return "vm";
    case ChannelKind::VoltageAngleDeg: return "va";
    case ChannelKind::FrequencyHz: return "freq";
  }
  return "vm";
}

std::string_view to_string(ChannelKind kind) noexcept {
  switch (kind) {
    case ChannelKind::VoltageMagnitudePU: return "voltage_magnitude_pu";
    case ChannelKind::VoltageAngleDeg: return "voltage_angle_deg";
    case ChannelKind::FrequencyHz: return "frequency_hz";
  }
  return "voltage_magnitude_pu";
}

ChannelKind kind_from_suffix(std::string_view suffix) {
  if (suffix == "vm") return ChannelKind::VoltageMagnitudePU;
  if (suffix == "va") return ChannelKind::VoltageAngleDeg;
  if (suffix == "freq") return ChannelKind::FrequencyHz;
  fail(ErrorCode::InvalidArgument, "unknown channel suffix '" + std::string(suffix) + "'");
}

bool FillerPolicy::is_missing(double value) const noexcept {
  if (std::isnan(value)) return treat_nan_as_missing;
  return std::find(filler_values.begin(), filler_values.end(), value) != filler_values.end();
}

void validate(const FillerPolicy& policy) {
  for (double f : policy.filler_values) {
    if (!std::isfinite(f)) fail(ErrorCode::InvalidSpec, "filler values must be finite");
  }
  if (!policy.treat_nan_as_missing && policy.filler_values.empty()) {
    fail(ErrorCode::InvalidSpec, "filler policy needs filler values when NaN is not treated as missing");
  }
}

double normalize_angle_deg(double degrees) noexcept {
  if (degrees >= -180.0 && degrees < 180.0) return degrees;
  double wrapped = std::fmod(degrees + 180.0, 360.0);
  if (wrapped < 0.0) wrapped += 360.0;
  wrapped -= 180.0;
  // fmod rounding can land exactly on the open end.
  if (wrapped >= 180.0) wrapped -= 360.0;
  return wrapped;
}

ChannelSeries::ChannelSeries(ChannelKind kind, SamplingSpec spec, std::vector<double> values,
                             std::vector<std::uint8_t> missing_mask, std::string pmu_id,
                             AngleWrap wrap)
    : kind_(kind),
      spec_(spec),
      values_(std::move(values)),
      mask_(std::move(missing_mask)),
      pmu_id_(std::move(pmu_id)),
      wrap_(kind == ChannelKind::VoltageAngleDeg ? wrap : AngleWrap::Wrapped) {
  validate(spec_);
  if (values_.empty()) fail(ErrorCode::EmptySeries, "series has no samples");
  if (values_.size() != mask_.size()) {
    fail(ErrorCode::InvalidArgument, "values and missing mask differ in length");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (mask_[i] != 0) {
      mask_[i] = 1;
      continue;
    }
    if (!std::isfinite(values_[i])) {
      fail(ErrorCode::InvalidArgument,
           "non-missing sample " + std::to_string(i) + " is not finite");
    }
    if (kind_ == ChannelKind::VoltageAngleDeg && wrap_ == AngleWrap::Wrapped) values_[i] = normalize_angle_deg(values_[i]);
  }
}

std::size_t ChannelSeries::missing_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

ChannelSeries ChannelSeries::with_samples(std::vector<double> values,
                                          std::vector<std::uint8_t> missing_mask) const {
  return ChannelSeries(kind_, spec_, std::move(values), std::move(missing_mask), pmu_id_, wrap_);
}

ChannelSeries ChannelSeries::with_kind(ChannelKind kind) const {
  return ChannelSeries(kind, spec_, values_, mask_, pmu_id_, wrap_);
}

ChannelSeries ChannelSeries::with_wrap(AngleWrap wrap) const {
  return ChannelSeries(kind_, spec_, values_, mask_, pmu_id_, wrap);
}

ChannelSeries ChannelSeries::with_pmu_id(std::string pmu_id) const {
  ChannelSeries copy = *this;
  copy.pmu_id_ = std::move(pmu_id);
  return copy;
}

bool operator==(const ChannelSeries& a, const ChannelSeries& b) {
  if (a.kind_ != b.kind_ || a.wrap_ != b.wrap_ || !(a.spec_ == b.spec_) || a.pmu_id_ != b.pmu_id_ ||
      a.mask_ != b.mask_ || a.values_.size() != b.values_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.values_.size(); ++i) {
    const double x = a.values_[i];
    const double y = b.values_[i];
    if (std::isnan(x) && std::isnan(y)) continue;
    if (std::memcmp(&x, &y, sizeof x) != 0) return false;
  }
  return true;
}

ChannelSeries new_channel_series(ChannelKind kind, const SamplingSpec& spec,
                                 std::vector<double> values, const FillerPolicy& policy,
                                 std::string pmu_id) {
  validate(spec);
  validate(policy);
  if (values.empty()) fail(ErrorCode::EmptySeries, "series has no samples");
  std::vector<std::uint8_t> mask(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) mask[i] = policy.is_missing(values[i]) ? 1 : 0;
  return ChannelSeries(kind, spec, std::move(values), std::move(mask), std::move(pmu_id));
}

namespace {

std::vector<Segment> runs_of(std::span<const std::uint8_t> mask, std::uint8_t wanted) {
  std::vector<Segment> runs;
  std::size_t i = 0;
  while (i < mask.size()) {
    if (mask[i] != wanted) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < mask.size() && mask[i] == wanted) ++i;
    runs.push_back({start, i - start});
  }
  return runs;
}

}  // namespace

std::vector<Segment> valid_segments(const ChannelSeries& series) {
  return runs_of(series.missing_mask(), 0);
}

std::vector<Segment> missing_runs(std::span<const std::uint8_t> mask) {
  return runs_of(mask, 1);
}

}  // namespace pmuf
