#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "pmuf/signal_model.hpp"

namespace pmuf {

/// One damped sinusoid fitted to a data window.
/// damping_factor is the damping ratio zeta = -sigma / sqrt(sigma^2 + omega^2)
/// of the continuous pole sigma +/- j omega; positive means decaying.
struct ModeEstimate {
  double frequency_hz = 0.0;
  double magnitude = 0.0;
  double damping_factor = 0.0;
  double window_start_s = 0.0;
  double decay_rate = 0.0;  // sigma, 1/s
  double phase_rad = 0.0;   // phase of the residue at the window's first sample

  bool operator==(const ModeEstimate&) const = default;
};

struct PencilConfig {
  double window_s = 10.0;
  double step_s = 5.0;
  double pencil_ratio = 1.0 / 3.0;
  double sv_threshold = 1e-3;
  double min_magnitude_frac = 0.05;
  // Upper bound on the retained singular vectors. At PMU noise levels the
  // relative cutoff alone keeps the full pencil order.
  std::size_t max_model_order = 30;

  bool operator==(const PencilConfig&) const = default;
};

void validate(const PencilConfig& cfg);

struct ModeWindow {
  double start_s = 0.0;
  bool skipped = false;  // window held missing samples
  std::vector<ModeEstimate> modes;

  bool operator==(const ModeWindow&) const = default;
};

/// Windows of a sliding scan, including skipped ones, in start order.
struct ModeTrack {
  PencilConfig config;
  std::vector<ModeWindow> windows;

  bool operator==(const ModeTrack&) const = default;
};

enum class BandLabel { SubSynchronousLow, Electromechanical, Control };

std::string_view to_string(BandLabel band) noexcept;

/// Matrix-pencil fit of a gap-free window. The mean is removed first; modes
/// come back sorted by descending magnitude with insignificant ones dropped.
std::vector<ModeEstimate> estimate_modes(std::span<const double> samples, double rate_fps,
                                         const PencilConfig& cfg = {});

/// Evaluates the fitted modes at n samples (the mean-removed signal model).
std::vector<double> reconstruct(std::span<const ModeEstimate> modes, std::size_t n, double rate_fps);

/// Windows start at 0, step_s, 2 step_s, ... seconds from the series start.
ModeTrack sliding_modal_scan(const ChannelSeries& series, const PencilConfig& cfg = {});

BandLabel classify_band(const ModeEstimate& mode);

/// Start times of the non-skipped windows holding at least
/// mode_count_threshold oscillatory modes below low_freq_hz.
std::vector<double> flag_disturbance_windows(const ModeTrack& track,
                                             std::size_t mode_count_threshold = 4,
                                             double low_freq_hz = 0.3);

}  // namespace pmuf
