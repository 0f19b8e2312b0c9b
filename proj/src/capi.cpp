#include "pmuf/pmuf.h"

#include <cmath>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "pmuf/analyze.hpp"
#include "pmuf/anomaly.hpp"
#include "pmuf/dataset_io.hpp"
#include "pmuf/error.hpp"
#include "pmuf/modal.hpp"
#include "pmuf/preprocess.hpp"

struct pmuf_series {
  pmuf::ChannelSeries series;
};

struct pmuf_dataset {
  std::vector<pmuf_series> channels;
};

namespace {

thread_local std::string last_error;

// Reports may go to standard output, so diagnostics must not.
void use_stderr_logger() {
  static const bool installed = [] {
    auto logger = spdlog::stderr_color_mt("pmuf");
    logger->set_level(spdlog::level::warn);
    spdlog::set_default_logger(logger);
    return true;
  }();
  (void)installed;
}

template <class F>
pmuf_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return PMUF_OK;
  } catch (const pmuf::Error& e) {
    last_error = e.what();
    return static_cast<pmuf_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PMUF_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PMUF_E_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return PMUF_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) pmuf::fail(pmuf::ErrorCode::InvalidArgument, what);
}

pmuf::ChannelKind to_kind(pmuf_channel_kind k) {
  switch (k) {
    case PMUF_KIND_VOLTAGE_MAGNITUDE: return pmuf::ChannelKind::VoltageMagnitudePU;
    case PMUF_KIND_VOLTAGE_ANGLE: return pmuf::ChannelKind::VoltageAngleDeg;
    case PMUF_KIND_FREQUENCY: return pmuf::ChannelKind::FrequencyHz;
  }
  pmuf::fail(pmuf::ErrorCode::InvalidArgument, "unknown channel kind");
}

pmuf::OutlierConfig to_cfg(const pmuf_outlier_config* c) {
  pmuf::OutlierConfig cfg;
  if (c) {
    cfg.window = c->window;
    cfg.threshold = c->threshold;
    cfg.robust_scale_factor = c->robust_scale_factor;
  }
  return cfg;
}

void emit_outliers(const pmuf::OutlierReport& r, size_t* indices, size_t capacity, size_t* count, double* pct) {
  if (count) *count = r.indices.size();
  if (pct) *pct = r.percentage;
  if (capacity > 0) {
    require(indices != nullptr, "indices buffer is null");
    for (size_t i = 0; i < r.indices.size() && i < capacity; ++i) indices[i] = r.indices[i];
  }
  if (capacity > 0 && capacity < r.indices.size()) {
    throw pmuf::Error(static_cast<pmuf::ErrorCode>(PMUF_E_BUFFER_TOO_SMALL),
                      "outlier buffer holds " + std::to_string(capacity) + " of " +
                          std::to_string(r.indices.size()) + " indices");
  }
}

}  // namespace

extern "C" {

const char* pmuf_version(void) { return "1.0.0"; }

const char* pmuf_status_name(pmuf_status status) {
  switch (status) {
    case PMUF_OK: return "Ok";
    case PMUF_E_BUFFER_TOO_SMALL: return "BufferTooSmall";
    case PMUF_E_INTERNAL: return "Internal";
    default: break;
  }
  const int code = static_cast<int>(status);
  if (code >= 1 && code <= 21) return pmuf::to_string(static_cast<pmuf::ErrorCode>(code)).data();
  return "Unknown";
}

const char* pmuf_last_error(void) { return last_error.c_str(); }

pmuf_status pmuf_set_log_level(const char* level) {
  return guarded([&] {
    require(level != nullptr, "level is null");
    use_stderr_logger();
    const auto parsed = spdlog::level::from_str(level);
    if (parsed == spdlog::level::off && std::string(level) != "off") {
      pmuf::fail(pmuf::ErrorCode::InvalidArgument, std::string("unknown log level '") + level + "'");
    }
    spdlog::set_level(parsed);
  });
}

pmuf_status pmuf_series_create(pmuf_channel_kind kind, double rate_fps, double nominal_hz, double start_time,
                               const double* values, const uint8_t* mask, size_t length, const char* pmu_id,
                               pmuf_series** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = nullptr;
    require(values != nullptr || length == 0, "values is null");
    const pmuf::SamplingSpec spec{rate_fps, nominal_hz, start_time};
    pmuf::validate(spec);
    std::vector<double> v(values, values + length);
    const std::string id = pmu_id ? pmu_id : "";
    if (mask) {
      std::vector<std::uint8_t> m(mask, mask + length);
      for (auto& b : m) b = b ? 1 : 0;
      *out = new pmuf_series{pmuf::ChannelSeries(to_kind(kind), spec, std::move(v), std::move(m), id)};
    } else {
      *out = new pmuf_series{pmuf::new_channel_series(to_kind(kind), spec, std::move(v), {}, id)};
    }
  });
}

void pmuf_series_free(pmuf_series* series) { delete series; }

size_t pmuf_series_length(const pmuf_series* s) { return s ? s->series.size() : 0; }

pmuf_channel_kind pmuf_series_kind(const pmuf_series* s) {
  return static_cast<pmuf_channel_kind>(static_cast<int>(s->series.kind()));
}

double pmuf_series_rate(const pmuf_series* s) { return s ? s->series.spec().rate_fps : NAN; }

const char* pmuf_series_pmu_id(const pmuf_series* s) { return s ? s->series.pmu_id().c_str() : ""; }

pmuf_status pmuf_series_values(const pmuf_series* s, double* out, size_t capacity) {
  return guarded([&] {
    require(s && (out || capacity == 0), "null argument");
    const auto v = s->series.values();
    for (size_t i = 0; i < v.size() && i < capacity; ++i) out[i] = v[i];
  });
}

pmuf_status pmuf_series_mask(const pmuf_series* s, uint8_t* out, size_t capacity) {
  return guarded([&] {
    require(s && (out || capacity == 0), "null argument");
    const auto m = s->series.missing_mask();
    for (size_t i = 0; i < m.size() && i < capacity; ++i) out[i] = m[i];
  });
}

pmuf_status pmuf_extract_noise(const pmuf_series* s, size_t order, double* snr_db, pmuf_series** noise_out) {
  return guarded([&] {
    require(s != nullptr, "series is null");
    if (noise_out) *noise_out = nullptr;
    pmuf::NoiseProfile p = pmuf::extract_noise(s->series, order);
    if (snr_db) *snr_db = p.snr_db;
    if (noise_out) *noise_out = new pmuf_series{std::move(p.noise)};
  });
}

pmuf_status pmuf_median_filter(const pmuf_series* s, size_t order, pmuf_series** out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = nullptr;
    *out = new pmuf_series{pmuf::median_filter(s->series, order)};
  });
}

pmuf_status pmuf_average_variability(const pmuf_series* s, size_t window, double* out) {
  return guarded([&] {
    require(s && out, "null argument");
    *out = pmuf::windowed_stats(s->series, window).average_variability;
  });
}

pmuf_status pmuf_variance_decomposition(const pmuf_series* s, size_t order, pmuf_variance* out) {
  return guarded([&] {
    require(s && out, "null argument");
    const pmuf::VarianceComponents v = pmuf::variance_decomposition(s->series, order);
    *out = {v.total, v.dynamics, v.noise, v.anomaly};
  });
}

pmuf_status pmuf_autocorrelation(const double* values, size_t length, size_t max_lag, double* coefficients,
                                 double* mean_abs) {
  return guarded([&] {
    require(values || length == 0, "values is null");
    const pmuf::AcfResult r = pmuf::autocorrelation(std::span<const double>(values, length), max_lag);
    if (coefficients) {
      for (size_t k = 0; k < r.coefficients.size(); ++k) coefficients[k] = r.coefficients[k];
    }
    if (mean_abs) *mean_abs = r.mean_abs_excl_zero;
  });
}

void pmuf_outlier_config_default(pmuf_outlier_config* cfg) {
  if (!cfg) return;
  const pmuf::OutlierConfig d;
  *cfg = {d.window, d.threshold, d.robust_scale_factor};
}

pmuf_status pmuf_detect_outliers(const pmuf_series* s, const pmuf_outlier_config* cfg, size_t* indices,
                                 size_t capacity, size_t* count, double* percentage) {
  return guarded([&] {
    require(s != nullptr, "series is null");
    emit_outliers(pmuf::detect_outliers(s->series, to_cfg(cfg)), indices, capacity, count, percentage);
  });
}

pmuf_status pmuf_angle_outlier_scan(const pmuf_series* s, const pmuf_outlier_config* cfg, size_t* indices,
                                    size_t capacity, size_t* count, double* percentage) {
  return guarded([&] {
    require(s != nullptr, "series is null");
    emit_outliers(pmuf::angle_outlier_scan(s->series, to_cfg(cfg)), indices, capacity, count, percentage);
  });
}

pmuf_status pmuf_completeness_stats(const pmuf_series* s, pmuf_completeness* out) {
  return guarded([&] {
    require(s && out, "null argument");
    const pmuf::CompletenessStats c = pmuf::completeness(s->series);
    *out = {c.dropout_rate, c.max_gap_samples, c.max_gap_seconds, c.expected_samples, c.dropped_samples};
  });
}

pmuf_status pmuf_estimate_modes(const double* samples, size_t length, double rate_fps, pmuf_mode* modes,
                                size_t capacity, size_t* count) {
  return guarded([&] {
    require(samples || length == 0, "samples is null");
    const auto found = pmuf::estimate_modes(std::span<const double>(samples, length), rate_fps);
    if (count) *count = found.size();
    for (size_t i = 0; i < found.size() && i < capacity; ++i) {
      const auto& m = found[i];
      modes[i] = {m.frequency_hz, m.magnitude, m.damping_factor, m.decay_rate, m.phase_rad};
    }
    if (capacity < found.size() && capacity > 0) {
      throw pmuf::Error(static_cast<pmuf::ErrorCode>(PMUF_E_BUFFER_TOO_SMALL), "mode buffer too small");
    }
  });
}

pmuf_status pmuf_dataset_read(const char* path, pmuf_dataset** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = nullptr;
    auto channels = pmuf::read_dataset(path);
    auto* ds = new pmuf_dataset;
    ds->channels.reserve(channels.size());
    for (auto& c : channels) ds->channels.push_back({std::move(c)});
    *out = ds;
  });
}

pmuf_status pmuf_dataset_write(const pmuf_series* const* channels, size_t count, const char* path) {
  return guarded([&] {
    require(path && (channels || count == 0), "null argument");
    std::vector<pmuf::ChannelSeries> list;
    for (size_t i = 0; i < count; ++i) {
      require(channels[i] != nullptr, "channel is null");
      list.push_back(channels[i]->series);
    }
    pmuf::write_dataset(list, path);
  });
}

size_t pmuf_dataset_size(const pmuf_dataset* ds) { return ds ? ds->channels.size() : 0; }

const pmuf_series* pmuf_dataset_channel(const pmuf_dataset* ds, size_t index) {
  if (!ds || index >= ds->channels.size()) return nullptr;
  return &ds->channels[index];
}

void pmuf_dataset_free(pmuf_dataset* ds) { delete ds; }

void pmuf_analyze_options_default(pmuf_analyze_options* o) {
  if (!o) return;
  const pmuf::AnalyzeOptions d;
  o->analyses = PMUF_ANALYSIS_ALL;
  o->filter_order = d.filter_order;
  o->acf_lags = d.acf_lags;
  o->pencil_window_s = d.pencil.window_s;
  o->pencil_step_s = d.pencil.step_s;
  o->outlier_window = d.outlier.window;
  o->outlier_threshold = d.outlier.threshold;
  o->nominal_hz = 60.0;
  o->filler_values = nullptr;
  o->filler_count = 0;
  o->threads = 0;
}

pmuf_status pmuf_analyze_file(const char* dataset_path, const char* out_path, const pmuf_analyze_options* options) {
  return guarded([&] {
    require(dataset_path != nullptr, "dataset path is null");
    pmuf_analyze_options o;
    pmuf_analyze_options_default(&o);
    if (options) o = *options;

    use_stderr_logger();
    pmuf::AnalyzeCommand cmd;
    cmd.dataset = dataset_path;
    if (out_path) cmd.out = out_path;
    pmuf::AnalysisSet& a = cmd.options.analyses;
    a.noise = o.analyses & PMUF_ANALYSIS_NOISE;
    a.variability = o.analyses & PMUF_ANALYSIS_VARIABILITY;
    a.variance = o.analyses & PMUF_ANALYSIS_VARIANCE;
    a.acf = o.analyses & PMUF_ANALYSIS_ACF;
    a.outliers = o.analyses & PMUF_ANALYSIS_OUTLIERS;
    a.completeness = o.analyses & PMUF_ANALYSIS_COMPLETENESS;
    a.modal = o.analyses & PMUF_ANALYSIS_MODAL;
    cmd.options.filter_order = o.filter_order;
    cmd.options.acf_lags = o.acf_lags;
    cmd.options.pencil.window_s = o.pencil_window_s;
    cmd.options.pencil.step_s = o.pencil_step_s;
    cmd.options.outlier.window = o.outlier_window;
    cmd.options.outlier.threshold = o.outlier_threshold;
    cmd.read.nominal_hz = o.nominal_hz;
    if (o.filler_values) {
      cmd.read.policy.filler_values.assign(o.filler_values, o.filler_values + o.filler_count);
    }
    cmd.threads = o.threads;
    pmuf::cmd_analyze(cmd);
  });
}

pmuf_status pmuf_synthesize_file(const char* config_path, const char* out_path, const uint64_t* seed,
                                 unsigned threads) {
  return guarded([&] {
    require(config_path && out_path, "null argument");
    use_stderr_logger();
    pmuf::SynthesizeCommand cmd;
    cmd.config = config_path;
    cmd.out = out_path;
    if (seed) cmd.seed = *seed;
    cmd.threads = threads;
    pmuf::cmd_synthesize(cmd);
  });
}

}  // extern "C"
