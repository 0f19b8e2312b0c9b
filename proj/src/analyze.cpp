#include "pmuf/analyze.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include <spdlog/spdlog.h>

#include "pmuf/error.hpp"

namespace pmuf {

namespace {

bool recoverable(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooShort:
    case ErrorCode::TooFewSamples:
    case ErrorCode::WindowTooLarge:
    case ErrorCode::OrderTooLarge:
    case ErrorCode::ConstantSeries:
    case ErrorCode::DegenerateSignal:
      return true;
    default:
      return false;
  }
}

template <class F>
void attempt(ChannelReport& report, const char* analysis, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (!recoverable(e.code())) throw;
    report.issues.push_back(std::string(analysis) + ": " + e.what());
  }
}

// Noise samples after the warm-up, longest run without missing samples.
std::vector<double> longest_noise_run(const NoiseProfile& profile) {
  const ChannelSeries& noise = profile.noise;
  std::size_t best_start = 0, best_len = 0, start = profile.warmup_samples, len = 0;
  for (std::size_t i = profile.warmup_samples; i < noise.size(); ++i) {
    if (noise.missing(i)) {
      len = 0;
      start = i + 1;
      continue;
    }
    if (++len > best_len) {
      best_len = len;
      best_start = start;
    }
  }
  const auto v = noise.values().subspan(best_start, best_len);
  return {v.begin(), v.end()};
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  // First failure in channel order, so the diagnostic is deterministic.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string channel_label(const ChannelSeries& s) { return column_name(s); }

}  // namespace

ChannelReport analyze_channel(const ChannelSeries& series, const AnalyzeOptions& opt) {
  ChannelReport report;
  report.pmu_id = series.pmu_id();
  report.kind = series.kind();
  report.samples = series.size();
  const AnalysisSet& a = opt.analyses;

  const bool angle = series.kind() == ChannelKind::VoltageAngleDeg;
  const ChannelSeries work = angle ? angle_unwrap(series) : series;

  if (a.noise || a.acf) {
    attempt(report, "noise", [&] {
      const NoiseProfile profile = extract_noise(work, opt.filter_order);
      if (a.noise) report.noise = NoiseSummary{profile.snr_db, profile.mean, profile.std_dev, profile.warmup_samples};
      if (a.acf) {
        attempt(report, "acf", [&] {
          const std::vector<double> run = longest_noise_run(profile);
          AcfSummary s;
          s.acf = autocorrelation(run, opt.acf_lags);
          s.samples_used = run.size();
          s.iid = iid_score(s.acf);
          report.acf = std::move(s);
        });
      }
    });
  }
  if (a.variability) {
    attempt(report, "variability", [&] {
      report.average_variability = windowed_stats(work, opt.variability_window).average_variability;
    });
  }
  if (a.variance) {
    attempt(report, "variance", [&] { report.variance = variance_decomposition(work, opt.filter_order, opt.outlier); });
  }
  if (a.outliers) {
    attempt(report, "outliers", [&] {
      report.outliers = angle ? angle_outlier_scan(series, opt.outlier) : detect_outliers(series, opt.outlier);
    });
  }
  if (a.completeness) report.completeness = completeness(series);
  if (a.modal) {
    attempt(report, "modal", [&] {
      ModalSummary m;
      m.track = sliding_modal_scan(work, opt.pencil);
      m.flagged_windows = flag_disturbance_windows(m.track, opt.disturbance_mode_count, opt.disturbance_low_hz);
      report.modal = std::move(m);
    });
  }
  return report;
}

FeatureReport analyze_channels(const std::vector<ChannelSeries>& channels, const AnalyzeOptions& options,
                               unsigned threads) {
  if (channels.empty()) fail(ErrorCode::InvalidArgument, "no channels to analyze");
  validate(options.outlier);
  validate(options.pencil);

  std::vector<std::size_t> order(channels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& a = channels[x];
    const auto& b = channels[y];
    if (a.pmu_id() != b.pmu_id()) return a.pmu_id() < b.pmu_id();
    return static_cast<int>(a.kind()) < static_cast<int>(b.kind());
  });

  FeatureReport report;
  report.sampling = channels.front().spec();
  report.options = options;
  report.channels.resize(channels.size());
  parallel_for(channels.size(), threads, [&](std::size_t k) {
    const ChannelSeries& ch = channels[order[k]];
    try {
      report.channels[k] = analyze_channel(ch, options);
    } catch (const Error& e) {
      throw Error(e.code(), "channel " + channel_label(ch) + ": " + e.what());
    }
    spdlog::debug("analyzed {}", channel_label(ch));
  });

  const bool fleet = options.analyses.outliers && options.analyses.completeness &&
                     std::all_of(report.channels.begin(), report.channels.end(),
                                 [](const ChannelReport& c) { return c.outliers.has_value(); });
  if (fleet) {
    FleetReport f;
    f.thresholds = options.fleet;
    for (const ChannelReport& c : report.channels) {
      f.channels.push_back({c.pmu_id, c.kind, *c.outliers, *c.completeness});
    }
    aggregate_fleet(f);
    report.fleet = FleetAggregates{f.thresholds,          f.channels.size(),   f.high_dropout_count,
                                   f.high_dropout_fraction, f.long_gap_count,  f.long_gap_fraction,
                                   f.any_missing_count,   f.any_missing_fraction};
  }
  return report;
}

FeatureReport cmd_analyze(const AnalyzeCommand& cmd) {
  spdlog::info("reading {}", cmd.dataset.string());
  const std::vector<ChannelSeries> channels = read_dataset(cmd.dataset, cmd.read);
  spdlog::info("analyzing {} channels of {} samples", channels.size(), channels.front().size());
  FeatureReport report = analyze_channels(channels, cmd.options, cmd.threads);
  report.source = cmd.dataset.filename().string();
  if (cmd.out) {
    write_report(report, *cmd.out);
    spdlog::info("report written to {}", cmd.out->string());
  } else {
    std::cout << report_to_json(report);
  }
  return report;
}

SynthesisOutput synthesize(const SynthesisConfig& config, unsigned threads) {
  const std::size_t n = config.baselines.size();
  SynthesisOutput out;
  std::vector<std::optional<Generated>> results(n);
  parallel_for(n, threads, [&](std::size_t i) {
    try {
      results[i] = run_pipeline(config.baselines[i], config.injections[i]);
    } catch (const Error& e) {
      throw Error(e.code(), "channel " + config.baselines[i].pmu_id + "_" +
                                std::string(column_suffix(config.baselines[i].kind)) + ": " + e.what());
    }
  });
  for (auto& r : results) {
    out.channels.push_back(std::move(r->series));
    out.records.push_back(std::move(r->record));
  }
  return out;
}

FillerPolicy output_policy(const SynthesisConfig& config) {
  FillerPolicy policy;
  for (const InjectionSpec& inj : config.injections) {
    if (inj.missing && inj.missing->filler_value) {
      const double v = *inj.missing->filler_value;
      if (std::find(policy.filler_values.begin(), policy.filler_values.end(), v) == policy.filler_values.end()) {
        policy.filler_values.push_back(v);
      }
    }
  }
  return policy;
}

std::filesystem::path truth_path(const std::filesystem::path& dataset_path) {
  std::filesystem::path p = dataset_path;
  p.replace_extension(".truth.json");
  return p;
}

SynthesisOutput cmd_synthesize(const SynthesizeCommand& cmd) {
  SynthesisConfig config = parse_config(cmd.config);
  if (cmd.seed) reseed(config, *cmd.seed);
  spdlog::info("synthesizing {} channels, seed {}", config.baselines.size(), config.seed);
  SynthesisOutput out = synthesize(config, cmd.threads);
  write_dataset(out.channels, cmd.out, output_policy(config));
  const std::filesystem::path truth = truth_path(cmd.out);
  std::ofstream t(truth, std::ios::binary | std::ios::trunc);
  if (!t) fail(ErrorCode::IoError, "cannot open '" + truth.string() + "' for writing");
  t << records_to_json(out.records);
  if (!t) fail(ErrorCode::IoError, "write to '" + truth.string() + "' failed");
  spdlog::info("wrote {} and {}", cmd.out.string(), truth.string());
  return out;
}

}  // namespace pmuf
