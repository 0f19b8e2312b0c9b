#include "pmuf/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "pmuf/error.hpp"

namespace pmuf {

namespace {

using nlohmann::json;

json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double to_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  fail(ErrorCode::SchemaError, "expected a number, got " + j.dump());
}

json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

std::vector<double> to_nums(const json& j) {
  std::vector<double> v;
  for (const json& x : j) v.push_back(to_num(x));
  return v;
}

template <class T>
json opt(const std::optional<T>& v, json (*f)(const T&)) {
  return v ? f(*v) : json(nullptr);
}

ChannelKind to_kind(const json& j) {
  return kind_from_suffix(j.get<std::string>());
}

json kind_json(ChannelKind k) { return std::string(column_suffix(k)); }

// --- analysis results -------------------------------------------------------

json to_json(const NoiseSummary& n) {
  return {{"snr_db", num(n.snr_db)}, {"mean", num(n.mean)}, {"std_dev", num(n.std_dev)},
          {"warmup_samples", n.warmup_samples}};
}
NoiseSummary noise_from(const json& j) {
  return {to_num(j.at("snr_db")), to_num(j.at("mean")), to_num(j.at("std_dev")),
          j.at("warmup_samples").get<std::size_t>()};
}

json to_json(const VarianceComponents& v) {
  return {{"total", num(v.total)}, {"dynamics", num(v.dynamics)}, {"noise", num(v.noise)},
          {"anomaly", num(v.anomaly)}};
}
VarianceComponents variance_from(const json& j) {
  return {to_num(j.at("total")), to_num(j.at("dynamics")), to_num(j.at("noise")), to_num(j.at("anomaly"))};
}

json to_json(const AcfSummary& a) {
  return {{"max_lag", a.acf.max_lag},
          {"coefficients", nums(a.acf.coefficients)},
          {"mean_abs_excl_zero", num(a.acf.mean_abs_excl_zero)},
          {"samples_used", a.samples_used},
          {"iid", a.iid}};
}
AcfSummary acf_from(const json& j) {
  AcfSummary a;
  a.acf.max_lag = j.at("max_lag").get<std::size_t>();
  a.acf.coefficients = to_nums(j.at("coefficients"));
  a.acf.mean_abs_excl_zero = to_num(j.at("mean_abs_excl_zero"));
  a.samples_used = j.at("samples_used").get<std::size_t>();
  a.iid = j.at("iid").get<bool>();
  return a;
}

json to_json(const OutlierReport& o) {
  return {{"indices", o.indices}, {"count", o.indices.size()}, {"percentage", num(o.percentage)},
          {"total_samples", o.total_samples}};
}
OutlierReport outliers_from(const json& j) {
  return {j.at("indices").get<std::vector<std::size_t>>(), to_num(j.at("percentage")),
          j.at("total_samples").get<std::size_t>()};
}

json to_json(const CompletenessStats& c) {
  return {{"dropout_rate", num(c.dropout_rate)}, {"max_gap_samples", c.max_gap_samples},
          {"max_gap_seconds", num(c.max_gap_seconds)}, {"expected_samples", c.expected_samples},
          {"dropped_samples", c.dropped_samples}};
}
CompletenessStats completeness_from(const json& j) {
  return {to_num(j.at("dropout_rate")), j.at("max_gap_samples").get<std::size_t>(),
          to_num(j.at("max_gap_seconds")), j.at("expected_samples").get<std::size_t>(),
          j.at("dropped_samples").get<std::size_t>()};
}

json to_json(const PencilConfig& p) {
  return {{"window_s", num(p.window_s)},         {"step_s", num(p.step_s)},
          {"pencil_ratio", num(p.pencil_ratio)}, {"sv_threshold", num(p.sv_threshold)},
          {"min_magnitude_frac", num(p.min_magnitude_frac)}, {"max_model_order", p.max_model_order}};
}
PencilConfig pencil_from(const json& j) {
  PencilConfig p;
  p.window_s = to_num(j.at("window_s"));
  p.step_s = to_num(j.at("step_s"));
  p.pencil_ratio = to_num(j.at("pencil_ratio"));
  p.sv_threshold = to_num(j.at("sv_threshold"));
  p.min_magnitude_frac = to_num(j.at("min_magnitude_frac"));
  p.max_model_order = j.at("max_model_order").get<std::size_t>();
  return p;
}

json to_json(const ModalSummary& m) {
  json windows = json::array();
  for (const ModeWindow& w : m.track.windows) {
    json modes = json::array();
    for (const ModeEstimate& e : w.modes) {
      modes.push_back({{"frequency_hz", num(e.frequency_hz)},
                       {"magnitude", num(e.magnitude)},
                       {"damping_factor", num(e.damping_factor)},
                       {"decay_rate", num(e.decay_rate)},
                       {"phase_rad", num(e.phase_rad)},
                       {"band", std::string(to_string(classify_band(e)))}});
    }
    windows.push_back({{"start_s", num(w.start_s)}, {"skipped", w.skipped}, {"modes", modes}});
  }
  return {{"config", to_json(m.track.config)}, {"windows", windows},
          {"flagged_windows", nums(m.flagged_windows)}};
}
ModalSummary modal_from(const json& j) {
  ModalSummary m;
  m.track.config = pencil_from(j.at("config"));
  for (const json& w : j.at("windows")) {
    ModeWindow win;
    win.start_s = to_num(w.at("start_s"));
    win.skipped = w.at("skipped").get<bool>();
    for (const json& e : w.at("modes")) {
      ModeEstimate est;
      est.frequency_hz = to_num(e.at("frequency_hz"));
      est.magnitude = to_num(e.at("magnitude"));
      est.damping_factor = to_num(e.at("damping_factor"));
      est.decay_rate = to_num(e.at("decay_rate"));
      est.phase_rad = to_num(e.at("phase_rad"));
      est.window_start_s = win.start_s;
      win.modes.push_back(est);
    }
    m.track.windows.push_back(std::move(win));
  }
  m.flagged_windows = to_nums(j.at("flagged_windows"));
  return m;
}

json to_json(const ChannelReport& c) {
  return {{"pmu_id", c.pmu_id},
          {"kind", kind_json(c.kind)},
          {"samples", c.samples},
          {"noise", opt<NoiseSummary>(c.noise, to_json)},
          {"average_variability", c.average_variability ? num(*c.average_variability) : json(nullptr)},
          {"variance", opt<VarianceComponents>(c.variance, to_json)},
          {"acf", opt<AcfSummary>(c.acf, to_json)},
          {"outliers", opt<OutlierReport>(c.outliers, to_json)},
          {"completeness", opt<CompletenessStats>(c.completeness, to_json)},
          {"modal", opt<ModalSummary>(c.modal, to_json)},
          {"issues", c.issues}};
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key, T (*f)(const json&)) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return f(j.at(key));
}

ChannelReport channel_from(const json& j) {
  ChannelReport c;
  c.pmu_id = j.at("pmu_id").get<std::string>();
  c.kind = to_kind(j.at("kind"));
  c.samples = j.at("samples").get<std::size_t>();
  c.noise = opt_from<NoiseSummary>(j, "noise", noise_from);
  if (!j.at("average_variability").is_null()) c.average_variability = to_num(j.at("average_variability"));
  c.variance = opt_from<VarianceComponents>(j, "variance", variance_from);
  c.acf = opt_from<AcfSummary>(j, "acf", acf_from);
  c.outliers = opt_from<OutlierReport>(j, "outliers", outliers_from);
  c.completeness = opt_from<CompletenessStats>(j, "completeness", completeness_from);
  c.modal = opt_from<ModalSummary>(j, "modal", modal_from);
  c.issues = j.at("issues").get<std::vector<std::string>>();
  return c;
}

json to_json(const FleetAggregates& f) {
  return {{"thresholds", {{"dropout_rate", num(f.thresholds.dropout_rate)}, {"gap_seconds", num(f.thresholds.gap_seconds)}}},
          {"channel_count", f.channel_count},
          {"high_dropout_count", f.high_dropout_count},
          {"high_dropout_fraction", num(f.high_dropout_fraction)},
          {"long_gap_count", f.long_gap_count},
          {"long_gap_fraction", num(f.long_gap_fraction)},
          {"any_missing_count", f.any_missing_count},
          {"any_missing_fraction", num(f.any_missing_fraction)}};
}
FleetAggregates fleet_from(const json& j) {
  FleetAggregates f;
  f.thresholds.dropout_rate = to_num(j.at("thresholds").at("dropout_rate"));
  f.thresholds.gap_seconds = to_num(j.at("thresholds").at("gap_seconds"));
  f.channel_count = j.at("channel_count").get<std::size_t>();
  f.high_dropout_count = j.at("high_dropout_count").get<std::size_t>();
  f.high_dropout_fraction = to_num(j.at("high_dropout_fraction"));
  f.long_gap_count = j.at("long_gap_count").get<std::size_t>();
  f.long_gap_fraction = to_num(j.at("long_gap_fraction"));
  f.any_missing_count = j.at("any_missing_count").get<std::size_t>();
  f.any_missing_fraction = to_num(j.at("any_missing_fraction"));
  return f;
}

json to_json(const AnalyzeOptions& o) {
  const AnalysisSet& a = o.analyses;
  return {{"analyses",
           {{"noise", a.noise}, {"variability", a.variability}, {"variance", a.variance}, {"acf", a.acf},
            {"outliers", a.outliers}, {"completeness", a.completeness}, {"modal", a.modal}}},
          {"filter_order", o.filter_order},
          {"variability_window", o.variability_window},
          {"acf_lags", o.acf_lags},
          {"outlier",
           {{"window", o.outlier.window}, {"threshold", num(o.outlier.threshold)},
            {"robust_scale_factor", num(o.outlier.robust_scale_factor)}}},
          {"pencil", to_json(o.pencil)},
          {"disturbance_mode_count", o.disturbance_mode_count},
          {"disturbance_low_hz", num(o.disturbance_low_hz)},
          {"fleet", {{"dropout_rate", num(o.fleet.dropout_rate)}, {"gap_seconds", num(o.fleet.gap_seconds)}}}};
}
AnalyzeOptions options_from(const json& j) {
  AnalyzeOptions o;
  const json& a = j.at("analyses");
  o.analyses = {a.at("noise").get<bool>(),    a.at("variability").get<bool>(),  a.at("variance").get<bool>(),
                a.at("acf").get<bool>(),      a.at("outliers").get<bool>(),     a.at("completeness").get<bool>(),
                a.at("modal").get<bool>()};
  o.filter_order = j.at("filter_order").get<std::size_t>();
  o.variability_window = j.at("variability_window").get<std::size_t>();
  o.acf_lags = j.at("acf_lags").get<std::size_t>();
  o.outlier.window = j.at("outlier").at("window").get<std::size_t>();
  o.outlier.threshold = to_num(j.at("outlier").at("threshold"));
  o.outlier.robust_scale_factor = to_num(j.at("outlier").at("robust_scale_factor"));
  o.pencil = pencil_from(j.at("pencil"));
  o.disturbance_mode_count = j.at("disturbance_mode_count").get<std::size_t>();
  o.disturbance_low_hz = to_num(j.at("disturbance_low_hz"));
  o.fleet.dropout_rate = to_num(j.at("fleet").at("dropout_rate"));
  o.fleet.gap_seconds = to_num(j.at("fleet").at("gap_seconds"));
  return o;
}

json to_json(const SamplingSpec& s) {
  return {{"rate_fps", num(s.rate_fps)}, {"nominal_hz", num(s.nominal_hz)}, {"start_time", num(s.start_time)}};
}
SamplingSpec sampling_from(const json& j) {
  return {to_num(j.at("rate_fps")), to_num(j.at("nominal_hz")), to_num(j.at("start_time"))};
}

// --- generation records -----------------------------------------------------

json to_json(const ModeInjection& m) {
  return {{"frequency_hz", num(m.frequency_hz)}, {"amplitude", num(m.amplitude)},
          {"damping_factor", num(m.damping_factor)}, {"start_s", num(m.start_s)},
          {"duration_s", num(m.duration_s)}};
}
ModeInjection mode_injection_from(const json& j) {
  return {to_num(j.at("frequency_hz")), to_num(j.at("amplitude")), to_num(j.at("damping_factor")),
          to_num(j.at("start_s")), to_num(j.at("duration_s"))};
}

json modes_json(const std::vector<ModeInjection>& modes) {
  json a = json::array();
  for (const auto& m : modes) a.push_back(to_json(m));
  return a;
}
std::vector<ModeInjection> modes_from(const json& j) {
  std::vector<ModeInjection> out;
  for (const json& m : j) out.push_back(mode_injection_from(m));
  return out;
}

json to_json(const BaselineSpec& b) {
  json trend = json::array();
  for (const TrendPoint& p : b.trend) trend.push_back({num(p.time_s), num(p.value)});
  return {{"pmu_id", b.pmu_id},
          {"kind", kind_json(b.kind)},
          {"duration_s", num(b.duration_s)},
          {"sampling", to_json(b.spec)},
          {"nominal_value", num(b.nominal_value)},
          {"trend", trend},
          {"dynamics_variability", num(b.dynamics_variability)}};
}
BaselineSpec baseline_from(const json& j) {
  BaselineSpec b;
  b.pmu_id = j.at("pmu_id").get<std::string>();
  b.kind = to_kind(j.at("kind"));
  b.duration_s = to_num(j.at("duration_s"));
  b.spec = sampling_from(j.at("sampling"));
  b.nominal_value = to_num(j.at("nominal_value"));
  for (const json& p : j.at("trend")) b.trend.push_back({to_num(p.at(0)), to_num(p.at(1))});
  b.dynamics_variability = to_num(j.at("dynamics_variability"));
  return b;
}

json to_json(const InjectionSpec& s) {
  json j = {{"seed", s.seed}, {"modes", modes_json(s.modes)}};
  j["noise_snr_db"] = s.noise_snr_db ? num(*s.noise_snr_db) : json(nullptr);
  j["outlier"] = s.outlier ? json{{"rate", num(s.outlier->rate)}, {"magnitude_sigmas", num(s.outlier->magnitude_sigmas)}}
                           : json(nullptr);
  if (s.missing) {
    j["missing"] = {{"dropout_rate", num(s.missing->dropout_rate)},
                    {"max_gap_samples", s.missing->max_gap_samples},
                    {"filler", s.missing->filler_value ? num(*s.missing->filler_value) : json("nan")}};
  } else {
    j["missing"] = nullptr;
  }
  j["skew_s_per_s"] = s.skew_s_per_s ? num(*s.skew_s_per_s) : json(nullptr);
  return j;
}
InjectionSpec injection_from(const json& j) {
  InjectionSpec s;
  s.seed = j.at("seed").get<std::uint64_t>();
  s.modes = modes_from(j.at("modes"));
  if (!j.at("noise_snr_db").is_null()) s.noise_snr_db = to_num(j.at("noise_snr_db"));
  if (!j.at("outlier").is_null()) {
    s.outlier = OutlierInjection{to_num(j.at("outlier").at("rate")), to_num(j.at("outlier").at("magnitude_sigmas"))};
  }
  if (!j.at("missing").is_null()) {
    const json& m = j.at("missing");
    MissingInjection mi;
    mi.dropout_rate = to_num(m.at("dropout_rate"));
    mi.max_gap_samples = m.at("max_gap_samples").get<std::size_t>();
    if (!(m.at("filler").is_string() && m.at("filler").get<std::string>() == "nan")) {
      mi.filler_value = to_num(m.at("filler"));
    }
    s.missing = mi;
  }
  if (!j.at("skew_s_per_s").is_null()) s.skew_s_per_s = to_num(j.at("skew_s_per_s"));
  return s;
}

json to_json(const GenerationRecord& r) {
  json gaps = json::array();
  for (const Segment& g : r.missing_runs) gaps.push_back({g.start, g.length});
  return {{"baseline", to_json(r.baseline)},
          {"injection", to_json(r.injection)},
          {"baseline_seed", r.baseline_seed},
          {"outlier_indices", r.outlier_indices},
          {"missing_runs", gaps},
          {"modes", modes_json(r.modes)},
          {"realized_noise_variance", r.realized_noise_variance ? num(*r.realized_noise_variance) : json(nullptr)},
          {"skew_s_per_s", r.skew_s_per_s ? num(*r.skew_s_per_s) : json(nullptr)}};
}
GenerationRecord record_from(const json& j) {
  GenerationRecord r;
  r.baseline = baseline_from(j.at("baseline"));
  r.injection = injection_from(j.at("injection"));
  r.baseline_seed = j.at("baseline_seed").get<std::uint64_t>();
  r.outlier_indices = j.at("outlier_indices").get<std::vector<std::size_t>>();
  for (const json& g : j.at("missing_runs")) r.missing_runs.push_back({g.at(0).get<std::size_t>(), g.at(1).get<std::size_t>()});
  r.modes = modes_from(j.at("modes"));
  if (!j.at("realized_noise_variance").is_null()) r.realized_noise_variance = to_num(j.at("realized_noise_variance"));
  if (!j.at("skew_s_per_s").is_null()) r.skew_s_per_s = to_num(j.at("skew_s_per_s"));
  return r;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

template <class F>
auto parse_with_context(const std::string& text, const char* what, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaError, std::string("malformed ") + what + ": " + e.what());
  }
}

}  // namespace

std::string report_to_json(const FeatureReport& r) {
  json channels = json::array();
  for (const ChannelReport& c : r.channels) channels.push_back(to_json(c));
  const json j = {{"format", "pmuf-report-1"},
                  {"source", r.source},
                  {"sampling", to_json(r.sampling)},
                  {"options", to_json(r.options)},
                  {"channels", channels},
                  {"fleet", opt<FleetAggregates>(r.fleet, to_json)}};
  return j.dump(1) + "\n";
}

FeatureReport report_from_json(const std::string& text) {
  return parse_with_context(text, "report", [](const json& j) {
    if (j.value("format", "") != "pmuf-report-1") fail(ErrorCode::SchemaError, "not a pmuf-report-1 document");
    FeatureReport r;
    r.source = j.at("source").get<std::string>();
    r.sampling = sampling_from(j.at("sampling"));
    r.options = options_from(j.at("options"));
    for (const json& c : j.at("channels")) r.channels.push_back(channel_from(c));
    r.fleet = opt_from<FleetAggregates>(j, "fleet", fleet_from);
    return r;
  });
}

void write_report(const FeatureReport& report, const std::filesystem::path& path) {
  const std::string text = report_to_json(report);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

FeatureReport read_report(const std::filesystem::path& path) { return report_from_json(slurp(path)); }

std::string records_to_json(const std::vector<GenerationRecord>& records) {
  json a = json::array();
  for (const auto& r : records) a.push_back(to_json(r));
  return json{{"format", "pmuf-truth-1"}, {"channels", a}}.dump(1) + "\n";
}

std::vector<GenerationRecord> records_from_json(const std::string& text) {
  return parse_with_context(text, "ground-truth record", [](const json& j) {
    if (j.value("format", "") != "pmuf-truth-1") fail(ErrorCode::SchemaError, "not a pmuf-truth-1 document");
    std::vector<GenerationRecord> out;
    for (const json& r : j.at("channels")) out.push_back(record_from(r));
    return out;
  });
}

}  // namespace pmuf
