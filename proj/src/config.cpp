#include "pmuf/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "detail/rng.hpp"
#include "pmuf/error.hpp"

namespace pmuf {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& path, const std::string& what) {
  fail(ErrorCode::SchemaError, path + ": " + what);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) schema(path, "expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) schema(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
  }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

double number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) schema(join(path, key), "expected a number");
  return v.get<double>();
}

double required_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) schema(join(path, key), "required key is missing");
  return number(obj, path, key, 0.0);
}

double rate_in_unit(const json& obj, const std::string& path, const char* key) {
  const double r = required_number(obj, path, key);
  if (!(r >= 0.0 && r <= 1.0)) schema(join(path, key), "rate " + std::to_string(r) + " outside [0, 1]");
  return r;
}

ChannelKind parse_kind(const json& v, const std::string& path) {
  if (!v.is_string()) schema(path, "expected a channel kind string");
  const std::string s = v.get<std::string>();
  for (ChannelKind k : {ChannelKind::VoltageMagnitudePU, ChannelKind::VoltageAngleDeg, ChannelKind::FrequencyHz}) {
    if (s == column_suffix(k) || s == to_string(k)) return k;
  }
  schema(path, "unknown channel kind '" + s + "'");
}

InjectionSpec parse_inject(const json& obj, const std::string& path, double nyquist) {
  check_keys(obj, path, {"noise_snr_db", "outlier", "missing", "skew_s_per_s", "modes"});
  InjectionSpec spec;
  if (obj.contains("noise_snr_db")) {
    const json& v = obj.at("noise_snr_db");
    if (v.is_string() && v.get<std::string>() == "inf") {
      spec.noise_snr_db = std::numeric_limits<double>::infinity();
    } else if (v.is_number()) {
      spec.noise_snr_db = v.get<double>();
    } else {
      schema(path + ".noise_snr_db", "expected a number or \"inf\"");
    }
  }
  if (obj.contains("outlier")) {
    const std::string p = path + ".outlier";
    const json& o = obj.at("outlier");
    check_keys(o, p, {"rate", "magnitude_sigmas"});
    OutlierInjection out;
    out.rate = rate_in_unit(o, p, "rate");
    out.magnitude_sigmas = number(o, p, "magnitude_sigmas", out.magnitude_sigmas);
    if (!(out.magnitude_sigmas >= 3.0)) schema(p + ".magnitude_sigmas", "must be at least 3");
    spec.outlier = out;
  }
  if (obj.contains("missing")) {
    const std::string p = path + ".missing";
    const json& o = obj.at("missing");
    check_keys(o, p, {"dropout_rate", "max_gap_samples", "filler"});
    MissingInjection m;
    m.dropout_rate = rate_in_unit(o, p, "dropout_rate");
    if (o.contains("max_gap_samples")) {
      const json& g = o.at("max_gap_samples");
      if (!g.is_number_integer() || g.get<long long>() < 1) schema(p + ".max_gap_samples", "expected a positive integer");
      m.max_gap_samples = g.get<std::size_t>();
    }
    if (o.contains("filler")) {
      const json& f = o.at("filler");
      if (f.is_string() && f.get<std::string>() == "nan") {
        m.filler_value.reset();
      } else if (f.is_number()) {
        m.filler_value = f.get<double>();
      } else {
        schema(p + ".filler", "expected \"nan\" or a number");
      }
    }
    spec.missing = m;
  }
  if (obj.contains("skew_s_per_s")) {
    const double s = number(obj, path, "skew_s_per_s", 0.0);
    if (!(std::abs(s) < 0.1)) schema(path + ".skew_s_per_s", "outside (-0.1, 0.1)");
    spec.skew_s_per_s = s;
  }
  if (obj.contains("modes")) {
    const json& arr = obj.at("modes");
    if (!arr.is_array()) schema(path + ".modes", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + ".modes[" + std::to_string(i) + "]";
      const json& o = arr[i];
      check_keys(o, p, {"frequency_hz", "amplitude", "damping_factor", "start_s", "duration_s"});
      ModeInjection m;
      m.frequency_hz = required_number(o, p, "frequency_hz");
      m.amplitude = required_number(o, p, "amplitude");
      m.damping_factor = number(o, p, "damping_factor", 0.0);
      m.start_s = number(o, p, "start_s", 0.0);
      m.duration_s = number(o, p, "duration_s", std::numeric_limits<double>::infinity());
      if (!(m.frequency_hz >= 0.0 && m.frequency_hz < nyquist)) {
        schema(p + ".frequency_hz", "must lie in [0, Nyquist)");
      }
      if (!(std::abs(m.damping_factor) < 1.0)) schema(p + ".damping_factor", "must satisfy |zeta| < 1");
      if (!(m.duration_s >= 0.0)) schema(p + ".duration_s", "must be nonnegative");
      spec.modes.push_back(m);
    }
  }
  return spec;
}

}  // namespace

std::uint64_t channel_seed(std::uint64_t seed, const std::string& pmu_id, ChannelKind kind) {
  return seed ^ detail::fnv1a64(pmu_id + "_" + std::string(column_suffix(kind)));
}

void reseed(SynthesisConfig& config, std::uint64_t seed) {
  config.seed = seed;
  for (std::size_t i = 0; i < config.baselines.size(); ++i) {
    config.injections[i].seed = channel_seed(seed, config.baselines[i].pmu_id, config.baselines[i].kind);
  }
}

SynthesisConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(root, "", {"seed", "sampling", "duration_s", "channels"});

  SynthesisConfig cfg;
  if (root.contains("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<long long>() < 0)) {
      schema("seed", "expected a nonnegative integer");
    }
    cfg.seed = s.get<std::uint64_t>();
  }
  if (root.contains("sampling")) {
    const json& s = root.at("sampling");
    check_keys(s, "sampling", {"rate_fps", "nominal_hz", "start_time"});
    cfg.sampling.rate_fps = number(s, "sampling", "rate_fps", cfg.sampling.rate_fps);
    cfg.sampling.nominal_hz = number(s, "sampling", "nominal_hz", cfg.sampling.nominal_hz);
    cfg.sampling.start_time = number(s, "sampling", "start_time", cfg.sampling.start_time);
    try {
      validate(cfg.sampling);
    } catch (const Error& e) {
      schema("sampling", e.what());
    }
  }
  cfg.duration_s = number(root, "", "duration_s", cfg.duration_s);
  if (!(cfg.duration_s > 0.0) || !std::isfinite(cfg.duration_s)) schema("duration_s", "must be positive");

  if (!root.contains("channels")) schema("channels", "required key is missing");
  const json& channels = root.at("channels");
  if (!channels.is_array() || channels.empty()) schema("channels", "expected a nonempty array");

  std::set<std::string> names;
  for (std::size_t i = 0; i < channels.size(); ++i) {
    const std::string p = "channels[" + std::to_string(i) + "]";
    const json& ch = channels[i];
    check_keys(ch, p, {"pmu_id", "kind", "nominal_value", "trend", "dynamics_variability", "inject"});
    BaselineSpec b;
    b.spec = cfg.sampling;
    b.duration_s = cfg.duration_s;
    if (!ch.contains("pmu_id") || !ch.at("pmu_id").is_string() || ch.at("pmu_id").get<std::string>().empty()) {
      schema(p + ".pmu_id", "expected a nonempty string");
    }
    b.pmu_id = ch.at("pmu_id").get<std::string>();
    if (b.pmu_id.find(',') != std::string::npos) schema(p + ".pmu_id", "must not contain commas");
    if (!ch.contains("kind")) schema(p + ".kind", "required key is missing");
    b.kind = parse_kind(ch.at("kind"), p + ".kind");
    const double default_nominal = b.kind == ChannelKind::VoltageMagnitudePU ? 1.0
                                   : b.kind == ChannelKind::FrequencyHz      ? cfg.sampling.nominal_hz
                                                                             : 0.0;
    b.nominal_value = number(ch, p, "nominal_value", default_nominal);
    b.dynamics_variability = number(ch, p, "dynamics_variability", 0.0);
    if (!(b.dynamics_variability >= 0.0)) schema(p + ".dynamics_variability", "must be nonnegative");
    if (ch.contains("trend")) {
      const json& t = ch.at("trend");
      if (!t.is_array()) schema(p + ".trend", "expected an array of [time_s, value] pairs");
      for (std::size_t k = 0; k < t.size(); ++k) {
        const json& pt = t[k];
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
          schema(p + ".trend[" + std::to_string(k) + "]", "expected [time_s, value]");
        }
        b.trend.push_back({pt[0].get<double>(), pt[1].get<double>()});
      }
    }
    try {
      validate(b);
    } catch (const Error& e) {
      schema(p, e.what());
    }
    const std::string name = b.pmu_id + "_" + std::string(column_suffix(b.kind));
    if (!names.insert(name).second) schema(p, "duplicate channel " + name);

    InjectionSpec inj;
    if (ch.contains("inject")) inj = parse_inject(ch.at("inject"), p + ".inject", cfg.sampling.nyquist_hz());
    cfg.baselines.push_back(std::move(b));
    cfg.injections.push_back(std::move(inj));
  }
  reseed(cfg, cfg.seed);
  return cfg;
}

SynthesisConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

}  // namespace pmuf
