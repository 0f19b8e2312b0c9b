// pmuf: synthesize PMU datasets with known features and analyze their quality.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmuf/pmuf.h"

namespace {

int exit_code(pmuf_status status) {
  if (status == PMUF_OK) return 0;
  std::fprintf(stderr, "pmuf: %s\n", pmuf_last_error());
  return status == PMUF_E_NUMERICAL_FAILURE ? 3 : 2;
}

unsigned parse_analyses(const std::string& list) {
  if (list.empty() || list == "all") return PMUF_ANALYSIS_ALL;
  unsigned bits = 0;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');) {
    if (item == "noise") bits |= PMUF_ANALYSIS_NOISE;
    else if (item == "variability") bits |= PMUF_ANALYSIS_VARIABILITY;
    else if (item == "variance") bits |= PMUF_ANALYSIS_VARIANCE;
    else if (item == "acf") bits |= PMUF_ANALYSIS_ACF;
    else if (item == "outliers") bits |= PMUF_ANALYSIS_OUTLIERS;
    else if (item == "completeness") bits |= PMUF_ANALYSIS_COMPLETENESS;
    else if (item == "modal") bits |= PMUF_ANALYSIS_MODAL;
    else throw CLI::ValidationError("--analyses", "unknown analysis '" + item + "'");
  }
  return bits;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PMU data-feature analysis and synthesis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pmuf_version());

  pmuf_analyze_options opts;
  pmuf_analyze_options_default(&opts);
  std::string dataset, out, analyses = "all";
  std::vector<double> fillers;
  auto* analyze = app.add_subcommand("analyze", "Write a feature report for a dataset");
  analyze->add_option("dataset", dataset, "Dataset CSV")->required();
  analyze->add_option("--out", out, "Report path (default: standard output)");
  analyze->add_option("--filter-order", opts.filter_order, "Median filter order")->capture_default_str();
  analyze->add_option("--acf-lags", opts.acf_lags, "Autocorrelation lags")->capture_default_str();
  analyze->add_option("--pencil-window", opts.pencil_window_s, "Modal window, s")->capture_default_str();
  analyze->add_option("--pencil-step", opts.pencil_step_s, "Modal window step, s")->capture_default_str();
  analyze->add_option("--outlier-window", opts.outlier_window, "Hampel window, samples")->capture_default_str();
  analyze->add_option("--outlier-threshold", opts.outlier_threshold, "Hampel threshold")->capture_default_str();
  analyze->add_option("--nominal-hz", opts.nominal_hz, "System frequency")->capture_default_str();
  analyze->add_option("--filler", fillers, "Filler value marking a missing sample (repeatable; default 9999 -9999)");
  analyze->add_option("--analyses", analyses,
                      "Comma list of noise,variability,variance,acf,outliers,completeness,modal")
      ->capture_default_str();
  analyze->add_option("--threads", opts.threads, "Worker threads, 0 = all cores")->capture_default_str();

  std::string config, synth_out;
  std::optional<std::uint64_t> seed;
  unsigned synth_threads = 0;
  auto* synthesize = app.add_subcommand("synthesize", "Generate a dataset and its ground truth from a config");
  synthesize->add_option("config", config, "JSON config")->required();
  synthesize->add_option("--out", synth_out, "Dataset CSV to write")->required();
  synthesize->add_option("--seed", seed, "Override the config seed");
  synthesize->add_option("--threads", synth_threads, "Worker threads, 0 = all cores");

  try {
    app.parse(argc, argv);
    opts.analyses = parse_analyses(analyses);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const char* level = std::getenv("PMUF_LOG_LEVEL");
  if (pmuf_set_log_level(level ? level : "warn") != PMUF_OK) {
    std::fprintf(stderr, "pmuf: %s\n", pmuf_last_error());
    return 1;
  }

  if (*analyze) {
    if (!fillers.empty()) {
      opts.filler_values = fillers.data();
      opts.filler_count = fillers.size();
    }
    return exit_code(pmuf_analyze_file(dataset.c_str(), out.empty() ? nullptr : out.c_str(), &opts));
  }
  const std::uint64_t seed_value = seed.value_or(0);
  return exit_code(pmuf_synthesize_file(config.c_str(), synth_out.c_str(), seed ? &seed_value : nullptr,
                                        synth_threads));
}
