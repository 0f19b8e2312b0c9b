#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pmuf/synthesis.hpp"

namespace pmuf {

/// Parsed synthesis configuration. baselines[i] and injections[i] describe
/// the same channel; injection seeds are already derived per channel.
struct SynthesisConfig {
  std::uint64_t seed = 0;
  SamplingSpec sampling;
  double duration_s = 60.0;
  std::vector<BaselineSpec> baselines;
  std::vector<InjectionSpec> injections;
};

/// seed XOR FNV-1a-64 of the channel's column name ("<pmu>_<suffix>").
std::uint64_t channel_seed(std::uint64_t seed, const std::string& pmu_id, ChannelKind kind);

/// Replaces the top-level seed and re-derives every channel seed.
void reseed(SynthesisConfig& config, std::uint64_t seed);

SynthesisConfig parse_config(const std::filesystem::path& path);
SynthesisConfig parse_config_text(const std::string& text);

}  // namespace pmuf
