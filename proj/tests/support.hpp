#pragma once

// Brute-force oracles and fixtures shared by the unit tests. Nothing here
// reuses library internals.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pmuf/error.hpp"
#include "pmuf/signal_model.hpp"

namespace testing {

// Code of the pmuf::Error thrown by f, or 0 when nothing is thrown.
template <class F>
int code_of(F&& f) {
  try {
    f();
  } catch (const pmuf::Error& e) {
    return static_cast<int>(e.code());
  }
  return 0;
}

inline int code(pmuf::ErrorCode c) { return static_cast<int>(c); }

inline pmuf::SamplingSpec fps30() { return pmuf::SamplingSpec{30.0, 60.0, 0.0}; }

inline pmuf::ChannelSeries series_of(std::vector<double> values,
                                     pmuf::ChannelKind kind = pmuf::ChannelKind::FrequencyHz,
                                     pmuf::SamplingSpec spec = fps30()) {
  return pmuf::new_channel_series(kind, spec, std::move(values), pmuf::FillerPolicy{}, "T");
}

inline pmuf::ChannelSeries masked(std::vector<double> values, std::vector<std::uint8_t> mask,
                                  pmuf::ChannelKind kind = pmuf::ChannelKind::FrequencyHz) {
  return pmuf::ChannelSeries(kind, fps30(), std::move(values), std::move(mask), "T");
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  long double mean = 0.0L;
  for (double x : v) mean += x;
  mean /= static_cast<long double>(v.size());
  long double ss = 0.0L;
  for (double x : v) ss += (x - mean) * (x - mean);
  return static_cast<double>(ss / static_cast<long double>(v.size() - 1));
}

inline std::vector<double> gaussian(std::size_t n, double sigma, std::uint64_t seed, double mean = 0.0) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist(mean, sigma);
  std::vector<double> out(n);
  for (auto& x : out) x = dist(gen);
  return out;
}

// Trailing-window Hampel oracle: window [i - w + 1, i], leading samples share
// the first full window.
inline std::vector<std::size_t> hampel_oracle(const pmuf::ChannelSeries& s, std::size_t w, double t,
                                              double k = 1.4826) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.missing(i)) continue;
    const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
    const std::size_t hi = i + 1 >= w ? i : w - 1;
    std::vector<double> win;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (!s.missing(j)) win.push_back(s.value(j));
    }
    const double m = median_of(win);
    std::vector<double> dev;
    for (double x : win) dev.push_back(std::abs(x - m));
    const double mad = median_of(dev);
    const double d = std::abs(s.value(i) - m);
    const bool flag = mad == 0.0 ? d > 1e-12 * std::max(1.0, std::abs(m)) : d > t * k * mad;
    if (flag) out.push_back(i);
  }
  return out;
}

inline std::vector<double> damped_cosine(std::size_t n, double rate, double f, double amp, double sigma,
                                         double phase = 0.0) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    out[i] = amp * std::exp(-sigma * t) * std::cos(2.0 * std::numbers::pi * f * t + phase);
  }
  return out;
}

}  // namespace testing
