#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "pmuf/signal_model.hpp"
#include "support.hpp"

using namespace pmuf;
using testing::code;
using testing::code_of;

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TEST_CASE("filler matching derives the mask") {
  auto a = testing::series_of({60.0, 60.0, 60.0});
  CHECK(std::vector<std::uint8_t>(a.missing_mask().begin(), a.missing_mask().end()) ==
        std::vector<std::uint8_t>{0, 0, 0});

  auto b = testing::series_of({60.0, 9999.0, 60.01});
  CHECK(std::vector<std::uint8_t>(b.missing_mask().begin(), b.missing_mask().end()) ==
        std::vector<std::uint8_t>{0, 1, 0});
  CHECK(b.value(1) == 9999.0);

  auto c = testing::series_of({kNaN, 1.0});
  CHECK(c.missing(0));
  CHECK_FALSE(c.missing(1));

  auto d = testing::series_of({-9999.0, 1.0});
  CHECK(d.missing(0));
}

TEST_CASE("construction errors") {
  CHECK(code_of([] { testing::series_of({}); }) == code(ErrorCode::EmptySeries));
  CHECK(code_of([] { new_channel_series(ChannelKind::FrequencyHz, SamplingSpec{0.0, 60.0, 0.0}, {1.0}); }) ==
        code(ErrorCode::InvalidSpec));
  CHECK(code_of([] { new_channel_series(ChannelKind::FrequencyHz, SamplingSpec{-30.0, 60.0, 0.0}, {1.0}); }) ==
        code(ErrorCode::InvalidSpec));
  CHECK(code_of([] { testing::masked({1.0, kNaN}, {0, 0}); }) == code(ErrorCode::InvalidArgument));
  CHECK(code_of([] { testing::masked({1.0, 2.0}, {0}); }) == code(ErrorCode::InvalidArgument));
  CHECK(code_of([] {
          new_channel_series(ChannelKind::FrequencyHz, testing::fps30(), {1.0}, FillerPolicy{{}, false});
        }) == code(ErrorCode::InvalidSpec));
}

TEST_CASE("NaN is a plain value when the policy says so") {
  FillerPolicy policy{{9999.0}, false};
  CHECK_FALSE(policy.is_missing(kNaN));
  CHECK(policy.is_missing(9999.0));
  CHECK_FALSE(policy.is_missing(-9999.0));
}

TEST_CASE("valid segments") {
  CHECK(valid_segments(testing::masked({1, 2, 3}, {0, 0, 0})) == std::vector<Segment>{{0, 3}});
  CHECK(valid_segments(testing::masked({1, 9999, 9999, 4}, {0, 1, 1, 0})) ==
        std::vector<Segment>{{0, 1}, {3, 1}});
  CHECK(valid_segments(testing::masked({9999, 9999}, {1, 1})).empty());
}

TEST_CASE("segments and gaps tile the series") {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + gen() % 300;
    std::vector<double> v(n, 1.0);
    std::vector<std::uint8_t> m(n);
    const auto p = static_cast<double>(gen() % 100) / 100.0;
    for (std::size_t i = 0; i < n; ++i) {
      m[i] = std::generate_canonical<double, 53>(gen) < p ? 1 : 0;
      if (m[i]) v[i] = kNaN;
    }
    const auto s = testing::masked(v, m);
    std::vector<int> cover(n, 0);
    std::size_t total = 0;
    for (const auto& seg : valid_segments(s)) {
      total += seg.length;
      for (std::size_t i = seg.start; i < seg.start + seg.length; ++i) {
        CHECK_FALSE(s.missing(i));
        ++cover[i];
      }
    }
    for (const auto& gap : missing_runs(s.missing_mask())) {
      total += gap.length;
      for (std::size_t i = gap.start; i < gap.start + gap.length; ++i) ++cover[i];
    }
    CHECK(total == n);
    CHECK(std::all_of(cover.begin(), cover.end(), [](int c) { return c == 1; }));
  }
}

TEST_CASE("mask round trip through the same policy") {
  std::mt19937_64 gen(11);
  const std::vector<double> pool{1.0, 2.5, 9999.0, -9999.0, kNaN, 60.0};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(50);
    for (auto& x : v) x = pool[gen() % pool.size()];
    const auto s = testing::series_of(v);
    const auto again = testing::series_of(std::vector<double>(s.values().begin(), s.values().end()));
    CHECK(again == s);
  }
}

TEST_CASE("timestamps come from the integer index") {
  const SamplingSpec spec{30.0, 60.0, 1.7e9};
  const std::size_t n = 1'000'000;
  const double expected = 1.7e9 + static_cast<double>(n) / 30.0;
  CHECK(std::abs(spec.timestamp(n) - expected) <= 1e-9 * expected);
  CHECK(spec.timestamp(0) == 1.7e9);
  CHECK(spec.nyquist_hz() == 15.0);
}

TEST_CASE("angle normalization") {
  CHECK(normalize_angle_deg(180.0) == -180.0);
  CHECK(normalize_angle_deg(-180.0) == -180.0);
  CHECK(normalize_angle_deg(190.0) == doctest::Approx(-170.0));
  CHECK(normalize_angle_deg(-190.0) == doctest::Approx(170.0));
  CHECK(normalize_angle_deg(720.5) == doctest::Approx(0.5));
  const double inside = 179.99999999999997;
  CHECK(normalize_angle_deg(inside) == inside);

  const auto s = testing::series_of({350.0, -10.0, 9999.0}, ChannelKind::VoltageAngleDeg);
  CHECK(s.value(0) == doctest::Approx(-10.0));
  CHECK(s.value(1) == -10.0);
  CHECK(s.missing(2));
  CHECK(s.value(2) == 9999.0);
}

TEST_CASE("wrapped angles stay in range") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> dist(-1e5, 1e5);
  for (int i = 0; i < 10000; ++i) {
    const double a = normalize_angle_deg(dist(gen));
    CHECK(a >= -180.0);
    CHECK(a < 180.0);
  }
}

TEST_CASE("suffixes") {
  CHECK(column_suffix(ChannelKind::VoltageMagnitudePU) == "vm");
  CHECK(column_suffix(ChannelKind::VoltageAngleDeg) == "va");
  CHECK(column_suffix(ChannelKind::FrequencyHz) == "freq");
  CHECK(kind_from_suffix("va") == ChannelKind::VoltageAngleDeg);
  CHECK(code_of([] { kind_from_suffix("ia"); }) == code(ErrorCode::InvalidArgument));
}

TEST_CASE("series equality treats NaN placeholders as equal") {
  const auto a = testing::series_of({1.0, kNaN});
  const auto b = testing::series_of({1.0, kNaN});
  CHECK(a == b);
  CHECK_FALSE(a == b.with_pmu_id("other"));
  CHECK_FALSE(a == testing::series_of({1.0, 9999.0}));
}
