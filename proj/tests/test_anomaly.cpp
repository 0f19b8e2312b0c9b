#include <algorithm>
#include <random>

#include "doctest.h"
#include "pmuf/anomaly.hpp"
#include "pmuf/preprocess.hpp"
#include "pmuf/synthesis.hpp"
#include "support.hpp"

using namespace pmuf;
using testing::code;
using testing::code_of;

TEST_CASE("outlier config validation") {
  CHECK(code_of([] { validate(OutlierConfig{2, 3.0, 1.4826}); }) == code(ErrorCode::InvalidSpec));
  CHECK(code_of([] { validate(OutlierConfig{90, 0.0, 1.4826}); }) == code(ErrorCode::InvalidSpec));
  CHECK(code_of([] { detect_outliers(testing::series_of({1, 2, 3})); }) == code(ErrorCode::WindowTooLarge));
}

TEST_CASE("constant series has no outliers") {
  const auto r = detect_outliers(testing::series_of(std::vector<double>(200, 60.0)));
  CHECK(r.indices.empty());
  CHECK(r.percentage == 0.0);
  CHECK(r.total_samples == 200);
}

TEST_CASE("detector matches the brute-force Hampel oracle") {
  std::mt19937_64 gen(4);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 50 + gen() % 300;
    const std::size_t w = 3 + gen() % 40;
    auto v = testing::gaussian(n, 1.0, gen());
    std::vector<std::uint8_t> m(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (gen() % 17 == 0) v[i] += 8.0;
      if (gen() % 11 == 0) m[i] = 1;
      // Repeated values exercise the zero-MAD branch.
      if (trial % 4 == 0 && gen() % 3 != 0) v[i] = 1.0;
    }
    const auto s = testing::masked(v, m);
    const auto r = detect_outliers(s, OutlierConfig{w, 3.0, 1.4826});
    CHECK(r.indices == testing::hampel_oracle(s, w, 3.0));
    CHECK(std::is_sorted(r.indices.begin(), r.indices.end()));
    CHECK(std::adjacent_find(r.indices.begin(), r.indices.end()) == r.indices.end());
    for (auto i : r.indices) CHECK_FALSE(s.missing(i));
    CHECK(r.percentage == doctest::Approx(100.0 * static_cast<double>(r.indices.size()) / static_cast<double>(n)));
  }
}

TEST_CASE("false positives on clean Gaussian noise") {
  const auto s = testing::series_of(testing::gaussian(54000, 1e-3, 100, 60.0));
  const auto r = detect_outliers(s);
  CHECK(r.percentage <= 0.5);
}

TEST_CASE("injected spikes are recovered") {
  const auto clean = testing::series_of(testing::gaussian(54000, 1e-3, 101, 60.0));
  const auto spiked = inject_outliers(clean, 0.01, 10.0, 55);
  REQUIRE(spiked.indices.size() == 540);
  const auto r = detect_outliers(spiked.series);
  std::vector<std::size_t> hit;
  std::set_intersection(r.indices.begin(), r.indices.end(), spiked.indices.begin(), spiked.indices.end(),
                        std::back_inserter(hit));
  CHECK(static_cast<double>(hit.size()) / 540.0 >= 0.95);
  // On white noise the clean-twin false positives add to the injected 1%.
  const double fp = detect_outliers(clean).percentage;
  CHECK(r.percentage >= 0.95);
  CHECK(r.percentage <= 1.0 + fp + 0.1);
}

TEST_CASE("local median replacement") {
  std::vector<double> v(100, 2.0);
  v[50] = 40.0;
  const auto cleaned = replace_outliers_with_local_median(testing::series_of(v), OutlierConfig{9, 3.0, 1.4826});
  CHECK(cleaned.report.indices == std::vector<std::size_t>{50});
  CHECK(cleaned.series.value(50) == 2.0);
  CHECK(cleaned.series.value(49) == 2.0);
}

namespace {

ChannelSeries smooth_angle(std::size_t n, double offset = 0.0) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = offset + 0.12 * static_cast<double>(i) + 0.02 * std::sin(0.05 * static_cast<double>(i));
  }
  return testing::series_of(v, ChannelKind::VoltageAngleDeg);
}

}  // namespace

TEST_CASE("angle outlier scan") {
  SUBCASE("linear ramp") {
    std::vector<double> v(500);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * static_cast<double>(i);
    CHECK(angle_outlier_scan(testing::series_of(v, ChannelKind::VoltageAngleDeg)).indices.empty());
  }
  SUBCASE("a 100 degree spike maps to one raw index") {
    const auto base = smooth_angle(2000);
    std::vector<double> v(base.values().begin(), base.values().end());
    v[1234] += 100.0;
    const auto r = angle_outlier_scan(testing::series_of(v, ChannelKind::VoltageAngleDeg));
    CHECK(std::count(r.indices.begin(), r.indices.end(), 1234) == 1);
    CHECK(std::count(r.indices.begin(), r.indices.end(), 1235) == 0);
    CHECK(r.total_samples == 2000);
  }
  SUBCASE("constant offset changes nothing") {
    auto a = smooth_angle(1500);
    auto b = smooth_angle(1500, 97.0);
    std::vector<double> va(a.values().begin(), a.values().end());
    std::vector<double> vb(b.values().begin(), b.values().end());
    for (std::size_t i : {100u, 700u, 1200u}) {
      va[i] += 60.0;
      vb[i] += 60.0;
    }
    CHECK(angle_outlier_scan(testing::series_of(va, ChannelKind::VoltageAngleDeg)).indices ==
          angle_outlier_scan(testing::series_of(vb, ChannelKind::VoltageAngleDeg)).indices);
  }
  CHECK(code_of([] { angle_outlier_scan(testing::series_of(std::vector<double>(200, 1.0))); }) ==
        code(ErrorCode::WrongKind));
}

TEST_CASE("completeness") {
  const auto full = completeness(testing::series_of(std::vector<double>(100, 1.0)));
  CHECK(full.dropout_rate == 0.0);
  CHECK(full.max_gap_samples == 0);

  const auto base = testing::series_of(std::vector<double>(54000, 60.0));
  const auto dropped = completeness(inject_missing(base, 0.01, 30, std::nullopt, 3).series);
  CHECK(dropped.dropped_samples == 540);
  CHECK(dropped.dropout_rate == 0.01);

  const auto gap = completeness(inject_gap(base, 1000, 90));
  CHECK(gap.max_gap_samples == 90);
  CHECK(gap.max_gap_seconds == 3.0);

  const auto edge = completeness(inject_gap(base, 54000 - 7, 7));
  CHECK(edge.max_gap_samples == 7);
}

TEST_CASE("completeness against a brute-force scan") {
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    std::vector<double> v(n, 1.0);
    std::vector<std::uint8_t> m(n);
    for (auto& x : m) x = gen() % 3 == 0;
    const auto c = completeness(testing::masked(v, m));
    std::size_t dropped = 0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dropped += m[i];
      std::size_t run = 0;
      while (i + run < n && m[i + run]) ++run;
      best = std::max(best, run);
    }
    CHECK(c.dropped_samples == dropped);
    CHECK(c.max_gap_samples == best);
    CHECK(c.max_gap_samples <= c.dropped_samples);
    CHECK(c.dropout_rate * static_cast<double>(n) == doctest::Approx(static_cast<double>(dropped)));

    std::vector<std::uint8_t> permuted(m);
    std::shuffle(permuted.begin(), permuted.end(), gen);
    const auto p = completeness(testing::masked(v, permuted));
    CHECK(p.dropout_rate == c.dropout_rate);

    std::vector<std::uint8_t> contiguous(n, 0);
    std::fill(contiguous.begin(), contiguous.begin() + static_cast<std::ptrdiff_t>(dropped), 1);
    CHECK(completeness(testing::masked(v, contiguous)).max_gap_samples >= c.max_gap_samples);
  }
}

TEST_CASE("fleet summary") {
  const auto clean = testing::series_of(std::vector<double>(1000, 60.0));
  SUBCASE("one high drop-out channel") {
    std::vector<ChannelSeries> fleet{clean.with_pmu_id("A"), clean.with_pmu_id("B"),
                                     inject_missing(clean, 0.03, 5, std::nullopt, 1).series.with_pmu_id("C")};
    const auto r = fleet_summary(fleet);
    CHECK(r.high_dropout_count == 1);
    CHECK(r.any_missing_count == 1);
    CHECK(r.long_gap_count == 0);
  }
  SUBCASE("all clean") {
    const auto r = fleet_summary({clean.with_pmu_id("B"), clean.with_pmu_id("A")});
    CHECK(r.high_dropout_count == 0);
    CHECK(r.long_gap_count == 0);
    CHECK(r.any_missing_count == 0);
    CHECK(r.channels[0].pmu_id == "A");
  }
  SUBCASE("47 of 123 gapped") {
    std::vector<ChannelSeries> fleet;
    for (int i = 0; i < 123; ++i) {
      auto s = clean.with_pmu_id("P" + std::to_string(1000 + i));
      if (i < 47) s = inject_gap(s, 10 + static_cast<std::size_t>(i), 2);
      fleet.push_back(s);
    }
    const auto r = fleet_summary(fleet);
    CHECK(r.any_missing_count == 47);
    CHECK(r.any_missing_fraction == doctest::Approx(0.38).epsilon(0.01));
  }
  CHECK(code_of([] { fleet_summary({}); }) == code(ErrorCode::InvalidArgument));
}
