#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "dco/datagen.hpp"
#include "helpers.hpp"

using namespace dco;
using namespace dco::datagen;
using dco::numerics::RngStream;

namespace {

GenConfig small_config() {
  GenConfig cfg;
  cfg.n_skus = 12;
  cfg.creatives_per_sku_min = 3;
  cfg.creatives_per_sku_max = 6;
  cfg.n_business_groups = 3;
  cfg.series_per_group = 4;
  cfg.templates_per_series = 4;
  return cfg;
}

}  // namespace

TEST_CASE("catalog respects requested creative counts") {
  GenConfig cfg = small_config();
  cfg.n_skus = 1;
  cfg.creatives_per_sku_min = 2;
  cfg.creatives_per_sku_max = 2;
  auto cat = generate_catalog(cfg, RngStream(1, 0));
  CHECK(cat.total_creatives() == 2);
  CHECK(cat.creatives_by_sku[0].size() == 2);
}

TEST_CASE("catalog fan-out: each business group owns series_per_group series") {
  GenConfig cfg = small_config();
  cfg.series_per_group = 4;
  auto cat = generate_catalog(cfg, RngStream(2, 0));
  // Group of a series is series_id / series_per_group; check containment of
  // creatives' series in their sku's group, and the one-to-many
  // series->template relation.
  std::map<int, std::set<int>> series_by_group;
  for (int sku : cat.skus) {
    for (const auto& c : cat.creatives_by_sku[sku]) {
      const int series = c.elements.template_series_id;
      CHECK(series / cfg.series_per_group == cat.sku_group[sku]);
      series_by_group[series / cfg.series_per_group].insert(series);
      CHECK(c.elements.template_id / cfg.templates_per_series == series);
    }
  }
  for (const auto& [group, series] : series_by_group) {
    (void)group;
    CHECK(series.size() <= static_cast<size_t>(cfg.series_per_group));
  }
}

TEST_CASE("catalog generation is deterministic") {
  GenConfig cfg = small_config();
  cfg.n_skus = 100;
  auto a = generate_catalog(cfg, RngStream(42, 7));
  auto b = generate_catalog(cfg, RngStream(42, 7));
  REQUIRE(a.total_creatives() == b.total_creatives());
  for (int i = 0; i < a.total_creatives(); ++i) {
    const auto& ca = a.creative(i).elements;
    const auto& cb = b.creative(i).elements;
    CHECK(ca.sku_id == cb.sku_id);
    CHECK(ca.template_id == cb.template_id);
    CHECK(ca.bg_color == cb.bg_color);
    CHECK(ca.copy_tokens == cb.copy_tokens);
  }
  CHECK(a.latents == b.latents);
}

TEST_CASE("catalog rejects zero vocab") {
  GenConfig cfg = small_config();
  cfg.copy_vocab = 0;
  CHECK_THROWS_AS(generate_catalog(cfg, RngStream(1, 0)), InvalidConfig);
  cfg = small_config();
  cfg.n_business_groups = 0;
  CHECK_THROWS_AS(generate_catalog(cfg, RngStream(1, 0)), InvalidConfig);
}

TEST_CASE("ground truth with no plants is flat") {
  auto cat = generate_catalog(small_config(), RngStream(3, 0));
  PlantSpec plant;
  plant.base_rate = 0.02;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(3, 1));
  for (int c = 0; c < cat.total_creatives(); ++c)
    for (int day : {0, 1, 5})
      CHECK(gt.ctr(c, day) == doctest::Approx(0.02).epsilon(1e-15));
}

TEST_CASE("drift fraction is honored within 2% per within-sku position") {
  GenConfig cfg = small_config();
  cfg.n_skus = 200;
  cfg.creatives_per_sku_min = 5;
  cfg.creatives_per_sku_max = 5;
  auto cat = generate_catalog(cfg, RngStream(4, 0));
  PlantSpec plant;
  plant.drift_fraction = 0.46;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(4, 1));

  double total = 0.0;
  for (auto d : gt.drifted) total += d;
  CHECK(total / cat.total_creatives() == doctest::Approx(0.46).epsilon(0.02));

  // Within any within-sku position stratum the fraction also holds.
  for (int pos = 0; pos < 5; ++pos) {
    int n = 0, k = 0;
    for (int sku : cat.skus) {
      ++n;
      if (gt.drifted[cat.creatives_by_sku[sku][pos].creative_id]) ++k;
    }
    CHECK(std::abs(static_cast<double>(k) / n - 0.46) <= 0.02 + 1e-12);
  }
}

TEST_CASE("drift fraction outside [0,1] is rejected") {
  auto cat = generate_catalog(small_config(), RngStream(5, 0));
  PlantSpec plant;
  plant.drift_fraction = 1.2;
  CHECK_THROWS_AS(generate_ground_truth_ctr(cat, plant, RngStream(5, 1)), InvalidConfig);
}

TEST_CASE("planted max effect matches an independent table-walk oracle") {
  GenConfig cfg = small_config();
  cfg.n_skus = 40;
  auto cat = generate_catalog(cfg, RngStream(6, 0));
  PlantSpec plant;
  plant.base_rate = 0.02;
  plant.clamp = false;
  PlantedPairSpec pair;
  pair.field_a = Field::TemplateSeries;
  pair.field_b = Field::BgColor;
  pair.op = Operator::Max;
  pair.effect_scale = 1.0;
  plant.pairs.push_back(pair);
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(6, 1));
  REQUIRE(gt.pairs.size() == 1);
  const auto& planted = gt.pairs[0];

  // Oracle: recompute the factor of every creative by walking the latent
  // tables directly with the stored weights.
  for (int c = 0; c < cat.total_creatives(); ++c) {
    const auto& cr = cat.creative(c);
    const auto& u = cat.latents[static_cast<int>(Field::TemplateSeries)][cr.elements.template_series_id];
    const auto& v = cat.latents[static_cast<int>(Field::BgColor)][cr.elements.bg_color];
    double s = 0.0;
    for (size_t k = 0; k < u.size(); ++k) s += planted.combine_w[k] * std::max(u[k], v[k]);
    const double expect = 0.02 * std::exp(1.0 * std::tanh(s - planted.center));
    CHECK(gt.ctr(c, 0) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("clamp keeps rates inside the configured band") {
  auto cat = generate_catalog(small_config(), RngStream(7, 0));
  PlantSpec plant;
  plant.base_rate = 0.4;
  PlantedPairSpec pair;
  pair.op = Operator::Plus;
  pair.effect_scale = 3.0;  // extreme factors to force clamping
  plant.pairs.push_back(pair);
  plant.drift_fraction = 0.5;
  plant.drift_sigma = 1.5;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(7, 1));
  for (int c = 0; c < cat.total_creatives(); ++c)
    for (int day = 0; day < 5; ++day) {
      const double r = gt.ctr(c, day);
      CHECK(r >= 0.001);
      CHECK(r <= 0.5);
    }
}

TEST_CASE("undrifted creatives have identical ctr on every day") {
  auto cat = generate_catalog(small_config(), RngStream(8, 0));
  PlantSpec plant;
  plant.drift_fraction = 0.3;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(8, 1));
  for (int c = 0; c < cat.total_creatives(); ++c) {
    if (gt.drifted[c]) continue;
    const double r0 = gt.ctr(c, 0);
    for (int day = 1; day < 8; ++day) CHECK(gt.ctr(c, day) == r0);
  }
}

TEST_CASE("deterministic ctr=1 world produces all clicks") {
  auto cat = dco::testing::tiny_catalog(1);
  PlantSpec plant;
  plant.base_rate = 1.0;
  plant.clamp = false;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(9, 1));
  TrafficSpec traffic;
  traffic.impressions_per_day = 100;
  auto logs = simulate_logs(cat, gt, 1, traffic, RngStream(9, 2));
  REQUIRE(logs.size() == 100);
  for (const auto& r : logs) CHECK(r.clicked);
}

TEST_CASE("power-law head takes most impressions") {
  auto cat = dco::testing::tiny_catalog(200);
  TrafficSpec traffic;
  traffic.impressions_per_day = 100000;
  traffic.powerlaw_exponent = 1.5;
  auto plan = planned_counts(cat, traffic);

  // Allocation oracle: direct weight computation.
  double z = 0.0;
  for (int j = 1; j <= 200; ++j) z += std::pow(j, -1.5);
  long long head = 0, total = 0;
  for (int j = 0; j < 200; ++j) {
    total += plan[j];
    if (j < 20) head += plan[j];
  }
  CHECK(total == 100000);
  double head_expect = 0.0;
  for (int j = 1; j <= 20; ++j) head_expect += std::pow(j, -1.5) / z;
  CHECK(static_cast<double>(head) / total == doctest::Approx(head_expect).epsilon(0.01));
  CHECK(head > total / 2);
}

TEST_CASE("log counts equal planned counts and logs are deterministic") {
  auto cat = generate_catalog(small_config(), RngStream(10, 0));
  PlantSpec plant;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(10, 1));
  TrafficSpec traffic;
  traffic.impressions_per_day = 5000;
  auto logs = simulate_logs(cat, gt, 3, traffic, RngStream(10, 2));
  auto logs2 = simulate_logs(cat, gt, 3, traffic, RngStream(10, 2));
  REQUIRE(logs.size() == logs2.size());
  for (size_t i = 0; i < logs.size(); ++i) {
    CHECK(logs[i].creative_id == logs2[i].creative_id);
    CHECK(logs[i].clicked == logs2[i].clicked);
  }

  auto plan = planned_counts(cat, traffic);
  std::map<std::pair<int, int>, long long> counts;
  for (const auto& r : logs) counts[{r.creative_id, r.day}] += 1;
  for (int c = 0; c < cat.total_creatives(); ++c)
    for (int day = 0; day < 3; ++day)
      if (plan[c] > 0) CHECK(counts[{c, day}] == plan[c]);

  // Sorted by day, and arrival order within day is stable.
  for (size_t i = 1; i < logs.size(); ++i) CHECK(logs[i - 1].day <= logs[i].day);
}

TEST_CASE("well-exposed creative empirical ctr is close to ground truth") {
  auto cat = dco::testing::tiny_catalog(3);
  PlantSpec plant;
  plant.base_rate = 0.1;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(11, 1));
  TrafficSpec traffic;
  traffic.impressions_per_day = 30000;
  traffic.powerlaw_exponent = 1.0;
  auto logs = simulate_logs(cat, gt, 1, traffic, RngStream(11, 2));
  long long n = 0, clicks = 0;
  for (const auto& r : logs)
    if (r.creative_id == 0) {
      ++n;
      clicks += r.clicked;
    }
  REQUIRE(n >= 10000);
  const double p = 0.1;
  const double se = std::sqrt(p * (1 - p) / n);
  CHECK(std::abs(static_cast<double>(clicks) / n - p) <= 3 * se);
}

TEST_CASE("simulate_logs rejects non-positive days") {
  auto cat = dco::testing::tiny_catalog(2);
  PlantSpec plant;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(12, 1));
  CHECK_THROWS_AS(simulate_logs(cat, gt, 0, TrafficSpec{}, RngStream(12, 2)), InvalidConfig);
}

TEST_CASE("log stream round trip") {
  auto cat = generate_catalog(small_config(), RngStream(13, 0));
  PlantSpec plant;
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(13, 1));
  TrafficSpec traffic;
  traffic.impressions_per_day = 1000;
  auto logs = simulate_logs(cat, gt, 2, traffic, RngStream(13, 2));
  std::stringstream ss;
  write_logs(ss, logs);
  auto back = read_logs(ss);
  REQUIRE(back.size() == logs.size());
  for (size_t i = 0; i < logs.size(); ++i) {
    CHECK(back[i].day == logs[i].day);
    CHECK(back[i].sku_id == logs[i].sku_id);
    CHECK(back[i].creative_id == logs[i].creative_id);
    CHECK(back[i].clicked == logs[i].clicked);
  }
}

TEST_CASE("world document round trip preserves rates") {
  auto cat = generate_catalog(small_config(), RngStream(14, 0));
  PlantSpec plant;
  plant.drift_fraction = 0.4;
  PlantedPairSpec pair;
  pair.op = Operator::Min;
  plant.pairs.push_back(pair);
  auto gt = generate_ground_truth_ctr(cat, plant, RngStream(14, 1));

  const std::string text = world_to_json(cat, gt);
  Catalog cat2;
  GroundTruthCtr gt2;
  world_from_json(text, cat2, gt2);
  REQUIRE(cat2.total_creatives() == cat.total_creatives());
  for (int c = 0; c < cat.total_creatives(); ++c)
    for (int day : {0, 3}) CHECK(gt2.ctr(c, day) == gt.ctr(c, day));
  CHECK(world_to_json(cat2, gt2) == text);
}
