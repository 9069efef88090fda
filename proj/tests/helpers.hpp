#pragma once

// Shared scaffolding for the test suites: tiny hand-built worlds and small
// independent oracles. Everything here is test-only and kept deliberately
// separate from the library implementations it checks.

#include <cmath>
#include <vector>

#include "dco/datagen.hpp"

namespace dco::testing {

/// Minimal hand-built catalog: one sku, `m` creatives, unit latents.
/// Bypasses generate_catalog so tests can violate its m >= 2 floor.
inline datagen::Catalog tiny_catalog(int m, int latent_dim = 2) {
  datagen::Catalog cat;
  cat.config.n_skus = 1;
  cat.config.creatives_per_sku_min = m;
  cat.config.creatives_per_sku_max = m;
  cat.config.n_business_groups = 1;
  cat.config.series_per_group = 1;
  cat.config.templates_per_series = 1;
  cat.config.copy_vocab = 4;
  cat.config.n_sizes = 1;
  cat.config.latent_dim = latent_dim;
  cat.skus = {0};
  cat.sku_color = {0};
  cat.sku_group = {0};
  cat.size_menu = {{300, 250}};
  std::vector<datagen::Creative> list;
  for (int j = 0; j < m; ++j) {
    datagen::Creative c;
    c.creative_id = j;
    c.elements.sku_id = 0;
    c.elements.template_series_id = 0;
    c.elements.template_id = 0;
    c.elements.width = 300;
    c.elements.height = 250;
    c.elements.bg_color = 0;
    c.elements.copy_tokens = {"tok1"};
    list.push_back(c);
  }
  cat.creatives_by_sku.push_back(list);
  for (int f = 0; f < datagen::kNumPlantFields; ++f) {
    int vocab = 1;
    if (f == static_cast<int>(datagen::Field::Sku)) vocab = 1;
    if (f == static_cast<int>(datagen::Field::BgColor)) vocab = 12;
    cat.latents[f].assign(vocab, std::vector<double>(latent_dim, 1.0));
  }
  cat.rebuild_index();
  return cat;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / v.size();
}

}  // namespace dco::testing
