#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dco/common.hpp"
#include "dco/numerics.hpp"

namespace dco::datagen {

/// Fixed 12-hue palette for background and product colors.
const std::array<std::string, 12>& color_palette();
int color_index(const std::string& name);  // throws InvalidArgument on unknown

/// Fields a ground-truth pair effect can be planted on.
enum class Field { Sku = 0, TemplateSeries = 1, Template = 2, BgColor = 3, Size = 4 };
constexpr int kNumPlantFields = 5;
const char* field_name(Field f);
Field field_from_name(const std::string& name);

/// Interaction operators, in the fixed architecture order.
enum class Operator { Concat = 0, Multiply = 1, Plus = 2, Max = 3, Min = 4 };
constexpr int kNumOperators = 5;
const char* operator_name(Operator op);
Operator operator_from_name(const std::string& name);

struct CreativeElements {
  int sku_id = 0;
  int template_series_id = 0;
  int template_id = 0;
  int width = 0;
  int height = 0;
  int bg_color = 0;  // palette index
  std::vector<std::string> copy_tokens;
};

struct Creative {
  int creative_id = 0;
  CreativeElements elements;
};

struct GenConfig {
  int n_skus = 50;
  int creatives_per_sku_min = 4;
  int creatives_per_sku_max = 10;
  int n_business_groups = 4;
  int series_per_group = 4;  // template-series fan-out per business group
  int templates_per_series = 4;
  int copy_vocab = 120;
  int copy_len_min = 3;
  int copy_len_max = 8;
  int n_sizes = 6;      // entries taken from the fixed size menu
  int latent_dim = 4;   // planted per-value latent width
  double latent_mean = 0.6;
};

/// Synthetic catalog. Besides the creatives themselves it carries the planted
/// per-value latent tables that the ground truth and the synthetic image
/// embeddings are built from.
struct Catalog {
  GenConfig config;
  std::vector<int> skus;
  std::vector<std::vector<Creative>> creatives_by_sku;  // indexed by sku id
  std::vector<int> sku_color;                           // palette index per sku
  std::vector<int> sku_group;                           // business group per sku
  std::vector<std::pair<int, int>> size_menu;           // (width, height)

  // latents[field][value] is a latent_dim vector
  std::array<std::vector<std::vector<double>>, kNumPlantFields> latents;

  int n_template_series() const { return config.n_business_groups * config.series_per_group; }
  int n_templates() const { return n_template_series() * config.templates_per_series; }
  int total_creatives() const { return static_cast<int>(flat_.size()); }
  const Creative& creative(int creative_id) const;
  int size_index(int width, int height) const;
  /// Latent for one element value of a creative.
  const std::vector<double>& value_latent(Field f, const Creative& c) const;
  /// Concatenated latents of all five element fields.
  std::vector<double> creative_latent(int creative_id) const;

  void rebuild_index();  // call after manual construction

 private:
  std::vector<std::pair<int, int>> flat_;  // creative_id -> (sku, position)
};

struct PlantedPairSpec {
  Field field_a = Field::TemplateSeries;
  Field field_b = Field::BgColor;
  Operator op = Operator::Multiply;
  double effect_scale = 1.0;  // factor spans exp(+-scale)
  /// Use fixed alternating-sign combination weights (+1,-1,...) instead of a
  /// random draw. A signed contrast of operator components has level sets no
  /// additive surrogate can reproduce, which keeps the planted operator
  /// identifiable from thresholded labels.
  bool contrast_weights = false;
};

struct PlantSpec {
  double base_rate = 0.02;
  std::vector<PlantedPairSpec> pairs;
  double drift_fraction = 0.0;  // fraction of creatives with day-level drift
  double drift_sigma = 0.8;     // lognormal sigma, mean-one normalized
  bool clamp = true;
  double clamp_lo = 0.001;
  double clamp_hi = 0.5;
};

struct PlantedPair {
  Field field_a;
  Field field_b;
  Operator op;
  double effect_scale;
  std::vector<double> combine_w;  // latent_dim (2x for concat)
  double center;                  // catalog mean of the raw combination score
};

struct GroundTruthCtr {
  double base_rate = 0.02;
  std::vector<PlantedPair> pairs;
  std::vector<double> factor;     // per creative, product over planted pairs
  std::vector<uint8_t> drifted;   // per creative
  double drift_sigma = 0.8;
  uint64_t drift_key = 0;
  bool clamp = true;
  double clamp_lo = 0.001;
  double clamp_hi = 0.5;

  /// Mean-one lognormal day multiplier; 1.0 for undrifted creatives.
  double drift_multiplier(int creative_id, int day) const;
  double ctr(int creative_id, int day) const;
};

struct ImpressionRecord {
  int day = 0;
  int sku_id = 0;
  int creative_id = 0;
  bool clicked = false;
};

struct TrafficSpec {
  long long impressions_per_day = 100000;
  double powerlaw_exponent = 1.5;  // within-sku head-heaviness
};

Catalog generate_catalog(const GenConfig& config, numerics::RngStream rng);

GroundTruthCtr generate_ground_truth_ctr(const Catalog& catalog, const PlantSpec& plant,
                                         numerics::RngStream rng);

/// Planned per-creative impression counts for one day. Largest-remainder
/// rounding; identical every day, so replayed counts match exactly.
std::vector<long long> planned_counts(const Catalog& catalog, const TrafficSpec& traffic);

/// One day of logs. rng must be the per-day stream (stream_id = day).
std::vector<ImpressionRecord> simulate_day(const Catalog& catalog, const GroundTruthCtr& gt,
                                           int day, const TrafficSpec& traffic,
                                           numerics::RngStream day_rng);

std::vector<ImpressionRecord> simulate_logs(const Catalog& catalog, const GroundTruthCtr& gt,
                                            int days, const TrafficSpec& traffic,
                                            numerics::RngStream rng);

// --- persistence ---

void write_logs(std::ostream& out, const std::vector<ImpressionRecord>& records);
void write_logs_file(const std::string& path, const std::vector<ImpressionRecord>& records);
std::vector<ImpressionRecord> read_logs(std::istream& in);
std::vector<ImpressionRecord> read_logs_file(const std::string& path);

/// Catalog and ground truth as one structured JSON document.
std::string world_to_json(const Catalog& catalog, const GroundTruthCtr& gt);
void world_from_json(const std::string& text, Catalog& catalog, GroundTruthCtr& gt);

}  // namespace dco::datagen
