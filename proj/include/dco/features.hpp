#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dco/common.hpp"
#include "dco/datagen.hpp"
#include "dco/numerics.hpp"

namespace dco::features {

/// The eight model fields, fixed order. Sku..SkuColor are contextual,
/// TemplateSeries/Template span the creative space.
enum class FieldId {
  Sku = 0,
  Image = 1,
  Tfidf = 2,
  Size = 3,
  BgColor = 4,
  SkuColor = 5,
  TemplateSeries = 6,
  Template = 7
};
constexpr int kNumFields = 8;
const char* field_id_name(FieldId f);
bool is_categorical(FieldId f);
bool is_creative_space(FieldId f);

/// Slot order of the categorical indices inside a FeatureVector.
enum CatSlot { kCatSku = 0, kCatBgColor = 1, kCatSkuColor = 2, kCatSeries = 3, kCatTemplate = 4 };
constexpr int kNumCatSlots = 5;

struct SchemaConfig {
  int tfidf_dims = 256;
  int image_dims = 32;
  double image_noise_scale = 0.1;
  std::vector<std::string> promo_lexicon = {"discount", "full_discount", "sale", "hot"};
  uint64_t image_seed = 0x5eedbeef;
};

struct FeatureSchema {
  SchemaConfig config;
  // Vocab sizes include the reserved unknown index 0.
  int sku_vocab = 0;
  int color_vocab = 13;
  int series_vocab = 0;
  int template_vocab = 0;
  // Dense block widths.
  int image_dims = 0;
  int text_dims = 0;  // tfidf buckets + promo flags
  int size_dims = 3;
  // Smoothed idf per token over the catalog corpus.
  std::map<std::string, double> idf;
  int n_docs = 0;

  int cat_vocab(int slot) const;
  uint64_t hash() const;
};

struct FeatureVector {
  std::array<int, kNumCatSlots> cat{};  // encoded indices, 0 = unknown
  std::vector<double> image;
  std::vector<double> text;
  std::array<double, 3> size{};
};

struct FeatureTable {
  FeatureSchema schema;
  std::vector<FeatureVector> rows;  // indexed by creative_id
};

struct Example {
  int row = 0;  // index into FeatureTable::rows (== creative_id)
  double label = 0.0;
  int creative_id = 0;
  int day = 0;
};

struct Dataset {
  std::shared_ptr<const FeatureTable> table;
  std::vector<Example> examples;
};

// --- token hashing, shared with the brute-force oracle in tests ---
uint64_t token_hash(const std::string& token);
int token_bucket(const std::string& token, int dims);
double token_sign(const std::string& token);

FeatureSchema build_schema(const datagen::Catalog& catalog, const SchemaConfig& config);

/// Encoded categorical indices for one creative. Out-of-vocabulary -> 0.
std::array<int, kNumCatSlots> encode_categoricals(const datagen::Creative& creative,
                                                  const datagen::Catalog& catalog,
                                                  const FeatureSchema& schema);

/// 12-dim one-hot for a palette color name; unknown -> InvalidArgument.
std::vector<double> dominant_color_onehot(const std::string& color_name);

/// Hashed, smoothed tf-idf per document: idf = ln((1+N)/(1+df)) + 1,
/// signed hashing into dims buckets, then L2 normalization per document.
std::vector<std::vector<double>> tfidf_features(
    const std::vector<std::vector<std::string>>& corpus, int dims);

std::vector<double> promo_word_flags(const std::vector<std::string>& copy_tokens,
                                     const std::vector<std::string>& lexicon);

/// Deterministic synthetic image embedding: fixed random projection of the
/// creative's planted latent plus small id-keyed noise, unit L2 norm.
std::vector<double> synth_image_embedding(const datagen::Catalog& catalog, int creative_id,
                                          const FeatureSchema& schema);

/// Full feature rows for every creative in the catalog. Pure function of
/// (catalog, schema); re-running yields identical tables.
FeatureTable build_features(const datagen::Catalog& catalog, const FeatureSchema& schema);

/// Dense per-item vector for listwise models: [image | text | size | one-hot
/// bg color | one-hot sku color | one-hot series | one-hot template].
std::vector<double> item_vector(const FeatureVector& row, const FeatureSchema& schema);
int item_vector_dims(const FeatureSchema& schema);

/// Deterministic split by creative id hash; examples of one creative never
/// straddle the split.
void split_by_creative(const Dataset& ds, double val_fraction, uint64_t salt, Dataset& train,
                       Dataset& val);

// --- persistence (labeled examples + schema hash; features rebuild from the world) ---
void write_dataset_file(const std::string& path, const Dataset& ds);
Dataset read_dataset_file(const std::string& path, std::shared_ptr<const FeatureTable> table);

}  // namespace dco::features
