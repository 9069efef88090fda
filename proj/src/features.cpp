#include "dco/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace dco::features {

using datagen::Catalog;
using datagen::Creative;
using numerics::RngStream;

const char* field_id_name(FieldId f) {
  switch (f) {
    case FieldId::Sku: return "sku";
    case FieldId::Image: return "image";
    case FieldId::Tfidf: return "tfidf";
    case FieldId::Size: return "size";
    case FieldId::BgColor: return "bg_color";
    case FieldId::SkuColor: return "sku_color";
    case FieldId::TemplateSeries: return "template_series";
    case FieldId::Template: return "template";
  }
  return "?";
}

bool is_categorical(FieldId f) {
  switch (f) {
    case FieldId::Sku:
    case FieldId::BgColor:
    case FieldId::SkuColor:
    case FieldId::TemplateSeries:
    case FieldId::Template:
      return true;
    default:
      return false;
  }
}

bool is_creative_space(FieldId f) {
  return f == FieldId::TemplateSeries || f == FieldId::Template;
}

int FeatureSchema::cat_vocab(int slot) const {
  switch (slot) {
    case kCatSku: return sku_vocab;
    case kCatBgColor: return color_vocab;
    case kCatSkuColor: return color_vocab;
    case kCatSeries: return series_vocab;
    case kCatTemplate: return template_vocab;
  }
  throw InvalidArgument("bad categorical slot");
}

uint64_t token_hash(const std::string& token) {
  // FNV-1a 64.
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : token) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

int token_bucket(const std::string& token, int dims) {
  return static_cast<int>(token_hash(token) % static_cast<uint64_t>(dims));
}

double token_sign(const std::string& token) {
  return (token_hash(token) >> 32) & 1u ? 1.0 : -1.0;
}

uint64_t FeatureSchema::hash() const {
  std::ostringstream ss;
  ss << "dco.schema.v1|" << config.tfidf_dims << '|' << config.image_dims << '|'
     << config.image_noise_scale << '|' << config.image_seed << '|' << sku_vocab << '|'
     << color_vocab << '|' << series_vocab << '|' << template_vocab << '|' << n_docs << '|';
  for (const auto& w : config.promo_lexicon) ss << w << ',';
  ss << '|';
  for (const auto& [tok, idf_v] : idf) ss << tok << '=' << idf_v << ';';
  return token_hash(ss.str());
}

FeatureSchema build_schema(const Catalog& catalog, const SchemaConfig& config) {
  if (config.tfidf_dims < 1 || config.image_dims < 1)
    throw InvalidConfig("tfidf/image dims must be >= 1");
  FeatureSchema s;
  s.config = config;
  s.sku_vocab = static_cast<int>(catalog.skus.size()) + 1;
  s.color_vocab = 13;
  s.series_vocab = catalog.n_template_series() + 1;
  s.template_vocab = catalog.n_templates() + 1;
  s.image_dims = config.image_dims;
  s.text_dims = config.tfidf_dims + static_cast<int>(config.promo_lexicon.size());

  // Document frequencies over the catalog corpus.
  std::map<std::string, int> df;
  int n_docs = 0;
  for (int sku : catalog.skus) {
    for (const auto& c : catalog.creatives_by_sku[sku]) {
      ++n_docs;
      std::set<std::string> seen(c.elements.copy_tokens.begin(), c.elements.copy_tokens.end());
      for (const auto& tok : seen) df[tok] += 1;
    }
  }
  s.n_docs = n_docs;
  for (const auto& [tok, d] : df)
    s.idf[tok] = std::log((1.0 + n_docs) / (1.0 + d)) + 1.0;
  return s;
}

std::array<int, kNumCatSlots> encode_categoricals(const Creative& creative, const Catalog& catalog,
                                                  const FeatureSchema& schema) {
  auto encode = [](int value, int vocab) { return (value >= 0 && value + 1 < vocab) ? value + 1 : 0; };
  std::array<int, kNumCatSlots> out{};
  out[kCatSku] = encode(creative.elements.sku_id, schema.sku_vocab);
  out[kCatBgColor] = encode(creative.elements.bg_color, schema.color_vocab);
  const int sku = creative.elements.sku_id;
  const int sku_color =
      (sku >= 0 && sku < static_cast<int>(catalog.sku_color.size())) ? catalog.sku_color[sku] : -1;
  out[kCatSkuColor] = encode(sku_color, schema.color_vocab);
  out[kCatSeries] = encode(creative.elements.template_series_id, schema.series_vocab);
  out[kCatTemplate] = encode(creative.elements.template_id, schema.template_vocab);
  return out;
}

std::vector<double> dominant_color_onehot(const std::string& color_name) {
  const int idx = datagen::color_index(color_name);  // throws on unknown
  std::vector<double> out(12, 0.0);
  out[idx] = 1.0;
  return out;
}

std::vector<std::vector<double>> tfidf_features(
    const std::vector<std::vector<std::string>>& corpus, int dims) {
  if (dims < 1) throw InvalidArgument("tfidf dims must be >= 1");
  if (corpus.empty()) throw InvalidArgument("tfidf corpus is empty");
  const int n = static_cast<int>(corpus.size());
  std::map<std::string, int> df;
  for (const auto& doc : corpus) {
    std::set<std::string> seen(doc.begin(), doc.end());
    for (const auto& tok : seen) df[tok] += 1;
  }
  std::vector<std::vector<double>> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) {
    std::map<std::string, int> tf;
    for (const auto& tok : doc) tf[tok] += 1;
    std::vector<double> v(dims, 0.0);
    for (const auto& [tok, count] : tf) {
      const double idf = std::log((1.0 + n) / (1.0 + df[tok])) + 1.0;
      v[token_bucket(tok, dims)] += token_sign(tok) * count * idf;
    }
    const double norm = numerics::l2_norm(v);
    if (norm > 0.0)
      for (auto& x : v) x /= norm;
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<double> promo_word_flags(const std::vector<std::string>& copy_tokens,
                                     const std::vector<std::string>& lexicon) {
  if (lexicon.empty()) throw InvalidArgument("promo lexicon is empty");
  std::vector<double> flags(lexicon.size(), 0.0);
  for (size_t i = 0; i < lexicon.size(); ++i)
    for (const auto& tok : copy_tokens)
      if (tok == lexicon[i]) {
        flags[i] = 1.0;
        break;
      }
  return flags;
}

namespace {

/// Row-normalized text block: hashed tf-idf against the schema idf table,
/// promo flags appended unnormalized.
std::vector<double> text_block(const std::vector<std::string>& tokens, const FeatureSchema& schema) {
  std::vector<double> v(schema.config.tfidf_dims, 0.0);
  std::map<std::string, int> tf;
  for (const auto& tok : tokens) tf[tok] += 1;
  for (const auto& [tok, count] : tf) {
    const auto it = schema.idf.find(tok);
    // Unseen tokens get the max-smoothing idf of a zero-df token.
    const double idf = it != schema.idf.end() ? it->second
                                              : std::log((1.0 + schema.n_docs) / 1.0) + 1.0;
    v[token_bucket(tok, schema.config.tfidf_dims)] += token_sign(tok) * count * idf;
  }
  const double norm = numerics::l2_norm(v);
  if (norm > 0.0)
    for (auto& x : v) x /= norm;
  const auto flags = promo_word_flags(tokens, schema.config.promo_lexicon);
  v.insert(v.end(), flags.begin(), flags.end());
  return v;
}

std::vector<double> image_projection_row(const FeatureSchema& schema, int out_row, int in_dims) {
  // Row out_row of the fixed projection, drawn from its own substream so rows
  // are independent of each other and of the noise streams.
  RngStream rng(schema.config.image_seed, static_cast<uint64_t>(out_row));
  std::vector<double> row(in_dims);
  for (auto& x : row) x = rng.normal() / std::sqrt(static_cast<double>(schema.config.image_dims));
  return row;
}

}  // namespace

std::vector<double> synth_image_embedding(const Catalog& catalog, int creative_id,
                                          const FeatureSchema& schema) {
  const auto latent = catalog.creative_latent(creative_id);
  const int dims = schema.config.image_dims;
  std::vector<double> emb(dims, 0.0);
  for (int r = 0; r < dims; ++r) {
    const auto row = image_projection_row(schema, r, static_cast<int>(latent.size()));
    double s = 0.0;
    for (size_t k = 0; k < latent.size(); ++k) s += row[k] * latent[k];
    emb[r] = s;
  }
  double norm = numerics::l2_norm(emb);
  if (norm > 0.0)
    for (auto& x : emb) x /= norm;

  RngStream noise_rng(schema.config.image_seed, 0x100000000ull + static_cast<uint64_t>(creative_id));
  std::vector<double> noise(dims);
  for (auto& x : noise) x = noise_rng.normal();
  norm = numerics::l2_norm(noise);
  if (norm > 0.0)
    for (size_t k = 0; k < noise.size(); ++k) emb[k] += schema.config.image_noise_scale * noise[k] / norm;

  norm = numerics::l2_norm(emb);
  if (norm > 0.0)
    for (auto& x : emb) x /= norm;
  return emb;
}

FeatureTable build_features(const Catalog& catalog, const FeatureSchema& schema) {
  FeatureTable table;
  table.schema = schema;
  table.rows.resize(catalog.total_creatives());
  for (int sku : catalog.skus) {
    for (const auto& c : catalog.creatives_by_sku[sku]) {
      FeatureVector& row = table.rows[c.creative_id];
      row.cat = encode_categoricals(c, catalog, schema);
      row.image = synth_image_embedding(catalog, c.creative_id, schema);
      row.text = text_block(c.elements.copy_tokens, schema);
      row.size[0] = c.elements.width / 1000.0;
      row.size[1] = c.elements.height / 1000.0;
      row.size[2] = static_cast<double>(c.elements.width) / c.elements.height;
    }
  }
  return table;
}

int item_vector_dims(const FeatureSchema& schema) {
  return schema.image_dims + schema.text_dims + schema.size_dims + 2 * schema.color_vocab +
         schema.series_vocab + schema.template_vocab;
}

std::vector<double> item_vector(const FeatureVector& row, const FeatureSchema& schema) {
  std::vector<double> v;
  v.reserve(item_vector_dims(schema));
  v.insert(v.end(), row.image.begin(), row.image.end());
  v.insert(v.end(), row.text.begin(), row.text.end());
  v.insert(v.end(), row.size.begin(), row.size.end());
  auto onehot = [&v](int idx, int vocab) {
    std::vector<double> block(vocab, 0.0);
    if (idx >= 0 && idx < vocab) block[idx] = 1.0;
    v.insert(v.end(), block.begin(), block.end());
  };
  onehot(row.cat[kCatBgColor], schema.color_vocab);
  onehot(row.cat[kCatSkuColor], schema.color_vocab);
  onehot(row.cat[kCatSeries], schema.series_vocab);
  onehot(row.cat[kCatTemplate], schema.template_vocab);
  return v;
}

void split_by_creative(const Dataset& ds, double val_fraction, uint64_t salt, Dataset& train,
                       Dataset& val) {
  if (val_fraction < 0.0 || val_fraction >= 1.0)
    throw InvalidArgument("val_fraction outside [0,1)");
  train.table = ds.table;
  val.table = ds.table;
  train.examples.clear();
  val.examples.clear();
  const auto threshold = static_cast<uint64_t>(val_fraction * 4294967296.0);
  for (const auto& ex : ds.examples) {
    RngStream h(salt, static_cast<uint64_t>(ex.creative_id));
    const bool to_val = (h.next_u64() & 0xffffffffull) < threshold;
    (to_val ? val : train).examples.push_back(ex);
  }
}

void write_dataset_file(const std::string& path, const Dataset& ds) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for write: " + path);
  f << "dco.dataset 1 " << ds.table->schema.hash() << "\n";
  for (const auto& ex : ds.examples)
    f << ex.creative_id << ' ' << ex.day << ' ' << ex.label << "\n";
}

Dataset read_dataset_file(const std::string& path, std::shared_ptr<const FeatureTable> table) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open for read: " + path);
  std::string magic;
  int version = 0;
  uint64_t hash = 0;
  f >> magic >> version >> hash;
  if (magic != "dco.dataset" || version != 1) throw IoError("bad dataset header: " + path);
  if (table && hash != table->schema.hash())
    throw IncompatibleModel("dataset schema hash does not match feature table");
  Dataset ds;
  ds.table = std::move(table);
  Example ex;
  while (f >> ex.creative_id >> ex.day >> ex.label) {
    ex.row = ex.creative_id;
    ds.examples.push_back(ex);
  }
  return ds;
}

}  // namespace dco::features
