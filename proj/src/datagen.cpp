#include "dco/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace dco::datagen {

using numerics::RngStream;

const std::array<std::string, 12>& color_palette() {
  // The 12-step hue wheel.
  static const std::array<std::string, 12> palette = {
      "red",  "orange", "yellow", "chartreuse", "green",   "spring_green",
      "cyan", "azure",  "blue",   "violet",     "magenta", "rose"};
  return palette;
}

int color_index(const std::string& name) {
  const auto& p = color_palette();
  for (size_t i = 0; i < p.size(); ++i)
    if (p[i] == name) return static_cast<int>(i);
  throw InvalidArgument("unknown color: " + name);
}

const char* field_name(Field f) {
  switch (f) {
    case Field::Sku: return "sku";
    case Field::TemplateSeries: return "template_series";
    case Field::Template: return "template";
    case Field::BgColor: return "bg_color";
    case Field::Size: return "size";
  }
  return "?";
}

Field field_from_name(const std::string& name) {
  for (int i = 0; i < kNumPlantFields; ++i)
    if (name == field_name(static_cast<Field>(i))) return static_cast<Field>(i);
  throw InvalidArgument("unknown field: " + name);
}

const char* operator_name(Operator op) {
  switch (op) {
    case Operator::Concat: return "concat";
    case Operator::Multiply: return "multiply";
    case Operator::Plus: return "plus";
    case Operator::Max: return "max";
    case Operator::Min: return "min";
  }
  return "?";
}

Operator operator_from_name(const std::string& name) {
  for (int i = 0; i < kNumOperators; ++i)
    if (name == operator_name(static_cast<Operator>(i))) return static_cast<Operator>(i);
  throw InvalidArgument("unknown operator: " + name);
}

const Creative& Catalog::creative(int creative_id) const {
  if (creative_id < 0 || creative_id >= total_creatives())
    throw InvalidArgument("creative id out of range");
  const auto& [sku, pos] = flat_[creative_id];
  return creatives_by_sku[sku][pos];
}

int Catalog::size_index(int width, int height) const {
  for (size_t i = 0; i < size_menu.size(); ++i)
    if (size_menu[i].first == width && size_menu[i].second == height) return static_cast<int>(i);
  throw InvalidArgument("size not in menu");
}

const std::vector<double>& Catalog::value_latent(Field f, const Creative& c) const {
  int value = 0;
  switch (f) {
    case Field::Sku: value = c.elements.sku_id; break;
    case Field::TemplateSeries: value = c.elements.template_series_id; break;
    case Field::Template: value = c.elements.template_id; break;
    case Field::BgColor: value = c.elements.bg_color; break;
    case Field::Size: value = size_index(c.elements.width, c.elements.height); break;
  }
  const auto& table = latents[static_cast<int>(f)];
  if (value < 0 || value >= static_cast<int>(table.size()))
    throw InvalidArgument("element value outside latent table");
  return table[value];
}

std::vector<double> Catalog::creative_latent(int creative_id) const {
  const Creative& c = creative(creative_id);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(kNumPlantFields) * config.latent_dim);
  for (int f = 0; f < kNumPlantFields; ++f) {
    const auto& v = value_latent(static_cast<Field>(f), c);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

void Catalog::rebuild_index() {
  flat_.clear();
  for (int sku = 0; sku < static_cast<int>(creatives_by_sku.size()); ++sku) {
    const auto& list = creatives_by_sku[sku];
    for (int pos = 0; pos < static_cast<int>(list.size()); ++pos) {
      if (static_cast<int>(flat_.size()) != list[pos].creative_id)
        throw InvalidArgument("creative ids must be dense in catalog order");
      flat_.push_back({sku, pos});
    }
  }
}

namespace {

const std::vector<std::pair<int, int>>& size_menu_master() {
  static const std::vector<std::pair<int, int>> menu = {
      {300, 250}, {728, 90}, {320, 50}, {160, 600}, {970, 250}, {640, 360}, {336, 280}, {468, 60}};
  return menu;
}

std::vector<std::string> build_copy_vocab(int n, const std::vector<std::string>& promo) {
  std::vector<std::string> vocab = promo;
  for (int i = static_cast<int>(vocab.size()); i < n; ++i) vocab.push_back("tok" + std::to_string(i));
  vocab.resize(n);
  return vocab;
}

const std::vector<std::string>& promo_words() {
  static const std::vector<std::string> words = {"discount", "full_discount", "sale", "hot"};
  return words;
}

}  // namespace

Catalog generate_catalog(const GenConfig& config, RngStream rng) {
  if (config.n_skus <= 0 || config.n_business_groups <= 0 || config.series_per_group <= 0 ||
      config.templates_per_series <= 0 || config.copy_vocab <= 0 || config.n_sizes <= 0 ||
      config.latent_dim <= 0)
    throw InvalidConfig("generate_catalog: all vocabulary sizes must be positive");
  if (config.creatives_per_sku_min < 2 || config.creatives_per_sku_max < config.creatives_per_sku_min)
    throw InvalidConfig("generate_catalog: creatives_per_sku range invalid (min >= 2)");
  if (config.copy_len_min < 0 || config.copy_len_max < config.copy_len_min)
    throw InvalidConfig("generate_catalog: copy length range invalid");
  if (config.n_sizes > static_cast<int>(size_menu_master().size()))
    throw InvalidConfig("generate_catalog: n_sizes exceeds the size menu");

  Catalog cat;
  cat.config = config;
  cat.size_menu.assign(size_menu_master().begin(), size_menu_master().begin() + config.n_sizes);

  const auto vocab = build_copy_vocab(config.copy_vocab, promo_words());
  const int n_series = config.n_business_groups * config.series_per_group;
  const int n_templates = n_series * config.templates_per_series;

  int next_creative = 0;
  cat.creatives_by_sku.resize(config.n_skus);
  for (int sku = 0; sku < config.n_skus; ++sku) {
    cat.skus.push_back(sku);
    cat.sku_group.push_back(sku % config.n_business_groups);
    cat.sku_color.push_back(static_cast<int>(rng.uniform_int(12)));
    const int group = cat.sku_group.back();
    const int span = config.creatives_per_sku_max - config.creatives_per_sku_min + 1;
    const int m = config.creatives_per_sku_min + static_cast<int>(rng.uniform_int(span));
    for (int j = 0; j < m; ++j) {
      Creative c;
      c.creative_id = next_creative++;
      c.elements.sku_id = sku;
      const int series_local = static_cast<int>(rng.uniform_int(config.series_per_group));
      c.elements.template_series_id = group * config.series_per_group + series_local;
      const int tmpl_local = static_cast<int>(rng.uniform_int(config.templates_per_series));
      c.elements.template_id = c.elements.template_series_id * config.templates_per_series + tmpl_local;
      const auto& sz = cat.size_menu[rng.uniform_int(cat.size_menu.size())];
      c.elements.width = sz.first;
      c.elements.height = sz.second;
      c.elements.bg_color = static_cast<int>(rng.uniform_int(12));
      const int len = config.copy_len_min +
                      static_cast<int>(rng.uniform_int(config.copy_len_max - config.copy_len_min + 1));
      for (int t = 0; t < len; ++t) c.elements.copy_tokens.push_back(vocab[rng.uniform_int(vocab.size())]);
      cat.creatives_by_sku[sku].push_back(std::move(c));
    }
  }

  auto fill_latents = [&](Field f, int vocab_size) {
    auto& table = cat.latents[static_cast<int>(f)];
    table.resize(vocab_size);
    for (auto& vec : table) {
      vec.resize(config.latent_dim);
      for (auto& x : vec) x = config.latent_mean + rng.normal();
    }
  };
  fill_latents(Field::Sku, config.n_skus);
  fill_latents(Field::TemplateSeries, n_series);
  fill_latents(Field::Template, n_templates);
  fill_latents(Field::BgColor, 12);
  fill_latents(Field::Size, config.n_sizes);

  cat.rebuild_index();
  return cat;
}

namespace {

std::vector<double> pair_raw(Operator op, const std::vector<double>& u, const std::vector<double>& v) {
  const size_t d = u.size();
  std::vector<double> raw;
  switch (op) {
    case Operator::Concat:
      raw = u;
      raw.insert(raw.end(), v.begin(), v.end());
      break;
    case Operator::Multiply:
      raw.resize(d);
      for (size_t k = 0; k < d; ++k) raw[k] = u[k] * v[k];
      break;
    case Operator::Plus:
      raw.resize(d);
      for (size_t k = 0; k < d; ++k) raw[k] = u[k] + v[k];
      break;
    case Operator::Max:
      raw.resize(d);
      for (size_t k = 0; k < d; ++k) raw[k] = std::max(u[k], v[k]);
      break;
    case Operator::Min:
      raw.resize(d);
      for (size_t k = 0; k < d; ++k) raw[k] = std::min(u[k], v[k]);
      break;
  }
  return raw;
}

}  // namespace

GroundTruthCtr generate_ground_truth_ctr(const Catalog& catalog, const PlantSpec& plant,
                                         RngStream rng) {
  if (plant.drift_fraction < 0.0 || plant.drift_fraction > 1.0)
    throw InvalidConfig("drift fraction outside [0,1]");
  if (!(plant.base_rate > 0.0))
    throw InvalidConfig("base rate must be positive");

  GroundTruthCtr gt;
  gt.base_rate = plant.base_rate;
  gt.drift_sigma = plant.drift_sigma;
  gt.clamp = plant.clamp;
  gt.clamp_lo = plant.clamp_lo;
  gt.clamp_hi = plant.clamp_hi;

  const int n = catalog.total_creatives();
  gt.factor.assign(n, 1.0);
  gt.drifted.assign(n, 0);

  for (const auto& spec : plant.pairs) {
    PlantedPair p;
    p.field_a = spec.field_a;
    p.field_b = spec.field_b;
    p.op = spec.op;
    p.effect_scale = spec.effect_scale;
    const int raw_dim =
        (spec.op == Operator::Concat ? 2 : 1) * catalog.config.latent_dim;
    p.combine_w.resize(raw_dim);
    if (spec.contrast_weights) {
      for (int k = 0; k < raw_dim; ++k)
        p.combine_w[k] = (k % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(raw_dim));
    } else {
      for (auto& w : p.combine_w) w = rng.normal() / std::sqrt(static_cast<double>(raw_dim));
    }

    // Raw combination score per creative, centered and scale-normalized over
    // the catalog so the squashed factors spread consistently around 1
    // regardless of the weight draw.
    std::vector<double> score(n);
    double mean = 0.0;
    for (int c = 0; c < n; ++c) {
      const Creative& cr = catalog.creative(c);
      const auto raw = pair_raw(spec.op, catalog.value_latent(spec.field_a, cr),
                                catalog.value_latent(spec.field_b, cr));
      double s = 0.0;
      for (size_t k = 0; k < raw.size(); ++k) s += p.combine_w[k] * raw[k];
      score[c] = s;
      mean += s;
    }
    mean /= std::max(1, n);
    double var = 0.0;
    for (int c = 0; c < n; ++c) var += (score[c] - mean) * (score[c] - mean);
    const double sd = std::sqrt(var / std::max(1, n));
    const double inv_sd = sd > 1e-12 ? 1.0 / sd : 1.0;
    for (auto& w : p.combine_w) w *= inv_sd;
    p.center = mean * inv_sd;
    for (int c = 0; c < n; ++c)
      gt.factor[c] *= std::exp(spec.effect_scale * std::tanh(score[c] * inv_sd - p.center));
    gt.pairs.push_back(std::move(p));
  }

  // Drift membership is stratified by within-sku position so that any
  // exposure tier carries the requested fraction, not just the catalog mean.
  if (plant.drift_fraction > 0.0) {
    int max_m = 0;
    for (const auto& list : catalog.creatives_by_sku)
      max_m = std::max(max_m, static_cast<int>(list.size()));
    for (int pos = 0; pos < max_m; ++pos) {
      std::vector<int> ids;
      for (const auto& list : catalog.creatives_by_sku)
        if (pos < static_cast<int>(list.size())) ids.push_back(list[pos].creative_id);
      for (size_t i = ids.size(); i > 1; --i)
        std::swap(ids[i - 1], ids[rng.uniform_int(i)]);
      const auto k = static_cast<size_t>(std::llround(plant.drift_fraction * ids.size()));
      for (size_t i = 0; i < k && i < ids.size(); ++i) gt.drifted[ids[i]] = 1;
    }
  }

  gt.drift_key = rng.next_u64();
  return gt;
}

double GroundTruthCtr::drift_multiplier(int creative_id, int day) const {
  if (!drifted[creative_id]) return 1.0;
  RngStream s(drift_key, (static_cast<uint64_t>(creative_id) << 24) ^ static_cast<uint64_t>(day));
  const double z = s.normal();
  // Mean-one lognormal so drift does not shift the average rate.
  return std::exp(drift_sigma * z - 0.5 * drift_sigma * drift_sigma);
}

double GroundTruthCtr::ctr(int creative_id, int day) const {
  double rate = base_rate * factor[creative_id] * drift_multiplier(creative_id, day);
  if (clamp) rate = std::clamp(rate, clamp_lo, clamp_hi);
  return rate;
}

std::vector<long long> planned_counts(const Catalog& catalog, const TrafficSpec& traffic) {
  if (traffic.impressions_per_day <= 0) throw InvalidConfig("impressions_per_day must be positive");
  const int n_skus = static_cast<int>(catalog.skus.size());
  std::vector<long long> out(catalog.total_creatives(), 0);

  // Even split across skus, largest remainder.
  std::vector<long long> sku_quota(n_skus, traffic.impressions_per_day / n_skus);
  long long leftover = traffic.impressions_per_day % n_skus;
  for (long long i = 0; i < leftover; ++i) sku_quota[i] += 1;

  for (int sku = 0; sku < n_skus; ++sku) {
    const auto& list = catalog.creatives_by_sku[sku];
    const int m = static_cast<int>(list.size());
    std::vector<double> w(m);
    double z = 0.0;
    for (int j = 0; j < m; ++j) {
      w[j] = std::pow(static_cast<double>(j + 1), -traffic.powerlaw_exponent);
      z += w[j];
    }
    std::vector<long long> q(m, 0);
    std::vector<std::pair<double, int>> frac(m);
    long long assigned = 0;
    for (int j = 0; j < m; ++j) {
      const double exact = sku_quota[sku] * w[j] / z;
      q[j] = static_cast<long long>(std::floor(exact));
      assigned += q[j];
      frac[j] = {exact - std::floor(exact), j};
    }
    std::sort(frac.begin(), frac.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (long long r = sku_quota[sku] - assigned, i = 0; i < r; ++i) q[frac[i].second] += 1;
    for (int j = 0; j < m; ++j) out[list[j].creative_id] = q[j];
  }
  return out;
}

std::vector<ImpressionRecord> simulate_day(const Catalog& catalog, const GroundTruthCtr& gt,
                                           int day, const TrafficSpec& traffic,
                                           RngStream day_rng) {
  const auto plan = planned_counts(catalog, traffic);
  std::vector<ImpressionRecord> records;
  records.reserve(static_cast<size_t>(traffic.impressions_per_day));
  for (int sku : catalog.skus) {
    for (const auto& c : catalog.creatives_by_sku[sku]) {
      const double rate = gt.ctr(c.creative_id, day);
      for (long long i = 0; i < plan[c.creative_id]; ++i)
        records.push_back({day, sku, c.creative_id, day_rng.bernoulli(rate)});
    }
  }
  return records;
}

std::vector<ImpressionRecord> simulate_logs(const Catalog& catalog, const GroundTruthCtr& gt,
                                            int days, const TrafficSpec& traffic, RngStream rng) {
  if (days <= 0) throw InvalidConfig("days must be positive");
  std::vector<ImpressionRecord> all;
  for (int day = 0; day < days; ++day) {
    auto day_records = simulate_day(catalog, gt, day, traffic, rng.substream(day));
    all.insert(all.end(), day_records.begin(), day_records.end());
  }
  return all;
}

// --- persistence ---

namespace {
constexpr const char* kLogHeader = "dco.logs 1";
}

void write_logs(std::ostream& out, const std::vector<ImpressionRecord>& records) {
  out << kLogHeader << "\n";
  for (const auto& r : records)
    out << r.day << ' ' << r.sku_id << ' ' << r.creative_id << ' ' << (r.clicked ? 1 : 0) << "\n";
}

void write_logs_file(const std::string& path, const std::vector<ImpressionRecord>& records) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for write: " + path);
  write_logs(f, records);
}

std::vector<ImpressionRecord> read_logs(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header != kLogHeader)
    throw IoError("bad log header (expected '" + std::string(kLogHeader) + "')");
  std::vector<ImpressionRecord> out;
  ImpressionRecord r;
  int clicked;
  while (in >> r.day >> r.sku_id >> r.creative_id >> clicked) {
    r.clicked = clicked != 0;
    out.push_back(r);
  }
  return out;
}

std::vector<ImpressionRecord> read_logs_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open for read: " + path);
  return read_logs(f);
}

using nlohmann::json;

std::string world_to_json(const Catalog& catalog, const GroundTruthCtr& gt) {
  json doc;
  doc["format"] = "dco.world";
  doc["version"] = 1;

  json jcat;
  jcat["n_skus"] = catalog.config.n_skus;
  jcat["creatives_per_sku_min"] = catalog.config.creatives_per_sku_min;
  jcat["creatives_per_sku_max"] = catalog.config.creatives_per_sku_max;
  jcat["n_business_groups"] = catalog.config.n_business_groups;
  jcat["series_per_group"] = catalog.config.series_per_group;
  jcat["templates_per_series"] = catalog.config.templates_per_series;
  jcat["copy_vocab"] = catalog.config.copy_vocab;
  jcat["copy_len_min"] = catalog.config.copy_len_min;
  jcat["copy_len_max"] = catalog.config.copy_len_max;
  jcat["n_sizes"] = catalog.config.n_sizes;
  jcat["latent_dim"] = catalog.config.latent_dim;
  jcat["latent_mean"] = catalog.config.latent_mean;
  jcat["sku_color"] = catalog.sku_color;
  jcat["sku_group"] = catalog.sku_group;
  json jsize = json::array();
  for (const auto& s : catalog.size_menu) jsize.push_back({s.first, s.second});
  jcat["size_menu"] = jsize;
  json jsk = json::array();
  for (const auto& list : catalog.creatives_by_sku) {
    json jl = json::array();
    for (const auto& c : list) {
      jl.push_back({{"id", c.creative_id},
                    {"series", c.elements.template_series_id},
                    {"template", c.elements.template_id},
                    {"w", c.elements.width},
                    {"h", c.elements.height},
                    {"bg", c.elements.bg_color},
                    {"copy", c.elements.copy_tokens}});
    }
    jsk.push_back(jl);
  }
  jcat["creatives"] = jsk;
  json jlat = json::array();
  for (const auto& table : catalog.latents) jlat.push_back(table);
  jcat["latents"] = jlat;
  doc["catalog"] = jcat;

  json jgt;
  jgt["base_rate"] = gt.base_rate;
  json jpairs = json::array();
  for (const auto& p : gt.pairs) {
    jpairs.push_back({{"field_a", field_name(p.field_a)},
                      {"field_b", field_name(p.field_b)},
                      {"op", operator_name(p.op)},
                      {"effect_scale", p.effect_scale},
                      {"combine_w", p.combine_w},
                      {"center", p.center}});
  }
  jgt["pairs"] = jpairs;
  jgt["factor"] = gt.factor;
  jgt["drifted"] = gt.drifted;
  jgt["drift_sigma"] = gt.drift_sigma;
  jgt["drift_key"] = gt.drift_key;
  jgt["clamp"] = gt.clamp;
  jgt["clamp_lo"] = gt.clamp_lo;
  jgt["clamp_hi"] = gt.clamp_hi;
  doc["ground_truth"] = jgt;
  return doc.dump(2);
}

void world_from_json(const std::string& text, Catalog& catalog, GroundTruthCtr& gt) {
  json doc = json::parse(text);
  if (doc.value("format", "") != std::string("dco.world") || doc.value("version", 0) != 1)
    throw IoError("unrecognized world document");
  const json& jcat = doc.at("catalog");
  Catalog cat;
  cat.config.n_skus = jcat.at("n_skus").get<int>();
  cat.config.creatives_per_sku_min = jcat.at("creatives_per_sku_min").get<int>();
  cat.config.creatives_per_sku_max = jcat.at("creatives_per_sku_max").get<int>();
  cat.config.n_business_groups = jcat.at("n_business_groups").get<int>();
  cat.config.series_per_group = jcat.at("series_per_group").get<int>();
  cat.config.templates_per_series = jcat.at("templates_per_series").get<int>();
  cat.config.copy_vocab = jcat.at("copy_vocab").get<int>();
  cat.config.copy_len_min = jcat.at("copy_len_min").get<int>();
  cat.config.copy_len_max = jcat.at("copy_len_max").get<int>();
  cat.config.n_sizes = jcat.at("n_sizes").get<int>();
  cat.config.latent_dim = jcat.at("latent_dim").get<int>();
  cat.config.latent_mean = jcat.at("latent_mean").get<double>();
  cat.sku_color = jcat.at("sku_color").get<std::vector<int>>();
  cat.sku_group = jcat.at("sku_group").get<std::vector<int>>();
  for (const auto& s : jcat.at("size_menu")) cat.size_menu.push_back({s[0].get<int>(), s[1].get<int>()});
  for (const auto& jl : jcat.at("creatives")) {
    std::vector<Creative> list;
    for (const auto& jc : jl) {
      Creative c;
      c.creative_id = jc.at("id").get<int>();
      c.elements.template_series_id = jc.at("series").get<int>();
      c.elements.template_id = jc.at("template").get<int>();
      c.elements.width = jc.at("w").get<int>();
      c.elements.height = jc.at("h").get<int>();
      c.elements.bg_color = jc.at("bg").get<int>();
      c.elements.copy_tokens = jc.at("copy").get<std::vector<std::string>>();
      c.elements.sku_id = static_cast<int>(cat.creatives_by_sku.size());
      list.push_back(std::move(c));
    }
    cat.creatives_by_sku.push_back(std::move(list));
  }
  for (int sku = 0; sku < static_cast<int>(cat.creatives_by_sku.size()); ++sku) cat.skus.push_back(sku);
  const auto& jlat = jcat.at("latents");
  for (int f = 0; f < kNumPlantFields; ++f)
    cat.latents[f] = jlat[f].get<std::vector<std::vector<double>>>();
  cat.rebuild_index();

  const json& jgt = doc.at("ground_truth");
  GroundTruthCtr g;
  g.base_rate = jgt.at("base_rate").get<double>();
  for (const auto& jp : jgt.at("pairs")) {
    PlantedPair p;
    p.field_a = field_from_name(jp.at("field_a").get<std::string>());
    p.field_b = field_from_name(jp.at("field_b").get<std::string>());
    p.op = operator_from_name(jp.at("op").get<std::string>());
    p.effect_scale = jp.at("effect_scale").get<double>();
    p.combine_w = jp.at("combine_w").get<std::vector<double>>();
    p.center = jp.at("center").get<double>();
    g.pairs.push_back(std::move(p));
  }
  g.factor = jgt.at("factor").get<std::vector<double>>();
  g.drifted = jgt.at("drifted").get<std::vector<uint8_t>>();
  g.drift_sigma = jgt.at("drift_sigma").get<double>();
  g.drift_key = jgt.at("drift_key").get<uint64_t>();
  g.clamp = jgt.at("clamp").get<bool>();
  g.clamp_lo = jgt.at("clamp_lo").get<double>();
  g.clamp_hi = jgt.at("clamp_hi").get<double>();

  catalog = std::move(cat);
  gt = std::move(g);
}

}  // namespace dco::datagen
