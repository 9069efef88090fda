#include "dco/interact.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace dco::interact {

using features::Dataset;
using features::FeatureSchema;
using features::FeatureTable;
using features::FeatureVector;
using features::FieldId;
using numerics::RngStream;
using numerics::sigmoid;

namespace {

int cat_slot(FieldId f) {
  switch (f) {
    case FieldId::Sku: return features::kCatSku;
    case FieldId::BgColor: return features::kCatBgColor;
    case FieldId::SkuColor: return features::kCatSkuColor;
    case FieldId::TemplateSeries: return features::kCatSeries;
    case FieldId::Template: return features::kCatTemplate;
    default: throw InvalidArgument("not a categorical field");
  }
}

std::pair<const double*, int> dense_block(const FeatureVector& x, FieldId f) {
  switch (f) {
    case FieldId::Image: return {x.image.data(), static_cast<int>(x.image.size())};
    case FieldId::Tfidf: return {x.text.data(), static_cast<int>(x.text.size())};
    case FieldId::Size: return {x.size.data(), 3};
    default: throw InvalidArgument("not a dense field");
  }
}

int dense_width(const FeatureSchema& schema, FieldId f) {
  switch (f) {
    case FieldId::Image: return schema.image_dims;
    case FieldId::Tfidf: return schema.text_dims;
    case FieldId::Size: return schema.size_dims;
    default: return 0;
  }
}

}  // namespace

bool InteractionArch::feasible() const {
  if (active.size() != alpha.size()) return false;
  for (size_t p = 0; p < alpha.size(); ++p) {
    int best = 0;
    for (int o = 1; o < 5; ++o)
      if (alpha[p][o] > alpha[p][best]) best = o;
    if (static_cast<int>(active[p]) != best) return false;
  }
  return true;
}

void InteractionArch::project() {
  active.resize(alpha.size());
  for (size_t p = 0; p < alpha.size(); ++p) {
    int best = 0;
    for (int o = 1; o < 5; ++o)
      if (alpha[p][o] > alpha[p][best]) best = o;
    active[p] = static_cast<Operator>(best);
  }
}

InteractionArch make_arch(const InteractConfig& config) {
  InteractionArch arch;
  for (auto f : config.fields) arch.fields.push_back(static_cast<int>(f));
  const int n = static_cast<int>(config.fields.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (config.cross_group_pairs_only) {
        const bool ci = features::is_creative_space(config.fields[i]);
        const bool cj = features::is_creative_space(config.fields[j]);
        if (ci == cj) continue;
      }
      arch.pairs.push_back({i, j});
    }
  }
  if (arch.pairs.empty()) throw InvalidConfig("interaction arch has no field pairs");
  arch.alpha.assign(arch.pairs.size(), {0.2, 0.2, 0.2, 0.2, 0.2});
  arch.project();
  return arch;
}

std::vector<std::vector<double>*> AutocoParams::tensors() {
  std::vector<std::vector<double>*> out;
  for (auto& t : emb) out.push_back(&t);
  for (auto& t : emb_bias) out.push_back(&t);
  for (auto& t : first) out.push_back(&t);
  for (auto& t : proj_w) out.push_back(&t);
  for (auto& t : proj_b) out.push_back(&t);
  out.push_back(&head_w);
  out.push_back(&bias);
  return out;
}

std::vector<const std::vector<double>*> AutocoParams::tensors() const {
  std::vector<const std::vector<double>*> out;
  for (auto& t : emb) out.push_back(&t);
  for (auto& t : emb_bias) out.push_back(&t);
  for (auto& t : first) out.push_back(&t);
  for (auto& t : proj_w) out.push_back(&t);
  for (auto& t : proj_b) out.push_back(&t);
  out.push_back(&head_w);
  out.push_back(&bias);
  return out;
}

AutocoParams AutocoParams::zeros_like() const {
  AutocoParams z = *this;
  for (auto* t : z.tensors()) std::fill(t->begin(), t->end(), 0.0);
  return z;
}

AutocoParams init_params(const InteractConfig& config, const FeatureSchema& schema,
                         RngStream& rng) {
  AutocoParams p;
  p.d_emb = config.d_emb;
  p.d_lat = config.d_lat;
  const int n_fields = static_cast<int>(config.fields.size());
  p.emb.resize(n_fields);
  p.emb_bias.resize(n_fields);
  p.first.resize(n_fields);
  p.field_vocab.resize(n_fields, 0);
  p.field_dense.resize(n_fields, 0);
  for (int f = 0; f < n_fields; ++f) {
    const FieldId id = config.fields[f];
    if (features::is_categorical(id)) {
      const int vocab = schema.cat_vocab(cat_slot(id));
      p.field_vocab[f] = vocab;
      p.emb[f].resize(static_cast<size_t>(vocab) * config.d_emb);
      // Positive uniform init: keeps all embeddings in one orientation so
      // sign-flip reparameterizations do not swap max/min roles mid-search.
      for (auto& x : p.emb[f]) x = rng.uniform() * config.emb_init;
      p.first[f].assign(vocab, 0.0);
    } else {
      const int width = dense_width(schema, id);
      p.field_dense[f] = width;
      p.emb[f].resize(static_cast<size_t>(config.d_emb) * width);
      for (auto& x : p.emb[f]) x = rng.uniform() * config.emb_init / std::sqrt(width);
      p.emb_bias[f].assign(config.d_emb, 0.0);
      p.first[f].assign(width, 0.0);
    }
  }
  for (int o = 0; o < 5; ++o) {
    const int raw = (o == 0 ? 2 : 1) * config.d_emb;
    const double scale = std::sqrt(6.0 / (raw + config.d_lat));
    p.proj_w[o].resize(static_cast<size_t>(config.d_lat) * raw);
    for (auto& x : p.proj_w[o]) x = (2.0 * rng.uniform() - 1.0) * scale;
    p.proj_b[o].assign(config.d_lat, 0.0);
  }
  p.head_w.resize(config.d_lat);
  for (auto& x : p.head_w) x = (2.0 * rng.uniform() - 1.0) * 0.1;
  p.bias.assign(1, 0.0);
  return p;
}

std::vector<double> flatten(const AutocoParams& p) {
  std::vector<double> flat;
  for (const auto* t : p.tensors()) flat.insert(flat.end(), t->begin(), t->end());
  return flat;
}

void unflatten(const std::vector<double>& flat, AutocoParams& p) {
  size_t off = 0;
  for (auto* t : p.tensors()) {
    if (off + t->size() > flat.size()) throw InvalidArgument("unflatten: size mismatch");
    std::copy(flat.begin() + off, flat.begin() + off + t->size(), t->begin());
    off += t->size();
  }
  if (off != flat.size()) throw InvalidArgument("unflatten: size mismatch");
}

namespace {

void raw_combine(Operator op, const std::vector<double>& e_i, const std::vector<double>& e_j,
                 std::vector<double>& raw) {
  const size_t d = e_i.size();
  switch (op) {
    case Operator::Concat:
      raw.resize(2 * d);
      std::copy(e_i.begin(), e_i.end(), raw.begin());
      std::copy(e_j.begin(), e_j.end(), raw.begin() + d);
      break;
    case Operator::Multiply:
      raw.resize(d);
      for (size_t k = 0; k < d; ++k) raw[k] = e_i[k] * e_j[k];
      break;
    case Operator::Plus:
      raw.resize(d);
      for (size_t k = 0; k < d; ++k) raw[k] = e_i[k] + e_j[k];
      break;
    case Operator::Max:
      raw.resize(d);
      for (size_t k = 0; k < d; ++k) raw[k] = std::max(e_i[k], e_j[k]);
      break;
    case Operator::Min:
      raw.resize(d);
      for (size_t k = 0; k < d; ++k) raw[k] = std::min(e_i[k], e_j[k]);
      break;
  }
}

}  // namespace

std::vector<double> interact_pair(const std::vector<double>& e_i, const std::vector<double>& e_j,
                                  Operator op, const std::vector<double>& proj_w,
                                  const std::vector<double>& proj_b, int d_lat) {
  if (e_i.size() != e_j.size()) throw InvalidArgument("interact_pair: embedding sizes differ");
  std::vector<double> raw;
  raw_combine(op, e_i, e_j, raw);
  if (proj_w.size() != raw.size() * static_cast<size_t>(d_lat) ||
      proj_b.size() != static_cast<size_t>(d_lat))
    throw InvalidArgument("interact_pair: projection shape mismatch");
  std::vector<double> out(d_lat);
  for (int l = 0; l < d_lat; ++l) {
    double s = proj_b[l];
    const double* w = proj_w.data() + static_cast<size_t>(l) * raw.size();
    for (size_t r = 0; r < raw.size(); ++r) s += w[r] * raw[r];
    out[l] = s;
  }
  return out;
}

namespace {

struct ForwardCache {
  std::vector<std::vector<double>> e;  // per field embedding
  double first_sum = 0.0;
  std::vector<double> latent_sum;  // d_lat
  // branch latents per pair, only ops that were evaluated
  std::vector<std::array<std::vector<double>, 5>> z;
  double logit = 0.0;
  double p = 0.5;
};

/// Field embeddings + first-order sum for one example.
void embed_fields(const FeatureVector& x, const InteractionArch& arch, const AutocoParams& params,
                  ForwardCache& cache) {
  const int n_fields = static_cast<int>(arch.fields.size());
  cache.e.assign(n_fields, std::vector<double>(params.d_emb, 0.0));
  cache.first_sum = 0.0;
  for (int f = 0; f < n_fields; ++f) {
    const FieldId id = static_cast<FieldId>(arch.fields[f]);
    if (params.field_vocab[f] > 0) {
      const int idx = x.cat[cat_slot(id)];
      if (idx < 0 || idx >= params.field_vocab[f])
        throw InvalidArgument("categorical index out of vocab");
      const double* row = params.emb[f].data() + static_cast<size_t>(idx) * params.d_emb;
      std::copy(row, row + params.d_emb, cache.e[f].begin());
      cache.first_sum += params.first[f][idx];
    } else {
      const auto [block, width] = dense_block(x, id);
      if (width != params.field_dense[f]) throw InvalidArgument("dense block width mismatch");
      for (int l = 0; l < params.d_emb; ++l) {
        double s = params.emb_bias[f][l];
        const double* w = params.emb[f].data() + static_cast<size_t>(l) * width;
        for (int r = 0; r < width; ++r) s += w[r] * block[r];
        cache.e[f][l] = s;
      }
      for (int r = 0; r < width; ++r) cache.first_sum += params.first[f][r] * block[r];
    }
  }
}

void forward_example(const FeatureVector& x, const InteractionArch& arch,
                     const AutocoParams& params, ArchMode mode, bool all_branches,
                     ForwardCache& cache) {
  embed_fields(x, arch, params, cache);
  cache.latent_sum.assign(params.d_lat, 0.0);
  cache.z.assign(arch.pairs.size(), {});
  for (size_t pi = 0; pi < arch.pairs.size(); ++pi) {
    const auto [i, j] = arch.pairs[pi];
    for (int o = 0; o < 5; ++o) {
      const double m = mode == ArchMode::ActiveOnly
                           ? (static_cast<int>(arch.active[pi]) == o ? 1.0 : 0.0)
                           : arch.alpha[pi][o];
      if (m == 0.0 && !all_branches) continue;
      auto z = interact_pair(cache.e[i], cache.e[j], static_cast<Operator>(o), params.proj_w[o],
                             params.proj_b[o], params.d_lat);
      if (m != 0.0)
        for (int l = 0; l < params.d_lat; ++l) cache.latent_sum[l] += m * z[l];
      cache.z[pi][static_cast<size_t>(o)] = std::move(z);
    }
  }
  double logit = params.bias[0] + cache.first_sum;
  for (int l = 0; l < params.d_lat; ++l) logit += params.head_w[l] * cache.latent_sum[l];
  if (!std::isfinite(logit)) throw NumericalFailure("interact forward: non-finite logit");
  cache.logit = logit;
  cache.p = sigmoid(logit);
}

void backward_example(const FeatureVector& x, const InteractionArch& arch,
                      const AutocoParams& params, ArchMode mode, const ForwardCache& cache,
                      double dlogit, AutocoParams& g,
                      std::vector<std::array<double, 5>>* alpha_grads,
                      std::vector<std::array<double, 5>>* alpha_grad_sq) {
  const int n_fields = static_cast<int>(arch.fields.size());
  std::vector<std::vector<double>> de(n_fields, std::vector<double>(params.d_emb, 0.0));

  // head and latent sum
  for (int l = 0; l < params.d_lat; ++l) g.head_w[l] += dlogit * cache.latent_sum[l];
  g.bias[0] += dlogit;
  std::vector<double> dS(params.d_lat);
  for (int l = 0; l < params.d_lat; ++l) dS[l] = dlogit * params.head_w[l];

  std::vector<double> raw, draw;
  for (size_t pi = 0; pi < arch.pairs.size(); ++pi) {
    const auto [i, j] = arch.pairs[pi];
    for (int o = 0; o < 5; ++o) {
      const double m = mode == ArchMode::ActiveOnly
                           ? (static_cast<int>(arch.active[pi]) == o ? 1.0 : 0.0)
                           : arch.alpha[pi][o];
      const auto& z = cache.z[pi][static_cast<size_t>(o)];
      if (alpha_grads && !z.empty()) {
        double coeff = 0.0;
        for (int l = 0; l < params.d_lat; ++l) coeff += params.head_w[l] * z[l];
        const double contrib = dlogit * coeff;
        (*alpha_grads)[pi][static_cast<size_t>(o)] += contrib;
        if (alpha_grad_sq) (*alpha_grad_sq)[pi][static_cast<size_t>(o)] += contrib * contrib;
      }
      if (m == 0.0) continue;

      const Operator op = static_cast<Operator>(o);
      raw_combine(op, cache.e[i], cache.e[j], raw);
      const int raw_dim = static_cast<int>(raw.size());
      draw.assign(raw_dim, 0.0);
      for (int l = 0; l < params.d_lat; ++l) {
        const double dz = m * dS[l];
        g.proj_b[o][l] += dz;
        double* gw = g.proj_w[o].data() + static_cast<size_t>(l) * raw_dim;
        const double* w = params.proj_w[o].data() + static_cast<size_t>(l) * raw_dim;
        for (int r = 0; r < raw_dim; ++r) {
          gw[r] += dz * raw[r];
          draw[r] += dz * w[r];
        }
      }
      switch (op) {
        case Operator::Concat:
          for (int k = 0; k < params.d_emb; ++k) {
            de[i][k] += draw[k];
            de[j][k] += draw[params.d_emb + k];
          }
          break;
        case Operator::Multiply:
          for (int k = 0; k < params.d_emb; ++k) {
            de[i][k] += draw[k] * cache.e[j][k];
            de[j][k] += draw[k] * cache.e[i][k];
          }
          break;
        case Operator::Plus:
          for (int k = 0; k < params.d_emb; ++k) {
            de[i][k] += draw[k];
            de[j][k] += draw[k];
          }
          break;
        case Operator::Max:
          // ties route to the first argument
          for (int k = 0; k < params.d_emb; ++k) {
            if (cache.e[i][k] >= cache.e[j][k])
              de[i][k] += draw[k];
            else
              de[j][k] += draw[k];
          }
          break;
        case Operator::Min:
          for (int k = 0; k < params.d_emb; ++k) {
            if (cache.e[i][k] <= cache.e[j][k])
              de[i][k] += draw[k];
            else
              de[j][k] += draw[k];
          }
          break;
      }
    }
  }

  // fields: first order + embeddings
  for (int f = 0; f < n_fields; ++f) {
    const FieldId id = static_cast<FieldId>(arch.fields[f]);
    if (params.field_vocab[f] > 0) {
      const int idx = x.cat[cat_slot(id)];
      g.first[f][idx] += dlogit;
      double* row = g.emb[f].data() + static_cast<size_t>(idx) * params.d_emb;
      for (int k = 0; k < params.d_emb; ++k) row[k] += de[f][k];
    } else {
      const auto [block, width] = dense_block(x, id);
      for (int r = 0; r < width; ++r) g.first[f][r] += dlogit * block[r];
      for (int l = 0; l < params.d_emb; ++l) {
        g.emb_bias[f][l] += de[f][l];
        double* w = g.emb[f].data() + static_cast<size_t>(l) * width;
        for (int r = 0; r < width; ++r) w[r] += de[f][l] * block[r];
      }
    }
  }
}

}  // namespace

double forward(const FeatureVector& x, const InteractionArch& arch, const AutocoParams& params,
               ArchMode mode) {
  ForwardCache cache;
  forward_example(x, arch, params, mode, false, cache);
  return cache.p;
}

GradResult grad(const Dataset& data, const std::vector<size_t>& batch_idx,
                const InteractionArch& arch, const AutocoParams& params, bool want_alpha,
                ArchMode mode) {
  if (batch_idx.empty()) throw InvalidArgument("grad: empty batch");
  GradResult res;
  res.grads = params.zeros_like();
  if (want_alpha) {
    res.alpha_grads.assign(arch.pairs.size(), {0, 0, 0, 0, 0});
    res.alpha_grad_sq.assign(arch.pairs.size(), {0, 0, 0, 0, 0});
  }
  ForwardCache cache;
  double ll = 0.0;
  for (size_t bi : batch_idx) {
    const auto& ex = data.examples[bi];
    const auto& x = data.table->rows[ex.row];
    forward_example(x, arch, params, mode, want_alpha, cache);
    ll += metrics::clipped_logloss(cache.p, ex.label);
    const double dlogit = cache.p - ex.label;
    backward_example(x, arch, params, mode, cache, dlogit, res.grads,
                     want_alpha ? &res.alpha_grads : nullptr,
                     want_alpha ? &res.alpha_grad_sq : nullptr);
  }
  const double inv = 1.0 / static_cast<double>(batch_idx.size());
  for (auto* t : res.grads.tensors())
    for (auto& v : *t) v *= inv;
  for (auto& a : res.alpha_grads)
    for (auto& v : a) v *= inv;
  for (auto& a : res.alpha_grad_sq)
    for (auto& v : a) v *= inv;
  res.mean_logloss = ll * inv;
  return res;
}

namespace {

void shuffle_indices(std::vector<size_t>& order, RngStream& rng);
void apply_sgd(AutocoParams& params, const AutocoParams& grads, const InteractConfig& config);

void sgd_epoch(const Dataset& train, const InteractionArch& arch, AutocoParams& params,
               ArchMode mode, const InteractConfig& config, RngStream& shuffle_rng) {
  std::vector<size_t> order(train.examples.size());
  std::iota(order.begin(), order.end(), 0);
  shuffle_indices(order, shuffle_rng);
  std::vector<size_t> batch;
  for (size_t start = 0; start < order.size(); start += config.batch) {
    batch.assign(order.begin() + start,
                 order.begin() + std::min(order.size(), start + config.batch));
    auto g = grad(train, batch, arch, params, false, mode);
    apply_sgd(params, g.grads, config);
  }
}

double mean_val_logloss(const Dataset& val, const InteractionArch& arch,
                        const AutocoParams& params) {
  double ll = 0.0;
  for (const auto& ex : val.examples)
    ll += metrics::clipped_logloss(forward(val.table->rows[ex.row], arch, params), ex.label);
  return val.examples.empty() ? 0.0 : ll / val.examples.size();
}

/// Euclidean projection onto the probability simplex (Duchi et al.).
void simplex_project(std::array<double, 5>& v) {
  std::array<double, 5> u = v;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cssv = 0.0, theta = 0.0;
  int rho = 0;
  for (int i = 0; i < 5; ++i) {
    cssv += u[i];
    const double t = (cssv - 1.0) / (i + 1);
    if (u[i] - t > 0.0) {
      rho = i;
      theta = t;
    }
  }
  (void)rho;
  for (auto& x : v) x = std::max(0.0, x - theta);
}

}  // namespace

namespace {

void shuffle_indices(std::vector<size_t>& order, RngStream& rng) {
  for (size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_int(i)]);
}

void apply_sgd(AutocoParams& params, const AutocoParams& grads, const InteractConfig& config) {
  auto pt = params.tensors();
  auto gt = grads.tensors();
  for (size_t t = 0; t < pt.size(); ++t)
    for (size_t k = 0; k < pt[t]->size(); ++k) (*pt[t])[k] -= config.lr * (*gt[t])[k];
  if (config.proj_weight_decay > 0.0)
    for (auto& w : params.proj_w)
      for (auto& v : w) v -= config.lr * config.proj_weight_decay * v;
}

}  // namespace

SearchResult one_shot_search(const Dataset& train, const Dataset& val,
                             const InteractConfig& config, RngStream rng) {
  if (train.examples.empty() || val.examples.empty())
    throw InvalidArgument("one_shot_search: empty train or val");
  SearchResult res;
  res.arch = make_arch(config);
  auto init_rng = rng.substream(0);
  auto shuffle_rng = rng.substream(1);
  res.params = init_params(config, train.table->schema, init_rng);

  std::vector<size_t> val_idx(val.examples.size());
  std::iota(val_idx.begin(), val_idx.end(), 0);

  InteractConfig stage = config;
  int epochs_since_change = 0;
  std::vector<std::array<double, 5>> momentum(res.arch.pairs.size(), {0, 0, 0, 0, 0});
  for (int epoch = 0; epoch < config.search_epochs; ++epoch) {
    if (epoch < config.warmup_epochs) {
      sgd_epoch(train, res.arch, res.params, ArchMode::RelaxedMixture, config, shuffle_rng);
    } else {
      // Proximal alpha step on the full validation gradient, then a
      // parameter epoch under the projected one-hot architecture. The raw
      // branch gradients share a large common component (the residual of
      // the current fit) whose per-branch magnitude tracks each branch's
      // output scale, so the step uses RMS-preconditioned gradients
      // (correlation scale), centered on the simplex tangent, with momentum
      // smoothing the epoch-to-epoch SGD hover.
      auto vg = grad(val, val_idx, res.arch, res.params, true, ArchMode::ActiveOnly);
      for (size_t pi = 0; pi < res.arch.alpha.size(); ++pi) {
        std::array<double, 5> step{};
        double mean = 0.0;
        for (int o = 0; o < 5; ++o) {
          const double rms = std::sqrt(vg.alpha_grad_sq[pi][o]) + 1e-12;
          step[o] = vg.alpha_grads[pi][o] / rms;
          mean += step[o] / 5.0;
        }
        for (int o = 0; o < 5; ++o) {
          momentum[pi][o] = 0.5 * momentum[pi][o] + 0.5 * (step[o] - mean);
          res.arch.alpha[pi][o] -= config.alpha_lr * momentum[pi][o];
        }
        simplex_project(res.arch.alpha[pi]);
      }
      const auto previous = res.arch.active;
      res.arch.project();
      if (res.arch.active != previous)
        epochs_since_change = 0;
      else
        ++epochs_since_change;
      stage.lr = config.lr * std::pow(config.search_lr_decay, epochs_since_change);
      sgd_epoch(train, res.arch, res.params, ArchMode::ActiveOnly, stage, shuffle_rng);
    }
    SearchEpoch entry;
    entry.epoch = epoch;
    entry.val_logloss = mean_val_logloss(val, res.arch, res.params);
    entry.active = res.arch.active;
    res.trace.push_back(entry);
    if (entry.val_logloss > 10.0) {
      std::ostringstream msg;
      msg << "search diverged at epoch " << epoch << " (val logloss " << entry.val_logloss
          << "); trace:";
      for (const auto& t : res.trace) msg << ' ' << t.val_logloss;
      throw SearchDiverged(msg.str());
    }
  }
  return res;
}

TrainResult train_fixed_arch(const Dataset& train, const Dataset& val,
                             const InteractionArch& arch, const InteractConfig& config,
                             RngStream rng, std::optional<AutocoParams> warm_start) {
  if (!arch.feasible()) throw InvalidArgument("train_fixed_arch: arch is not one-hot feasible");
  TrainResult res;
  auto init_rng = rng.substream(0);
  auto shuffle_rng = rng.substream(1);
  res.params = warm_start ? std::move(*warm_start)
                          : init_params(config, train.table->schema, init_rng);
  for (int epoch = 0; epoch < config.train_epochs; ++epoch)
    sgd_epoch(train, arch, res.params, ArchMode::ActiveOnly, config, shuffle_rng);

  std::vector<double> probs, labels;
  probs.reserve(val.examples.size());
  for (const auto& ex : val.examples) {
    probs.push_back(forward(val.table->rows[ex.row], arch, res.params));
    labels.push_back(ex.label);
  }
  if (!probs.empty()) res.metrics = metrics::binary_metrics(probs, labels);
  return res;
}

double predict(const AutocoModel& model, const FeatureTable& table, int creative_id) {
  if (model.schema_hash != 0 && model.schema_hash != table.schema.hash())
    throw IncompatibleModel("autoco model schema hash mismatch");
  return forward(table.rows[creative_id], model.arch, model.params);
}

std::vector<int> predict_topk(int /*sku*/, const std::vector<datagen::Creative>& candidates,
                              const AutocoModel& model, const FeatureTable& table, int k) {
  if (k < 1) throw InvalidArgument("predict_topk: k must be >= 1");
  if (candidates.empty()) throw InvalidArgument("predict_topk: no candidates");
  std::vector<std::pair<double, int>> scored;
  scored.reserve(candidates.size());
  for (const auto& c : candidates)
    scored.push_back({predict(model, table, c.creative_id), c.creative_id});
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> out;
  for (size_t i = 0; i < scored.size() && i < static_cast<size_t>(k); ++i)
    out.push_back(scored[i].second);
  return out;
}

using nlohmann::json;

std::string model_to_json(const AutocoModel& model) {
  json doc;
  doc["format"] = "dco.model.autoco";
  doc["version"] = 1;
  doc["schema_hash"] = model.schema_hash;
  json arch;
  arch["fields"] = model.arch.fields;
  json pairs = json::array();
  for (const auto& [i, j] : model.arch.pairs) pairs.push_back({i, j});
  arch["pairs"] = pairs;
  arch["alpha"] = model.arch.alpha;
  json ops = json::array();
  for (auto op : model.arch.active) ops.push_back(datagen::operator_name(op));
  arch["active"] = ops;
  doc["arch"] = arch;
  json params;
  params["d_emb"] = model.params.d_emb;
  params["d_lat"] = model.params.d_lat;
  params["field_vocab"] = model.params.field_vocab;
  params["field_dense"] = model.params.field_dense;
  params["emb"] = model.params.emb;
  params["emb_bias"] = model.params.emb_bias;
  params["first"] = model.params.first;
  params["proj_w"] = model.params.proj_w;
  params["proj_b"] = model.params.proj_b;
  params["head_w"] = model.params.head_w;
  params["bias"] = model.params.bias;
  doc["params"] = params;
  return doc.dump();
}

AutocoModel model_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (doc.value("format", "") != std::string("dco.model.autoco") || doc.value("version", 0) != 1)
    throw IoError("unrecognized autoco model document");
  AutocoModel model;
  model.schema_hash = doc.at("schema_hash").get<uint64_t>();
  const json& arch = doc.at("arch");
  model.arch.fields = arch.at("fields").get<std::vector<int>>();
  for (const auto& p : arch.at("pairs"))
    model.arch.pairs.push_back({p[0].get<int>(), p[1].get<int>()});
  model.arch.alpha = arch.at("alpha").get<std::vector<std::array<double, 5>>>();
  for (const auto& name : arch.at("active"))
    model.arch.active.push_back(datagen::operator_from_name(name.get<std::string>()));
  const json& params = doc.at("params");
  model.params.d_emb = params.at("d_emb").get<int>();
  model.params.d_lat = params.at("d_lat").get<int>();
  model.params.field_vocab = params.at("field_vocab").get<std::vector<int>>();
  model.params.field_dense = params.at("field_dense").get<std::vector<int>>();
  model.params.emb = params.at("emb").get<std::vector<std::vector<double>>>();
  model.params.emb_bias = params.at("emb_bias").get<std::vector<std::vector<double>>>();
  model.params.first = params.at("first").get<std::vector<std::vector<double>>>();
  model.params.proj_w = params.at("proj_w").get<std::array<std::vector<double>, 5>>();
  model.params.proj_b = params.at("proj_b").get<std::array<std::vector<double>, 5>>();
  model.params.head_w = params.at("head_w").get<std::vector<double>>();
  model.params.bias = params.at("bias").get<std::vector<double>>();
  return model;
}

}  // namespace dco::interact
