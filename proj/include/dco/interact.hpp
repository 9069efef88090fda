#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dco/common.hpp"
#include "dco/datagen.hpp"
#include "dco/features.hpp"
#include "dco/metrics.hpp"
#include "dco/numerics.hpp"

namespace dco::interact {

using datagen::Operator;

struct InteractConfig {
  int d_emb = 8;
  int d_lat = 8;
  /// Fields entering the interaction model; defaults to all eight.
  std::vector<features::FieldId> fields = {
      features::FieldId::Sku,          features::FieldId::Image,
      features::FieldId::Tfidf,        features::FieldId::Size,
      features::FieldId::BgColor,      features::FieldId::SkuColor,
      features::FieldId::TemplateSeries, features::FieldId::Template};
  /// Restrict the searched pairs to contextual x creative-space.
  bool cross_group_pairs_only = false;

  int search_epochs = 30;
  /// Epochs at the start of the search where parameters train under the
  /// relaxed mixture before the alternating proximal phase begins.
  int warmup_epochs = 5;
  double lr = 0.01;
  /// Per-epoch geometric decay of the parameter lr inside the search. Lets
  /// the incumbent operator converge between proximal steps, so the alpha
  /// gradients compare what each branch uniquely adds rather than the
  /// shared underfit.
  double search_lr_decay = 1.0;
  double alpha_lr = 0.05;
  int batch = 64;
  int train_epochs = 30;
  double proj_weight_decay = 0.0;
  double emb_init = 0.1;  // embeddings start uniform in [0, emb_init]
  double val_fraction = 0.2;
};

/// Architecture state: one operator mix per unordered field pair. `alpha`
/// is the relaxed copy the proximal step updates; `active` is its one-hot
/// projection (argmax, ties to the lowest operator index).
struct InteractionArch {
  std::vector<int> fields;                   // FieldId values, model order
  std::vector<std::pair<int, int>> pairs;    // indices into `fields`
  std::vector<std::array<double, 5>> alpha;  // relaxed, in [0,1]
  std::vector<Operator> active;

  int pair_count() const { return static_cast<int>(pairs.size()); }
  bool feasible() const;  // active == argmax(alpha), one choice per pair
  void project();         // set active from alpha
};

InteractionArch make_arch(const InteractConfig& config);

/// All trainable tensors. Scalars live in single-element vectors so the
/// flatten/update helpers can treat everything uniformly.
struct AutocoParams {
  int d_emb = 0;
  int d_lat = 0;
  std::vector<int> field_vocab;              // categorical vocab or 0
  std::vector<int> field_dense;              // dense width or 0
  std::vector<std::vector<double>> emb;      // per field: vocab*d_emb or d_emb*dense
  std::vector<std::vector<double>> emb_bias; // per dense field: d_emb (empty for cat)
  std::vector<std::vector<double>> first;    // per field: vocab or dense width
  std::array<std::vector<double>, 5> proj_w; // d_lat x raw(op)
  std::array<std::vector<double>, 5> proj_b; // d_lat
  std::vector<double> head_w;                // d_lat
  std::vector<double> bias;                  // 1

  int raw_dim(Operator op) const { return (op == Operator::Concat ? 2 : 1) * d_emb; }
  std::vector<std::vector<double>*> tensors();
  std::vector<const std::vector<double>*> tensors() const;
  AutocoParams zeros_like() const;
};

AutocoParams init_params(const InteractConfig& config, const features::FeatureSchema& schema,
                         numerics::RngStream& rng);

std::vector<double> flatten(const AutocoParams& p);
void unflatten(const std::vector<double>& flat, AutocoParams& p);

/// One pairwise interaction: raw combine by `op`, then that operator's
/// projection. Sizes are validated against `proj` width.
std::vector<double> interact_pair(const std::vector<double>& e_i, const std::vector<double>& e_j,
                                  Operator op, const std::vector<double>& proj_w,
                                  const std::vector<double>& proj_b, int d_lat);

enum class ArchMode { ActiveOnly, RelaxedMixture };

double forward(const features::FeatureVector& x, const InteractionArch& arch,
               const AutocoParams& params, ArchMode mode = ArchMode::ActiveOnly);

struct GradResult {
  AutocoParams grads;
  std::vector<std::array<double, 5>> alpha_grads;     // filled when requested
  std::vector<std::array<double, 5>> alpha_grad_sq;   // per-example second moments
  double mean_logloss = 0.0;
};

/// Mean-logloss gradient over a batch of examples, hand-derived. Max/min
/// ties route their subgradient to the first argument. Alpha gradients are
/// taken w.r.t. the mixture coefficients at the evaluated point.
GradResult grad(const features::Dataset& data, const std::vector<size_t>& batch_idx,
                const InteractionArch& arch, const AutocoParams& params, bool want_alpha,
                ArchMode mode = ArchMode::ActiveOnly);

struct SearchEpoch {
  int epoch = 0;
  double val_logloss = 0.0;
  std::vector<Operator> active;
};

struct SearchResult {
  InteractionArch arch;
  AutocoParams params;
  std::vector<SearchEpoch> trace;
};

/// One-shot architecture search: warmup under the relaxed mixture, then
/// alternating (1) gradient step on validation loss w.r.t. alpha followed by
/// projection to the nearest one-hot and (2) parameter steps on the training
/// loss under the projected architecture.
SearchResult one_shot_search(const features::Dataset& train, const features::Dataset& val,
                             const InteractConfig& config, numerics::RngStream rng);

struct TrainResult {
  AutocoParams params;
  metrics::TrainMetrics metrics;
};

TrainResult train_fixed_arch(const features::Dataset& train, const features::Dataset& val,
                             const InteractionArch& arch, const InteractConfig& config,
                             numerics::RngStream rng, std::optional<AutocoParams> warm_start = {});

struct AutocoModel {
  InteractionArch arch;
  AutocoParams params;
  uint64_t schema_hash = 0;
};

double predict(const AutocoModel& model, const features::FeatureTable& table, int creative_id);

/// Top-k creatives of one sku by model score; ties by ascending creative id.
std::vector<int> predict_topk(int sku, const std::vector<datagen::Creative>& candidates,
                              const AutocoModel& model, const features::FeatureTable& table, int k);

std::string model_to_json(const AutocoModel& model);
AutocoModel model_from_json(const std::string& text);

}  // namespace dco::interact
