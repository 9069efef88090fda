#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dco/common.hpp"

namespace dco::metrics {

struct ClassStats {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct TrainMetrics {
  double logloss = 0.0;
  double accuracy = 0.0;
  double auc = 0.5;
  ClassStats negative;  // class 0
  ClassStats positive;  // class 1
};

inline double clipped_logloss(double p, double y) {
  const double q = std::clamp(p, 1e-12, 1.0 - 1e-12);
  return -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
}

/// Rank-based AUC with average ranks on ties; 0.5 when one class is absent.
inline double auc(const std::vector<double>& scores, const std::vector<double>& labels) {
  const size_t n = scores.size();
  if (n != labels.size()) throw InvalidArgument("auc: size mismatch");
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  size_t n_pos = 0;
  for (size_t k = 0; k < n; ++k)
    if (labels[k] > 0.5) {
      pos_rank_sum += rank[k];
      ++n_pos;
    }
  const size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  return (pos_rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0) /
         (static_cast<double>(n_pos) * n_neg);
}

inline TrainMetrics binary_metrics(const std::vector<double>& probs,
                                   const std::vector<double>& labels) {
  if (probs.size() != labels.size() || probs.empty())
    throw InvalidArgument("binary_metrics: bad inputs");
  TrainMetrics m;
  double ll = 0.0;
  long long tp = 0, fp = 0, tn = 0, fn = 0;
  for (size_t i = 0; i < probs.size(); ++i) {
    ll += clipped_logloss(probs[i], labels[i]);
    const bool pred = probs[i] > 0.5;
    const bool truth = labels[i] > 0.5;
    if (pred && truth) ++tp;
    else if (pred && !truth) ++fp;
    else if (!pred && truth) ++fn;
    else ++tn;
  }
  m.logloss = ll / probs.size();
  m.accuracy = static_cast<double>(tp + tn) / probs.size();
  m.auc = auc(probs, labels);
  auto stats = [](long long tp_, long long fp_, long long fn_) {
    ClassStats s;
    s.precision = tp_ + fp_ > 0 ? static_cast<double>(tp_) / (tp_ + fp_) : 0.0;
    s.recall = tp_ + fn_ > 0 ? static_cast<double>(tp_) / (tp_ + fn_) : 0.0;
    s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
    return s;
  };
  m.positive = stats(tp, fp, fn);
  m.negative = stats(tn, fn, fp);
  return m;
}

}  // namespace dco::metrics
