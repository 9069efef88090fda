#pragma once

#include <map>
#include <string>
#include <vector>

#include "dco/common.hpp"
#include "dco/datagen.hpp"
#include "dco/features.hpp"

namespace dco::labeling {

struct DailyAggregate {
  int creative_id = 0;
  int day = 0;  // bucket index when period > 1
  long long exposures = 0;
  long long clicks = 0;
  double ctr = 0.0;
};

enum class Label { Positive, Negative, ExcludedSparse, ExcludedAmbiguous };
const char* label_name(Label l);

struct LabeledSample {
  int creative_id = 0;
  int day = 0;
  Label label = Label::ExcludedSparse;
};

/// Incremental per-(creative, day-bucket) rollup, usable for streamed logs.
class DailyAggregator {
 public:
  explicit DailyAggregator(int period_days = 1);
  void add(const datagen::ImpressionRecord& record);
  /// Sorted by (creative_id, day).
  std::vector<DailyAggregate> finish() const;

 private:
  int period_days_;
  std::map<std::pair<int, int>, std::pair<long long, long long>> buckets_;
};

std::vector<DailyAggregate> aggregate_daily(const std::vector<datagen::ImpressionRecord>& records,
                                            int period_days = 1);

/// Mean-threshold labeling over the whole window: positive needs exposures
/// and clicks both strictly above their means, negative needs exposures
/// above and clicks strictly below. Everything else (including the
/// clicks-equal-to-mean boundary) is excluded as sparse.
std::vector<LabeledSample> label_samples(const std::vector<DailyAggregate>& aggs);

struct AmbiguityResult {
  std::vector<int> ambiguous_creative_ids;  // ascending
  double rate = 0.0;  // ambiguous / creatives with >= 1 non-sparse label
  std::vector<LabeledSample> relabeled;
};

/// A creative is ambiguous when it is positive on one day and negative on
/// another; all its buckets are then excluded.
AmbiguityResult detect_ambiguous(const std::vector<LabeledSample>& labeled);

/// Strict stage-1 set: one binary example per surviving bucket.
features::Dataset build_strict_trainset(const std::vector<LabeledSample>& labeled,
                                        const datagen::Catalog& catalog,
                                        std::shared_ptr<const features::FeatureTable> table);

/// Teacher set: one example per impression, click as the label; sparse and
/// ambiguous creatives stay in.
features::Dataset build_teacher_trainset(const std::vector<datagen::ImpressionRecord>& records,
                                         const datagen::Catalog& catalog,
                                         std::shared_ptr<const features::FeatureTable> table);

void write_labeled_file(const std::string& path, const std::vector<LabeledSample>& labeled);
std::vector<LabeledSample> read_labeled_file(const std::string& path);

}  // namespace dco::labeling
