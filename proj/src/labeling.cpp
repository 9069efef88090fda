#include "dco/labeling.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace dco::labeling {

const char* label_name(Label l) {
  switch (l) {
    case Label::Positive: return "positive";
    case Label::Negative: return "negative";
    case Label::ExcludedSparse: return "excluded_sparse";
    case Label::ExcludedAmbiguous: return "excluded_ambiguous";
  }
  return "?";
}

DailyAggregator::DailyAggregator(int period_days) : period_days_(period_days) {
  if (period_days < 1) throw InvalidConfig("period_days must be >= 1");
}

void DailyAggregator::add(const datagen::ImpressionRecord& record) {
  auto& bucket = buckets_[{record.creative_id, record.day / period_days_}];
  bucket.first += 1;
  if (record.clicked) bucket.second += 1;
}

std::vector<DailyAggregate> DailyAggregator::finish() const {
  std::vector<DailyAggregate> out;
  out.reserve(buckets_.size());
  for (const auto& [key, counts] : buckets_) {
    DailyAggregate a;
    a.creative_id = key.first;
    a.day = key.second;
    a.exposures = counts.first;
    a.clicks = counts.second;
    a.ctr = a.exposures > 0 ? static_cast<double>(a.clicks) / a.exposures : 0.0;
    out.push_back(a);
  }
  return out;  // map order is already (creative_id, day)
}

std::vector<DailyAggregate> aggregate_daily(const std::vector<datagen::ImpressionRecord>& records,
                                            int period_days) {
  DailyAggregator agg(period_days);
  for (const auto& r : records) agg.add(r);
  return agg.finish();
}

std::vector<LabeledSample> label_samples(const std::vector<DailyAggregate>& aggs) {
  std::vector<LabeledSample> out;
  if (aggs.empty()) return out;
  double mean_exposures = 0.0, mean_clicks = 0.0;
  for (const auto& a : aggs) {
    mean_exposures += static_cast<double>(a.exposures);
    mean_clicks += static_cast<double>(a.clicks);
  }
  mean_exposures /= aggs.size();
  mean_clicks /= aggs.size();

  out.reserve(aggs.size());
  for (const auto& a : aggs) {
    Label label = Label::ExcludedSparse;
    if (static_cast<double>(a.exposures) > mean_exposures) {
      if (static_cast<double>(a.clicks) > mean_clicks)
        label = Label::Positive;
      else if (static_cast<double>(a.clicks) < mean_clicks)
        label = Label::Negative;
      // clicks exactly at the mean stays excluded: neither rule claims it
    }
    out.push_back({a.creative_id, a.day, label});
  }
  return out;
}

AmbiguityResult detect_ambiguous(const std::vector<LabeledSample>& labeled) {
  std::set<int> has_pos, has_neg, has_any;
  for (const auto& s : labeled) {
    if (s.label == Label::Positive) {
      has_pos.insert(s.creative_id);
      has_any.insert(s.creative_id);
    } else if (s.label == Label::Negative) {
      has_neg.insert(s.creative_id);
      has_any.insert(s.creative_id);
    }
  }
  AmbiguityResult res;
  for (int c : has_pos)
    if (has_neg.count(c)) res.ambiguous_creative_ids.push_back(c);
  res.rate = has_any.empty()
                 ? 0.0
                 : static_cast<double>(res.ambiguous_creative_ids.size()) / has_any.size();
  const std::set<int> ambiguous(res.ambiguous_creative_ids.begin(),
                                res.ambiguous_creative_ids.end());
  res.relabeled = labeled;
  for (auto& s : res.relabeled)
    if (ambiguous.count(s.creative_id)) s.label = Label::ExcludedAmbiguous;
  return res;
}

features::Dataset build_strict_trainset(const std::vector<LabeledSample>& labeled,
                                        const datagen::Catalog& catalog,
                                        std::shared_ptr<const features::FeatureTable> table) {
  features::Dataset ds;
  ds.table = std::move(table);
  std::vector<LabeledSample> surviving;
  for (const auto& s : labeled)
    if (s.label == Label::Positive || s.label == Label::Negative) surviving.push_back(s);
  if (surviving.empty()) throw EmptyDataset("no positive or negative buckets survive labeling");
  std::sort(surviving.begin(), surviving.end(), [](const auto& a, const auto& b) {
    return std::pair(a.creative_id, a.day) < std::pair(b.creative_id, b.day);
  });
  for (const auto& s : surviving) {
    catalog.creative(s.creative_id);  // bounds check
    features::Example ex;
    ex.row = s.creative_id;
    ex.creative_id = s.creative_id;
    ex.day = s.day;
    ex.label = s.label == Label::Positive ? 1.0 : 0.0;
    ds.examples.push_back(ex);
  }
  return ds;
}

features::Dataset build_teacher_trainset(const std::vector<datagen::ImpressionRecord>& records,
                                         const datagen::Catalog& catalog,
                                         std::shared_ptr<const features::FeatureTable> table) {
  features::Dataset ds;
  ds.table = std::move(table);
  ds.examples.reserve(records.size());
  for (const auto& r : records) {
    catalog.creative(r.creative_id);
    features::Example ex;
    ex.row = r.creative_id;
    ex.creative_id = r.creative_id;
    ex.day = r.day;
    ex.label = r.clicked ? 1.0 : 0.0;
    ds.examples.push_back(ex);
  }
  return ds;
}

void write_labeled_file(const std::string& path, const std::vector<LabeledSample>& labeled) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for write: " + path);
  f << "dco.labels 1\n";
  for (const auto& s : labeled)
    f << s.creative_id << ' ' << s.day << ' ' << label_name(s.label) << "\n";
}

std::vector<LabeledSample> read_labeled_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open for read: " + path);
  std::string header;
  std::getline(f, header);
  if (header != "dco.labels 1") throw IoError("bad labels header: " + path);
  std::vector<LabeledSample> out;
  LabeledSample s;
  std::string name;
  while (f >> s.creative_id >> s.day >> name) {
    if (name == "positive")
      s.label = Label::Positive;
    else if (name == "negative")
      s.label = Label::Negative;
    else if (name == "excluded_sparse")
      s.label = Label::ExcludedSparse;
    else if (name == "excluded_ambiguous")
      s.label = Label::ExcludedAmbiguous;
    else
      throw IoError("bad label name: " + name);
    out.push_back(s);
  }
  return out;
}

}  // namespace dco::labeling
