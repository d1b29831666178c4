#include "socnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "socnet/csv.hpp"
#include "socnet/rand.hpp"

namespace socnet {

void ClassScheme::validate() const {
  if (friend_weights.empty() || enemy_weights.empty()) {
    throw ValidationError("class scheme: friend and enemy weight sets must be non-empty");
  }
  for (int w : friend_weights) {
    if (w != 1 && w != 2) throw ValidationError("class scheme: friend weights must be +1/+2");
    if (enemy_weights.count(w)) throw ValidationError("class scheme: overlapping weight sets");
  }
  for (int w : enemy_weights) {
    if (w != -1 && w != -2) throw ValidationError("class scheme: enemy weights must be -1/-2");
  }
}

Label label_relation(int weight, const ClassScheme& scheme) {
  if (scheme.friend_weights.count(weight)) return Label::Friend;
  if (scheme.enemy_weights.count(weight)) return Label::Enemy;
  return Label::Excluded;
}

PredictorSet parse_predictor_set(std::string_view name) {
  if (name == "influence_and_traits") return PredictorSet::InfluenceAndTraits;
  if (name == "influence_only") return PredictorSet::InfluenceOnly;
  if (name == "traits_only") return PredictorSet::TraitsOnly;
  if (name == "prosociality_only") return PredictorSet::ProsocialityOnly;
  if (name == "embedding_pair") return PredictorSet::EmbeddingPair;
  throw ConfigError("unknown predictor set '" + std::string(name) + "'");
}

std::string predictor_set_name(PredictorSet s) {
  switch (s) {
    case PredictorSet::InfluenceAndTraits: return "influence_and_traits";
    case PredictorSet::InfluenceOnly: return "influence_only";
    case PredictorSet::TraitsOnly: return "traits_only";
    case PredictorSet::ProsocialityOnly: return "prosociality_only";
    case PredictorSet::EmbeddingPair: return "embedding_pair";
  }
  return "?";
}

int feature_dim(PredictorSet s, int embedding_dim, MergeOp merge) {
  switch (s) {
    case PredictorSet::InfluenceAndTraits: return 7;
    case PredictorSet::InfluenceOnly: return 1;
    case PredictorSet::TraitsOnly: return 6;
    case PredictorSet::ProsocialityOnly: return 2;
    case PredictorSet::EmbeddingPair:
      return merge == MergeOp::Concat ? 2 * embedding_dim : embedding_dim;
  }
  return 0;
}

double gender_value(Gender g) {
  switch (g) {
    case Gender::Male: return 0.0;
    case Gender::Female: return 1.0;
    case Gender::NonBinary: return 0.5;
  }
  return 0.0;
}

std::vector<RelationSample> build_samples(const SignedDigraph& g, const ClassScheme& scheme,
                                          PredictorSet predictors,
                                          const EmbeddingTable* embeddings, MergeOp merge) {
  scheme.validate();
  if ((predictors == PredictorSet::EmbeddingPair) != (embeddings != nullptr)) {
    throw ConfigError("embeddings must be supplied exactly for the embedding_pair predictor set");
  }

  // Influence and two-path metadata come from the full weight set, so the
  // scheme never changes features, only label/exclusion status.
  auto entries = influence_matrix(g);

  std::vector<RelationSample> samples;
  samples.reserve(entries.size());
  for (const auto& e : entries) {
    Label label = label_relation(e.weight, scheme);
    if (label == Label::Excluded) continue;
    const auto& src = g.attributes(e.src);
    const auto& dst = g.attributes(e.dst);
    RelationSample s;
    s.src = src.student_id;
    s.dst = dst.student_id;
    s.label = label == Label::Friend ? 1 : 0;
    s.school_id = src.school_id;
    s.course = src.course;
    s.two_paths = e.two_paths;
    switch (predictors) {
      case PredictorSet::InfluenceAndTraits:
        s.features = {static_cast<double>(e.influence),
                      gender_value(src.gender),
                      static_cast<double>(src.crt),
                      src.prosociality,
                      gender_value(dst.gender),
                      static_cast<double>(dst.crt),
                      dst.prosociality};
        break;
      case PredictorSet::InfluenceOnly:
        s.features = {static_cast<double>(e.influence)};
        break;
      case PredictorSet::TraitsOnly:
        s.features = {gender_value(src.gender), static_cast<double>(src.crt), src.prosociality,
                      gender_value(dst.gender), static_cast<double>(dst.crt), dst.prosociality};
        break;
      case PredictorSet::ProsocialityOnly:
        s.features = {src.prosociality, dst.prosociality};
        break;
      case PredictorSet::EmbeddingPair:
        s.features = embed_edge(*embeddings, src.student_id, dst.student_id, merge);
        break;
    }
    samples.push_back(std::move(s));
  }
  return samples;
}

TwoPathSplit split_by_two_paths(std::span<const RelationSample> samples) {
  TwoPathSplit split;
  for (const auto& s : samples) {
    if (s.two_paths > 0) {
      split.connected.push_back(s);
    } else {
      split.isolated.push_back(s);
    }
  }
  return split;
}

SampleSplit random_split(std::span<const RelationSample> samples, double test_fraction,
                         std::uint64_t seed) {
  if (samples.size() < 2) throw EmptyInputError("random_split needs at least two samples");
  if (test_fraction <= 0.0 || test_fraction >= 1.0) {
    throw std::invalid_argument("test_fraction must be in (0, 1)");
  }
  const std::size_t n = samples.size();
  std::size_t n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  SampleSplit split;
  split.test.reserve(n_test);
  split.train.reserve(n - n_test);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_test ? split.test : split.train).push_back(samples[order[i]]);
  }
  return split;
}

SampleSplit holdout_course_split(std::span<const RelationSample> samples,
                                 const std::string& school_id, int course) {
  SampleSplit split;
  for (const auto& s : samples) {
    if (s.school_id == school_id && s.course == course) {
      split.test.push_back(s);
    } else {
      split.train.push_back(s);
    }
  }
  if (split.test.empty()) {
    throw NotFoundError("no samples for school '" + school_id + "' course " +
                        std::to_string(course));
  }
  return split;
}

std::vector<SampleSplit> kfold_split(std::span<const RelationSample> samples, int k,
                                     std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("kfold_split requires k >= 2");
  if (static_cast<std::size_t>(k) > samples.size()) {
    throw std::invalid_argument("kfold_split: k exceeds sample count");
  }
  const std::size_t n = samples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(order);

  // First n % k folds take one extra sample.
  std::vector<SampleSplit> folds(static_cast<std::size_t>(k));
  std::size_t base = n / static_cast<std::size_t>(k);
  std::size_t extra = n % static_cast<std::size_t>(k);
  std::size_t at = 0;
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  for (int f = 0; f < k; ++f) {
    std::size_t len = base + (static_cast<std::size_t>(f) < extra ? 1 : 0);
    ranges.emplace_back(at, at + len);
    at += len;
  }
  for (int f = 0; f < k; ++f) {
    auto [lo, hi] = ranges[static_cast<std::size_t>(f)];
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.test.reserve(hi - lo);
    fold.train.reserve(n - (hi - lo));
    for (std::size_t i = 0; i < n; ++i) {
      (i >= lo && i < hi ? fold.test : fold.train).push_back(samples[order[i]]);
    }
  }
  return folds;
}

FeatureScaler FeatureScaler::fit(std::span<const RelationSample> train) {
  if (train.empty()) throw EmptyInputError("cannot fit scaler on empty training set");
  const std::size_t dim = train.front().features.size();
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& s : train) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += s.features[d];
  }
  for (double& m : mean) m /= static_cast<double>(train.size());
  for (const auto& s : train) {
    for (std::size_t d = 0; d < dim; ++d) {
      double diff = s.features[d] - mean[d];
      var[d] += diff * diff;
    }
  }
  std::vector<double> stddev(dim, 1.0);
  for (std::size_t d = 0; d < dim; ++d) {
    double sd = std::sqrt(var[d] / static_cast<double>(train.size()));
    stddev[d] = sd > 1e-12 ? sd : 1.0;
  }
  return from_moments(std::move(mean), std::move(stddev));
}

FeatureScaler FeatureScaler::identity(int dim) {
  return from_moments(std::vector<double>(static_cast<std::size_t>(dim), 0.0),
                      std::vector<double>(static_cast<std::size_t>(dim), 1.0));
}

FeatureScaler FeatureScaler::from_moments(std::vector<double> mean, std::vector<double> stddev) {
  FeatureScaler s;
  s.mean_ = std::move(mean);
  s.std_ = std::move(stddev);
  return s;
}

void FeatureScaler::transform(std::span<const double> in, std::span<double> out) const {
  if (in.size() != mean_.size()) {
    throw ShapeError("scaler got " + std::to_string(in.size()) + " features, expected " +
                     std::to_string(mean_.size()));
  }
  for (std::size_t d = 0; d < in.size(); ++d) out[d] = (in[d] - mean_[d]) / std_[d];
}

std::vector<double> FeatureScaler::transform(std::span<const double> in) const {
  std::vector<double> out(in.size());
  transform(in, out);
  return out;
}

void write_samples_csv(std::ostream& out, std::span<const RelationSample> samples) {
  const std::size_t dim = samples.empty() ? 0 : samples.front().features.size();
  out << "src,dst,label,two_path_count";
  for (std::size_t d = 0; d < dim; ++d) out << ",f" << d;
  out << '\n';
  for (const auto& s : samples) {
    out << s.src << ',' << s.dst << ',' << s.label << ',' << s.two_paths;
    for (double f : s.features) out << ',' << csv::format_double(f);
    out << '\n';
  }
}

}  // namespace socnet
