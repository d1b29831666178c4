#pragma once

#include <cstdint>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "socnet/embedding.hpp"
#include "socnet/graph.hpp"

namespace socnet {

// Mapping from raw weights to the binary friend/enemy task. Weights outside
// both sets are excluded from samples but stay in the graph, so triadic
// influence always sees the full signed network.
struct ClassScheme {
  std::set<int> friend_weights{+2};
  std::set<int> enemy_weights{-1, -2};

  void validate() const;

  static ClassScheme strict_friends() { return ClassScheme{{+2}, {-1, -2}}; }
  static ClassScheme broad_friends() { return ClassScheme{{+1, +2}, {-1, -2}}; }
};

enum class Label { Enemy = 0, Friend = 1, Excluded = 2 };

Label label_relation(int weight, const ClassScheme& scheme);

enum class PredictorSet {
  InfluenceAndTraits,  // [I, src g/crt/p, dst g/crt/p] -> 7
  InfluenceOnly,       // [I]                           -> 1
  TraitsOnly,          // [src g/crt/p, dst g/crt/p]    -> 6
  ProsocialityOnly,    // [src p, dst p]                -> 2
  EmbeddingPair        // merged edge embedding         -> 256 (concat of two 128-dim vectors)
};

PredictorSet parse_predictor_set(std::string_view name);
std::string predictor_set_name(PredictorSet s);

// Nominal feature dimension; embedding_pair depends on the table dimension
// and merge operator (concat doubles it).
int feature_dim(PredictorSet s, int embedding_dim = 128, MergeOp merge = MergeOp::Concat);

// Numeric trait encoding: one scalar per trait per student.
double gender_value(Gender g);  // M -> 0, F -> 1, NB -> 0.5

struct RelationSample {
  std::string src;
  std::string dst;
  std::vector<double> features;
  int label = 0;  // 1 friend, 0 enemy
  std::string school_id;  // of the nominator
  int course = 0;
  int two_paths = 0;
};

// One sample per non-excluded declared edge, in the graph's deterministic
// edge order. Influence features are computed on the full weight set
// regardless of the scheme. embeddings must be supplied exactly when
// predictors == EmbeddingPair.
std::vector<RelationSample> build_samples(const SignedDigraph& g, const ClassScheme& scheme,
                                          PredictorSet predictors,
                                          const EmbeddingTable* embeddings = nullptr,
                                          MergeOp merge = MergeOp::Concat);

struct TwoPathSplit {
  std::vector<RelationSample> connected;  // two_paths > 0
  std::vector<RelationSample> isolated;   // two_paths == 0
};

TwoPathSplit split_by_two_paths(std::span<const RelationSample> samples);

struct SampleSplit {
  std::vector<RelationSample> train;
  std::vector<RelationSample> test;
};

// |test| = round(test_fraction * N); deterministic in the seed.
SampleSplit random_split(std::span<const RelationSample> samples, double test_fraction,
                         std::uint64_t seed);

// Test set: all samples whose nominator belongs to (school_id, course).
SampleSplit holdout_course_split(std::span<const RelationSample> samples,
                                 const std::string& school_id, int course);

// k disjoint, exhaustive folds with sizes differing by at most one.
std::vector<SampleSplit> kfold_split(std::span<const RelationSample> samples, int k,
                                     std::uint64_t seed);

// Per-feature z-score normalization fitted on training data only.
class FeatureScaler {
 public:
  FeatureScaler() = default;

  static FeatureScaler fit(std::span<const RelationSample> train);
  static FeatureScaler identity(int dim);

  int dim() const { return static_cast<int>(mean_.size()); }
  void transform(std::span<const double> in, std::span<double> out) const;
  std::vector<double> transform(std::span<const double> in) const;

  std::span<const double> mean() const { return mean_; }
  std::span<const double> stddev() const { return std_; }

  static FeatureScaler from_moments(std::vector<double> mean, std::vector<double> stddev);

 private:
  std::vector<double> mean_;
  std::vector<double> std_;  // constant features get 1 so they pass through centered
};

void write_samples_csv(std::ostream& out, std::span<const RelationSample> samples);

}  // namespace socnet
