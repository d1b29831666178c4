#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "socnet/dataset.hpp"
#include "socnet/numeric.hpp"

namespace socnet {

// Feedforward net for embedding inputs: ReLU hidden layers (128, 64, 32, 8),
// one sigmoid output read as P(friend).
struct DeepNetConfig {
  std::vector<int> hidden = {128, 64, 32, 8};
  double lr0 = 0.02;
  double lr_decay = 0.9999;  // per minibatch step
  int minibatch = 32;
  int epochs = 30;
  std::uint64_t seed = 1;
};

struct DeepNetModel {
  FeatureScaler scaler;
  std::vector<Matrix> w;               // layer l: out x in
  std::vector<std::vector<double>> b;

  int input_dim() const { return w.empty() ? 0 : w.front().cols; }
  int layer_count() const { return static_cast<int>(w.size()); }
};

double forward_deep(const DeepNetModel& model, std::span<const double> features);  // P(friend)
int predict_deep(const DeepNetModel& model, std::span<const double> features);     // ties -> enemy

struct DeepGradient {
  std::vector<Matrix> w;
  std::vector<std::vector<double>> b;
};

// Gradient of the summed binary cross-entropy over the batch.
DeepGradient deep_gradient(const DeepNetModel& model, std::span<const RelationSample> batch);

DeepNetModel train_deep(std::span<const RelationSample> samples, const DeepNetConfig& config);

void save_deepnet(std::ostream& out, const DeepNetModel& model);
DeepNetModel load_deepnet(std::istream& in);

// Random forest: Gini-impurity CART trees on bootstrap samples with a random
// feature subset considered at every split.
struct ForestConfig {
  int n_trees = 100;
  int max_depth = 7;
  int features_per_split = 0;  // 0 -> floor(sqrt(D)), at least 1
  int min_samples_leaf = 1;
  std::uint64_t seed = 1;
  int threads = 0;
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = -1;
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  int predict(std::span<const double> features) const;
  int depth() const;  // edges on the longest root-to-leaf path
};

struct ForestModel {
  int max_depth = 7;
  std::vector<DecisionTree> trees;
};

ForestModel train_forest(std::span<const RelationSample> samples, const ForestConfig& config);

struct ForestPrediction {
  int label = 0;
  double vote_fraction = 0.0;  // share of trees voting for the returned label
};

// Majority vote; exact ties resolve to enemy.
ForestPrediction predict_forest(const ForestModel& model, std::span<const double> features);

void save_forest(std::ostream& out, const ForestModel& model);
ForestModel load_forest(std::istream& in);

}  // namespace socnet
