#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "socnet/dataset.hpp"
#include "socnet/numeric.hpp"
#include "socnet/rand.hpp"

namespace socnet {

// SGD schedule for the two-class softmax classifier. The dynamical variant
// oscillates the per-class loss weights while training (used for isolated
// relationships, where the dataset is small and heavily imbalanced).
struct TrainConfig {
  double lr0 = 0.1;
  double lr_decay = 0.99;      // per minimization step
  int minibatch = 20;          // must be even: half per class
  int steps = 200;             // 1000 for the dynamical variant
  bool dynamical = false;
  double oscillation_amplitude = 10.0;
  int oscillation_period = 5;  // steps
  int hidden_units = 100;
  std::uint64_t seed = 1;

  void validate() const;
};

// One hidden ReLU layer, two softmax outputs (index 0 = enemy, 1 = friend).
// The fitted feature scaler travels with the parameters.
struct MlpModel {
  PredictorSet predictors = PredictorSet::InfluenceOnly;
  FeatureScaler scaler;
  Matrix w1;                // hidden x input
  std::vector<double> b1;
  Matrix w2;                // 2 x hidden
  std::vector<double> b2;

  int input_dim() const { return w1.cols; }
  int hidden_dim() const { return w1.rows; }
};

// Class probabilities {p_enemy, p_friend}; features are raw (the model
// applies its own scaler). Softmax of the two logits; sums to 1.
std::array<double, 2> forward_probs(const MlpModel& model, std::span<const double> features);

// argmax with exact ties resolved to enemy (the minority class).
int predict_class(const MlpModel& model, std::span<const double> features);

// Weighted cross-entropy summed over the batch: -sum_k w[label_k] log q_k.
// True-class probabilities are clamped at 1e-12 before the log.
double cross_entropy(std::span<const std::array<double, 2>> probs_batch,
                     std::span<const int> labels,
                     const std::array<double, 2>& class_weights = {1.0, 1.0});

struct MlpGradient {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;
};

// Analytic gradient of the summed weighted cross-entropy over the batch.
MlpGradient gradient(const MlpModel& model, std::span<const RelationSample> batch,
                     const std::array<double, 2>& class_weights = {1.0, 1.0});

// Draws minibatches with an equal number of samples per class, sampling each
// class uniformly with replacement (the minority is thereby oversampled).
class BalancedSampler {
 public:
  BalancedSampler(std::span<const RelationSample> samples, int minibatch);

  // Indices into the sample span; exactly minibatch/2 per class.
  std::vector<int> next(Rng& rng) const;

 private:
  std::vector<int> friend_idx_;
  std::vector<int> enemy_idx_;
  int minibatch_;
};

MlpModel train_mlp(std::span<const RelationSample> samples, const TrainConfig& config,
                   PredictorSet predictors);

// lr(t) = lr0 * decay^t; the exact schedule applied at minimization step t.
inline double learning_rate_at(const TrainConfig& config, int step) {
  double lr = config.lr0;
  for (int t = 0; t < step; ++t) lr *= config.lr_decay;
  return lr;
}

// Antiphase per-class oscillation: w_c(t) = 1 + A*(1 + s_c sin(2 pi t/T))/2
// with s_enemy = +1, s_friend = -1. Returns {w_enemy, w_friend}.
std::array<double, 2> dynamical_weights(int step, double amplitude = 10.0, int period = 5);

struct CurvePoint {
  double influence = 0.0;
  double p_friend = 0.0;
  double p_enemy = 0.0;
};

// p(class | I) sweep; model must use the influence_only predictor set.
std::vector<CurvePoint> probability_curve(const MlpModel& model, double lo, double hi,
                                          int n_points);

struct EnsembleCurvePoint {
  double influence = 0.0;
  double p_friend = 0.0;
  double p_friend_sem = 0.0;
  double p_enemy = 0.0;
  double p_enemy_sem = 0.0;
};

std::vector<EnsembleCurvePoint> ensemble_probability_curve(std::span<const MlpModel> models,
                                                           double lo, double hi, int n_points);

// p(friend | p_src, p_dst) over a prosociality grid; model must use the
// prosociality_only predictor set. Row = nominator level, column = nominee.
Matrix probability_surface(const MlpModel& model, std::span<const double> grid);
Matrix ensemble_probability_surface(std::span<const MlpModel> models, std::span<const double> grid);

// Text serialization: header with dims and scaler, then row-major blocks.
void save_mlp(std::ostream& out, const MlpModel& model);
MlpModel load_mlp(std::istream& in);

}  // namespace socnet
