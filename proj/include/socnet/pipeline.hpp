#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "socnet/dataset.hpp"
#include "socnet/embedding.hpp"
#include "socnet/eval.hpp"
#include "socnet/global.hpp"
#include "socnet/mlp.hpp"

namespace socnet {

// --- Local-predictor experiments (connected relationships) ---

struct LocalEnsembleConfig {
  PredictorSet predictors = PredictorSet::InfluenceOnly;
  int n_seeds = 10;
  double test_fraction = 0.2;
  TrainConfig train;          // 200-step standard schedule by default
  std::uint64_t seed = 1;
};

struct LocalEnsembleResult {
  std::vector<EvalReport> reports;  // one per seed
  std::vector<MlpModel> models;
  double mean_bacc = 0.0;
  double sem_bacc = 0.0;
};

// Trains n_seeds models with fresh random splits and initializations; the
// per-seed reports feed the accuracy bars and the models feed the
// probability curves.
LocalEnsembleResult local_ensemble(std::span<const RelationSample> samples,
                                   const LocalEnsembleConfig& config);

// k-fold cross-validation with the dynamical 1000-step schedule (the
// isolated-relationship treatment).
CrossValidation isolated_cross_validation(std::span<const RelationSample> samples, int k,
                                          PredictorSet predictors, TrainConfig train,
                                          std::uint64_t seed);

// --- Global (embedding) experiments ---

enum class GlobalModelKind { DeepNet, Forest };
enum class Treatment { RandomSplit, HoldoutCourse };

std::string treatment_name(Treatment t);

struct GlobalRunConfig {
  GlobalModelKind model = GlobalModelKind::DeepNet;
  DeepNetConfig net;
  ForestConfig forest;
  int smote_neighbors = 5;
  double test_fraction = 0.2;  // treatment I
  int runs = 390;              // treatment I: total runs; treatment II: runs per course
  std::uint64_t seed = 1;
};

// Oversamples the minority class of the training set to parity via SMOTE;
// test data are left untouched by construction.
std::vector<RelationSample> smote_balance(std::span<const RelationSample> train, int k_neighbors,
                                          std::uint64_t seed);

// Treatment I: random test fraction, re-split and re-initialized per run.
std::vector<EvalReport> treatment_random_split(std::span<const RelationSample> samples,
                                               const GlobalRunConfig& config);

// Treatment II: every (school, course) present in the samples is held out in
// turn, config.runs times with fresh model seeds.
std::vector<EvalReport> treatment_holdout_course(std::span<const RelationSample> samples,
                                                 const GlobalRunConfig& config);

}  // namespace socnet
