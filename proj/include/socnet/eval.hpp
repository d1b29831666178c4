#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "socnet/dataset.hpp"

namespace socnet {

struct EvalReport {
  long long n_friend_total = 0;
  long long n_friend_correct = 0;
  long long n_enemy_total = 0;
  long long n_enemy_correct = 0;
  double bacc = std::numeric_limits<double>::quiet_NaN();
  bool degenerate = false;  // one class absent from the labels

  // run metadata
  std::string predictor_set;
  std::string treatment;
  std::uint64_t seed = 0;
  int fold = -1;
};

// Mean of the per-class recalls. Throws DegenerateClassError (carrying the
// single-class recall) when only one class is present in the labels.
double balanced_accuracy(std::span<const int> predictions, std::span<const int> labels);

// Report builder tolerant of degenerate label sets (flags them instead of
// throwing); used by the cross-validation and treatment drivers.
EvalReport evaluate(std::span<const int> predictions, std::span<const int> labels);

// Trains on the fold's training part and returns predicted labels for its
// test part. fold_seed is derived deterministically per fold.
using TrainPredictFn = std::function<std::vector<int>(
    const std::vector<RelationSample>& train, const std::vector<RelationSample>& test,
    std::uint64_t fold_seed)>;

struct CrossValidation {
  std::vector<EvalReport> folds;
  double mean_bacc = 0.0;
  double sem_bacc = 0.0;       // standard error of the mean over valid folds
  int degenerate_folds = 0;    // excluded from the summary, with a warning count
};

CrossValidation cross_validate(std::span<const RelationSample> samples, int k,
                               const TrainPredictFn& train_fn, std::uint64_t seed);

struct Histogram {
  std::vector<double> edges;    // n_bins + 1 edges over [0, 1]
  std::vector<double> density;  // sum(width * density) == 1
};

Histogram bacc_histogram(std::span<const EvalReport> reports, int n_bins);

void write_reports_csv(std::ostream& out, std::span<const EvalReport> reports);
void write_histogram_csv(std::ostream& out, const Histogram& hist);

}  // namespace socnet
