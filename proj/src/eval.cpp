#include "socnet/eval.hpp"

#include <cmath>

#include "socnet/csv.hpp"
#include "socnet/numeric.hpp"
#include "socnet/rand.hpp"

namespace socnet {

namespace {

EvalReport count_confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw ShapeError("predictions and labels length mismatch");
  }
  if (labels.empty()) throw EmptyInputError("evaluation on empty label set");
  EvalReport r;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      ++r.n_friend_total;
      if (predictions[i] == 1) ++r.n_friend_correct;
    } else {
      ++r.n_enemy_total;
      if (predictions[i] == 0) ++r.n_enemy_correct;
    }
  }
  return r;
}

}  // namespace

double balanced_accuracy(std::span<const int> predictions, std::span<const int> labels) {
  EvalReport r = count_confusion(predictions, labels);
  if (r.n_friend_total == 0 || r.n_enemy_total == 0) {
    const bool friend_present = r.n_friend_total > 0;
    double recall = friend_present
                        ? static_cast<double>(r.n_friend_correct) / r.n_friend_total
                        : static_cast<double>(r.n_enemy_correct) / r.n_enemy_total;
    throw DegenerateClassError("labels contain a single class", recall, friend_present ? 1 : 0);
  }
  return 0.5 * (static_cast<double>(r.n_friend_correct) / r.n_friend_total +
                static_cast<double>(r.n_enemy_correct) / r.n_enemy_total);
}

EvalReport evaluate(std::span<const int> predictions, std::span<const int> labels) {
  EvalReport r = count_confusion(predictions, labels);
  if (r.n_friend_total == 0 || r.n_enemy_total == 0) {
    r.degenerate = true;
    return r;
  }
  r.bacc = 0.5 * (static_cast<double>(r.n_friend_correct) / r.n_friend_total +
                  static_cast<double>(r.n_enemy_correct) / r.n_enemy_total);
  return r;
}

CrossValidation cross_validate(std::span<const RelationSample> samples, int k,
                               const TrainPredictFn& train_fn, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross_validate requires k >= 2");
  auto folds = kfold_split(samples, k, seed);

  CrossValidation cv;
  std::vector<double> valid;
  for (int f = 0; f < k; ++f) {
    const auto& fold = folds[static_cast<std::size_t>(f)];
    std::uint64_t fold_seed = derive_seed(seed, static_cast<std::uint64_t>(f), 0xC5ULL);
    std::vector<int> predictions = train_fn(fold.train, fold.test, fold_seed);
    std::vector<int> labels;
    labels.reserve(fold.test.size());
    for (const auto& s : fold.test) labels.push_back(s.label);
    EvalReport report = evaluate(predictions, labels);
    report.fold = f;
    report.seed = fold_seed;
    if (report.degenerate) {
      ++cv.degenerate_folds;
    } else {
      valid.push_back(report.bacc);
    }
    cv.folds.push_back(std::move(report));
  }
  if (!valid.empty()) {
    cv.mean_bacc = mean_of(valid);
    cv.sem_bacc = sem_of(valid);
  }
  return cv;
}

Histogram bacc_histogram(std::span<const EvalReport> reports, int n_bins) {
  if (reports.empty()) throw EmptyInputError("bacc_histogram on empty report list");
  if (n_bins < 1) throw std::invalid_argument("bacc_histogram: n_bins must be >= 1");
  Histogram hist;
  hist.edges.resize(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i) {
    hist.edges[static_cast<std::size_t>(i)] = static_cast<double>(i) / n_bins;
  }
  hist.density.assign(static_cast<std::size_t>(n_bins), 0.0);
  long long counted = 0;
  for (const auto& r : reports) {
    if (r.degenerate || std::isnan(r.bacc)) continue;
    int bin = static_cast<int>(r.bacc * n_bins);
    bin = std::min(bin, n_bins - 1);
    hist.density[static_cast<std::size_t>(bin)] += 1.0;
    ++counted;
  }
  if (counted == 0) throw EmptyInputError("bacc_histogram: no valid reports");
  const double width = 1.0 / n_bins;
  for (double& d : hist.density) d = d / (static_cast<double>(counted) * width);
  return hist;
}

void write_reports_csv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "predictor_set,treatment,seed,fold,n_friend_total,n_friend_correct,"
         "n_enemy_total,n_enemy_correct,bacc,degenerate\n";
  for (const auto& r : reports) {
    out << r.predictor_set << ',' << r.treatment << ',' << r.seed << ',' << r.fold << ','
        << r.n_friend_total << ',' << r.n_friend_correct << ',' << r.n_enemy_total << ','
        << r.n_enemy_correct << ',' << (r.degenerate ? "" : csv::format_double(r.bacc)) << ','
        << (r.degenerate ? 1 : 0) << '\n';
  }
}

void write_histogram_csv(std::ostream& out, const Histogram& hist) {
  out << "bin_lo,bin_hi,density\n";
  for (std::size_t b = 0; b < hist.density.size(); ++b) {
    out << csv::format_double(hist.edges[b]) << ',' << csv::format_double(hist.edges[b + 1]) << ','
        << csv::format_double(hist.density[b]) << '\n';
  }
}

}  // namespace socnet
