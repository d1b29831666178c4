#include "socnet/pipeline.hpp"

#include <algorithm>
#include <map>

#include <future>
#include <thread>

#include "socnet/numeric.hpp"
#include "socnet/rand.hpp"

namespace socnet {

namespace {

// Runs f(0..n-1) across the hardware threads; every index writes only its
// own preassigned slot.
void run_indexed(int n, const std::function<void(int)>& f) {
  unsigned hw = std::thread::hardware_concurrency();
  int workers = std::min<int>(n, hw == 0 ? 1 : static_cast<int>(hw));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::future<void>> futures;
  int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    int lo = w * chunk;
    int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    futures.push_back(std::async(std::launch::async, [&f, lo, hi]() {
      for (int i = lo; i < hi; ++i) f(i);
    }));
  }
  for (auto& fut : futures) fut.get();
}

}  // namespace

LocalEnsembleResult local_ensemble(std::span<const RelationSample> samples,
                                   const LocalEnsembleConfig& config) {
  if (config.n_seeds < 1) throw ConfigError("local_ensemble: n_seeds must be >= 1");
  LocalEnsembleResult result;
  result.reports.resize(static_cast<std::size_t>(config.n_seeds));
  result.models.resize(static_cast<std::size_t>(config.n_seeds));

  // Ensemble members are independent given their derived seeds, so they can
  // run concurrently; slots are preassigned to keep the output deterministic.
  auto run_one = [&](int run) {
    std::uint64_t run_seed = derive_seed(config.seed, static_cast<std::uint64_t>(run), 0x4c6f63ULL);
    SampleSplit split = random_split(samples, config.test_fraction, run_seed);
    TrainConfig train = config.train;
    train.seed = derive_seed(run_seed, 1);
    MlpModel model = train_mlp(split.train, train, config.predictors);

    std::vector<int> predictions;
    std::vector<int> labels;
    predictions.reserve(split.test.size());
    labels.reserve(split.test.size());
    for (const auto& s : split.test) {
      predictions.push_back(predict_class(model, s.features));
      labels.push_back(s.label);
    }
    EvalReport report = evaluate(predictions, labels);
    report.predictor_set = predictor_set_name(config.predictors);
    report.treatment = "random_split";
    report.seed = run_seed;
    result.reports[static_cast<std::size_t>(run)] = std::move(report);
    result.models[static_cast<std::size_t>(run)] = std::move(model);
  };
  run_indexed(config.n_seeds, run_one);

  std::vector<double> baccs;
  for (const auto& report : result.reports) {
    if (!report.degenerate) baccs.push_back(report.bacc);
  }
  result.mean_bacc = mean_of(baccs);
  result.sem_bacc = sem_of(baccs);
  return result;
}

CrossValidation isolated_cross_validation(std::span<const RelationSample> samples, int k,
                                          PredictorSet predictors, TrainConfig train,
                                          std::uint64_t seed) {
  TrainPredictFn fn = [&predictors, &train](const std::vector<RelationSample>& fold_train,
                                            const std::vector<RelationSample>& fold_test,
                                            std::uint64_t fold_seed) {
    TrainConfig cfg = train;
    cfg.seed = fold_seed;
    MlpModel model = train_mlp(fold_train, cfg, predictors);
    std::vector<int> predictions;
    predictions.reserve(fold_test.size());
    for (const auto& s : fold_test) predictions.push_back(predict_class(model, s.features));
    return predictions;
  };
  CrossValidation cv = cross_validate(samples, k, fn, seed);
  for (auto& report : cv.folds) {
    report.predictor_set = predictor_set_name(predictors);
    report.treatment = "kfold";
  }
  return cv;
}

std::string treatment_name(Treatment t) {
  return t == Treatment::RandomSplit ? "I" : "II";
}

std::vector<RelationSample> smote_balance(std::span<const RelationSample> train, int k_neighbors,
                                          std::uint64_t seed) {
  std::vector<const RelationSample*> friends, enemies;
  for (const auto& s : train) {
    (s.label == 1 ? friends : enemies).push_back(&s);
  }
  if (friends.empty() || enemies.empty()) {
    throw TrainingError("smote_balance needs both classes");
  }
  if (friends.size() == enemies.size()) {
    return std::vector<RelationSample>(train.begin(), train.end());
  }
  const bool minority_is_friend = friends.size() < enemies.size();
  const auto& minority = minority_is_friend ? friends : enemies;
  const auto& majority = minority_is_friend ? enemies : friends;

  std::vector<std::vector<double>> minority_features;
  minority_features.reserve(minority.size());
  for (const auto* s : minority) minority_features.push_back(s->features);

  auto oversampled =
      smote(minority_features, k_neighbors, static_cast<int>(majority.size()), seed);

  std::vector<RelationSample> balanced(train.begin(), train.end());
  balanced.reserve(train.size() + oversampled.size() - minority.size());
  for (std::size_t i = minority.size(); i < oversampled.size(); ++i) {
    RelationSample synth;
    synth.src = "smote";
    synth.dst = "smote";
    synth.features = std::move(oversampled[i]);
    synth.label = minority_is_friend ? 1 : 0;
    synth.school_id = "synthetic";
    synth.course = 0;
    synth.two_paths = 0;
    balanced.push_back(std::move(synth));
  }
  return balanced;
}

namespace {

EvalReport run_global_once(const std::vector<RelationSample>& train,
                           const std::vector<RelationSample>& test,
                           const GlobalRunConfig& config, std::uint64_t run_seed) {
  auto balanced = smote_balance(train, config.smote_neighbors, derive_seed(run_seed, 11));
  std::vector<int> predictions;
  predictions.reserve(test.size());
  if (config.model == GlobalModelKind::DeepNet) {
    DeepNetConfig net = config.net;
    net.seed = derive_seed(run_seed, 12);
    DeepNetModel model = train_deep(balanced, net);
    for (const auto& s : test) predictions.push_back(predict_deep(model, s.features));
  } else {
    ForestConfig forest = config.forest;
    forest.seed = derive_seed(run_seed, 13);
    ForestModel model = train_forest(balanced, forest);
    for (const auto& s : test) predictions.push_back(predict_forest(model, s.features).label);
  }
  std::vector<int> labels;
  labels.reserve(test.size());
  for (const auto& s : test) labels.push_back(s.label);
  EvalReport report = evaluate(predictions, labels);
  report.predictor_set = "embedding_pair";
  report.seed = run_seed;
  return report;
}

}  // namespace

std::vector<EvalReport> treatment_random_split(std::span<const RelationSample> samples,
                                               const GlobalRunConfig& config) {
  std::vector<EvalReport> reports(static_cast<std::size_t>(config.runs));
  run_indexed(config.runs, [&](int run) {
    std::uint64_t run_seed = derive_seed(config.seed, static_cast<std::uint64_t>(run), 0x54524931ULL);
    SampleSplit split = random_split(samples, config.test_fraction, run_seed);
    EvalReport report = run_global_once(split.train, split.test, config, run_seed);
    report.treatment = "I";
    report.fold = run;
    reports[static_cast<std::size_t>(run)] = std::move(report);
  });
  return reports;
}

std::vector<EvalReport> treatment_holdout_course(std::span<const RelationSample> samples,
                                                 const GlobalRunConfig& config) {
  // Courses present in the sample metadata, in deterministic order.
  std::map<std::pair<std::string, int>, long long> courses;
  for (const auto& s : samples) ++courses[{s.school_id, s.course}];

  std::vector<std::pair<std::string, int>> course_list;
  course_list.reserve(courses.size());
  for (const auto& [course_key, count] : courses) {
    (void)count;
    course_list.push_back(course_key);
  }

  const int total = static_cast<int>(course_list.size()) * config.runs;
  std::vector<EvalReport> reports(static_cast<std::size_t>(total));
  run_indexed(total, [&](int index) {
    int course_index = index / config.runs;
    int run = index % config.runs;
    const auto& course_key = course_list[static_cast<std::size_t>(course_index)];
    SampleSplit split = holdout_course_split(samples, course_key.first, course_key.second);
    std::uint64_t run_seed = derive_seed(config.seed,
                                         static_cast<std::uint64_t>(course_index * 1000 + run),
                                         0x54524932ULL);
    EvalReport report = run_global_once(split.train, split.test, config, run_seed);
    report.treatment = "II";
    report.fold = course_index;
    reports[static_cast<std::size_t>(index)] = std::move(report);
  });
  return reports;
}

}  // namespace socnet
