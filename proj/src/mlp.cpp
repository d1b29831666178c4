#include "socnet/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "socnet/csv.hpp"

namespace socnet {

namespace {

constexpr double kProbClamp = 1e-12;
constexpr double kPi = 3.14159265358979323846;

std::array<double, 2> softmax2(double z0, double z1) {
  double m = std::max(z0, z1);
  double e0 = std::exp(z0 - m);
  double e1 = std::exp(z1 - m);
  double sum = e0 + e1;
  return {e0 / sum, e1 / sum};
}

struct ForwardCache {
  std::vector<double> x;   // scaled input
  std::vector<double> z1;  // pre-activation
  std::vector<double> h;   // relu(z1)
  std::array<double, 2> q{};
};

void forward_into(const MlpModel& m, std::span<const double> features, ForwardCache& c) {
  if (static_cast<int>(features.size()) != m.input_dim()) {
    throw ShapeError("mlp got " + std::to_string(features.size()) + " features, expected " +
                     std::to_string(m.input_dim()));
  }
  c.x.resize(features.size());
  m.scaler.transform(features, c.x);
  affine(m.w1, c.x, m.b1, c.z1);
  c.h.resize(c.z1.size());
  for (std::size_t i = 0; i < c.z1.size(); ++i) c.h[i] = relu(c.z1[i]);
  std::vector<double> z2;
  affine(m.w2, c.h, m.b2, z2);
  c.q = softmax2(z2[0], z2[1]);
}

}  // namespace

void TrainConfig::validate() const {
  if (lr0 <= 0.0 || lr_decay <= 0.0) throw ConfigError("learning rate and decay must be positive");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (minibatch < 2 || minibatch % 2 != 0) {
    throw ConfigError("minibatch must be even and >= 2 (half per class)");
  }
  if (hidden_units < 1) throw ConfigError("hidden_units must be >= 1");
  if (dynamical && (oscillation_period < 1 || oscillation_amplitude < 0.0)) {
    throw ConfigError("bad oscillation parameters");
  }
}

std::array<double, 2> forward_probs(const MlpModel& model, std::span<const double> features) {
  ForwardCache c;
  forward_into(model, features, c);
  return c.q;
}

int predict_class(const MlpModel& model, std::span<const double> features) {
  auto q = forward_probs(model, features);
  return q[1] > q[0] ? 1 : 0;
}

double cross_entropy(std::span<const std::array<double, 2>> probs_batch,
                     std::span<const int> labels, const std::array<double, 2>& class_weights) {
  if (probs_batch.size() != labels.size()) {
    throw ShapeError("cross_entropy: probs and labels length mismatch");
  }
  double loss = 0.0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    int label = labels[k];
    double q = probs_batch[k][static_cast<std::size_t>(label)];
    loss -= class_weights[static_cast<std::size_t>(label)] * std::log(std::max(q, kProbClamp));
  }
  return loss;
}

MlpGradient gradient(const MlpModel& model, std::span<const RelationSample> batch,
                     const std::array<double, 2>& class_weights) {
  if (batch.empty()) throw EmptyInputError("gradient on empty batch");
  MlpGradient g;
  g.w1 = Matrix(model.w1.rows, model.w1.cols);
  g.b1.assign(model.b1.size(), 0.0);
  g.w2 = Matrix(model.w2.rows, model.w2.cols);
  g.b2.assign(model.b2.size(), 0.0);

  ForwardCache c;
  const int hidden = model.hidden_dim();
  const int input = model.input_dim();
  for (const auto& sample : batch) {
    forward_into(model, sample.features, c);
    const int label = sample.label;
    const double w = class_weights[static_cast<std::size_t>(label)];
    // d(sum weighted CE)/dz2_i = w * (q_i - delta_{i,label})
    std::array<double, 2> dz2 = {w * (c.q[0] - (label == 0 ? 1.0 : 0.0)),
                                 w * (c.q[1] - (label == 1 ? 1.0 : 0.0))};
    for (int i = 0; i < 2; ++i) {
      g.b2[static_cast<std::size_t>(i)] += dz2[static_cast<std::size_t>(i)];
      for (int j = 0; j < hidden; ++j) {
        g.w2(i, j) += dz2[static_cast<std::size_t>(i)] * c.h[static_cast<std::size_t>(j)];
      }
    }
    for (int j = 0; j < hidden; ++j) {
      if (c.z1[static_cast<std::size_t>(j)] <= 0.0) continue;
      double dh = dz2[0] * model.w2(0, j) + dz2[1] * model.w2(1, j);
      g.b1[static_cast<std::size_t>(j)] += dh;
      for (int d = 0; d < input; ++d) {
        g.w1(j, d) += dh * c.x[static_cast<std::size_t>(d)];
      }
    }
  }
  return g;
}

BalancedSampler::BalancedSampler(std::span<const RelationSample> samples, int minibatch)
    : minibatch_(minibatch) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (samples[i].label == 1 ? friend_idx_ : enemy_idx_).push_back(static_cast<int>(i));
  }
  if (friend_idx_.empty() || enemy_idx_.empty()) {
    throw TrainingError("balanced minibatches need both classes in the training set");
  }
}

std::vector<int> BalancedSampler::next(Rng& rng) const {
  std::vector<int> batch;
  batch.reserve(static_cast<std::size_t>(minibatch_));
  const int half = minibatch_ / 2;
  for (int i = 0; i < half; ++i) {
    batch.push_back(enemy_idx_[rng.below(enemy_idx_.size())]);
  }
  for (int i = 0; i < half; ++i) {
    batch.push_back(friend_idx_[rng.below(friend_idx_.size())]);
  }
  return batch;
}

MlpModel train_mlp(std::span<const RelationSample> samples, const TrainConfig& config,
                   PredictorSet predictors) {
  config.validate();
  if (samples.empty()) throw EmptyInputError("train_mlp on empty sample set");

  MlpModel model;
  model.predictors = predictors;
  model.scaler = FeatureScaler::fit(samples);
  const int input = static_cast<int>(samples.front().features.size());
  const int hidden = config.hidden_units;

  Rng rng(config.seed);
  auto init = [&rng](Matrix& m, std::vector<double>& b, int fan_in) {
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : m.a) v = rng.uniform(-bound, bound);
    for (double& v : b) v = rng.uniform(-bound, bound);
  };
  model.w1 = Matrix(hidden, input);
  model.b1.assign(static_cast<std::size_t>(hidden), 0.0);
  init(model.w1, model.b1, input);
  model.w2 = Matrix(2, hidden);
  model.b2.assign(2, 0.0);
  init(model.w2, model.b2, hidden);

  BalancedSampler sampler(samples, config.minibatch);
  std::vector<RelationSample> batch(static_cast<std::size_t>(config.minibatch));

  double lr = config.lr0;
  for (int t = 0; t < config.steps; ++t) {
    std::array<double, 2> weights = {1.0, 1.0};
    if (config.dynamical) {
      weights = dynamical_weights(t, config.oscillation_amplitude, config.oscillation_period);
    }
    auto idx = sampler.next(rng);
    double weight_total = 0.0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      batch[i] = samples[static_cast<std::size_t>(idx[i])];
      weight_total += weights[static_cast<std::size_t>(batch[i].label)];
    }
    MlpGradient g = gradient(model, batch, weights);
    // Normalized by the batch's total class weight: with unit weights this
    // is the batch mean (the default lr of 0.1 diverges on a raw sum), and
    // under oscillating weights the step keeps a stable magnitude while the
    // class emphasis tilts.
    const double step_size = lr / weight_total;
    for (std::size_t i = 0; i < model.w1.a.size(); ++i) model.w1.a[i] -= step_size * g.w1.a[i];
    for (std::size_t i = 0; i < model.b1.size(); ++i) model.b1[i] -= step_size * g.b1[i];
    for (std::size_t i = 0; i < model.w2.a.size(); ++i) model.w2.a[i] -= step_size * g.w2.a[i];
    for (std::size_t i = 0; i < model.b2.size(); ++i) model.b2[i] -= step_size * g.b2[i];
    lr *= config.lr_decay;
  }
  return model;
}

std::array<double, 2> dynamical_weights(int step, double amplitude, int period) {
  if (step < 0) throw std::invalid_argument("dynamical_weights: step must be >= 0");
  double phase = std::sin(2.0 * kPi * static_cast<double>(step) / static_cast<double>(period));
  double w_enemy = 1.0 + amplitude * (1.0 + phase) / 2.0;
  double w_friend = 1.0 + amplitude * (1.0 - phase) / 2.0;
  return {w_enemy, w_friend};
}

std::vector<CurvePoint> probability_curve(const MlpModel& model, double lo, double hi,
                                          int n_points) {
  if (model.predictors != PredictorSet::InfluenceOnly) {
    throw ConfigError("probability_curve needs an influence_only model");
  }
  if (n_points < 2) throw std::invalid_argument("probability_curve: n_points must be >= 2");
  std::vector<CurvePoint> curve;
  curve.reserve(static_cast<std::size_t>(n_points));
  for (int i = 0; i < n_points; ++i) {
    double influence = lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
    auto q = forward_probs(model, std::array<double, 1>{influence});
    curve.push_back({influence, q[1], q[0]});
  }
  return curve;
}

std::vector<EnsembleCurvePoint> ensemble_probability_curve(std::span<const MlpModel> models,
                                                           double lo, double hi, int n_points) {
  if (models.empty()) throw EmptyInputError("ensemble_probability_curve with no models");
  std::vector<EnsembleCurvePoint> curve(static_cast<std::size_t>(n_points));
  std::vector<double> pf(models.size()), pe(models.size());
  for (int i = 0; i < n_points; ++i) {
    double influence = lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
    for (std::size_t m = 0; m < models.size(); ++m) {
      auto q = forward_probs(models[m], std::array<double, 1>{influence});
      pe[m] = q[0];
      pf[m] = q[1];
    }
    auto& pt = curve[static_cast<std::size_t>(i)];
    pt.influence = influence;
    pt.p_friend = mean_of(pf);
    pt.p_friend_sem = sem_of(pf);
    pt.p_enemy = mean_of(pe);
    pt.p_enemy_sem = sem_of(pe);
  }
  return curve;
}

Matrix probability_surface(const MlpModel& model, std::span<const double> grid) {
  if (model.predictors != PredictorSet::ProsocialityOnly) {
    throw ConfigError("probability_surface needs a prosociality_only model");
  }
  Matrix surface(static_cast<int>(grid.size()), static_cast<int>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      auto q = forward_probs(model, std::array<double, 2>{grid[i], grid[j]});
      surface(static_cast<int>(i), static_cast<int>(j)) = q[1];
    }
  }
  return surface;
}

Matrix ensemble_probability_surface(std::span<const MlpModel> models,
                                    std::span<const double> grid) {
  if (models.empty()) throw EmptyInputError("ensemble_probability_surface with no models");
  Matrix mean(static_cast<int>(grid.size()), static_cast<int>(grid.size()));
  for (const auto& model : models) {
    Matrix s = probability_surface(model, grid);
    for (std::size_t i = 0; i < s.a.size(); ++i) mean.a[i] += s.a[i];
  }
  for (double& v : mean.a) v /= static_cast<double>(models.size());
  return mean;
}

namespace {

void write_block(std::ostream& out, const char* name, std::span<const double> values) {
  out << name;
  for (double v : values) out << ' ' << csv::format_double(v);
  out << '\n';
}

std::vector<double> read_block(std::istream& in, const std::string& expected,
                               std::size_t count) {
  std::string name;
  in >> name;
  if (name != expected) throw ParseError("mlp file: expected block '" + expected + "'");
  std::vector<double> values(count);
  for (double& v : values) {
    if (!(in >> v)) throw ParseError("mlp file: truncated block '" + expected + "'");
  }
  return values;
}

}  // namespace

void save_mlp(std::ostream& out, const MlpModel& model) {
  out << "socnet-mlp 1\n";
  out << "predictors " << predictor_set_name(model.predictors) << '\n';
  out << "dims " << model.input_dim() << ' ' << model.hidden_dim() << " 2\n";
  write_block(out, "scaler_mean", model.scaler.mean());
  write_block(out, "scaler_std", model.scaler.stddev());
  write_block(out, "w1", model.w1.a);
  write_block(out, "b1", model.b1);
  write_block(out, "w2", model.w2.a);
  write_block(out, "b2", model.b2);
}

MlpModel load_mlp(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "socnet-mlp" || version != 1) throw ParseError("not a socnet-mlp v1 file");
  std::string key, predictors;
  in >> key >> predictors;
  if (key != "predictors") throw ParseError("mlp file: missing predictors");
  int input = 0, hidden = 0, outputs = 0;
  in >> key >> input >> hidden >> outputs;
  if (key != "dims" || outputs != 2 || input < 1 || hidden < 1) {
    throw ParseError("mlp file: bad dims");
  }
  MlpModel model;
  model.predictors = parse_predictor_set(predictors);
  auto mean = read_block(in, "scaler_mean", static_cast<std::size_t>(input));
  auto stddev = read_block(in, "scaler_std", static_cast<std::size_t>(input));
  model.scaler = FeatureScaler::from_moments(std::move(mean), std::move(stddev));
  model.w1 = Matrix(hidden, input);
  model.w1.a = read_block(in, "w1", model.w1.a.size());
  model.b1 = read_block(in, "b1", static_cast<std::size_t>(hidden));
  model.w2 = Matrix(2, hidden);
  model.w2.a = read_block(in, "w2", model.w2.a.size());
  model.b2 = read_block(in, "b2", 2);
  return model;
}

}  // namespace socnet
