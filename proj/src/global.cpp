#include "socnet/global.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>

#include <json.hpp>

#include "socnet/csv.hpp"
#include "socnet/rand.hpp"

namespace socnet {

namespace {

constexpr double kProbClamp = 1e-12;

struct DeepForwardCache {
  std::vector<std::vector<double>> z;  // pre-activations per layer
  std::vector<std::vector<double>> a;  // a[0] = scaled input, a[l+1] = activation of layer l
  double prob = 0.0;
};

void deep_forward_into(const DeepNetModel& m, std::span<const double> features,
                       DeepForwardCache& c) {
  if (static_cast<int>(features.size()) != m.input_dim()) {
    throw ShapeError("deep net got " + std::to_string(features.size()) + " features, expected " +
                     std::to_string(m.input_dim()));
  }
  const int layers = m.layer_count();
  c.z.resize(static_cast<std::size_t>(layers));
  c.a.resize(static_cast<std::size_t>(layers) + 1);
  c.a[0] = m.scaler.transform(features);
  for (int l = 0; l < layers; ++l) {
    affine(m.w[static_cast<std::size_t>(l)], c.a[static_cast<std::size_t>(l)],
           m.b[static_cast<std::size_t>(l)], c.z[static_cast<std::size_t>(l)]);
    auto& out = c.a[static_cast<std::size_t>(l) + 1];
    out = c.z[static_cast<std::size_t>(l)];
    if (l + 1 < layers) {
      for (double& v : out) v = relu(v);
    } else {
      for (double& v : out) v = sigmoid(v);
    }
  }
  c.prob = c.a.back()[0];
}

}  // namespace

double forward_deep(const DeepNetModel& model, std::span<const double> features) {
  DeepForwardCache c;
  deep_forward_into(model, features, c);
  return c.prob;
}

int predict_deep(const DeepNetModel& model, std::span<const double> features) {
  return forward_deep(model, features) > 0.5 ? 1 : 0;
}

DeepGradient deep_gradient(const DeepNetModel& model, std::span<const RelationSample> batch) {
  if (batch.empty()) throw EmptyInputError("deep_gradient on empty batch");
  const int layers = model.layer_count();
  DeepGradient g;
  g.w.reserve(static_cast<std::size_t>(layers));
  g.b.reserve(static_cast<std::size_t>(layers));
  for (int l = 0; l < layers; ++l) {
    g.w.emplace_back(model.w[static_cast<std::size_t>(l)].rows,
                     model.w[static_cast<std::size_t>(l)].cols);
    g.b.emplace_back(model.b[static_cast<std::size_t>(l)].size(), 0.0);
  }

  DeepForwardCache c;
  for (const auto& sample : batch) {
    deep_forward_into(model, sample.features, c);
    // BCE on the sigmoid output: d/dz = a - y.
    std::vector<double> delta = {c.prob - static_cast<double>(sample.label)};
    for (int l = layers - 1; l >= 0; --l) {
      const Matrix& w = model.w[static_cast<std::size_t>(l)];
      auto& gw = g.w[static_cast<std::size_t>(l)];
      auto& gb = g.b[static_cast<std::size_t>(l)];
      const auto& in = c.a[static_cast<std::size_t>(l)];
      for (int i = 0; i < w.rows; ++i) {
        gb[static_cast<std::size_t>(i)] += delta[static_cast<std::size_t>(i)];
        for (int j = 0; j < w.cols; ++j) {
          gw(i, j) += delta[static_cast<std::size_t>(i)] * in[static_cast<std::size_t>(j)];
        }
      }
      if (l == 0) break;
      std::vector<double> prev(static_cast<std::size_t>(w.cols), 0.0);
      for (int j = 0; j < w.cols; ++j) {
        if (c.z[static_cast<std::size_t>(l) - 1][static_cast<std::size_t>(j)] <= 0.0) continue;
        double s = 0.0;
        for (int i = 0; i < w.rows; ++i) s += delta[static_cast<std::size_t>(i)] * w(i, j);
        prev[static_cast<std::size_t>(j)] = s;
      }
      delta = std::move(prev);
    }
  }
  return g;
}

DeepNetModel train_deep(std::span<const RelationSample> samples, const DeepNetConfig& config) {
  if (samples.empty()) throw EmptyInputError("train_deep on empty sample set");
  bool has_friend = false, has_enemy = false;
  for (const auto& s : samples) (s.label == 1 ? has_friend : has_enemy) = true;
  if (!has_friend || !has_enemy) {
    throw TrainingError("train_deep needs both classes in the training set");
  }
  if (config.minibatch < 1 || config.epochs < 1) throw ConfigError("bad deep net schedule");

  DeepNetModel model;
  model.scaler = FeatureScaler::fit(samples);
  const int input = static_cast<int>(samples.front().features.size());

  std::vector<int> sizes;
  sizes.push_back(input);
  for (int h : config.hidden) sizes.push_back(h);
  sizes.push_back(1);

  Rng rng(config.seed);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    int fan_in = sizes[l];
    int fan_out = sizes[l + 1];
    Matrix w(fan_out, fan_in);
    double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : w.a) v = rng.uniform(-bound, bound);
    std::vector<double> b(static_cast<std::size_t>(fan_out), 0.0);
    model.w.push_back(std::move(w));
    model.b.push_back(std::move(b));
  }

  std::vector<int> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  long long step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t at = 0; at < order.size(); at += static_cast<std::size_t>(config.minibatch)) {
      std::size_t hi = std::min(order.size(), at + static_cast<std::size_t>(config.minibatch));
      std::vector<RelationSample> mb;
      mb.reserve(hi - at);
      for (std::size_t i = at; i < hi; ++i) {
        mb.push_back(samples[static_cast<std::size_t>(order[i])]);
      }
      DeepGradient g = deep_gradient(model, mb);
      double lr = config.lr0 * std::pow(config.lr_decay, static_cast<double>(step));
      double scale = lr / static_cast<double>(mb.size());
      for (std::size_t l = 0; l < model.w.size(); ++l) {
        for (std::size_t i = 0; i < model.w[l].a.size(); ++i) {
          model.w[l].a[i] -= scale * g.w[l].a[i];
        }
        for (std::size_t i = 0; i < model.b[l].size(); ++i) {
          model.b[l][i] -= scale * g.b[l][i];
        }
      }
      ++step;
    }
  }
  return model;
}

void save_deepnet(std::ostream& out, const DeepNetModel& model) {
  out << "socnet-net 1\n";
  out << "layers " << model.layer_count() << '\n';
  out << "sizes " << model.input_dim();
  for (const auto& w : model.w) out << ' ' << w.rows;
  out << '\n';
  auto block = [&out](const std::string& name, std::span<const double> values) {
    out << name;
    for (double v : values) out << ' ' << csv::format_double(v);
    out << '\n';
  };
  block("scaler_mean", model.scaler.mean());
  block("scaler_std", model.scaler.stddev());
  for (int l = 0; l < model.layer_count(); ++l) {
    block("w" + std::to_string(l), model.w[static_cast<std::size_t>(l)].a);
    block("b" + std::to_string(l), model.b[static_cast<std::size_t>(l)]);
  }
}

DeepNetModel load_deepnet(std::istream& in) {
  std::string magic;
  int version = 0;
  in >> magic >> version;
  if (magic != "socnet-net" || version != 1) throw ParseError("not a socnet-net v1 file");
  std::string key;
  int layers = 0;
  in >> key >> layers;
  if (key != "layers" || layers < 1) throw ParseError("deep net file: bad layer count");
  in >> key;
  if (key != "sizes") throw ParseError("deep net file: missing sizes");
  std::vector<int> sizes(static_cast<std::size_t>(layers) + 1);
  for (int& s : sizes) {
    if (!(in >> s) || s < 1) throw ParseError("deep net file: bad sizes");
  }
  auto block = [&in](const std::string& expected, std::size_t count) {
    std::string name;
    in >> name;
    if (name != expected) throw ParseError("deep net file: expected block '" + expected + "'");
    std::vector<double> values(count);
    for (double& v : values) {
      if (!(in >> v)) throw ParseError("deep net file: truncated block '" + expected + "'");
    }
    return values;
  };
  DeepNetModel model;
  auto mean = block("scaler_mean", static_cast<std::size_t>(sizes[0]));
  auto stddev = block("scaler_std", static_cast<std::size_t>(sizes[0]));
  model.scaler = FeatureScaler::from_moments(std::move(mean), std::move(stddev));
  for (int l = 0; l < layers; ++l) {
    Matrix w(sizes[static_cast<std::size_t>(l) + 1], sizes[static_cast<std::size_t>(l)]);
    w.a = block("w" + std::to_string(l), w.a.size());
    model.w.push_back(std::move(w));
    model.b.push_back(block("b" + std::to_string(l),
                            static_cast<std::size_t>(sizes[static_cast<std::size_t>(l) + 1])));
  }
  return model;
}

namespace {

struct TreeBuilder {
  std::span<const RelationSample> samples;
  int max_depth;
  int features_per_split;
  int min_samples_leaf;
  int n_features;
  std::vector<TreeNode> nodes;

  static double gini(int n_enemy, int n_friend) {
    double n = static_cast<double>(n_enemy + n_friend);
    if (n == 0.0) return 0.0;
    double pe = n_enemy / n;
    double pf = n_friend / n;
    return 1.0 - pe * pe - pf * pf;
  }

  int majority(std::span<const int> idx) const {
    int n_friend = 0;
    for (int i : idx) n_friend += samples[static_cast<std::size_t>(i)].label;
    int n_enemy = static_cast<int>(idx.size()) - n_friend;
    return n_friend > n_enemy ? 1 : 0;  // tie -> enemy
  }

  int build(std::vector<int>& idx, int depth, Rng& rng) {
    int n_friend = 0;
    for (int i : idx) n_friend += samples[static_cast<std::size_t>(i)].label;
    int n_enemy = static_cast<int>(idx.size()) - n_friend;

    auto make_leaf = [&]() {
      TreeNode leaf;
      leaf.label = n_friend > n_enemy ? 1 : 0;
      nodes.push_back(leaf);
      return static_cast<int>(nodes.size()) - 1;
    };
    if (depth >= max_depth || n_friend == 0 || n_enemy == 0 ||
        static_cast<int>(idx.size()) < 2 * min_samples_leaf) {
      return make_leaf();
    }

    // Random feature subset, then the best Gini split among candidates.
    std::vector<int> features(static_cast<std::size_t>(n_features));
    std::iota(features.begin(), features.end(), 0);
    rng.shuffle(features);
    features.resize(static_cast<std::size_t>(std::min(features_per_split, n_features)));

    const double parent = gini(n_enemy, n_friend) * static_cast<double>(idx.size());
    double best_gain = 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;

    std::vector<std::pair<double, int>> values;
    for (int f : features) {
      values.clear();
      values.reserve(idx.size());
      for (int i : idx) {
        values.emplace_back(samples[static_cast<std::size_t>(i)].features[static_cast<std::size_t>(f)],
                            samples[static_cast<std::size_t>(i)].label);
      }
      std::sort(values.begin(), values.end());
      int left_friend = 0, left_enemy = 0;
      int right_friend = n_friend, right_enemy = n_enemy;
      for (std::size_t v = 0; v + 1 < values.size(); ++v) {
        if (values[v].second == 1) {
          ++left_friend;
          --right_friend;
        } else {
          ++left_enemy;
          --right_enemy;
        }
        if (values[v].first == values[v + 1].first) continue;
        int left_n = left_friend + left_enemy;
        int right_n = right_friend + right_enemy;
        if (left_n < min_samples_leaf || right_n < min_samples_leaf) continue;
        double weighted = gini(left_enemy, left_friend) * left_n +
                          gini(right_enemy, right_friend) * right_n;
        double gain = parent - weighted;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_threshold = 0.5 * (values[v].first + values[v + 1].first);
        }
      }
    }
    if (best_feature < 0) return make_leaf();

    std::vector<int> left_idx, right_idx;
    for (int i : idx) {
      double v = samples[static_cast<std::size_t>(i)].features[static_cast<std::size_t>(best_feature)];
      (v <= best_threshold ? left_idx : right_idx).push_back(i);
    }
    if (left_idx.empty() || right_idx.empty()) return make_leaf();

    int node_at = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[static_cast<std::size_t>(node_at)].feature = best_feature;
    nodes[static_cast<std::size_t>(node_at)].threshold = best_threshold;
    int left = build(left_idx, depth + 1, rng);
    int right = build(right_idx, depth + 1, rng);
    nodes[static_cast<std::size_t>(node_at)].left = left;
    nodes[static_cast<std::size_t>(node_at)].right = right;
    return node_at;
  }
};

int resolve_forest_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

int DecisionTree::predict(std::span<const double> features) const {
  int at = 0;
  while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
    const TreeNode& n = nodes[static_cast<std::size_t>(at)];
    at = features[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(at)].label;
}

int DecisionTree::depth() const {
  // Iterative depth over the node array.
  std::vector<std::pair<int, int>> stack = {{0, 0}};
  int deepest = 0;
  while (!stack.empty()) {
    auto [at, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    const TreeNode& n = nodes[static_cast<std::size_t>(at)];
    if (n.feature >= 0) {
      stack.push_back({n.left, d + 1});
      stack.push_back({n.right, d + 1});
    }
  }
  return deepest;
}

ForestModel train_forest(std::span<const RelationSample> samples, const ForestConfig& config) {
  if (samples.empty()) throw EmptyInputError("train_forest on empty sample set");
  bool has_friend = false, has_enemy = false;
  for (const auto& s : samples) (s.label == 1 ? has_friend : has_enemy) = true;
  if (!has_friend || !has_enemy) {
    throw TrainingError("train_forest needs both classes in the training set");
  }
  if (config.n_trees < 1 || config.max_depth < 1) throw ConfigError("bad forest configuration");

  const int n_features = static_cast<int>(samples.front().features.size());
  int per_split = config.features_per_split;
  if (per_split <= 0) {
    per_split = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(n_features))));
  }

  ForestModel model;
  model.max_depth = config.max_depth;
  model.trees.resize(static_cast<std::size_t>(config.n_trees));

  auto build_tree = [&](int t) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(t), 0x466f72ULL));
    std::vector<int> bootstrap(samples.size());
    for (auto& i : bootstrap) i = static_cast<int>(rng.below(samples.size()));
    TreeBuilder builder{samples, config.max_depth, per_split, config.min_samples_leaf,
                        n_features, {}};
    builder.build(bootstrap, 0, rng);
    model.trees[static_cast<std::size_t>(t)].nodes = std::move(builder.nodes);
  };

  const int n_threads = std::min(resolve_forest_threads(config.threads), config.n_trees);
  if (n_threads <= 1) {
    for (int t = 0; t < config.n_trees; ++t) build_tree(t);
  } else {
    std::vector<std::future<void>> futures;
    int chunk = (config.n_trees + n_threads - 1) / n_threads;
    for (int w = 0; w < n_threads; ++w) {
      int lo = w * chunk;
      int hi = std::min(config.n_trees, lo + chunk);
      if (lo >= hi) break;
      futures.push_back(std::async(std::launch::async, [&build_tree, lo, hi]() {
        for (int t = lo; t < hi; ++t) build_tree(t);
      }));
    }
    for (auto& f : futures) f.get();
  }
  return model;
}

ForestPrediction predict_forest(const ForestModel& model, std::span<const double> features) {
  if (model.trees.empty()) throw EmptyInputError("predict_forest with no trees");
  int friend_votes = 0;
  for (const auto& tree : model.trees) friend_votes += tree.predict(features);
  const int total = static_cast<int>(model.trees.size());
  ForestPrediction p;
  p.label = friend_votes * 2 > total ? 1 : 0;  // tie -> enemy
  int winner_votes = p.label == 1 ? friend_votes : total - friend_votes;
  p.vote_fraction = static_cast<double>(winner_votes) / static_cast<double>(total);
  return p;
}

void save_forest(std::ostream& out, const ForestModel& model) {
  nlohmann::json j;
  j["format"] = "socnet-forest";
  j["version"] = 1;
  j["max_depth"] = model.max_depth;
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({{"feature", n.feature},
                       {"threshold", n.threshold},
                       {"left", n.left},
                       {"right", n.right},
                       {"label", n.label}});
    }
    trees.push_back({{"nodes", nodes}});
  }
  j["trees"] = std::move(trees);
  out << j.dump(2) << '\n';
}

ForestModel load_forest(std::istream& in) {
  nlohmann::json j = nlohmann::json::parse(in);
  if (j.value("format", "") != "socnet-forest" || j.value("version", 0) != 1) {
    throw ParseError("not a socnet-forest v1 file");
  }
  ForestModel model;
  model.max_depth = j.at("max_depth").get<int>();
  for (const auto& tj : j.at("trees")) {
    DecisionTree tree;
    for (const auto& nj : tj.at("nodes")) {
      TreeNode n;
      n.feature = nj.at("feature").get<int>();
      n.threshold = nj.at("threshold").get<double>();
      n.left = nj.at("left").get<int>();
      n.right = nj.at("right").get<int>();
      n.label = nj.at("label").get<int>();
      tree.nodes.push_back(n);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

}  // namespace socnet
