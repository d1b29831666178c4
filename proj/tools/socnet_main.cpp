// socnet: batch front door for the signed-network link-prediction toolkit.
// Every subcommand writes its CSV artifacts plus a machine-readable
// manifest.json; `socnet rerun manifest.json` reproduces the artifacts
// byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "socnet/csv.hpp"
#include "socnet/dataset.hpp"
#include "socnet/embedding.hpp"
#include "socnet/eval.hpp"
#include "socnet/global.hpp"
#include "socnet/graph.hpp"
#include "socnet/mlp.hpp"
#include "socnet/pipeline.hpp"
#include "socnet/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace socnet;

namespace {

constexpr const char* kToolVersion = "1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitRuntime = 4;

std::string default_out_dir() {
  const char* env = std::getenv("SOCNET_OUT");
  return env && *env ? env : "out";
}

std::ofstream open_artifact(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write artifact '" + (dir / name).string() + "'");
  return out;
}

void write_manifest(const fs::path& dir, const std::string& command, const json& options) {
  json manifest;
  manifest["tool"] = "socnet";
  manifest["version"] = kToolVersion;
  manifest["command"] = command;
  manifest["options"] = options;
  auto out = open_artifact(dir, "manifest.json");
  out << manifest.dump(2) << '\n';
}

ClassScheme scheme_by_name(const std::string& name) {
  if (name == "strict") return ClassScheme::strict_friends();
  if (name == "broad") return ClassScheme::broad_friends();
  throw ConfigError("unknown class scheme '" + name + "' (expected strict or broad)");
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  int schools = 1;
  int courses = 3;
  int students = 85;
  double degree = 18.0;
  double nucleation = 0.45;
  double noise = 0.015;
  bool corpus = false;
  int planted = 0;  // > 0: emit a planted-threshold fixture of this size
  double theta = 5.0;
  double eta = 0.05;
  double density = 0.3;
  std::uint64_t seed = 1;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SimulateOptions, schools, courses, students, degree,
                                   nucleation, noise, corpus, planted, theta, eta, density, seed)

void run_simulate(const SimulateOptions& opt, const fs::path& dir) {
  if (opt.planted > 0) {
    PlantedNetwork net = planted_threshold_network(opt.planted, opt.theta, opt.eta, opt.seed,
                                                   opt.density);
    auto nodes = open_artifact(dir, "nodes.csv");
    write_nodes_csv(nodes, net.graph);
    auto edges = open_artifact(dir, "edges.csv");
    write_edges_csv(edges, net.graph);
    auto labels = open_artifact(dir, "planted_labels.csv");
    write_planted_labels_csv(labels, net);
    return;
  }
  SynthConfig cfg;
  cfg.n_schools = opt.schools;
  cfg.courses_per_school = opt.courses;
  cfg.students_per_course = opt.students;
  cfg.target_mean_out_degree = opt.degree;
  cfg.nucleation_fraction = opt.nucleation;
  cfg.noise_flip_rate = opt.noise;
  cfg.seed = opt.seed;
  SignedDigraph g = opt.corpus ? generate_corpus(cfg) : generate(cfg);
  auto nodes = open_artifact(dir, "nodes.csv");
  write_nodes_csv(nodes, g);
  auto edges = open_artifact(dir, "edges.csv");
  write_edges_csv(edges, g);
}

// ---------------------------------------------------------------- stats

struct StatsOptions {
  std::string nodes;
  std::string edges;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(StatsOptions, nodes, edges)

void run_stats(const StatsOptions& opt, const fs::path& dir) {
  auto loaded = load_network_files(opt.nodes, opt.edges);
  const auto& g = loaded.graph;

  {
    auto out = open_artifact(dir, "load_report.csv");
    csv::write_row(out, "kept_nodes", "kept_edges", "dropped_nodes", "dropped_edges");
    csv::write_row(out, loaded.report.kept_nodes, static_cast<long long>(loaded.report.kept_edges),
                   static_cast<long long>(loaded.report.dropped_nodes.size()),
                   static_cast<long long>(loaded.report.dropped_edges));
    for (const auto& id : loaded.report.dropped_nodes) csv::write_row(out, "dropped", id);
  }
  {
    auto out = open_artifact(dir, "relation_types.csv");
    csv::write_row(out, "weight", "fraction");
    for (const auto& [w, frac] : relation_type_distribution(g)) csv::write_row(out, w, frac);
  }
  {
    auto out = open_artifact(dir, "two_path_histogram.csv");
    csv::write_row(out, "two_paths", "fraction");
    for (const auto& [count, frac] : two_path_histogram(g)) csv::write_row(out, count, frac);
  }
  {
    auto out = open_artifact(dir, "prosociality.csv");
    csv::write_row(out, "level", "fraction");
    auto dist = prosociality_distribution(g);
    for (int level = 0; level < 4; ++level) {
      csv::write_row(out, kProsocialityLevels[static_cast<std::size_t>(level)],
                     dist[static_cast<std::size_t>(level)]);
    }
  }
  {
    auto out = open_artifact(dir, "nominations.csv");
    csv::write_row(out, "sign", "direction", "level", "mean", "sem", "students");
    for (bool positive : {true, false}) {
      for (bool outgoing : {true, false}) {
        auto stats = mean_nominations_by_prosociality(g, positive, outgoing);
        for (int level = 0; level < 4; ++level) {
          csv::write_row(out, positive ? "friend" : "enemy", outgoing ? "out" : "in",
                         kProsocialityLevels[static_cast<std::size_t>(level)],
                         stats.mean[static_cast<std::size_t>(level)],
                         stats.sem[static_cast<std::size_t>(level)],
                         stats.students[static_cast<std::size_t>(level)]);
        }
      }
    }
  }
}

// ---------------------------------------------------------------- influence

struct InfluenceOptions {
  std::string nodes;
  std::string edges;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InfluenceOptions, nodes, edges)

void run_influence(const InfluenceOptions& opt, const fs::path& dir) {
  auto loaded = load_network_files(opt.nodes, opt.edges);
  auto out = open_artifact(dir, "influence.csv");
  csv::write_row(out, "src", "dst", "weight", "influence", "two_paths");
  for (const auto& e : influence_matrix(loaded.graph)) {
    csv::write_row(out, loaded.graph.attributes(e.src).student_id,
                   loaded.graph.attributes(e.dst).student_id, e.weight, e.influence, e.two_paths);
  }
}

// ---------------------------------------------------------------- train-local

struct TrainLocalOptions {
  std::string nodes;
  std::string edges;
  std::string labels;  // optional sidecar overriding sample labels (planted fixtures)
  std::string predictors = "influence_only";
  std::string scheme = "strict";
  bool isolated = false;  // isolated relationships: k-fold CV + dynamical loss
  int seeds = 10;
  int folds = 10;
  int steps = 0;  // 0 -> 200 standard / 1000 dynamical
  double test_fraction = 0.2;
  bool save_models = false;
  bool dump_samples = false;
  std::uint64_t seed = 1;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrainLocalOptions, nodes, edges, labels, predictors, scheme,
                                   isolated, seeds, folds, steps, test_fraction, save_models,
                                   dump_samples, seed)

// Sidecar label table (src, dst -> label); used for planted fixtures where
// the supervised signal is separate from the declared weights.
std::map<std::pair<std::string, std::string>, int> read_label_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open labels '" + path + "'");
  auto rows = csv::read_rows(in);
  if (rows.empty()) throw ParseError("labels CSV: empty file");
  const auto& header = rows.front().fields;
  int label_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "label") label_col = static_cast<int>(c);
  }
  if (header.size() < 2 || header[0] != "src" || header[1] != "dst" || label_col < 0) {
    throw ParseError("labels CSV: expected src,dst,...,label columns");
  }
  std::map<std::pair<std::string, std::string>, int> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (static_cast<int>(f.size()) <= label_col) {
      throw ParseError("labels CSV row " + std::to_string(rows[r].line) + ": short row");
    }
    labels[{f[0], f[1]}] = f[static_cast<std::size_t>(label_col)] == "1" ? 1 : 0;
  }
  return labels;
}

void run_train_local(const TrainLocalOptions& opt, const fs::path& dir) {
  auto loaded = load_network_files(opt.nodes, opt.edges);
  PredictorSet predictors = parse_predictor_set(opt.predictors);
  if (predictors == PredictorSet::EmbeddingPair) {
    throw ConfigError("train-local covers the local predictor sets; use train-global");
  }
  // with a label sidecar every declared edge is a sample, so classify under
  // the broad scheme and then override
  ClassScheme scheme = opt.labels.empty() ? scheme_by_name(opt.scheme)
                                          : ClassScheme::broad_friends();
  auto samples = build_samples(loaded.graph, scheme, predictors);
  if (!opt.labels.empty()) {
    auto sidecar = read_label_sidecar(opt.labels);
    for (auto& s : samples) {
      auto it = sidecar.find({s.src, s.dst});
      if (it == sidecar.end()) {
        throw ValidationError("no sidecar label for edge " + s.src + " -> " + s.dst);
      }
      s.label = it->second;
    }
  }
  auto split = split_by_two_paths(samples);
  if (opt.dump_samples) {
    auto out = open_artifact(dir, "samples.csv");
    write_samples_csv(out, samples);
  }

  std::vector<EvalReport> reports;
  if (opt.isolated) {
    TrainConfig train;
    train.dynamical = true;
    train.steps = opt.steps > 0 ? opt.steps : 1000;
    auto cv = isolated_cross_validation(split.isolated, opt.folds, predictors, train, opt.seed);
    reports = cv.folds;
    auto out = open_artifact(dir, "summary.csv");
    csv::write_row(out, "mean_bacc", "sem_bacc", "degenerate_folds");
    csv::write_row(out, cv.mean_bacc, cv.sem_bacc, cv.degenerate_folds);
  } else {
    LocalEnsembleConfig cfg;
    cfg.predictors = predictors;
    cfg.n_seeds = opt.seeds;
    cfg.test_fraction = opt.test_fraction;
    if (opt.steps > 0) cfg.train.steps = opt.steps;
    cfg.seed = opt.seed;
    auto result = local_ensemble(split.connected, cfg);
    reports = result.reports;
    auto out = open_artifact(dir, "summary.csv");
    csv::write_row(out, "mean_bacc", "sem_bacc", "degenerate_folds");
    csv::write_row(out, result.mean_bacc, result.sem_bacc, 0);
    if (opt.save_models) {
      for (std::size_t m = 0; m < result.models.size(); ++m) {
        auto model_out = open_artifact(dir, "model_" + std::to_string(m) + ".mlp");
        save_mlp(model_out, result.models[m]);
      }
    }
  }
  auto out = open_artifact(dir, "reports.csv");
  write_reports_csv(out, reports);
}

// ---------------------------------------------------------------- curves

struct CurvesOptions {
  std::string nodes;
  std::string edges;
  std::string scheme = "strict";
  int seeds = 10;
  double lo = -20.0;
  double hi = 40.0;
  int points = 121;
  double test_fraction = 0.2;
  std::uint64_t seed = 1;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CurvesOptions, nodes, edges, scheme, seeds, lo, hi, points,
                                   test_fraction, seed)

void run_curves(const CurvesOptions& opt, const fs::path& dir) {
  auto loaded = load_network_files(opt.nodes, opt.edges);
  ClassScheme scheme = scheme_by_name(opt.scheme);

  // probability of friendship as a function of the triadic influence
  {
    auto samples = build_samples(loaded.graph, scheme, PredictorSet::InfluenceOnly);
    auto connected = split_by_two_paths(samples).connected;
    LocalEnsembleConfig cfg;
    cfg.predictors = PredictorSet::InfluenceOnly;
    cfg.n_seeds = opt.seeds;
    cfg.test_fraction = opt.test_fraction;
    cfg.seed = opt.seed;
    auto ensemble = local_ensemble(connected, cfg);
    auto curve = ensemble_probability_curve(ensemble.models, opt.lo, opt.hi, opt.points);
    auto out = open_artifact(dir, "curve.csv");
    csv::write_row(out, "influence", "p_friend", "p_friend_sem", "p_enemy", "p_enemy_sem");
    for (const auto& pt : curve) {
      csv::write_row(out, pt.influence, pt.p_friend, pt.p_friend_sem, pt.p_enemy, pt.p_enemy_sem);
    }
  }
  // probability surface over the prosociality grid
  {
    auto samples = build_samples(loaded.graph, scheme, PredictorSet::ProsocialityOnly);
    auto connected = split_by_two_paths(samples).connected;
    LocalEnsembleConfig cfg;
    cfg.predictors = PredictorSet::ProsocialityOnly;
    cfg.n_seeds = opt.seeds;
    cfg.test_fraction = opt.test_fraction;
    cfg.seed = derive_seed(opt.seed, 2);
    auto ensemble = local_ensemble(connected, cfg);
    std::vector<double> grid(kProsocialityLevels.begin(), kProsocialityLevels.end());
    Matrix surface = ensemble_probability_surface(ensemble.models, grid);
    auto out = open_artifact(dir, "surface.csv");
    csv::write_row(out, "p_nominator", "p_nominee", "p_friend");
    for (int i = 0; i < surface.rows; ++i) {
      for (int j = 0; j < surface.cols; ++j) {
        csv::write_row(out, grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)],
                       surface(i, j));
      }
    }
  }
}

// ---------------------------------------------------------------- embed

struct EmbedOptions {
  std::string nodes;
  std::string edges;
  double p = 1.0;
  double q = 4.0;
  int walks_per_node = 420;
  int walk_length = 30;
  int dimension = 128;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  bool dump_walks = false;
  std::uint64_t seed = 1;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EmbedOptions, nodes, edges, p, q, walks_per_node, walk_length,
                                   dimension, window, negatives, epochs, dump_walks, seed)

WalkConfig walk_config_from(const EmbedOptions& opt) {
  WalkConfig cfg;
  cfg.p = opt.p;
  cfg.q = opt.q;
  cfg.walks_per_node = opt.walks_per_node;
  cfg.walk_length = opt.walk_length;
  cfg.dimension = opt.dimension;
  cfg.window = opt.window;
  cfg.negatives = opt.negatives;
  cfg.epochs = opt.epochs;
  cfg.seed = opt.seed;
  return cfg;
}

void run_embed(const EmbedOptions& opt, const fs::path& dir) {
  auto loaded = load_network_files(opt.nodes, opt.edges);
  WalkConfig cfg = walk_config_from(opt);
  UndirectedView view(loaded.graph);
  WalkSet walks = biased_walks(view, cfg);

  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(loaded.graph.node_count()));
  for (int v = 0; v < loaded.graph.node_count(); ++v) {
    ids.push_back(loaded.graph.attributes(v).student_id);
  }
  if (opt.dump_walks) {
    auto out = open_artifact(dir, "walks.txt");
    write_walks(out, walks, ids);
  }
  {
    auto stats = walk_locality(walks, view);
    auto out = open_artifact(dir, "locality.csv");
    csv::write_row(out, "distance", "fraction");
    for (const auto& [d, frac] : stats.distribution) csv::write_row(out, d, frac);
    csv::write_row(out, "mean", stats.mean);
    csv::write_row(out, "stddev", stats.stddev);
  }
  EmbeddingTable table = train_skipgram(walks, cfg, std::move(ids));
  {
    auto out = open_artifact(dir, "embeddings.csv");
    write_embeddings_csv(out, table);
  }
  {
    auto out = open_artifact(dir, "embeddings.bin");
    write_embeddings_binary(out, table);
  }
}

// ---------------------------------------------------------------- train-global

struct TrainGlobalOptions {
  std::string nodes;
  std::string edges;
  std::string embeddings;  // embeddings.bin; computed on the fly when empty
  std::string model = "deepnet";
  std::string treatment = "I";
  std::string merge = "hadamard";
  std::string scheme = "broad";
  int runs = 0;  // 0 -> 390 for treatment I, 10 per course for treatment II
  double test_fraction = 0.2;
  int smote_neighbors = 5;
  int epochs = 50;
  int n_trees = 100;
  int histogram_bins = 40;
  // embedding configuration when computed here
  int dimension = 128;
  int walks_per_node = 420;
  int walk_length = 30;
  std::uint64_t seed = 1;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrainGlobalOptions, nodes, edges, embeddings, model, treatment,
                                   merge, scheme, runs, test_fraction, smote_neighbors, epochs,
                                   n_trees, histogram_bins, dimension, walks_per_node, walk_length,
                                   seed)

void run_train_global(const TrainGlobalOptions& opt, const fs::path& dir) {
  auto loaded = load_network_files(opt.nodes, opt.edges);

  EmbeddingTable table;
  if (!opt.embeddings.empty()) {
    std::ifstream in(opt.embeddings, std::ios::binary);
    if (!in) throw NotFoundError("cannot open embeddings '" + opt.embeddings + "'");
    table = read_embeddings_binary(in);
  } else {
    WalkConfig cfg;
    cfg.dimension = opt.dimension;
    cfg.walks_per_node = opt.walks_per_node;
    cfg.walk_length = opt.walk_length;
    cfg.seed = derive_seed(opt.seed, 0xE4BEDULL);
    table = node_embeddings(loaded.graph, cfg);
  }

  auto samples = build_samples(loaded.graph, scheme_by_name(opt.scheme),
                               PredictorSet::EmbeddingPair, &table, parse_merge(opt.merge));

  GlobalRunConfig cfg;
  cfg.model = opt.model == "forest" ? GlobalModelKind::Forest : GlobalModelKind::DeepNet;
  if (opt.model != "forest" && opt.model != "deepnet") {
    throw ConfigError("unknown model '" + opt.model + "' (expected deepnet or forest)");
  }
  cfg.net.epochs = opt.epochs;
  cfg.forest.n_trees = opt.n_trees;
  cfg.smote_neighbors = opt.smote_neighbors;
  cfg.test_fraction = opt.test_fraction;
  cfg.seed = opt.seed;

  std::vector<EvalReport> reports;
  if (opt.treatment == "I") {
    cfg.runs = opt.runs > 0 ? opt.runs : 390;
    reports = treatment_random_split(samples, cfg);
  } else if (opt.treatment == "II") {
    cfg.runs = opt.runs > 0 ? opt.runs : 10;
    reports = treatment_holdout_course(samples, cfg);
  } else {
    throw ConfigError("treatment must be I or II");
  }

  {
    auto out = open_artifact(dir, "reports.csv");
    write_reports_csv(out, reports);
  }
  {
    auto out = open_artifact(dir, "histogram.csv");
    write_histogram_csv(out, bacc_histogram(reports, opt.histogram_bins));
  }
}

// ---------------------------------------------------------------- rerun

int dispatch(const std::string& command, const json& options, const fs::path& dir);

int run_rerun(const std::string& manifest_path, std::string out_override) {
  std::ifstream in(manifest_path);
  if (!in) throw NotFoundError("cannot open manifest '" + manifest_path + "'");
  json manifest = json::parse(in);
  if (manifest.value("tool", "") != "socnet") throw ParseError("not a socnet manifest");
  std::string command = manifest.at("command").get<std::string>();
  fs::path dir = out_override.empty()
                     ? fs::path(manifest_path).parent_path() / "rerun"
                     : fs::path(out_override);
  return dispatch(command, manifest.at("options"), dir);
}

int dispatch(const std::string& command, const json& options, const fs::path& dir) {
  if (command == "simulate") {
    run_simulate(options.get<SimulateOptions>(), dir);
  } else if (command == "stats") {
    run_stats(options.get<StatsOptions>(), dir);
  } else if (command == "influence") {
    run_influence(options.get<InfluenceOptions>(), dir);
  } else if (command == "train-local") {
    run_train_local(options.get<TrainLocalOptions>(), dir);
  } else if (command == "curves") {
    run_curves(options.get<CurvesOptions>(), dir);
  } else if (command == "embed") {
    run_embed(options.get<EmbedOptions>(), dir);
  } else if (command == "train-global") {
    run_train_global(options.get<TrainGlobalOptions>(), dir);
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  write_manifest(dir, command, options);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"socnet: signed social network analysis, link prediction and simulation"};
  app.set_config("--config", "", "read options from a config file");
  app.require_subcommand(1);

  std::string out_dir = default_out_dir();
  app.add_option("--out", out_dir, "output directory for artifacts")->capture_default_str();

  SimulateOptions sim;
  auto* sim_cmd = app.add_subcommand("simulate", "generate synthetic schools or fixtures");
  sim_cmd->add_option("--schools", sim.schools);
  sim_cmd->add_option("--courses", sim.courses);
  sim_cmd->add_option("--students", sim.students, "students per course");
  sim_cmd->add_option("--degree", sim.degree, "target mean out-degree");
  sim_cmd->add_option("--nucleation", sim.nucleation, "trait-signed share of edges");
  sim_cmd->add_option("--noise", sim.noise, "sign flip rate");
  sim_cmd->add_flag("--corpus", sim.corpus, "vary parameters per school");
  sim_cmd->add_option("--planted", sim.planted, "emit a planted-threshold fixture of N nodes");
  sim_cmd->add_option("--theta", sim.theta, "planted threshold");
  sim_cmd->add_option("--eta", sim.eta, "planted label flip rate");
  sim_cmd->add_option("--density", sim.density, "planted edge density");
  sim_cmd->add_option("--seed", sim.seed);

  StatsOptions stats;
  auto* stats_cmd = app.add_subcommand("stats", "descriptive statistics tables");
  stats_cmd->add_option("--nodes", stats.nodes)->required();
  stats_cmd->add_option("--edges", stats.edges)->required();

  InfluenceOptions infl;
  auto* infl_cmd = app.add_subcommand("influence", "per-edge triadic influence export");
  infl_cmd->add_option("--nodes", infl.nodes)->required();
  infl_cmd->add_option("--edges", infl.edges)->required();

  TrainLocalOptions local;
  auto* local_cmd = app.add_subcommand("train-local", "local classifier ensembles (accuracy bars)");
  local_cmd->add_option("--nodes", local.nodes)->required();
  local_cmd->add_option("--edges", local.edges)->required();
  local_cmd->add_option("--labels", local.labels, "label sidecar CSV (planted fixtures)");
  local_cmd->add_option("--predictors", local.predictors,
                        "influence_and_traits|influence_only|traits_only|prosociality_only");
  local_cmd->add_option("--scheme", local.scheme, "strict|broad");
  local_cmd->add_flag("--isolated", local.isolated,
                      "isolated relationships: k-fold CV with the dynamical loss");
  local_cmd->add_option("--seeds", local.seeds, "ensemble size");
  local_cmd->add_option("--folds", local.folds, "cross-validation folds");
  local_cmd->add_option("--steps", local.steps, "training steps (0 = schedule default)");
  local_cmd->add_option("--test-fraction", local.test_fraction);
  local_cmd->add_flag("--save-models", local.save_models);
  local_cmd->add_flag("--dump-samples", local.dump_samples, "export the assembled sample table");
  local_cmd->add_option("--seed", local.seed);

  CurvesOptions curves;
  auto* curves_cmd = app.add_subcommand("curves", "probability curve and surface exports");
  curves_cmd->add_option("--nodes", curves.nodes)->required();
  curves_cmd->add_option("--edges", curves.edges)->required();
  curves_cmd->add_option("--scheme", curves.scheme);
  curves_cmd->add_option("--seeds", curves.seeds);
  curves_cmd->add_option("--lo", curves.lo);
  curves_cmd->add_option("--hi", curves.hi);
  curves_cmd->add_option("--points", curves.points);
  curves_cmd->add_option("--seed", curves.seed);

  EmbedOptions embed;
  auto* embed_cmd = app.add_subcommand("embed", "biased walks and structural embeddings");
  embed_cmd->add_option("--nodes", embed.nodes)->required();
  embed_cmd->add_option("--edges", embed.edges)->required();
  embed_cmd->add_option("-p", embed.p, "return parameter");
  embed_cmd->add_option("-q", embed.q, "in-out parameter");
  embed_cmd->add_option("--walks-per-node", embed.walks_per_node);
  embed_cmd->add_option("--walk-length", embed.walk_length);
  embed_cmd->add_option("--dimension", embed.dimension);
  embed_cmd->add_option("--window", embed.window);
  embed_cmd->add_option("--negatives", embed.negatives);
  embed_cmd->add_option("--epochs", embed.epochs);
  embed_cmd->add_flag("--dump-walks", embed.dump_walks);
  embed_cmd->add_option("--seed", embed.seed);

  TrainGlobalOptions global;
  auto* global_cmd = app.add_subcommand("train-global", "embedding classifiers, treatments I/II");
  global_cmd->add_option("--nodes", global.nodes)->required();
  global_cmd->add_option("--edges", global.edges)->required();
  global_cmd->add_option("--embeddings", global.embeddings, "embeddings.bin (computed if absent)");
  global_cmd->add_option("--model", global.model, "deepnet|forest");
  global_cmd->add_option("--treatment", global.treatment, "I (random split) | II (held-out course)");
  global_cmd->add_option("--merge", global.merge,
                         "hadamard|average|abs_diff|squared_diff|concat");
  global_cmd->add_option("--scheme", global.scheme);
  global_cmd->add_option("--runs", global.runs, "runs (I: total, II: per course); 0 = default");
  global_cmd->add_option("--test-fraction", global.test_fraction);
  global_cmd->add_option("--smote-neighbors", global.smote_neighbors);
  global_cmd->add_option("--epochs", global.epochs, "deep net epochs");
  global_cmd->add_option("--trees", global.n_trees, "forest size");
  global_cmd->add_option("--bins", global.histogram_bins, "histogram bins");
  global_cmd->add_option("--dimension", global.dimension);
  global_cmd->add_option("--walks-per-node", global.walks_per_node);
  global_cmd->add_option("--walk-length", global.walk_length);
  global_cmd->add_option("--seed", global.seed);

  std::string manifest_path;
  std::string rerun_out;
  auto* rerun_cmd = app.add_subcommand("rerun", "re-execute a run from its manifest");
  rerun_cmd->add_option("manifest", manifest_path, "manifest.json of a previous run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim_cmd->parsed()) return dispatch("simulate", json(sim), out_dir);
    if (stats_cmd->parsed()) return dispatch("stats", json(stats), out_dir);
    if (infl_cmd->parsed()) return dispatch("influence", json(infl), out_dir);
    if (local_cmd->parsed()) return dispatch("train-local", json(local), out_dir);
    if (curves_cmd->parsed()) return dispatch("curves", json(curves), out_dir);
    if (embed_cmd->parsed()) return dispatch("embed", json(embed), out_dir);
    if (global_cmd->parsed()) return dispatch("train-global", json(global), out_dir);
    if (rerun_cmd->parsed()) {
      std::string out = app.count("--out") > 0 ? out_dir : "";
      return run_rerun(manifest_path, out);
    }
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const LookupError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NotFoundError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const EmptyInputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
}
