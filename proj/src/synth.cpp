#include "socnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>

#include "socnet/csv.hpp"
#include "socnet/numeric.hpp"

namespace socnet {

namespace {

int draw_level(const std::array<double, 4>& weights, Rng& rng) {
  double total = weights[0] + weights[1] + weights[2] + weights[3];
  double x = rng.uniform() * total;
  double acc = 0.0;
  for (int i = 0; i < 4; ++i) {
    acc += weights[static_cast<std::size_t>(i)];
    if (x < acc) return i;
  }
  return 3;
}

struct CourseBlock {
  int first = 0;  // node index range [first, first + size)
  int size = 0;
};

std::string school_name(int s) { return "s" + std::to_string(s + 1); }

// Magnitude |1| or |2| for the drawn sign.
int draw_weight(bool is_friend, const SynthConfig& cfg, Rng& rng) {
  if (is_friend) {
    return rng.uniform() < cfg.friend_plus1_fraction ? 1 : 2;
  }
  return rng.uniform() < cfg.enemy_minus1_fraction ? -1 : -2;
}

std::vector<CourseBlock> course_blocks(const SignedDigraph& g) {
  std::vector<CourseBlock> blocks;
  int at = 0;
  while (at < g.node_count()) {
    const auto& a = g.attributes(at);
    int hi = at;
    while (hi < g.node_count() && g.attributes(hi).school_id == a.school_id &&
           g.attributes(hi).course == a.course) {
      ++hi;
    }
    blocks.push_back({at, hi - at});
    at = hi;
  }
  return blocks;
}

// Latent pods per course: the social circles inside which trait-driven
// relationships preferentially appear. Assortative in prosociality and fixed
// by the config seed, so every generation phase sees the same pods.
struct Pods {
  std::vector<std::vector<int>> groups;
  std::vector<std::pair<int, int>> range_by_block;  // [first, last) pod per course
  std::vector<double> activity_cum;                 // cumulative activity weights
};

Pods build_pods(const SignedDigraph& g, const std::vector<CourseBlock>& blocks,
                const SynthConfig& config) {
  Pods pods;
  Rng rng(derive_seed(config.seed, 0x506f6473ULL));
  const int pod = std::max(2, config.pod_size);
  for (const auto& block : blocks) {
    std::vector<int> members(static_cast<std::size_t>(block.size));
    for (int m = 0; m < block.size; ++m) members[static_cast<std::size_t>(m)] = block.first + m;
    rng.shuffle(members);
    std::stable_sort(members.begin(), members.end(), [&g](int a, int b) {
      return g.attributes(a).prosociality > g.attributes(b).prosociality;
    });
    int first_pod = static_cast<int>(pods.groups.size());
    std::size_t at = 0;
    while (at < members.size()) {
      // circle size scales with the prosociality of its members: prosocial
      // students sit in wide friendship circles, selfish ones in small knots
      std::size_t probe = std::min(members.size(), at + static_cast<std::size_t>(pod));
      double mean_p = 0.0;
      for (std::size_t m = at; m < probe; ++m) {
        mean_p += g.attributes(members[m]).prosociality;
      }
      mean_p /= static_cast<double>(probe - at);
      auto size = static_cast<std::size_t>(std::lround(pod * (0.35 + 0.65 * mean_p)));
      size = std::clamp<std::size_t>(size, 4, static_cast<std::size_t>(pod));
      std::size_t hi = std::min(members.size(), at + size);
      if (hi - at < 2) break;
      pods.groups.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(at),
                               members.begin() + static_cast<std::ptrdiff_t>(hi));
      at = hi;
    }
    pods.range_by_block.emplace_back(first_pod, static_cast<int>(pods.groups.size()));
  }
  // Activity weight per pod: proportional to the pod's ordered-pair count
  // (so per-pair rates are comparable across circle sizes), tilted toward
  // prosocial circles.
  pods.activity_cum.reserve(pods.groups.size());
  double acc = 0.0;
  for (const auto& group : pods.groups) {
    double mean_p = 0.0;
    for (int v : group) mean_p += g.attributes(v).prosociality;
    mean_p /= static_cast<double>(group.size());
    double pairs = static_cast<double>(group.size()) * (static_cast<double>(group.size()) - 1.0);
    acc += (config.pod_rate_floor + mean_p) * std::pow(pairs, config.pod_pair_exponent);
    pods.activity_cum.push_back(acc);
  }
  return pods;
}

// Pod index drawn proportionally to activity, restricted to one course.
int draw_pod(const Pods& pods, std::size_t block_idx, Rng& rng) {
  auto [lo, hi] = pods.range_by_block[block_idx];
  if (lo >= hi) return -1;
  double base = lo > 0 ? pods.activity_cum[static_cast<std::size_t>(lo) - 1] : 0.0;
  double total = pods.activity_cum[static_cast<std::size_t>(hi) - 1] - base;
  double x = base + rng.uniform() * total;
  int at = lo;
  while (at + 1 < hi && pods.activity_cum[static_cast<std::size_t>(at)] < x) ++at;
  return at;
}

struct PlacedEdge {
  int src = -1;
  int dst = -1;
  bool is_friend = false;
};

// One trait-signed relationship: the nucleation mechanism. Pairs concentrate
// inside pods; the sign follows the prosociality logistic.
bool over_budget(const SignedDigraph& g, int src, int dst, const SynthConfig& config) {
  const double cap = config.degree_cap_factor * config.target_mean_out_degree;
  return static_cast<double>(g.out_edges(src).size()) >= cap ||
         static_cast<double>(g.in_edges(dst).size()) >= cap;
}

std::optional<PlacedEdge> trait_edge(SignedDigraph& g, const std::vector<CourseBlock>& blocks,
                                     const Pods& pods, const SynthConfig& config, Rng& rng) {
  std::size_t block_idx = rng.below(blocks.size());
  const auto& block = blocks[block_idx];
  auto friction_draw = [&]() {
    // endpoint weight 1 + friction * (1 - p): selfish students are involved
    // in disproportionately many of the scattered (mostly hostile) contacts
    while (true) {
      int v = block.first + static_cast<int>(rng.below(static_cast<std::uint64_t>(block.size)));
      double w = 1.0 + config.friction_weight * (1.0 - g.attributes(v).prosociality);
      if (rng.uniform() * (1.0 + config.friction_weight) < w) return v;
    }
  };
  int i, j;
  if (rng.uniform() < config.pod_nucleation_bias) {
    int p = draw_pod(pods, block_idx, rng);
    if (p < 0) return std::nullopt;
    const auto& group = pods.groups[static_cast<std::size_t>(p)];
    if (group.size() < 2) return std::nullopt;
    i = group[rng.below(group.size())];
    j = group[rng.below(group.size())];
  } else {
    i = friction_draw();
    j = friction_draw();
  }
  if (i == j || g.has_edge(i, j) || over_budget(g, i, j, config)) return std::nullopt;
  bool is_friend = rng.uniform() < nucleation_friend_probability(g.attributes(i).prosociality,
                                                                 g.attributes(j).prosociality,
                                                                 config);
  if (rng.uniform() < config.noise_flip_rate) is_friend = !is_friend;
  g.add_edge(i, j, draw_weight(is_friend, config, rng));
  return PlacedEdge{i, j, is_friend};
}

}  // namespace

void SynthConfig::validate() const {
  if (n_schools < 1 || courses_per_school < 1 || students_per_course < 2) {
    throw ConfigError("synth: need at least one school/course and two students per course");
  }
  if (target_mean_out_degree <= 0.0 ||
      target_mean_out_degree >= static_cast<double>(students_per_course - 1)) {
    throw ConfigError("synth: target mean out-degree must be in (0, course size - 1)");
  }
  if (nucleation_fraction <= 0.0 || nucleation_fraction > 1.0) {
    throw ConfigError("synth: nucleation_fraction must be in (0, 1]");
  }
  if (noise_flip_rate < 0.0 || noise_flip_rate >= 0.5) {
    throw ConfigError("synth: noise_flip_rate must be in [0, 0.5)");
  }
  if (mediated_fraction < 0.0 || mediated_fraction > 1.0) {
    throw ConfigError("synth: mediated_fraction must be in [0, 1]");
  }
  if (declaration_floor <= 0.0 || declaration_floor > 1.0) {
    throw ConfigError("synth: declaration_floor must be in (0, 1]");
  }
  if (reciprocation_rate < 0.0 || reciprocation_rate > 1.0) {
    throw ConfigError("synth: reciprocation_rate must be in [0, 1]");
  }
  if (influence_scale <= 0.0) throw ConfigError("synth: influence_scale must be positive");
}

double nucleation_friend_probability(double p_src, double p_dst, const SynthConfig& config) {
  return sigmoid(config.trait_alpha * (p_src + p_dst) + config.trait_beta);
}

double growth_friend_probability(double influence, const SynthConfig& config) {
  return sigmoid((influence - config.influence_midpoint) / config.influence_scale);
}

double declaration_salience(double influence, const SynthConfig& config) {
  double embedded = sigmoid((influence - config.gate_midpoint) / config.gate_scale);
  return config.declaration_floor + (1.0 - config.declaration_floor) * embedded;
}

SignedDigraph nucleate(const SynthConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, 0x4e75636cULL));
  SignedDigraph g;

  for (int s = 0; s < config.n_schools; ++s) {
    for (int c = 0; c < config.courses_per_school; ++c) {
      for (int i = 0; i < config.students_per_course; ++i) {
        StudentAttributes attrs;
        attrs.student_id = school_name(s) + "_c" + std::to_string(c + 1) + "_" +
                           std::to_string(i + 1);
        attrs.school_id = school_name(s);
        attrs.course = c + 1;
        attrs.class_group = attrs.school_id + "_c" + std::to_string(c + 1) + "_g" +
                            std::to_string(i % 3 + 1);
        double gx = rng.uniform();
        attrs.gender = gx < config.nonbinary_rate
                           ? Gender::NonBinary
                           : (rng.uniform() < 0.5 ? Gender::Male : Gender::Female);
        attrs.crt = draw_level(config.crt_weights, rng);
        attrs.prosociality = kProsocialityLevels[static_cast<std::size_t>(
            draw_level(config.prosociality_weights, rng))];
        g.add_node(std::move(attrs));
      }
    }
  }

  // Head start of trait-signed seed relationships; nucleation keeps running
  // during growth, so this is only a quarter of the overall budget.
  auto blocks = course_blocks(g);
  Pods pods = build_pods(g, blocks, config);
  const long long head_start = std::llround(0.5 * config.nucleation_fraction *
                                            config.target_mean_out_degree *
                                            static_cast<double>(g.node_count()));
  long long placed = 0;
  long long attempts = 0;
  const long long max_attempts = head_start * 50 + 1000;
  while (placed < head_start && attempts < max_attempts) {
    ++attempts;
    auto edge = trait_edge(g, blocks, pods, config, rng);
    if (!edge) continue;
    ++placed;
    if (!g.has_edge(edge->dst, edge->src) && !over_budget(g, edge->dst, edge->src, config) &&
        rng.uniform() < config.reciprocation_rate) {
      bool echo = rng.uniform() < config.noise_flip_rate ? !edge->is_friend : edge->is_friend;
      g.add_edge(edge->dst, edge->src, draw_weight(echo, config, rng));
      ++placed;
    }
  }
  return g;
}

namespace {

// One influence-driven step: proposes an ordered intra-course pair (mediated
// friendly introduction or uniform), gates on structural salience, signs by
// the influence logistic. Returns the placed edge or nothing.
std::optional<PlacedEdge> evolve_step_impl(SignedDigraph& g,
                                           const std::vector<CourseBlock>& blocks,
                                           const SynthConfig& config, Rng& rng) {
  int i = -1, j = -1;
  if (rng.uniform() < config.mediated_fraction) {
    // Friendly introduction: a mediator k with i -> k and k -> j both
    // positive proposes the pair (i, j). Hostile mediation never introduces
    // anyone; those pairs only arise through the uniform channel.
    if (g.edge_count() == 0) return std::nullopt;
    int k = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.node_count())));
    auto out = g.out_edges(k);
    auto in = g.in_edges(k);
    if (out.empty() || in.empty()) return std::nullopt;
    auto [cand_i, w_ik] = in[rng.below(in.size())];
    auto [cand_j, w_kj] = out[rng.below(out.size())];
    if (w_ik <= 0 || w_kj <= 0) return std::nullopt;
    i = cand_i;
    j = cand_j;
  } else {
    const auto& block = blocks[rng.below(blocks.size())];
    i = block.first + static_cast<int>(rng.below(static_cast<std::uint64_t>(block.size)));
    j = block.first + static_cast<int>(rng.below(static_cast<std::uint64_t>(block.size)));
  }
  if (i < 0 || j < 0 || i == j) return std::nullopt;
  const bool existing = g.has_edge(i, j);
  if (existing && !config.allow_resign) return std::nullopt;
  if (!existing && over_budget(g, i, j, config)) return std::nullopt;

  int influence = triadic_influence(g, i, j);
  if (rng.uniform() >= declaration_salience(influence, config)) {
    return std::nullopt;  // pair stays undeclared for now
  }
  bool is_friend = rng.uniform() < growth_friend_probability(influence, config);
  if (rng.uniform() < config.noise_flip_rate) is_friend = !is_friend;
  int w = draw_weight(is_friend, config, rng);
  if (existing) {
    g.set_weight(i, j, w);
  } else {
    g.add_edge(i, j, w);
  }
  return PlacedEdge{i, j, is_friend};
}

}  // namespace

bool evolve_step(SignedDigraph& g, const SynthConfig& config, Rng& rng) {
  return evolve_step_impl(g, course_blocks(g), config, rng).has_value();
}

SignedDigraph generate(const SynthConfig& config) {
  SignedDigraph g = nucleate(config);
  const auto blocks = course_blocks(g);  // node set is fixed after nucleation
  const Pods pods = build_pods(g, blocks, config);
  Rng rng(derive_seed(config.seed, 0x45766f6cULL));
  const long long target_edges =
      std::llround(config.target_mean_out_degree * static_cast<double>(g.node_count()));

  // Registry of friendly edges: mediated introductions are drawn from it, so
  // well-connected friendly mediators introduce proportionally more pairs.
  std::vector<std::pair<int, int>> positive_edges;
  for (const auto& e : g.edges()) {
    if (e.weight > 0) positive_edges.emplace_back(e.src, e.dst);
  }

  auto place = [&](int i, int j, bool is_friend) {
    int w = draw_weight(is_friend, config, rng);
    if (g.has_edge(i, j)) {
      g.set_weight(i, j, w);
    } else {
      g.add_edge(i, j, w);
    }
    if (w > 0) positive_edges.emplace_back(i, j);
  };

  auto reciprocate = [&](const PlacedEdge& edge) {
    if (g.edge_count() < target_edges && !g.has_edge(edge.dst, edge.src) &&
        !over_budget(g, edge.dst, edge.src, config) &&
        rng.uniform() < config.reciprocation_rate) {
      bool echo = rng.uniform() < config.noise_flip_rate ? !edge.is_friend : edge.is_friend;
      place(edge.dst, edge.src, echo);
    }
  };

  std::vector<int> friendly_in;
  long long stall = 0;
  long long trait_placed = g.edge_count();  // the head start is trait-signed
  const long long max_stall = 400 * target_edges + 10000;
  while (g.edge_count() < target_edges && stall < max_stall) {
    ++stall;

    // Isolated relationships keep nucleating alongside structural growth
    // until two-paths dominate the dynamics; the share of trait-signed edges
    // among placed edges tracks nucleation_fraction.
    if (static_cast<double>(trait_placed) <
        config.nucleation_fraction * static_cast<double>(g.edge_count() + 1)) {
      if (auto edge = trait_edge(g, blocks, pods, config, rng)) {
        if (g.weight(edge->src, edge->dst) > 0) {
          positive_edges.emplace_back(edge->src, edge->dst);
        }
        stall = 0;
        ++trait_placed;
        long long before = g.edge_count();
        reciprocate(*edge);
        trait_placed += g.edge_count() - before;
      }
      continue;
    }

    int i = -1, j = -1;
    if (!positive_edges.empty() && rng.uniform() < config.mediated_fraction) {
      // introduction through a friendly edge k -> j and a friendly tie i -> k
      auto [k, cand_j] = positive_edges[rng.below(positive_edges.size())];
      if (config.allow_resign && g.weight(k, cand_j) <= 0) continue;  // stale entry
      friendly_in.clear();
      for (const auto& [src, w] : g.in_edges(k)) {
        if (w > 0) friendly_in.push_back(src);
      }
      if (friendly_in.empty()) continue;
      i = friendly_in[rng.below(friendly_in.size())];
      j = cand_j;
    } else {
      const auto& block = blocks[rng.below(blocks.size())];
      i = block.first + static_cast<int>(rng.below(static_cast<std::uint64_t>(block.size)));
      j = block.first + static_cast<int>(rng.below(static_cast<std::uint64_t>(block.size)));
    }
    if (i == j) continue;
    if (g.has_edge(i, j) && !config.allow_resign) continue;
    if (!g.has_edge(i, j) && over_budget(g, i, j, config)) continue;

    int influence = triadic_influence(g, i, j);
    if (rng.uniform() >= declaration_salience(influence, config)) continue;
    bool is_friend = rng.uniform() < growth_friend_probability(influence, config);
    if (rng.uniform() < config.noise_flip_rate) is_friend = !is_friend;
    place(i, j, is_friend);
    stall = 0;
    reciprocate(PlacedEdge{i, j, is_friend});
  }
  return g;
}

SignedDigraph generate_corpus(const SynthConfig& config, double variation) {
  // Each school is generated separately with deterministically varied
  // parameters, then merged; ids never collide because they carry the school
  // index.
  SignedDigraph corpus;
  for (int s = 0; s < config.n_schools; ++s) {
    SynthConfig school_cfg = config;
    school_cfg.n_schools = 1;
    school_cfg.seed = derive_seed(config.seed, static_cast<std::uint64_t>(s), 0x436f7270ULL);
    Rng vary(derive_seed(config.seed, static_cast<std::uint64_t>(s), 0x56617279ULL));
    auto jitter = [&](double base, double lo, double hi) {
      double v = base * (1.0 + variation * (2.0 * vary.uniform() - 1.0));
      return std::clamp(v, lo, hi);
    };
    school_cfg.target_mean_out_degree =
        jitter(config.target_mean_out_degree, 4.0, config.students_per_course - 2.0);
    school_cfg.friend_plus1_fraction = jitter(config.friend_plus1_fraction, 0.2, 0.8);
    school_cfg.enemy_minus1_fraction = jitter(config.enemy_minus1_fraction, 0.2, 0.8);
    school_cfg.nucleation_fraction = jitter(config.nucleation_fraction, 0.05, 0.8);
    school_cfg.mediated_fraction = jitter(config.mediated_fraction, 0.3, 0.98);
    school_cfg.pod_size = std::max(
        3, static_cast<int>(std::lround(jitter(static_cast<double>(config.pod_size), 3.0, 24.0))));

    SignedDigraph school = generate(school_cfg);
    std::vector<int> remap(static_cast<std::size_t>(school.node_count()));
    for (int v = 0; v < school.node_count(); ++v) {
      StudentAttributes attrs = school.attributes(v);
      attrs.student_id =
          school_name(s) + "_" + attrs.student_id.substr(attrs.student_id.find('_') + 1);
      attrs.school_id = school_name(s);
      attrs.class_group = attrs.school_id + attrs.class_group.substr(attrs.class_group.find('_'));
      remap[static_cast<std::size_t>(v)] = corpus.add_node(std::move(attrs));
    }
    for (const auto& e : school.edges()) {
      corpus.add_edge(remap[static_cast<std::size_t>(e.src)],
                      remap[static_cast<std::size_t>(e.dst)], e.weight);
    }
  }
  return corpus;
}

PlantedNetwork planted_threshold_network(int n, double theta, double eta, std::uint64_t seed,
                                         double density) {
  if (n < 10) throw std::invalid_argument("planted_threshold_network: n must be >= 10");
  if (eta < 0.0 || eta >= 0.5) {
    throw std::invalid_argument("planted_threshold_network: eta must be in [0, 0.5)");
  }
  Rng rng(derive_seed(seed, 0x506c616eULL));
  PlantedNetwork net;
  for (int v = 0; v < n; ++v) {
    StudentAttributes attrs;
    attrs.student_id = "p" + std::to_string(v + 1);
    attrs.school_id = "planted";
    attrs.course = 1;
    attrs.class_group = "planted_g1";
    attrs.gender = rng.uniform() < 0.5 ? Gender::Male : Gender::Female;
    attrs.crt = static_cast<int>(rng.below(4));
    attrs.prosociality = kProsocialityLevels[rng.below(4)];
    net.graph.add_node(std::move(attrs));
  }
  constexpr int kWeights[4] = {-2, -1, 1, 2};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || rng.uniform() >= density) continue;
      net.graph.add_edge(i, j, kWeights[rng.below(4)]);
    }
  }
  net.edge_list = net.graph.edges();
  net.labels.reserve(net.edge_list.size());
  net.clean_labels.reserve(net.edge_list.size());
  for (const auto& e : net.edge_list) {
    int clean = triadic_influence(net.graph, e.src, e.dst) > theta ? 1 : 0;
    int noisy = rng.uniform() < eta ? 1 - clean : clean;
    net.clean_labels.push_back(clean);
    net.labels.push_back(noisy);
  }
  return net;
}

void write_nodes_csv(std::ostream& out, const SignedDigraph& g) {
  out << "student_id,school_id,course,class_group,gender,crt,q1,q2,q3\n";
  for (int v = 0; v < g.node_count(); ++v) {
    const auto& a = g.attributes(v);
    // decompose prosociality back into a selfishness score; any split with
    // the right sum reproduces the same index
    int s = static_cast<int>(std::llround((1.0 - a.prosociality) * 3.0));
    int q1 = s >= 1 ? 1 : 0;
    int q2 = s >= 2 ? 1 : 0;
    int q3 = s >= 3 ? 1 : 0;
    out << a.student_id << ',' << a.school_id << ',' << a.course << ',' << a.class_group << ','
        << gender_code(a.gender) << ',' << a.crt << ',' << q1 << ',' << q2 << ',' << q3 << '\n';
  }
}

void write_edges_csv(std::ostream& out, const SignedDigraph& g) {
  out << "src,dst,weight\n";
  for (const auto& e : g.edges()) {
    out << g.attributes(e.src).student_id << ',' << g.attributes(e.dst).student_id << ','
        << e.weight << '\n';
  }
}

void write_planted_labels_csv(std::ostream& out, const PlantedNetwork& net) {
  out << "src,dst,influence,label,clean_label\n";
  for (std::size_t e = 0; e < net.edge_list.size(); ++e) {
    const auto& edge = net.edge_list[e];
    out << net.graph.attributes(edge.src).student_id << ','
        << net.graph.attributes(edge.dst).student_id << ','
        << triadic_influence(net.graph, edge.src, edge.dst) << ',' << net.labels[e] << ','
        << net.clean_labels[e] << '\n';
  }
}

}  // namespace socnet
