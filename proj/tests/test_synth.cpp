#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "socnet/dataset.hpp"
#include "socnet/synth.hpp"

using namespace socnet;
using namespace socnet::testing;

TEST_CASE("nucleation sign probabilities") {
  SynthConfig cfg;
  CHECK(nucleation_friend_probability(0.0, 0.0, cfg) == doctest::Approx(0.30).epsilon(0.01));
  CHECK(nucleation_friend_probability(1.0, 1.0, cfg) == doctest::Approx(0.65).epsilon(0.01));

  // alpha = 0 with strongly negative beta: every nucleated edge hostile
  SynthConfig hostile;
  hostile.trait_alpha = 0.0;
  hostile.trait_beta = -100.0;
  hostile.noise_flip_rate = 0.0;
  hostile.nucleation_fraction = 1.0;
  hostile.seed = 3;
  SignedDigraph g = nucleate(hostile);
  REQUIRE(g.edge_count() > 100);
  for (const auto& e : g.edges()) CHECK(e.weight < 0);
}

TEST_CASE("nucleation anchors measured over homogeneous populations") {
  // all students at prosociality 0: friend share ~0.30; all at 1: ~0.65
  SynthConfig low;
  low.prosociality_weights = {1.0, 0.0, 0.0, 0.0};
  low.nucleation_fraction = 1.0;
  low.n_schools = 5;
  low.seed = 11;
  SignedDigraph g0 = nucleate(low);
  REQUIRE(g0.edge_count() >= 10000);
  long long pos = 0;
  for (const auto& e : g0.edges()) pos += e.weight > 0 ? 1 : 0;
  CHECK(static_cast<double>(pos) / g0.edge_count() == doctest::Approx(0.30).epsilon(0.18));
  CHECK(std::abs(static_cast<double>(pos) / g0.edge_count() - 0.30) < 0.05);

  SynthConfig high = low;
  high.prosociality_weights = {0.0, 0.0, 0.0, 1.0};
  SignedDigraph g1 = nucleate(high);
  pos = 0;
  for (const auto& e : g1.edges()) pos += e.weight > 0 ? 1 : 0;
  CHECK(std::abs(static_cast<double>(pos) / g1.edge_count() - 0.65) < 0.05);
}

TEST_CASE("edges never cross course boundaries") {
  SynthConfig cfg;
  cfg.n_schools = 2;
  cfg.seed = 5;
  SignedDigraph g = generate(cfg);
  for (const auto& e : g.edges()) {
    CHECK(g.attributes(e.src).school_id == g.attributes(e.dst).school_id);
    CHECK(g.attributes(e.src).course == g.attributes(e.dst).course);
  }
}

TEST_CASE("growth sign rule") {
  SynthConfig cfg;
  CHECK(growth_friend_probability(cfg.influence_midpoint, cfg) == doctest::Approx(0.5));
  CHECK(growth_friend_probability(60.0, cfg) > 0.999);   // logistic tail
  CHECK(growth_friend_probability(-60.0, cfg) < 0.001);
}

TEST_CASE("evolve_step adds at most one edge") {
  SynthConfig cfg;
  cfg.seed = 9;
  SignedDigraph g = nucleate(cfg);
  Rng rng(17);
  long long before = g.edge_count();
  int added = 0;
  for (int attempt = 0; attempt < 3000; ++attempt) {
    long long prev = g.edge_count();
    bool placed = evolve_step(g, cfg, rng);
    CHECK(g.edge_count() - prev == (placed ? 1 : 0));
    added += placed ? 1 : 0;
  }
  CHECK(g.edge_count() == before + added);
  CHECK(added > 0);
}

TEST_CASE("generation reaches the target degree and is deterministic") {
  SynthConfig cfg;
  cfg.seed = 21;
  SignedDigraph a = generate(cfg);
  CHECK(a.node_count() == cfg.n_schools * cfg.courses_per_school * cfg.students_per_course);
  double mean_deg = static_cast<double>(a.edge_count()) / a.node_count();
  CHECK(mean_deg == doctest::Approx(cfg.target_mean_out_degree).epsilon(0.01));

  SignedDigraph b = generate(cfg);
  auto ea = a.edges();
  auto eb = b.edges();
  REQUIRE(ea.size() == eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) {
    CHECK(ea[i].src == eb[i].src);
    CHECK(ea[i].dst == eb[i].dst);
    CHECK(ea[i].weight == eb[i].weight);
  }
}

TEST_CASE("relation type ordering at defaults") {
  SynthConfig cfg;
  cfg.n_schools = 4;
  cfg.seed = 5;
  SignedDigraph g = generate(cfg);
  auto dist = relation_type_distribution(g);
  CHECK(dist[1] > dist[2]);
  CHECK(dist[2] > dist[-1]);
  CHECK(dist[-1] > dist[-2]);
}

TEST_CASE("nomination means are monotone in prosociality at defaults") {
  SynthConfig cfg;
  cfg.n_schools = 4;
  cfg.seed = 5;
  SignedDigraph g = generate(cfg);
  auto friends_out = mean_nominations_by_prosociality(g, true, true);
  auto enemies_out = mean_nominations_by_prosociality(g, false, true);
  for (int level = 0; level < 3; ++level) {
    CHECK(friends_out.mean[static_cast<std::size_t>(level)] <
          friends_out.mean[static_cast<std::size_t>(level) + 1]);
    CHECK(enemies_out.mean[static_cast<std::size_t>(level)] >
          enemies_out.mean[static_cast<std::size_t>(level) + 1]);
  }
}

TEST_CASE("isolated relationship share over many schools") {
  // measured over 20 generated schools, anchor band 1% to 5%
  SynthConfig cfg;
  cfg.n_schools = 20;
  cfg.seed = 2;
  SignedDigraph g = generate(cfg);
  auto samples = build_samples(g, ClassScheme::strict_friends(), PredictorSet::InfluenceOnly);
  auto split = split_by_two_paths(samples);
  double isolated = static_cast<double>(split.isolated.size()) / samples.size();
  CHECK(isolated >= 0.01);
  CHECK(isolated <= 0.05);
}

TEST_CASE("corpus generation varies schools but keeps invariants") {
  SynthConfig cfg;
  cfg.n_schools = 3;
  cfg.seed = 8;
  SignedDigraph corpus = generate_corpus(cfg);
  CHECK(corpus.node_count() == 3 * cfg.courses_per_school * cfg.students_per_course);
  std::set<std::string> schools;
  for (int v = 0; v < corpus.node_count(); ++v) schools.insert(corpus.attributes(v).school_id);
  CHECK(schools.size() == 3);
  for (const auto& e : corpus.edges()) {
    CHECK(corpus.attributes(e.src).school_id == corpus.attributes(e.dst).school_id);
  }
  // deterministic
  SignedDigraph again = generate_corpus(cfg);
  CHECK(again.edge_count() == corpus.edge_count());
}

TEST_CASE("planted threshold network") {
  auto clean = planted_threshold_network(40, 5.0, 0.0, 13);
  REQUIRE(clean.edge_list.size() == clean.labels.size());
  // eta = 0: threshold rule recovers the labels exactly
  for (std::size_t e = 0; e < clean.edge_list.size(); ++e) {
    int influence = triadic_influence(clean.graph, clean.edge_list[e].src,
                                      clean.edge_list[e].dst);
    CHECK((influence > 5.0 ? 1 : 0) == clean.labels[e]);
    CHECK(clean.labels[e] == clean.clean_labels[e]);
  }

  // eta = 0.05: the threshold rule disagrees with the noisy labels on ~5%
  auto noisy = planted_threshold_network(60, 5.0, 0.05, 13);
  long long flips = 0;
  for (std::size_t e = 0; e < noisy.labels.size(); ++e) {
    flips += noisy.labels[e] != noisy.clean_labels[e] ? 1 : 0;
  }
  double flip_rate = static_cast<double>(flips) / noisy.labels.size();
  CHECK(flip_rate == doctest::Approx(0.05).epsilon(0.5));
  CHECK(flip_rate > 0.0);

  CHECK_THROWS_AS(planted_threshold_network(5, 5.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(planted_threshold_network(40, 5.0, 0.7, 1), std::invalid_argument);
}

TEST_CASE("generated CSV round trips through the loader") {
  SynthConfig cfg;
  cfg.seed = 30;
  cfg.students_per_course = 30;
  cfg.target_mean_out_degree = 8.0;
  SignedDigraph g = generate(cfg);

  std::stringstream nodes, edges;
  write_nodes_csv(nodes, g);
  write_edges_csv(edges, g);
  auto loaded = load_network(nodes, edges);
  CHECK(loaded.graph.node_count() == g.node_count());
  CHECK(loaded.graph.edge_count() == g.edge_count());
  CHECK(loaded.report.dropped_nodes.empty());
  for (int v = 0; v < g.node_count(); ++v) {
    const auto& a = g.attributes(v);
    const auto& b = loaded.graph.attributes(loaded.graph.index_of(a.student_id));
    CHECK(a.prosociality == doctest::Approx(b.prosociality));
    CHECK(a.crt == b.crt);
    CHECK(gender_code(a.gender) == gender_code(b.gender));
  }
}

TEST_CASE("multi-school fixture totals match an independent count") {
  SynthConfig cfg;
  cfg.n_schools = 13;
  cfg.students_per_course = 30;
  cfg.target_mean_out_degree = 9.0;
  cfg.seed = 13;
  SignedDigraph g = generate(cfg);

  std::stringstream nodes, edges;
  write_nodes_csv(nodes, g);
  write_edges_csv(edges, g);

  // independent count: raw non-empty lines minus the header
  auto count_lines = [](std::stringstream& ss) {
    long long n = -1;  // header
    for (std::string line; std::getline(ss, line);) {
      if (!line.empty()) ++n;
    }
    return n;
  };
  std::stringstream nodes_copy(nodes.str()), edges_copy(edges.str());
  long long node_rows = count_lines(nodes_copy);
  long long edge_rows = count_lines(edges_copy);

  auto loaded = load_network(nodes, edges);
  CHECK(loaded.graph.node_count() == node_rows);
  CHECK(loaded.graph.edge_count() == edge_rows);
  CHECK(node_rows == 13LL * 3 * 30);
}

TEST_CASE("config validation") {
  SynthConfig cfg;
  cfg.students_per_course = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.target_mean_out_degree = 100.0;  // exceeds course capacity
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.noise_flip_rate = 0.6;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SynthConfig{};
  cfg.nucleation_fraction = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
