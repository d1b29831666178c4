#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "socnet/graph.hpp"

using namespace socnet;
using namespace socnet::testing;

TEST_CASE("prosociality score") {
  CHECK(prosociality_score(1, 1, 1) == doctest::Approx(0.0));
  CHECK(prosociality_score(0, 0, 0) == doctest::Approx(1.0));
  CHECK(prosociality_score(1, 0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(prosociality_level_index(prosociality_score(0, 1, 0)) == 2);
  CHECK(prosociality_level_index(0.5) == -1);
}

TEST_CASE("graph construction invariants") {
  SignedDigraph g;
  StudentAttributes a;
  a.student_id = "a";
  a.school_id = "s";
  a.course = 1;
  a.class_group = "g";
  g.add_node(a);
  StudentAttributes b = a;
  b.student_id = "b";
  g.add_node(b);

  CHECK_THROWS_AS(g.add_edge("a", "a", 1), ValidationError);   // self loop
  CHECK_THROWS_AS(g.add_edge("a", "b", 0), ValidationError);   // weight 0 is edge absence
  CHECK_THROWS_AS(g.add_edge("a", "b", 3), ValidationError);
  CHECK_THROWS_AS(g.add_edge("a", "zz", 1), LookupError);

  g.add_edge("a", "b", 2);
  CHECK_THROWS_AS(g.add_edge("a", "b", 1), ValidationError);   // duplicate ordered pair
  g.add_edge("b", "a", -1);                                    // reverse edge is independent
  CHECK(g.edge_count() == 2);
  CHECK(g.weight(g.index_of("a"), g.index_of("b")) == 2);
  CHECK(g.weight(g.index_of("b"), g.index_of("a")) == -1);

  StudentAttributes dup = a;
  CHECK_THROWS_AS(g.add_node(dup), ValidationError);
}

TEST_CASE("load_network basic and drop rule") {
  std::istringstream nodes(
      "student_id,school_id,course,class_group,gender,crt,q1,q2,q3\n"
      "a,s1,1,g1,M,2,0,0,0\n"
      "b,s1,1,g1,F,1,1,0,0\n"
      "c,s1,1,g1,NB,0,,1,1\n");  // missing q1 -> dropped
  std::istringstream edges(
      "src,dst,weight\n"
      "a,b,2\n"
      "a,c,1\n"    // references dropped node -> dropped
      "c,b,-1\n"   // same
      "x,b,1\n");  // unknown nominator -> dropped
  auto loaded = load_network(nodes, edges);
  CHECK(loaded.graph.node_count() == 2);
  CHECK(loaded.graph.edge_count() == 1);
  CHECK(loaded.report.dropped_nodes == std::vector<std::string>{"c"});
  CHECK(loaded.report.dropped_edges == 3);
  CHECK(loaded.graph.attributes(loaded.graph.index_of("a")).prosociality == doctest::Approx(1.0));
}

TEST_CASE("load_network error paths") {
  auto load_with = [](const std::string& node_body, const std::string& edge_body) {
    std::istringstream nodes("student_id,school_id,course,class_group,gender,crt,q1,q2,q3\n" +
                             node_body);
    std::istringstream edges("src,dst,weight\n" + edge_body);
    return load_network(nodes, edges);
  };

  CHECK_THROWS_AS(load_with("a,s1,1,g1,M,2,0,0\n", ""), ParseError);        // short row
  CHECK_THROWS_AS(load_with("a,s1,1,g1,X,2,0,0,0\n", ""), ParseError);      // bad gender
  CHECK_THROWS_AS(load_with("a,s1,oops,g1,M,2,0,0,0\n", ""), ParseError);   // bad course
  CHECK_THROWS_AS(load_with("a,s1,1,g1,M,7,0,0,0\n", ""), ValidationError); // crt out of range
  CHECK_THROWS_AS(load_with("a,s1,1,g1,M,2,2,0,0\n", ""), ValidationError); // q not binary

  const std::string ok =
      "a,s1,1,g1,M,2,0,0,0\n"
      "b,s1,1,g1,F,1,1,0,0\n";
  CHECK_THROWS_AS(load_with(ok, "a,b,4\n"), ValidationError);          // weight domain
  CHECK_THROWS_AS(load_with(ok, "a,b,2\na,b,2\n"), ValidationError);   // duplicate pair
  CHECK_THROWS_AS(load_with(ok, "a,a,1\n"), ValidationError);          // self loop

  // parse errors carry the offending line number
  try {
    load_with(ok, "a,b,nope\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("diagram worked example") {
  SignedDigraph g = diagram_graph();
  CHECK(triadic_influence(g, "0", "1") == 2);  // 2*2 + (-1)*2
  CHECK(two_path_count(g, "0", "1") == 2);     // 0-5-1 and 0-6-1
  CHECK(triadic_influence(g, "1", "0") == 0);  // asymmetric
  CHECK_THROWS_AS(triadic_influence(g, "0", "nope"), LookupError);

  auto entries = influence_matrix(g);
  bool found = false;
  for (const auto& e : entries) {
    if (g.attributes(e.src).student_id == "0" && g.attributes(e.dst).student_id == "1") {
      CHECK(e.influence == 2);
      CHECK(e.two_paths == 2);
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("no directed two-path means zero influence") {
  SignedDigraph g = random_graph(8, 0.0, 7);  // no edges at all
  g.add_edge(0, 1, 2);
  CHECK(triadic_influence(g, 0, 1) == 0);
  CHECK(two_path_count(g, 0, 1) == 0);

  auto entries = influence_matrix(g);
  REQUIRE(entries.size() == 1);
  CHECK(entries[0].influence == 0);
}

TEST_CASE("influence matches dense oracle on random graphs") {
  for (int trial = 0; trial < 30; ++trial) {
    int n = 5 + static_cast<int>(trial % 16);
    SignedDigraph g = random_graph(n, 0.3, 1000 + static_cast<std::uint64_t>(trial));
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        CHECK(triadic_influence(g, i, j) == dense_influence(g, i, j));
        CHECK(two_path_count(g, i, j) == dense_two_paths(g, i, j));
      }
    }
    for (const auto& e : influence_matrix(g)) {
      CHECK(e.influence == triadic_influence(g, e.src, e.dst));
      CHECK(e.two_paths == two_path_count(g, e.src, e.dst));
    }
  }
}

TEST_CASE("influence sign structure") {
  // all same-signed two-paths -> positive influence
  SignedDigraph pos = random_graph(4, 0.0, 1);
  pos.add_edge(0, 2, 2);
  pos.add_edge(2, 1, 1);
  pos.add_edge(0, 3, -1);
  pos.add_edge(3, 1, -2);
  CHECK(triadic_influence(pos, 0, 1) == 4);  // 2*1 + (-1)(-2)

  // all opposite-signed pairs -> negative
  SignedDigraph neg = random_graph(4, 0.0, 2);
  neg.add_edge(0, 2, 2);
  neg.add_edge(2, 1, -1);
  neg.add_edge(0, 3, -1);
  neg.add_edge(3, 1, 1);
  CHECK(triadic_influence(neg, 0, 1) == -3);
}

TEST_CASE("removing out-edges of i forces zero influence") {
  SignedDigraph g = random_graph(10, 0.4, 99);
  // rebuild without node 0's out-edges
  SignedDigraph h = random_graph(10, 0.0, 99);
  for (const auto& e : g.edges()) {
    if (e.src == 0) continue;
    h.add_edge(e.src, e.dst, e.weight);
  }
  for (int j = 1; j < 10; ++j) CHECK(triadic_influence(h, 0, j) == 0);
}

TEST_CASE("descriptive distributions") {
  SignedDigraph g = random_graph(2, 0.0, 5);
  CHECK_THROWS_AS(relation_type_distribution(g), EmptyInputError);

  g.add_edge(0, 1, 1);
  auto dist = relation_type_distribution(g);
  CHECK(dist.size() == 1);
  CHECK(dist[1] == doctest::Approx(1.0));

  auto hist = two_path_histogram(g);
  CHECK(hist[0] == doctest::Approx(1.0));

  SignedDigraph big = random_graph(20, 0.3, 12345);
  double total = 0.0;
  for (const auto& [w, frac] : relation_type_distribution(big)) {
    (void)w;
    total += frac;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  total = 0.0;
  for (const auto& [c, frac] : two_path_histogram(big)) {
    (void)c;
    total += frac;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  auto pdist = prosociality_distribution(big);
  CHECK(pdist[0] + pdist[1] + pdist[2] + pdist[3] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("nomination statistics") {
  // two prosocial students nominating each other as friends, one selfish
  // student nominated as enemy
  SignedDigraph g;
  auto add = [&g](const std::string& id, double p) {
    StudentAttributes a;
    a.student_id = id;
    a.school_id = "s";
    a.course = 1;
    a.class_group = "g";
    a.prosociality = p;
    g.add_node(a);
  };
  add("hi1", 1.0);
  add("hi2", 1.0);
  add("lo", 0.0);
  g.add_edge("hi1", "hi2", 2);
  g.add_edge("hi2", "hi1", 1);
  g.add_edge("hi1", "lo", -1);
  g.add_edge("lo", "hi1", -2);

  auto out_friends = mean_nominations_by_prosociality(g, true, true);
  CHECK(out_friends.mean[3] == doctest::Approx(1.0));  // both prosocial students nominate 1 friend
  CHECK(out_friends.mean[0] == doctest::Approx(0.0));
  auto in_enemies = mean_nominations_by_prosociality(g, false, false);
  CHECK(in_enemies.mean[0] == doctest::Approx(1.0));
  CHECK(in_enemies.students[3] == 2);
}
