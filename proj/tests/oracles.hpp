#pragma once

// Independent reference implementations used as test oracles. These must not
// reuse the traversal code paths they check: influence goes through a dense
// matrix product built from the raw edge list, gradients through central
// finite differences.

#include <functional>
#include <vector>

#include "socnet/graph.hpp"
#include "socnet/rand.hpp"

namespace socnet::testing {

// Dense W from the raw edge list, then (W^2)_{ij} by explicit summation.
inline long long dense_influence(const SignedDigraph& g, int i, int j) {
  const int n = g.node_count();
  std::vector<std::vector<int>> w(static_cast<std::size_t>(n),
                                  std::vector<int>(static_cast<std::size_t>(n), 0));
  for (const auto& e : g.edges()) {
    w[static_cast<std::size_t>(e.src)][static_cast<std::size_t>(e.dst)] = e.weight;
  }
  long long sum = 0;
  for (int k = 0; k < n; ++k) {
    sum += static_cast<long long>(w[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) *
           w[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
  }
  return sum;
}

inline long long dense_two_paths(const SignedDigraph& g, int i, int j) {
  const int n = g.node_count();
  std::vector<std::vector<int>> a(static_cast<std::size_t>(n),
                                  std::vector<int>(static_cast<std::size_t>(n), 0));
  for (const auto& e : g.edges()) {
    a[static_cast<std::size_t>(e.src)][static_cast<std::size_t>(e.dst)] = 1;
  }
  long long count = 0;
  for (int k = 0; k < n; ++k) {
    count += static_cast<long long>(a[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]) *
             a[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
  }
  return count;
}

// Random signed digraph with throwaway student attributes.
inline SignedDigraph random_graph(int n, double density, std::uint64_t seed) {
  Rng rng(seed);
  SignedDigraph g;
  for (int v = 0; v < n; ++v) {
    StudentAttributes attrs;
    attrs.student_id = "n" + std::to_string(v);
    attrs.school_id = "s";
    attrs.course = 1;
    attrs.class_group = "g";
    attrs.gender = rng.uniform() < 0.5 ? Gender::Male : Gender::Female;
    attrs.crt = static_cast<int>(rng.below(4));
    attrs.prosociality = kProsocialityLevels[rng.below(4)];
    g.add_node(std::move(attrs));
  }
  constexpr int kWeights[4] = {-2, -1, 1, 2};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || rng.uniform() >= density) continue;
      g.add_edge(i, j, kWeights[rng.below(4)]);
    }
  }
  return g;
}

// Central finite differences of a scalar function at x.
inline double central_difference(const std::function<double(double)>& f_of_param, double x,
                                 double eps = 1e-5) {
  return (f_of_param(x + eps) - f_of_param(x - eps)) / (2.0 * eps);
}

// Hand-checkable worked example: the relationship
// 0 -> 1 mediated by nodes 5 and 6 (weights +2*+2 and -1*+2), with 0-3-1 a
// non-directed detour that must not contribute.
inline SignedDigraph diagram_graph() {
  SignedDigraph g;
  for (int v = 0; v < 7; ++v) {
    StudentAttributes attrs;
    attrs.student_id = std::to_string(v);
    attrs.school_id = "fig";
    attrs.course = 1;
    attrs.class_group = "a";
    attrs.gender = v % 2 == 0 ? Gender::Male : Gender::Female;
    attrs.crt = v % 4;
    attrs.prosociality = kProsocialityLevels[static_cast<std::size_t>(v % 4)];
    g.add_node(std::move(attrs));
  }
  g.add_edge("0", "1", 1);   // the relationship being predicted
  g.add_edge("0", "5", 2);
  g.add_edge("5", "1", 2);
  g.add_edge("0", "6", -1);
  g.add_edge("6", "1", 2);
  g.add_edge("0", "3", 1);   // 0 -> 3 <- 1: not a directed two-path
  g.add_edge("1", "3", 1);
  g.add_edge("2", "0", 1);
  g.add_edge("4", "2", -2);
  return g;
}

}  // namespace socnet::testing
