#pragma once

#include <array>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "socnet/errors.hpp"

namespace socnet {

enum class Gender { Male, Female, NonBinary };

Gender parse_gender(std::string_view code);  // "M" | "F" | "NB"
std::string gender_code(Gender g);

// Prosociality levels induced by the three sharing questions: 1 - s/3.
inline constexpr std::array<double, 4> kProsocialityLevels = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};

// Index 0..3 of the nearest level, or -1 if the value is not within 1e-9 of one.
int prosociality_level_index(double p);

double prosociality_score(int q1, int q2, int q3);

struct StudentAttributes {
  std::string student_id;
  std::string school_id;
  int course = 0;
  std::string class_group;
  Gender gender = Gender::Male;
  int crt = 0;               // 0..3
  double prosociality = 0.0; // one of kProsocialityLevels
};

struct Edge {
  int src = 0;
  int dst = 0;
  int weight = 0;  // in {-2,-1,+1,+2}; 0 is encoded by edge absence
};

bool valid_weight(int w);

// Signed weighted directed graph over students. At most one edge per ordered
// pair, no self loops, weights restricted to {-2,-1,+1,+2}. Out- and
// in-adjacency are both kept sorted so per-pair lookups are logarithmic and
// two-path traversals touch only declared neighbors. The graph is treated as
// immutable once loaded/generated; all query operations are const.
class SignedDigraph {
 public:
  // Returns the dense index assigned to the node.
  int add_node(StudentAttributes attrs);
  void add_edge(int src, int dst, int weight);
  void add_edge(std::string_view src_id, std::string_view dst_id, int weight);
  // Replaces the weight of an existing edge (generator re-signing support).
  void set_weight(int src, int dst, int weight);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  long long edge_count() const { return n_edges_; }

  bool has_node(std::string_view id) const;
  int index_of(std::string_view id) const;  // throws LookupError
  const StudentAttributes& attributes(int v) const { return nodes_[static_cast<std::size_t>(v)]; }

  bool has_edge(int src, int dst) const;
  int weight(int src, int dst) const;  // 0 when the edge is absent

  // (neighbor, weight) pairs sorted by neighbor index.
  std::span<const std::pair<int, int>> out_edges(int v) const {
    return out_[static_cast<std::size_t>(v)];
  }
  std::span<const std::pair<int, int>> in_edges(int v) const {
    return in_[static_cast<std::size_t>(v)];
  }

  // All edges ordered by (src, dst); the canonical deterministic order used
  // by exports and influence_matrix.
  std::vector<Edge> edges() const;

 private:
  std::vector<StudentAttributes> nodes_;
  std::unordered_map<std::string, int> index_;
  std::vector<std::vector<std::pair<int, int>>> out_;
  std::vector<std::vector<std::pair<int, int>>> in_;
  long long n_edges_ = 0;

  void check_node(int v) const;
};

struct LoadReport {
  std::vector<std::string> dropped_nodes;  // incomplete attribute records
  long long dropped_edges = 0;             // edges touching a dropped/unknown node
  int kept_nodes = 0;
  long long kept_edges = 0;
};

struct LoadedNetwork {
  SignedDigraph graph;
  LoadReport report;
};

// CSV schemas:
//   nodes: student_id,school_id,course,class_group,gender,crt,q1,q2,q3
//   edges: src,dst,weight
// Records with any empty attribute field are dropped together with their
// incident edges (the drop is listed in the report). Malformed values raise
// ParseError/ValidationError naming the offending line.
LoadedNetwork load_network(std::istream& nodes_csv, std::istream& edges_csv);
LoadedNetwork load_network_files(const std::string& nodes_path, const std::string& edges_path);

// Triadic influence I_ij: sum of w_ik * w_kj over directed two-paths i->k->j.
int triadic_influence(const SignedDigraph& g, int i, int j);
int triadic_influence(const SignedDigraph& g, std::string_view i, std::string_view j);

// Number of directed two-paths i->k->j, ignoring weights.
int two_path_count(const SignedDigraph& g, int i, int j);
int two_path_count(const SignedDigraph& g, std::string_view i, std::string_view j);

struct EdgeInfluence {
  int src = 0;
  int dst = 0;
  int weight = 0;
  int influence = 0;
  int two_paths = 0;
};

// Influence and two-path count for every declared edge, in edges() order.
// Sparse traversal over intermediate nodes: O(sum_k outdeg(k) * indeg(k)).
std::vector<EdgeInfluence> influence_matrix(const SignedDigraph& g);

// --- Descriptive statistics (appendix figures) ---

// Fraction of declared edges per weight.
std::map<int, double> relation_type_distribution(const SignedDigraph& g);

// Fraction of declared edges per number of directed two-paths.
std::map<int, double> two_path_histogram(const SignedDigraph& g);

// Fraction of students per prosociality level (indexed as kProsocialityLevels).
std::array<double, 4> prosociality_distribution(const SignedDigraph& g);

struct NominationStats {
  std::array<double, 4> mean{};  // per prosociality level
  std::array<double, 4> sem{};
  std::array<int, 4> students{};
};

// Average number of positive (or negative) nominations made (outgoing) or
// received (incoming) by students at each prosociality level.
NominationStats mean_nominations_by_prosociality(const SignedDigraph& g, bool positive,
                                                 bool outgoing);

}  // namespace socnet
