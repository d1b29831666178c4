#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "socnet/graph.hpp"

namespace socnet {

struct WalkConfig {
  double p = 1.0;            // return parameter
  double q = 4.0;            // in-out parameter
  int walks_per_node = 420;
  int walk_length = 30;      // transition attempts per walk
  int dimension = 128;
  int window = 10;
  int negatives = 5;         // negative samples per positive pair
  int epochs = 5;
  double lr0 = 0.025;        // linearly decayed over training
  std::uint64_t seed = 1;
  int threads = 0;           // 0 -> hardware concurrency
};

// Symmetrized, unweighted view of the signed digraph: the structure-only
// input of the embedding pipeline. Node indices match the source graph.
class UndirectedView {
 public:
  explicit UndirectedView(const SignedDigraph& g);

  int node_count() const { return static_cast<int>(adj_.size()); }
  std::span<const int> neighbors(int v) const { return adj_[static_cast<std::size_t>(v)]; }
  int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }
  bool adjacent(int u, int v) const;

 private:
  std::vector<std::vector<int>> adj_;  // sorted neighbor lists
};

// Flat walk storage; walk w spans nodes[offsets[w] .. offsets[w+1]).
struct WalkSet {
  std::vector<std::int64_t> offsets{0};
  std::vector<int> nodes;

  int walk_count() const { return static_cast<int>(offsets.size()) - 1; }
  std::span<const int> walk(int w) const {
    return std::span<const int>(nodes).subspan(
        static_cast<std::size_t>(offsets[static_cast<std::size_t>(w)]),
        static_cast<std::size_t>(offsets[static_cast<std::size_t>(w) + 1] -
                                 offsets[static_cast<std::size_t>(w)]));
  }
};

// Second-order biased walks. Transition weights from (prev, cur) to x:
// 1/p when x == prev, 1 when x is a common neighbor of prev and cur,
// 1/q otherwise. The first move from the start node is uniform. Nodes with
// no neighbors yield single-node walks. Walks are generated in parallel with
// per-walk derived seeds, so the result is independent of scheduling.
WalkSet biased_walks(const UndirectedView& g, const WalkConfig& config);

struct LocalityStats {
  std::map<int, double> distribution;  // max BFS distance from origin -> fraction of walks
  double mean = 0.0;
  double stddev = 0.0;
  double sem = 0.0;
  long long walks = 0;
};

// Shortest-path distance between each walk's origin and its farthest visited
// node; the walk-locality diagnostic.
LocalityStats walk_locality(const WalkSet& walks, const UndirectedView& g);

struct EmbeddingTable {
  int dimension = 0;
  std::vector<std::string> ids;                 // aligned with vectors
  std::vector<std::vector<double>> vectors;
  std::unordered_map<std::string, int> index;

  bool contains(std::string_view id) const { return index.count(std::string(id)) > 0; }
  const std::vector<double>& vector_for(std::string_view id) const;
};

// Skip-gram with negative sampling over walk co-occurrences (window pairs).
// Sequential and deterministic for a given seed. node_ids maps walk node
// indices to external identifiers.
EmbeddingTable train_skipgram(const WalkSet& walks, const WalkConfig& config,
                              std::vector<std::string> node_ids);

// Full pipeline: undirected view -> walks -> skip-gram.
EmbeddingTable node_embeddings(const SignedDigraph& g, const WalkConfig& config);

enum class MergeOp { Hadamard, Average, AbsDiff, SquaredDiff, Concat };

MergeOp parse_merge(std::string_view name);
std::string merge_name(MergeOp op);

// Element-wise merge of two node embeddings into one edge feature vector.
// Concat yields 2*dimension entries, the others dimension.
std::vector<double> embed_edge(const EmbeddingTable& table, std::string_view i,
                               std::string_view j, MergeOp op = MergeOp::Hadamard);

// SMOTE oversampling: returns the minority class grown to target_count
// vectors, original points first, then synthetic points interpolated between
// a minority point and one of its k nearest minority neighbors.
std::vector<std::vector<double>> smote(std::span<const std::vector<double>> minority,
                                       int k_neighbors, int target_count, std::uint64_t seed);

void write_embeddings_csv(std::ostream& out, const EmbeddingTable& table);
void write_embeddings_binary(std::ostream& out, const EmbeddingTable& table);
EmbeddingTable read_embeddings_binary(std::istream& in);
void write_walks(std::ostream& out, const WalkSet& walks, std::span<const std::string> node_ids);

}  // namespace socnet
