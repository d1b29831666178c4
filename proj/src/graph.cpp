#include "socnet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <unordered_set>

#include "socnet/csv.hpp"

namespace socnet {

namespace {

// Sorted (neighbor, weight) lists; classic lower_bound insert/lookup.
const std::pair<int, int>* find_adj(const std::vector<std::pair<int, int>>& adj, int node) {
  auto it = std::lower_bound(adj.begin(), adj.end(), node,
                             [](const std::pair<int, int>& e, int v) { return e.first < v; });
  if (it == adj.end() || it->first != node) return nullptr;
  return &*it;
}

void insert_adj(std::vector<std::pair<int, int>>& adj, int node, int weight) {
  auto it = std::lower_bound(adj.begin(), adj.end(), node,
                             [](const std::pair<int, int>& e, int v) { return e.first < v; });
  adj.insert(it, {node, weight});
}

}  // namespace

Gender parse_gender(std::string_view code) {
  if (code == "M") return Gender::Male;
  if (code == "F") return Gender::Female;
  if (code == "NB") return Gender::NonBinary;
  throw ParseError("unknown gender code '" + std::string(code) + "' (expected M, F or NB)");
}

std::string gender_code(Gender g) {
  switch (g) {
    case Gender::Male: return "M";
    case Gender::Female: return "F";
    case Gender::NonBinary: return "NB";
  }
  return "?";
}

int prosociality_level_index(double p) {
  for (int i = 0; i < 4; ++i) {
    if (std::abs(p - kProsocialityLevels[static_cast<std::size_t>(i)]) <= 1e-9) return i;
  }
  return -1;
}

double prosociality_score(int q1, int q2, int q3) {
  return 1.0 - static_cast<double>(q1 + q2 + q3) / 3.0;
}

bool valid_weight(int w) { return w == -2 || w == -1 || w == 1 || w == 2; }

int SignedDigraph::add_node(StudentAttributes attrs) {
  if (attrs.student_id.empty()) throw ValidationError("node with empty student_id");
  if (index_.count(attrs.student_id)) {
    throw ValidationError("duplicate student_id '" + attrs.student_id + "'");
  }
  if (attrs.crt < 0 || attrs.crt > 3) {
    throw ValidationError("crt out of range for student '" + attrs.student_id + "'");
  }
  if (prosociality_level_index(attrs.prosociality) < 0) {
    throw ValidationError("prosociality not in {0,1/3,2/3,1} for student '" + attrs.student_id +
                          "'");
  }
  int idx = static_cast<int>(nodes_.size());
  index_.emplace(attrs.student_id, idx);
  nodes_.push_back(std::move(attrs));
  out_.emplace_back();
  in_.emplace_back();
  return idx;
}

void SignedDigraph::check_node(int v) const {
  if (v < 0 || v >= node_count()) {
    throw LookupError("node index " + std::to_string(v) + " out of range");
  }
}

void SignedDigraph::add_edge(int src, int dst, int weight) {
  check_node(src);
  check_node(dst);
  if (src == dst) throw ValidationError("self-loop on node '" + nodes_[src].student_id + "'");
  if (!valid_weight(weight)) {
    throw ValidationError("edge weight " + std::to_string(weight) + " not in {-2,-1,1,2}");
  }
  if (find_adj(out_[static_cast<std::size_t>(src)], dst)) {
    throw ValidationError("duplicate edge " + nodes_[src].student_id + " -> " +
                          nodes_[dst].student_id);
  }
  insert_adj(out_[static_cast<std::size_t>(src)], dst, weight);
  insert_adj(in_[static_cast<std::size_t>(dst)], src, weight);
  ++n_edges_;
}

void SignedDigraph::add_edge(std::string_view src_id, std::string_view dst_id, int weight) {
  add_edge(index_of(src_id), index_of(dst_id), weight);
}

void SignedDigraph::set_weight(int src, int dst, int weight) {
  check_node(src);
  check_node(dst);
  if (!valid_weight(weight)) {
    throw ValidationError("edge weight " + std::to_string(weight) + " not in {-2,-1,1,2}");
  }
  auto* oe = const_cast<std::pair<int, int>*>(find_adj(out_[static_cast<std::size_t>(src)], dst));
  auto* ie = const_cast<std::pair<int, int>*>(find_adj(in_[static_cast<std::size_t>(dst)], src));
  if (!oe || !ie) {
    throw LookupError("set_weight on absent edge " + nodes_[src].student_id + " -> " +
                      nodes_[dst].student_id);
  }
  oe->second = weight;
  ie->second = weight;
}

bool SignedDigraph::has_node(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

int SignedDigraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw LookupError("unknown student_id '" + std::string(id) + "'");
  return it->second;
}

bool SignedDigraph::has_edge(int src, int dst) const {
  check_node(src);
  check_node(dst);
  return find_adj(out_[static_cast<std::size_t>(src)], dst) != nullptr;
}

int SignedDigraph::weight(int src, int dst) const {
  check_node(src);
  check_node(dst);
  const auto* e = find_adj(out_[static_cast<std::size_t>(src)], dst);
  return e ? e->second : 0;
}

std::vector<Edge> SignedDigraph::edges() const {
  std::vector<Edge> result;
  result.reserve(static_cast<std::size_t>(n_edges_));
  for (int v = 0; v < node_count(); ++v) {
    for (const auto& [dst, w] : out_[static_cast<std::size_t>(v)]) {
      result.push_back({v, dst, w});
    }
  }
  return result;
}

namespace {

struct NodeRecord {
  StudentAttributes attrs;
  bool complete = false;
};

int parse_int_field(const std::string& s, const char* what, int line) {
  try {
    std::size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError("row " + std::to_string(line) + ": bad " + std::string(what) + " '" + s +
                     "'");
  }
}

int parse_binary_field(const std::string& s, const char* what, int line) {
  int v = parse_int_field(s, what, line);
  if (v != 0 && v != 1) {
    throw ValidationError("row " + std::to_string(line) + ": " + std::string(what) +
                          " must be 0 or 1");
  }
  return v;
}

}  // namespace

LoadedNetwork load_network(std::istream& nodes_csv, std::istream& edges_csv) {
  const std::vector<std::string> node_header = {"student_id", "school_id", "course",
                                                "class_group", "gender",    "crt",
                                                "q1",          "q2",        "q3"};
  const std::vector<std::string> edge_header = {"src", "dst", "weight"};

  auto node_rows = csv::read_rows(nodes_csv);
  if (node_rows.empty() || node_rows.front().fields != node_header) {
    throw ParseError("nodes CSV: missing or wrong header");
  }
  auto edge_rows = csv::read_rows(edges_csv);
  if (edge_rows.empty() || edge_rows.front().fields != edge_header) {
    throw ParseError("edges CSV: missing or wrong header");
  }

  LoadedNetwork result;
  auto& g = result.graph;
  auto& report = result.report;

  std::unordered_set<std::string> seen_ids;
  for (std::size_t r = 1; r < node_rows.size(); ++r) {
    const auto& row = node_rows[r];
    if (row.fields.size() != node_header.size()) {
      throw ParseError("row " + std::to_string(row.line) + ": expected " +
                       std::to_string(node_header.size()) + " node fields, got " +
                       std::to_string(row.fields.size()));
    }
    const std::string& id = row.fields[0];
    if (id.empty()) throw ParseError("row " + std::to_string(row.line) + ": empty student_id");
    if (!seen_ids.insert(id).second) {
      throw ValidationError("row " + std::to_string(row.line) + ": duplicate student_id '" + id +
                            "'");
    }
    bool missing = false;
    for (std::size_t f = 1; f < row.fields.size(); ++f) {
      if (row.fields[f].empty()) missing = true;
    }
    if (missing) {
      report.dropped_nodes.push_back(id);
      continue;
    }
    StudentAttributes attrs;
    attrs.student_id = id;
    attrs.school_id = row.fields[1];
    attrs.course = parse_int_field(row.fields[2], "course", row.line);
    attrs.class_group = row.fields[3];
    try {
      attrs.gender = parse_gender(row.fields[4]);
    } catch (const ParseError&) {
      throw ParseError("row " + std::to_string(row.line) + ": bad gender '" + row.fields[4] + "'");
    }
    attrs.crt = parse_int_field(row.fields[5], "crt", row.line);
    if (attrs.crt < 0 || attrs.crt > 3) {
      throw ValidationError("row " + std::to_string(row.line) + ": crt must be in 0..3");
    }
    int q1 = parse_binary_field(row.fields[6], "q1", row.line);
    int q2 = parse_binary_field(row.fields[7], "q2", row.line);
    int q3 = parse_binary_field(row.fields[8], "q3", row.line);
    attrs.prosociality = prosociality_score(q1, q2, q3);
    g.add_node(std::move(attrs));
  }
  report.kept_nodes = g.node_count();

  std::unordered_set<long long> seen_pairs;
  for (std::size_t r = 1; r < edge_rows.size(); ++r) {
    const auto& row = edge_rows[r];
    if (row.fields.size() != edge_header.size()) {
      throw ParseError("row " + std::to_string(row.line) + ": expected 3 edge fields, got " +
                       std::to_string(row.fields.size()));
    }
    const std::string& src = row.fields[0];
    const std::string& dst = row.fields[1];
    int w = parse_int_field(row.fields[2], "weight", row.line);
    if (!valid_weight(w)) {
      throw ValidationError("row " + std::to_string(row.line) + ": weight must be -2, -1, 1 or 2");
    }
    if (src == dst) {
      throw ValidationError("row " + std::to_string(row.line) + ": self-loop on '" + src + "'");
    }
    if (!g.has_node(src) || !g.has_node(dst)) {
      ++report.dropped_edges;  // nominator or nominee was dropped
      continue;
    }
    long long key = static_cast<long long>(g.index_of(src)) * (g.node_count() + 1LL) +
                    g.index_of(dst);
    if (!seen_pairs.insert(key).second) {
      throw ValidationError("row " + std::to_string(row.line) + ": duplicate edge " + src +
                            " -> " + dst);
    }
    g.add_edge(src, dst, w);
  }
  report.kept_edges = g.edge_count();
  return result;
}

LoadedNetwork load_network_files(const std::string& nodes_path, const std::string& edges_path) {
  std::ifstream nodes(nodes_path);
  if (!nodes) throw NotFoundError("cannot open nodes CSV '" + nodes_path + "'");
  std::ifstream edges(edges_path);
  if (!edges) throw NotFoundError("cannot open edges CSV '" + edges_path + "'");
  return load_network(nodes, edges);
}

int triadic_influence(const SignedDigraph& g, int i, int j) {
  if (i == j) throw ValidationError("triadic influence undefined for i == j");
  int sum = 0;
  for (const auto& [k, w_ik] : g.out_edges(i)) {
    int w_kj = g.weight(k, j);
    if (w_kj != 0) sum += w_ik * w_kj;
  }
  return sum;
}

int triadic_influence(const SignedDigraph& g, std::string_view i, std::string_view j) {
  return triadic_influence(g, g.index_of(i), g.index_of(j));
}

int two_path_count(const SignedDigraph& g, int i, int j) {
  if (i == j) throw ValidationError("two-path count undefined for i == j");
  int count = 0;
  for (const auto& [k, w_ik] : g.out_edges(i)) {
    (void)w_ik;
    if (g.has_edge(k, j)) ++count;
  }
  return count;
}

int two_path_count(const SignedDigraph& g, std::string_view i, std::string_view j) {
  return two_path_count(g, g.index_of(i), g.index_of(j));
}

std::vector<EdgeInfluence> influence_matrix(const SignedDigraph& g) {
  // Accumulator slot per declared edge; contributions are gathered by
  // scanning each intermediate node's in- and out-neighborhood once.
  std::unordered_map<long long, int> slot;
  auto edge_list = g.edges();
  slot.reserve(edge_list.size() * 2);
  const long long stride = g.node_count() + 1LL;
  std::vector<EdgeInfluence> result(edge_list.size());
  for (std::size_t e = 0; e < edge_list.size(); ++e) {
    result[e] = {edge_list[e].src, edge_list[e].dst, edge_list[e].weight, 0, 0};
    slot.emplace(edge_list[e].src * stride + edge_list[e].dst, static_cast<int>(e));
  }
  for (int k = 0; k < g.node_count(); ++k) {
    for (const auto& [i, w_ik] : g.in_edges(k)) {
      for (const auto& [j, w_kj] : g.out_edges(k)) {
        if (i == j) continue;
        auto it = slot.find(i * stride + j);
        if (it == slot.end()) continue;
        result[static_cast<std::size_t>(it->second)].influence += w_ik * w_kj;
        result[static_cast<std::size_t>(it->second)].two_paths += 1;
      }
    }
  }
  return result;
}

std::map<int, double> relation_type_distribution(const SignedDigraph& g) {
  if (g.edge_count() == 0) throw EmptyInputError("relation_type_distribution on empty graph");
  std::map<int, double> dist;
  for (int v = 0; v < g.node_count(); ++v) {
    for (const auto& [dst, w] : g.out_edges(v)) {
      (void)dst;
      dist[w] += 1.0;
    }
  }
  for (auto& [w, count] : dist) count /= static_cast<double>(g.edge_count());
  return dist;
}

std::map<int, double> two_path_histogram(const SignedDigraph& g) {
  if (g.edge_count() == 0) throw EmptyInputError("two_path_histogram on empty graph");
  std::map<int, double> hist;
  for (const auto& entry : influence_matrix(g)) hist[entry.two_paths] += 1.0;
  for (auto& [c, frac] : hist) frac /= static_cast<double>(g.edge_count());
  return hist;
}

std::array<double, 4> prosociality_distribution(const SignedDigraph& g) {
  if (g.node_count() == 0) throw EmptyInputError("prosociality_distribution on empty graph");
  std::array<double, 4> dist{};
  for (int v = 0; v < g.node_count(); ++v) {
    int level = prosociality_level_index(g.attributes(v).prosociality);
    dist[static_cast<std::size_t>(level)] += 1.0;
  }
  for (double& d : dist) d /= static_cast<double>(g.node_count());
  return dist;
}

NominationStats mean_nominations_by_prosociality(const SignedDigraph& g, bool positive,
                                                 bool outgoing) {
  if (g.node_count() == 0) throw EmptyInputError("nomination stats on empty graph");
  std::array<std::vector<double>, 4> counts;
  for (int v = 0; v < g.node_count(); ++v) {
    int level = prosociality_level_index(g.attributes(v).prosociality);
    auto edges = outgoing ? g.out_edges(v) : g.in_edges(v);
    int n = 0;
    for (const auto& [other, w] : edges) {
      (void)other;
      if ((positive && w > 0) || (!positive && w < 0)) ++n;
    }
    counts[static_cast<std::size_t>(level)].push_back(static_cast<double>(n));
  }
  NominationStats stats;
  for (std::size_t level = 0; level < 4; ++level) {
    const auto& c = counts[level];
    stats.students[level] = static_cast<int>(c.size());
    if (c.empty()) continue;
    double mean = 0.0;
    for (double x : c) mean += x;
    mean /= static_cast<double>(c.size());
    double var = 0.0;
    for (double x : c) var += (x - mean) * (x - mean);
    stats.mean[level] = mean;
    if (c.size() > 1) {
      var /= static_cast<double>(c.size() - 1);
      stats.sem[level] = std::sqrt(var / static_cast<double>(c.size()));
    }
  }
  return stats;
}

}  // namespace socnet
