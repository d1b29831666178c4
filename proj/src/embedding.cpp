#include "socnet/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <ostream>
#include <queue>
#include <thread>

#include "socnet/csv.hpp"
#include "socnet/numeric.hpp"
#include "socnet/rand.hpp"

namespace socnet {

UndirectedView::UndirectedView(const SignedDigraph& g) {
  adj_.resize(static_cast<std::size_t>(g.node_count()));
  for (int v = 0; v < g.node_count(); ++v) {
    for (const auto& [dst, w] : g.out_edges(v)) {
      (void)w;
      adj_[static_cast<std::size_t>(v)].push_back(dst);
      adj_[static_cast<std::size_t>(dst)].push_back(v);
    }
  }
  for (auto& nbrs : adj_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
}

bool UndirectedView::adjacent(int u, int v) const {
  const auto& nbrs = adj_[static_cast<std::size_t>(u)];
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

namespace {

// Cumulative transition weights out of (prev, cur), cached per worker chunk.
// Walks revisit the same ordered pairs constantly, so the cache hit rate is
// high while staying free of cross-thread synchronization.
class SecondOrderSampler {
 public:
  SecondOrderSampler(const UndirectedView& g, double p, double q) : g_(g), p_(p), q_(q) {}

  int next(int prev, int cur, Rng& rng) {
    auto nbrs = g_.neighbors(cur);
    const std::vector<double>& cum = table(prev, cur, nbrs);
    double r = rng.uniform() * cum.back();
    auto it = std::upper_bound(cum.begin(), cum.end(), r);
    std::size_t idx = std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
    return nbrs[idx];
  }

 private:
  const std::vector<double>& table(int prev, int cur, std::span<const int> nbrs) {
    std::uint64_t key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(prev)) << 32) |
                        static_cast<std::uint32_t>(cur);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<double> cum;
    cum.reserve(nbrs.size());
    double total = 0.0;
    for (int x : nbrs) {
      double w;
      if (x == prev) {
        w = 1.0 / p_;
      } else if (g_.adjacent(x, prev)) {
        w = 1.0;
      } else {
        w = 1.0 / q_;
      }
      total += w;
      cum.push_back(total);
    }
    return cache_.emplace(key, std::move(cum)).first->second;
  }

  const UndirectedView& g_;
  double p_, q_;
  std::unordered_map<std::uint64_t, std::vector<double>> cache_;
};

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

WalkSet biased_walks(const UndirectedView& g, const WalkConfig& config) {
  if (g.node_count() == 0) throw EmptyInputError("biased_walks on empty graph");
  if (config.p <= 0.0 || config.q <= 0.0) throw ConfigError("walk parameters p, q must be > 0");
  if (config.walk_length < 1 || config.walks_per_node < 1) {
    throw ConfigError("walk_length and walks_per_node must be >= 1");
  }

  const int n = g.node_count();
  const int wpn = config.walks_per_node;

  // Walk w of node v occupies slot v*wpn + w; lengths are fixed up front so
  // workers write disjoint regions and the layout is deterministic.
  std::vector<std::int64_t> lengths(static_cast<std::size_t>(n) * wpn);
  for (int v = 0; v < n; ++v) {
    std::int64_t len = g.degree(v) == 0 ? 1 : config.walk_length + 1;
    for (int w = 0; w < wpn; ++w) lengths[static_cast<std::size_t>(v) * wpn + w] = len;
  }
  WalkSet walks;
  walks.offsets.resize(lengths.size() + 1);
  walks.offsets[0] = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    walks.offsets[i + 1] = walks.offsets[i] + lengths[i];
  }
  walks.nodes.resize(static_cast<std::size_t>(walks.offsets.back()));

  const int n_threads = std::min(resolve_threads(config.threads), n);
  auto run_chunk = [&](int lo, int hi) {
    SecondOrderSampler sampler(g, config.p, config.q);
    for (int v = lo; v < hi; ++v) {
      for (int w = 0; w < wpn; ++w) {
        Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(v),
                            static_cast<std::uint64_t>(w)));
        std::int64_t at = walks.offsets[static_cast<std::size_t>(v) * wpn + w];
        walks.nodes[static_cast<std::size_t>(at++)] = v;
        if (g.degree(v) == 0) continue;
        auto nbrs = g.neighbors(v);
        int cur = nbrs[rng.below(nbrs.size())];
        walks.nodes[static_cast<std::size_t>(at++)] = cur;
        int prev = v;
        for (int step = 1; step < config.walk_length; ++step) {
          int nxt = sampler.next(prev, cur, rng);
          walks.nodes[static_cast<std::size_t>(at++)] = nxt;
          prev = cur;
          cur = nxt;
        }
      }
    }
  };

  if (n_threads <= 1) {
    run_chunk(0, n);
  } else {
    std::vector<std::future<void>> futures;
    int chunk = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
      int lo = t * chunk;
      int hi = std::min(n, lo + chunk);
      if (lo >= hi) break;
      futures.push_back(std::async(std::launch::async, run_chunk, lo, hi));
    }
    for (auto& f : futures) f.get();
  }
  return walks;
}

LocalityStats walk_locality(const WalkSet& walks, const UndirectedView& g) {
  LocalityStats stats;
  std::vector<int> dist(static_cast<std::size_t>(g.node_count()), -1);
  std::vector<int> touched;
  int cached_origin = -1;

  auto bfs_from = [&](int origin) {
    for (int v : touched) dist[static_cast<std::size_t>(v)] = -1;
    touched.clear();
    std::queue<int> q;
    dist[static_cast<std::size_t>(origin)] = 0;
    touched.push_back(origin);
    q.push(origin);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : g.neighbors(u)) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          touched.push_back(v);
          q.push(v);
        }
      }
    }
    cached_origin = origin;
  };

  std::vector<double> maxima;
  maxima.reserve(static_cast<std::size_t>(walks.walk_count()));
  for (int w = 0; w < walks.walk_count(); ++w) {
    auto seq = walks.walk(w);
    int origin = seq.front();
    if (origin != cached_origin) bfs_from(origin);
    int far = 0;
    for (int v : seq) far = std::max(far, dist[static_cast<std::size_t>(v)]);
    stats.distribution[far] += 1.0;
    maxima.push_back(static_cast<double>(far));
  }
  stats.walks = walks.walk_count();
  if (stats.walks > 0) {
    for (auto& [d, c] : stats.distribution) c /= static_cast<double>(stats.walks);
    stats.mean = mean_of(maxima);
    stats.stddev = stddev_of(maxima);
    stats.sem = sem_of(maxima);
  }
  return stats;
}

const std::vector<double>& EmbeddingTable::vector_for(std::string_view id) const {
  auto it = index.find(std::string(id));
  if (it == index.end()) throw LookupError("no embedding for node '" + std::string(id) + "'");
  return vectors[static_cast<std::size_t>(it->second)];
}

EmbeddingTable train_skipgram(const WalkSet& walks, const WalkConfig& config,
                              std::vector<std::string> node_ids) {
  if (walks.walk_count() == 0) throw EmptyInputError("train_skipgram with no walks");
  const int n = static_cast<int>(node_ids.size());
  const int dim = config.dimension;
  if (dim < 1) throw ConfigError("embedding dimension must be >= 1");

  // Negative-sampling noise distribution: occurrence counts ^ 0.75.
  std::vector<double> noise_cum(static_cast<std::size_t>(n), 0.0);
  {
    std::vector<double> counts(static_cast<std::size_t>(n), 0.0);
    for (int v : walks.nodes) counts[static_cast<std::size_t>(v)] += 1.0;
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
      total += std::pow(counts[static_cast<std::size_t>(v)], 0.75);
      noise_cum[static_cast<std::size_t>(v)] = total;
    }
  }

  Rng rng(derive_seed(config.seed, 0x536b6970ULL));  // independent of walk streams
  std::vector<double> in(static_cast<std::size_t>(n) * dim);
  std::vector<double> out(static_cast<std::size_t>(n) * dim, 0.0);
  for (double& x : in) x = rng.uniform(-0.5 / dim, 0.5 / dim);

  // Total window pairs, for the linear learning-rate schedule.
  std::int64_t pairs_per_epoch = 0;
  for (int w = 0; w < walks.walk_count(); ++w) {
    std::int64_t len = walks.offsets[static_cast<std::size_t>(w) + 1] -
                       walks.offsets[static_cast<std::size_t>(w)];
    for (std::int64_t i = 0; i < len; ++i) {
      std::int64_t lo = std::max<std::int64_t>(0, i - config.window);
      std::int64_t hi = std::min<std::int64_t>(len - 1, i + config.window);
      pairs_per_epoch += hi - lo;
    }
  }
  const std::int64_t total_pairs = std::max<std::int64_t>(1, pairs_per_epoch * config.epochs);

  auto sample_noise = [&](Rng& r) {
    double x = r.uniform() * noise_cum.back();
    auto it = std::upper_bound(noise_cum.begin(), noise_cum.end(), x);
    return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(it - noise_cum.begin()),
                                                  noise_cum.size() - 1));
  };

  std::vector<double> grad_center(static_cast<std::size_t>(dim));
  std::int64_t processed = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (int w = 0; w < walks.walk_count(); ++w) {
      auto seq = walks.walk(w);
      const std::int64_t len = static_cast<std::int64_t>(seq.size());
      for (std::int64_t i = 0; i < len; ++i) {
        const int center = seq[static_cast<std::size_t>(i)];
        double* u = in.data() + static_cast<std::size_t>(center) * dim;
        std::int64_t lo = std::max<std::int64_t>(0, i - config.window);
        std::int64_t hi = std::min<std::int64_t>(len - 1, i + config.window);
        for (std::int64_t jx = lo; jx <= hi; ++jx) {
          if (jx == i) continue;
          double lr = config.lr0 *
                      std::max(1e-4, 1.0 - static_cast<double>(processed) /
                                               static_cast<double>(total_pairs));
          ++processed;
          std::fill(grad_center.begin(), grad_center.end(), 0.0);
          const int context = seq[static_cast<std::size_t>(jx)];
          // positive pair, then negatives against the same center
          for (int s = 0; s <= config.negatives; ++s) {
            int target;
            double label;
            if (s == 0) {
              target = context;
              label = 1.0;
            } else {
              target = sample_noise(rng);
              if (target == context) continue;
              label = 0.0;
            }
            double* v = out.data() + static_cast<std::size_t>(target) * dim;
            double z = 0.0;
            for (int d = 0; d < dim; ++d) z += u[d] * v[d];
            double g = (sigmoid(z) - label) * lr;
            for (int d = 0; d < dim; ++d) {
              grad_center[static_cast<std::size_t>(d)] += g * v[d];
              v[d] -= g * u[d];
            }
          }
          for (int d = 0; d < dim; ++d) u[d] -= grad_center[static_cast<std::size_t>(d)];
        }
      }
    }
  }

  EmbeddingTable table;
  table.dimension = dim;
  table.ids = std::move(node_ids);
  table.vectors.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    table.vectors[static_cast<std::size_t>(v)].assign(
        in.begin() + static_cast<std::int64_t>(v) * dim,
        in.begin() + static_cast<std::int64_t>(v + 1) * dim);
    table.index.emplace(table.ids[static_cast<std::size_t>(v)], v);
  }
  return table;
}

EmbeddingTable node_embeddings(const SignedDigraph& g, const WalkConfig& config) {
  UndirectedView view(g);
  WalkSet walks = biased_walks(view, config);
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(g.node_count()));
  for (int v = 0; v < g.node_count(); ++v) ids.push_back(g.attributes(v).student_id);
  return train_skipgram(walks, config, std::move(ids));
}

MergeOp parse_merge(std::string_view name) {
  if (name == "hadamard") return MergeOp::Hadamard;
  if (name == "average") return MergeOp::Average;
  if (name == "abs_diff") return MergeOp::AbsDiff;
  if (name == "squared_diff") return MergeOp::SquaredDiff;
  if (name == "concat") return MergeOp::Concat;
  throw ConfigError("unknown merge operator '" + std::string(name) + "'");
}

std::string merge_name(MergeOp op) {
  switch (op) {
    case MergeOp::Hadamard: return "hadamard";
    case MergeOp::Average: return "average";
    case MergeOp::AbsDiff: return "abs_diff";
    case MergeOp::SquaredDiff: return "squared_diff";
    case MergeOp::Concat: return "concat";
  }
  return "?";
}

std::vector<double> embed_edge(const EmbeddingTable& table, std::string_view i,
                               std::string_view j, MergeOp op) {
  const auto& a = table.vector_for(i);
  const auto& b = table.vector_for(j);
  std::vector<double> e;
  switch (op) {
    case MergeOp::Hadamard:
      e.resize(a.size());
      for (std::size_t d = 0; d < a.size(); ++d) e[d] = a[d] * b[d];
      break;
    case MergeOp::Average:
      e.resize(a.size());
      for (std::size_t d = 0; d < a.size(); ++d) e[d] = 0.5 * (a[d] + b[d]);
      break;
    case MergeOp::AbsDiff:
      e.resize(a.size());
      for (std::size_t d = 0; d < a.size(); ++d) e[d] = std::abs(a[d] - b[d]);
      break;
    case MergeOp::SquaredDiff:
      e.resize(a.size());
      for (std::size_t d = 0; d < a.size(); ++d) e[d] = (a[d] - b[d]) * (a[d] - b[d]);
      break;
    case MergeOp::Concat:
      e.reserve(a.size() * 2);
      e.insert(e.end(), a.begin(), a.end());
      e.insert(e.end(), b.begin(), b.end());
      break;
  }
  return e;
}

std::vector<std::vector<double>> smote(std::span<const std::vector<double>> minority,
                                       int k_neighbors, int target_count, std::uint64_t seed) {
  const int n = static_cast<int>(minority.size());
  if (k_neighbors < 1) throw std::invalid_argument("smote: k_neighbors must be >= 1");
  if (n < k_neighbors + 1) {
    throw std::invalid_argument("smote: need at least k_neighbors + 1 minority points");
  }
  if (target_count < n) {
    throw std::invalid_argument("smote: target_count below current minority size");
  }

  // k nearest minority neighbors of each point (brute force).
  std::vector<std::vector<int>> knn(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<double, int>> dists;
    dists.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double d2 = 0.0;
      for (std::size_t d = 0; d < minority[static_cast<std::size_t>(i)].size(); ++d) {
        double diff = minority[static_cast<std::size_t>(i)][d] -
                      minority[static_cast<std::size_t>(j)][d];
        d2 += diff * diff;
      }
      dists.emplace_back(d2, j);
    }
    std::partial_sort(dists.begin(), dists.begin() + k_neighbors, dists.end());
    for (int k = 0; k < k_neighbors; ++k) {
      knn[static_cast<std::size_t>(i)].push_back(dists[static_cast<std::size_t>(k)].second);
    }
  }

  std::vector<std::vector<double>> result(minority.begin(), minority.end());
  result.reserve(static_cast<std::size_t>(target_count));
  Rng rng(seed);
  while (static_cast<int>(result.size()) < target_count) {
    int base = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const auto& nn = knn[static_cast<std::size_t>(base)];
    int mate = nn[rng.below(nn.size())];
    double u = rng.uniform();
    const auto& x = minority[static_cast<std::size_t>(base)];
    const auto& y = minority[static_cast<std::size_t>(mate)];
    std::vector<double> synth(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) synth[d] = x[d] + u * (y[d] - x[d]);
    result.push_back(std::move(synth));
  }
  return result;
}

void write_embeddings_csv(std::ostream& out, const EmbeddingTable& table) {
  out << "node_id";
  for (int d = 0; d < table.dimension; ++d) out << ",e" << d;
  out << '\n';
  for (std::size_t v = 0; v < table.ids.size(); ++v) {
    out << table.ids[v];
    for (double x : table.vectors[v]) out << ',' << csv::format_double(x);
    out << '\n';
  }
}

void write_embeddings_binary(std::ostream& out, const EmbeddingTable& table) {
  const char magic[8] = {'S', 'N', 'E', 'M', 'B', '0', '1', '\n'};
  out.write(magic, 8);
  std::uint32_t n = static_cast<std::uint32_t>(table.ids.size());
  std::uint32_t dim = static_cast<std::uint32_t>(table.dimension);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&dim), 4);
  for (std::size_t v = 0; v < table.ids.size(); ++v) {
    std::uint32_t len = static_cast<std::uint32_t>(table.ids[v].size());
    out.write(reinterpret_cast<const char*>(&len), 4);
    out.write(table.ids[v].data(), len);
    out.write(reinterpret_cast<const char*>(table.vectors[v].data()),
              static_cast<std::streamsize>(sizeof(double) * table.vectors[v].size()));
  }
}

EmbeddingTable read_embeddings_binary(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "SNEMB01\n", 8) != 0) {
    throw ParseError("bad embedding file magic");
  }
  std::uint32_t n = 0, dim = 0;
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&dim), 4);
  EmbeddingTable table;
  table.dimension = static_cast<int>(dim);
  table.ids.resize(n);
  table.vectors.resize(n);
  for (std::uint32_t v = 0; v < n; ++v) {
    std::uint32_t len = 0;
    in.read(reinterpret_cast<char*>(&len), 4);
    table.ids[v].resize(len);
    in.read(table.ids[v].data(), len);
    table.vectors[v].resize(dim);
    in.read(reinterpret_cast<char*>(table.vectors[v].data()),
            static_cast<std::streamsize>(sizeof(double) * dim));
    table.index.emplace(table.ids[v], static_cast<int>(v));
  }
  if (!in) throw ParseError("truncated embedding file");
  return table;
}

void write_walks(std::ostream& out, const WalkSet& walks, std::span<const std::string> node_ids) {
  for (int w = 0; w < walks.walk_count(); ++w) {
    auto seq = walks.walk(w);
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out << ' ';
      out << node_ids[static_cast<std::size_t>(seq[i])];
    }
    out << '\n';
  }
}

}  // namespace socnet
