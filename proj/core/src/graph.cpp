#include "kairos/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "kairos/util.hpp"

namespace kairos {

int UndirectedGraph::node_index(const std::string& id) const {
  auto it = index.find(id);
  return it == index.end() ? -1 : it->second;
}

int WeightedDigraph::node_index(const std::string& id) const {
  auto it = index.find(id);
  return it == index.end() ? -1 : it->second;
}

namespace {

template <typename G>
void assign_nodes(G& g, const std::set<std::string>& ids) {
  g.nodes.assign(ids.begin(), ids.end());  // already sorted
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    g.index.emplace(g.nodes[i], static_cast<int>(i));
}

}  // namespace

UndirectedGraph build_friendship(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& [id, user] : corpus.users) {
    ids.insert(id);
    for (const auto& f : user.friends) ids.insert(f);
  }
  UndirectedGraph g;
  assign_nodes(g, ids);
  g.adj.resize(g.nodes.size());

  std::set<std::pair<int, int>> edges;
  for (const auto& [id, user] : corpus.users) {
    int a = g.index.at(id);
    for (const auto& f : user.friends) {
      int b = g.index.at(f);
      if (a == b) continue;  // no self-loops
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  for (const auto& [a, b] : edges) {
    g.adj[a].push_back(b);
    g.adj[b].push_back(a);
  }
  for (auto& neighbors : g.adj) std::sort(neighbors.begin(), neighbors.end());
  g.edge_count = edges.size();
  return g;
}

WeightedDigraph build_voter_graph(const Corpus& corpus) {
  std::set<std::string> ids;
  for (const auto& [id, user] : corpus.users) ids.insert(id);
  for (const Debate& d : corpus.debates) {
    ids.insert(d.pro_user);
    ids.insert(d.con_user);
    for (const Ballot& b : d.ballots) ids.insert(b.voter_id);
  }
  WeightedDigraph g;
  assign_nodes(g, ids);
  g.out.resize(g.nodes.size());
  g.in.resize(g.nodes.size());

  std::map<std::pair<int, int>, double> weights;
  for (const Debate& d : corpus.debates) {
    int pro = g.index.at(d.pro_user);
    int con = g.index.at(d.con_user);
    for (const Ballot& b : d.ballots) {
      int voter = g.index.at(b.voter_id);
      weights[{voter, pro}] += 1.0;
      weights[{voter, con}] += 1.0;
    }
  }
  for (const auto& [edge, w] : weights) {
    g.out[edge.first].emplace_back(edge.second, w);
    g.in[edge.second].emplace_back(edge.first, w);
  }
  for (auto& edges : g.out)
    std::sort(edges.begin(), edges.end());
  for (auto& edges : g.in)
    std::sort(edges.begin(), edges.end());
  g.edge_count = weights.size();
  return g;
}

std::vector<double> degree_centrality(const UndirectedGraph& g) {
  const std::size_t n = g.nodes.size();
  if (n < 2) throw UsageError("degree_centrality: needs at least 2 nodes");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = static_cast<double>(g.adj[i].size()) / static_cast<double>(n - 1);
  return out;
}

std::vector<double> degree_centrality(const WeightedDigraph& g, DegreeMode mode) {
  const std::size_t n = g.nodes.size();
  if (n < 2) throw UsageError("degree_centrality: needs at least 2 nodes");
  if (mode == DegreeMode::Undirected)
    throw UsageError("degree_centrality: digraph needs In or Out mode");
  std::vector<double> out(n, 0.0);
  const auto& edges = mode == DegreeMode::In ? g.in : g.out;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0;
    for (const auto& [other, w] : edges[i]) sum += w;
    out[i] = sum / static_cast<double>(n - 1);
  }
  return out;
}

namespace {

std::vector<double> pagerank_iterate(std::size_t n,
                                     const std::vector<std::vector<std::pair<int, double>>>& out_edges,
                                     const PagerankOptions& opts) {
  if (n == 0) throw UsageError("pagerank: empty graph");
  std::vector<double> out_weight(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, w] : out_edges[i]) out_weight[i] += w;

  std::vector<double> rank(n, 1.0 / n), next(n);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    double dangling = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (out_weight[i] == 0) dangling += rank[i];
    const double base = (1.0 - opts.damping) / n + opts.damping * dangling / n;
    std::fill(next.begin(), next.end(), base);
    for (std::size_t i = 0; i < n; ++i) {
      if (out_weight[i] == 0) continue;
      const double share = opts.damping * rank[i] / out_weight[i];
      for (const auto& [j, w] : out_edges[i]) next[j] += share * w;
    }
    double delta = 0;
    for (std::size_t i = 0; i < n; ++i) delta += std::fabs(next[i] - rank[i]);
    rank.swap(next);
    if (delta < opts.tol) return rank;
  }
  double residual = 0;
  for (std::size_t i = 0; i < n; ++i) residual += std::fabs(next[i] - rank[i]);
  throw UsageError("pagerank: no convergence after " + std::to_string(opts.max_iter) +
                   " iterations (residual " + format_double(residual, 12) + ")");
}

}  // namespace

std::vector<double> pagerank(const UndirectedGraph& g, const PagerankOptions& opts) {
  std::vector<std::vector<std::pair<int, double>>> out_edges(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i)
    for (int j : g.adj[i]) out_edges[i].emplace_back(j, 1.0);
  return pagerank_iterate(g.nodes.size(), out_edges, opts);
}

std::vector<double> pagerank(const WeightedDigraph& g, const PagerankOptions& opts) {
  return pagerank_iterate(g.nodes.size(), g.out, opts);
}

HitsScores hits(const WeightedDigraph& g, double tol, int max_iter) {
  const std::size_t n = g.nodes.size();
  if (n == 0) throw UsageError("hits: empty graph");
  HitsScores scores;
  scores.hub.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));
  scores.authority.assign(n, 1.0 / std::sqrt(static_cast<double>(n)));

  auto normalize = [](std::vector<double>& v) {
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& x : v) x /= norm;
  };

  std::vector<double> new_auth(n), new_hub(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    // a = normalize(A^T h), then h = normalize(A a); weights multiply both.
    std::fill(new_auth.begin(), new_auth.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& [j, w] : g.out[i]) new_auth[j] += w * scores.hub[i];
    normalize(new_auth);
    std::fill(new_hub.begin(), new_hub.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& [j, w] : g.out[i]) new_hub[i] += w * new_auth[j];
    normalize(new_hub);

    double delta = 0;
    for (std::size_t i = 0; i < n; ++i)
      delta += std::fabs(new_auth[i] - scores.authority[i]) +
               std::fabs(new_hub[i] - scores.hub[i]);
    scores.authority = new_auth;
    scores.hub = new_hub;
    if (delta < tol) return scores;
  }
  throw UsageError("hits: no convergence after " + std::to_string(max_iter) + " iterations");
}

NetworkFeatureTables compute_network_features(const Corpus& corpus) {
  NetworkFeatureTables t;
  t.friendship = build_friendship(corpus);
  t.voter = build_voter_graph(corpus);
  const std::size_t fn = t.friendship.nodes.size();
  const std::size_t vn = t.voter.nodes.size();
  t.friend_centrality = fn >= 2 ? degree_centrality(t.friendship) : std::vector<double>(fn, 0.0);
  t.friend_pagerank = fn ? pagerank(t.friendship) : std::vector<double>{};
  t.voter_in_centrality =
      vn >= 2 ? degree_centrality(t.voter, DegreeMode::In) : std::vector<double>(vn, 0.0);
  t.voter_out_centrality =
      vn >= 2 ? degree_centrality(t.voter, DegreeMode::Out) : std::vector<double>(vn, 0.0);
  t.voter_pagerank = vn ? pagerank(t.voter) : std::vector<double>{};
  t.voter_hits = vn ? hits(t.voter) : HitsScores{};
  return t;
}

const std::vector<std::string>& user_graph_feature_schema() {
  static const std::vector<std::string> schema = {
      "friend_degree",       "friend_degree_centrality", "friend_pagerank",
      "voter_in_degree",     "voter_out_degree",         "voter_in_centrality",
      "voter_out_centrality", "voter_pagerank",          "voter_hub",
      "voter_authority"};
  return schema;
}

FeatureVector user_graph_features(const NetworkFeatureTables& t, const std::string& user) {
  FeatureVector fv;
  const auto& schema = user_graph_feature_schema();
  std::vector<double> values(schema.size(), 0.0);

  int fi = t.friendship.node_index(user);
  if (fi >= 0) {
    values[0] = static_cast<double>(t.friendship.adj[fi].size());
    values[1] = fi < static_cast<int>(t.friend_centrality.size()) ? t.friend_centrality[fi] : 0.0;
    values[2] = fi < static_cast<int>(t.friend_pagerank.size()) ? t.friend_pagerank[fi] : 0.0;
  }
  int vi = t.voter.node_index(user);
  if (vi >= 0) {
    values[3] = static_cast<double>(t.voter.in[vi].size());   // raw edge counts
    values[4] = static_cast<double>(t.voter.out[vi].size());
    values[5] = vi < static_cast<int>(t.voter_in_centrality.size()) ? t.voter_in_centrality[vi] : 0.0;
    values[6] =
        vi < static_cast<int>(t.voter_out_centrality.size()) ? t.voter_out_centrality[vi] : 0.0;
    values[7] = vi < static_cast<int>(t.voter_pagerank.size()) ? t.voter_pagerank[vi] : 0.0;
    values[8] = vi < static_cast<int>(t.voter_hits.hub.size()) ? t.voter_hits.hub[vi] : 0.0;
    values[9] =
        vi < static_cast<int>(t.voter_hits.authority.size()) ? t.voter_hits.authority[vi] : 0.0;
  }
  for (std::size_t i = 0; i < schema.size(); ++i) fv.push(schema[i], values[i]);
  return fv;
}

std::string edge_list_tsv(const UndirectedGraph& g) {
  std::string out;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (int j : g.adj[i]) {
      if (static_cast<int>(i) < j)
        out += g.nodes[i] + "\t" + g.nodes[j] + "\t1\n";
    }
  }
  return out;
}

std::string edge_list_tsv(const WeightedDigraph& g) {
  std::string out;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    for (const auto& [j, w] : g.out[i])
      out += g.nodes[i] + "\t" + g.nodes[j] + "\t" + format_double(w, 0) + "\n";
  }
  return out;
}

}  // namespace kairos
