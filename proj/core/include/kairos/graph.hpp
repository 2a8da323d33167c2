#pragma once

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kairos/corpus.hpp"
#include "kairos/feature_vector.hpp"

namespace kairos {

/// Friendship network: no self-loops, no duplicate edges. Nodes are kept in
/// sorted id order so every computation iterates deterministically.
struct UndirectedGraph {
  std::vector<std::string> nodes;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<int>> adj;  // sorted neighbor lists
  std::size_t edge_count = 0;

  int node_index(const std::string& id) const;  // -1 when absent
};

/// Voter network: edge (x, y) when x voted in a debate y debated; the
/// weight counts how many times. An edge does not imply x voted *for* y.
struct WeightedDigraph {
  std::vector<std::string> nodes;
  std::unordered_map<std::string, int> index;
  std::vector<std::vector<std::pair<int, double>>> out;  // sorted by target
  std::vector<std::vector<std::pair<int, double>>> in;   // sorted by source
  std::size_t edge_count = 0;

  int node_index(const std::string& id) const;
};

/// Edge iff either profile lists the other as friend (symmetrized).
UndirectedGraph build_friendship(const Corpus& corpus);

/// Both debaters of a voted debate receive an in-edge from the voter.
WeightedDigraph build_voter_graph(const Corpus& corpus);

enum class DegreeMode { Undirected, In, Out };

/// degree / (n - 1); the digraph uses weighted degree sums. Needs >= 2 nodes.
std::vector<double> degree_centrality(const UndirectedGraph& g);
std::vector<double> degree_centrality(const WeightedDigraph& g, DegreeMode mode);

struct PagerankOptions {
  double damping = 0.85;
  double tol = 1e-9;
  int max_iter = 200;
};

/// Power iteration with uniform teleport; dangling mass is spread
/// uniformly. Scores sum to 1. Throws on non-convergence (reports the
/// residual).
std::vector<double> pagerank(const UndirectedGraph& g, const PagerankOptions& opts = {});
std::vector<double> pagerank(const WeightedDigraph& g, const PagerankOptions& opts = {});

struct HitsScores {
  std::vector<double> hub;
  std::vector<double> authority;
};

/// Alternating weighted updates with L2 normalization each sweep.
HitsScores hits(const WeightedDigraph& g, double tol = 1e-9, int max_iter = 200);

/// Everything user_graph_features needs, computed once per corpus.
struct NetworkFeatureTables {
  UndirectedGraph friendship;
  WeightedDigraph voter;
  std::vector<double> friend_centrality;
  std::vector<double> friend_pagerank;
  std::vector<double> voter_in_centrality;
  std::vector<double> voter_out_centrality;
  std::vector<double> voter_pagerank;
  HitsScores voter_hits;
};

NetworkFeatureTables compute_network_features(const Corpus& corpus);

/// The ten network scalars in fixed schema order: friendship degree,
/// degree centrality and PageRank, then voter in/out degree (raw counts),
/// weighted in/out centrality, PageRank, hub and authority. Users absent
/// from a graph get zeros.
FeatureVector user_graph_features(const NetworkFeatureTables& tables, const std::string& user);

const std::vector<std::string>& user_graph_feature_schema();

/// Edge list export, one `src<TAB>dst<TAB>weight` line per edge.
std::string edge_list_tsv(const UndirectedGraph& g);
std::string edge_list_tsv(const WeightedDigraph& g);

}  // namespace kairos
