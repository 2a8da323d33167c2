#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "kairos/graph.hpp"
#include "kairos/util.hpp"

using namespace kairos;

namespace {

Corpus users_with_friends(
    std::initializer_list<std::pair<const char*, std::initializer_list<const char*>>> listing) {
  Corpus c;
  for (const auto& [id, friends] : listing) {
    UserProfile u;
    u.user_id = id;
    for (const char* f : friends) u.friends.insert(f);
    c.users.emplace(u.user_id, std::move(u));
  }
  return c;
}

Debate voted_debate(const std::string& id, const std::string& pro, const std::string& con,
                    std::initializer_list<const char*> voters) {
  Debate d;
  d.debate_id = id;
  d.topic = "t";
  d.category = "c";
  d.pro_user = pro;
  d.con_user = con;
  d.rounds.push_back({1, "x.", "y."});
  for (const char* v : voters) {
    Ballot b;
    b.voter_id = v;
    b.choices.convincing_arguments = Choice::Pro;
    d.ballots.push_back(b);
  }
  return d;
}

struct DenseDigraph {
  int n = 0;
  std::vector<std::vector<double>> w;  // w[i][j]: edge i -> j
};

DenseDigraph random_digraph(Rng& rng, int max_nodes = 8) {
  DenseDigraph g;
  g.n = 2 + static_cast<int>(rng.below(max_nodes - 1));
  g.w.assign(g.n, std::vector<double>(g.n, 0.0));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (i != j && rng.bernoulli(0.4)) g.w[i][j] = 1.0 + static_cast<double>(rng.below(5));
  return g;
}

WeightedDigraph to_sparse(const DenseDigraph& dense) {
  Corpus c;
  for (int i = 0; i < dense.n; ++i) {
    UserProfile u;
    u.user_id = "n" + std::to_string(i);
    c.users.emplace(u.user_id, std::move(u));
  }
  WeightedDigraph g = build_voter_graph(c);  // nodes only
  for (int i = 0; i < dense.n; ++i)
    for (int j = 0; j < dense.n; ++j)
      if (dense.w[i][j] > 0) {
        g.out[i].emplace_back(j, dense.w[i][j]);
        g.in[j].emplace_back(i, dense.w[i][j]);
        ++g.edge_count;
      }
  return g;
}

/// Dense PageRank oracle: explicit power iteration on the full matrix.
std::vector<double> dense_pagerank(const DenseDigraph& g, double damping = 0.85) {
  const int n = g.n;
  std::vector<double> out_weight(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out_weight[i] += g.w[i][j];
  std::vector<double> p(n, 1.0 / n), next(n);
  for (int iter = 0; iter < 20000; ++iter) {
    double dangling = 0;
    for (int i = 0; i < n; ++i)
      if (out_weight[i] == 0) dangling += p[i];
    for (int j = 0; j < n; ++j) {
      double sum = 0;
      for (int i = 0; i < n; ++i)
        if (out_weight[i] > 0) sum += p[i] * g.w[i][j] / out_weight[i];
      next[j] = (1.0 - damping) / n + damping * (sum + dangling / n);
    }
    double delta = 0;
    for (int i = 0; i < n; ++i) delta += std::fabs(next[i] - p[i]);
    p = next;
    if (delta < 1e-13) break;
  }
  return p;
}

/// Dense HITS oracle: alternating matrix products with L2 normalization.
std::pair<std::vector<double>, std::vector<double>> dense_hits(const DenseDigraph& g) {
  const int n = g.n;
  std::vector<double> hub(n, 1.0 / std::sqrt(n)), auth(n, 1.0 / std::sqrt(n));
  auto normalize = [](std::vector<double>& v) {
    double norm = 0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0)
      for (double& x : v) x /= norm;
  };
  for (int iter = 0; iter < 40000; ++iter) {
    std::vector<double> new_auth(n, 0.0), new_hub(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) new_auth[j] += g.w[i][j] * hub[i];
    normalize(new_auth);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) new_hub[i] += g.w[i][j] * new_auth[j];
    normalize(new_hub);
    double delta = 0;
    for (int i = 0; i < n; ++i)
      delta += std::fabs(new_auth[i] - auth[i]) + std::fabs(new_hub[i] - hub[i]);
    auth = new_auth;
    hub = new_hub;
    if (delta < 1e-13) break;
  }
  return {hub, auth};
}

}  // namespace

TEST_CASE("friendship edges are symmetrized over one-sided listings") {
  UndirectedGraph g = build_friendship(users_with_friends({{"a", {"b"}}, {"b", {}}}));
  CHECK(g.edge_count == 1);
  CHECK(g.adj[g.node_index("a")].size() == 1);
  CHECK(g.adj[g.node_index("b")].size() == 1);

  g = build_friendship(users_with_friends({{"a", {"b"}}, {"b", {"a"}}}));
  CHECK(g.edge_count == 1);  // mutual listing is still one edge

  g = build_friendship(users_with_friends({{"a", {}}, {"b", {}}}));
  CHECK(g.edge_count == 0);

  g = build_friendship(users_with_friends({{"a", {"a", "b"}}, {"b", {}}}));
  CHECK(g.edge_count == 1);  // self-listings are dropped
}

TEST_CASE("voter graph gives both debaters an in-edge per ballot") {
  Corpus c = users_with_friends({{"p", {}}, {"q", {}}, {"v", {}}});
  c.debates.push_back(voted_debate("d1", "p", "q", {"v"}));
  WeightedDigraph g = build_voter_graph(c);
  CHECK(g.edge_count == 2);
  const int v = g.node_index("v");
  REQUIRE(g.out[v].size() == 2);
  CHECK(g.out[v][0].second == 1.0);
  CHECK(g.out[v][1].second == 1.0);

  // The same voter on two debates of the same debater accumulates weight.
  c.debates.push_back(voted_debate("d2", "p", "q", {"v"}));
  g = build_voter_graph(c);
  CHECK(g.edge_count == 2);
  CHECK(g.out[g.node_index("v")][0].second == 2.0);

  Corpus no_votes = users_with_friends({{"p", {}}, {"q", {}}});
  no_votes.debates.push_back(voted_debate("d1", "p", "q", {}));
  CHECK(build_voter_graph(no_votes).edge_count == 0);
}

TEST_CASE("graph build is invariant to input order") {
  Corpus a = users_with_friends({{"x", {"y"}}, {"y", {"z"}}, {"z", {}}});
  Corpus b = users_with_friends({{"z", {}}, {"y", {"z"}}, {"x", {"y"}}});
  a.debates.push_back(voted_debate("d1", "x", "y", {"z"}));
  b.debates.push_back(voted_debate("d1", "x", "y", {"z"}));
  UndirectedGraph fa = build_friendship(a), fb = build_friendship(b);
  CHECK(fa.nodes == fb.nodes);
  CHECK(fa.adj == fb.adj);
  WeightedDigraph va = build_voter_graph(a), vb = build_voter_graph(b);
  CHECK(va.nodes == vb.nodes);
  CHECK(va.out == vb.out);
}

TEST_CASE("degree centrality on a star") {
  UndirectedGraph g = build_friendship(
      users_with_friends({{"hub", {"a", "b", "c"}}, {"a", {}}, {"b", {}}, {"c", {}}}));
  auto cent = degree_centrality(g);
  CHECK(cent[g.node_index("hub")] == doctest::Approx(1.0));
  CHECK(cent[g.node_index("a")] == doctest::Approx(1.0 / 3));

  UndirectedGraph with_isolated =
      build_friendship(users_with_friends({{"hub", {"a"}}, {"a", {}}, {"lonely", {}}}));
  CHECK(degree_centrality(with_isolated)[with_isolated.node_index("lonely")] == 0.0);

  UndirectedGraph tiny = build_friendship(users_with_friends({{"only", {}}}));
  CHECK_THROWS_AS(degree_centrality(tiny), UsageError);
}

TEST_CASE("weighted degree centrality on the digraph") {
  Corpus c = users_with_friends({{"p", {}}, {"q", {}}, {"v", {}}});
  c.debates.push_back(voted_debate("d1", "p", "q", {"v"}));
  c.debates.push_back(voted_debate("d2", "p", "q", {"v"}));
  WeightedDigraph g = build_voter_graph(c);
  auto in_cent = degree_centrality(g, DegreeMode::In);
  auto out_cent = degree_centrality(g, DegreeMode::Out);
  CHECK(in_cent[g.node_index("p")] == doctest::Approx(2.0 / 2));  // weight 2 over n-1=2
  CHECK(out_cent[g.node_index("v")] == doctest::Approx(4.0 / 2));
  CHECK(out_cent[g.node_index("p")] == 0.0);
}

TEST_CASE("pagerank basics") {
  Corpus single = users_with_friends({{"a", {}}});
  auto pr = pagerank(build_voter_graph(single));
  CHECK(pr == std::vector<double>{1.0});

  DenseDigraph cycle;
  cycle.n = 2;
  cycle.w = {{0, 1}, {1, 0}};
  auto pr2 = pagerank(to_sparse(cycle));
  CHECK(pr2[0] == doctest::Approx(0.5));
  CHECK(pr2[1] == doctest::Approx(0.5));
}

TEST_CASE("pagerank on a 3-node chain matches the dense oracle") {
  DenseDigraph chain;
  chain.n = 3;
  chain.w = {{0, 1, 0}, {0, 0, 1}, {0, 0, 0}};
  auto mine = pagerank(to_sparse(chain));
  auto oracle = dense_pagerank(chain);
  for (int i = 0; i < 3; ++i) CHECK(mine[i] == doctest::Approx(oracle[i]).epsilon(1e-6));
}

TEST_CASE("pagerank and hits match dense oracles on random small graphs") {
  Rng rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    DenseDigraph dense = random_digraph(rng);
    WeightedDigraph sparse = to_sparse(dense);

    auto pr = pagerank(sparse);
    auto pr_oracle = dense_pagerank(dense);
    double pr_sum = 0;
    for (int i = 0; i < dense.n; ++i) {
      CHECK(std::fabs(pr[i] - pr_oracle[i]) < 1e-6);
      CHECK(pr[i] >= 0.0);
      pr_sum += pr[i];
    }
    CHECK(pr_sum == doctest::Approx(1.0).epsilon(1e-9));

    if (sparse.edge_count == 0) continue;
    HitsScores mine = hits(sparse, 1e-11, 20000);
    auto [hub_oracle, auth_oracle] = dense_hits(dense);
    for (int i = 0; i < dense.n; ++i) {
      CHECK(std::fabs(mine.hub[i] - hub_oracle[i]) < 1e-6);
      CHECK(std::fabs(mine.authority[i] - auth_oracle[i]) < 1e-6);
    }
  }
}

TEST_CASE("hits forced values on a single edge and a two-voter funnel") {
  DenseDigraph single;
  single.n = 2;
  single.w = {{0, 1}, {0, 0}};
  HitsScores s = hits(to_sparse(single));
  CHECK(s.hub[0] == doctest::Approx(1.0));
  CHECK(s.hub[1] == doctest::Approx(0.0));
  CHECK(s.authority[0] == doctest::Approx(0.0));
  CHECK(s.authority[1] == doctest::Approx(1.0));

  DenseDigraph funnel;
  funnel.n = 3;
  funnel.w = {{0, 0, 1}, {0, 0, 1}, {0, 0, 0}};
  s = hits(to_sparse(funnel));
  CHECK(s.authority[2] == doctest::Approx(1.0));
  CHECK(s.hub[0] == doctest::Approx(s.hub[1]));
  CHECK(s.hub[0] == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("hits is invariant to uniform weight scaling and stays unit-norm") {
  Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    DenseDigraph dense = random_digraph(rng);
    WeightedDigraph sparse = to_sparse(dense);
    if (sparse.edge_count == 0) continue;
    HitsScores a = hits(sparse, 1e-11, 20000);

    DenseDigraph scaled = dense;
    for (auto& row : scaled.w)
      for (double& w : row) w *= 3.7;
    HitsScores b = hits(to_sparse(scaled), 1e-11, 20000);
    double hub_norm = 0, auth_norm = 0;
    for (int i = 0; i < dense.n; ++i) {
      CHECK(a.hub[i] == doctest::Approx(b.hub[i]).epsilon(1e-8));
      CHECK(a.authority[i] == doctest::Approx(b.authority[i]).epsilon(1e-8));
      hub_norm += a.hub[i] * a.hub[i];
      auth_norm += a.authority[i] * a.authority[i];
    }
    CHECK(hub_norm == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(auth_norm == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("user graph features: schema of ten, zeros for absent users") {
  Corpus c = users_with_friends({{"p", {"q"}}, {"q", {}}, {"v", {}}, {"idle", {}}});
  c.debates.push_back(voted_debate("d1", "p", "q", {"v"}));
  NetworkFeatureTables tables = compute_network_features(c);

  FeatureVector fv = user_graph_features(tables, "p");
  CHECK(fv.schema == user_graph_feature_schema());
  CHECK(fv.size() == 10);
  CHECK(fv.values[0] == 1.0);  // one friend
  CHECK(fv.values[3] == 1.0);  // one voter in-edge

  FeatureVector idle = user_graph_features(tables, "idle");
  CHECK(idle.values[0] == 0.0);
  CHECK(idle.values[3] == 0.0);
  CHECK(idle.values[4] == 0.0);

  FeatureVector ghost = user_graph_features(tables, "not_in_corpus");
  for (double v : ghost.values) CHECK(v == 0.0);
}

TEST_CASE("edge list export") {
  Corpus c = users_with_friends({{"a", {"b"}}, {"b", {}}, {"v", {}}});
  c.debates.push_back(voted_debate("d1", "a", "b", {"v"}));
  NetworkFeatureTables t = compute_network_features(c);
  CHECK(edge_list_tsv(t.friendship) == "a\tb\t1\n");
  CHECK(edge_list_tsv(t.voter) == "v\ta\t1\nv\tb\t1\n");
}

TEST_CASE("a star-center voter takes the maximum hub score") {
  // One voter feeding many debaters: the funnel inverted.
  Corpus c;
  for (const char* id : {"hub_voter", "d1", "d2", "d3", "d4", "d5", "d6"}) {
    UserProfile u;
    u.user_id = id;
    c.users.emplace(u.user_id, std::move(u));
  }
  c.debates.push_back(voted_debate("x1", "d1", "d2", {"hub_voter"}));
  c.debates.push_back(voted_debate("x2", "d3", "d4", {"hub_voter"}));
  c.debates.push_back(voted_debate("x3", "d5", "d6", {"hub_voter"}));
  WeightedDigraph g = build_voter_graph(c);
  HitsScores s = hits(g);
  const int hub = g.node_index("hub_voter");
  for (int i = 0; i < static_cast<int>(g.nodes.size()); ++i) {
    if (i != hub) CHECK(s.hub[hub] > s.hub[i]);
  }
  CHECK(s.hub[hub] == doctest::Approx(1.0));
}
