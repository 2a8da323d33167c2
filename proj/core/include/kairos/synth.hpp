#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kairos/corpus.hpp"

namespace kairos {

/// Generation is a pure function of this config; identical configs yield
/// byte-identical corpora.
struct SynthConfig {
  std::uint64_t seed = 7;

  // Debates (ideology preset): each ballot's convincing-argument choice
  // favors the politically matching debater with probability p_match.
  int n_users = 200;
  int n_debates = 300;
  int ballots_min = 5, ballots_max = 9;
  double p_match = 0.75;
  int n_issues = 8;
  int n_topics = 6;
  int words_per_topic = 40;
  int rounds_min = 1, rounds_max = 3;
  double p_friend = 0.03;

  // Network preset: a strong tier that keeps winning and sits on debates
  // with skewed ballot counts, so voter in-edges concentrate on it.
  bool network_mode = false;
  int tier_size = 20;            // users per tier (strong / weak)
  int audience_users = 40;       // extra voters
  int cross_rounds = 7;          // strong-vs-weak debates per user
  int same_tier_rounds = 1;      // adds 2 same-tier debates per user
  double strong_win_prob = 0.95;
  double ballot_follow_prob = 0.93;  // per-ballot agreement with the designated winner
  int strong_votes_min = 18, strong_votes_max = 22;
  int weak_votes_min = 4, weak_votes_max = 6;
  int cross_votes_min = 3, cross_votes_max = 4;

  // Argument trees: three-level chains under the thesis; the impact class
  // of a depth-3 claim is a rule over (claim keyword, labels of the last
  // k context edges), converted to vote tallies with controllable noise.
  int n_trees = 150;
  int branch_depth1 = 2;
  int branch_depth2 = 2;
  int leaves_per_branch = 2;
  double p_support = 0.7;
  double p_keyword = 0.5;
  double label_noise = 0.0;
  int votes_min = 6, votes_max = 12;
  double tally_agreement = 0.9;
  int context_rule_k = 2;
};

SynthConfig preset_ideology(std::uint64_t seed);
SynthConfig preset_network(std::uint64_t seed);
SynthConfig preset_context(std::uint64_t seed);

/// Users, debates, ballots and friendships with the planted prior-belief
/// (and optionally network) effects. Output always passes corpus
/// validation.
Corpus gen_debates(const SynthConfig& config);

/// Argument trees whose depth-3 claims carry tallies encoding the planted
/// context rule.
std::vector<ArgumentTree> gen_trees(const SynthConfig& config);

/// The ordered big-issue catalog the generator assigns stances over.
std::vector<std::string> synth_issue_catalog(const SynthConfig& config);

/// The planted rule: IMPACTFUL iff the claim carries its topic keyword and
/// the last two context edges are SUPPORT; MEDIUM_IMPACT for an unkeyworded
/// claim under the same edges; NOT_IMPACTFUL otherwise.
int context_rule_class(bool has_keyword, EdgeLabel e1, EdgeLabel e2);

/// Best achievable accuracy for a predictor that sees only the claim text,
/// from the generator's joint distribution (exact enumeration), before
/// label noise.
double claim_marginal_best_accuracy(const SynthConfig& config);

/// Planted parameters as JSON (written as meta.json next to the corpus).
std::string synth_meta_json(const SynthConfig& config);

}  // namespace kairos
