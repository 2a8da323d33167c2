#include "kairos/synth.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "kairos/util.hpp"

namespace kairos {

namespace {

const std::vector<std::string>& syllables() {
  static const std::vector<std::string> s = {
      "ba", "be", "bi", "bo", "bu", "da", "de", "di", "do", "du", "ka", "ke", "ki",
      "ko", "ku", "la", "le", "li", "lo", "lu", "ma", "me", "mi", "mo", "mu", "na",
      "ne", "ni", "no", "nu", "ra", "re", "ri", "ro", "ru", "sa", "se", "si", "so",
      "su", "ta", "te", "ti", "to", "tu", "va", "ve", "vi", "vo", "vu"};
  return s;
}

std::string make_word(Rng& rng) {
  const auto& syl = syllables();
  const int parts = 2 + static_cast<int>(rng.below(3));
  std::string word;
  for (int i = 0; i < parts; ++i) word += syl[rng.below(syl.size())];
  return word;
}

std::vector<std::vector<std::string>> topic_vocabularies(const SynthConfig& config) {
  std::vector<std::vector<std::string>> vocab(config.n_topics);
  Rng rng = Rng(config.seed).fork(0x70c);
  for (int t = 0; t < config.n_topics; ++t) {
    std::set<std::string> words;
    Rng topic_rng = rng.fork(t + 1);
    while (static_cast<int>(words.size()) < config.words_per_topic)
      words.insert(make_word(topic_rng));
    vocab[t].assign(words.begin(), words.end());
  }
  return vocab;
}

std::string sample_sentence(Rng& rng, const std::vector<std::string>& vocab, int min_words,
                            int max_words, std::size_t skip_first = 0) {
  const int n = min_words + static_cast<int>(rng.below(max_words - min_words + 1));
  std::string text;
  for (int i = 0; i < n; ++i) {
    if (i) text += " ";
    text += vocab[skip_first + rng.below(vocab.size() - skip_first)];
  }
  text += ".";
  return text;
}

std::string user_id_of(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "u%04d", i);
  return buf;
}

std::string debate_id_of(int i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "d%05d", i);
  return buf;
}

const std::vector<std::string>& categories() {
  static const std::vector<std::string> c = {"Politics", "Religion", "Science",
                                             "Health",   "Music",    "Education"};
  return c;
}

UserProfile make_user(int index, const std::vector<std::string>& catalog, Rng& rng) {
  UserProfile u;
  u.user_id = user_id_of(index);
  u.join_order = index;
  u.political_ideology = rng.bernoulli(0.5) ? "conservative" : "liberal";
  u.religious_ideology = rng.bernoulli(0.5) ? "christian" : "atheist";
  u.gender = rng.bernoulli(0.5) ? "male" : "female";
  static const std::vector<std::string> ethnicities = {"white", "black", "asian", "hispanic"};
  u.ethnicity = ethnicities[rng.below(ethnicities.size())];
  static const Stance stances[4] = {Stance::Pro, Stance::Con, Stance::NoOpinion,
                                    Stance::Undecided};
  for (const auto& issue : catalog) u.big_issue_stances[issue] = stances[rng.below(4)];
  return u;
}

Ballot make_ballot(const std::string& voter, Choice convincing, Rng& rng) {
  Ballot b;
  b.voter_id = voter;
  static const VoteStance stances[3] = {VoteStance::Pro, VoteStance::Con, VoteStance::Undecided};
  b.stance_before = stances[rng.below(3)];
  // Voters frequently end on the side they found convincing; sometimes
  // they keep their stance or end undecided.
  const double roll = rng.uniform();
  if (roll < 0.6) b.stance_after = convincing == Choice::Pro ? VoteStance::Pro : VoteStance::Con;
  else if (roll < 0.8) b.stance_after = b.stance_before;
  else b.stance_after = stances[rng.below(3)];

  b.choices.convincing_arguments = convincing;
  // Single-point dimensions may scatter (they cannot flip a 3-point
  // convincing choice); sources either tie or reinforce.
  static const Choice any[3] = {Choice::Pro, Choice::Con, Choice::Tie};
  b.choices.conduct = any[rng.below(3)];
  b.choices.spelling_grammar = any[rng.below(3)];
  b.choices.reliable_sources = rng.bernoulli(0.5) ? Choice::Tie : convincing;
  return b;
}

void add_rounds(Debate& d, const std::vector<std::string>& vocab, int rounds_min, int rounds_max,
                Rng& rng) {
  const int n_rounds = rounds_min + static_cast<int>(rng.below(rounds_max - rounds_min + 1));
  for (int r = 0; r < n_rounds; ++r) {
    Round round;
    round.index = r + 1;
    round.pro_text = sample_sentence(rng, vocab, 6, 14);
    round.con_text = sample_sentence(rng, vocab, 6, 14);
    d.rounds.push_back(std::move(round));
  }
}

Corpus gen_ideology_corpus(const SynthConfig& config) {
  Corpus corpus;
  const auto catalog = synth_issue_catalog(config);
  const auto vocab = topic_vocabularies(config);
  Rng root(config.seed);

  Rng user_rng = root.fork(0x01);
  std::vector<std::string> conservatives, liberals, all_users;
  for (int i = 0; i < config.n_users; ++i) {
    Rng r = user_rng.fork(i + 1);
    UserProfile u = make_user(i, catalog, r);
    all_users.push_back(u.user_id);
    (*u.political_ideology == "conservative" ? conservatives : liberals).push_back(u.user_id);
    corpus.users.emplace(u.user_id, std::move(u));
  }
  if (conservatives.empty() || liberals.empty())
    throw UsageError("gen_debates: too few users to seat both ideologies");

  Rng friend_rng = root.fork(0x02);
  for (auto& [id, user] : corpus.users) {
    for (const auto& other : all_users) {
      if (other == id) continue;
      if (friend_rng.bernoulli(config.p_friend)) user.friends.insert(other);
    }
  }

  Rng debate_rng = root.fork(0x03);
  for (int i = 0; i < config.n_debates; ++i) {
    Rng r = debate_rng.fork(i + 1);
    Debate d;
    d.debate_id = debate_id_of(i);
    const int topic = static_cast<int>(r.below(config.n_topics));
    d.topic = vocab[topic][0] + " debate";
    d.category = categories()[topic % categories().size()];
    d.timestamp = 1000 + i;
    const std::string& conservative = conservatives[r.below(conservatives.size())];
    const std::string& liberal = liberals[r.below(liberals.size())];
    const bool conservative_pro = r.bernoulli(0.5);
    d.pro_user = conservative_pro ? conservative : liberal;
    d.con_user = conservative_pro ? liberal : conservative;
    add_rounds(d, vocab[topic], config.rounds_min, config.rounds_max, r);

    const int n_ballots =
        config.ballots_min + static_cast<int>(r.below(config.ballots_max - config.ballots_min + 1));
    for (int v = 0; v < n_ballots; ++v) {
      const std::string& voter = all_users[r.below(all_users.size())];
      const auto& voter_pol = *corpus.users.at(voter).political_ideology;
      const auto& pro_pol = *corpus.users.at(d.pro_user).political_ideology;
      const Choice matching_side = voter_pol == pro_pol ? Choice::Pro : Choice::Con;
      const Choice other_side = matching_side == Choice::Pro ? Choice::Con : Choice::Pro;
      const Choice convincing = r.bernoulli(config.p_match) ? matching_side : other_side;
      d.ballots.push_back(make_ballot(voter, convincing, r));
    }
    corpus.debates.push_back(std::move(d));
  }
  return corpus;
}

Corpus gen_network_corpus(const SynthConfig& config) {
  Corpus corpus;
  const auto catalog = synth_issue_catalog(config);
  const auto vocab = topic_vocabularies(config);
  Rng root(config.seed);

  const int m = config.tier_size;
  const int total_users = 2 * m + config.audience_users;
  Rng user_rng = root.fork(0x11);
  std::vector<std::string> all_users;
  for (int i = 0; i < total_users; ++i) {
    Rng r = user_rng.fork(i + 1);
    UserProfile u = make_user(i, catalog, r);
    all_users.push_back(u.user_id);
    corpus.users.emplace(u.user_id, std::move(u));
  }
  auto strong = [&](int i) { return user_id_of(i); };
  auto weak = [&](int i) { return user_id_of(m + i); };

  Rng friend_rng = root.fork(0x12);
  for (auto& [id, user] : corpus.users)
    for (const auto& other : all_users)
      if (other != id && friend_rng.bernoulli(config.p_friend)) user.friends.insert(other);

  struct Scheduled {
    std::string a, b;
    enum { StrongStrong, WeakWeak, Cross } kind;
  };
  std::vector<Scheduled> schedule;
  for (int r = 1; r <= config.cross_rounds; ++r)
    for (int i = 0; i < m; ++i)
      schedule.push_back({strong(i), weak((i + r) % m), Scheduled::Cross});
  for (int r = 1; r <= config.same_tier_rounds; ++r) {
    for (int i = 0; i < m; ++i)
      schedule.push_back({strong(i), strong((i + r) % m), Scheduled::StrongStrong});
    for (int i = 0; i < m; ++i)
      schedule.push_back({weak(i), weak((i + r) % m), Scheduled::WeakWeak});
  }
  Rng order_rng = root.fork(0x13);
  order_rng.shuffle(schedule);

  Rng debate_rng = root.fork(0x14);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    Rng r = debate_rng.fork(i + 1);
    const auto& s = schedule[i];
    Debate d;
    d.debate_id = debate_id_of(static_cast<int>(i));
    const int topic = static_cast<int>(r.below(config.n_topics));
    d.topic = vocab[topic][0] + " debate";
    d.category = categories()[topic % categories().size()];
    d.timestamp = 1000 + static_cast<std::int64_t>(i);
    const bool a_pro = r.bernoulli(0.5);
    d.pro_user = a_pro ? s.a : s.b;
    d.con_user = a_pro ? s.b : s.a;
    add_rounds(d, vocab[topic], config.rounds_min, config.rounds_max, r);

    // The designated winner: the strong debater in cross debates with
    // probability strong_win_prob, a coin flip otherwise.
    std::string winner = s.a;
    if (s.kind == Scheduled::Cross) {
      winner = r.bernoulli(config.strong_win_prob) ? s.a : s.b;  // s.a is the strong one
    } else if (r.bernoulli(0.5)) {
      winner = s.b;
    }
    const Choice winning_side = winner == d.pro_user ? Choice::Pro : Choice::Con;
    const Choice losing_side = winning_side == Choice::Pro ? Choice::Con : Choice::Pro;

    int votes = 0;
    switch (s.kind) {
      case Scheduled::StrongStrong:
        votes = config.strong_votes_min +
                static_cast<int>(r.below(config.strong_votes_max - config.strong_votes_min + 1));
        break;
      case Scheduled::WeakWeak:
        votes = config.weak_votes_min +
                static_cast<int>(r.below(config.weak_votes_max - config.weak_votes_min + 1));
        break;
      case Scheduled::Cross:
        votes = config.cross_votes_min +
                static_cast<int>(r.below(config.cross_votes_max - config.cross_votes_min + 1));
        break;
    }
    for (int v = 0; v < votes; ++v) {
      const std::string& voter = all_users[r.below(all_users.size())];
      const Choice convincing =
          r.bernoulli(config.ballot_follow_prob) ? winning_side : losing_side;
      d.ballots.push_back(make_ballot(voter, convincing, r));
    }
    corpus.debates.push_back(std::move(d));
  }
  return corpus;
}

}  // namespace

SynthConfig preset_ideology(std::uint64_t seed) {
  SynthConfig config;
  config.seed = seed;
  return config;
}

SynthConfig preset_network(std::uint64_t seed) {
  SynthConfig config;
  config.seed = seed;
  config.network_mode = true;
  return config;
}

SynthConfig preset_context(std::uint64_t seed) {
  SynthConfig config;
  config.seed = seed;
  config.n_trees = 250;
  config.label_noise = 0.05;
  return config;
}

std::vector<std::string> synth_issue_catalog(const SynthConfig& config) {
  std::vector<std::string> catalog;
  for (int i = 0; i < config.n_issues; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "issue%02d", i);
    catalog.push_back(buf);
  }
  return catalog;
}

Corpus gen_debates(const SynthConfig& config) {
  if (config.n_users < 2 && !config.network_mode)
    throw UsageError("gen_debates: needs at least 2 users");
  if (config.network_mode && config.tier_size < 2)
    throw UsageError("gen_debates: needs at least 2 users per tier");
  return config.network_mode ? gen_network_corpus(config) : gen_ideology_corpus(config);
}

int context_rule_class(bool has_keyword, EdgeLabel e1, EdgeLabel e2) {
  const bool both_support = e1 == EdgeLabel::Support && e2 == EdgeLabel::Support;
  if (!both_support) return 0;                      // NOT_IMPACTFUL
  return has_keyword ? 2 : 1;                       // IMPACTFUL : MEDIUM_IMPACT
}

double claim_marginal_best_accuracy(const SynthConfig& config) {
  const double p_ss = config.p_support * config.p_support;
  // Conditioned on keyword presence, the class is binary (SS or not), so
  // the best text-only predictor scores max(p_ss, 1 - p_ss) either way.
  return std::max(p_ss, 1.0 - p_ss);
}

namespace {

ImpactVoteTally tally_for_class(int cls, const SynthConfig& config, Rng& rng) {
  const int votes =
      config.votes_min + static_cast<int>(rng.below(config.votes_max - config.votes_min + 1));
  const long majority = std::max<long>(
      static_cast<long>(std::ceil(config.tally_agreement * votes)), (2 * votes) / 3 + 1);
  const long rest = votes - majority;
  ImpactVoteTally tally;
  auto fill_block = [&](int cls_index, long count) {
    switch (cls_index) {
      case 0:
        tally.counts[0] += (count + 1) / 2;
        tally.counts[1] += count / 2;
        break;
      case 1: tally.counts[2] += count; break;
      case 2:
        tally.counts[3] += (count + 1) / 2;
        tally.counts[4] += count / 2;
        break;
    }
  };
  fill_block(cls, majority);
  fill_block((cls + 1) % 3, (rest + 1) / 2);
  fill_block((cls + 2) % 3, rest / 2);
  return tally;
}

ImpactVoteTally sparse_tally(Rng& rng) {
  // Below the vote floor: these claims never enter the labeled set.
  ImpactVoteTally tally;
  const int votes = static_cast<int>(rng.below(5));
  for (int v = 0; v < votes; ++v) ++tally.counts[rng.below(5)];
  return tally;
}

}  // namespace

std::vector<ArgumentTree> gen_trees(const SynthConfig& config) {
  const auto vocab = topic_vocabularies(config);
  std::vector<ArgumentTree> trees;
  Rng root = Rng(config.seed).fork(0x77ee);

  for (int t = 0; t < config.n_trees; ++t) {
    Rng rng = root.fork(t + 1);
    ArgumentTree tree;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "t%04d", t);
    tree.tree_id = buf;
    const auto& words = vocab[t % config.n_topics];
    const std::string& keyword = words[0];

    auto filler = [&](Rng& r, int lo, int hi) {
      return sample_sentence(r, words, lo, hi, /*skip_first=*/1);
    };

    ClaimNode thesis;
    thesis.claim_id = tree.tree_id + "_thesis";
    thesis.text = filler(rng, 5, 9);
    thesis.tally = sparse_tally(rng);
    tree.thesis_id = thesis.claim_id;
    tree.nodes.emplace(thesis.claim_id, thesis);

    int counter = 0;
    for (int a = 0; a < config.branch_depth1; ++a) {
      ClaimNode c1;
      c1.claim_id = tree.tree_id + "_c" + std::to_string(++counter);
      c1.parent = thesis.claim_id;
      const bool sup1 = rng.bernoulli(config.p_support);
      c1.edge_label = sup1 ? EdgeLabel::Support : EdgeLabel::Oppose;
      c1.text = std::string(sup1 ? "endorse" : "reject") + " " + filler(rng, 4, 8);
      c1.tally = sparse_tally(rng);
      tree.nodes.emplace(c1.claim_id, c1);

      for (int b = 0; b < config.branch_depth2; ++b) {
        ClaimNode c2;
        c2.claim_id = tree.tree_id + "_c" + std::to_string(++counter);
        c2.parent = c1.claim_id;
        const bool sup2 = rng.bernoulli(config.p_support);
        c2.edge_label = sup2 ? EdgeLabel::Support : EdgeLabel::Oppose;
        c2.text = std::string(sup2 ? "endorse" : "reject") + " " + filler(rng, 4, 8);
        c2.tally = sparse_tally(rng);
        tree.nodes.emplace(c2.claim_id, c2);

        for (int l = 0; l < config.leaves_per_branch; ++l) {
          ClaimNode leaf;
          leaf.claim_id = tree.tree_id + "_c" + std::to_string(++counter);
          leaf.parent = c2.claim_id;
          leaf.edge_label = rng.bernoulli(0.5) ? EdgeLabel::Support : EdgeLabel::Oppose;
          const bool has_keyword = rng.bernoulli(config.p_keyword);
          leaf.text = (has_keyword ? keyword + " " : "") + filler(rng, 4, 8);
          int cls = context_rule_class(has_keyword, *c1.edge_label, *c2.edge_label);
          if (config.label_noise > 0 && rng.bernoulli(config.label_noise))
            cls = (cls + 1 + static_cast<int>(rng.below(2))) % 3;
          leaf.tally = tally_for_class(cls, config, rng);
          tree.nodes.emplace(leaf.claim_id, leaf);
        }
      }
    }
    trees.push_back(std::move(tree));
  }
  return trees;
}

std::string synth_meta_json(const SynthConfig& config) {
  nlohmann::json j;
  j["generator"] = "kairos-synth";
  j["seed"] = config.seed;
  j["preset"] = config.network_mode ? "network" : "ideology";
  j["p_match"] = config.p_match;
  j["n_users"] = config.n_users;
  j["n_debates"] = config.n_debates;
  j["issue_catalog"] = synth_issue_catalog(config);
  j["network"] = {{"enabled", config.network_mode},
                  {"tier_size", config.tier_size},
                  {"strong_win_prob", config.strong_win_prob},
                  {"cross_rounds", config.cross_rounds},
                  {"same_tier_rounds", config.same_tier_rounds}};
  j["context_rule"] = {{"k", config.context_rule_k},
                       {"p_support", config.p_support},
                       {"p_keyword", config.p_keyword},
                       {"label_noise", config.label_noise},
                       {"tally_agreement", config.tally_agreement},
                       {"n_trees", config.n_trees},
                       {"claim_marginal_best_accuracy", claim_marginal_best_accuracy(config)}};
  return j.dump(2) + "\n";
}

}  // namespace kairos
