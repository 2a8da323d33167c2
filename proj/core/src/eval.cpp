#include "kairos/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "kairos/util.hpp"

namespace kairos {

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

namespace {

/// Distributes per-class quotas for a share of the data using largest
/// remainders, so totals are exact and per-class proportions stay within
/// one row.
std::vector<std::size_t> quota_by_class(const std::vector<std::vector<std::size_t>>& by_class,
                                        double share, std::size_t target) {
  const std::size_t k = by_class.size();
  std::vector<std::size_t> quota(k, 0);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double exact = share * static_cast<double>(by_class[c].size());
    quota[c] = static_cast<std::size_t>(exact);
    assigned += quota[c];
    remainders.emplace_back(exact - static_cast<double>(quota[c]), c);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t i = 0; assigned < target && i < remainders.size(); ++i) {
    std::size_t c = remainders[i].second;
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++assigned;
    }
  }
  return quota;
}

}  // namespace

SplitIndices split_70_15_15(const std::vector<int>& labels, std::uint64_t seed) {
  const std::size_t n = labels.size();
  if (n < 10) throw UsageError("split_70_15_15: needs at least 10 rows");
  int num_classes = 0;
  for (int l : labels) num_classes = std::max(num_classes, l + 1);
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(i);
  for (int c = 0; c < num_classes; ++c) {
    if (!by_class[c].empty() && by_class[c].size() < 3)
      throw UsageError("split_70_15_15: class " + std::to_string(c) + " has fewer than 3 rows");
  }

  Rng rng(seed);
  for (int c = 0; c < num_classes; ++c) {
    Rng class_rng = rng.fork(static_cast<std::uint64_t>(c) + 101);
    class_rng.shuffle(by_class[c]);
  }

  const std::size_t n_test = static_cast<std::size_t>(std::lround(0.15 * n));
  const std::size_t n_val = static_cast<std::size_t>(std::lround(0.15 * n));
  auto test_quota = quota_by_class(by_class, 0.15, n_test);
  auto val_quota = quota_by_class(by_class, 0.15, n_val);

  SplitIndices out;
  for (int c = 0; c < num_classes; ++c) {
    const auto& rows = by_class[c];
    std::size_t at = 0;
    for (std::size_t i = 0; i < test_quota[c] && at < rows.size(); ++i) out.test.push_back(rows[at++]);
    for (std::size_t i = 0; i < val_quota[c] && at < rows.size(); ++i) out.val.push_back(rows[at++]);
    while (at < rows.size()) out.train.push_back(rows[at++]);
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels, int k,
                                                       std::uint64_t seed) {
  return stratified_fold_indices(labels, k, seed);
}

// ---------------------------------------------------------------------------
// Pair construction
// ---------------------------------------------------------------------------

namespace {

const UserProfile* find_user(const Corpus& corpus, const std::string& id) {
  auto it = corpus.users.find(id);
  return it == corpus.users.end() ? nullptr : &it->second;
}

}  // namespace

std::vector<TaskRow> task1_pairs(const Corpus& corpus,
                                 const std::optional<std::string>& category) {
  std::vector<TaskRow> rows;
  for (const Debate& d : corpus.debates) {
    if (category && d.category != *category) continue;
    const UserProfile* pro = find_user(corpus, d.pro_user);
    const UserProfile* con = find_user(corpus, d.con_user);
    if (!pro || !con || !pro->religious_ideology || !con->religious_ideology) continue;
    if (*pro->religious_ideology == *con->religious_ideology) continue;
    for (const Ballot& b : d.ballots) {
      const UserProfile* voter = find_user(corpus, b.voter_id);
      if (!voter || !voter->religious_ideology) continue;
      if (*voter->religious_ideology != *pro->religious_ideology &&
          *voter->religious_ideology != *con->religious_ideology)
        continue;
      if (voter_case(b) == VoterCase::Excluded) continue;
      rows.push_back({&d, &b, per_voter_winner(b, WinCriterion::Conversion)});
    }
  }
  return rows;
}

std::vector<TaskRow> task2_pairs(const Corpus& corpus,
                                 const std::optional<std::string>& category) {
  std::vector<TaskRow> rows;
  for (const Debate& d : corpus.debates) {
    if (category && d.category != *category) continue;
    const UserProfile* pro = find_user(corpus, d.pro_user);
    const UserProfile* con = find_user(corpus, d.con_user);
    if (!pro || !con || !pro->political_ideology || !con->political_ideology) continue;
    if (*pro->political_ideology == *con->political_ideology) continue;
    for (const Ballot& b : d.ballots) {
      const UserProfile* voter = find_user(corpus, b.voter_id);
      if (!voter || !voter->political_ideology) continue;
      if (*voter->political_ideology != *pro->political_ideology &&
          *voter->political_ideology != *con->political_ideology)
        continue;
      Winner w = per_voter_winner(b, WinCriterion::Points);
      if (w == Winner::Tie) continue;
      rows.push_back({&d, &b, w});
    }
  }
  return rows;
}

double language_only_accuracy_ceiling(const std::vector<TaskRow>& rows) {
  if (rows.empty()) return 0.0;
  std::map<std::string, std::pair<long, long>> per_debate;  // (pro, con) label counts
  for (const TaskRow& r : rows) {
    auto& counts = per_debate[r.debate->debate_id];
    if (r.label == Winner::Pro) ++counts.first;
    else ++counts.second;
  }
  long correct = 0;
  for (const auto& [id, counts] : per_debate) correct += std::max(counts.first, counts.second);
  return static_cast<double>(correct) / rows.size();
}

std::vector<SettingPair> setting_pairs(const Corpus& corpus, int setting, std::uint64_t seed) {
  if (setting < 1 || setting > 3) throw UsageError("setting_pairs: setting must be 1, 2 or 3");

  struct UserStats {
    std::string id;
    int debate_count = 0;
    double prior = 0.0;
    SuccessClass late_class = SuccessClass::Mediocre;
  };
  std::vector<UserStats> stats;
  for (const auto& [id, user] : corpus.users) {
    int count = 0;
    for (const Debate& d : corpus.debates)
      if (d.pro_user == id || d.con_user == id) ++count;
    if (count < 3) continue;  // lifetime stages need three debates
    SuccessRecord rec = success_record(id, corpus);
    auto stages = lifetime_stages(rec.debates_as_debater.size());
    auto won = [&](const Debate* d) {
      Winner w = winner_by_points(d->ballots);
      return (w == Winner::Pro && d->pro_user == id) || (w == Winner::Con && d->con_user == id);
    };
    long late_wins = 0;
    std::size_t late_total = 0;
    for (int s = 1; s < 3; ++s) {
      auto [begin, end] = stages[s];
      late_total += end - begin;
      for (std::size_t i = begin; i < end; ++i)
        if (won(rec.debates_as_debater[i])) ++late_wins;
    }
    double late_rate = late_total ? static_cast<double>(late_wins) / late_total : 0.0;
    UserStats us;
    us.id = id;
    us.debate_count = count;
    us.prior = (*rec.stage_rates)[0];
    us.late_class = late_rate >= 0.70  ? SuccessClass::Successful
                    : late_rate <= 0.30 ? SuccessClass::Unsuccessful
                                        : SuccessClass::Mediocre;
    stats.push_back(std::move(us));
  }

  std::map<int, std::pair<std::vector<const UserStats*>, std::vector<const UserStats*>>> buckets;
  for (const auto& us : stats) {
    if (us.late_class == SuccessClass::Successful) buckets[us.debate_count].first.push_back(&us);
    else if (us.late_class == SuccessClass::Unsuccessful)
      buckets[us.debate_count].second.push_back(&us);
  }

  std::vector<SettingPair> pairs;
  Rng rng = Rng(seed).fork(0x5e77 + setting);
  for (const auto& [count, bucket] : buckets) {
    for (const UserStats* s : bucket.first) {
      for (const UserStats* u : bucket.second) {
        if (setting == 2 && (s->prior > 0.30 || u->prior > 0.30)) continue;
        if (setting == 3 && (s->prior < 0.70 || u->prior < 0.70)) continue;
        SettingPair pair;
        pair.debate_count = count;
        if (rng.bernoulli(0.5)) {
          pair.first = s->id;
          pair.second = u->id;
          pair.label = 0;
        } else {
          pair.first = u->id;
          pair.second = s->id;
          pair.label = 1;
        }
        pairs.push_back(std::move(pair));
      }
    }
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Task feature assembly
// ---------------------------------------------------------------------------

namespace {

Dataset apply_include(Dataset ds, const std::vector<std::string>& include) {
  if (include.empty()) return ds;
  std::vector<std::size_t> keep;
  for (const auto& name : include) {
    auto it = std::find(ds.schema.begin(), ds.schema.end(), name);
    if (it == ds.schema.end()) throw UsageError("unknown feature column '" + name + "'");
    keep.push_back(static_cast<std::size_t>(it - ds.schema.begin()));
  }
  Dataset out;
  out.num_classes = ds.num_classes;
  out.labels = std::move(ds.labels);
  out.weights = std::move(ds.weights);
  for (std::size_t j : keep) out.schema.push_back(ds.schema[j]);
  out.rows.reserve(ds.rows.size());
  for (const auto& row : ds.rows) {
    std::vector<double> r;
    r.reserve(keep.size());
    for (std::size_t j : keep) r.push_back(row[j]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

class BigIssuesCache {
 public:
  BigIssuesCache(const Corpus& corpus, const std::vector<std::string>& catalog)
      : corpus_(corpus), catalog_(catalog) {}

  const BigIssuesVector* get(const std::string& user_id) {
    auto it = cache_.find(user_id);
    if (it != cache_.end()) return it->second ? &*it->second : nullptr;
    const UserProfile* user = find_user(corpus_, user_id);
    std::optional<BigIssuesVector> vec;
    if (user && !catalog_.empty()) {
      try {
        vec = encode_big_issues(*user, catalog_);
      } catch (const ValidationError&) {
        vec = std::nullopt;  // missing stance or N/S: excluded from similarity
      }
    }
    auto [pos, inserted] = cache_.emplace(user_id, std::move(vec));
    return pos->second ? &*pos->second : nullptr;
  }

 private:
  const Corpus& corpus_;
  const std::vector<std::string>& catalog_;
  std::unordered_map<std::string, std::optional<BigIssuesVector>> cache_;
};

double trait_match_diff(const UserProfile* voter, const UserProfile* pro,
                        const UserProfile* con, Trait trait) {
  if (!voter || !pro || !con) return 0.0;
  if (!voter->trait(trait) || !pro->trait(trait) || !con->trait(trait)) return 0.0;
  return matching_trait(*voter, *pro, trait) - matching_trait(*voter, *con, trait);
}

}  // namespace

Dataset build_task_dataset(const Corpus& corpus, const std::vector<TaskRow>& rows,
                           const TaskFeatureConfig& config, const LexiconSet& lexicons) {
  Dataset ds;
  ds.num_classes = 2;

  if (config.user) {
    ds.schema.push_back("opinion_similarity");
    ds.schema.push_back("match_religious");
    ds.schema.push_back("match_political");
  }
  std::optional<TfidfModel> tfidf;
  if (config.linguistic || config.tfidf) {
    if (config.tfidf) {
      std::vector<std::string> docs;
      std::set<std::string> seen;
      for (const TaskRow& r : rows) {
        if (!seen.insert(r.debate->debate_id).second) continue;
        for (Side side : {Side::Pro, Side::Con}) {
          auto text = side_text(*r.debate, side);
          if (text) docs.push_back(*text);
        }
      }
      if (!docs.empty()) tfidf = fit_tfidf(docs, 2, config.tfidf_max_features);
    }
    for (const char* prefix : {"pro_", "con_"}) {
      if (config.linguistic)
        for (const auto& name : linguistic_feature_schema()) ds.schema.push_back(prefix + name);
      if (tfidf)
        for (const auto& term : tfidf->vocab) ds.schema.push_back(prefix + ("tfidf_" + term));
    }
  }

  BigIssuesCache issues(corpus, config.catalog);
  std::unordered_map<std::string, std::vector<double>> debate_cache;

  for (const TaskRow& r : rows) {
    std::vector<double> row;
    row.reserve(ds.schema.size());
    const UserProfile* pro = find_user(corpus, r.debate->pro_user);
    const UserProfile* con = find_user(corpus, r.debate->con_user);
    const UserProfile* voter = find_user(corpus, r.ballot->voter_id);

    if (config.user) {
      double sim = 0.0;
      const BigIssuesVector* v = issues.get(r.ballot->voter_id);
      const BigIssuesVector* p = issues.get(r.debate->pro_user);
      const BigIssuesVector* c = issues.get(r.debate->con_user);
      if (v && p && c) sim = opinion_similarity(*v, *p) - opinion_similarity(*v, *c);
      row.push_back(sim);
      row.push_back(trait_match_diff(voter, pro, con, Trait::ReligiousIdeology));
      row.push_back(trait_match_diff(voter, pro, con, Trait::PoliticalIdeology));
    }

    if (config.linguistic || tfidf) {
      auto it = debate_cache.find(r.debate->debate_id);
      if (it == debate_cache.end()) {
        std::vector<double> block;
        for (Side side : {Side::Pro, Side::Con}) {
          auto text = side_text(*r.debate, side);
          if (config.linguistic) {
            FeatureVector fv = text ? claim_or_side_features(tokenize(*text), lexicons)
                                    : claim_or_side_features(TokenStream{}, lexicons);
            block.insert(block.end(), fv.values.begin(), fv.values.end());
          }
          if (tfidf) {
            std::vector<double> dense(tfidf->vocab.size(), 0.0);
            if (text) {
              SparseVector sv = tfidf_transform(*tfidf, *text);
              for (const auto& [idx, val] : sv.entries) dense[idx] = val;
            }
            block.insert(block.end(), dense.begin(), dense.end());
          }
        }
        it = debate_cache.emplace(r.debate->debate_id, std::move(block)).first;
      }
      row.insert(row.end(), it->second.begin(), it->second.end());
    }

    ds.push_row(std::move(row), r.label == Winner::Pro ? 1 : 0);
  }
  ds.num_classes = 2;
  return apply_include(std::move(ds), config.include);
}

// ---------------------------------------------------------------------------
// Setting feature assembly
// ---------------------------------------------------------------------------

namespace {

struct UserFeatureBuilder {
  const Corpus& corpus;
  const SettingFeatureConfig& config;
  const LexiconSet& lexicons;
  BigIssuesCache issues;
  std::optional<NetworkFeatureTables> tables;
  std::unordered_map<std::string, std::vector<double>> cache;
  std::vector<std::string> schema;

  UserFeatureBuilder(const Corpus& corpus_, const SettingFeatureConfig& config_,
                     const LexiconSet& lexicons_)
      : corpus(corpus_), config(config_), lexicons(lexicons_), issues(corpus_, config_.catalog) {
    if (config.graph) tables = compute_network_features(corpus);
    if (config.participation)
      for (const char* n : {"n_debates", "n_votes_cast", "n_voted_debates", "n_friends"})
        schema.push_back(n);
    if (config.graph)
      for (const auto& n : user_graph_feature_schema()) schema.push_back(n);
    if (config.traits) {
      for (const char* who : {"friends", "voters"}) {
        schema.push_back(std::string("opinion_sim_") + who);
        for (const char* t : {"political", "religious", "gender", "ethnicity"})
          schema.push_back(std::string("match_") + t + "_" + who);
      }
    }
    if (config.language) {
      for (const auto& n : linguistic_feature_schema()) schema.push_back("own_" + n);
      TokenStream empty;
      for (const auto& n : annotate_sidecar(empty, std::nullopt).schema)
        schema.push_back("own_" + n);
    }
    if (config.interplay)
      for (const char* n :
           {"interplay_content_match", "interplay_stopword_match", "interplay_synonym_match"})
        schema.push_back(n);
  }

  const std::vector<double>& features(const std::string& user_id) {
    auto it = cache.find(user_id);
    if (it != cache.end()) return it->second;
    std::vector<double> f;
    const UserProfile* user = find_user(corpus, user_id);

    std::vector<const Debate*> debates;
    for (const Debate& d : corpus.debates)
      if (d.pro_user == user_id || d.con_user == user_id) debates.push_back(&d);

    if (config.participation) {
      long votes_cast = 0;
      std::set<std::string> voted;
      for (const Debate& d : corpus.debates) {
        for (const Ballot& b : d.ballots) {
          if (b.voter_id == user_id) {
            ++votes_cast;
            voted.insert(d.debate_id);
          }
        }
      }
      f.push_back(static_cast<double>(debates.size()));
      f.push_back(static_cast<double>(votes_cast));
      f.push_back(static_cast<double>(voted.size()));
      f.push_back(user ? static_cast<double>(user->friends.size()) : 0.0);
    }

    if (config.graph) {
      FeatureVector fv = user_graph_features(*tables, user_id);
      f.insert(f.end(), fv.values.begin(), fv.values.end());
    }

    if (config.traits) {
      std::vector<std::string> friend_ids, voter_ids;
      if (user) friend_ids.assign(user->friends.begin(), user->friends.end());
      std::set<std::string> voters;
      for (const Debate* d : debates)
        for (const Ballot& b : d->ballots) voters.insert(b.voter_id);
      voter_ids.assign(voters.begin(), voters.end());

      for (const auto* group : {&friend_ids, &voter_ids}) {
        const BigIssuesVector* own = issues.get(user_id);
        double sim_sum = 0;
        long sim_n = 0;
        for (const auto& other : *group) {
          const BigIssuesVector* v = issues.get(other);
          if (own && v) {
            sim_sum += opinion_similarity(*own, *v);
            ++sim_n;
          }
        }
        f.push_back(sim_n ? sim_sum / sim_n : 0.0);
        for (Trait trait : {Trait::PoliticalIdeology, Trait::ReligiousIdeology, Trait::Gender,
                            Trait::Ethnicity}) {
          double match_sum = 0;
          long match_n = 0;
          for (const auto& other : *group) {
            const UserProfile* o = find_user(corpus, other);
            if (user && o && user->trait(trait) && o->trait(trait)) {
              match_sum += matching_trait(*user, *o, trait);
              ++match_n;
            }
          }
          f.push_back(match_n ? match_sum / match_n : 0.0);
        }
      }
    }

    if (config.language) {
      std::string own_text;
      for (const Debate* d : debates) {
        Side side = d->pro_user == user_id ? Side::Pro : Side::Con;
        auto text = side_text(*d, side);
        if (text) {
          if (!own_text.empty()) own_text += "\n";
          own_text += *text;
        }
      }
      TokenStream stream = tokenize(own_text);
      FeatureVector fv = claim_or_side_features(stream, lexicons);
      f.insert(f.end(), fv.values.begin(), fv.values.end());
      FeatureVector pos = annotate_sidecar(stream, std::nullopt);
      f.insert(f.end(), pos.values.begin(), pos.values.end());
    }

    if (config.interplay) {
      double sums[3] = {0, 0, 0};
      long n_turns = 0;
      for (const Debate* d : debates) {
        const bool is_pro = d->pro_user == user_id;
        for (std::size_t k = 0; k < d->rounds.size(); ++k) {
          const auto& own = is_pro ? d->rounds[k].pro_text : d->rounds[k].con_text;
          if (!own) continue;
          // PRO replies to the previous round's CON, CON to this round's PRO.
          const std::optional<std::string>* opp = nullptr;
          if (is_pro) {
            if (k > 0) opp = &d->rounds[k - 1].con_text;
          } else {
            opp = &d->rounds[k].pro_text;
          }
          if (!opp || !*opp) continue;
          InterplayCounts c = interplay_counts(*own, **opp, lexicons);
          sums[0] += c.content_match;
          sums[1] += c.stopword_match;
          sums[2] += c.synonym_match;
          ++n_turns;
        }
      }
      for (double s : sums) f.push_back(n_turns ? s / n_turns : 0.0);
    }

    return cache.emplace(user_id, std::move(f)).first->second;
  }
};

}  // namespace

Dataset build_setting_dataset(const Corpus& corpus, const std::vector<SettingPair>& pairs,
                              const SettingFeatureConfig& config, const LexiconSet& lexicons) {
  UserFeatureBuilder builder(corpus, config, lexicons);
  Dataset ds;
  ds.schema = builder.schema;
  ds.num_classes = 2;
  for (const SettingPair& pair : pairs) {
    const auto& a = builder.features(pair.first);
    const auto& b = builder.features(pair.second);
    std::vector<double> row(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) row[j] = a[j] - b[j];
    ds.push_row(std::move(row), pair.label);
  }
  ds.num_classes = 2;
  return apply_include(std::move(ds), config.include);
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

MetricsReport metrics(const std::vector<int>& preds, const std::vector<int>& golds,
                      Averaging averaging, int num_classes) {
  if (preds.size() != golds.size()) throw UsageError("metrics: preds/golds length mismatch");
  if (preds.empty()) throw UsageError("metrics: empty input");
  int k = num_classes;
  for (std::size_t i = 0; i < preds.size(); ++i)
    k = std::max({k, preds[i] + 1, golds[i] + 1});

  std::vector<long> tp(k, 0), fp(k, 0), fn(k, 0), support(k, 0);
  long correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ++support[golds[i]];
    if (preds[i] == golds[i]) {
      ++tp[preds[i]];
      ++correct;
    } else {
      ++fp[preds[i]];
      ++fn[golds[i]];
    }
  }

  MetricsReport report;
  report.accuracy = static_cast<double>(correct) / preds.size();
  report.per_class.resize(k);
  for (int c = 0; c < k; ++c) {
    auto& m = report.per_class[c];
    m.support = support[c];
    m.precision = tp[c] + fp[c] > 0 ? static_cast<double>(tp[c]) / (tp[c] + fp[c]) : 0.0;
    m.recall = tp[c] + fn[c] > 0 ? static_cast<double>(tp[c]) / (tp[c] + fn[c]) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
                                      : 0.0;
  }

  if (averaging == Averaging::Macro) {
    for (int c = 0; c < k; ++c) {
      if (support[c] == 0)
        report.warnings.push_back("class " + std::to_string(c) +
                                  " absent from golds; contributes 0 under macro averaging");
      report.precision += report.per_class[c].precision / k;
      report.recall += report.per_class[c].recall / k;
      report.f1 += report.per_class[c].f1 / k;
    }
  } else {
    const double n = static_cast<double>(preds.size());
    for (int c = 0; c < k; ++c) {
      const double w = support[c] / n;
      report.precision += w * report.per_class[c].precision;
      report.recall += w * report.per_class[c].recall;
      report.f1 += w * report.per_class[c].f1;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Significance
// ---------------------------------------------------------------------------

double chi2_sf_1df(double x) {
  if (x <= 0) return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

namespace {

/// Continued fraction for the regularized incomplete beta (Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 3e-16, kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double incbeta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace

double t_sf_two_sided(double t, double df) {
  if (df <= 0) return 1.0;
  const double x = df / (df + t * t);
  return incbeta(df / 2.0, 0.5, x);
}

std::pair<double, double> mcnemar(const std::vector<int>& preds_a,
                                  const std::vector<int>& preds_b,
                                  const std::vector<int>& golds) {
  if (preds_a.size() != golds.size() || preds_b.size() != golds.size())
    throw UsageError("mcnemar: length mismatch");
  long b = 0, c = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool a_ok = preds_a[i] == golds[i];
    const bool b_ok = preds_b[i] == golds[i];
    if (a_ok && !b_ok) ++b;
    if (!a_ok && b_ok) ++c;
  }
  if (b + c == 0) return {0.0, 1.0};
  const double diff = std::fabs(static_cast<double>(b - c)) - 1.0;
  const double statistic = diff * diff / static_cast<double>(b + c);
  return {statistic, chi2_sf_1df(statistic)};
}

std::pair<double, double> t_test_two_sided(const std::vector<double>& a,
                                           const std::vector<double>& b) {
  if (a.size() < 2 || b.size() < 2) throw UsageError("t_test: each sample needs >= 2 values");
  auto mean_var = [](const std::vector<double>& v) {
    double mean = 0;
    for (double x : v) mean += x;
    mean /= v.size();
    double var = 0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= (v.size() - 1);
    return std::pair<double, double>(mean, var);
  };
  auto [m1, v1] = mean_var(a);
  auto [m2, v2] = mean_var(b);
  if (v1 == 0 && v2 == 0) throw UsageError("t_test: both samples have zero variance");
  const double se1 = v1 / a.size(), se2 = v2 / b.size();
  const double t = (m1 - m2) / std::sqrt(se1 + se2);
  const double df =
      (se1 + se2) * (se1 + se2) / (se1 * se1 / (a.size() - 1) + se2 * se2 / (b.size() - 1));
  return {t, t_sf_two_sided(t, df)};
}

// ---------------------------------------------------------------------------
// Feature analysis
// ---------------------------------------------------------------------------

FeatureAnalysisReport feature_analysis(const Dataset& ds, const LinearModel& model,
                                       const LogisticConfig& refit_config) {
  ds.validate();
  const std::size_t d = ds.schema.size();
  const std::size_t n = ds.rows.size();
  if (model.schema != ds.schema)
    throw UsageError("feature_analysis: model schema does not match dataset");

  FeatureAnalysisReport report;
  report.rows.resize(d);

  // Pearson correlation of each feature with the label.
  double label_mean = 0;
  for (int l : ds.labels) label_mean += l;
  label_mean /= n;
  double label_var = 0;
  for (int l : ds.labels) label_var += (l - label_mean) * (l - label_mean);

  for (std::size_t j = 0; j < d; ++j) {
    auto& row = report.rows[j];
    row.name = ds.schema[j];
    double mean = 0;
    for (const auto& r : ds.rows) mean += r[j];
    mean /= n;
    double var = 0, cov = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = ds.rows[i][j] - mean;
      var += dx * dx;
      cov += dx * (ds.labels[i] - label_mean);
    }
    if (var == 0 || label_var == 0) {
      row.constant = var == 0;
      row.pearson = 0.0;
    } else {
      row.pearson = cov / std::sqrt(var * label_var);
    }
    double mag = 0;
    for (int c = 0; c < model.num_classes; ++c) mag += model.weights[c][j] * model.weights[c][j];
    row.coef_magnitude = std::sqrt(mag);
  }

  // Recursive feature elimination: drop the weakest coefficient, refit.
  std::vector<std::size_t> active(d);
  for (std::size_t j = 0; j < d; ++j) active[j] = j;
  int next_rank = static_cast<int>(d);
  std::vector<std::vector<double>> coef(model.num_classes);
  for (int c = 0; c < model.num_classes; ++c) coef[c] = model.weights[c];

  while (active.size() > 1) {
    std::size_t weakest_pos = 0;
    double weakest_mag = -1;
    for (std::size_t pos = 0; pos < active.size(); ++pos) {
      double mag = 0;
      for (int c = 0; c < model.num_classes; ++c)
        mag += coef[c][active[pos]] * coef[c][active[pos]];
      if (weakest_mag < 0 || mag < weakest_mag) {
        weakest_mag = mag;
        weakest_pos = pos;
      }
    }
    report.rows[active[weakest_pos]].rfe_rank = next_rank--;
    active.erase(active.begin() + weakest_pos);

    if (active.size() > 1) {
      Dataset sub;
      sub.num_classes = ds.num_classes;
      sub.labels = ds.labels;
      sub.weights = ds.weights;
      for (std::size_t j : active) sub.schema.push_back(ds.schema[j]);
      sub.rows.reserve(n);
      for (const auto& r : ds.rows) {
        std::vector<double> sr;
        sr.reserve(active.size());
        for (std::size_t j : active) sr.push_back(r[j]);
        sub.rows.push_back(std::move(sr));
      }
      LinearModel refit = train_logistic(sub, refit_config);
      for (int c = 0; c < model.num_classes; ++c) {
        std::fill(coef[c].begin(), coef[c].end(), 0.0);
        for (std::size_t pos = 0; pos < active.size(); ++pos)
          coef[c][active[pos]] = refit.weights[c][pos];
      }
    }
  }
  if (!active.empty()) report.rows[active[0]].rfe_rank = next_rank;

  // Combined ranking: average of the three individual ranks; constant
  // features are pushed last.
  auto rank_by = [&](auto key) {
    std::vector<std::size_t> order(d);
    for (std::size_t j = 0; j < d; ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (report.rows[a].constant != report.rows[b].constant)
        return !report.rows[a].constant;
      const double ka = key(report.rows[a]), kb = key(report.rows[b]);
      if (ka != kb) return ka > kb;
      return report.rows[a].name < report.rows[b].name;
    });
    std::vector<int> rank(d);
    for (std::size_t pos = 0; pos < d; ++pos) rank[order[pos]] = static_cast<int>(pos) + 1;
    return rank;
  };
  auto r1 = rank_by([](const FeatureAnalysisRow& r) { return std::fabs(r.pearson); });
  auto r2 = rank_by([](const FeatureAnalysisRow& r) { return r.coef_magnitude; });
  for (std::size_t j = 0; j < d; ++j)
    report.rows[j].combined_rank =
        (r1[j] + r2[j] + report.rows[j].rfe_rank) / 3.0 + (report.rows[j].constant ? d : 0.0);

  std::sort(report.rows.begin(), report.rows.end(),
            [](const FeatureAnalysisRow& a, const FeatureAnalysisRow& b) {
              if (a.combined_rank != b.combined_rank) return a.combined_rank < b.combined_rank;
              return a.name < b.name;
            });
  return report;
}

// ---------------------------------------------------------------------------
// Cross-validation + ablation
// ---------------------------------------------------------------------------

namespace {

void summarize(CvResult& result) {
  auto stat = [&](auto accessor, double& mean, double& stdev) {
    mean = 0;
    for (const auto& m : result.fold_metrics) mean += accessor(m);
    mean /= result.fold_metrics.size();
    double var = 0;
    for (const auto& m : result.fold_metrics) {
      const double dx = accessor(m) - mean;
      var += dx * dx;
    }
    stdev = std::sqrt(var / result.fold_metrics.size());
  };
  stat([](const MetricsReport& m) { return m.accuracy; }, result.accuracy_mean,
       result.accuracy_std);
  stat([](const MetricsReport& m) { return m.precision; }, result.precision_mean,
       result.precision_std);
  stat([](const MetricsReport& m) { return m.recall; }, result.recall_mean, result.recall_std);
  stat([](const MetricsReport& m) { return m.f1; }, result.f1_mean, result.f1_std);
}

}  // namespace

CvResult cross_validate(const Dataset& ds, const CvConfig& config) {
  ds.validate();
  auto folds = stratified_fold_indices(ds.labels, config.folds, config.seed);
  CvResult result;
  result.fold_metrics.resize(config.folds);
  result.pooled_preds.assign(ds.size(), 0);

  parallel_for(folds.size(), config.jobs, [&](std::size_t f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    Dataset train = ds.subset(train_idx);
    LinearModel model;
    if (config.inner_grid) {
      model = grid_search_cv(train, config.penalties, config.c_grid, config.inner_folds,
                             Rng(config.seed).fork(f + 1000).next_u64(), config.class_weighted)
                  .model;
    } else {
      LogisticConfig fixed = config.fixed;
      fixed.class_weighted = config.class_weighted;
      model = train_logistic(train, fixed);
    }
    std::vector<int> preds, golds;
    preds.reserve(folds[f].size());
    for (std::size_t i : folds[f]) {
      int p = model.predict(ds.rows[i]);
      preds.push_back(p);
      golds.push_back(ds.labels[i]);
      result.pooled_preds[i] = p;
    }
    result.fold_metrics[f] = metrics(preds, golds, config.averaging, ds.num_classes);
  });
  summarize(result);
  return result;
}

CvResult majority_cv(const Dataset& ds, const CvConfig& config) {
  ds.validate();
  auto folds = stratified_fold_indices(ds.labels, config.folds, config.seed);
  CvResult result;
  result.fold_metrics.resize(config.folds);
  result.pooled_preds.assign(ds.size(), 0);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<long> counts(ds.num_classes, 0);
    for (std::size_t g = 0; g < folds.size(); ++g) {
      if (g == f) continue;
      for (std::size_t i : folds[g]) ++counts[ds.labels[i]];
    }
    int majority = 0;
    for (int c = 1; c < ds.num_classes; ++c)
      if (counts[c] > counts[majority]) majority = c;
    std::vector<int> preds(folds[f].size(), majority), golds;
    golds.reserve(folds[f].size());
    for (std::size_t i : folds[f]) {
      golds.push_back(ds.labels[i]);
      result.pooled_preds[i] = majority;
    }
    result.fold_metrics[f] = metrics(preds, golds, config.averaging, ds.num_classes);
  }
  summarize(result);
  return result;
}

AblationReport ablation(const std::vector<std::pair<std::string, Dataset>>& specs,
                        const CvConfig& config, const std::string& baseline_name) {
  if (specs.empty()) throw UsageError("ablation: needs at least one spec");
  AblationReport report;

  AblationRow majority_row;
  majority_row.name = baseline_name;
  majority_row.result = majority_cv(specs.front().second, config);
  report.rows.push_back(std::move(majority_row));

  for (const auto& [name, ds] : specs) {
    AblationRow row;
    row.name = name;
    row.result = cross_validate(ds, config);
    report.rows.push_back(std::move(row));
  }

  const auto& baseline = report.rows.front().result;
  auto fold_f1 = [](const CvResult& r) {
    std::vector<double> out;
    for (const auto& m : r.fold_metrics) out.push_back(m.f1);
    return out;
  };
  const auto base_f1 = fold_f1(baseline);
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    auto& row = report.rows[i];
    try {
      auto [t, p] = t_test_two_sided(fold_f1(row.result), base_f1);
      row.p_vs_baseline = p;
    } catch (const UsageError&) {
      row.p_vs_baseline = 1.0;
    }
    row.stars = row.p_vs_baseline < 0.001 ? "***"
                : row.p_vs_baseline < 0.01 ? "**"
                : row.p_vs_baseline < 0.05 ? "*"
                                           : "";
  }
  return report;
}

const char* to_string(Averaging a) { return a == Averaging::Macro ? "macro" : "weighted"; }

}  // namespace kairos
