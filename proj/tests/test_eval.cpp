#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>

#include "doctest.h"
#include "kairos/eval.hpp"
#include "kairos/synth.hpp"
#include "kairos/util.hpp"

using namespace kairos;

namespace {

UserProfile user(const std::string& id, const char* political, const char* religious) {
  UserProfile u;
  u.user_id = id;
  if (political) u.political_ideology = political;
  if (religious) u.religious_ideology = religious;
  return u;
}

Ballot ballot_for(const std::string& voter, Choice convincing, VoteStance before,
                  VoteStance after, Choice sources = Choice::Tie) {
  Ballot b;
  b.voter_id = voter;
  b.stance_before = before;
  b.stance_after = after;
  b.choices.convincing_arguments = convincing;
  b.choices.reliable_sources = sources;
  return b;
}

Debate debate_between(const std::string& id, const std::string& pro, const std::string& con,
                      const std::string& category = "Religion") {
  Debate d;
  d.debate_id = id;
  d.topic = "topic";
  d.category = category;
  d.pro_user = pro;
  d.con_user = con;
  d.rounds.push_back({1, "pro words.", "con words."});
  return d;
}

/// One debate decided by a single sweeping ballot; used to build precise
/// win/loss sequences for the setting pairs.
Debate outcome_debate(const std::string& id, const std::string& user,
                      const std::string& opponent, bool user_wins, std::int64_t ts) {
  Debate d = debate_between(id, user, opponent, "Politics");
  d.timestamp = ts;
  Ballot b;
  b.voter_id = "observer";
  b.choices = {user_wins ? Choice::Pro : Choice::Con, user_wins ? Choice::Pro : Choice::Con,
               user_wins ? Choice::Pro : Choice::Con, user_wins ? Choice::Pro : Choice::Con};
  d.ballots.push_back(b);
  return d;
}

/// Simpson integration oracle for the chi-squared(1) upper tail.
double chi2_sf_oracle(double x) {
  if (x <= 0) return 1.0;
  auto pdf = [](double t) {
    return std::exp(-t / 2.0) / (std::sqrt(2.0 * M_PI * t));
  };
  // Integrate the density from x to a far cutoff.
  const double hi = x + 200.0;
  const int steps = 400000;
  const double h = (hi - x) / steps;
  double sum = 0;
  for (int i = 0; i <= steps; ++i) {
    double t = x + i * h;
    if (t <= 0) t = 1e-12;
    double w = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
    sum += w * pdf(t);
  }
  return sum * h / 3.0;
}

/// Simpson integration oracle for the two-sided t-distribution tail.
double t_sf_two_sided_oracle(double t, double df) {
  const double at = std::fabs(t);
  auto pdf = [df](double x) {
    return std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) /
           std::sqrt(df * M_PI) * std::pow(1.0 + x * x / df, -(df + 1) / 2);
  };
  const double hi = at + 400.0;
  const int steps = 400000;
  const double h = (hi - at) / steps;
  double sum = 0;
  for (int i = 0; i <= steps; ++i) {
    double x = at + i * h;
    double w = (i == 0 || i == steps) ? 1 : (i % 2 ? 4 : 2);
    sum += w * pdf(x);
  }
  return 2.0 * sum * h / 3.0;
}

}  // namespace

TEST_CASE("stratified 70/15/15 split") {
  std::vector<int> labels;
  for (int i = 0; i < 100; ++i) labels.push_back(i < 60 ? 0 : 1);
  SplitIndices s = split_70_15_15(labels, 5);
  CHECK(s.train.size() == 70);
  CHECK(s.val.size() == 15);
  CHECK(s.test.size() == 15);

  // Disjoint and exhaustive.
  std::set<std::size_t> all;
  for (auto part : {&s.train, &s.val, &s.test}) all.insert(part->begin(), part->end());
  CHECK(all.size() == 100);

  // Per-class proportions within one row.
  auto count_class = [&](const std::vector<std::size_t>& part, int cls) {
    long n = 0;
    for (std::size_t i : part) n += labels[i] == cls;
    return n;
  };
  CHECK(std::abs(count_class(s.test, 0) - 9) <= 1);
  CHECK(std::abs(count_class(s.val, 1) - 6) <= 1);

  SplitIndices again = split_70_15_15(labels, 5);
  CHECK(again.train == s.train);
  CHECK(again.val == s.val);
  CHECK(again.test == s.test);
  SplitIndices other = split_70_15_15(labels, 6);
  CHECK(other.train != s.train);

  CHECK_THROWS_AS(split_70_15_15({0, 1, 0, 1, 0, 1, 0, 1, 0}, 1), UsageError);  // < 10 rows
  std::vector<int> rare(20, 0);
  rare[0] = 1;
  rare[1] = 1;
  CHECK_THROWS_AS(split_70_15_15(rare, 1), UsageError);  // class with < 3 rows
}

TEST_CASE("stratified k-fold") {
  std::vector<int> labels = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  auto folds = stratified_kfold(labels, 5, 2);
  REQUIRE(folds.size() == 5);
  std::set<std::size_t> all;
  for (const auto& fold : folds) {
    CHECK(fold.size() == 2);
    long ones = 0;
    for (std::size_t i : fold) ones += labels[i];
    CHECK(ones == 1);  // ratio preserved within one row
    all.insert(fold.begin(), fold.end());
  }
  CHECK(all.size() == labels.size());
}

TEST_CASE("task 1 keeps changed-stance voters of controlled religious pairs") {
  Corpus c;
  c.users.emplace("a", user("a", nullptr, "atheist"));
  c.users.emplace("b", user("b", nullptr, "christian"));
  c.users.emplace("v1", user("v1", nullptr, "christian"));
  c.users.emplace("v2", user("v2", nullptr, nullptr));      // undeclared: excluded
  c.users.emplace("v3", user("v3", nullptr, "christian"));  // unchanged: excluded
  c.users.emplace("v4", user("v4", nullptr, "buddhist"));   // third ideology: excluded

  Debate d = debate_between("d1", "a", "b");
  d.ballots.push_back(ballot_for("v1", Choice::Pro, VoteStance::Undecided, VoteStance::Pro));
  d.ballots.push_back(ballot_for("v2", Choice::Pro, VoteStance::Undecided, VoteStance::Pro));
  d.ballots.push_back(ballot_for("v3", Choice::Pro, VoteStance::Pro, VoteStance::Pro));
  d.ballots.push_back(ballot_for("v4", Choice::Pro, VoteStance::Con, VoteStance::Pro));
  c.debates.push_back(d);

  // Same-ideology debate: excluded wholesale.
  c.users.emplace("a2", user("a2", nullptr, "atheist"));
  Debate same = debate_between("d2", "a", "a2");
  same.ballots.push_back(ballot_for("v1", Choice::Pro, VoteStance::Undecided, VoteStance::Pro));
  c.debates.push_back(same);

  auto rows = task1_pairs(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].ballot->voter_id == "v1");
  CHECK(rows[0].label == Winner::Pro);

  CHECK(task1_pairs(c, std::string("Politics")).empty());
}

TEST_CASE("task 2 keeps declared voters regardless of stance change, drops ties") {
  Corpus c;
  c.users.emplace("lib", user("lib", "liberal", nullptr));
  c.users.emplace("con", user("con", "conservative", nullptr));
  c.users.emplace("v1", user("v1", "liberal", nullptr));
  c.users.emplace("v2", user("v2", "green", nullptr));  // not one of the two: excluded

  Debate d = debate_between("d1", "lib", "con", "Politics");
  // v1 awards CON convincing (3) + sources (2): labeled CON without a stance change.
  d.ballots.push_back(ballot_for("v1", Choice::Con, VoteStance::Pro, VoteStance::Pro,
                                 Choice::Con));
  d.ballots.push_back(ballot_for("v2", Choice::Con, VoteStance::Pro, VoteStance::Pro));
  d.ballots.push_back(ballot_for("v1", Choice::Tie, VoteStance::Pro, VoteStance::Pro));  // tie
  c.debates.push_back(d);

  auto rows = task2_pairs(c);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].label == Winner::Con);
}

TEST_CASE("language-only ceiling assigns one prediction per debate") {
  Corpus c;
  c.users.emplace("lib", user("lib", "liberal", nullptr));
  c.users.emplace("con", user("con", "conservative", nullptr));
  c.users.emplace("v", user("v", "liberal", nullptr));
  Debate d1 = debate_between("d1", "lib", "con", "Politics");
  // Three voters: two PRO, one CON -> best debate-constant predictor gets 2/3.
  d1.ballots.push_back(ballot_for("v", Choice::Pro, VoteStance::Con, VoteStance::Pro));
  d1.ballots.push_back(ballot_for("v", Choice::Pro, VoteStance::Con, VoteStance::Pro));
  d1.ballots.push_back(ballot_for("v", Choice::Con, VoteStance::Pro, VoteStance::Con));
  c.debates.push_back(d1);
  auto rows = task2_pairs(c);
  REQUIRE(rows.size() == 3);
  CHECK(language_only_accuracy_ceiling(rows) == doctest::Approx(2.0 / 3));
}

TEST_CASE("setting pairs match debate counts and split by stage-2+3 success") {
  Corpus c;
  c.users.emplace("good", user("good", "liberal", nullptr));
  c.users.emplace("bad", user("bad", "conservative", nullptr));
  c.users.emplace("short", user("short", "liberal", nullptr));

  // 12 debates each: "good" loses its first 4 (prior 0) then wins 8 straight;
  // "bad" wins its first 4 (prior 1.0) then loses 8.
  for (int i = 0; i < 12; ++i) {
    c.debates.push_back(
        outcome_debate("g" + std::to_string(i), "good", "filler_g" + std::to_string(i),
                       i >= 4, 100 + i));
    c.debates.push_back(
        outcome_debate("b" + std::to_string(i), "bad", "filler_b" + std::to_string(i),
                       i < 4, 100 + i));
  }
  // A user with a different debate count never pairs.
  for (int i = 0; i < 11; ++i)
    c.debates.push_back(
        outcome_debate("s" + std::to_string(i), "short", "filler_s" + std::to_string(i),
                       i >= 3, 100 + i));

  auto pairs = setting_pairs(c, 1, 7);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].debate_count == 12);
  const std::string& successful = pairs[0].label == 0 ? pairs[0].first : pairs[0].second;
  CHECK(successful == "good");

  // Setting 2 needs both priors <= 0.3: "bad" has prior 1.0.
  CHECK(setting_pairs(c, 2, 7).empty());
  // Setting 3 needs both priors >= 0.7: "good" has prior 0.
  CHECK(setting_pairs(c, 3, 7).empty());
  CHECK_THROWS_AS(setting_pairs(c, 4, 7), UsageError);
}

TEST_CASE("setting 2 and 3 filter on the stage-1 prior") {
  Corpus c;
  c.users.emplace("s2a", user("s2a", nullptr, nullptr));
  c.users.emplace("s2b", user("s2b", nullptr, nullptr));
  // Both priors 0.25 (1 win in first 4): s2a then wins out, s2b loses out.
  for (int i = 0; i < 12; ++i) {
    c.debates.push_back(outcome_debate("a" + std::to_string(i), "s2a",
                                       "fa" + std::to_string(i), i == 0 || i >= 4, 100 + i));
    c.debates.push_back(outcome_debate("b" + std::to_string(i), "s2b",
                                       "fb" + std::to_string(i), i == 0, 100 + i));
  }
  auto pairs = setting_pairs(c, 2, 9);
  REQUIRE(pairs.size() == 1);
  CHECK(setting_pairs(c, 3, 9).empty());
}

TEST_CASE("within-pair presentation order is balanced by the seed") {
  Corpus c;
  for (int u = 0; u < 12; ++u) {
    const std::string good = "good" + std::to_string(u);
    const std::string bad = "bad" + std::to_string(u);
    c.users.emplace(good, user(good, nullptr, nullptr));
    c.users.emplace(bad, user(bad, nullptr, nullptr));
    for (int i = 0; i < 6; ++i) {
      c.debates.push_back(outcome_debate(good + "_" + std::to_string(i), good,
                                         "f" + good + std::to_string(i), true, 100 + i));
      c.debates.push_back(outcome_debate(bad + "_" + std::to_string(i), bad,
                                         "f" + bad + std::to_string(i), false, 100 + i));
    }
  }
  auto pairs = setting_pairs(c, 1, 3);
  REQUIRE(pairs.size() == 144);  // full cross product within the count bucket
  long firsts = 0;
  for (const auto& p : pairs) firsts += p.label == 0;
  CHECK(firsts > 40);
  CHECK(firsts < 104);  // both presentation orders occur

  auto again = setting_pairs(c, 1, 3);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    CHECK(pairs[i].first == again[i].first);
    CHECK(pairs[i].label == again[i].label);
  }
}

TEST_CASE("metrics: perfect predictions") {
  MetricsReport r = metrics({0, 1, 2}, {0, 1, 2}, Averaging::Macro);
  CHECK(r.accuracy == 1.0);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  CHECK_THROWS_AS(metrics({}, {}, Averaging::Macro), UsageError);
}

TEST_CASE("majority-only predictor on the published class shares") {
  // Gold shares 22.1% / 19.6% / 58.3%; predicting the majority class only.
  std::vector<int> golds, preds;
  for (int i = 0; i < 221; ++i) golds.push_back(0);
  for (int i = 0; i < 196; ++i) golds.push_back(1);
  for (int i = 0; i < 583; ++i) golds.push_back(2);
  preds.assign(golds.size(), 2);
  MetricsReport r = metrics(preds, golds, Averaging::Macro, 3);
  CHECK(100 * r.precision == doctest::Approx(19.43).epsilon(0.01));
  CHECK(100 * r.recall == doctest::Approx(33.33).epsilon(0.001));
  CHECK(100 * r.f1 == doctest::Approx(24.55).epsilon(0.005));
}

TEST_CASE("weighted metrics worked example") {
  // preds (1,0) vs golds (1,1): weights are gold frequencies, so class 1
  // carries all the weight: F1 = 2/3.
  MetricsReport r = metrics({1, 0}, {1, 1}, Averaging::Weighted, 2);
  CHECK(r.f1 == doctest::Approx(2.0 / 3));
  CHECK(r.accuracy == doctest::Approx(0.5));
}

TEST_CASE("macro averaging warns about classes absent from the golds") {
  MetricsReport r = metrics({0, 1, 0}, {0, 0, 0}, Averaging::Macro, 3);
  CHECK(r.warnings.size() == 2);  // classes 1 and 2 unsupported
}

TEST_CASE("metrics are invariant under simultaneous permutation") {
  Rng rng(3);
  std::vector<int> preds, golds;
  for (int i = 0; i < 60; ++i) {
    preds.push_back(static_cast<int>(rng.below(3)));
    golds.push_back(static_cast<int>(rng.below(3)));
  }
  MetricsReport a = metrics(preds, golds, Averaging::Macro, 3);
  std::vector<std::size_t> order(preds.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<int> p2, g2;
  for (std::size_t i : order) {
    p2.push_back(preds[i]);
    g2.push_back(golds[i]);
  }
  MetricsReport b = metrics(p2, g2, Averaging::Macro, 3);
  CHECK(a.precision == doctest::Approx(b.precision));
  CHECK(a.recall == doctest::Approx(b.recall));
  CHECK(a.f1 == doctest::Approx(b.f1));
}

TEST_CASE("mcnemar worked example: b=10, c=2") {
  // Build paired predictions with 10 (A right, B wrong) and 2 (A wrong, B right).
  std::vector<int> golds, a, b;
  for (int i = 0; i < 10; ++i) {
    golds.push_back(1);
    a.push_back(1);
    b.push_back(0);
  }
  for (int i = 0; i < 2; ++i) {
    golds.push_back(1);
    a.push_back(0);
    b.push_back(1);
  }
  for (int i = 0; i < 8; ++i) {
    golds.push_back(0);
    a.push_back(0);
    b.push_back(0);
  }
  auto [statistic, p] = mcnemar(a, b, golds);
  CHECK(statistic == doctest::Approx(49.0 / 12).epsilon(1e-9));  // (|10-2|-1)^2 / 12
  CHECK(p == doctest::Approx(0.0433).epsilon(0.02));
  CHECK(p == doctest::Approx(chi2_sf_oracle(statistic)).epsilon(1e-4));

  // Identical predictions: no discordant pairs.
  auto [s2, p2] = mcnemar(a, a, golds);
  CHECK(s2 == 0.0);
  CHECK(p2 == 1.0);

  // Symmetric discordance keeps the statistic at or below the correction.
  std::vector<int> c = b, d = a;
  auto [s3, p3] = mcnemar(a, b, golds);
  auto [s4, p4] = mcnemar(b, a, golds);
  CHECK(s3 == doctest::Approx(s4));
}

TEST_CASE("chi-squared survival matches the integration oracle") {
  for (double x : {0.5, 1.0, 2.5, 4.083333, 7.0}) {
    CHECK(chi2_sf_1df(x) == doctest::Approx(chi2_sf_oracle(x)).epsilon(1e-6));
  }
}

TEST_CASE("welch t-test basics") {
  auto [t0, p0] = t_test_two_sided({1, 2, 3}, {1, 2, 3});
  CHECK(t0 == 0.0);
  CHECK(p0 == doctest::Approx(1.0));

  auto [t1, p1] = t_test_two_sided({0, 0, 0, 1e-6}, {1, 1, 1, 1 + 1e-6});
  CHECK(p1 < 1e-6);

  auto [t2, p2] = t_test_two_sided({5, 6, 7}, {1, 2, 3});
  auto [t3, p3] = t_test_two_sided({1, 2, 3}, {5, 6, 7});
  CHECK(t2 == doctest::Approx(-t3));
  CHECK(p2 == doctest::Approx(p3));

  CHECK_THROWS_AS(t_test_two_sided({1, 1}, {2, 2}), UsageError);  // zero variance in both
  CHECK_THROWS_AS(t_test_two_sided({1}, {2, 3}), UsageError);
}

TEST_CASE("welch p-values match the integration oracle on random samples") {
  Rng rng(13);
  for (int trial = 0; trial < 8; ++trial) {
    std::vector<double> a, b;
    const int na = 3 + static_cast<int>(rng.below(8)), nb = 3 + static_cast<int>(rng.below(8));
    for (int i = 0; i < na; ++i) a.push_back(rng.normal());
    for (int i = 0; i < nb; ++i) b.push_back(rng.normal() + rng.uniform());
    auto [t, p] = t_test_two_sided(a, b);
    // Recompute Welch df in the test, then integrate the density.
    auto mean_var = [](const std::vector<double>& v) {
      double m = 0;
      for (double x : v) m += x;
      m /= v.size();
      double var = 0;
      for (double x : v) var += (x - m) * (x - m);
      return std::pair<double, double>(m, var / (v.size() - 1));
    };
    auto [m1, v1] = mean_var(a);
    auto [m2, v2] = mean_var(b);
    const double se1 = v1 / a.size(), se2 = v2 / b.size();
    const double df = (se1 + se2) * (se1 + se2) /
                      (se1 * se1 / (a.size() - 1) + se2 * se2 / (b.size() - 1));
    CHECK(p == doctest::Approx(t_sf_two_sided_oracle(t, df)).epsilon(1e-4));
  }
}

TEST_CASE("feature analysis ranks a label-equal feature first") {
  Dataset ds;
  ds.schema = {"label_copy", "noise", "constant"};
  Rng rng(5);
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    ds.push_row({static_cast<double>(label), rng.normal(), 2.5}, label);
  }
  LinearModel model = train_logistic(ds, {});
  FeatureAnalysisReport report = feature_analysis(ds, model);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].name == "label_copy");
  CHECK(report.rows[0].pearson == doctest::Approx(1.0));
  CHECK(report.rows[0].rfe_rank == 1);
  for (const auto& row : report.rows) {
    if (row.name == "constant") CHECK(row.constant);
  }
  CHECK(report.rows[2].name == "constant");
}

TEST_CASE("planted feature survives elimination ahead of noise") {
  int planted_first = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(100 + seed);
    Dataset ds;
    ds.schema = {"planted", "noise_a", "noise_b"};
    for (int i = 0; i < 80; ++i) {
      const int label = i % 2;
      const double planted = label ? 1.0 + 0.3 * rng.normal() : -1.0 + 0.3 * rng.normal();
      ds.push_row({planted, rng.normal(), rng.normal()}, label);
    }
    LinearModel model = train_logistic(ds, {});
    FeatureAnalysisReport report = feature_analysis(ds, model);
    if (report.rows[0].name == "planted") ++planted_first;
  }
  CHECK(planted_first >= 19);  // >= 95% of seeds
}

TEST_CASE("cross validation and the majority baseline") {
  Rng rng(9);
  Dataset ds;
  ds.schema = {"x"};
  for (int i = 0; i < 100; ++i) {
    const int label = i % 2;
    ds.push_row({label ? 1.0 + rng.normal() : -1.0 + rng.normal()}, label);
  }
  CvConfig config;
  config.inner_grid = false;
  config.seed = 4;
  CvResult cv = cross_validate(ds, config);
  CHECK(cv.accuracy_mean > 0.8);
  CHECK(cv.fold_metrics.size() == 5);
  CHECK(cv.pooled_preds.size() == 100);

  CvResult maj = majority_cv(ds, config);
  CHECK(maj.accuracy_mean == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("cross validation is independent of the worker count") {
  Rng rng(21);
  Dataset ds;
  ds.schema = {"x", "y"};
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    ds.push_row({label + 0.5 * rng.normal(), rng.normal()}, label);
  }
  CvConfig serial;
  serial.inner_grid = false;
  serial.jobs = 1;
  CvConfig parallel = serial;
  parallel.jobs = 4;
  CvResult a = cross_validate(ds, serial);
  CvResult b = cross_validate(ds, parallel);
  CHECK(a.pooled_preds == b.pooled_preds);
  CHECK(a.f1_mean == doctest::Approx(b.f1_mean).epsilon(1e-15));
}

TEST_CASE("ablation always carries the majority baseline and is deterministic") {
  Rng rng(11);
  Dataset ds;
  ds.schema = {"x"};
  for (int i = 0; i < 60; ++i) {
    const int label = i % 2;
    ds.push_row({label ? 1.0 : -1.0}, label);
  }
  CvConfig config;
  config.inner_grid = false;
  AblationReport report = ablation({{"solo", ds}, {"solo_again", ds}}, config);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.rows[0].name == "majority");
  CHECK(report.rows[1].result.f1_mean == doctest::Approx(report.rows[2].result.f1_mean));
  CHECK(report.rows[1].p_vs_baseline == doctest::Approx(report.rows[2].p_vs_baseline));
  CHECK(report.rows[1].stars == report.rows[2].stars);

  AblationReport single = ablation({{"solo", ds}}, config);
  CHECK(single.rows.size() == 2);
}

TEST_CASE("task datasets assert the controlled trait on every row") {
  SynthConfig config = preset_ideology(31);
  config.n_users = 60;
  config.n_debates = 60;
  Corpus corpus = gen_debates(config);
  auto rows = task2_pairs(corpus);
  REQUIRE(!rows.empty());
  for (const auto& row : rows) {
    const auto& voter = corpus.users.at(row.ballot->voter_id);
    const auto& pro = corpus.users.at(row.debate->pro_user);
    const auto& con = corpus.users.at(row.debate->con_user);
    REQUIRE(voter.political_ideology.has_value());
    CHECK(*pro.political_ideology != *con.political_ideology);
    CHECK((voter.political_ideology == pro.political_ideology ||
           voter.political_ideology == con.political_ideology));
  }
}

TEST_CASE("task dataset feature columns can be narrowed") {
  SynthConfig config = preset_ideology(33);
  config.n_users = 40;
  config.n_debates = 40;
  Corpus corpus = gen_debates(config);
  auto rows = task2_pairs(corpus);
  TaskFeatureConfig features;
  features.user = true;
  features.catalog = synth_issue_catalog(config);
  Dataset full = build_task_dataset(corpus, rows, features, builtin_lexicons());
  CHECK(full.schema ==
        std::vector<std::string>{"opinion_similarity", "match_religious", "match_political"});

  features.include = {"match_political"};
  Dataset narrow = build_task_dataset(corpus, rows, features, builtin_lexicons());
  CHECK(narrow.schema == std::vector<std::string>{"match_political"});
  CHECK(narrow.size() == full.size());

  features.include = {"no_such_column"};
  CHECK_THROWS_AS(build_task_dataset(corpus, rows, features, builtin_lexicons()), UsageError);
}
