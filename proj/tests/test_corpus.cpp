#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <sstream>

#include "doctest.h"
#include "kairos/corpus.hpp"
#include "kairos/synth.hpp"
#include "kairos/util.hpp"

using namespace kairos;

namespace {

const char* kTinyDebates = R"([
  {
    "debate_id": "d1",
    "topic": "cats",
    "category": "Science",
    "pro_user": "alice",
    "con_user": "bob",
    "timestamp": 10,
    "rounds": [{"index": 1, "pro_text": "cats are great.", "con_text": "dogs are better."}],
    "ballots": [
      {
        "voter_id": "carol",
        "stance_before": "UND",
        "stance_after": "PRO",
        "choices": {
          "conduct": "TIE",
          "spelling_grammar": "TIE",
          "convincing_arguments": "PRO",
          "reliable_sources": "TIE"
        }
      }
    ]
  }
])";

ArgumentTree example_tree() {
  // thesis -> O1 -> S3, the worked three-claim chain.
  Corpus c = parse_corpus(std::string(R"([
    {"tree_id": "t1", "nodes": [
      {"claim_id": "thesis", "text": "torture is acceptable", "tally": [0,0,0,0,0]},
      {"claim_id": "O1", "text": "harming the defenseless is wrong", "parent": "thesis",
       "edge_label": "OPPOSE", "tally": [30,25,15,10,10]},
      {"claim_id": "S3", "text": "state actors need due process", "parent": "O1",
       "edge_label": "SUPPORT", "tally": [5,1,0,0,0]}
    ]}
  ])"),
                          CorpusKind::Trees);
  return c.trees.at(0);
}

UserProfile profile_with(std::initializer_list<std::pair<const char*, Stance>> stances) {
  UserProfile u;
  u.user_id = "u";
  for (auto& [issue, stance] : stances) u.big_issue_stances[issue] = stance;
  return u;
}

}  // namespace

TEST_CASE("empty debates file parses to an empty corpus") {
  Corpus c = parse_corpus(std::string("[]"), CorpusKind::Debates);
  CHECK(c.debates.empty());
  CHECK(c.users.empty());
}

TEST_CASE("parse then serialize is the identity on canonical JSON") {
  const std::string canonical = canonicalize_json(kTinyDebates);
  Corpus c = parse_corpus(canonical, CorpusKind::Debates);
  CHECK(serialize_corpus(c, CorpusKind::Debates) == canonical);
}

TEST_CASE("round trip holds for generated corpora of every kind") {
  SynthConfig config = preset_ideology(21);
  config.n_users = 30;
  config.n_debates = 20;
  config.n_trees = 5;
  Corpus c = gen_debates(config);
  c.trees = gen_trees(config);
  for (CorpusKind kind : {CorpusKind::Debates, CorpusKind::Users, CorpusKind::Trees}) {
    const std::string once = serialize_corpus(c, kind);
    Corpus reparsed = parse_corpus(once, kind, {.strict = true});
    CHECK(serialize_corpus(reparsed, kind) == once);
    CHECK(once == canonicalize_json(once));
  }
}

TEST_CASE("schema violations are rejected with the offending path") {
  CHECK_THROWS_WITH_AS(
      parse_corpus(std::string(R"([{"debate_id": "d1"}])"), CorpusKind::Debates),
      doctest::Contains("missing required field"), ValidationError);
  CHECK_THROWS_AS(parse_corpus(std::string("{}"), CorpusKind::Debates), ValidationError);
}

TEST_CASE("duplicate identifiers are rejected") {
  std::string dupe = std::string(kTinyDebates);
  std::string body = dupe.substr(1, dupe.rfind(']') - 1);
  dupe.insert(dupe.rfind(']'), "," + body);
  CHECK_THROWS_WITH_AS(parse_corpus(dupe, CorpusKind::Debates),
                       doctest::Contains("duplicate debate_id"), ValidationError);
}

TEST_CASE("ballot stances are restricted to PRO, CON and UND") {
  std::string bad = kTinyDebates;
  bad.replace(bad.find("\"UND\""), 5, "\"N/O\"");
  CHECK_THROWS_WITH_AS(parse_corpus(bad, CorpusKind::Debates),
                       doctest::Contains("invalid ballot stance"), ValidationError);
}

TEST_CASE("strict mode rejects unknown fields, lax mode warns") {
  std::string extra = kTinyDebates;
  extra.insert(extra.find("\"topic\""), "\"mystery\": 1, ");
  CHECK_THROWS_WITH_AS(parse_corpus(extra, CorpusKind::Debates, {.strict = true}),
                       doctest::Contains("unknown field"), ValidationError);
  std::vector<std::string> warnings;
  ParseOptions opts;
  opts.warnings = &warnings;
  Corpus c = parse_corpus(extra, CorpusKind::Debates, opts);
  CHECK(c.debates.size() == 1);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("mystery") != std::string::npos);
}

TEST_CASE("tree with an edge to a missing parent is rejected") {
  CHECK_THROWS_WITH_AS(parse_corpus(std::string(R"([
        {"tree_id": "t1", "nodes": [
          {"claim_id": "root", "text": "x", "tally": [0,0,0,0,0]},
          {"claim_id": "a", "text": "y", "parent": "ghost", "edge_label": "SUPPORT",
           "tally": [0,0,0,0,0]}
        ]}
      ])"),
                                    CorpusKind::Trees),
                       doctest::Contains("unknown parent"), ValidationError);
}

TEST_CASE("cyclic trees and multi-root trees are rejected") {
  CHECK_THROWS_AS(parse_corpus(std::string(R"([
    {"tree_id": "t1", "nodes": [
      {"claim_id": "root", "text": "x", "tally": [0,0,0,0,0]},
      {"claim_id": "a", "text": "y", "parent": "b", "edge_label": "SUPPORT", "tally": [0,0,0,0,0]},
      {"claim_id": "b", "text": "z", "parent": "a", "edge_label": "OPPOSE", "tally": [0,0,0,0,0]}
    ]}
  ])"),
                               CorpusKind::Trees),
                  ValidationError);
  CHECK_THROWS_WITH_AS(parse_corpus(std::string(R"([
    {"tree_id": "t1", "nodes": [
      {"claim_id": "r1", "text": "x", "tally": [0,0,0,0,0]},
      {"claim_id": "r2", "text": "y", "tally": [0,0,0,0,0]}
    ]}
  ])"),
                                    CorpusKind::Trees),
                       doctest::Contains("multiple parentless"), ValidationError);
}

TEST_CASE("big-issue encoding follows the (PRO, CON, N/O, UND) block layout") {
  UserProfile u = profile_with({{"abortion", Stance::Con}});
  BigIssuesVector v = encode_big_issues(u, {"abortion"});
  CHECK(v.values == std::vector<double>{0, 1, 0, 0});

  u = profile_with({{"abortion", Stance::Undecided}});
  v = encode_big_issues(u, {"abortion"});
  CHECK(v.values == std::vector<double>{0, 0, 0, 1});
}

TEST_CASE("users with any N/S stance are excluded from encoding") {
  UserProfile u = profile_with({{"a", Stance::Pro}, {"b", Stance::NotSaying}});
  CHECK_THROWS_WITH_AS(encode_big_issues(u, {"a", "b"}), doctest::Contains("excluded"),
                       ValidationError);
  CHECK_THROWS_AS(encode_big_issues(profile_with({{"a", Stance::Pro}}), {"a", "missing"}),
                  ValidationError);
}

TEST_CASE("encoding always has exactly one 1 per issue block") {
  Rng rng(99);
  std::vector<std::string> catalog = {"i1", "i2", "i3", "i4", "i5"};
  static const Stance stances[4] = {Stance::Pro, Stance::Con, Stance::NoOpinion,
                                    Stance::Undecided};
  for (int trial = 0; trial < 50; ++trial) {
    UserProfile u;
    for (const auto& issue : catalog) u.big_issue_stances[issue] = stances[rng.below(4)];
    BigIssuesVector v = encode_big_issues(u, catalog);
    REQUIRE(v.values.size() == 4 * catalog.size());
    for (std::size_t block = 0; block < catalog.size(); ++block) {
      double sum = 0;
      for (int k = 0; k < 4; ++k) sum += v.values[4 * block + k];
      CHECK(sum == 1.0);
    }
  }
}

TEST_CASE("opinion similarity worked examples") {
  UserProfile a = profile_with({{"x", Stance::Pro}, {"y", Stance::Con}});
  UserProfile b = profile_with({{"x", Stance::Pro}, {"y", Stance::Undecided}});
  std::vector<std::string> catalog = {"x", "y"};
  BigIssuesVector va = encode_big_issues(a, catalog);
  BigIssuesVector vb = encode_big_issues(b, catalog);
  CHECK(opinion_similarity(va, va) == doctest::Approx(1.0));
  CHECK(opinion_similarity(va, vb) == doctest::Approx(0.5));

  BigIssuesVector single_pro = encode_big_issues(profile_with({{"x", Stance::Pro}}), {"x"});
  BigIssuesVector single_con = encode_big_issues(profile_with({{"x", Stance::Con}}), {"x"});
  CHECK(opinion_similarity(single_pro, single_con) == doctest::Approx(0.0));
}

TEST_CASE("opinion similarity is symmetric and matches the shared-stance ratio") {
  Rng rng(7);
  std::vector<std::string> catalog = {"a", "b", "c", "d", "e", "f"};
  static const Stance stances[4] = {Stance::Pro, Stance::Con, Stance::NoOpinion,
                                    Stance::Undecided};
  for (int trial = 0; trial < 40; ++trial) {
    UserProfile u, v;
    int shared = 0;
    for (const auto& issue : catalog) {
      Stance su = stances[rng.below(4)], sv = stances[rng.below(4)];
      u.big_issue_stances[issue] = su;
      v.big_issue_stances[issue] = sv;
      if (su == sv) ++shared;
    }
    BigIssuesVector vu = encode_big_issues(u, catalog);
    BigIssuesVector vv = encode_big_issues(v, catalog);
    const double expected = static_cast<double>(shared) / catalog.size();
    CHECK(opinion_similarity(vu, vv) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(opinion_similarity(vu, vv) == doctest::Approx(opinion_similarity(vv, vu)));
  }
  CHECK_THROWS_AS(opinion_similarity(BigIssuesVector{{1, 0}}, BigIssuesVector{{1, 0, 0, 0}}),
                  UsageError);
}

TEST_CASE("matching traits") {
  UserProfile a, b;
  a.user_id = "a";
  b.user_id = "b";
  a.political_ideology = "liberal";
  b.political_ideology = "liberal";
  CHECK(matching_trait(a, b, Trait::PoliticalIdeology) == 1);
  a.religious_ideology = "atheist";
  b.religious_ideology = "christian";
  CHECK(matching_trait(a, b, Trait::ReligiousIdeology) == 0);
  CHECK_THROWS_AS(matching_trait(a, b, Trait::Gender), UsageError);
}

TEST_CASE("vote-count filter keeps debates with strictly more than k ballots") {
  Corpus c = parse_corpus(std::string(kTinyDebates), CorpusKind::Debates);
  Debate three = c.debates[0];
  three.debate_id = "d3";
  three.ballots.assign(3, three.ballots[0]);
  Debate four = c.debates[0];
  four.debate_id = "d4";
  four.ballots.assign(4, four.ballots[0]);
  Corpus corpus;
  corpus.debates = {three, four};

  Corpus filtered = filter_min_votes(corpus, 3);
  REQUIRE(filtered.debates.size() == 1);
  CHECK(filtered.debates[0].debate_id == "d4");

  CHECK(filter_min_votes(corpus, 0).debates.size() == 2);
  CHECK_THROWS_AS(filter_min_votes(corpus, -1), UsageError);
}

TEST_CASE("context walks from the thesis down to the parent") {
  ArgumentTree tree = example_tree();
  CHECK(context_of(tree, "O1") == std::vector<std::string>{"thesis"});
  CHECK(context_length(tree, "O1") == 1);
  CHECK(context_of(tree, "S3") == std::vector<std::string>{"thesis", "O1"});
  CHECK(context_length(tree, "S3") == 2);
  CHECK(context_of(tree, "thesis").empty());
  CHECK(context_length(tree, "thesis") == 0);
  CHECK_THROWS_AS(context_of(tree, "nope"), ValidationError);
}

TEST_CASE("context plus the claim reproduces an argument path") {
  ArgumentTree tree = example_tree();
  auto path = context_of(tree, "S3");
  path.push_back("S3");
  std::vector<std::string> upward;
  const ClaimNode* cur = &tree.node("S3");
  upward.push_back(cur->claim_id);
  while (cur->parent) {
    cur = &tree.node(*cur->parent);
    upward.push_back(cur->claim_id);
  }
  std::reverse(upward.begin(), upward.end());
  CHECK(path == upward);
}
