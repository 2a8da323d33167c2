#include "kairos/labeling.hpp"

#include <algorithm>

#include "kairos/util.hpp"

namespace kairos {

namespace {

void add_choice(PointTotals& totals, Choice choice, long points) {
  if (choice == Choice::Pro) totals.pro_points += points;
  else if (choice == Choice::Con) totals.con_points += points;
}

PointTotals single_ballot_points(const Ballot& b) {
  PointTotals totals;
  add_choice(totals, b.choices.conduct, kConductPoints);
  add_choice(totals, b.choices.spelling_grammar, kSpellingPoints);
  add_choice(totals, b.choices.convincing_arguments, kConvincingPoints);
  add_choice(totals, b.choices.reliable_sources, kSourcesPoints);
  return totals;
}

Winner winner_of(long pro, long con) {
  if (pro > con) return Winner::Pro;
  if (con > pro) return Winner::Con;
  return Winner::Tie;
}

}  // namespace

PointTotals point_totals(std::span<const Ballot> ballots) {
  PointTotals totals;
  for (const Ballot& b : ballots) {
    PointTotals t = single_ballot_points(b);
    totals.pro_points += t.pro_points;
    totals.con_points += t.con_points;
  }
  return totals;
}

Winner winner_by_points(std::span<const Ballot> ballots) {
  PointTotals t = point_totals(ballots);
  return winner_of(t.pro_points, t.con_points);
}

Winner winner_by_conversion(std::span<const Ballot> ballots) {
  long pro = 0, con = 0;
  for (const Ballot& b : ballots) {
    if (b.stance_after == b.stance_before) continue;
    if (b.stance_after == VoteStance::Pro) ++pro;
    else if (b.stance_after == VoteStance::Con) ++con;
  }
  return winner_of(pro, con);
}

VoterCase voter_case(const Ballot& ballot) {
  if (ballot.stance_after == ballot.stance_before ||
      ballot.stance_after == VoteStance::Undecided)
    return VoterCase::Excluded;
  return ballot.stance_before == VoteStance::Undecided ? VoterCase::FromMiddle
                                                       : VoterCase::FromOpposing;
}

Winner per_voter_winner(const Ballot& ballot, WinCriterion criterion) {
  if (criterion == WinCriterion::Points) {
    PointTotals t = single_ballot_points(ballot);
    return winner_of(t.pro_points, t.con_points);
  }
  if (ballot.stance_after == ballot.stance_before)
    throw UsageError("per_voter_winner: conversion criterion needs a changed stance");
  switch (ballot.stance_after) {
    case VoteStance::Pro: return Winner::Pro;
    case VoteStance::Con: return Winner::Con;
    case VoteStance::Undecided:
      throw UsageError("per_voter_winner: voter ended undecided, no side convinced them");
  }
  return Winner::Tie;
}

SuccessRecord success_record(const std::string& user_id, const Corpus& corpus) {
  SuccessRecord rec;
  rec.user_id = user_id;
  for (const Debate& d : corpus.debates) {
    if (d.pro_user == user_id || d.con_user == user_id)
      rec.debates_as_debater.push_back(&d);
  }
  if (rec.debates_as_debater.empty())
    throw UsageError("success_record: user '" + user_id + "' never participated as debater");
  std::stable_sort(rec.debates_as_debater.begin(), rec.debates_as_debater.end(),
                   [](const Debate* a, const Debate* b) {
                     if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
                     return a->debate_id < b->debate_id;
                   });

  auto won = [&](const Debate* d) {
    Winner w = winner_by_points(d->ballots);
    return (w == Winner::Pro && d->pro_user == user_id) ||
           (w == Winner::Con && d->con_user == user_id);
  };
  for (const Debate* d : rec.debates_as_debater)
    if (won(d)) ++rec.wins;
  rec.success_rate = static_cast<double>(rec.wins) / rec.debates_as_debater.size();
  if (rec.success_rate >= 0.70) rec.cls = SuccessClass::Successful;
  else if (rec.success_rate <= 0.30) rec.cls = SuccessClass::Unsuccessful;
  else rec.cls = SuccessClass::Mediocre;

  if (rec.debates_as_debater.size() >= 3) {
    auto stages = lifetime_stages(rec.debates_as_debater.size());
    std::array<double, 3> rates{};
    for (int s = 0; s < 3; ++s) {
      auto [begin, end] = stages[s];
      long wins = 0;
      for (std::size_t i = begin; i < end; ++i)
        if (won(rec.debates_as_debater[i])) ++wins;
      rates[s] = static_cast<double>(wins) / (end - begin);
    }
    rec.stage_rates = rates;
  }
  return rec;
}

std::array<std::pair<std::size_t, std::size_t>, 3> lifetime_stages(std::size_t n) {
  if (n < 3) throw UsageError("lifetime_stages: needs at least 3 debates, got " +
                              std::to_string(n));
  const std::size_t q = n / 3, r = n % 3;
  std::array<std::size_t, 3> sizes = {q + (r > 0 ? 1 : 0), q + (r > 1 ? 1 : 0), q};
  std::array<std::pair<std::size_t, std::size_t>, 3> out;
  std::size_t at = 0;
  for (int s = 0; s < 3; ++s) {
    out[s] = {at, at + sizes[s]};
    at += sizes[s];
  }
  return out;
}

double agreement_score(const ImpactVoteTally& tally) {
  long total = tally.total();
  if (total == 0) throw UsageError("agreement_score: empty tally");
  long best = *std::max_element(tally.counts.begin(), tally.counts.end());
  return 100.0 * static_cast<double>(best) / static_cast<double>(total);
}

std::array<long, 3> collapse_tally(const ImpactVoteTally& tally) {
  return {tally.counts[0] + tally.counts[1], tally.counts[2],
          tally.counts[3] + tally.counts[4]};
}

double agreement_score3(const ImpactVoteTally& tally) {
  auto c = collapse_tally(tally);
  long total = c[0] + c[1] + c[2];
  if (total == 0) throw UsageError("agreement_score3: empty tally");
  long best = std::max({c[0], c[1], c[2]});
  return 100.0 * static_cast<double>(best) / static_cast<double>(total);
}

std::optional<ImpactLabel3> impact_label(const ImpactVoteTally& tally, long min_votes,
                                         double min_agreement) {
  const long total = tally.total();
  if (total < min_votes) return std::nullopt;
  auto c = collapse_tally(tally);
  long best = std::max({c[0], c[1], c[2]});
  // Strict agreement threshold; exact 60% is rejected.
  if (100.0 * static_cast<double>(best) / static_cast<double>(total) <= min_agreement)
    return std::nullopt;
  int argmax = -1;
  for (int i = 0; i < 3; ++i) {
    if (c[i] == best) {
      if (argmax >= 0) return std::nullopt;  // tied argmax: no label
      argmax = i;
    }
  }
  return static_cast<ImpactLabel3>(argmax);
}

const char* to_string(Winner w) {
  switch (w) {
    case Winner::Pro: return "PRO";
    case Winner::Con: return "CON";
    case Winner::Tie: return "TIE";
  }
  return "?";
}

const char* to_string(VoterCase c) {
  switch (c) {
    case VoterCase::FromMiddle: return "FROM_MIDDLE";
    case VoterCase::FromOpposing: return "FROM_OPPOSING";
    case VoterCase::Excluded: return "EXCLUDED";
  }
  return "?";
}

const char* to_string(SuccessClass c) {
  switch (c) {
    case SuccessClass::Successful: return "SUCCESSFUL";
    case SuccessClass::Mediocre: return "MEDIOCRE";
    case SuccessClass::Unsuccessful: return "UNSUCCESSFUL";
  }
  return "?";
}

const char* to_string(ImpactLabel3 l) {
  switch (l) {
    case ImpactLabel3::NotImpactful: return "NOT_IMPACTFUL";
    case ImpactLabel3::MediumImpact: return "MEDIUM_IMPACT";
    case ImpactLabel3::Impactful: return "IMPACTFUL";
  }
  return "?";
}

}  // namespace kairos
