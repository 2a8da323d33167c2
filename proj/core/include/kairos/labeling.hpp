#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kairos/corpus.hpp"

namespace kairos {

// Fixed vote-point weights: conduct 1, spelling/grammar 1, convincing
// arguments 3, reliable sources 2.
inline constexpr long kConductPoints = 1;
inline constexpr long kSpellingPoints = 1;
inline constexpr long kConvincingPoints = 3;
inline constexpr long kSourcesPoints = 2;

enum class Winner { Pro, Con, Tie };

enum class WinCriterion { Points, Conversion };

enum class VoterCase { FromMiddle, FromOpposing, Excluded };

enum class SuccessClass { Successful, Mediocre, Unsuccessful };

enum class ImpactLabel3 { NotImpactful = 0, MediumImpact = 1, Impactful = 2 };

struct PointTotals {
  long pro_points = 0;
  long con_points = 0;
};

struct SuccessRecord {
  std::string user_id;
  std::vector<const Debate*> debates_as_debater;  // ordered by timestamp
  long wins = 0;
  double success_rate = 0.0;
  SuccessClass cls = SuccessClass::Mediocre;
  /// Win rate per lifetime stage; present only with >= 3 debates.
  std::optional<std::array<double, 3>> stage_rates;
};

/// Sums the per-dimension weights over all ballots. TIE awards nothing.
PointTotals point_totals(std::span<const Ballot> ballots);

/// Criterion 1: side with the higher point total; equal totals tie.
Winner winner_by_points(std::span<const Ballot> ballots);

/// Criterion 2: a voter is converted to side S iff stance_before != S and
/// stance_after == S; the side converting more voters wins.
Winner winner_by_conversion(std::span<const Ballot> ballots);

VoterCase voter_case(const Ballot& ballot);

/// Winner from one voter's point of view. Points applies the dimension
/// weights to this single ballot; Conversion returns the post-debate stance
/// and requires that the voter actually changed it.
Winner per_voter_winner(const Ballot& ballot, WinCriterion criterion);

/// Whole-debate wins under Criterion 1; ties count as non-wins.
/// Throws UsageError when the user never debated.
SuccessRecord success_record(const std::string& user_id, const Corpus& corpus);

/// Chronological split into three contiguous stages. Sizes are
/// ceil(n/3) first, remainder assigned to earlier stages. Requires n >= 3.
std::array<std::pair<std::size_t, std::size_t>, 3> lifetime_stages(std::size_t n_debates);

/// Percentage of votes matching the majority vote, over the 5 classes.
double agreement_score(const ImpactVoteTally& tally);

/// (NOT, MEDIUM, IMPACTFUL) counts after collapsing NO+LOW and HIGH+VERY_HIGH.
std::array<long, 3> collapse_tally(const ImpactVoteTally& tally);

/// Agreement computed on the collapsed 3-class tally.
double agreement_score3(const ImpactVoteTally& tally);

/// 3-class impact label. Absent when the tally has fewer than min_votes
/// votes, when 3-class agreement is not strictly above min_agreement, or
/// when the collapsed argmax ties.
std::optional<ImpactLabel3> impact_label(const ImpactVoteTally& tally, long min_votes = 5,
                                         double min_agreement = 60.0);

const char* to_string(Winner w);
const char* to_string(VoterCase c);
const char* to_string(SuccessClass c);
const char* to_string(ImpactLabel3 l);

}  // namespace kairos
