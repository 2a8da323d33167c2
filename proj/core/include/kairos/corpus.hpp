#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace kairos {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Profile stance on a catalog issue.
enum class Stance { Pro, Con, NoOpinion, NotSaying, Undecided };

/// Ballot stance on the debate topic. Unlike profile stances, ballots never
/// carry NoOpinion/NotSaying.
enum class VoteStance { Pro, Con, Undecided };

/// Per-dimension ballot choice.
enum class Choice { Pro, Con, Tie };

enum class Side { Pro, Con };

enum class EdgeLabel { Support, Oppose };

enum class Trait { PoliticalIdeology, ReligiousIdeology, Gender, Ethnicity };

struct UserProfile {
  std::string user_id;
  std::optional<std::string> political_ideology;
  std::optional<std::string> religious_ideology;
  std::optional<std::string> gender;
  std::optional<std::string> ethnicity;
  std::map<std::string, Stance> big_issue_stances;
  std::set<std::string> friends;
  int join_order = 0;

  const std::optional<std::string>& trait(Trait t) const;
};

/// Concatenated 4-way one-hot stance encoding, block order (PRO, CON, N/O,
/// UND) per issue in catalog order.
struct BigIssuesVector {
  std::vector<double> values;
};

struct Round {
  int index = 0;
  std::optional<std::string> pro_text;
  std::optional<std::string> con_text;
};

struct BallotChoices {
  Choice conduct = Choice::Tie;
  Choice spelling_grammar = Choice::Tie;
  Choice convincing_arguments = Choice::Tie;
  Choice reliable_sources = Choice::Tie;
};

struct Ballot {
  std::string voter_id;
  VoteStance stance_before = VoteStance::Undecided;
  VoteStance stance_after = VoteStance::Undecided;
  BallotChoices choices;
};

struct Debate {
  std::string debate_id;
  std::string topic;
  std::string category;
  std::string pro_user;
  std::string con_user;
  std::vector<Round> rounds;
  std::vector<Ballot> ballots;
  std::int64_t timestamp = 0;
};

/// Audience votes over the five impact classes, ordered
/// (NO, LOW, MEDIUM, HIGH, VERY_HIGH).
struct ImpactVoteTally {
  std::array<long, 5> counts{};
  long total() const { return counts[0] + counts[1] + counts[2] + counts[3] + counts[4]; }
};

struct ClaimNode {
  std::string claim_id;
  std::string text;
  std::optional<std::string> parent;
  std::optional<EdgeLabel> edge_label;
  ImpactVoteTally tally;
};

struct ArgumentTree {
  std::string tree_id;
  std::string thesis_id;
  std::map<std::string, ClaimNode> nodes;

  const ClaimNode& node(const std::string& claim_id) const;
  const ClaimNode& thesis() const { return node(thesis_id); }
};

struct Corpus {
  std::vector<Debate> debates;
  std::map<std::string, UserProfile> users;  // keyed and iterated by user_id
  std::vector<ArgumentTree> trees;
};

// ---------------------------------------------------------------------------
// Ingestion / serialization
// ---------------------------------------------------------------------------

enum class CorpusKind { Debates, Users, Trees };

struct ParseOptions {
  /// Reject unknown fields instead of warning about them.
  bool strict = false;
  /// Collects warnings about ignored fields when not strict.
  std::vector<std::string>* warnings = nullptr;
};

/// Parses and fully validates one corpus file. Rejects rather than repairs:
/// any schema violation, duplicate identifier, unknown parent, or cyclic
/// tree throws ValidationError with the offending JSON path.
Corpus parse_corpus(std::istream& in, CorpusKind kind, const ParseOptions& opts = {});
Corpus parse_corpus(const std::string& raw, CorpusKind kind, const ParseOptions& opts = {});

/// Merges another parsed corpus file into dst (debates + users + trees).
void merge_corpus(Corpus& dst, Corpus&& src);

/// Canonical JSON serialization. parse followed by serialize is the
/// identity on canonical input, byte for byte.
std::string serialize_corpus(const Corpus& corpus, CorpusKind kind);

/// Re-emits arbitrary valid JSON in the canonical form used by the
/// serializer (sorted keys, two-space indent).
std::string canonicalize_json(const std::string& raw);

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Four-way one-hot encoding of the profile's stances over an explicit,
/// ordered issue catalog. Users with any NotSaying stance are excluded
/// (throws ValidationError), as are profiles missing a catalog issue.
BigIssuesVector encode_big_issues(const UserProfile& profile,
                                  const std::vector<std::string>& catalog);

/// Cosine similarity of two stance vectors; for valid one-hot blocks this
/// equals (number of shared stances) / (number of issues).
double opinion_similarity(const BigIssuesVector& a, const BigIssuesVector& b);

/// 1 if both users declare the trait and the values match, 0 if they
/// differ. Throws UsageError when either side leaves the trait undeclared;
/// callers pre-filter.
int matching_trait(const UserProfile& a, const UserProfile& b, Trait trait);

/// Retains only debates with strictly more than k ballots. Profiles and
/// trees are untouched.
Corpus filter_min_votes(const Corpus& corpus, long k);

/// Predecessor claims of `claim_id` ordered thesis -> parent, excluding the
/// claim itself. Context length equals the returned size.
std::vector<std::string> context_of(const ArgumentTree& tree, const std::string& claim_id);

/// Depth of a claim below the thesis (thesis itself is 0).
int context_length(const ArgumentTree& tree, const std::string& claim_id);

const char* to_string(Stance s);
const char* to_string(VoteStance s);
const char* to_string(Choice c);
const char* to_string(EdgeLabel e);

}  // namespace kairos
