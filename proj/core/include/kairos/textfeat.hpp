#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "kairos/corpus.hpp"
#include "kairos/feature_vector.hpp"

namespace kairos {

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

struct TokenStream {
  std::vector<std::string> tokens;  // lowercase word tokens
  std::map<std::string, long> punctuation_counts;
  long link_count = 0;
  long number_count = 0;
  long question_count = 0;
  long exclamation_count = 0;
  long quote_count = 0;

  long punctuation_total() const;
};

/// Deterministic UTF-8 word segmentation. ASCII letters are lowercased,
/// non-ASCII codepoints pass through as word characters. URLs are counted
/// as links and removed from the token stream; maximal digit runs are
/// counted as numbers and excluded from tokens.
TokenStream tokenize(const std::string& text);

// ---------------------------------------------------------------------------
// Lexicons
// ---------------------------------------------------------------------------

enum class Subjectivity { NegStrong, NegWeak, PosStrong, PosWeak };
enum class Connotation { Positive, Negative, Neutral };

/// All lookups are lowercase. Phrase entries (with spaces) are matched
/// greedily longest-first against the token stream.
struct LexiconSet {
  std::set<std::string> politeness;
  std::set<std::string> swear;
  std::set<std::string> hedges;
  std::set<std::string> evidence_markers;   // may contain phrases
  std::set<std::string> opponent_markers;   // may contain phrases
  std::set<std::string> modal_verbs;
  std::set<std::string> pronouns_first, pronouns_second, pronouns_third;
  std::set<std::string> articles_definite, articles_indefinite;
  std::unordered_map<std::string, double> sentiment;  // word -> polarity in [-1, 1]
  std::unordered_map<std::string, Subjectivity> subjectivity;
  std::unordered_map<std::string, Connotation> connotation;
  std::map<std::string, std::string> argument_phrases;  // phrase -> style tag
  std::set<std::string> stopwords;
  std::set<std::string> dictionary;  // for spelling checks
  std::unordered_map<std::string, std::set<std::string>> synonyms;

  /// Ordered argumentation style tags (the feature schema for the
  /// argument-phrase block).
  static const std::vector<std::string>& argument_styles();
};

/// Compiled-in default lexicons, adequate for desk-scale experiments.
const LexiconSet& builtin_lexicons();

/// Loads lexicons from a directory of plain-text files (one entry per
/// line, `term<TAB>value` where a value applies), overlaying the builtin
/// set. Missing files keep the builtin entries.
LexiconSet load_lexicons(const std::string& dir);

// ---------------------------------------------------------------------------
// Features
// ---------------------------------------------------------------------------

/// Schema of claim_or_side_features, fixed by configuration.
const std::vector<std::string>& linguistic_feature_schema();

/// One value per linguistic feature row: surface statistics, lexicon
/// counts, sentiment/subjectivity/connotation, argumentation styles,
/// spelling, punctuation and the type-token ratio. Never emits NaN.
FeatureVector claim_or_side_features(const TokenStream& stream, const LexiconSet& lexicons);

// Tf-idf ------------------------------------------------------------------

struct TfidfModel {
  int ngram_max = 1;
  std::size_t max_features = 10000;
  std::vector<std::string> vocab;  // lexicographic order
  std::unordered_map<std::string, int> index;
  std::vector<double> idf;
};

/// Fits idf = ln((1+N)/(1+df)) + 1 over uni/bi/tri-grams of the documents.
/// The vocabulary is frozen at fit and capped at max_features by document
/// frequency (ties broken lexicographically).
TfidfModel fit_tfidf(const std::vector<std::string>& docs, int ngram_max,
                     std::size_t max_features = 10000);

/// L2-normalized tf-idf row. Terms outside the fitted vocabulary
/// contribute nothing.
SparseVector tfidf_transform(const TfidfModel& model, const std::string& doc);

// Interplay ---------------------------------------------------------------

struct InterplayCounts {
  long content_match = 0;
  long stopword_match = 0;
  long synonym_match = 0;  // content words of D with a synonym in O, exact matches excluded
};

/// Overlap between a debater's text D and the opponent's preceding text O.
InterplayCounts interplay_counts(const std::string& debater_text,
                                 const std::string& opponent_prev_text,
                                 const LexiconSet& lexicons);

FeatureVector interplay_features(const std::string& debater_text,
                                 const std::string& opponent_prev_text,
                                 const LexiconSet& lexicons);

// Readability -------------------------------------------------------------

struct Readability {
  double flesch = 0.0;
  double coleman_liau = 0.0;
};

/// Flesch reading ease and Coleman-Liau index. Sentences split on [.!?]
/// followed by whitespace; syllables counted by contiguous vowel groups
/// with a silent-e rule. Requires at least one word.
Readability readability(const std::string& text);

// Debate sides ------------------------------------------------------------

/// Concatenates every utterance of one side across rounds and extracts
/// claim_or_side_features (+ an optional tf-idf block named tfidf_<term>).
/// Throws UsageError when the side is silent in all rounds.
FeatureVector debate_side_features(const Debate& debate, Side side, const LexiconSet& lexicons,
                                   const TfidfModel* tfidf = nullptr);

/// All utterances of one side joined in round order; nullopt if silent.
std::optional<std::string> side_text(const Debate& debate, Side side);

// POS/NER sidecar ---------------------------------------------------------

struct SidecarAnnotation {
  struct Row {
    std::string token;
    std::string pos;
    std::optional<std::string> ner;
  };
  std::vector<Row> rows;
};

const std::vector<std::string>& pos_tagset();  // universal 12-tag set
const std::vector<std::string>& ner_tagset();

SidecarAnnotation parse_sidecar(const std::string& content);

/// Normalized POS/NER tag histograms for the stream. With no sidecar the
/// histogram block is zero and the provenance flag feature is 0.
/// Throws ValidationError when the sidecar does not align one tag per token.
FeatureVector annotate_sidecar(const TokenStream& stream,
                               const std::optional<SidecarAnnotation>& sidecar);

}  // namespace kairos
