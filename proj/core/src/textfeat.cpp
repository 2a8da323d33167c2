#include "kairos/textfeat.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "kairos/util.hpp"

namespace kairos {

double sparse_cosine(const SparseVector& a, const SparseVector& b) {
  double dot = 0, na = 0, nb = 0;
  std::size_t i = 0, j = 0;
  while (i < a.entries.size() && j < b.entries.size()) {
    if (a.entries[i].first == b.entries[j].first) {
      dot += a.entries[i].second * b.entries[j].second;
      ++i;
      ++j;
    } else if (a.entries[i].first < b.entries[j].first) {
      ++i;
    } else {
      ++j;
    }
  }
  for (const auto& [idx, v] : a.entries) na += v * v;
  for (const auto& [idx, v] : b.entries) nb += v * v;
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

long TokenStream::punctuation_total() const {
  long total = 0;
  for (const auto& [mark, count] : punctuation_counts) total += count;
  return total;
}

namespace {

bool is_ascii_letter(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

bool is_url_start(const std::string& text, std::size_t i) {
  auto starts = [&](const char* prefix) {
    std::size_t n = std::strlen(prefix);
    if (i + n > text.size()) return false;
    for (std::size_t k = 0; k < n; ++k)
      if (std::tolower(static_cast<unsigned char>(text[i + k])) != prefix[k]) return false;
    return true;
  };
  return starts("http://") || starts("https://") || starts("www.");
}

}  // namespace

TokenStream tokenize(const std::string& text) {
  TokenStream out;
  std::string word;
  auto flush_word = [&] {
    if (!word.empty()) {
      out.tokens.push_back(word);
      word.clear();
    }
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_url_start(text, i)) {
      flush_word();
      ++out.link_count;
      while (i < n && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      continue;
    }
    if (is_ascii_letter(c)) {
      word += static_cast<char>(std::tolower(c));
      ++i;
    } else if (c >= 0x80) {
      // Non-ASCII codepoints are treated as word characters.
      word += static_cast<char>(c);
      ++i;
    } else if (is_digit(c)) {
      flush_word();
      ++out.number_count;
      while (i < n && is_digit(static_cast<unsigned char>(text[i]))) ++i;
    } else {
      flush_word();
      if (!std::isspace(c)) {
        ++out.punctuation_counts[std::string(1, static_cast<char>(c))];
        if (c == '?') ++out.question_count;
        if (c == '!') ++out.exclamation_count;
        if (c == '"') ++out.quote_count;
      }
      ++i;
    }
  }
  flush_word();
  return out;
}

// ---------------------------------------------------------------------------
// Feature extraction
// ---------------------------------------------------------------------------

const std::vector<std::string>& LexiconSet::argument_styles() {
  static const std::vector<std::string> styles = {
      "assessment",  "authority",     "conditioning", "contrasting", "emphasizing",
      "generalizing", "empathy",      "inconsistency", "necessity",  "possibility",
      "priority",    "rhetorical_question", "desire", "difficulty"};
  return styles;
}

namespace {

long count_members(const std::vector<std::string>& tokens, const std::set<std::string>& set) {
  long count = 0;
  for (const auto& t : tokens)
    if (set.count(t)) ++count;
  return count;
}

std::size_t max_phrase_len(const std::set<std::string>& phrases) {
  std::size_t max_len = 1;
  for (const auto& p : phrases)
    max_len = std::max(max_len, static_cast<std::size_t>(
                                    std::count(p.begin(), p.end(), ' ') + 1));
  return max_len;
}

/// Greedy longest-first phrase counting over the token sequence.
long count_phrases(const std::vector<std::string>& tokens, const std::set<std::string>& phrases) {
  if (phrases.empty()) return 0;
  const std::size_t max_len = max_phrase_len(phrases);
  long count = 0;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(max_len, tokens.size() - i); len >= 1; --len) {
      std::string candidate = tokens[i];
      for (std::size_t k = 1; k < len; ++k) candidate += " " + tokens[i + k];
      if (phrases.count(candidate)) {
        matched = len;
        break;
      }
    }
    if (matched) {
      ++count;
      i += matched;
    } else {
      ++i;
    }
  }
  return count;
}

/// Greedy longest-first per-style phrase counts.
std::map<std::string, long> count_styled_phrases(const std::vector<std::string>& tokens,
                                                 const std::map<std::string, std::string>& table) {
  std::map<std::string, long> counts;
  if (table.empty()) return counts;
  std::size_t max_len = 1;
  for (const auto& [phrase, style] : table)
    max_len = std::max(max_len, static_cast<std::size_t>(
                                    std::count(phrase.begin(), phrase.end(), ' ') + 1));
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t matched = 0;
    const std::string* style = nullptr;
    for (std::size_t len = std::min(max_len, tokens.size() - i); len >= 1; --len) {
      std::string candidate = tokens[i];
      for (std::size_t k = 1; k < len; ++k) candidate += " " + tokens[i + k];
      auto it = table.find(candidate);
      if (it != table.end()) {
        matched = len;
        style = &it->second;
        break;
      }
    }
    if (matched) {
      ++counts[*style];
      i += matched;
    } else {
      ++i;
    }
  }
  return counts;
}

}  // namespace

const std::vector<std::string>& linguistic_feature_schema() {
  static const std::vector<std::string> schema = [] {
    std::vector<std::string> s = {
        "length",         "opponent_ref",   "politeness",     "evidence",
        "sentiment_avg",  "subj_neg_strong", "subj_neg_weak", "subj_pos_strong",
        "subj_pos_weak",  "swear",          "conn_pos_avg",   "conn_neg_avg",
        "conn_neu_avg",   "pron_first",     "pron_second",    "pron_third",
        "modal"};
    for (const auto& style : LexiconSet::argument_styles()) s.push_back("arglex_" + style);
    for (const char* name : {"spelling_errors", "links", "numbers", "exclamations",
                             "questions", "article_definite", "article_indefinite", "hedge",
                             "positive_words", "negative_words", "punctuation", "quotes",
                             "type_token_ratio"})
      s.push_back(name);
    return s;
  }();
  return schema;
}

FeatureVector claim_or_side_features(const TokenStream& stream, const LexiconSet& lex) {
  const auto& tokens = stream.tokens;
  const double n = static_cast<double>(tokens.size());

  double sentiment_sum = 0;
  long sentiment_hits = 0, pos_words = 0, neg_words = 0;
  long subj[4] = {0, 0, 0, 0};
  long conn[3] = {0, 0, 0};
  long spelling_errors = 0;
  std::set<std::string> types;
  for (const auto& t : tokens) {
    types.insert(t);
    auto sit = lex.sentiment.find(t);
    if (sit != lex.sentiment.end()) {
      sentiment_sum += sit->second;
      ++sentiment_hits;
      if (sit->second > 0) ++pos_words;
      if (sit->second < 0) ++neg_words;
    }
    auto bit = lex.subjectivity.find(t);
    if (bit != lex.subjectivity.end()) ++subj[static_cast<int>(bit->second)];
    auto cit = lex.connotation.find(t);
    if (cit != lex.connotation.end()) ++conn[static_cast<int>(cit->second)];
    if (!lex.dictionary.empty() && !lex.dictionary.count(t)) ++spelling_errors;
  }

  auto styled = count_styled_phrases(tokens, lex.argument_phrases);

  FeatureVector fv;
  fv.push("length", n);
  fv.push("opponent_ref", static_cast<double>(count_phrases(tokens, lex.opponent_markers)));
  fv.push("politeness", static_cast<double>(count_phrases(tokens, lex.politeness)));
  fv.push("evidence", static_cast<double>(count_phrases(tokens, lex.evidence_markers)) +
                          static_cast<double>(stream.quote_count));
  fv.push("sentiment_avg", sentiment_hits ? sentiment_sum / sentiment_hits : 0.0);
  fv.push("subj_neg_strong", static_cast<double>(subj[0]));
  fv.push("subj_neg_weak", static_cast<double>(subj[1]));
  fv.push("subj_pos_strong", static_cast<double>(subj[2]));
  fv.push("subj_pos_weak", static_cast<double>(subj[3]));
  fv.push("swear", static_cast<double>(count_members(tokens, lex.swear)));
  fv.push("conn_pos_avg", n > 0 ? conn[0] / n : 0.0);
  fv.push("conn_neg_avg", n > 0 ? conn[1] / n : 0.0);
  fv.push("conn_neu_avg", n > 0 ? conn[2] / n : 0.0);
  fv.push("pron_first", static_cast<double>(count_members(tokens, lex.pronouns_first)));
  fv.push("pron_second", static_cast<double>(count_members(tokens, lex.pronouns_second)));
  fv.push("pron_third", static_cast<double>(count_members(tokens, lex.pronouns_third)));
  fv.push("modal", static_cast<double>(count_members(tokens, lex.modal_verbs)));
  for (const auto& style : LexiconSet::argument_styles()) {
    auto it = styled.find(style);
    fv.push("arglex_" + style, it == styled.end() ? 0.0 : static_cast<double>(it->second));
  }
  fv.push("spelling_errors", static_cast<double>(spelling_errors));
  fv.push("links", static_cast<double>(stream.link_count));
  fv.push("numbers", static_cast<double>(stream.number_count));
  fv.push("exclamations", static_cast<double>(stream.exclamation_count));
  fv.push("questions", static_cast<double>(stream.question_count));
  fv.push("article_definite", static_cast<double>(count_members(tokens, lex.articles_definite)));
  fv.push("article_indefinite",
          static_cast<double>(count_members(tokens, lex.articles_indefinite)));
  fv.push("hedge", static_cast<double>(count_members(tokens, lex.hedges)));
  fv.push("positive_words", static_cast<double>(pos_words));
  fv.push("negative_words", static_cast<double>(neg_words));
  fv.push("punctuation", static_cast<double>(stream.punctuation_total()));
  fv.push("quotes", static_cast<double>(stream.quote_count));
  fv.push("type_token_ratio", n > 0 ? types.size() / n : 0.0);
  return fv;
}

// ---------------------------------------------------------------------------
// Tf-idf
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> extract_ngrams(const std::string& doc, int ngram_max) {
  TokenStream stream = tokenize(doc);
  std::vector<std::string> grams;
  const auto& toks = stream.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    std::string gram = toks[i];
    grams.push_back(gram);
    for (int k = 1; k < ngram_max && i + k < toks.size(); ++k) {
      gram += " " + toks[i + k];
      grams.push_back(gram);
    }
  }
  return grams;
}

}  // namespace

TfidfModel fit_tfidf(const std::vector<std::string>& docs, int ngram_max,
                     std::size_t max_features) {
  if (docs.empty()) throw UsageError("fit_tfidf: needs at least one document");
  if (ngram_max < 1 || ngram_max > 3) throw UsageError("fit_tfidf: ngram_max must be in 1..3");
  TfidfModel model;
  model.ngram_max = ngram_max;
  model.max_features = max_features;

  std::map<std::string, long> df;
  for (const auto& doc : docs) {
    auto grams = extract_ngrams(doc, ngram_max);
    std::set<std::string> unique(grams.begin(), grams.end());
    for (const auto& g : unique) ++df[g];
  }

  std::vector<std::pair<std::string, long>> terms(df.begin(), df.end());
  if (terms.size() > max_features) {
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    terms.resize(max_features);
  }
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const double n_docs = static_cast<double>(docs.size());
  model.vocab.reserve(terms.size());
  model.idf.reserve(terms.size());
  for (const auto& [term, count] : terms) {
    model.index.emplace(term, static_cast<int>(model.vocab.size()));
    model.vocab.push_back(term);
    model.idf.push_back(std::log((1.0 + n_docs) / (1.0 + count)) + 1.0);
  }
  return model;
}

SparseVector tfidf_transform(const TfidfModel& model, const std::string& doc) {
  if (model.vocab.empty()) throw UsageError("tfidf_transform: model has not been fitted");
  std::map<int, double> tf;
  for (const auto& gram : extract_ngrams(doc, model.ngram_max)) {
    auto it = model.index.find(gram);
    if (it != model.index.end()) tf[it->second] += 1.0;
  }
  SparseVector out;
  out.dim = static_cast<int>(model.vocab.size());
  double norm = 0;
  for (auto& [idx, count] : tf) {
    double v = count * model.idf[idx];
    out.entries.emplace_back(idx, v);
    norm += v * v;
  }
  if (norm > 0) {
    norm = std::sqrt(norm);
    for (auto& [idx, v] : out.entries) v /= norm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Interplay
// ---------------------------------------------------------------------------

InterplayCounts interplay_counts(const std::string& debater_text,
                                 const std::string& opponent_prev_text,
                                 const LexiconSet& lex) {
  TokenStream d = tokenize(debater_text);
  TokenStream o = tokenize(opponent_prev_text);
  std::set<std::string> d_content, d_stop, o_content, o_stop;
  for (const auto& t : d.tokens) (lex.stopwords.count(t) ? d_stop : d_content).insert(t);
  for (const auto& t : o.tokens) (lex.stopwords.count(t) ? o_stop : o_content).insert(t);

  InterplayCounts counts;
  for (const auto& w : d_content)
    if (o_content.count(w)) ++counts.content_match;
  for (const auto& w : d_stop)
    if (o_stop.count(w)) ++counts.stopword_match;
  for (const auto& w : d_content) {
    if (o_content.count(w)) continue;  // exact matches are excluded
    auto it = lex.synonyms.find(w);
    if (it == lex.synonyms.end()) continue;
    for (const auto& syn : it->second) {
      if (o_content.count(syn)) {
        ++counts.synonym_match;
        break;
      }
    }
  }
  return counts;
}

FeatureVector interplay_features(const std::string& debater_text,
                                 const std::string& opponent_prev_text,
                                 const LexiconSet& lexicons) {
  InterplayCounts c = interplay_counts(debater_text, opponent_prev_text, lexicons);
  FeatureVector fv;
  fv.push("interplay_content_match", static_cast<double>(c.content_match));
  fv.push("interplay_stopword_match", static_cast<double>(c.stopword_match));
  fv.push("interplay_synonym_match", static_cast<double>(c.synonym_match));
  return fv;
}

// ---------------------------------------------------------------------------
// Readability
// ---------------------------------------------------------------------------

namespace {

long count_syllables(const std::string& word) {
  auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  long groups = 0;
  bool in_group = false;
  for (char c : word) {
    if (is_vowel(c)) {
      if (!in_group) ++groups;
      in_group = true;
    } else {
      in_group = false;
    }
  }
  // Silent final e, except in -le endings.
  if (groups > 1 && word.size() > 2 && word.back() == 'e' &&
      word[word.size() - 2] != 'l' && !is_vowel(word[word.size() - 2]))
    --groups;
  return std::max<long>(groups, 1);
}

long count_sentences(const std::string& text) {
  long sentences = 0;
  bool has_word = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (is_ascii_letter(c) || c >= 0x80 || is_digit(c)) has_word = true;
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i;
      while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
      if (j >= text.size() || std::isspace(static_cast<unsigned char>(text[j]))) {
        if (has_word) ++sentences;
        has_word = false;
        i = j - 1;
      }
    }
  }
  if (has_word) ++sentences;
  return std::max<long>(sentences, 1);
}

}  // namespace

Readability readability(const std::string& text) {
  TokenStream stream = tokenize(text);
  if (stream.tokens.empty()) throw UsageError("readability: text has no words");
  const double words = static_cast<double>(stream.tokens.size());
  const double sentences = static_cast<double>(count_sentences(text));
  double syllables = 0, letters = 0;
  for (const auto& t : stream.tokens) {
    syllables += static_cast<double>(count_syllables(t));
    letters += static_cast<double>(t.size());
  }
  Readability r;
  r.flesch = 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words);
  const double L = 100.0 * letters / words;
  const double S = 100.0 * sentences / words;
  r.coleman_liau = 0.0588 * L - 0.296 * S - 15.8;
  return r;
}

// ---------------------------------------------------------------------------
// Debate sides
// ---------------------------------------------------------------------------

std::optional<std::string> side_text(const Debate& debate, Side side) {
  std::string text;
  bool any = false;
  for (const Round& r : debate.rounds) {
    const auto& utterance = side == Side::Pro ? r.pro_text : r.con_text;
    if (!utterance) continue;
    if (any) text += "\n";
    text += *utterance;
    any = true;
  }
  if (!any) return std::nullopt;
  return text;
}

FeatureVector debate_side_features(const Debate& debate, Side side, const LexiconSet& lexicons,
                                   const TfidfModel* tfidf) {
  auto text = side_text(debate, side);
  if (!text)
    throw UsageError("debate_side_features: side " +
                     std::string(side == Side::Pro ? "PRO" : "CON") + " is silent in debate '" +
                     debate.debate_id + "'");
  FeatureVector fv = claim_or_side_features(tokenize(*text), lexicons);
  if (tfidf) {
    SparseVector sv = tfidf_transform(*tfidf, *text);
    std::vector<double> dense(tfidf->vocab.size(), 0.0);
    for (const auto& [idx, v] : sv.entries) dense[idx] = v;
    for (std::size_t i = 0; i < dense.size(); ++i)
      fv.push("tfidf_" + tfidf->vocab[i], dense[i]);
  }
  return fv;
}

// ---------------------------------------------------------------------------
// POS/NER sidecar
// ---------------------------------------------------------------------------

const std::vector<std::string>& pos_tagset() {
  static const std::vector<std::string> tags = {"ADJ", "ADP",  "ADV", "CONJ", "DET", "NOUN",
                                                "NUM", "PRON", "PRT", "VERB", "X",   "PUNCT"};
  return tags;
}

const std::vector<std::string>& ner_tagset() {
  static const std::vector<std::string> tags = {"PER", "LOC", "ORG", "MISC", "O"};
  return tags;
}

SidecarAnnotation parse_sidecar(const std::string& content) {
  SidecarAnnotation out;
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    auto parts = split(line, '\t');
    if (parts.size() < 2 || parts.size() > 3)
      throw ValidationError("sidecar line " + std::to_string(lineno) +
                            ": expected token<TAB>POS[<TAB>NER]");
    SidecarAnnotation::Row row;
    row.token = lower_ascii(trim(parts[0]));
    row.pos = trim(parts[1]);
    if (parts.size() == 3 && !trim(parts[2]).empty()) row.ner = trim(parts[2]);
    out.rows.push_back(std::move(row));
  }
  return out;
}

FeatureVector annotate_sidecar(const TokenStream& stream,
                               const std::optional<SidecarAnnotation>& sidecar) {
  const auto& pos_tags = pos_tagset();
  const auto& ner_tags = ner_tagset();
  std::vector<double> pos_hist(pos_tags.size(), 0.0), ner_hist(ner_tags.size(), 0.0);
  double present = 0.0;

  if (sidecar) {
    if (sidecar->rows.size() != stream.tokens.size())
      throw ValidationError("sidecar misaligned: " + std::to_string(sidecar->rows.size()) +
                            " rows for " + std::to_string(stream.tokens.size()) + " tokens");
    for (std::size_t i = 0; i < sidecar->rows.size(); ++i) {
      const auto& row = sidecar->rows[i];
      if (row.token != stream.tokens[i])
        throw ValidationError("sidecar misaligned at token " + std::to_string(i) + ": '" +
                              row.token + "' vs '" + stream.tokens[i] + "'");
      auto pit = std::find(pos_tags.begin(), pos_tags.end(), row.pos);
      if (pit == pos_tags.end())
        throw ValidationError("sidecar: unknown POS tag '" + row.pos + "'");
      pos_hist[pit - pos_tags.begin()] += 1.0;
      if (row.ner) {
        auto nit = std::find(ner_tags.begin(), ner_tags.end(), *row.ner);
        if (nit == ner_tags.end())
          throw ValidationError("sidecar: unknown NER tag '" + *row.ner + "'");
        ner_hist[nit - ner_tags.begin()] += 1.0;
      }
    }
    const double n = static_cast<double>(stream.tokens.size());
    if (n > 0) {
      for (auto& v : pos_hist) v /= n;
      for (auto& v : ner_hist) v /= n;
    }
    present = 1.0;
  }

  FeatureVector fv;
  for (std::size_t i = 0; i < pos_tags.size(); ++i) fv.push("pos_" + pos_tags[i], pos_hist[i]);
  for (std::size_t i = 0; i < ner_tags.size(); ++i) fv.push("ner_" + ner_tags[i], ner_hist[i]);
  fv.push("sidecar_present", present);
  return fv;
}

}  // namespace kairos
