#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kairos/textfeat.hpp"
#include "kairos/util.hpp"

namespace kairos {

namespace {

std::set<std::string> word_set(std::initializer_list<const char*> words) {
  std::set<std::string> out;
  for (const char* w : words) out.insert(w);
  return out;
}

LexiconSet build_builtin() {
  LexiconSet lex;

  lex.politeness = word_set(
      {"thank", "thanks", "please", "welcome", "appreciate", "grateful", "kindly", "respect",
       "respectfully", "regards", "gratitude", "apologize", "apologies", "sorry", "pardon",
       "honored", "pleasure", "gracious", "courtesy", "polite", "cheers", "sincerely",
       "humbly", "obliged", "commend"});

  lex.swear = word_set({"damn", "hell", "crap", "stupid", "idiot", "idiotic", "moron", "dumb",
                        "fool", "foolish", "ass", "jerk", "suck", "sucks", "bloody", "bastard",
                        "shut", "loser", "pathetic", "trash", "garbage", "nonsense", "bullshit",
                        "screw", "freaking"});

  lex.hedges = word_set(
      {"maybe", "perhaps", "possibly", "probably", "likely", "unlikely", "somewhat", "rather",
       "fairly", "arguably", "apparently", "seemingly", "presumably", "roughly", "approximately",
       "almost", "nearly", "sort", "kind", "suppose", "suspect", "guess", "assume", "suggest",
       "seems", "seem", "appear", "appears", "might", "tend", "tends", "generally", "usually",
       "often", "sometimes", "occasionally", "virtually", "basically", "essentially", "relatively"});

  lex.evidence_markers = word_set(
      {"according to", "research shows", "studies show", "study shows", "evidence", "source",
       "sources", "cite", "cites", "cited", "citation", "reference", "references", "statistics",
       "data", "survey", "report", "reports", "proven", "demonstrated", "as shown", "for instance",
       "for example", "documented", "peer reviewed"});

  lex.opponent_markers =
      word_set({"opponent", "my opponent", "opponents", "the opposition", "my adversary",
                "the other side", "his argument", "her argument", "their argument", "rebuttal",
                "as my opponent", "con side", "pro side"});

  lex.modal_verbs = word_set(
      {"can", "could", "may", "might", "must", "shall", "should", "will", "would", "ought"});

  lex.pronouns_first =
      word_set({"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"});
  lex.pronouns_second = word_set({"you", "your", "yours", "yourself", "yourselves"});
  lex.pronouns_third =
      word_set({"he", "him", "his", "himself", "she", "her", "hers", "herself", "it", "its",
                "itself", "they", "them", "their", "theirs", "themselves"});

  lex.articles_definite = word_set({"the"});
  lex.articles_indefinite = word_set({"a", "an"});

  const std::initializer_list<std::pair<const char*, double>> sentiment = {
      {"good", 0.7},        {"great", 0.9},      {"excellent", 1.0},  {"best", 1.0},
      {"better", 0.6},      {"positive", 0.6},   {"win", 0.6},        {"wins", 0.6},
      {"winner", 0.7},      {"right", 0.5},      {"correct", 0.6},    {"true", 0.5},
      {"strong", 0.5},      {"fair", 0.5},       {"benefit", 0.6},    {"benefits", 0.6},
      {"helpful", 0.6},     {"improve", 0.5},    {"improves", 0.5},   {"improved", 0.5},
      {"love", 0.8},        {"like", 0.4},       {"enjoy", 0.6},      {"happy", 0.8},
      {"glad", 0.6},        {"wonderful", 0.9},  {"amazing", 0.9},    {"brilliant", 0.9},
      {"perfect", 0.9},     {"clear", 0.4},      {"clearly", 0.4},    {"success", 0.7},
      {"successful", 0.7},  {"agree", 0.5},      {"support", 0.4},    {"supports", 0.4},
      {"valid", 0.5},       {"sound", 0.5},      {"compelling", 0.6}, {"convincing", 0.6},
      {"honest", 0.6},      {"safe", 0.5},       {"protect", 0.5},    {"important", 0.4},
      {"valuable", 0.6},    {"effective", 0.6},  {"reasonable", 0.5}, {"rational", 0.5},
      {"superior", 0.6},    {"thrive", 0.7},
      {"bad", -0.7},        {"worse", -0.7},     {"worst", -1.0},     {"terrible", -0.9},
      {"awful", -0.9},      {"horrible", -0.9},  {"negative", -0.6},  {"lose", -0.6},
      {"loses", -0.6},      {"loss", -0.6},      {"wrong", -0.6},     {"false", -0.5},
      {"weak", -0.5},       {"unfair", -0.6},    {"harm", -0.7},      {"harms", -0.7},
      {"harmful", -0.7},    {"hurt", -0.6},      {"damage", -0.6},    {"fail", -0.7},
      {"fails", -0.7},      {"failure", -0.8},   {"failed", -0.7},    {"hate", -0.8},
      {"dislike", -0.5},    {"sad", -0.6},       {"angry", -0.6},     {"fear", -0.6},
      {"afraid", -0.5},     {"poor", -0.5},      {"flawed", -0.6},    {"flaw", -0.5},
      {"invalid", -0.5},    {"dishonest", -0.7}, {"dangerous", -0.7}, {"danger", -0.6},
      {"threat", -0.6},     {"crisis", -0.6},    {"corrupt", -0.8},   {"evil", -0.9},
      {"disaster", -0.8},   {"waste", -0.5},     {"useless", -0.7},   {"absurd", -0.6},
      {"ridiculous", -0.6}, {"ignorant", -0.6},  {"misleading", -0.6}, {"biased", -0.5},
      {"destroy", -0.7},    {"suffer", -0.7}};
  for (const auto& [word, value] : sentiment) lex.sentiment[word] = value;

  const std::initializer_list<std::pair<const char*, Subjectivity>> subjectivity = {
      {"terrible", Subjectivity::NegStrong},   {"awful", Subjectivity::NegStrong},
      {"horrible", Subjectivity::NegStrong},   {"disgusting", Subjectivity::NegStrong},
      {"outrageous", Subjectivity::NegStrong}, {"appalling", Subjectivity::NegStrong},
      {"atrocious", Subjectivity::NegStrong},  {"despicable", Subjectivity::NegStrong},
      {"hate", Subjectivity::NegStrong},       {"evil", Subjectivity::NegStrong},
      {"catastrophic", Subjectivity::NegStrong}, {"absurd", Subjectivity::NegStrong},
      {"bad", Subjectivity::NegWeak},          {"poor", Subjectivity::NegWeak},
      {"weak", Subjectivity::NegWeak},         {"questionable", Subjectivity::NegWeak},
      {"doubtful", Subjectivity::NegWeak},     {"lacking", Subjectivity::NegWeak},
      {"mediocre", Subjectivity::NegWeak},     {"flawed", Subjectivity::NegWeak},
      {"unclear", Subjectivity::NegWeak},      {"problematic", Subjectivity::NegWeak},
      {"excellent", Subjectivity::PosStrong},  {"outstanding", Subjectivity::PosStrong},
      {"wonderful", Subjectivity::PosStrong},  {"brilliant", Subjectivity::PosStrong},
      {"superb", Subjectivity::PosStrong},     {"magnificent", Subjectivity::PosStrong},
      {"love", Subjectivity::PosStrong},       {"perfect", Subjectivity::PosStrong},
      {"amazing", Subjectivity::PosStrong},    {"extraordinary", Subjectivity::PosStrong},
      {"good", Subjectivity::PosWeak},         {"nice", Subjectivity::PosWeak},
      {"decent", Subjectivity::PosWeak},       {"fine", Subjectivity::PosWeak},
      {"solid", Subjectivity::PosWeak},        {"fair", Subjectivity::PosWeak},
      {"reasonable", Subjectivity::PosWeak},   {"adequate", Subjectivity::PosWeak},
      {"helpful", Subjectivity::PosWeak},      {"pleasant", Subjectivity::PosWeak}};
  for (const auto& [word, value] : subjectivity) lex.subjectivity[word] = value;

  const std::initializer_list<std::pair<const char*, Connotation>> connotation = {
      {"freedom", Connotation::Positive},   {"liberty", Connotation::Positive},
      {"justice", Connotation::Positive},   {"peace", Connotation::Positive},
      {"progress", Connotation::Positive},  {"education", Connotation::Positive},
      {"health", Connotation::Positive},    {"family", Connotation::Positive},
      {"community", Connotation::Positive}, {"honest", Connotation::Positive},
      {"science", Connotation::Positive},   {"truth", Connotation::Positive},
      {"hope", Connotation::Positive},      {"growth", Connotation::Positive},
      {"safety", Connotation::Positive},    {"rights", Connotation::Positive},
      {"victory", Connotation::Positive},   {"prosperity", Connotation::Positive},
      {"war", Connotation::Negative},       {"violence", Connotation::Negative},
      {"crime", Connotation::Negative},     {"poverty", Connotation::Negative},
      {"corruption", Connotation::Negative},{"disease", Connotation::Negative},
      {"death", Connotation::Negative},     {"abuse", Connotation::Negative},
      {"murder", Connotation::Negative},    {"torture", Connotation::Negative},
      {"slavery", Connotation::Negative},   {"terror", Connotation::Negative},
      {"pollution", Connotation::Negative}, {"greed", Connotation::Negative},
      {"prison", Connotation::Negative},    {"debt", Connotation::Negative},
      {"government", Connotation::Neutral}, {"people", Connotation::Neutral},
      {"country", Connotation::Neutral},    {"state", Connotation::Neutral},
      {"system", Connotation::Neutral},     {"law", Connotation::Neutral},
      {"policy", Connotation::Neutral},     {"society", Connotation::Neutral},
      {"money", Connotation::Neutral},      {"school", Connotation::Neutral},
      {"world", Connotation::Neutral},      {"question", Connotation::Neutral},
      {"argument", Connotation::Neutral},   {"debate", Connotation::Neutral},
      {"issue", Connotation::Neutral},      {"point", Connotation::Neutral}};
  for (const auto& [word, value] : connotation) lex.connotation[word] = value;

  // At least five seed phrases per argumentation style.
  const std::initializer_list<std::pair<const char*, const char*>> argument_phrases = {
      {"i think", "assessment"},        {"i believe", "assessment"},
      {"in my view", "assessment"},     {"it is clear", "assessment"},
      {"it seems", "assessment"},       {"my assessment", "assessment"},
      {"experts say", "authority"},     {"according to experts", "authority"},
      {"scientists agree", "authority"},{"the law states", "authority"},
      {"authorities", "authority"},     {"studies confirm", "authority"},
      {"if we", "conditioning"},        {"as long as", "conditioning"},
      {"provided that", "conditioning"},{"unless", "conditioning"},
      {"in case", "conditioning"},      {"on condition", "conditioning"},
      {"on the other hand", "contrasting"}, {"in contrast", "contrasting"},
      {"however", "contrasting"},       {"whereas", "contrasting"},
      {"unlike", "contrasting"},        {"but consider", "contrasting"},
      {"above all", "emphasizing"},     {"most importantly", "emphasizing"},
      {"indeed", "emphasizing"},        {"in fact", "emphasizing"},
      {"certainly", "emphasizing"},     {"without a doubt", "emphasizing"},
      {"in general", "generalizing"},   {"as a rule", "generalizing"},
      {"typically", "generalizing"},    {"on the whole", "generalizing"},
      {"broadly speaking", "generalizing"}, {"in most cases", "generalizing"},
      {"i understand", "empathy"},      {"i sympathize", "empathy"},
      {"we all feel", "empathy"},       {"put yourself", "empathy"},
      {"imagine being", "empathy"},     {"i feel your", "empathy"},
      {"contradicts", "inconsistency"}, {"contradiction", "inconsistency"},
      {"inconsistent", "inconsistency"},{"double standard", "inconsistency"},
      {"you said earlier", "inconsistency"}, {"self contradictory", "inconsistency"},
      {"we must", "necessity"},         {"it is necessary", "necessity"},
      {"we need to", "necessity"},      {"have to", "necessity"},
      {"essential that", "necessity"},  {"required to", "necessity"},
      {"it is possible", "possibility"},{"could be", "possibility"},
      {"may well", "possibility"},      {"potentially", "possibility"},
      {"conceivably", "possibility"},   {"there is a chance", "possibility"},
      {"first and foremost", "priority"},{"the priority", "priority"},
      {"more important than", "priority"},{"takes precedence", "priority"},
      {"comes first", "priority"},      {"top priority", "priority"},
      {"why would", "rhetorical_question"}, {"who could", "rhetorical_question"},
      {"is it not", "rhetorical_question"}, {"how can anyone", "rhetorical_question"},
      {"what could possibly", "rhetorical_question"}, {"do we really", "rhetorical_question"},
      {"i want", "desire"},             {"we want", "desire"},
      {"i wish", "desire"},             {"we hope", "desire"},
      {"i would love", "desire"},       {"we desire", "desire"},
      {"it is hard", "difficulty"},     {"it is difficult", "difficulty"},
      {"struggle to", "difficulty"},    {"challenge", "difficulty"},
      {"not easy", "difficulty"},       {"difficult to", "difficulty"}};
  for (const auto& [phrase, style] : argument_phrases) lex.argument_phrases[phrase] = style;

  lex.stopwords = word_set(
      {"a", "an", "the", "and", "or", "but", "if", "then", "else", "when", "at", "by", "for",
       "with", "about", "against", "between", "into", "through", "during", "before", "after",
       "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
       "again", "further", "once", "here", "there", "all", "any", "both", "each", "few", "more",
       "most", "other", "some", "such", "no", "nor", "not", "only", "own", "same", "so", "than",
       "too", "very", "s", "t", "just", "don", "now", "i", "me", "my", "myself", "we", "our",
       "ours", "ourselves", "you", "your", "yours", "yourself", "he", "him", "his", "himself",
       "she", "her", "hers", "herself", "it", "its", "itself", "they", "them", "their",
       "theirs", "themselves", "what", "which", "who", "whom", "this", "that", "these",
       "those", "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had",
       "having", "do", "does", "did", "doing", "would", "should", "could", "can", "will",
       "of", "as", "until", "while", "because", "why", "how", "where"});

  const std::initializer_list<std::pair<const char*, const char*>> synonym_pairs = {
      {"big", "large"},      {"big", "huge"},       {"small", "tiny"},
      {"small", "little"},   {"good", "fine"},      {"good", "decent"},
      {"great", "excellent"},{"bad", "poor"},       {"bad", "awful"},
      {"wrong", "incorrect"},{"right", "correct"},  {"fast", "quick"},
      {"slow", "sluggish"},  {"smart", "clever"},   {"smart", "intelligent"},
      {"happy", "glad"},     {"sad", "unhappy"},    {"angry", "mad"},
      {"begin", "start"},    {"end", "finish"},     {"help", "assist"},
      {"harm", "hurt"},      {"harm", "damage"},    {"show", "demonstrate"},
      {"prove", "demonstrate"}, {"important", "crucial"}, {"important", "vital"},
      {"problem", "issue"},  {"idea", "concept"},   {"argument", "claim"},
      {"cat", "feline"},     {"dog", "canine"},     {"car", "automobile"},
      {"house", "home"},     {"job", "occupation"}, {"money", "cash"},
      {"strong", "powerful"},{"weak", "feeble"},    {"true", "accurate"},
      {"false", "untrue"},   {"freedom", "liberty"},{"danger", "hazard"}};
  for (const auto& [a, b] : synonym_pairs) {
    lex.synonyms[a].insert(b);
    lex.synonyms[b].insert(a);
  }

  // Mini dictionary for spelling checks: common words plus everything any
  // other lexicon mentions.
  lex.dictionary = word_set(
      {"the", "be", "to", "of", "and", "a", "in", "that", "have", "it", "for", "not", "on",
       "with", "as", "you", "do", "at", "this", "but", "his", "by", "from", "they", "we",
       "say", "says", "said", "her", "she", "or", "an", "will", "my", "one", "two", "three",
       "all", "would", "there", "their", "what", "so", "up", "out", "if", "about", "who",
       "get", "which", "go", "me", "when", "make", "makes", "made", "can", "like", "time",
       "just", "him", "know", "knows", "knew", "take", "takes", "took", "people", "into",
       "year", "years", "your", "some", "them", "see", "sees", "saw", "other", "than",
       "then", "now", "look", "looks", "only", "come", "comes", "came", "its", "over",
       "think", "thinks", "thought", "also", "back", "after", "use", "uses", "used", "how",
       "our", "work", "works", "worked", "first", "well", "way", "ways", "even", "new",
       "want", "wants", "wanted", "any", "these", "give", "gives", "gave", "day", "days",
       "most", "us", "is", "are", "was", "were", "been", "being", "has", "had", "did",
       "does", "doing", "because", "world", "school", "state", "never", "become", "between",
       "high", "really", "something", "nothing", "fact", "facts", "month", "different",
       "right", "wrong", "point", "points", "believe", "believes", "same", "another",
       "while", "last", "might", "great", "old", "yes", "no", "house", "both", "during",
       "each", "few", "more", "those", "against", "place", "such", "why", "where", "here",
       "must", "word", "words", "should", "very", "through", "long", "much", "many",
       "before", "too", "own", "under", "read", "reads", "water", "person", "without",
       "again", "around", "however", "every", "man", "woman", "men", "women", "child",
       "children", "life", "lives", "still", "learn", "learns", "learned", "big", "small",
       "good", "bad", "every", "change", "changes", "changed", "always", "sometimes",
       "argument", "arguments", "debate", "debates", "topic", "topics", "claim", "claims",
       "reason", "reasons", "reasoning", "evidence", "side", "sides", "voter", "voters",
       "vote", "votes", "voted", "case", "cases", "question", "questions", "answer",
       "answers", "example", "examples", "support", "oppose", "agree", "disagree", "win",
       "lose", "true", "false", "best", "better", "worse", "worst", "thing", "things"});
  auto absorb = [&](const std::set<std::string>& set) {
    for (const auto& entry : set)
      for (const auto& word : split(entry, ' '))
        if (!word.empty()) lex.dictionary.insert(word);
  };
  absorb(lex.politeness);
  absorb(lex.swear);
  absorb(lex.hedges);
  absorb(lex.evidence_markers);
  absorb(lex.opponent_markers);
  absorb(lex.modal_verbs);
  absorb(lex.pronouns_first);
  absorb(lex.pronouns_second);
  absorb(lex.pronouns_third);
  absorb(lex.stopwords);
  for (const auto& [w, v] : lex.sentiment) lex.dictionary.insert(w);
  for (const auto& [w, v] : lex.subjectivity) lex.dictionary.insert(w);
  for (const auto& [w, v] : lex.connotation) lex.dictionary.insert(w);
  for (const auto& [p, s] : lex.argument_phrases)
    for (const auto& word : split(p, ' '))
      if (!word.empty()) lex.dictionary.insert(word);
  for (const auto& [w, syns] : lex.synonyms) {
    lex.dictionary.insert(w);
    for (const auto& s : syns) lex.dictionary.insert(s);
  }
  return lex;
}

std::vector<std::pair<std::string, std::string>> read_lexicon_file(const std::string& path) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      entries.emplace_back(lower_ascii(line), "");
    else
      entries.emplace_back(lower_ascii(trim(line.substr(0, tab))), trim(line.substr(tab + 1)));
  }
  return entries;
}

}  // namespace

const LexiconSet& builtin_lexicons() {
  static const LexiconSet lex = build_builtin();
  return lex;
}

LexiconSet load_lexicons(const std::string& dir) {
  LexiconSet lex = builtin_lexicons();
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ValidationError("lexicon directory not found: " + dir);

  auto maybe_load_set = [&](const char* name, std::set<std::string>& target) {
    fs::path p = fs::path(dir) / (std::string(name) + ".txt");
    if (!fs::exists(p)) return;
    target.clear();
    for (const auto& [term, value] : read_lexicon_file(p.string())) target.insert(term);
  };
  maybe_load_set("politeness", lex.politeness);
  maybe_load_set("swear", lex.swear);
  maybe_load_set("hedges", lex.hedges);
  maybe_load_set("evidence", lex.evidence_markers);
  maybe_load_set("opponent", lex.opponent_markers);
  maybe_load_set("modal", lex.modal_verbs);
  maybe_load_set("pronouns_first", lex.pronouns_first);
  maybe_load_set("pronouns_second", lex.pronouns_second);
  maybe_load_set("pronouns_third", lex.pronouns_third);
  maybe_load_set("stopwords", lex.stopwords);
  maybe_load_set("dictionary", lex.dictionary);

  fs::path sentiment_path = fs::path(dir) / "sentiment.txt";
  if (fs::exists(sentiment_path)) {
    lex.sentiment.clear();
    for (const auto& [term, value] : read_lexicon_file(sentiment_path.string())) {
      try {
        lex.sentiment[term] = std::stod(value);
      } catch (...) {
        throw ValidationError("sentiment.txt: bad polarity for '" + term + "'");
      }
    }
  }
  fs::path subj_path = fs::path(dir) / "subjectivity.txt";
  if (fs::exists(subj_path)) {
    lex.subjectivity.clear();
    for (const auto& [term, value] : read_lexicon_file(subj_path.string())) {
      if (value == "neg_strong") lex.subjectivity[term] = Subjectivity::NegStrong;
      else if (value == "neg_weak") lex.subjectivity[term] = Subjectivity::NegWeak;
      else if (value == "pos_strong") lex.subjectivity[term] = Subjectivity::PosStrong;
      else if (value == "pos_weak") lex.subjectivity[term] = Subjectivity::PosWeak;
      else throw ValidationError("subjectivity.txt: bad class for '" + term + "'");
    }
  }
  fs::path conn_path = fs::path(dir) / "connotation.txt";
  if (fs::exists(conn_path)) {
    lex.connotation.clear();
    for (const auto& [term, value] : read_lexicon_file(conn_path.string())) {
      if (value == "pos") lex.connotation[term] = Connotation::Positive;
      else if (value == "neg") lex.connotation[term] = Connotation::Negative;
      else if (value == "neutral") lex.connotation[term] = Connotation::Neutral;
      else throw ValidationError("connotation.txt: bad class for '" + term + "'");
    }
  }
  fs::path arg_path = fs::path(dir) / "argument_lexicon.txt";
  if (fs::exists(arg_path)) {
    lex.argument_phrases.clear();
    const auto& styles = LexiconSet::argument_styles();
    for (const auto& [phrase, style] : read_lexicon_file(arg_path.string())) {
      if (std::find(styles.begin(), styles.end(), style) == styles.end())
        throw ValidationError("argument_lexicon.txt: unknown style '" + style + "'");
      lex.argument_phrases[phrase] = style;
    }
  }
  fs::path syn_path = fs::path(dir) / "synonyms.txt";
  if (fs::exists(syn_path)) {
    lex.synonyms.clear();
    for (const auto& [word, value] : read_lexicon_file(syn_path.string())) {
      for (const auto& syn : split(value, ',')) {
        std::string s = lower_ascii(trim(syn));
        if (s.empty()) continue;
        lex.synonyms[word].insert(s);
        lex.synonyms[s].insert(word);
      }
    }
  }
  return lex;
}

}  // namespace kairos
