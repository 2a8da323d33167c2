#include "kairos/corpus.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include "json.hpp"
#include "kairos/util.hpp"

namespace kairos {

using nlohmann::json;

const std::optional<std::string>& UserProfile::trait(Trait t) const {
  switch (t) {
    case Trait::PoliticalIdeology: return political_ideology;
    case Trait::ReligiousIdeology: return religious_ideology;
    case Trait::Gender: return gender;
    case Trait::Ethnicity: return ethnicity;
  }
  throw UsageError("unknown trait");
}

const ClaimNode& ArgumentTree::node(const std::string& claim_id) const {
  auto it = nodes.find(claim_id);
  if (it == nodes.end())
    throw ValidationError("tree " + tree_id + ": unknown claim id '" + claim_id + "'");
  return it->second;
}

const char* to_string(Stance s) {
  switch (s) {
    case Stance::Pro: return "PRO";
    case Stance::Con: return "CON";
    case Stance::NoOpinion: return "N/O";
    case Stance::NotSaying: return "N/S";
    case Stance::Undecided: return "UND";
  }
  return "?";
}

const char* to_string(VoteStance s) {
  switch (s) {
    case VoteStance::Pro: return "PRO";
    case VoteStance::Con: return "CON";
    case VoteStance::Undecided: return "UND";
  }
  return "?";
}

const char* to_string(Choice c) {
  switch (c) {
    case Choice::Pro: return "PRO";
    case Choice::Con: return "CON";
    case Choice::Tie: return "TIE";
  }
  return "?";
}

const char* to_string(EdgeLabel e) {
  return e == EdgeLabel::Support ? "SUPPORT" : "OPPOSE";
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ValidationError(path + ": " + msg);
}

Stance parse_stance(const std::string& s, const std::string& path) {
  if (s == "PRO") return Stance::Pro;
  if (s == "CON") return Stance::Con;
  if (s == "N/O") return Stance::NoOpinion;
  if (s == "N/S") return Stance::NotSaying;
  if (s == "UND") return Stance::Undecided;
  fail(path, "invalid stance '" + s + "'");
}

VoteStance parse_vote_stance(const std::string& s, const std::string& path) {
  if (s == "PRO") return VoteStance::Pro;
  if (s == "CON") return VoteStance::Con;
  if (s == "UND") return VoteStance::Undecided;
  fail(path, "invalid ballot stance '" + s + "' (must be PRO, CON or UND)");
}

Choice parse_choice(const std::string& s, const std::string& path) {
  if (s == "PRO") return Choice::Pro;
  if (s == "CON") return Choice::Con;
  if (s == "TIE") return Choice::Tie;
  fail(path, "invalid choice '" + s + "' (must be PRO, CON or TIE)");
}

/// Checked field access with schema enforcement.
class ObjReader {
 public:
  ObjReader(const json& obj, std::string path, const ParseOptions& opts)
      : obj_(obj), path_(std::move(path)), opts_(opts) {
    if (!obj.is_object()) fail(path_, "expected an object");
  }

  bool has(const char* key) const { return obj_.contains(key); }

  const json& get(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) fail(path_, "missing required field '" + std::string(key) + "'");
    return *it;
  }

  const json* get_opt(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string get_string(const char* key) {
    const json& v = get(key);
    if (!v.is_string()) fail(path_ + "." + key, "expected a string");
    return v.get<std::string>();
  }

  std::int64_t get_int(const char* key) {
    const json& v = get(key);
    if (!v.is_number_integer()) fail(path_ + "." + key, "expected an integer");
    return v.get<std::int64_t>();
  }

  /// Call after reading every known field.
  void finish() {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (seen_.count(it.key())) continue;
      if (opts_.strict) fail(path_ + "." + it.key(), "unknown field");
      if (opts_.warnings)
        opts_.warnings->push_back(path_ + "." + it.key() + ": unknown field ignored");
    }
  }

  const std::string& path() const { return path_; }

 private:
  const json& obj_;
  std::string path_;
  const ParseOptions& opts_;
  std::set<std::string> seen_;
};

json parse_root_array(const std::string& raw, const std::string& what) {
  json root;
  try {
    root = json::parse(raw);
  } catch (const json::exception& e) {
    throw ValidationError(what + ": invalid JSON: " + e.what());
  }
  if (!root.is_array()) throw ValidationError(what + ": top-level value must be an array");
  return root;
}

Corpus parse_debates(const std::string& raw, const ParseOptions& opts) {
  Corpus corpus;
  json root = parse_root_array(raw, "debates");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < root.size(); ++i) {
    std::string path = "debates[" + std::to_string(i) + "]";
    ObjReader r(root[i], path, opts);
    Debate d;
    d.debate_id = r.get_string("debate_id");
    if (!ids.insert(d.debate_id).second) fail(path, "duplicate debate_id '" + d.debate_id + "'");
    d.topic = r.get_string("topic");
    d.category = r.get_string("category");
    d.pro_user = r.get_string("pro_user");
    d.con_user = r.get_string("con_user");
    d.timestamp = r.get_int("timestamp");

    const json& rounds = r.get("rounds");
    if (!rounds.is_array()) fail(path + ".rounds", "expected an array");
    if (rounds.empty() || rounds.size() > 5)
      fail(path + ".rounds", "a debate has between 1 and 5 rounds, got " +
                                 std::to_string(rounds.size()));
    int prev_index = -1;
    for (std::size_t j = 0; j < rounds.size(); ++j) {
      std::string rpath = path + ".rounds[" + std::to_string(j) + "]";
      ObjReader rr(rounds[j], rpath, opts);
      Round round;
      round.index = static_cast<int>(rr.get_int("index"));
      if (round.index <= prev_index) fail(rpath + ".index", "round indices must strictly increase");
      prev_index = round.index;
      if (const json* v = rr.get_opt("pro_text")) {
        if (!v->is_string()) fail(rpath + ".pro_text", "expected a string");
        round.pro_text = v->get<std::string>();
      }
      if (const json* v = rr.get_opt("con_text")) {
        if (!v->is_string()) fail(rpath + ".con_text", "expected a string");
        round.con_text = v->get<std::string>();
      }
      rr.finish();
      d.rounds.push_back(std::move(round));
    }

    const json& ballots = r.get("ballots");
    if (!ballots.is_array()) fail(path + ".ballots", "expected an array");
    for (std::size_t j = 0; j < ballots.size(); ++j) {
      std::string bpath = path + ".ballots[" + std::to_string(j) + "]";
      ObjReader br(ballots[j], bpath, opts);
      Ballot b;
      b.voter_id = br.get_string("voter_id");
      b.stance_before = parse_vote_stance(br.get_string("stance_before"), bpath + ".stance_before");
      b.stance_after = parse_vote_stance(br.get_string("stance_after"), bpath + ".stance_after");
      const json& choices = br.get("choices");
      ObjReader cr(choices, bpath + ".choices", opts);
      b.choices.conduct = parse_choice(cr.get_string("conduct"), bpath + ".choices.conduct");
      b.choices.spelling_grammar =
          parse_choice(cr.get_string("spelling_grammar"), bpath + ".choices.spelling_grammar");
      b.choices.convincing_arguments = parse_choice(cr.get_string("convincing_arguments"),
                                                    bpath + ".choices.convincing_arguments");
      b.choices.reliable_sources =
          parse_choice(cr.get_string("reliable_sources"), bpath + ".choices.reliable_sources");
      cr.finish();
      br.finish();
      d.ballots.push_back(std::move(b));
    }
    r.finish();
    corpus.debates.push_back(std::move(d));
  }
  return corpus;
}

Corpus parse_users(const std::string& raw, const ParseOptions& opts) {
  Corpus corpus;
  json root = parse_root_array(raw, "users");
  for (std::size_t i = 0; i < root.size(); ++i) {
    std::string path = "users[" + std::to_string(i) + "]";
    ObjReader r(root[i], path, opts);
    UserProfile u;
    u.user_id = r.get_string("user_id");
    if (corpus.users.count(u.user_id)) fail(path, "duplicate user_id '" + u.user_id + "'");
    auto opt_str = [&](const char* key) -> std::optional<std::string> {
      if (const json* v = r.get_opt(key)) {
        if (!v->is_string()) fail(path + "." + key, "expected a string");
        return v->get<std::string>();
      }
      return std::nullopt;
    };
    u.political_ideology = opt_str("political_ideology");
    u.religious_ideology = opt_str("religious_ideology");
    u.gender = opt_str("gender");
    u.ethnicity = opt_str("ethnicity");
    if (const json* stances = r.get_opt("big_issue_stances")) {
      if (!stances->is_object()) fail(path + ".big_issue_stances", "expected an object");
      for (auto it = stances->begin(); it != stances->end(); ++it) {
        if (!it.value().is_string())
          fail(path + ".big_issue_stances." + it.key(), "expected a string");
        u.big_issue_stances[it.key()] = parse_stance(
            it.value().get<std::string>(), path + ".big_issue_stances." + it.key());
      }
    }
    if (const json* friends = r.get_opt("friends")) {
      if (!friends->is_array()) fail(path + ".friends", "expected an array");
      for (const auto& f : *friends) {
        if (!f.is_string()) fail(path + ".friends", "expected strings");
        u.friends.insert(f.get<std::string>());
      }
    }
    if (r.has("join_order")) u.join_order = static_cast<int>(r.get_int("join_order"));
    r.finish();
    corpus.users.emplace(u.user_id, std::move(u));
  }
  return corpus;
}

Corpus parse_trees(const std::string& raw, const ParseOptions& opts) {
  Corpus corpus;
  json root = parse_root_array(raw, "trees");
  std::set<std::string> tree_ids;
  for (std::size_t i = 0; i < root.size(); ++i) {
    std::string path = "trees[" + std::to_string(i) + "]";
    ObjReader r(root[i], path, opts);
    ArgumentTree tree;
    tree.tree_id = r.get_string("tree_id");
    if (!tree_ids.insert(tree.tree_id).second)
      fail(path, "duplicate tree_id '" + tree.tree_id + "'");
    const json& nodes = r.get("nodes");
    if (!nodes.is_array()) fail(path + ".nodes", "expected an array");
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      std::string npath = path + ".nodes[" + std::to_string(j) + "]";
      ObjReader nr(nodes[j], npath, opts);
      ClaimNode node;
      node.claim_id = nr.get_string("claim_id");
      if (tree.nodes.count(node.claim_id))
        fail(npath, "duplicate claim_id '" + node.claim_id + "'");
      node.text = nr.get_string("text");
      if (const json* p = nr.get_opt("parent")) {
        if (!p->is_string()) fail(npath + ".parent", "expected a string");
        node.parent = p->get<std::string>();
      }
      if (const json* e = nr.get_opt("edge_label")) {
        if (!e->is_string()) fail(npath + ".edge_label", "expected a string");
        std::string label = e->get<std::string>();
        if (label == "SUPPORT") node.edge_label = EdgeLabel::Support;
        else if (label == "OPPOSE") node.edge_label = EdgeLabel::Oppose;
        else fail(npath + ".edge_label", "invalid edge label '" + label + "'");
      }
      const json& tally = nr.get("tally");
      if (!tally.is_array() || tally.size() != 5)
        fail(npath + ".tally", "expected an array of 5 integers");
      for (int t = 0; t < 5; ++t) {
        if (!tally[t].is_number_integer() || tally[t].get<long>() < 0)
          fail(npath + ".tally", "tally entries must be non-negative integers");
        node.tally.counts[t] = tally[t].get<long>();
      }
      nr.finish();
      tree.nodes.emplace(node.claim_id, std::move(node));
    }
    r.finish();

    // Structural validation: single parentless root, known parents, acyclic,
    // edge labels exactly on non-roots.
    for (const auto& [id, node] : tree.nodes) {
      if (!node.parent) {
        if (node.edge_label)
          fail(path, "thesis '" + id + "' must not carry an edge label");
        if (!tree.thesis_id.empty())
          fail(path, "multiple parentless nodes: '" + tree.thesis_id + "' and '" + id + "'");
        tree.thesis_id = id;
      } else {
        if (!tree.nodes.count(*node.parent))
          fail(path + " claim '" + id + "'", "unknown parent '" + *node.parent + "'");
        if (!node.edge_label)
          fail(path + " claim '" + id + "'", "non-root claim needs an edge label");
      }
    }
    if (tree.thesis_id.empty()) fail(path, "tree has no parentless thesis node");
    for (const auto& [id, node] : tree.nodes) {
      const ClaimNode* cur = &node;
      std::size_t hops = 0;
      while (cur->parent) {
        cur = &tree.nodes.at(*cur->parent);
        if (++hops > tree.nodes.size())
          fail(path, "cycle detected at claim '" + id + "'");
      }
      if (cur->claim_id != tree.thesis_id)
        fail(path, "claim '" + id + "' is not connected to the thesis");
    }
    corpus.trees.push_back(std::move(tree));
  }
  return corpus;
}

json debates_to_json(const Corpus& corpus) {
  json root = json::array();
  for (const Debate& d : corpus.debates) {
    json jd;
    jd["debate_id"] = d.debate_id;
    jd["topic"] = d.topic;
    jd["category"] = d.category;
    jd["pro_user"] = d.pro_user;
    jd["con_user"] = d.con_user;
    jd["timestamp"] = d.timestamp;
    json rounds = json::array();
    for (const Round& r : d.rounds) {
      json jr;
      jr["index"] = r.index;
      if (r.pro_text) jr["pro_text"] = *r.pro_text;
      if (r.con_text) jr["con_text"] = *r.con_text;
      rounds.push_back(std::move(jr));
    }
    jd["rounds"] = std::move(rounds);
    json ballots = json::array();
    for (const Ballot& b : d.ballots) {
      json jb;
      jb["voter_id"] = b.voter_id;
      jb["stance_before"] = to_string(b.stance_before);
      jb["stance_after"] = to_string(b.stance_after);
      jb["choices"] = {{"conduct", to_string(b.choices.conduct)},
                       {"spelling_grammar", to_string(b.choices.spelling_grammar)},
                       {"convincing_arguments", to_string(b.choices.convincing_arguments)},
                       {"reliable_sources", to_string(b.choices.reliable_sources)}};
      ballots.push_back(std::move(jb));
    }
    jd["ballots"] = std::move(ballots);
    root.push_back(std::move(jd));
  }
  return root;
}

json users_to_json(const Corpus& corpus) {
  json root = json::array();
  for (const auto& [id, u] : corpus.users) {
    json ju;
    ju["user_id"] = u.user_id;
    if (u.political_ideology) ju["political_ideology"] = *u.political_ideology;
    if (u.religious_ideology) ju["religious_ideology"] = *u.religious_ideology;
    if (u.gender) ju["gender"] = *u.gender;
    if (u.ethnicity) ju["ethnicity"] = *u.ethnicity;
    if (!u.big_issue_stances.empty()) {
      json stances;
      for (const auto& [issue, stance] : u.big_issue_stances) stances[issue] = to_string(stance);
      ju["big_issue_stances"] = std::move(stances);
    }
    if (!u.friends.empty()) ju["friends"] = u.friends;
    ju["join_order"] = u.join_order;
    root.push_back(std::move(ju));
  }
  return root;
}

json trees_to_json(const Corpus& corpus) {
  json root = json::array();
  for (const ArgumentTree& tree : corpus.trees) {
    json jt;
    jt["tree_id"] = tree.tree_id;
    json nodes = json::array();
    for (const auto& [id, node] : tree.nodes) {
      json jn;
      jn["claim_id"] = node.claim_id;
      jn["text"] = node.text;
      if (node.parent) jn["parent"] = *node.parent;
      if (node.edge_label) jn["edge_label"] = to_string(*node.edge_label);
      jn["tally"] = node.tally.counts;
      nodes.push_back(std::move(jn));
    }
    jt["nodes"] = std::move(nodes);
    root.push_back(std::move(jt));
  }
  return root;
}

}  // namespace

Corpus parse_corpus(const std::string& raw, CorpusKind kind, const ParseOptions& opts) {
  switch (kind) {
    case CorpusKind::Debates: return parse_debates(raw, opts);
    case CorpusKind::Users: return parse_users(raw, opts);
    case CorpusKind::Trees: return parse_trees(raw, opts);
  }
  throw UsageError("unknown corpus kind");
}

Corpus parse_corpus(std::istream& in, CorpusKind kind, const ParseOptions& opts) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_corpus(ss.str(), kind, opts);
}

void merge_corpus(Corpus& dst, Corpus&& src) {
  for (auto& d : src.debates) dst.debates.push_back(std::move(d));
  for (auto& [id, u] : src.users) {
    if (dst.users.count(id)) throw ValidationError("duplicate user_id across files: '" + id + "'");
    dst.users.emplace(id, std::move(u));
  }
  for (auto& t : src.trees) dst.trees.push_back(std::move(t));
}

std::string serialize_corpus(const Corpus& corpus, CorpusKind kind) {
  json root;
  switch (kind) {
    case CorpusKind::Debates: root = debates_to_json(corpus); break;
    case CorpusKind::Users: root = users_to_json(corpus); break;
    case CorpusKind::Trees: root = trees_to_json(corpus); break;
  }
  return root.dump(2) + "\n";
}

std::string canonicalize_json(const std::string& raw) {
  json parsed;
  try {
    parsed = json::parse(raw);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid JSON: ") + e.what());
  }
  return parsed.dump(2) + "\n";
}

BigIssuesVector encode_big_issues(const UserProfile& profile,
                                  const std::vector<std::string>& catalog) {
  BigIssuesVector out;
  out.values.assign(4 * catalog.size(), 0.0);
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    auto it = profile.big_issue_stances.find(catalog[i]);
    if (it == profile.big_issue_stances.end())
      throw ValidationError("user '" + profile.user_id + "' has no stance on issue '" +
                            catalog[i] + "'");
    int offset = -1;
    switch (it->second) {
      case Stance::Pro: offset = 0; break;
      case Stance::Con: offset = 1; break;
      case Stance::NoOpinion: offset = 2; break;
      case Stance::Undecided: offset = 3; break;
      case Stance::NotSaying:
        throw ValidationError("user '" + profile.user_id +
                              "' is excluded: stance N/S on issue '" + catalog[i] + "'");
    }
    out.values[4 * i + offset] = 1.0;
  }
  return out;
}

double opinion_similarity(const BigIssuesVector& a, const BigIssuesVector& b) {
  if (a.values.size() != b.values.size())
    throw UsageError("opinion_similarity: vector length mismatch (" +
                     std::to_string(a.values.size()) + " vs " +
                     std::to_string(b.values.size()) + ")");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

int matching_trait(const UserProfile& a, const UserProfile& b, Trait trait) {
  const auto& ta = a.trait(trait);
  const auto& tb = b.trait(trait);
  if (!ta || !tb)
    throw UsageError("matching_trait: trait undeclared for user '" +
                     (ta ? b.user_id : a.user_id) + "'");
  return *ta == *tb ? 1 : 0;
}

Corpus filter_min_votes(const Corpus& corpus, long k) {
  if (k < 0) throw UsageError("filter_min_votes: k must be >= 0");
  Corpus out;
  out.users = corpus.users;
  out.trees = corpus.trees;
  for (const Debate& d : corpus.debates) {
    if (static_cast<long>(d.ballots.size()) > k) out.debates.push_back(d);
  }
  return out;
}

std::vector<std::string> context_of(const ArgumentTree& tree, const std::string& claim_id) {
  const ClaimNode* cur = &tree.node(claim_id);
  std::vector<std::string> path;
  while (cur->parent) {
    path.push_back(*cur->parent);
    cur = &tree.node(*cur->parent);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

int context_length(const ArgumentTree& tree, const std::string& claim_id) {
  return static_cast<int>(context_of(tree, claim_id).size());
}

}  // namespace kairos
