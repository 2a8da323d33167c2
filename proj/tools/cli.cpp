#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "kairos/corpus.hpp"
#include "kairos/eval.hpp"
#include "kairos/graph.hpp"
#include "kairos/impact.hpp"
#include "kairos/labeling.hpp"
#include "kairos/learn.hpp"
#include "kairos/synth.hpp"
#include "kairos/textfeat.hpp"
#include "kairos/util.hpp"

namespace kairos::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string debates_path, users_path, trees_path;
  std::string out_dir;
  std::string lexicon_dir;
  bool strict = false;
  long min_votes = -1;  // keep debates with strictly more ballots; -1 disables
  std::uint64_t seed = 7;
  int jobs = 1;
};

void add_input_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--debates", opts.debates_path, "debates.json input");
  cmd->add_option("--users", opts.users_path, "users.json input");
  cmd->add_option("--trees", opts.trees_path, "trees.json input");
  cmd->add_flag("--strict", opts.strict, "reject unknown JSON fields");
  cmd->add_option("--min-votes", opts.min_votes,
                  "drop debates with this many ballots or fewer (off by default)");
}

void add_run_options(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--out", opts.out_dir, "output directory")->required();
  cmd->add_option("--seed", opts.seed, "RNG seed");
  cmd->add_option("--jobs", opts.jobs, "worker threads (results are independent of this)");
  const char* env_dir = std::getenv("KAIROS_LEXICON_DIR");
  if (env_dir) opts.lexicon_dir = env_dir;
  cmd->add_option("--lexicons", opts.lexicon_dir, "lexicon directory (overrides builtin)");
}

struct LoadedCorpus {
  Corpus corpus;
  std::string digest;  // sha256 over the raw input bytes, in option order
  std::vector<std::string> warnings;
};

LoadedCorpus load_corpus(const CommonOpts& opts) {
  LoadedCorpus loaded;
  std::string raw_all;
  ParseOptions popts;
  popts.strict = opts.strict;
  popts.warnings = &loaded.warnings;
  auto load_one = [&](const std::string& path, CorpusKind kind) {
    if (path.empty()) return;
    std::string raw = read_file(path);
    raw_all += raw;
    merge_corpus(loaded.corpus, parse_corpus(raw, kind, popts));
  };
  load_one(opts.debates_path, CorpusKind::Debates);
  load_one(opts.users_path, CorpusKind::Users);
  load_one(opts.trees_path, CorpusKind::Trees);
  if (opts.min_votes >= 0) loaded.corpus = filter_min_votes(loaded.corpus, opts.min_votes);
  loaded.digest = sha256_hex(raw_all);
  for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
  return loaded;
}

const LexiconSet& lexicons_for(const CommonOpts& opts, LexiconSet& storage) {
  if (opts.lexicon_dir.empty()) return builtin_lexicons();
  storage = load_lexicons(opts.lexicon_dir);
  return storage;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

void write_manifest(const CommonOpts& opts, const std::string& subcommand,
                    const std::string& digest, const std::vector<std::string>& outputs,
                    const nlohmann::json& extra = {}) {
  nlohmann::json j;
  j["tool"] = "kairos";
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["corpus_sha256"] = digest;
  j["seed"] = opts.seed;
  j["strict"] = opts.strict;
  j["outputs"] = outputs;
  j["wall_clock"] = iso_now();  // the only time-dependent field in any output
  if (!extra.is_null()) j["config"] = extra;
  write_file((fs::path(opts.out_dir) / "manifest.json").string(), j.dump(2) + "\n");
}

void ensure_out(const CommonOpts& opts) { fs::create_directories(opts.out_dir); }

std::string report_header(const std::string& subcommand, const CommonOpts& opts,
                          const std::string& digest) {
  std::string h;
  h += "# kairos " + std::string(kVersion) + "\n";
  h += "# subcommand=" + subcommand + " seed=" + std::to_string(opts.seed) +
       " corpus_sha256=" + digest + "\n";
  return h;
}

// ---------------------------------------------------------------------------
// Task/setting dataset assembly shared by train/evaluate/ablate
// ---------------------------------------------------------------------------

struct TaskSelector {
  std::string task = "task2";  // task1, task2, setting1..3
  std::string category;        // optional category filter for task1/2
  std::vector<std::string> groups = {"user"};
  std::vector<std::string> include;  // exact feature columns
  std::size_t tfidf_max = 300;

  bool is_setting() const { return sel_is_setting(task); }
  static bool sel_is_setting(const std::string& t) { return t.rfind("setting", 0) == 0; }
};

void add_task_options(CLI::App* cmd, TaskSelector& sel) {
  cmd->add_option("--task", sel.task, "task1|task2|setting1|setting2|setting3")->required();
  cmd->add_option("--category", sel.category, "restrict task1/2 to one debate category");
  cmd->add_option("--features", sel.groups,
                  "feature groups: tasks use user,linguistic,tfidf; settings use "
                  "participation,graph,traits,language,interplay")
      ->delimiter(',');
  cmd->add_option("--include", sel.include, "keep only these feature columns")->delimiter(',');
  cmd->add_option("--tfidf-max", sel.tfidf_max, "tf-idf vocabulary cap");
}

std::vector<std::string> detect_catalog(const Corpus& corpus) {
  std::set<std::string> issues;
  for (const auto& [id, u] : corpus.users)
    for (const auto& [issue, stance] : u.big_issue_stances) issues.insert(issue);
  return {issues.begin(), issues.end()};
}

Dataset build_dataset(const Corpus& corpus, const TaskSelector& sel, const LexiconSet& lexicons,
                      std::uint64_t seed) {
  auto has = [&](const char* g) {
    return std::find(sel.groups.begin(), sel.groups.end(), g) != sel.groups.end();
  };
  if (sel.is_setting()) {
    int setting;
    if (sel.task == "setting1") setting = 1;
    else if (sel.task == "setting2") setting = 2;
    else if (sel.task == "setting3") setting = 3;
    else throw UsageError("unknown task '" + sel.task + "'");
    auto pairs = setting_pairs(corpus, setting, seed);
    if (pairs.empty()) throw ValidationError("no " + sel.task + " pairs in this corpus");
    SettingFeatureConfig config;
    config.participation = has("participation");
    config.graph = has("graph");
    config.traits = has("traits");
    config.language = has("language");
    config.interplay = has("interplay");
    if (!config.participation && !config.graph && !config.traits && !config.language &&
        !config.interplay)
      throw UsageError("no setting feature groups selected");
    config.catalog = detect_catalog(corpus);
    config.include = sel.include;
    return build_setting_dataset(corpus, pairs, config, lexicons);
  }

  std::optional<std::string> category;
  if (!sel.category.empty()) category = sel.category;
  std::vector<TaskRow> rows;
  if (sel.task == "task1") rows = task1_pairs(corpus, category);
  else if (sel.task == "task2") rows = task2_pairs(corpus, category);
  else throw UsageError("unknown task '" + sel.task + "'");
  if (rows.empty()) throw ValidationError("no " + sel.task + " rows in this corpus");

  TaskFeatureConfig config;
  config.user = has("user");
  config.linguistic = has("linguistic");
  config.tfidf = has("tfidf");
  if (!config.user && !config.linguistic && !config.tfidf)
    throw UsageError("no task feature groups selected");
  config.tfidf_max_features = sel.tfidf_max;
  config.catalog = detect_catalog(corpus);
  config.include = sel.include;
  return build_task_dataset(corpus, rows, config, lexicons);
}

// ---------------------------------------------------------------------------
// Report writers
// ---------------------------------------------------------------------------

std::string ablation_csv(const AblationReport& report, const std::string& header) {
  std::string csv = header;
  csv +=
      "row,rows,precision_mean,precision_std,recall_mean,recall_std,f1_mean,f1_std,"
      "accuracy_mean,accuracy_std,p_vs_majority,significance\n";
  for (const auto& row : report.rows) {
    const CvResult& r = row.result;
    csv += csv_escape(row.name) + "," + std::to_string(r.pooled_preds.size()) + "," +
           format_double(100 * r.precision_mean) + "," + format_double(100 * r.precision_std) +
           "," + format_double(100 * r.recall_mean) + "," + format_double(100 * r.recall_std) +
           "," + format_double(100 * r.f1_mean) + "," + format_double(100 * r.f1_std) + "," +
           format_double(100 * r.accuracy_mean) + "," + format_double(100 * r.accuracy_std) +
           "," + format_double(row.p_vs_baseline) + "," + row.stars + "\n";
  }
  return csv;
}

std::string ablation_txt(const AblationReport& report, const std::string& title) {
  std::ostringstream out;
  out << title << "\n";
  char line[256];
  std::snprintf(line, sizeof(line), "%-36s %18s %18s %18s %10s\n", "row", "precision",
                "recall", "F1", "p");
  out << line;
  for (const auto& row : report.rows) {
    const CvResult& r = row.result;
    char p_mean[64], r_mean[64], f_mean[64];
    std::snprintf(p_mean, sizeof(p_mean), "%6.2f +/- %5.2f", 100 * r.precision_mean,
                  100 * r.precision_std);
    std::snprintf(r_mean, sizeof(r_mean), "%6.2f +/- %5.2f", 100 * r.recall_mean,
                  100 * r.recall_std);
    std::snprintf(f_mean, sizeof(f_mean), "%6.2f +/- %5.2f", 100 * r.f1_mean, 100 * r.f1_std);
    std::snprintf(line, sizeof(line), "%-36s %18s %18s %18s %7.4f %s\n", row.name.c_str(),
                  p_mean, r_mean, f_mean, row.p_vs_baseline, row.stars.c_str());
    out << line;
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Subcommand runners
// ---------------------------------------------------------------------------

int run_ingest(const CommonOpts& opts) {
  LoadedCorpus loaded = load_corpus(opts);
  ensure_out(opts);
  std::vector<std::string> outputs;
  auto emit = [&](const char* name, CorpusKind kind) {
    write_file((fs::path(opts.out_dir) / name).string(), serialize_corpus(loaded.corpus, kind));
    outputs.push_back(name);
  };
  if (!opts.debates_path.empty()) emit("debates.json", CorpusKind::Debates);
  if (!opts.users_path.empty()) emit("users.json", CorpusKind::Users);
  if (!opts.trees_path.empty()) emit("trees.json", CorpusKind::Trees);
  write_manifest(opts, "ingest", loaded.digest, outputs);
  std::cout << "ingested " << loaded.corpus.debates.size() << " debates, "
            << loaded.corpus.users.size() << " users, " << loaded.corpus.trees.size()
            << " trees\n";
  return 0;
}

int run_stats(const CommonOpts& opts) {
  LoadedCorpus loaded = load_corpus(opts);
  const Corpus& c = loaded.corpus;
  long ballots = 0, rounds = 0;
  for (const auto& d : c.debates) {
    ballots += static_cast<long>(d.ballots.size());
    rounds += static_cast<long>(d.rounds.size());
  }
  long claims = 0, labeled = 0;
  for (const auto& t : c.trees) {
    claims += static_cast<long>(t.nodes.size());
    for (const auto& [id, node] : t.nodes)
      if (impact_label(node.tally)) ++labeled;
  }
  std::string csv = report_header("stats", opts, loaded.digest);
  csv += "metric,value\n";
  csv += "debates," + std::to_string(c.debates.size()) + "\n";
  csv += "users," + std::to_string(c.users.size()) + "\n";
  csv += "trees," + std::to_string(c.trees.size()) + "\n";
  csv += "ballots," + std::to_string(ballots) + "\n";
  csv += "rounds," + std::to_string(rounds) + "\n";
  csv += "claims," + std::to_string(claims) + "\n";
  csv += "labeled_claims," + std::to_string(labeled) + "\n";
  ensure_out(opts);
  write_file((fs::path(opts.out_dir) / "report.csv").string(), csv);
  write_file((fs::path(opts.out_dir) / "report.txt").string(), csv);
  write_manifest(opts, "stats", loaded.digest, {"report.csv", "report.txt"});
  std::cout << csv;
  return 0;
}

int run_labels(const CommonOpts& opts, const std::string& emit) {
  LoadedCorpus loaded = load_corpus(opts);
  ensure_out(opts);
  std::vector<std::string> outputs;

  if (emit == "voters" || emit == "both") {
    std::string csv = report_header("labels", opts, loaded.digest);
    csv +=
        "debate_id,voter_id,stance_before,stance_after,voter_case,pro_points,con_points,"
        "ballot_winner_points,debate_winner_points,debate_winner_conversion\n";
    for (const auto& d : loaded.corpus.debates) {
      const Winner by_points = winner_by_points(d.ballots);
      const Winner by_conv = winner_by_conversion(d.ballots);
      for (const auto& b : d.ballots) {
        const PointTotals t = point_totals(std::span<const Ballot>(&b, 1));
        csv += csv_escape(d.debate_id) + "," + csv_escape(b.voter_id) + "," +
               to_string(b.stance_before) + "," + to_string(b.stance_after) + "," +
               to_string(voter_case(b)) + "," + std::to_string(t.pro_points) + "," +
               std::to_string(t.con_points) + "," +
               to_string(per_voter_winner(b, WinCriterion::Points)) + "," +
               to_string(by_points) + "," + to_string(by_conv) + "\n";
      }
    }
    write_file((fs::path(opts.out_dir) / "voter_labels.csv").string(), csv);
    outputs.push_back("voter_labels.csv");
  }
  if (emit == "claims" || emit == "both") {
    std::string csv = report_header("labels", opts, loaded.digest);
    csv += "tree_id,claim_id,context_length,votes,agreement5,agreement3,label\n";
    for (const auto& tree : loaded.corpus.trees) {
      for (const auto& [id, node] : tree.nodes) {
        auto label = impact_label(node.tally);
        const long votes = node.tally.total();
        csv += csv_escape(tree.tree_id) + "," + csv_escape(id) + "," +
               std::to_string(context_length(tree, id)) + "," + std::to_string(votes) + "," +
               (votes ? format_double(agreement_score(node.tally), 2) : "") + "," +
               (votes ? format_double(agreement_score3(node.tally), 2) : "") + "," +
               (label ? to_string(*label) : "EXCLUDED") + "\n";
      }
    }
    write_file((fs::path(opts.out_dir) / "claim_labels.csv").string(), csv);
    outputs.push_back("claim_labels.csv");
  }
  if (outputs.empty()) throw UsageError("labels: --emit-labels must be voters, claims or both");
  write_manifest(opts, "labels", loaded.digest, outputs,
                 nlohmann::json{{"emit_labels", emit}});
  return 0;
}

int run_featurize(const CommonOpts& opts, bool with_tfidf,
                  const std::string& sidecar_dir) {
  LoadedCorpus loaded = load_corpus(opts);
  LexiconSet storage;
  const LexiconSet& lex = lexicons_for(opts, storage);
  ensure_out(opts);
  std::vector<std::string> outputs;

  if (!loaded.corpus.debates.empty()) {
    std::optional<TfidfModel> tfidf;
    if (with_tfidf) {
      std::vector<std::string> docs;
      for (const auto& d : loaded.corpus.debates)
        for (Side side : {Side::Pro, Side::Con}) {
          auto text = side_text(d, side);
          if (text) docs.push_back(*text);
        }
      if (!docs.empty()) tfidf = fit_tfidf(docs, 2, 300);
    }
    std::string csv = report_header("featurize", opts, loaded.digest);
    bool wrote_header = false;
    for (const auto& d : loaded.corpus.debates) {
      for (Side side : {Side::Pro, Side::Con}) {
        if (!side_text(d, side)) continue;
        FeatureVector fv = debate_side_features(d, side, lex, tfidf ? &*tfidf : nullptr);
        if (!wrote_header) {
          csv += "debate_id,side";
          for (const auto& name : fv.schema) csv += "," + csv_escape(name);
          csv += "\n";
          wrote_header = true;
        }
        csv += csv_escape(d.debate_id) + std::string(",") + (side == Side::Pro ? "PRO" : "CON");
        for (double v : fv.values) csv += "," + format_double(v);
        csv += "\n";
      }
    }
    write_file((fs::path(opts.out_dir) / "debate_features.csv").string(), csv);
    outputs.push_back("debate_features.csv");
  }

  if (!loaded.corpus.trees.empty()) {
    std::vector<std::string> docs;
    for (const auto& tree : loaded.corpus.trees)
      for (const auto& [id, node] : tree.nodes) docs.push_back(node.text);
    TfidfModel tfidf = fit_tfidf(docs, 2, 2000);
    std::string csv = report_header("featurize", opts, loaded.digest);
    bool wrote_header = false;
    for (const auto& tree : loaded.corpus.trees) {
      for (const auto& [id, node] : tree.nodes) {
        TokenStream stream = tokenize(node.text);
        FeatureVector fv = claim_or_side_features(stream, lex);
        fv.append(tree_features_vector(tree_features(tree, id, tfidf)));
        // POS/NER tags come from one sidecar file per claim when provided;
        // absent files degrade to a zero block with the provenance flag off.
        std::optional<SidecarAnnotation> sidecar;
        if (!sidecar_dir.empty()) {
          fs::path sidecar_path =
              fs::path(sidecar_dir) / (tree.tree_id + "_" + id + ".tsv");
          if (fs::exists(sidecar_path))
            sidecar = parse_sidecar(read_file(sidecar_path.string()));
        }
        fv.append(annotate_sidecar(stream, sidecar));
        if (!tokenize(node.text).tokens.empty()) {
          Readability r = readability(node.text);
          fv.push("flesch", r.flesch);
          fv.push("coleman_liau", r.coleman_liau);
        } else {
          fv.push("flesch", 0.0);
          fv.push("coleman_liau", 0.0);
        }
        if (!wrote_header) {
          csv += "tree_id,claim_id";
          for (const auto& name : fv.schema) csv += "," + csv_escape(name);
          csv += "\n";
          wrote_header = true;
        }
        csv += csv_escape(tree.tree_id) + "," + csv_escape(id);
        for (double v : fv.values) csv += "," + format_double(v);
        csv += "\n";
      }
    }
    write_file((fs::path(opts.out_dir) / "claim_features.csv").string(), csv);
    outputs.push_back("claim_features.csv");
  }
  // Two-component PCA of the stance vectors, for the ideology-cluster
  // analysis. Users with incomplete or withheld stances are skipped.
  if (!loaded.corpus.users.empty()) {
    std::vector<std::string> catalog = detect_catalog(loaded.corpus);
    std::vector<std::vector<double>> rows;
    std::vector<const UserProfile*> kept;
    for (const auto& [id, u] : loaded.corpus.users) {
      try {
        rows.push_back(encode_big_issues(u, catalog).values);
        kept.push_back(&u);
      } catch (const ValidationError&) {
      }
    }
    if (rows.size() >= 3 && rows[0].size() >= 2) {
      PcaResult pca = pca_project(rows, 2);
      std::string csv = report_header("featurize", opts, loaded.digest);
      csv += "user_id,political_ideology,religious_ideology,pc1,pc2\n";
      for (std::size_t i = 0; i < kept.size(); ++i) {
        csv += csv_escape(kept[i]->user_id) + "," +
               csv_escape(kept[i]->political_ideology.value_or("")) + "," +
               csv_escape(kept[i]->religious_ideology.value_or("")) + "," +
               format_double(pca.projected[i][0]) + "," + format_double(pca.projected[i][1]) +
               "\n";
      }
      write_file((fs::path(opts.out_dir) / "big_issues_pca.csv").string(), csv);
      outputs.push_back("big_issues_pca.csv");
    }
  }
  write_manifest(opts, "featurize", loaded.digest, outputs);
  return 0;
}

int run_graph(const CommonOpts& opts) {
  LoadedCorpus loaded = load_corpus(opts);
  ensure_out(opts);
  NetworkFeatureTables tables = compute_network_features(loaded.corpus);
  write_file((fs::path(opts.out_dir) / "friendship.tsv").string(),
             edge_list_tsv(tables.friendship));
  write_file((fs::path(opts.out_dir) / "voter.tsv").string(), edge_list_tsv(tables.voter));

  std::string csv = report_header("graph", opts, loaded.digest);
  csv += "user_id";
  for (const auto& name : user_graph_feature_schema()) csv += "," + name;
  csv += "\n";
  std::set<std::string> node_ids(tables.friendship.nodes.begin(), tables.friendship.nodes.end());
  node_ids.insert(tables.voter.nodes.begin(), tables.voter.nodes.end());
  for (const auto& id : node_ids) {
    FeatureVector fv = user_graph_features(tables, id);
    csv += csv_escape(id);
    for (double v : fv.values) csv += "," + format_double(v, 8);
    csv += "\n";
  }
  write_file((fs::path(opts.out_dir) / "user_graph_features.csv").string(), csv);
  write_manifest(opts, "graph", loaded.digest,
                 {"friendship.tsv", "voter.tsv", "user_graph_features.csv"});
  return 0;
}

struct EvalOpts {
  int folds = 5;
  bool weighted = false;  // weighted logistic regression + weighted metrics
  bool no_grid = false;
  double fixed_c = 1.0;
  std::string penalty = "l2";
};

CvConfig make_cv_config(const CommonOpts& opts, const EvalOpts& ev) {
  CvConfig config;
  config.folds = ev.folds;
  config.inner_grid = !ev.no_grid;
  config.class_weighted = ev.weighted;
  config.averaging = ev.weighted ? Averaging::Weighted : Averaging::Macro;
  config.seed = opts.seed;
  config.jobs = opts.jobs;
  config.fixed.C = ev.fixed_c;
  config.fixed.penalty = ev.penalty == "l1" ? Penalty::L1 : Penalty::L2;
  return config;
}

int run_evaluate(const CommonOpts& opts, const TaskSelector& sel, const EvalOpts& ev) {
  LoadedCorpus loaded = load_corpus(opts);
  LexiconSet storage;
  const LexiconSet& lex = lexicons_for(opts, storage);
  Dataset ds = build_dataset(loaded.corpus, sel, lex, opts.seed);

  CvConfig config = make_cv_config(opts, ev);
  std::string row_name = sel.task + ":" + join(sel.groups, "+");
  AblationReport report = ablation({{row_name, ds}}, config);

  ensure_out(opts);
  const std::string header = report_header("evaluate", opts, loaded.digest);
  write_file((fs::path(opts.out_dir) / "report.csv").string(), ablation_csv(report, header));
  write_file((fs::path(opts.out_dir) / "report.txt").string(),
             ablation_txt(report, "evaluate " + row_name));
  write_manifest(opts, "evaluate", loaded.digest, {"report.csv", "report.txt"},
                 nlohmann::json{{"task", sel.task},
                                {"features", join(sel.groups, ",")},
                                {"folds", ev.folds},
                                {"weighted", ev.weighted}});
  std::cout << ablation_txt(report, "evaluate " + row_name);
  return 0;
}

int run_ablate(const CommonOpts& opts, const TaskSelector& sel, const EvalOpts& ev,
               const std::string& group_spec) {
  LoadedCorpus loaded = load_corpus(opts);
  LexiconSet storage;
  const LexiconSet& lex = lexicons_for(opts, storage);

  std::vector<std::pair<std::string, Dataset>> specs;
  for (const auto& combo : split(group_spec, ';')) {
    if (trim(combo).empty()) continue;
    TaskSelector combo_sel = sel;
    combo_sel.groups.clear();
    for (const auto& g : split(combo, ',')) combo_sel.groups.push_back(trim(g));
    specs.emplace_back(trim(combo), build_dataset(loaded.corpus, combo_sel, lex, opts.seed));
  }
  if (specs.empty()) throw UsageError("ablate: --groups is empty");

  CvConfig config = make_cv_config(opts, ev);
  AblationReport report = ablation(specs, config);

  ensure_out(opts);
  const std::string header = report_header("ablate", opts, loaded.digest);
  write_file((fs::path(opts.out_dir) / "report.csv").string(), ablation_csv(report, header));
  write_file((fs::path(opts.out_dir) / "report.txt").string(),
             ablation_txt(report, "ablation " + sel.task));
  write_manifest(opts, "ablate", loaded.digest, {"report.csv", "report.txt"},
                 nlohmann::json{{"task", sel.task}, {"groups", group_spec}});
  std::cout << ablation_txt(report, "ablation " + sel.task);
  return 0;
}

int run_train(const CommonOpts& opts, const TaskSelector& sel, const EvalOpts& ev,
              const std::string& model_kind, double gamma) {
  LoadedCorpus loaded = load_corpus(opts);
  LexiconSet storage;
  const LexiconSet& lex = lexicons_for(opts, storage);
  Dataset ds = build_dataset(loaded.corpus, sel, lex, opts.seed);
  ensure_out(opts);

  nlohmann::json config_json{{"task", sel.task}, {"model", model_kind}};
  std::vector<std::string> outputs;
  if (model_kind == "logistic") {
    LinearModel model;
    if (!ev.no_grid) {
      GridSearchResult grid = grid_search_cv(ds, {Penalty::L2, Penalty::L1}, default_c_grid(),
                                             3, opts.seed, ev.weighted);
      model = grid.model;
      config_json["best_c"] = grid.best.C;
      config_json["best_penalty"] = grid.best.penalty == Penalty::L2 ? "l2" : "l1";
      config_json["cv_accuracy"] = grid.best_cv_accuracy;
    } else {
      LogisticConfig lc;
      lc.C = ev.fixed_c;
      lc.penalty = ev.penalty == "l1" ? Penalty::L1 : Penalty::L2;
      lc.class_weighted = ev.weighted;
      model = train_logistic(ds, lc);
    }
    write_file((fs::path(opts.out_dir) / "model.json").string(), save_linear_model(model));
    outputs.push_back("model.json");
    // Feature importance: correlations, standardized coefficients and
    // recursive elimination ranks, intersected into one ordering.
    FeatureAnalysisReport analysis = feature_analysis(ds, model);
    std::string fa = report_header("train", opts, loaded.digest);
    fa += "feature,pearson,coef_magnitude,rfe_rank,constant,combined_rank\n";
    for (const auto& row : analysis.rows) {
      fa += csv_escape(row.name) + "," + format_double(row.pearson) + "," +
            format_double(row.coef_magnitude) + "," + std::to_string(row.rfe_rank) + "," +
            (row.constant ? "1" : "0") + "," + format_double(row.combined_rank, 2) + "\n";
    }
    write_file((fs::path(opts.out_dir) / "feature_analysis.csv").string(), fa);
    outputs.push_back("feature_analysis.csv");
    std::cout << "trained logistic model on " << ds.size() << " rows, training accuracy "
              << format_double(model.accuracy(ds), 4) << "\n";
  } else if (model_kind == "rbf") {
    RbfModel model = train_rbf_kernel(ds, gamma, ev.fixed_c);
    write_file((fs::path(opts.out_dir) / "model.json").string(), save_rbf_model(model));
    outputs.push_back("model.json");
    long correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i)
      if (model.predict(ds.rows[i]) == ds.labels[i]) ++correct;
    std::cout << "trained rbf model on " << ds.size() << " rows, training accuracy "
              << format_double(static_cast<double>(correct) / ds.size(), 4) << "\n";
    config_json["gamma"] = gamma;
  } else {
    throw UsageError("unknown model '" + model_kind + "'");
  }
  write_manifest(opts, "train", loaded.digest, outputs, config_json);
  return 0;
}

int run_impact(const CommonOpts& opts, const std::string& model_name, int context_len,
               const std::string& encoder_name, int epochs, double lr, int dim) {
  LoadedCorpus loaded = load_corpus(opts);
  if (loaded.corpus.trees.empty()) throw ValidationError("impact: needs --trees input");

  auto examples = labeled_claims(loaded.corpus.trees);
  if (examples.size() < 10) throw ValidationError("impact: fewer than 10 labeled claims");
  std::vector<int> labels;
  for (const auto& ex : examples) labels.push_back(ex.label);
  SplitIndices split = split_70_15_15(labels, opts.seed);
  auto take = [&](const std::vector<std::size_t>& idx) {
    std::vector<ImpactExample> out;
    for (std::size_t i : idx) out.push_back(examples[i]);
    return out;
  };
  auto train = take(split.train), val = take(split.val), test = take(split.test);

  ImpactModelSpec spec;
  spec.composition = composition_from_string(model_name);
  spec.context_len = context_len;
  spec.encoder.kind = encoder_name == "hashed" ? EncoderKind::HashedNgramAverage
                                               : EncoderKind::BigruAttention;
  spec.encoder.dim = dim;
  spec.encoder.seed = opts.seed;

  TrainConfig config;
  config.epochs = epochs;
  config.lr = lr;
  config.seed = opts.seed;

  ImpactModel model = train_impact(train, val, spec, config);
  auto predictions = predict_impact_all(model, test);
  std::vector<int> preds, golds;
  for (const auto& p : predictions) {
    preds.push_back(p.predicted);
    golds.push_back(p.gold);
  }
  MetricsReport test_metrics = metrics(preds, golds, Averaging::Macro, 3);

  ensure_out(opts);
  write_file((fs::path(opts.out_dir) / "model.json").string(), save_impact_model(model));
  write_file((fs::path(opts.out_dir) / "predictions.csv").string(),
             impact_predictions_csv(predictions));
  std::string csv = report_header("impact", opts, loaded.digest);
  csv += "row,precision,recall,f1,accuracy\n";
  csv += model_name + "," + format_double(100 * test_metrics.precision) + "," +
         format_double(100 * test_metrics.recall) + "," + format_double(100 * test_metrics.f1) +
         "," + format_double(100 * test_metrics.accuracy) + "\n";
  write_file((fs::path(opts.out_dir) / "report.csv").string(), csv);
  write_file((fs::path(opts.out_dir) / "report.txt").string(), csv);
  write_manifest(opts, "impact", loaded.digest,
                 {"model.json", "predictions.csv", "report.csv", "report.txt"},
                 nlohmann::json{{"model", model_name},
                                {"context_len", context_len},
                                {"encoder", encoder_name},
                                {"epochs", epochs}});
  std::cout << "impact " << model_name << " test macro-F1 "
            << format_double(100 * test_metrics.f1, 2) << " on " << test.size() << " claims\n";
  return 0;
}

int run_synth(const CommonOpts& opts, const std::string& preset, SynthConfig config,
              bool trees_overridden) {
  if (preset == "network") {
    config.network_mode = true;
  } else if (preset == "context") {
    SynthConfig base = preset_context(opts.seed);
    base.n_users = config.n_users;
    base.n_debates = config.n_debates;
    base.p_match = config.p_match;
    if (trees_overridden) base.n_trees = config.n_trees;
    base.label_noise = config.label_noise;
    config = base;
  } else if (preset != "ideology") {
    throw UsageError("unknown preset '" + preset + "'");
  }
  config.seed = opts.seed;

  Corpus corpus = gen_debates(config);
  corpus.trees = gen_trees(config);
  ensure_out(opts);
  write_file((fs::path(opts.out_dir) / "debates.json").string(),
             serialize_corpus(corpus, CorpusKind::Debates));
  write_file((fs::path(opts.out_dir) / "users.json").string(),
             serialize_corpus(corpus, CorpusKind::Users));
  write_file((fs::path(opts.out_dir) / "trees.json").string(),
             serialize_corpus(corpus, CorpusKind::Trees));
  write_file((fs::path(opts.out_dir) / "meta.json").string(), synth_meta_json(config));
  write_manifest(opts, "synth", "", {"debates.json", "users.json", "trees.json", "meta.json"},
                 nlohmann::json{{"preset", preset}});
  std::cout << "generated " << corpus.debates.size() << " debates, " << corpus.users.size()
            << " users, " << corpus.trees.size() << " trees\n";
  return 0;
}

int run_report(const std::string& in_dir) {
  const fs::path dir(in_dir);
  if (fs::exists(dir / "manifest.json")) {
    nlohmann::json manifest = nlohmann::json::parse(read_file((dir / "manifest.json").string()));
    std::cout << "run: " << manifest.value("subcommand", "?") << " (kairos "
              << manifest.value("version", "?") << ")\n";
    std::cout << "corpus sha256: " << manifest.value("corpus_sha256", "") << "\n";
    std::cout << "seed: " << manifest.value("seed", 0) << "\n";
  }
  if (fs::exists(dir / "report.txt")) std::cout << read_file((dir / "report.txt").string());
  else if (fs::exists(dir / "report.csv")) std::cout << read_file((dir / "report.csv").string());
  else throw ValidationError("report: no report.txt or report.csv under " + in_dir);
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"kairos: persuasion modeling toolkit for online debates"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file, flags override");

  CommonOpts opts;

  auto* ingest = app.add_subcommand("ingest", "validate corpus files and re-emit canonically");
  add_input_options(ingest, opts);
  add_run_options(ingest, opts);

  auto* stats = app.add_subcommand("stats", "corpus size statistics");
  add_input_options(stats, opts);
  add_run_options(stats, opts);

  auto* labels = app.add_subcommand("labels", "derive winner/voter/impact labels as CSV");
  add_input_options(labels, opts);
  add_run_options(labels, opts);
  std::string emit = "both";
  labels->add_option("--emit-labels", emit,
                     "voters: per (debate, voter) rows with stances, the voter case, single-"
                     "ballot point totals and winners, and whole-debate winners under both "
                     "criteria; claims: per claim rows with context length, vote count, 5- and "
                     "3-class agreement and the filtered impact label; both: emit both files");

  auto* featurize = app.add_subcommand("featurize", "dump linguistic feature vectors as CSV");
  add_input_options(featurize, opts);
  add_run_options(featurize, opts);
  bool feat_tfidf = false;
  featurize->add_flag("--tfidf", feat_tfidf, "append tf-idf blocks to debate features");
  std::string feat_sidecar;
  featurize->add_option("--sidecar-dir", feat_sidecar,
                        "directory of per-claim POS/NER sidecars named "
                        "<tree_id>_<claim_id>.tsv (token<TAB>POS[<TAB>NER] per line)");

  auto* graph = app.add_subcommand("graph", "build friendship/voter networks and export them");
  add_input_options(graph, opts);
  add_run_options(graph, opts);

  TaskSelector train_sel;
  EvalOpts train_ev;
  std::string train_model = "logistic";
  double train_gamma = 1.0;
  auto* train = app.add_subcommand("train", "fit a model on one task's features");
  add_input_options(train, opts);
  add_run_options(train, opts);
  add_task_options(train, train_sel);
  train->add_option("--model", train_model, "logistic|rbf");
  train->add_option("--gamma", train_gamma, "RBF kernel width");
  train->add_option("--c", train_ev.fixed_c, "regularization C");
  train->add_option("--penalty", train_ev.penalty, "l1|l2");
  train->add_flag("--no-grid", train_ev.no_grid, "skip the (penalty, C) grid search");
  train->add_flag("--weighted", train_ev.weighted, "class-weighted training");

  TaskSelector eval_sel;
  EvalOpts eval_ev;
  auto* evaluate = app.add_subcommand("evaluate", "cross-validated evaluation of one task");
  add_input_options(evaluate, opts);
  add_run_options(evaluate, opts);
  add_task_options(evaluate, eval_sel);
  evaluate->add_option("--folds", eval_ev.folds, "outer folds");
  evaluate->add_flag("--weighted", eval_ev.weighted,
                     "weighted logistic regression + weighted metrics");
  evaluate->add_flag("--no-grid", eval_ev.no_grid, "skip the inner grid search");
  evaluate->add_option("--c", eval_ev.fixed_c, "C when --no-grid");
  evaluate->add_option("--penalty", eval_ev.penalty, "penalty when --no-grid");

  TaskSelector ablate_sel;
  EvalOpts ablate_ev;
  std::string ablate_groups;
  auto* ablate = app.add_subcommand("ablate", "ablation table over feature-group combinations");
  add_input_options(ablate, opts);
  add_run_options(ablate, opts);
  add_task_options(ablate, ablate_sel);
  ablate->add_option("--groups", ablate_groups,
                     "semicolon-separated combos, e.g. 'user;linguistic;user,linguistic'")
      ->required();
  ablate->add_option("--folds", ablate_ev.folds, "outer folds");
  ablate->add_flag("--weighted", ablate_ev.weighted, "weighted LR + weighted metrics");
  ablate->add_flag("--no-grid", ablate_ev.no_grid, "skip the inner grid search");
  ablate->add_option("--c", ablate_ev.fixed_c, "C when --no-grid");

  auto* impact = app.add_subcommand("impact", "train/evaluate argument-impact models");
  add_input_options(impact, opts);
  add_run_options(impact, opts);
  std::string impact_model = "claim_only", impact_encoder = "bigru";
  int impact_context = 3, impact_epochs = 10, impact_dim = 32;
  double impact_lr = 0.01;
  impact->add_option("--model", impact_model, "claim_only|claim_parent|flat|attn|gru");
  impact->add_option("--context-len", impact_context, "context length i (1..4)");
  impact->add_option("--encoder", impact_encoder, "bigru|hashed");
  impact->add_option("--epochs", impact_epochs, "training epochs");
  impact->add_option("--lr", impact_lr, "Adam step size");
  impact->add_option("--dim", impact_dim, "encoder width");

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus with planted effects");
  add_run_options(synth, opts);
  std::string preset = "ideology";
  SynthConfig synth_config;
  synth->add_option("--preset", preset, "ideology|network|context");
  synth->add_option("--n-users", synth_config.n_users, "user count");
  synth->add_option("--n-debates", synth_config.n_debates, "debate count");
  synth->add_option("--p-match", synth_config.p_match, "planted prior-belief strength");
  auto* trees_opt = synth->add_option("--n-trees", synth_config.n_trees, "argument tree count");
  synth->add_option("--noise", synth_config.label_noise, "impact label noise");

  auto* report = app.add_subcommand("report", "pretty-print a previous run's outputs");
  std::string report_in;
  report->add_option("--in", report_in, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (ingest->parsed()) return run_ingest(opts);
    if (stats->parsed()) return run_stats(opts);
    if (labels->parsed()) return run_labels(opts, emit);
    if (featurize->parsed()) return run_featurize(opts, feat_tfidf, feat_sidecar);
    if (graph->parsed()) return run_graph(opts);
    if (train->parsed()) return run_train(opts, train_sel, train_ev, train_model, train_gamma);
    if (evaluate->parsed()) return run_evaluate(opts, eval_sel, eval_ev);
    if (ablate->parsed()) return run_ablate(opts, ablate_sel, ablate_ev, ablate_groups);
    if (impact->parsed())
      return run_impact(opts, impact_model, impact_context, impact_encoder, impact_epochs,
                        impact_lr, impact_dim);
    if (synth->parsed()) return run_synth(opts, preset, synth_config, trees_opt->count() > 0);
    if (report->parsed()) return run_report(report_in);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("kairos");
  for (const auto& a : args) argv.push_back(a.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace kairos::cli
