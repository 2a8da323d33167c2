#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kairos/corpus.hpp"
#include "kairos/graph.hpp"
#include "kairos/labeling.hpp"
#include "kairos/learn.hpp"
#include "kairos/textfeat.hpp"

namespace kairos {

// ---------------------------------------------------------------------------
// Splits
// ---------------------------------------------------------------------------

struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

/// Stratified 70/15/15 split, seeded, disjoint and exhaustive.
/// Requires >= 10 rows and >= 3 rows per class.
SplitIndices split_70_15_15(const std::vector<int>& labels, std::uint64_t seed);

/// Stratified k-fold (see learn::stratified_fold_indices).
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& labels, int k,
                                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pair construction
// ---------------------------------------------------------------------------

struct TaskRow {
  const Debate* debate = nullptr;
  const Ballot* ballot = nullptr;
  Winner label = Winner::Tie;  // PRO or CON in emitted rows
};

/// Debates whose debaters declare differing religious ideologies; voters
/// declaring one of the two who changed their stance. Label: which side
/// did the convincing (conversion criterion).
std::vector<TaskRow> task1_pairs(const Corpus& corpus,
                                 const std::optional<std::string>& category = std::nullopt);

/// Debates whose debaters declare differing political ideologies; voters
/// declaring either ideology regardless of stance change. Label: which
/// side this voter assigned more points; per-voter ties are dropped.
std::vector<TaskRow> task2_pairs(const Corpus& corpus,
                                 const std::optional<std::string>& category = std::nullopt);

/// Best accuracy any debate-level-constant predictor can reach on these
/// rows (the classifier must emit one prediction per debate); ties between
/// per-debate label counts are counted as incorrect for the minority side.
double language_only_accuracy_ceiling(const std::vector<TaskRow>& rows);

struct SettingPair {
  std::string first, second;
  int label = 0;  // index (0/1) of the successful user in presentation order
  int debate_count = 0;
};

/// Successful-vs-unsuccessful user pairs matched on debate count; success
/// classes computed over lifetime stages 2+3, the stage-1 rate acting as
/// the success prior. Setting 2 keeps pairs with both priors <= 0.3,
/// setting 3 with both >= 0.7. Presentation order within a pair is
/// randomized (seeded) after canonical ordering.
std::vector<SettingPair> setting_pairs(const Corpus& corpus, int setting, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Feature assembly for the prediction tasks
// ---------------------------------------------------------------------------

struct TaskFeatureConfig {
  bool user = true;
  bool linguistic = false;
  bool tfidf = false;
  std::size_t tfidf_max_features = 300;
  std::vector<std::string> catalog;   // big-issue catalog for opinion similarity
  std::vector<std::string> include;   // when non-empty, keep only these columns
};

Dataset build_task_dataset(const Corpus& corpus, const std::vector<TaskRow>& rows,
                           const TaskFeatureConfig& config, const LexiconSet& lexicons);

struct SettingFeatureConfig {
  bool participation = false;
  bool graph = false;
  bool traits = false;
  bool language = false;
  bool interplay = false;
  std::vector<std::string> catalog;
  std::vector<std::string> include;
};

Dataset build_setting_dataset(const Corpus& corpus, const std::vector<SettingPair>& pairs,
                              const SettingFeatureConfig& config, const LexiconSet& lexicons);

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

enum class Averaging { Macro, Weighted };

struct ClassMetrics {
  double precision = 0, recall = 0, f1 = 0;
  long support = 0;
};

struct MetricsReport {
  double accuracy = 0;
  double precision = 0, recall = 0, f1 = 0;  // averaged
  std::vector<ClassMetrics> per_class;
  std::vector<std::string> warnings;
};

/// Standard multi-class metrics. Under macro averaging, classes absent
/// from the golds contribute zero and produce a warning. Weighted
/// averaging weights by gold-class frequency.
MetricsReport metrics(const std::vector<int>& preds, const std::vector<int>& golds,
                      Averaging averaging, int num_classes = 0);

// ---------------------------------------------------------------------------
// Significance
// ---------------------------------------------------------------------------

/// Continuity-corrected McNemar test on the discordant counts of two
/// paired prediction vectors; returns (statistic, p). b + c == 0 gives p = 1.
std::pair<double, double> mcnemar(const std::vector<int>& preds_a,
                                  const std::vector<int>& preds_b,
                                  const std::vector<int>& golds);

/// Welch two-sample two-sided t-test; returns (t, p).
/// Throws when both samples have zero variance.
std::pair<double, double> t_test_two_sided(const std::vector<double>& a,
                                           const std::vector<double>& b);

/// Upper-tail probability of the chi-squared distribution with 1 df.
double chi2_sf_1df(double x);
/// Two-sided p for a t statistic with the given degrees of freedom.
double t_sf_two_sided(double t, double df);

// ---------------------------------------------------------------------------
// Feature analysis
// ---------------------------------------------------------------------------

struct FeatureAnalysisRow {
  std::string name;
  double pearson = 0.0;         // correlation of feature with the label
  double coef_magnitude = 0.0;  // standardized coefficient norm
  int rfe_rank = 0;             // 1 = eliminated last
  bool constant = false;        // correlation undefined
  double combined_rank = 0.0;
};

struct FeatureAnalysisReport {
  std::vector<FeatureAnalysisRow> rows;  // sorted by combined rank, best first
};

/// Pearson correlations, standardized coefficient magnitudes, and
/// recursive-feature-elimination ranks (iteratively dropping the
/// lowest-|coefficient| feature and refitting), intersected into one
/// combined ranking.
FeatureAnalysisReport feature_analysis(const Dataset& ds, const LinearModel& model,
                                       const LogisticConfig& refit_config = {});

// ---------------------------------------------------------------------------
// Cross-validation + ablation
// ---------------------------------------------------------------------------

struct CvConfig {
  int folds = 5;
  bool inner_grid = true;  // grid-search (penalty, C) inside each training fold
  std::vector<Penalty> penalties = {Penalty::L2, Penalty::L1};
  std::vector<double> c_grid = default_c_grid();
  int inner_folds = 3;
  bool class_weighted = false;
  Averaging averaging = Averaging::Macro;
  LogisticConfig fixed;  // used when inner_grid is false
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct CvResult {
  std::vector<MetricsReport> fold_metrics;
  std::vector<int> pooled_preds;  // aligned with the dataset rows
  double accuracy_mean = 0, accuracy_std = 0;
  double precision_mean = 0, precision_std = 0;
  double recall_mean = 0, recall_std = 0;
  double f1_mean = 0, f1_std = 0;
};

CvResult cross_validate(const Dataset& ds, const CvConfig& config);

/// Per-fold majority-class predictor, the mandatory baseline row.
CvResult majority_cv(const Dataset& ds, const CvConfig& config);

struct AblationRow {
  std::string name;
  CvResult result;
  double p_vs_baseline = 1.0;
  std::string stars;  // "", "*", "**", "***" at p < .05/.01/.001
};

struct AblationReport {
  std::vector<AblationRow> rows;  // row 0 is always the majority baseline
};

AblationReport ablation(const std::vector<std::pair<std::string, Dataset>>& specs,
                        const CvConfig& config, const std::string& baseline_name = "majority");

const char* to_string(Averaging a);

}  // namespace kairos
