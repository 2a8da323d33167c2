#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kairos/feature_vector.hpp"

namespace kairos {

struct Dataset {
  std::vector<std::string> schema;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;            // in 0..num_classes-1
  std::vector<double> weights;        // optional instance weights (empty = 1.0)
  int num_classes = 0;

  std::size_t size() const { return rows.size(); }
  void push_row(std::vector<double> row, int label, double weight = 1.0);
  Dataset subset(std::span<const std::size_t> indices) const;
  void validate() const;
};

enum class Penalty { L1, L2 };

/// Multinomial logistic model over standardized features. Prediction is the
/// argmax of the affine scores; ties resolve to the lowest class id.
struct LinearModel {
  std::vector<std::string> schema;
  int num_classes = 0;
  std::vector<std::vector<double>> weights;  // class x feature, standardized space
  std::vector<double> bias;                  // per class
  std::vector<double> mean, stdev;           // standardization from training folds

  std::vector<double> scores(std::span<const double> row) const;
  std::vector<double> predict_proba(std::span<const double> row) const;
  int predict(std::span<const double> row) const;
  double accuracy(const Dataset& ds) const;
};

struct LogisticConfig {
  Penalty penalty = Penalty::L2;
  double C = 1.0;
  bool class_weighted = false;
  int max_iter = 500;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::vector<double>* loss_history = nullptr;  // objective after each accepted step
};

/// Minimizes C * sum_i s_i * cross_entropy_i + penalty(W) by monotone
/// proximal gradient descent with backtracking. Class weights are
/// proportional to inverse class frequency when enabled. Deterministic.
LinearModel train_logistic(const Dataset& ds, const LogisticConfig& config);

/// Regularization grid: powers of 10 from 1e-5 to 1e5.
std::vector<double> default_c_grid();

/// Label-stratified, seeded, disjoint and exhaustive fold assignment.
/// Throws when any present class has fewer rows than folds.
std::vector<std::vector<std::size_t>> stratified_fold_indices(const std::vector<int>& labels,
                                                              int k, std::uint64_t seed);

struct GridSearchResult {
  LogisticConfig best;
  LinearModel model;                   // refit on the full training data
  double best_cv_accuracy = 0.0;
  long total_fits = 0;
  struct Cell {
    Penalty penalty;
    double C;
    double mean_accuracy;
  };
  std::vector<Cell> cells;
};

/// Inner stratified cross-validation over (penalty, C). The highest mean
/// accuracy wins; ties prefer the smaller C, then L2 over L1.
GridSearchResult grid_search_cv(const Dataset& ds, const std::vector<Penalty>& penalties,
                                const std::vector<double>& c_grid, int inner_folds,
                                std::uint64_t seed, bool class_weighted = false);

/// Kernel logistic regression over K(x, z) = exp(-gamma * ||x - z||^2) with
/// the RKHS penalty 0.5 * a^T K a. Requires gamma > 0 and an n x n kernel.
struct RbfModel {
  double gamma = 1.0;
  std::vector<std::vector<double>> support;  // training rows
  std::vector<std::vector<double>> alpha;    // class x support coefficients
  std::vector<double> bias;
  int num_classes = 0;

  std::vector<double> scores(std::span<const double> row) const;
  int predict(std::span<const double> row) const;
};

RbfModel train_rbf_kernel(const Dataset& ds, double gamma, double C, int max_iter = 2000,
                          double tol = 1e-10);

struct PcaResult {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // k x d, unit norm
  std::vector<double> eigenvalues;              // descending
  std::vector<std::vector<double>> projected;   // n x k
};

/// Top-k principal components by power iteration with deflation.
/// Component signs are fixed by making the largest-magnitude entry
/// positive. Throws when k exceeds the data dimension.
PcaResult pca_project(const std::vector<std::vector<double>>& X, int k = 2);

/// Model (de)serialization: versioned JSON parameter dump. Loading refuses
/// mismatched schema versions.
std::string save_linear_model(const LinearModel& model);
LinearModel load_linear_model(const std::string& serialized);
std::string save_rbf_model(const RbfModel& model);
RbfModel load_rbf_model(const std::string& serialized);

}  // namespace kairos
