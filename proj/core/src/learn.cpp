#include "kairos/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"
#include "kairos/util.hpp"

namespace kairos {

void Dataset::push_row(std::vector<double> row, int label, double weight) {
  rows.push_back(std::move(row));
  labels.push_back(label);
  weights.push_back(weight);
  num_classes = std::max(num_classes, label + 1);
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.schema = schema;
  out.num_classes = num_classes;
  for (std::size_t i : indices) {
    out.rows.push_back(rows[i]);
    out.labels.push_back(labels[i]);
    if (!weights.empty()) out.weights.push_back(weights[i]);
  }
  return out;
}

void Dataset::validate() const {
  if (rows.size() != labels.size()) throw UsageError("dataset: rows/labels size mismatch");
  if (!weights.empty() && weights.size() != rows.size())
    throw UsageError("dataset: rows/weights size mismatch");
  for (const auto& r : rows)
    if (r.size() != schema.size()) throw UsageError("dataset: row width does not match schema");
  for (int l : labels)
    if (l < 0 || l >= num_classes) throw UsageError("dataset: label out of range");
}

// ---------------------------------------------------------------------------
// Linear model
// ---------------------------------------------------------------------------

namespace {

std::vector<double> standardize_row(std::span<const double> row, const std::vector<double>& mean,
                                    const std::vector<double>& stdev) {
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / stdev[j];
  return out;
}

std::vector<double> softmax(const std::vector<double>& z) {
  double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0;
  for (std::size_t c = 0; c < z.size(); ++c) {
    p[c] = std::exp(z[c] - zmax);
    sum += p[c];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

std::vector<double> LinearModel::scores(std::span<const double> row) const {
  std::vector<double> x = standardize_row(row, mean, stdev);
  std::vector<double> z(num_classes, 0.0);
  for (int c = 0; c < num_classes; ++c) {
    double dot = bias[c];
    for (std::size_t j = 0; j < x.size(); ++j) dot += weights[c][j] * x[j];
    z[c] = dot;
  }
  return z;
}

std::vector<double> LinearModel::predict_proba(std::span<const double> row) const {
  return softmax(scores(row));
}

int LinearModel::predict(std::span<const double> row) const {
  std::vector<double> z = scores(row);
  int best = 0;
  for (int c = 1; c < num_classes; ++c)
    if (z[c] > z[best]) best = c;  // ties keep the lowest class id
  return best;
}

double LinearModel::accuracy(const Dataset& ds) const {
  if (ds.rows.empty()) return 0.0;
  long correct = 0;
  for (std::size_t i = 0; i < ds.rows.size(); ++i)
    if (predict(ds.rows[i]) == ds.labels[i]) ++correct;
  return static_cast<double>(correct) / ds.rows.size();
}

LinearModel train_logistic(const Dataset& ds, const LogisticConfig& config) {
  ds.validate();
  const std::size_t n = ds.rows.size();
  const std::size_t d = ds.schema.size();
  const int K = ds.num_classes;
  if (n == 0) throw UsageError("train_logistic: empty dataset");

  std::vector<long> class_counts(K, 0);
  for (int l : ds.labels) ++class_counts[l];
  int present = 0;
  for (long c : class_counts)
    if (c > 0) ++present;
  if (present < 2) throw UsageError("train_logistic: needs at least 2 classes present");

  LinearModel model;
  model.schema = ds.schema;
  model.num_classes = K;
  model.mean.assign(d, 0.0);
  model.stdev.assign(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0;
    for (const auto& row : ds.rows) sum += row[j];
    model.mean[j] = sum / n;
    double ss = 0;
    for (const auto& row : ds.rows) {
      double v = row[j] - model.mean[j];
      ss += v * v;
    }
    double sd = std::sqrt(ss / n);
    model.stdev[j] = sd > 0 ? sd : 1.0;
  }

  std::vector<std::vector<double>> X(n);
  for (std::size_t i = 0; i < n; ++i) X[i] = standardize_row(ds.rows[i], model.mean, model.stdev);

  // Per-instance weights: optional instance weights times balanced class
  // weights (n / (K * n_k)) when enabled.
  std::vector<double> s(n, 1.0);
  if (!ds.weights.empty()) s = ds.weights;
  if (config.class_weighted) {
    for (std::size_t i = 0; i < n; ++i)
      s[i] *= static_cast<double>(n) / (static_cast<double>(K) * class_counts[ds.labels[i]]);
  }

  std::vector<std::vector<double>> W(K, std::vector<double>(d, 0.0));
  std::vector<double> b(K, 0.0);
  const double C = config.C;
  const bool l2 = config.penalty == Penalty::L2;

  auto objective = [&](const std::vector<std::vector<double>>& W_,
                       const std::vector<double>& b_) {
    double data = 0;
    std::vector<double> z(K);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < K; ++c) {
        double dot = b_[c];
        const auto& wc = W_[c];
        const auto& xi = X[i];
        for (std::size_t j = 0; j < d; ++j) dot += wc[j] * xi[j];
        z[c] = dot;
      }
      double zmax = *std::max_element(z.begin(), z.end());
      double lse = 0;
      for (int c = 0; c < K; ++c) lse += std::exp(z[c] - zmax);
      data += s[i] * (std::log(lse) + zmax - z[ds.labels[i]]);
    }
    double reg = 0;
    for (const auto& wc : W_)
      for (double w : wc) reg += l2 ? 0.5 * w * w : std::fabs(w);
    return C * data + reg;
  };

  auto gradients = [&](const std::vector<std::vector<double>>& W_, const std::vector<double>& b_,
                       std::vector<std::vector<double>>& gW, std::vector<double>& gb) {
    for (auto& g : gW) std::fill(g.begin(), g.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    std::vector<double> z(K);
    for (std::size_t i = 0; i < n; ++i) {
      for (int c = 0; c < K; ++c) {
        double dot = b_[c];
        for (std::size_t j = 0; j < d; ++j) dot += W_[c][j] * X[i][j];
        z[c] = dot;
      }
      std::vector<double> p = softmax(z);
      for (int c = 0; c < K; ++c) {
        double delta = C * s[i] * (p[c] - (ds.labels[i] == c ? 1.0 : 0.0));
        if (delta == 0) continue;
        auto& g = gW[c];
        for (std::size_t j = 0; j < d; ++j) g[j] += delta * X[i][j];
        gb[c] += delta;
      }
    }
    if (l2) {
      for (int c = 0; c < K; ++c)
        for (std::size_t j = 0; j < d; ++j) gW[c][j] += W_[c][j];
    }
  };

  // Proximal gradient descent with backtracking: monotone by construction.
  // Convergence is on the proximal-gradient residual, measured against the
  // natural gradient scale C * sum(s) + max|W| so that tiny C still trains
  // the (unpenalized) bias to optimality.
  std::vector<std::vector<double>> gW(K, std::vector<double>(d)), W_next = W;
  std::vector<double> gb(K), b_next = b;
  double weight_sum = 0;
  for (double si : s) weight_sum += si;
  double step = 1.0 / (1.0 + C * weight_sum);
  double f = objective(W, b);
  if (config.loss_history) config.loss_history->push_back(f);

  for (int iter = 0; iter < config.max_iter; ++iter) {
    gradients(W, b, gW, gb);
    bool accepted = false;
    step *= 2.0;  // allow the step to grow back after conservative iterations
    for (int bt = 0; bt < 80; ++bt) {
      for (int c = 0; c < K; ++c) {
        for (std::size_t j = 0; j < d; ++j) {
          double w = W[c][j] - step * gW[c][j];
          if (!l2) {  // soft-threshold for the l1 penalty
            double t = step;
            w = w > t ? w - t : (w < -t ? w + t : 0.0);
          }
          W_next[c][j] = w;
        }
        b_next[c] = b[c] - step * gb[c];
      }
      double f_next = objective(W_next, b_next);
      if (f_next <= f) {
        accepted = true;
        double residual = 0, wmax = 0;
        for (int c = 0; c < K; ++c) {
          for (std::size_t j = 0; j < d; ++j) {
            residual = std::max(residual, std::fabs(W[c][j] - W_next[c][j]) / step);
            wmax = std::max(wmax, std::fabs(W_next[c][j]));
          }
          residual = std::max(residual, std::fabs(b[c] - b_next[c]) / step);
        }
        W.swap(W_next);
        b.swap(b_next);
        f = f_next;
        if (config.loss_history) config.loss_history->push_back(f);
        if (residual <= config.tol * (C * weight_sum + wmax)) {
          model.weights = W;
          model.bias = b;
          return model;
        }
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // no descent step found: converged to precision
  }
  model.weights = W;
  model.bias = b;
  return model;
}

std::vector<double> default_c_grid() {
  std::vector<double> grid;
  for (int e = -5; e <= 5; ++e) grid.push_back(std::pow(10.0, e));
  return grid;
}

// ---------------------------------------------------------------------------
// Stratified folds + grid search
// ---------------------------------------------------------------------------

std::vector<std::vector<std::size_t>> stratified_fold_indices(const std::vector<int>& labels,
                                                              int k, std::uint64_t seed) {
  if (k < 2) throw UsageError("stratified folds: k must be >= 2");
  int num_classes = 0;
  for (int l : labels) num_classes = std::max(num_classes, l + 1);
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (int c = 0; c < num_classes; ++c) {
    if (!by_class[c].empty() && by_class[c].size() < static_cast<std::size_t>(k))
      throw UsageError("stratified folds: class " + std::to_string(c) + " has " +
                       std::to_string(by_class[c].size()) + " rows for " + std::to_string(k) +
                       " folds");
  }
  Rng rng(seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (int c = 0; c < num_classes; ++c) {
    Rng class_rng = rng.fork(static_cast<std::uint64_t>(c) + 1);
    class_rng.shuffle(by_class[c]);
    for (std::size_t i = 0; i < by_class[c].size(); ++i)
      folds[i % k].push_back(by_class[c][i]);
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

GridSearchResult grid_search_cv(const Dataset& ds, const std::vector<Penalty>& penalties,
                                const std::vector<double>& c_grid, int inner_folds,
                                std::uint64_t seed, bool class_weighted) {
  if (penalties.empty() || c_grid.empty()) throw UsageError("grid_search_cv: empty grid");
  auto folds = stratified_fold_indices(ds.labels, inner_folds, seed);

  // Cells ordered so that ties resolve to smaller C, then l2 before l1.
  std::vector<double> cs = c_grid;
  std::sort(cs.begin(), cs.end());
  std::vector<Penalty> pens = penalties;
  std::sort(pens.begin(), pens.end(),
            [](Penalty a, Penalty b) { return (a == Penalty::L2) > (b == Penalty::L2); });

  GridSearchResult result;
  std::vector<GridSearchResult::Cell> cells;
  for (double c : cs)
    for (Penalty p : pens) cells.push_back({p, c, 0.0});

  for (int f = 0; f < inner_folds; ++f) {
    std::vector<std::size_t> train_idx;
    for (int g = 0; g < inner_folds; ++g)
      if (g != f) train_idx.insert(train_idx.end(), folds[g].begin(), folds[g].end());
    Dataset train = ds.subset(train_idx);
    Dataset held = ds.subset(folds[f]);
    for (auto& cell : cells) {
      LogisticConfig config;
      config.penalty = cell.penalty;
      config.C = cell.C;
      config.class_weighted = class_weighted;
      LinearModel m = train_logistic(train, config);
      ++result.total_fits;
      cell.mean_accuracy += m.accuracy(held) / inner_folds;
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < cells.size(); ++i)
    if (cells[i].mean_accuracy > cells[best].mean_accuracy) best = i;

  result.best.penalty = cells[best].penalty;
  result.best.C = cells[best].C;
  result.best.class_weighted = class_weighted;
  result.best_cv_accuracy = cells[best].mean_accuracy;
  result.model = train_logistic(ds, result.best);
  ++result.total_fits;
  result.cells = std::move(cells);
  return result;
}

// ---------------------------------------------------------------------------
// RBF-kernel classifier
// ---------------------------------------------------------------------------

namespace {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double dist = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double diff = a[j] - b[j];
    dist += diff * diff;
  }
  return std::exp(-gamma * dist);
}

}  // namespace

std::vector<double> RbfModel::scores(std::span<const double> row) const {
  std::vector<double> k(support.size());
  for (std::size_t j = 0; j < support.size(); ++j) k[j] = rbf_kernel(row, support[j], gamma);
  std::vector<double> z(num_classes, 0.0);
  for (int c = 0; c < num_classes; ++c) {
    double dot = bias[c];
    for (std::size_t j = 0; j < support.size(); ++j) dot += alpha[c][j] * k[j];
    z[c] = dot;
  }
  return z;
}

int RbfModel::predict(std::span<const double> row) const {
  std::vector<double> z = scores(row);
  int best = 0;
  for (int c = 1; c < num_classes; ++c)
    if (z[c] > z[best]) best = c;
  return best;
}

RbfModel train_rbf_kernel(const Dataset& ds, double gamma, double C, int max_iter, double tol) {
  ds.validate();
  if (gamma <= 0) throw UsageError("train_rbf_kernel: gamma must be positive");
  const std::size_t n = ds.rows.size();
  const int K = ds.num_classes;
  if (n == 0) throw UsageError("train_rbf_kernel: empty dataset");

  RbfModel model;
  model.gamma = gamma;
  model.support = ds.rows;
  model.num_classes = K;
  model.alpha.assign(K, std::vector<double>(n, 0.0));
  model.bias.assign(K, 0.0);

  std::vector<std::vector<double>> kernel(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      kernel[i][j] = kernel[j][i] = rbf_kernel(ds.rows[i], ds.rows[j], gamma);

  std::vector<double> s(n, 1.0);
  if (!ds.weights.empty()) s = ds.weights;

  auto scores_at = [&](const std::vector<std::vector<double>>& alpha,
                       const std::vector<double>& bias, std::size_t i, std::vector<double>& z) {
    for (int c = 0; c < K; ++c) {
      double dot = bias[c];
      for (std::size_t j = 0; j < n; ++j) dot += alpha[c][j] * kernel[i][j];
      z[c] = dot;
    }
  };

  auto objective = [&](const std::vector<std::vector<double>>& alpha,
                       const std::vector<double>& bias) {
    double data = 0;
    std::vector<double> z(K);
    for (std::size_t i = 0; i < n; ++i) {
      scores_at(alpha, bias, i, z);
      double zmax = *std::max_element(z.begin(), z.end());
      double lse = 0;
      for (int c = 0; c < K; ++c) lse += std::exp(z[c] - zmax);
      data += s[i] * (std::log(lse) + zmax - z[ds.labels[i]]);
    }
    double reg = 0;  // RKHS norm: 0.5 * a^T K a per class
    for (int c = 0; c < K; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        double kai = 0;
        for (std::size_t j = 0; j < n; ++j) kai += kernel[i][j] * alpha[c][j];
        reg += 0.5 * alpha[c][i] * kai;
      }
    }
    return C * data + reg;
  };

  // Preconditioned descent direction d = C * s * (p - y) + alpha; the true
  // gradient is K d, so -d is a descent direction for PSD K.
  std::vector<std::vector<double>> dir(K, std::vector<double>(n));
  std::vector<double> dbias(K);
  std::vector<std::vector<double>> alpha_next = model.alpha;
  std::vector<double> bias_next = model.bias;

  double f = objective(model.alpha, model.bias);
  double step = 1.0 / (1.0 + C * static_cast<double>(n));
  for (int iter = 0; iter < max_iter; ++iter) {
    std::vector<double> z(K);
    for (auto& row : dir) std::fill(row.begin(), row.end(), 0.0);
    std::fill(dbias.begin(), dbias.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      scores_at(model.alpha, model.bias, i, z);
      std::vector<double> p = softmax(z);
      for (int c = 0; c < K; ++c) {
        double delta = C * s[i] * (p[c] - (ds.labels[i] == c ? 1.0 : 0.0));
        dir[c][i] += delta;
        dbias[c] += delta;
      }
    }
    for (int c = 0; c < K; ++c)
      for (std::size_t i = 0; i < n; ++i) dir[c][i] += model.alpha[c][i];

    bool accepted = false;
    step *= 2.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (int c = 0; c < K; ++c) {
        for (std::size_t i = 0; i < n; ++i)
          alpha_next[c][i] = model.alpha[c][i] - step * dir[c][i];
        bias_next[c] = model.bias[c] - step * dbias[c];
      }
      double f_next = objective(alpha_next, bias_next);
      if (f_next <= f) {
        accepted = true;
        model.alpha.swap(alpha_next);
        model.bias.swap(bias_next);
        double rel = std::fabs(f - f_next) / std::max(std::fabs(f), 1e-12);
        f = f_next;
        if (rel < tol) return model;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return model;
}

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

PcaResult pca_project(const std::vector<std::vector<double>>& X, int k) {
  if (X.empty()) throw UsageError("pca_project: empty data");
  const std::size_t n = X.size();
  const std::size_t d = X[0].size();
  if (k < 1 || static_cast<std::size_t>(k) > d)
    throw UsageError("pca_project: k must be in 1..dimension");

  PcaResult result;
  result.mean.assign(d, 0.0);
  for (const auto& row : X)
    for (std::size_t j = 0; j < d; ++j) result.mean[j] += row[j];
  for (double& m : result.mean) m /= n;

  std::vector<std::vector<double>> centered(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) centered[i][j] = X[i][j] - result.mean[j];

  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (int comp = 0; comp < k; ++comp) {
    Rng rng(0x9c0ffee + static_cast<std::uint64_t>(comp));
    std::vector<double> v(d);
    double norm = 0;
    for (std::size_t j = 0; j < d; ++j) {
      v[j] = rng.normal();
      norm += v[j] * v[j];
    }
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;

    double eigenvalue = 0;
    for (int iter = 0; iter < 1000; ++iter) {
      // w = Cov v computed through the data: X^T (X v) / (n-1)
      std::vector<double> u(n, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) u[i] += centered[i][j] * v[j];
      std::vector<double> w(d, 0.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) w[j] += centered[i][j] * u[i];
      for (double& x : w) x /= denom;

      double wnorm = 0;
      for (double x : w) wnorm += x * x;
      wnorm = std::sqrt(wnorm);
      if (wnorm < 1e-300) {
        eigenvalue = 0;  // no variance left
        break;
      }
      double diff = 0;
      for (std::size_t j = 0; j < d; ++j) {
        double next = w[j] / wnorm;
        diff += std::fabs(next - v[j]);
        v[j] = next;
      }
      eigenvalue = wnorm;
      if (diff < 1e-13) break;
    }

    // Sign convention: largest-magnitude entry positive.
    std::size_t arg = 0;
    for (std::size_t j = 1; j < d; ++j)
      if (std::fabs(v[j]) > std::fabs(v[arg])) arg = j;
    if (v[arg] < 0)
      for (double& x : v) x = -x;

    // Deflate the data: remove the recovered direction.
    for (std::size_t i = 0; i < n; ++i) {
      double proj = 0;
      for (std::size_t j = 0; j < d; ++j) proj += centered[i][j] * v[j];
      for (std::size_t j = 0; j < d; ++j) centered[i][j] -= proj * v[j];
    }
    result.components.push_back(v);
    result.eigenvalues.push_back(eigenvalue);
  }

  result.projected.assign(n, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (int c = 0; c < k; ++c) {
      double proj = 0;
      for (std::size_t j = 0; j < d; ++j)
        proj += (X[i][j] - result.mean[j]) * result.components[c][j];
      result.projected[i][c] = proj;
    }
  return result;
}

// ---------------------------------------------------------------------------
// Model (de)serialization
// ---------------------------------------------------------------------------

std::string save_linear_model(const LinearModel& model) {
  nlohmann::json j;
  j["format"] = "kairos-linear";
  j["version"] = 1;
  j["schema"] = model.schema;
  j["num_classes"] = model.num_classes;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["mean"] = model.mean;
  j["stdev"] = model.stdev;
  return j.dump(2) + "\n";
}

std::string save_rbf_model(const RbfModel& model) {
  nlohmann::json j;
  j["format"] = "kairos-rbf";
  j["version"] = 1;
  j["gamma"] = model.gamma;
  j["num_classes"] = model.num_classes;
  j["support"] = model.support;
  j["alpha"] = model.alpha;
  j["bias"] = model.bias;
  return j.dump() + "\n";
}

RbfModel load_rbf_model(const std::string& serialized) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(serialized);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("rbf model load: invalid JSON: ") + e.what());
  }
  if (j.value("format", "") != "kairos-rbf")
    throw ValidationError("rbf model load: not an rbf model dump");
  if (j.value("version", -1) != 1)
    throw ValidationError("rbf model load: unsupported version " +
                          std::to_string(j.value("version", -1)));
  RbfModel model;
  model.gamma = j.at("gamma").get<double>();
  model.num_classes = j.at("num_classes").get<int>();
  model.support = j.at("support").get<std::vector<std::vector<double>>>();
  model.alpha = j.at("alpha").get<std::vector<std::vector<double>>>();
  model.bias = j.at("bias").get<std::vector<double>>();
  if (model.alpha.size() != static_cast<std::size_t>(model.num_classes))
    throw ValidationError("rbf model load: coefficient shape mismatch");
  for (const auto& row : model.alpha)
    if (row.size() != model.support.size())
      throw ValidationError("rbf model load: coefficient/support size mismatch");
  return model;
}

LinearModel load_linear_model(const std::string& serialized) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(serialized);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("model load: invalid JSON: ") + e.what());
  }
  if (j.value("format", "") != "kairos-linear")
    throw ValidationError("model load: not a linear model dump");
  if (j.value("version", -1) != 1)
    throw ValidationError("model load: unsupported version " +
                          std::to_string(j.value("version", -1)));
  LinearModel model;
  model.schema = j.at("schema").get<std::vector<std::string>>();
  model.num_classes = j.at("num_classes").get<int>();
  model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  model.bias = j.at("bias").get<std::vector<double>>();
  model.mean = j.at("mean").get<std::vector<double>>();
  model.stdev = j.at("stdev").get<std::vector<double>>();
  if (model.weights.size() != static_cast<std::size_t>(model.num_classes))
    throw ValidationError("model load: weight shape mismatch");
  for (const auto& row : model.weights)
    if (row.size() != model.schema.size())
      throw ValidationError("model load: weight shape does not match schema");
  return model;
}

}  // namespace kairos
