#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kairos/util.hpp"

namespace kairos {

using Vec = std::vector<double>;

/// Flat parameter block with accumulated gradients.
struct Tensor {
  Vec value;
  Vec grad;

  Tensor() = default;
  explicit Tensor(std::size_t n, double v = 0.0) : value(n, v), grad(n, 0.0) {}
  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), 0.0); }
};

void init_uniform(Tensor& t, double scale, Rng& rng);

// ---------------------------------------------------------------------------
// Layers. Forward passes record whatever backward needs in explicit trace
// objects; backward accumulates parameter gradients and returns input
// gradients.
// ---------------------------------------------------------------------------

struct Embedding {
  Tensor table;  // vocab x dim, row-major
  int vocab = 0, dim = 0;

  Embedding() = default;
  Embedding(int vocab, int dim, Rng& rng);
  Vec row(int id) const;
  void accumulate(int id, const Vec& g);
};

/// N-gram average pooling: the mean of the embedding rows selected by the
/// (already hashed) unigram/n-gram bucket ids. Empty id lists pool to zero.
Vec ngram_average_forward(const Embedding& emb, const std::vector<int>& ids);
void ngram_average_backward(Embedding& emb, const std::vector<int>& ids, const Vec& dout);

struct Linear {
  Tensor W;  // out x in, row-major
  Tensor b;
  int in = 0, out = 0;

  Linear() = default;
  Linear(int in, int out, Rng& rng);
  Vec forward(const Vec& x) const;
  /// Accumulates dW/db and returns dx.
  Vec backward(const Vec& x, const Vec& dout);
};

struct GruCell {
  // z = sigmoid(Wz x + Uz h + bz); r = sigmoid(Wr x + Ur h + br)
  // n = tanh(Wn x + r * (Un h) + bn); h' = (1 - z) * n + z * h
  Tensor Wz, Uz, bz, Wr, Ur, br, Wn, Un, bn;
  int in = 0, hidden = 0;

  GruCell() = default;
  GruCell(int in, int hidden, Rng& rng);

  struct Step {
    Vec x, h_prev, z, r, n, un_h;
  };
  Vec forward(const Vec& x, const Vec& h_prev, Step* step) const;
  /// Given dL/dh', accumulates parameter grads and returns (dx, dh_prev).
  std::pair<Vec, Vec> backward(const Step& step, const Vec& dh);

  std::vector<Tensor*> params();
};

struct GruTrace {
  std::vector<GruCell::Step> steps;
  std::vector<Vec> states;  // h_1..h_T
};

GruTrace gru_forward(const GruCell& cell, const std::vector<Vec>& xs);
/// dstates[t] is dL/dstates[t]; returns per-step input gradients.
std::vector<Vec> gru_backward(GruCell& cell, const GruTrace& trace,
                              const std::vector<Vec>& dstates);

struct BiGru {
  GruCell fwd, bwd;
  int in = 0, hidden = 0;

  BiGru() = default;
  BiGru(int in, int hidden, Rng& rng);
  std::vector<Tensor*> params();
};

struct BiGruTrace {
  GruTrace fwd, bwd;            // bwd runs over the reversed input
  std::vector<Vec> states;      // aligned with input order, dim 2*hidden
};

BiGruTrace bigru_forward(const BiGru& gru, const std::vector<Vec>& xs);
std::vector<Vec> bigru_backward(BiGru& gru, const BiGruTrace& trace,
                                const std::vector<Vec>& dstates);
/// Final states of both directions concatenated: [h_fwd(T), h_bwd(1)].
Vec bigru_final(const BiGruTrace& trace, int hidden);
/// Routes a gradient for bigru_final into a dstates vector shape.
std::vector<Vec> bigru_final_grad(const BiGruTrace& trace, int hidden, const Vec& dfinal);

/// Dot-product attention over a set of vectors with a learned query:
/// alpha = softmax(v_c . q), out = sum alpha_c v_c.
struct AttentionTrace {
  std::vector<Vec> inputs;
  Vec alpha;
  Vec out;
};

AttentionTrace attention_forward(const std::vector<Vec>& inputs, const Vec& query);
/// Accumulates dquery and returns input gradients.
std::vector<Vec> attention_backward(const AttentionTrace& trace, const Vec& query,
                                    const Vec& dout, Vec& dquery);

struct SoftmaxLoss {
  double loss = 0.0;
  Vec probs;
  Vec dlogits(int label) const;
};

SoftmaxLoss softmax_cross_entropy(const Vec& logits, int label);

// ---------------------------------------------------------------------------
// Optimizer
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}
  /// Applies one update from the accumulated gradients, then clears them.
  void step(const std::vector<Tensor*>& params);

 private:
  AdamConfig config_;
  int t_ = 0;
  std::vector<std::pair<Vec, Vec>> moments_;
};

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

/// Central finite differences against the analytic gradient already stored
/// in t.grad. loss_fn must recompute the loss from t.value. Returns the
/// maximum relative error |a - n| / max(|a|, |n|, 1e-8).
double max_relative_gradient_error(Tensor& t, const std::function<double()>& loss_fn,
                                   double eps = 1e-4);

// ---------------------------------------------------------------------------
// Sequence classifier: the trainable composition of the layer inventory
// (hashed n-gram averaged embeddings, or BiGRU with attention pooling,
// followed by a linear head).
// ---------------------------------------------------------------------------

enum class SeqEncoder { NgramAverage, BiGruAttention };

// Defaults mirror the published baseline setups: 100-dim embeddings with
// 64 recurrent units per direction, and n-gram order 2 for the averaged bag.
struct SequenceModelSpec {
  SeqEncoder encoder = SeqEncoder::BiGruAttention;
  int embed_dim = 100;
  int hash_buckets = 4096;
  int ngram_max = 2;  // NgramAverage only
  int hidden = 64;    // per direction
  int num_classes = 2;
  std::uint64_t seed = 1;
};

struct SeqExample {
  std::vector<int> token_ids;
  std::vector<int> segments;  // empty means all segment 0
  int label = 0;
};

using SeqDataset = std::vector<SeqExample>;

struct TrainConfig {
  double lr = 0.01;
  int epochs = 10;
  int batch_size = 32;
  int patience = 3;  // early stop on validation macro-F1
  std::uint64_t seed = 1;
  bool verbose = false;
};

class SequenceClassifier {
 public:
  SequenceClassifier() = default;
  explicit SequenceClassifier(const SequenceModelSpec& spec);

  Vec predict_proba(const SeqExample& ex) const;
  int predict(const SeqExample& ex) const;

  /// One example's loss + full backward pass (gradients accumulate).
  double train_step(const SeqExample& ex);

  std::vector<Tensor*> params();
  const SequenceModelSpec& spec() const { return spec_; }

 private:
  friend SequenceClassifier train_neural(const SequenceModelSpec&, const SeqDataset&,
                                         const SeqDataset&, const TrainConfig&);
  struct Forward;
  Forward run_forward(const SeqExample& ex) const;

  SequenceModelSpec spec_;
  Embedding embedding_;
  Embedding segment_;
  BiGru encoder_gru_;
  Tensor attn_query_;
  Linear head_;
};

/// Mini-batch Adam with early stopping on validation macro-F1 (patience
/// from the config); restores the best parameters. Aborts with diagnostics
/// if the loss goes non-finite.
SequenceClassifier train_neural(const SequenceModelSpec& spec, const SeqDataset& train,
                                const SeqDataset& val, const TrainConfig& config);

/// Stable token hashing into [0, buckets).
int hash_token(const std::string& token, int buckets, std::uint64_t salt = 0);
/// Hash of an n-gram of already-hashed ids.
int hash_ngram(const std::vector<int>& ids, std::size_t begin, std::size_t len, int buckets);

/// Macro-averaged F1 used for early stopping.
double macro_f1(const std::vector<int>& preds, const std::vector<int>& golds, int num_classes);

}  // namespace kairos
