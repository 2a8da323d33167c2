#include "kairos/neural.hpp"

#include <algorithm>
#include <cmath>

namespace kairos {

void init_uniform(Tensor& t, double scale, Rng& rng) {
  for (double& v : t.value) v = rng.uniform(-scale, scale);
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec softmax_vec(const Vec& z) {
  double zmax = *std::max_element(z.begin(), z.end());
  Vec p(z.size());
  double sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - zmax);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Embedding
// ---------------------------------------------------------------------------

Embedding::Embedding(int vocab_, int dim_, Rng& rng)
    : table(static_cast<std::size_t>(vocab_) * dim_), vocab(vocab_), dim(dim_) {
  init_uniform(table, 1.0 / std::sqrt(static_cast<double>(dim_)), rng);
}

Vec Embedding::row(int id) const {
  Vec out(dim);
  const double* src = table.value.data() + static_cast<std::size_t>(id) * dim;
  std::copy(src, src + dim, out.begin());
  return out;
}

void Embedding::accumulate(int id, const Vec& g) {
  double* dst = table.grad.data() + static_cast<std::size_t>(id) * dim;
  for (int j = 0; j < dim; ++j) dst[j] += g[j];
}

Vec ngram_average_forward(const Embedding& emb, const std::vector<int>& ids) {
  Vec out(emb.dim, 0.0);
  if (ids.empty()) return out;
  for (int id : ids) {
    const double* src = emb.table.value.data() + static_cast<std::size_t>(id) * emb.dim;
    for (int j = 0; j < emb.dim; ++j) out[j] += src[j];
  }
  for (double& v : out) v /= static_cast<double>(ids.size());
  return out;
}

void ngram_average_backward(Embedding& emb, const std::vector<int>& ids, const Vec& dout) {
  if (ids.empty()) return;
  const double scale = 1.0 / static_cast<double>(ids.size());
  for (int id : ids) {
    double* dst = emb.table.grad.data() + static_cast<std::size_t>(id) * emb.dim;
    for (int j = 0; j < emb.dim; ++j) dst[j] += scale * dout[j];
  }
}

// ---------------------------------------------------------------------------
// Linear
// ---------------------------------------------------------------------------

Linear::Linear(int in_, int out_, Rng& rng)
    : W(static_cast<std::size_t>(in_) * out_), b(out_), in(in_), out(out_) {
  init_uniform(W, 1.0 / std::sqrt(static_cast<double>(in_)), rng);
}

Vec Linear::forward(const Vec& x) const {
  Vec y(out);
  for (int o = 0; o < out; ++o) {
    const double* w = W.value.data() + static_cast<std::size_t>(o) * in;
    double dot = b.value[o];
    for (int j = 0; j < in; ++j) dot += w[j] * x[j];
    y[o] = dot;
  }
  return y;
}

Vec Linear::backward(const Vec& x, const Vec& dout) {
  Vec dx(in, 0.0);
  for (int o = 0; o < out; ++o) {
    const double g = dout[o];
    double* dw = W.grad.data() + static_cast<std::size_t>(o) * in;
    const double* w = W.value.data() + static_cast<std::size_t>(o) * in;
    for (int j = 0; j < in; ++j) {
      dw[j] += g * x[j];
      dx[j] += g * w[j];
    }
    b.grad[o] += g;
  }
  return dx;
}

// ---------------------------------------------------------------------------
// GRU
// ---------------------------------------------------------------------------

GruCell::GruCell(int in_, int hidden_, Rng& rng)
    : Wz(static_cast<std::size_t>(hidden_) * in_),
      Uz(static_cast<std::size_t>(hidden_) * hidden_),
      bz(hidden_),
      Wr(static_cast<std::size_t>(hidden_) * in_),
      Ur(static_cast<std::size_t>(hidden_) * hidden_),
      br(hidden_),
      Wn(static_cast<std::size_t>(hidden_) * in_),
      Un(static_cast<std::size_t>(hidden_) * hidden_),
      bn(hidden_),
      in(in_),
      hidden(hidden_) {
  const double sx = 1.0 / std::sqrt(static_cast<double>(in_));
  const double sh = 1.0 / std::sqrt(static_cast<double>(hidden_));
  init_uniform(Wz, sx, rng);
  init_uniform(Uz, sh, rng);
  init_uniform(Wr, sx, rng);
  init_uniform(Ur, sh, rng);
  init_uniform(Wn, sx, rng);
  init_uniform(Un, sh, rng);
}

std::vector<Tensor*> GruCell::params() { return {&Wz, &Uz, &bz, &Wr, &Ur, &br, &Wn, &Un, &bn}; }

namespace {

inline void affine(const Tensor& W, const Vec& x, int rows, int cols, Vec& out) {
  for (int r = 0; r < rows; ++r) {
    const double* w = W.value.data() + static_cast<std::size_t>(r) * cols;
    double dot = 0;
    for (int c = 0; c < cols; ++c) dot += w[c] * x[c];
    out[r] += dot;
  }
}

inline void affine_backward(Tensor& W, const Vec& x, const Vec& dout, int rows, int cols,
                            Vec& dx) {
  for (int r = 0; r < rows; ++r) {
    const double g = dout[r];
    double* dw = W.grad.data() + static_cast<std::size_t>(r) * cols;
    const double* w = W.value.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) {
      dw[c] += g * x[c];
      dx[c] += g * w[c];
    }
  }
}

}  // namespace

Vec GruCell::forward(const Vec& x, const Vec& h_prev, Step* step) const {
  Vec z(hidden, 0.0), r(hidden, 0.0), a_n(hidden, 0.0), un_h(hidden, 0.0);
  for (int i = 0; i < hidden; ++i) {
    z[i] = bz.value[i];
    r[i] = br.value[i];
  }
  affine(Wz, x, hidden, in, z);
  affine(Uz, h_prev, hidden, hidden, z);
  affine(Wr, x, hidden, in, r);
  affine(Ur, h_prev, hidden, hidden, r);
  for (int i = 0; i < hidden; ++i) {
    z[i] = sigmoid(z[i]);
    r[i] = sigmoid(r[i]);
  }
  affine(Un, h_prev, hidden, hidden, un_h);
  for (int i = 0; i < hidden; ++i) a_n[i] = bn.value[i] + r[i] * un_h[i];
  affine(Wn, x, hidden, in, a_n);
  Vec n(hidden), h(hidden);
  for (int i = 0; i < hidden; ++i) {
    n[i] = std::tanh(a_n[i]);
    h[i] = (1.0 - z[i]) * n[i] + z[i] * h_prev[i];
  }
  if (step) {
    step->x = x;
    step->h_prev = h_prev;
    step->z = z;
    step->r = r;
    step->n = n;
    step->un_h = un_h;
  }
  return h;
}

std::pair<Vec, Vec> GruCell::backward(const Step& step, const Vec& dh) {
  Vec dx(in, 0.0), dh_prev(hidden, 0.0);
  Vec da_n(hidden), da_z(hidden), da_r(hidden), dun_h(hidden);
  for (int i = 0; i < hidden; ++i) {
    const double dn = dh[i] * (1.0 - step.z[i]);
    const double dz = dh[i] * (step.h_prev[i] - step.n[i]);
    dh_prev[i] += dh[i] * step.z[i];
    da_n[i] = dn * (1.0 - step.n[i] * step.n[i]);
    const double dr = da_n[i] * step.un_h[i];
    dun_h[i] = da_n[i] * step.r[i];
    da_z[i] = dz * step.z[i] * (1.0 - step.z[i]);
    da_r[i] = dr * step.r[i] * (1.0 - step.r[i]);
  }
  affine_backward(Wn, step.x, da_n, hidden, in, dx);
  affine_backward(Un, step.h_prev, dun_h, hidden, hidden, dh_prev);
  affine_backward(Wz, step.x, da_z, hidden, in, dx);
  affine_backward(Uz, step.h_prev, da_z, hidden, hidden, dh_prev);
  affine_backward(Wr, step.x, da_r, hidden, in, dx);
  affine_backward(Ur, step.h_prev, da_r, hidden, hidden, dh_prev);
  for (int i = 0; i < hidden; ++i) {
    bn.grad[i] += da_n[i];
    bz.grad[i] += da_z[i];
    br.grad[i] += da_r[i];
  }
  return {dx, dh_prev};
}

GruTrace gru_forward(const GruCell& cell, const std::vector<Vec>& xs) {
  GruTrace trace;
  trace.steps.resize(xs.size());
  trace.states.resize(xs.size());
  Vec h(cell.hidden, 0.0);
  for (std::size_t t = 0; t < xs.size(); ++t) {
    h = cell.forward(xs[t], h, &trace.steps[t]);
    trace.states[t] = h;
  }
  return trace;
}

std::vector<Vec> gru_backward(GruCell& cell, const GruTrace& trace,
                              const std::vector<Vec>& dstates) {
  const std::size_t T = trace.steps.size();
  std::vector<Vec> dxs(T);
  Vec dh(cell.hidden, 0.0);
  for (std::size_t t = T; t-- > 0;) {
    for (int i = 0; i < cell.hidden; ++i) dh[i] += dstates[t][i];
    auto [dx, dh_prev] = cell.backward(trace.steps[t], dh);
    dxs[t] = std::move(dx);
    dh = std::move(dh_prev);
  }
  return dxs;
}

BiGru::BiGru(int in_, int hidden_, Rng& rng) : in(in_), hidden(hidden_) {
  Rng rf = rng.fork(0xf0);
  Rng rb = rng.fork(0xb0);
  fwd = GruCell(in_, hidden_, rf);
  bwd = GruCell(in_, hidden_, rb);
}

std::vector<Tensor*> BiGru::params() {
  auto p = fwd.params();
  auto q = bwd.params();
  p.insert(p.end(), q.begin(), q.end());
  return p;
}

BiGruTrace bigru_forward(const BiGru& gru, const std::vector<Vec>& xs) {
  BiGruTrace trace;
  trace.fwd = gru_forward(gru.fwd, xs);
  std::vector<Vec> rev(xs.rbegin(), xs.rend());
  trace.bwd = gru_forward(gru.bwd, rev);
  const std::size_t T = xs.size();
  trace.states.resize(T);
  for (std::size_t t = 0; t < T; ++t) {
    Vec s(2 * gru.hidden);
    std::copy(trace.fwd.states[t].begin(), trace.fwd.states[t].end(), s.begin());
    const Vec& back = trace.bwd.states[T - 1 - t];
    std::copy(back.begin(), back.end(), s.begin() + gru.hidden);
    trace.states[t] = std::move(s);
  }
  return trace;
}

std::vector<Vec> bigru_backward(BiGru& gru, const BiGruTrace& trace,
                                const std::vector<Vec>& dstates) {
  const std::size_t T = dstates.size();
  std::vector<Vec> d_fwd(T, Vec(gru.hidden, 0.0)), d_bwd(T, Vec(gru.hidden, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    for (int i = 0; i < gru.hidden; ++i) {
      d_fwd[t][i] = dstates[t][i];
      d_bwd[T - 1 - t][i] = dstates[t][gru.hidden + i];
    }
  }
  std::vector<Vec> dx_fwd = gru_backward(gru.fwd, trace.fwd, d_fwd);
  std::vector<Vec> dx_bwd_rev = gru_backward(gru.bwd, trace.bwd, d_bwd);
  std::vector<Vec> dxs(T, Vec(gru.in, 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    for (int j = 0; j < gru.in; ++j)
      dxs[t][j] = dx_fwd[t][j] + dx_bwd_rev[T - 1 - t][j];
  }
  return dxs;
}

Vec bigru_final(const BiGruTrace& trace, int hidden) {
  Vec out(2 * hidden, 0.0);
  if (trace.states.empty()) return out;
  const Vec& first = trace.states.front();
  const Vec& last = trace.states.back();
  // Forward direction ends at the last step, backward at the first.
  std::copy(last.begin(), last.begin() + hidden, out.begin());
  std::copy(first.begin() + hidden, first.end(), out.begin() + hidden);
  return out;
}

std::vector<Vec> bigru_final_grad(const BiGruTrace& trace, int hidden, const Vec& dfinal) {
  std::vector<Vec> dstates(trace.states.size(), Vec(2 * hidden, 0.0));
  if (dstates.empty()) return dstates;
  for (int i = 0; i < hidden; ++i) {
    dstates.back()[i] = dfinal[i];
    dstates.front()[hidden + i] = dfinal[hidden + i];
  }
  return dstates;
}

// ---------------------------------------------------------------------------
// Attention
// ---------------------------------------------------------------------------

AttentionTrace attention_forward(const std::vector<Vec>& inputs, const Vec& query) {
  if (inputs.empty()) throw UsageError("attention: empty context");
  AttentionTrace trace;
  trace.inputs = inputs;
  Vec scores(inputs.size());
  for (std::size_t c = 0; c < inputs.size(); ++c) {
    double dot = 0;
    for (std::size_t j = 0; j < query.size(); ++j) dot += inputs[c][j] * query[j];
    scores[c] = dot;
  }
  trace.alpha = softmax_vec(scores);
  trace.out.assign(query.size(), 0.0);
  for (std::size_t c = 0; c < inputs.size(); ++c)
    for (std::size_t j = 0; j < query.size(); ++j)
      trace.out[j] += trace.alpha[c] * inputs[c][j];
  return trace;
}

std::vector<Vec> attention_backward(const AttentionTrace& trace, const Vec& query,
                                    const Vec& dout, Vec& dquery) {
  const std::size_t n = trace.inputs.size();
  const std::size_t d = query.size();
  std::vector<Vec> dinputs(n, Vec(d, 0.0));
  Vec dalpha(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      dalpha[c] += dout[j] * trace.inputs[c][j];
      dinputs[c][j] += trace.alpha[c] * dout[j];
    }
  }
  double dot = 0;
  for (std::size_t c = 0; c < n; ++c) dot += trace.alpha[c] * dalpha[c];
  for (std::size_t c = 0; c < n; ++c) {
    const double dscore = trace.alpha[c] * (dalpha[c] - dot);
    for (std::size_t j = 0; j < d; ++j) {
      dinputs[c][j] += dscore * query[j];
      dquery[j] += dscore * trace.inputs[c][j];
    }
  }
  return dinputs;
}

SoftmaxLoss softmax_cross_entropy(const Vec& logits, int label) {
  SoftmaxLoss out;
  out.probs = softmax_vec(logits);
  out.loss = -std::log(std::max(out.probs[label], 1e-300));
  return out;
}

Vec SoftmaxLoss::dlogits(int label) const {
  Vec d = probs;
  d[label] -= 1.0;
  return d;
}

// ---------------------------------------------------------------------------
// Adam
// ---------------------------------------------------------------------------

void Adam::step(const std::vector<Tensor*>& params) {
  if (moments_.empty()) {
    for (const Tensor* t : params) moments_.emplace_back(Vec(t->size(), 0.0), Vec(t->size(), 0.0));
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(config_.beta1, t_);
  const double bc2 = 1.0 - std::pow(config_.beta2, t_);
  for (std::size_t p = 0; p < params.size(); ++p) {
    Tensor& t = *params[p];
    auto& [m, v] = moments_[p];
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double g = t.grad[i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      t.value[i] -= config_.lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + config_.eps);
    }
    t.zero_grad();
  }
}

// ---------------------------------------------------------------------------
// Gradient checking
// ---------------------------------------------------------------------------

double max_relative_gradient_error(Tensor& t, const std::function<double()>& loss_fn,
                                   double eps) {
  double max_err = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double saved = t.value[i];
    t.value[i] = saved + eps;
    const double f_plus = loss_fn();
    t.value[i] = saved - eps;
    const double f_minus = loss_fn();
    t.value[i] = saved;
    const double numeric = (f_plus - f_minus) / (2.0 * eps);
    const double analytic = t.grad[i];
    const double err = std::fabs(analytic - numeric) /
                       std::max({std::fabs(analytic), std::fabs(numeric), 1e-8});
    max_err = std::max(max_err, err);
  }
  return max_err;
}

// ---------------------------------------------------------------------------
// Sequence classifier
// ---------------------------------------------------------------------------

int hash_token(const std::string& token, int buckets, std::uint64_t salt) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ salt;
  for (unsigned char c : token) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return static_cast<int>(h % static_cast<std::uint64_t>(buckets));
}

int hash_ngram(const std::vector<int>& ids, std::size_t begin, std::size_t len, int buckets) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL + len;
  for (std::size_t k = 0; k < len; ++k) {
    h ^= static_cast<std::uint64_t>(ids[begin + k]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xc2b2ae3d27d4eb4fULL;
  }
  h ^= h >> 29;
  return static_cast<int>(h % static_cast<std::uint64_t>(buckets));
}

double macro_f1(const std::vector<int>& preds, const std::vector<int>& golds, int num_classes) {
  std::vector<long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (preds[i] == golds[i]) ++tp[preds[i]];
    else {
      ++fp[preds[i]];
      ++fn[golds[i]];
    }
  }
  double f1_sum = 0;
  for (int c = 0; c < num_classes; ++c) {
    const double p = tp[c] + fp[c] > 0 ? static_cast<double>(tp[c]) / (tp[c] + fp[c]) : 0.0;
    const double r = tp[c] + fn[c] > 0 ? static_cast<double>(tp[c]) / (tp[c] + fn[c]) : 0.0;
    f1_sum += p + r > 0 ? 2.0 * p * r / (p + r) : 0.0;
  }
  return f1_sum / num_classes;
}

struct SequenceClassifier::Forward {
  std::vector<Vec> xs;               // embedded inputs (BiGru path)
  std::vector<int> avg_ids;          // bucket ids (NgramAverage path)
  std::vector<int> avg_segments;     // segment per averaged id
  Vec encoded;
  BiGruTrace gru_trace;
  AttentionTrace attn_trace;
  Vec logits;
};

SequenceClassifier::SequenceClassifier(const SequenceModelSpec& spec) : spec_(spec) {
  Rng rng(spec.seed);
  Rng re = rng.fork(1), rs = rng.fork(2), rg = rng.fork(3), rq = rng.fork(4), rh = rng.fork(5);
  embedding_ = Embedding(spec.hash_buckets, spec.embed_dim, re);
  segment_ = Embedding(2, spec.embed_dim, rs);
  int enc_dim = spec.embed_dim;
  if (spec.encoder == SeqEncoder::BiGruAttention) {
    encoder_gru_ = BiGru(spec.embed_dim, spec.hidden, rg);
    attn_query_ = Tensor(2 * spec.hidden);
    init_uniform(attn_query_, 1.0 / std::sqrt(2.0 * spec.hidden), rq);
    enc_dim = 2 * spec.hidden;
  }
  head_ = Linear(enc_dim, spec.num_classes, rh);
}

std::vector<Tensor*> SequenceClassifier::params() {
  std::vector<Tensor*> p = {&embedding_.table, &segment_.table};
  if (spec_.encoder == SeqEncoder::BiGruAttention) {
    auto g = encoder_gru_.params();
    p.insert(p.end(), g.begin(), g.end());
    p.push_back(&attn_query_);
  }
  p.push_back(&head_.W);
  p.push_back(&head_.b);
  return p;
}

SequenceClassifier::Forward SequenceClassifier::run_forward(const SeqExample& ex) const {
  Forward f;
  const auto& ids = ex.token_ids;
  auto segment_of = [&](std::size_t pos) {
    return ex.segments.empty() ? 0 : ex.segments[pos];
  };

  if (spec_.encoder == SeqEncoder::NgramAverage) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      f.avg_ids.push_back(ids[i]);
      f.avg_segments.push_back(segment_of(i));
      for (int k = 2; k <= spec_.ngram_max; ++k) {
        if (i + k > ids.size()) break;
        f.avg_ids.push_back(hash_ngram(ids, i, k, spec_.hash_buckets));
        f.avg_segments.push_back(segment_of(i + k - 1));
      }
    }
    f.encoded = ngram_average_forward(embedding_, f.avg_ids);
    Vec seg = ngram_average_forward(segment_, f.avg_segments);
    for (int j = 0; j < spec_.embed_dim; ++j) f.encoded[j] += seg[j];
  } else {
    f.xs.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      Vec e = embedding_.row(ids[i]);
      Vec s = segment_.row(segment_of(i));
      for (int j = 0; j < spec_.embed_dim; ++j) e[j] += s[j];
      f.xs.push_back(std::move(e));
    }
    if (f.xs.empty()) {
      f.encoded.assign(2 * spec_.hidden, 0.0);
    } else {
      f.gru_trace = bigru_forward(encoder_gru_, f.xs);
      f.attn_trace = attention_forward(f.gru_trace.states, attn_query_.value);
      f.encoded = f.attn_trace.out;
    }
  }
  f.logits = head_.forward(f.encoded);
  return f;
}

Vec SequenceClassifier::predict_proba(const SeqExample& ex) const {
  Forward f = run_forward(ex);
  return softmax_vec(f.logits);
}

int SequenceClassifier::predict(const SeqExample& ex) const {
  Vec p = predict_proba(ex);
  int best = 0;
  for (std::size_t c = 1; c < p.size(); ++c)
    if (p[c] > p[best]) best = static_cast<int>(c);
  return best;
}

double SequenceClassifier::train_step(const SeqExample& ex) {
  Forward f = run_forward(ex);
  SoftmaxLoss loss = softmax_cross_entropy(f.logits, ex.label);
  Vec dlogits = loss.dlogits(ex.label);
  Vec dencoded = head_.backward(f.encoded, dlogits);

  if (spec_.encoder == SeqEncoder::NgramAverage) {
    ngram_average_backward(embedding_, f.avg_ids, dencoded);
    ngram_average_backward(segment_, f.avg_segments, dencoded);
  } else if (!f.xs.empty()) {
    std::vector<Vec> dstates =
        attention_backward(f.attn_trace, attn_query_.value, dencoded, attn_query_.grad);
    std::vector<Vec> dxs = bigru_backward(encoder_gru_, f.gru_trace, dstates);
    for (std::size_t i = 0; i < dxs.size(); ++i) {
      embedding_.accumulate(ex.token_ids[i], dxs[i]);
      segment_.accumulate(ex.segments.empty() ? 0 : ex.segments[i], dxs[i]);
    }
  }
  return loss.loss;
}

SequenceClassifier train_neural(const SequenceModelSpec& spec, const SeqDataset& train,
                                const SeqDataset& val, const TrainConfig& config) {
  if (train.empty()) throw UsageError("train_neural: empty training set");
  SequenceClassifier model(spec);
  auto params = model.params();
  Adam adam({config.lr});

  auto val_f1 = [&]() {
    if (val.empty()) return 0.0;
    std::vector<int> preds, golds;
    preds.reserve(val.size());
    for (const auto& ex : val) {
      preds.push_back(model.predict(ex));
      golds.push_back(ex.label);
    }
    return macro_f1(preds, golds, spec.num_classes);
  };

  std::vector<Vec> best_params;
  double best_f1 = -1.0;
  int since_best = 0;
  auto snapshot = [&]() {
    best_params.clear();
    for (Tensor* t : params) best_params.push_back(t->value);
  };
  snapshot();

  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng epoch_rng = rng.fork(static_cast<std::uint64_t>(epoch) + 1);
    epoch_rng.shuffle(order);
    double epoch_loss = 0;
    int in_batch = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      epoch_loss += model.train_step(train[order[i]]);
      if (++in_batch == config.batch_size || i + 1 == order.size()) {
        adam.step(params);
        in_batch = 0;
      }
    }
    if (!std::isfinite(epoch_loss))
      throw UsageError("train_neural: loss diverged at epoch " + std::to_string(epoch) +
                       " (loss=" + std::to_string(epoch_loss) + "); lower the step size");
    if (!val.empty()) {
      double f1 = val_f1();
      if (config.verbose)
        std::fprintf(stderr, "epoch %d loss %.4f val_macro_f1 %.4f\n", epoch,
                     epoch_loss / train.size(), f1);
      if (f1 > best_f1) {
        best_f1 = f1;
        since_best = 0;
        snapshot();
      } else if (++since_best >= config.patience) {
        break;  // early stop
      }
    } else {
      snapshot();
    }
  }
  for (std::size_t p = 0; p < params.size(); ++p) params[p]->value = best_params[p];
  return model;
}

}  // namespace kairos
