#include "kairos/impact.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "kairos/util.hpp"

namespace kairos {

void ImpactModelSpec::validate() const {
  if (encoder.dim < 2) throw UsageError("impact spec: encoder dim must be >= 2");
  if (encoder.kind == EncoderKind::BigruAttention && encoder.dim % 2 != 0)
    throw UsageError("impact spec: BiGRU encoder dim must be even");
  if (encoder.hash_buckets < 2) throw UsageError("impact spec: hash_buckets must be >= 2");
  const bool uses_context = composition == Composition::Flat ||
                            composition == Composition::AttnCtx ||
                            composition == Composition::GruCtx;
  if (uses_context && (context_len < 1 || context_len > 4))
    throw UsageError("impact spec: context length must be in 1..4");
}

Composition composition_from_string(const std::string& name) {
  if (name == "claim_only") return Composition::ClaimOnly;
  if (name == "claim_parent") return Composition::ClaimParent;
  if (name == "flat") return Composition::Flat;
  if (name == "attn") return Composition::AttnCtx;
  if (name == "gru") return Composition::GruCtx;
  throw UsageError("unknown impact composition '" + name + "'");
}

const char* to_string(Composition c) {
  switch (c) {
    case Composition::ClaimOnly: return "claim_only";
    case Composition::ClaimParent: return "claim_parent";
    case Composition::Flat: return "flat";
    case Composition::AttnCtx: return "attn";
    case Composition::GruCtx: return "gru";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Tree features
// ---------------------------------------------------------------------------

TreeFeatures tree_features(const ArgumentTree& tree, const std::string& claim_id,
                           const TfidfModel& tfidf) {
  const ClaimNode& claim = tree.node(claim_id);
  TreeFeatures out;
  out.distance_from_thesis = context_length(tree, claim_id);
  if (!claim.parent) return out;  // thesis: zeros plus flag

  out.has_parent_fields = true;
  const ClaimNode& parent = tree.node(*claim.parent);
  const ClaimNode& thesis = tree.thesis();
  SparseVector claim_vec = tfidf_transform(tfidf, claim.text);
  out.tfidf_cos_parent = sparse_cosine(claim_vec, tfidf_transform(tfidf, parent.text));
  out.tfidf_cos_thesis = sparse_cosine(claim_vec, tfidf_transform(tfidf, thesis.text));
  out.parent_tally = parent.tally.counts;
  return out;
}

FeatureVector tree_features_vector(const TreeFeatures& tf) {
  FeatureVector fv;
  fv.push("distance_from_thesis", tf.distance_from_thesis);
  fv.push("tfidf_cos_parent", tf.tfidf_cos_parent);
  fv.push("tfidf_cos_thesis", tf.tfidf_cos_thesis);
  static const char* names[5] = {"parent_votes_no", "parent_votes_low", "parent_votes_medium",
                                 "parent_votes_high", "parent_votes_very_high"};
  for (int i = 0; i < 5; ++i) fv.push(names[i], static_cast<double>(tf.parent_tally[i]));
  fv.push("has_parent_fields", tf.has_parent_fields ? 1.0 : 0.0);
  return fv;
}

// ---------------------------------------------------------------------------
// Flat input
// ---------------------------------------------------------------------------

FlatInput build_flat_input(const ClaimNode& claim,
                           const std::vector<const ClaimNode*>& context, int i) {
  FlatInput out;
  const std::size_t keep = std::min<std::size_t>(context.size(), i < 0 ? 0 : i);
  const std::size_t start = context.size() - keep;  // drop oldest first
  for (std::size_t c = start; c < context.size(); ++c) {
    for (const auto& tok : tokenize(context[c]->text).tokens) {
      out.tokens.push_back(tok);
      out.segments.push_back(1);
    }
    out.tokens.push_back(kSepToken);
    out.segments.push_back(1);
  }
  for (const auto& tok : tokenize(claim.text).tokens) {
    out.tokens.push_back(tok);
    out.segments.push_back(0);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Context composition primitives
// ---------------------------------------------------------------------------

std::pair<Vec, Vec> attention_context(const std::vector<Vec>& context_vectors,
                                      const Vec& learned_query) {
  AttentionTrace trace = attention_forward(context_vectors, learned_query);
  return {trace.alpha, trace.out};
}

Vec gru_context(const BiGru& gru, const std::vector<Vec>& context_vectors) {
  if (context_vectors.empty()) throw UsageError("gru_context: empty context");
  BiGruTrace trace = bigru_forward(gru, context_vectors);
  return bigru_final(trace, gru.hidden);
}

// ---------------------------------------------------------------------------
// Impact model
// ---------------------------------------------------------------------------

struct ImpactModel::EncTrace {
  std::vector<int> ids;
  std::vector<int> segments;
  std::vector<int> avg_ids;   // hashed n-gram path
  std::vector<int> avg_segs;
  std::vector<Vec> xs;        // BiGRU path
  BiGruTrace gru;
  AttentionTrace attn;
  Vec out;
  bool empty = false;
};

struct ImpactModel::Trace {
  EncTrace target;               // flat input for ClaimOnly/ClaimParent/Flat
  std::vector<EncTrace> context; // AttnCtx/GruCtx
  AttentionTrace ctx_attn;
  BiGruTrace ctx_gru;
  bool has_context = false;
  Vec head_in;
  Vec logits;
};

ImpactModel::ImpactModel(const ImpactModelSpec& spec) : spec_(spec) {
  spec_.validate();
  Rng rng(spec_.encoder.seed);
  Rng re = rng.fork(11), rs = rng.fork(12), rg = rng.fork(13), rq = rng.fork(14),
      rc = rng.fork(15), rx = rng.fork(16), rh = rng.fork(17);
  const int dim = spec_.encoder.dim;
  embedding_ = Embedding(spec_.encoder.hash_buckets, dim, re);
  segment_ = Embedding(2, dim, rs);
  if (spec_.encoder.kind == EncoderKind::BigruAttention) {
    encoder_gru_ = BiGru(dim, dim / 2, rg);
    enc_query_ = Tensor(dim);
    init_uniform(enc_query_, 1.0 / std::sqrt(static_cast<double>(dim)), rq);
  }
  int head_in = dim;
  if (spec_.composition == Composition::AttnCtx) {
    ctx_query_ = Tensor(dim);
    init_uniform(ctx_query_, 1.0 / std::sqrt(static_cast<double>(dim)), rc);
    head_in = 2 * dim;
  } else if (spec_.composition == Composition::GruCtx) {
    ctx_gru_ = BiGru(dim, dim / 2, rx);
    head_in = 2 * dim;
  }
  head_ = Linear(head_in, 3, rh);
}

std::vector<Tensor*> ImpactModel::params() {
  std::vector<Tensor*> p = {&embedding_.table, &segment_.table};
  if (spec_.encoder.kind == EncoderKind::BigruAttention) {
    auto g = encoder_gru_.params();
    p.insert(p.end(), g.begin(), g.end());
    p.push_back(&enc_query_);
  }
  if (spec_.composition == Composition::AttnCtx) p.push_back(&ctx_query_);
  if (spec_.composition == Composition::GruCtx) {
    auto g = ctx_gru_.params();
    p.insert(p.end(), g.begin(), g.end());
  }
  p.push_back(&head_.W);
  p.push_back(&head_.b);
  return p;
}

std::vector<const Tensor*> ImpactModel::params() const {
  auto mutable_params = const_cast<ImpactModel*>(this)->params();
  return {mutable_params.begin(), mutable_params.end()};
}

Vec ImpactModel::encode_tokens(const std::vector<std::string>& tokens,
                               const std::vector<int>& segments, EncTrace* trace) const {
  const int dim = spec_.encoder.dim;
  EncTrace local;
  EncTrace& t = trace ? *trace : local;
  t.ids.reserve(tokens.size());
  for (const auto& tok : tokens)
    t.ids.push_back(hash_token(tok, spec_.encoder.hash_buckets));
  t.segments = segments;
  if (tokens.empty()) {
    t.empty = true;
    t.out.assign(dim, 0.0);
    return t.out;
  }

  if (spec_.encoder.kind == EncoderKind::HashedNgramAverage) {
    for (std::size_t i = 0; i < t.ids.size(); ++i) {
      t.avg_ids.push_back(t.ids[i]);
      t.avg_segs.push_back(segments[i]);
      if (i + 2 <= t.ids.size()) {
        t.avg_ids.push_back(hash_ngram(t.ids, i, 2, spec_.encoder.hash_buckets));
        t.avg_segs.push_back(segments[i + 1]);
      }
    }
    t.out = ngram_average_forward(embedding_, t.avg_ids);
    Vec seg = ngram_average_forward(segment_, t.avg_segs);
    for (int j = 0; j < dim; ++j) t.out[j] += seg[j];
  } else {
    t.xs.reserve(t.ids.size());
    for (std::size_t i = 0; i < t.ids.size(); ++i) {
      Vec e = embedding_.row(t.ids[i]);
      Vec s = segment_.row(segments[i]);
      for (int j = 0; j < dim; ++j) e[j] += s[j];
      t.xs.push_back(std::move(e));
    }
    t.gru = bigru_forward(encoder_gru_, t.xs);
    t.attn = attention_forward(t.gru.states, enc_query_.value);
    t.out = t.attn.out;
  }
  return t.out;
}

void ImpactModel::encode_backward(const EncTrace& t, const Vec& dout) {
  if (t.empty) return;
  if (spec_.encoder.kind == EncoderKind::HashedNgramAverage) {
    ngram_average_backward(embedding_, t.avg_ids, dout);
    ngram_average_backward(segment_, t.avg_segs, dout);
  } else {
    std::vector<Vec> dstates = attention_backward(t.attn, enc_query_.value, dout, enc_query_.grad);
    std::vector<Vec> dxs = bigru_backward(encoder_gru_, t.gru, dstates);
    for (std::size_t i = 0; i < dxs.size(); ++i) {
      embedding_.accumulate(t.ids[i], dxs[i]);
      segment_.accumulate(t.segments[i], dxs[i]);
    }
  }
}

Vec ImpactModel::encode_claim(const std::string& text, bool* was_empty) const {
  TokenStream stream = tokenize(text);
  std::vector<int> segments(stream.tokens.size(), 0);
  EncTrace trace;
  Vec out = encode_tokens(stream.tokens, segments, &trace);
  if (was_empty) *was_empty = trace.empty;
  return out;
}

ImpactModel::Trace ImpactModel::run_forward(const ArgumentTree& tree,
                                            const std::string& claim_id) const {
  const ClaimNode& claim = tree.node(claim_id);
  std::vector<std::string> ctx_ids = context_of(tree, claim_id);

  Trace trace;
  const int dim = spec_.encoder.dim;
  switch (spec_.composition) {
    case Composition::ClaimOnly:
    case Composition::ClaimParent:
    case Composition::Flat: {
      int keep = 0;
      if (spec_.composition == Composition::ClaimParent) keep = 1;
      if (spec_.composition == Composition::Flat) keep = spec_.context_len;
      std::vector<const ClaimNode*> context;
      for (const auto& id : ctx_ids) context.push_back(&tree.node(id));
      FlatInput input = build_flat_input(claim, context, keep);
      trace.head_in = encode_tokens(input.tokens, input.segments, &trace.target);
      break;
    }
    case Composition::AttnCtx:
    case Composition::GruCtx: {
      TokenStream target = tokenize(claim.text);
      std::vector<int> target_segs(target.tokens.size(), 0);
      Vec v_r = encode_tokens(target.tokens, target_segs, &trace.target);

      const std::size_t keep =
          std::min<std::size_t>(ctx_ids.size(), static_cast<std::size_t>(spec_.context_len));
      const std::size_t start = ctx_ids.size() - keep;
      std::vector<Vec> ctx_vecs;
      for (std::size_t c = start; c < ctx_ids.size(); ++c) {
        const ClaimNode& node = tree.node(ctx_ids[c]);
        TokenStream stream = tokenize(node.text);
        std::vector<int> segs(stream.tokens.size(), 1);
        trace.context.emplace_back();
        ctx_vecs.push_back(encode_tokens(stream.tokens, segs, &trace.context.back()));
      }
      Vec v_d(spec_.composition == Composition::AttnCtx ? dim : dim, 0.0);
      if (!ctx_vecs.empty()) {
        trace.has_context = true;
        if (spec_.composition == Composition::AttnCtx) {
          trace.ctx_attn = attention_forward(ctx_vecs, ctx_query_.value);
          v_d = trace.ctx_attn.out;
        } else {
          trace.ctx_gru = bigru_forward(ctx_gru_, ctx_vecs);
          v_d = bigru_final(trace.ctx_gru, ctx_gru_.hidden);
        }
      }
      trace.head_in.reserve(v_d.size() + v_r.size());
      trace.head_in.insert(trace.head_in.end(), v_d.begin(), v_d.end());
      trace.head_in.insert(trace.head_in.end(), v_r.begin(), v_r.end());
      break;
    }
  }
  trace.logits = head_.forward(trace.head_in);
  return trace;
}

std::array<double, 3> ImpactModel::predict_distribution(const ArgumentTree& tree,
                                                        const std::string& claim_id) const {
  Trace trace = run_forward(tree, claim_id);
  SoftmaxLoss sm = softmax_cross_entropy(trace.logits, 0);
  return {sm.probs[0], sm.probs[1], sm.probs[2]};
}

ImpactLabel3 ImpactModel::predict(const ArgumentTree& tree, const std::string& claim_id) const {
  auto dist = predict_distribution(tree, claim_id);
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (dist[c] > dist[best]) best = c;  // ties resolve to the lowest class
  return static_cast<ImpactLabel3>(best);
}

double ImpactModel::train_step(const ArgumentTree& tree, const std::string& claim_id,
                               int label) {
  Trace trace = run_forward(tree, claim_id);
  SoftmaxLoss loss = softmax_cross_entropy(trace.logits, label);
  Vec dlogits = loss.dlogits(label);
  Vec dhead_in = head_.backward(trace.head_in, dlogits);

  const int dim = spec_.encoder.dim;
  switch (spec_.composition) {
    case Composition::ClaimOnly:
    case Composition::ClaimParent:
    case Composition::Flat:
      encode_backward(trace.target, dhead_in);
      break;
    case Composition::AttnCtx:
    case Composition::GruCtx: {
      Vec d_vd(dhead_in.begin(), dhead_in.begin() + dim);
      Vec d_vr(dhead_in.begin() + dim, dhead_in.end());
      encode_backward(trace.target, d_vr);
      if (trace.has_context) {
        if (spec_.composition == Composition::AttnCtx) {
          std::vector<Vec> dctx =
              attention_backward(trace.ctx_attn, ctx_query_.value, d_vd, ctx_query_.grad);
          for (std::size_t c = 0; c < trace.context.size(); ++c)
            encode_backward(trace.context[c], dctx[c]);
        } else {
          std::vector<Vec> dstates = bigru_final_grad(trace.ctx_gru, ctx_gru_.hidden, d_vd);
          std::vector<Vec> dctx = bigru_backward(ctx_gru_, trace.ctx_gru, dstates);
          for (std::size_t c = 0; c < trace.context.size(); ++c)
            encode_backward(trace.context[c], dctx[c]);
        }
      }
      break;
    }
  }
  return loss.loss;
}

// ---------------------------------------------------------------------------
// Training harness
// ---------------------------------------------------------------------------

std::vector<ImpactExample> labeled_claims(const std::vector<ArgumentTree>& trees, long min_votes,
                                          double min_agreement) {
  std::vector<ImpactExample> out;
  for (const auto& tree : trees) {
    for (const auto& [id, node] : tree.nodes) {
      auto label = impact_label(node.tally, min_votes, min_agreement);
      if (!label) continue;
      out.push_back({&tree, id, static_cast<int>(*label)});
    }
  }
  return out;
}

ImpactModel train_impact(const std::vector<ImpactExample>& train,
                         const std::vector<ImpactExample>& val, const ImpactModelSpec& spec,
                         const TrainConfig& config) {
  if (train.empty()) throw UsageError("train_impact: empty training set");
  std::vector<bool> seen_class(3, false);
  for (const auto& ex : train) seen_class[ex.label] = true;
  if (!seen_class[0] || !seen_class[1] || !seen_class[2])
    throw UsageError("train_impact: a class is missing from the training split");

  ImpactModel model(spec);
  auto params = model.params();
  Adam adam({config.lr});

  auto val_f1 = [&]() {
    std::vector<int> preds, golds;
    preds.reserve(val.size());
    for (const auto& ex : val) {
      preds.push_back(static_cast<int>(model.predict(*ex.tree, ex.claim_id)));
      golds.push_back(ex.label);
    }
    return macro_f1(preds, golds, 3);
  };

  std::vector<Vec> best_params;
  auto snapshot = [&]() {
    best_params.clear();
    for (Tensor* t : params) best_params.push_back(t->value);
  };
  snapshot();
  double best_f1 = -1.0;
  int since_best = 0;

  Rng rng(config.seed);
  std::vector<std::size_t> order(train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng epoch_rng = rng.fork(static_cast<std::uint64_t>(epoch) + 1);
    epoch_rng.shuffle(order);
    double epoch_loss = 0;
    int in_batch = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& ex = train[order[i]];
      epoch_loss += model.train_step(*ex.tree, ex.claim_id, ex.label);
      if (++in_batch == config.batch_size || i + 1 == order.size()) {
        adam.step(params);
        in_batch = 0;
      }
    }
    if (!std::isfinite(epoch_loss))
      throw UsageError("train_impact: loss diverged at epoch " + std::to_string(epoch));
    if (!val.empty()) {
      double f1 = val_f1();
      if (config.verbose)
        std::fprintf(stderr, "impact epoch %d loss %.4f val_macro_f1 %.4f\n", epoch,
                     epoch_loss / train.size(), f1);
      if (f1 > best_f1) {
        best_f1 = f1;
        since_best = 0;
        snapshot();
      } else if (++since_best >= config.patience) {
        break;
      }
    } else {
      snapshot();
    }
  }
  for (std::size_t p = 0; p < params.size(); ++p) params[p]->value = best_params[p];
  return model;
}

std::vector<ImpactPrediction> predict_impact_all(const ImpactModel& model,
                                                 const std::vector<ImpactExample>& examples) {
  std::vector<ImpactPrediction> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    ImpactPrediction p;
    p.tree_id = ex.tree->tree_id;
    p.claim_id = ex.claim_id;
    p.gold = ex.label;
    p.scores = model.predict_distribution(*ex.tree, ex.claim_id);
    p.predicted = 0;
    for (int c = 1; c < 3; ++c)
      if (p.scores[c] > p.scores[p.predicted]) p.predicted = c;
    p.context_length = context_length(*ex.tree, ex.claim_id);
    out.push_back(std::move(p));
  }
  return out;
}

std::string save_impact_model(const ImpactModel& model) {
  const ImpactModelSpec& spec = model.spec();
  nlohmann::json j;
  j["format"] = "kairos-impact";
  j["version"] = 1;
  j["spec"] = {{"composition", to_string(spec.composition)},
               {"context_len", spec.context_len},
               {"encoder",
                {{"kind", spec.encoder.kind == EncoderKind::HashedNgramAverage ? "hashed"
                                                                                : "bigru"},
                 {"dim", spec.encoder.dim},
                 {"hash_buckets", spec.encoder.hash_buckets},
                 {"seed", spec.encoder.seed}}}};
  nlohmann::json params = nlohmann::json::array();
  for (const Tensor* t : model.params()) {
    params.push_back({{"size", t->size()}, {"values", t->value}});
  }
  j["params"] = std::move(params);
  return j.dump() + "\n";
}

ImpactModel load_impact_model(const std::string& serialized) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(serialized);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("impact model load: invalid JSON: ") + e.what());
  }
  if (j.value("format", "") != "kairos-impact")
    throw ValidationError("impact model load: not an impact model dump");
  if (j.value("version", -1) != 1)
    throw ValidationError("impact model load: unsupported version " +
                          std::to_string(j.value("version", -1)));
  const auto& spec_json = j.at("spec");
  ImpactModelSpec spec;
  spec.composition = composition_from_string(spec_json.at("composition").get<std::string>());
  spec.context_len = spec_json.at("context_len").get<int>();
  const auto& enc = spec_json.at("encoder");
  spec.encoder.kind = enc.at("kind").get<std::string>() == "hashed"
                          ? EncoderKind::HashedNgramAverage
                          : EncoderKind::BigruAttention;
  spec.encoder.dim = enc.at("dim").get<int>();
  spec.encoder.hash_buckets = enc.at("hash_buckets").get<int>();
  spec.encoder.seed = enc.at("seed").get<std::uint64_t>();

  ImpactModel model(spec);
  auto params = model.params();
  const auto& dumped = j.at("params");
  if (dumped.size() != params.size())
    throw ValidationError("impact model load: parameter count mismatch");
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = dumped[i].at("values").get<std::vector<double>>();
    if (values.size() != params[i]->size())
      throw ValidationError("impact model load: shape mismatch at tensor " + std::to_string(i));
    params[i]->value = std::move(values);
  }
  return model;
}

std::string impact_predictions_csv(const std::vector<ImpactPrediction>& predictions) {
  std::string csv =
      "tree_id,claim_id,gold,predicted,score_not_impactful,score_medium_impact,score_impactful,"
      "context_length\n";
  for (const auto& p : predictions) {
    csv += csv_escape(p.tree_id) + "," + csv_escape(p.claim_id) + "," + std::to_string(p.gold) +
           "," + std::to_string(p.predicted) + "," + format_double(p.scores[0]) + "," +
           format_double(p.scores[1]) + "," + format_double(p.scores[2]) + "," +
           std::to_string(p.context_length) + "\n";
  }
  return csv;
}

}  // namespace kairos
