#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kairos/corpus.hpp"
#include "kairos/labeling.hpp"
#include "kairos/neural.hpp"
#include "kairos/textfeat.hpp"

namespace kairos {

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

enum class EncoderKind { HashedNgramAverage, BigruAttention };

struct ClaimEncoderSpec {
  EncoderKind kind = EncoderKind::BigruAttention;
  int dim = 32;  // encoder output width (2 * hidden for the BiGRU kind)
  int hash_buckets = 4096;
  std::uint64_t seed = 1;
};

enum class Composition { ClaimOnly, ClaimParent, Flat, AttnCtx, GruCtx };

struct ImpactModelSpec {
  ClaimEncoderSpec encoder;
  Composition composition = Composition::ClaimOnly;
  int context_len = 1;  // i for Flat/AttnCtx/GruCtx, up to 4 previous claims

  void validate() const;
};

Composition composition_from_string(const std::string& name);
const char* to_string(Composition c);

// ---------------------------------------------------------------------------
// Tree-structural features
// ---------------------------------------------------------------------------

struct TreeFeatures {
  int distance_from_thesis = 0;
  double tfidf_cos_parent = 0.0;
  double tfidf_cos_thesis = 0.0;
  std::array<long, 5> parent_tally{};
  bool has_parent_fields = false;  // false exactly for the thesis
};

/// Distance and tf-idf similarity of the claim to its parent and the
/// thesis, plus the parent's impact tally. The tf-idf model must be fitted
/// on the corpus claim texts.
TreeFeatures tree_features(const ArgumentTree& tree, const std::string& claim_id,
                           const TfidfModel& tfidf);

FeatureVector tree_features_vector(const TreeFeatures& tf);

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

/// Reserved separator between claims in flat inputs.
inline constexpr const char* kSepToken = "[sep]";

struct FlatInput {
  std::vector<std::string> tokens;
  std::vector<int> segments;  // 0 on target-claim tokens, 1 on context tokens
};

/// Last min(i, context length) context claims in thesis -> parent order,
/// joined with the separator token, followed by the target claim.
/// Truncation drops the oldest context first.
FlatInput build_flat_input(const ClaimNode& claim,
                           const std::vector<const ClaimNode*>& context, int i);

// ---------------------------------------------------------------------------
// Context composition primitives
// ---------------------------------------------------------------------------

/// alpha_c = softmax over c of exp(V_c . V_l); V_d = sum alpha_c V_c.
/// Returns (alpha, V_d). Throws on an empty context.
std::pair<Vec, Vec> attention_context(const std::vector<Vec>& context_vectors,
                                      const Vec& learned_query);

/// Final forward and backward states of a bidirectional GRU pass over the
/// context vectors (thesis -> parent order), concatenated.
Vec gru_context(const BiGru& gru, const std::vector<Vec>& context_vectors);

// ---------------------------------------------------------------------------
// Impact model
// ---------------------------------------------------------------------------

class ImpactModel {
 public:
  ImpactModel() = default;
  explicit ImpactModel(const ImpactModelSpec& spec);

  /// 3-class probability distribution for a claim in its tree.
  std::array<double, 3> predict_distribution(const ArgumentTree& tree,
                                             const std::string& claim_id) const;
  ImpactLabel3 predict(const ArgumentTree& tree, const std::string& claim_id) const;

  /// Deterministic, seed-initialized encoding of a bare claim text.
  /// Empty text encodes to the zero vector (flag via was_empty).
  Vec encode_claim(const std::string& text, bool* was_empty = nullptr) const;

  double train_step(const ArgumentTree& tree, const std::string& claim_id, int label);
  std::vector<Tensor*> params();
  std::vector<const Tensor*> params() const;
  const ImpactModelSpec& spec() const { return spec_; }

 private:
  struct EncTrace;
  struct Trace;
  Vec encode_tokens(const std::vector<std::string>& tokens, const std::vector<int>& segments,
                    EncTrace* trace) const;
  void encode_backward(const EncTrace& trace, const Vec& dout);
  Trace run_forward(const ArgumentTree& tree, const std::string& claim_id) const;

  ImpactModelSpec spec_;
  Embedding embedding_;
  Embedding segment_;
  BiGru encoder_gru_;   // BigruAttention encoder
  Tensor enc_query_;    // pooling query inside the encoder
  Tensor ctx_query_;    // V_l for the AttnCtx composition
  BiGru ctx_gru_;       // GruCtx composition
  Linear head_;
};

struct ImpactExample {
  const ArgumentTree* tree = nullptr;
  std::string claim_id;
  int label = 0;  // ImpactLabel3 as int
};

/// All claims whose tallies pass the vote/agreement filter, labeled.
std::vector<ImpactExample> labeled_claims(const std::vector<ArgumentTree>& trees,
                                          long min_votes = 5, double min_agreement = 60.0);

ImpactModel train_impact(const std::vector<ImpactExample>& train,
                         const std::vector<ImpactExample>& val, const ImpactModelSpec& spec,
                         const TrainConfig& config);

struct ImpactPrediction {
  std::string tree_id;
  std::string claim_id;
  int gold = 0;
  int predicted = 0;
  std::array<double, 3> scores{};
  int context_length = 0;
};

std::vector<ImpactPrediction> predict_impact_all(const ImpactModel& model,
                                                 const std::vector<ImpactExample>& examples);

/// Prediction table as CSV: claim_id, gold, predicted, per-class scores and
/// raw context length.
std::string impact_predictions_csv(const std::vector<ImpactPrediction>& predictions);

/// Versioned JSON parameter dump (spec + shapes + flattened values).
/// Loading refuses mismatched versions or shapes.
std::string save_impact_model(const ImpactModel& model);
ImpactModel load_impact_model(const std::string& serialized);

}  // namespace kairos
