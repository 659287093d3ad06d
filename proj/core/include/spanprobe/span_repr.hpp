#pragma once

#include <Eigen/Core>
#include <string_view>

namespace spanprobe {

/// The six span combinators. x is the first span word's vector, y the
/// last's (equal when the span has one word).
enum class ReprType {
  XY,             // concat(x, y)                     width 2d
  XY_DIFF,        // concat(x, y, x - y)              width 3d
  XY_PROD,        // concat(x, y, x .* y)             width 3d
  XY_PROD_DIFF,   // concat(x, y, x .* y, x - y)      width 4d
  SELF_ATTENTIVE, // softmax-weighted sum over span   width d
  MAX_POOLING,    // component-wise max over span     width d
};

constexpr ReprType kAllReprTypes[] = {ReprType::XY,           ReprType::XY_DIFF,
                                      ReprType::XY_PROD,      ReprType::XY_PROD_DIFF,
                                      ReprType::SELF_ATTENTIVE, ReprType::MAX_POOLING};

/// Config/CLI spelling: xy, xy-diff, xy-prod, xy-prod-diff,
/// self-attentive, max-pooling.
const char* repr_type_name(ReprType type);
/// Table spelling: "x,y", "x,y,x-y", ..., "SelfAttentive", "MaxPooling".
const char* repr_type_display(ReprType type);
ReprType parse_repr_type(std::string_view name);

/// Output width of a variant for encoder width d.
int repr_width(ReprType type, int encoder_width);

/// Learnable scorer of the self-attentive combinator: one bias-free
/// linear functional over word vectors.
struct AttentiveScorer {
  Eigen::VectorXd weights;
};

struct SpanRepresentation {
  Eigen::VectorXd vector;
  ReprType type = ReprType::XY;
  int layer = 0;
};

/// Combine the span's word vectors (one row per word) into a fixed-width
/// vector. `scorer` must be present exactly for SELF_ATTENTIVE and match
/// the vector width. Throws ValidationError on an empty span or a
/// mismatched scorer.
Eigen::VectorXd represent(const Eigen::Ref<const Eigen::MatrixXd>& span_vectors, ReprType type,
                          const AttentiveScorer* scorer = nullptr);

/// Softmax weights the self-attentive combinator assigns to the span
/// words; positive, summing to one.
Eigen::VectorXd attention_weights(const Eigen::Ref<const Eigen::MatrixXd>& span_vectors,
                                  const AttentiveScorer& scorer);

/// Gradient of the scorer weights given the loss gradient with respect to
/// the self-attentive output.
Eigen::VectorXd self_attentive_scorer_gradient(
    const Eigen::Ref<const Eigen::MatrixXd>& span_vectors, const AttentiveScorer& scorer,
    const Eigen::Ref<const Eigen::VectorXd>& output_gradient);

}  // namespace spanprobe
