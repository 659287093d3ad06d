#include "spanprobe/span_repr.hpp"

#include <string>

#include "spanprobe/errors.hpp"

namespace spanprobe {

const char* repr_type_name(ReprType type) {
  switch (type) {
    case ReprType::XY: return "xy";
    case ReprType::XY_DIFF: return "xy-diff";
    case ReprType::XY_PROD: return "xy-prod";
    case ReprType::XY_PROD_DIFF: return "xy-prod-diff";
    case ReprType::SELF_ATTENTIVE: return "self-attentive";
    case ReprType::MAX_POOLING: return "max-pooling";
  }
  return "?";
}

const char* repr_type_display(ReprType type) {
  switch (type) {
    case ReprType::XY: return "x,y";
    case ReprType::XY_DIFF: return "x,y,x-y";
    case ReprType::XY_PROD: return "x,y,x*y";
    case ReprType::XY_PROD_DIFF: return "x,y,x*y,x-y";
    case ReprType::SELF_ATTENTIVE: return "SelfAttentive";
    case ReprType::MAX_POOLING: return "MaxPooling";
  }
  return "?";
}

ReprType parse_repr_type(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 0x20);
    if (c == '_') c = '-';
  }
  for (ReprType type : kAllReprTypes) {
    if (lower == repr_type_name(type)) return type;
  }
  // Accept the table spellings too.
  if (lower == "x,y") return ReprType::XY;
  if (lower == "x,y,x-y") return ReprType::XY_DIFF;
  if (lower == "x,y,x*y") return ReprType::XY_PROD;
  if (lower == "x,y,x*y,x-y") return ReprType::XY_PROD_DIFF;
  if (lower == "selfattentive") return ReprType::SELF_ATTENTIVE;
  if (lower == "maxpooling") return ReprType::MAX_POOLING;
  throw ConfigError("unknown representation type \"" + std::string(name) +
                    "\" (expected xy, xy-diff, xy-prod, xy-prod-diff, self-attentive or "
                    "max-pooling)");
}

int repr_width(ReprType type, int encoder_width) {
  switch (type) {
    case ReprType::XY: return 2 * encoder_width;
    case ReprType::XY_DIFF: return 3 * encoder_width;
    case ReprType::XY_PROD: return 3 * encoder_width;
    case ReprType::XY_PROD_DIFF: return 4 * encoder_width;
    case ReprType::SELF_ATTENTIVE: return encoder_width;
    case ReprType::MAX_POOLING: return encoder_width;
  }
  return 0;
}

Eigen::VectorXd attention_weights(const Eigen::Ref<const Eigen::MatrixXd>& span_vectors,
                                  const AttentiveScorer& scorer) {
  if (scorer.weights.size() != span_vectors.cols()) {
    throw ValidationError("self-attentive scorer width " + std::to_string(scorer.weights.size()) +
                          " does not match vector width " + std::to_string(span_vectors.cols()));
  }
  Eigen::VectorXd scores = span_vectors * scorer.weights;
  // Shifting by the max keeps the softmax stable and the output unchanged.
  const double max_score = scores.maxCoeff();
  Eigen::VectorXd weights = (scores.array() - max_score).exp();
  weights /= weights.sum();
  return weights;
}

Eigen::VectorXd represent(const Eigen::Ref<const Eigen::MatrixXd>& span_vectors, ReprType type,
                          const AttentiveScorer* scorer) {
  const Eigen::Index span_words = span_vectors.rows();
  const Eigen::Index width = span_vectors.cols();
  if (span_words == 0) throw ValidationError("represent: empty span");
  if ((scorer != nullptr) != (type == ReprType::SELF_ATTENTIVE)) {
    throw ValidationError("a scorer must be given exactly for the self-attentive type");
  }

  const Eigen::VectorXd x = span_vectors.row(0);
  const Eigen::VectorXd y = span_vectors.row(span_words - 1);

  switch (type) {
    case ReprType::XY: {
      Eigen::VectorXd out(2 * width);
      out << x, y;
      return out;
    }
    case ReprType::XY_DIFF: {
      Eigen::VectorXd out(3 * width);
      out << x, y, (x - y);
      return out;
    }
    case ReprType::XY_PROD: {
      Eigen::VectorXd out(3 * width);
      out << x, y, x.cwiseProduct(y);
      return out;
    }
    case ReprType::XY_PROD_DIFF: {
      Eigen::VectorXd out(4 * width);
      out << x, y, x.cwiseProduct(y), (x - y);
      return out;
    }
    case ReprType::SELF_ATTENTIVE: {
      const Eigen::VectorXd weights = attention_weights(span_vectors, *scorer);
      return span_vectors.transpose() * weights;
    }
    case ReprType::MAX_POOLING:
      return span_vectors.colwise().maxCoeff();
  }
  throw ConfigError("unhandled representation type");
}

Eigen::VectorXd self_attentive_scorer_gradient(
    const Eigen::Ref<const Eigen::MatrixXd>& span_vectors, const AttentiveScorer& scorer,
    const Eigen::Ref<const Eigen::VectorXd>& output_gradient) {
  // out = sum_j alpha_j h_j with alpha = softmax(H w). With g = dL/dout and
  // c_j = g . h_j:  dL/ds_j = alpha_j (c_j - sum_t alpha_t c_t), and
  // dL/dw = sum_j dL/ds_j h_j.
  const Eigen::VectorXd alpha = attention_weights(span_vectors, scorer);
  const Eigen::VectorXd c = span_vectors * output_gradient;
  const double mixed = alpha.dot(c);
  const Eigen::VectorXd score_gradient = (alpha.array() * (c.array() - mixed)).matrix();
  return span_vectors.transpose() * score_gradient;
}

}  // namespace spanprobe
