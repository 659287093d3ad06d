#include "spanprobe/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "spanprobe/errors.hpp"

namespace spanprobe {

namespace {

void check_train_config(const TrainConfig& config) {
  if (config.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (config.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (config.learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  if (config.dropout_prob < 0.0 || config.dropout_prob >= 1.0) {
    throw ConfigError("dropout probability must lie in [0, 1)");
  }
}

}  // namespace

ProbeParams init_probe(ReprType type, int encoder_width, std::uint64_t seed) {
  if (encoder_width < 1) throw ConfigError("encoder width must be >= 1");
  const int width = repr_width(type, encoder_width);
  rng::Generator gen(rng::derive_stream(seed, "init"));
  const double bound = 1.0 / std::sqrt(static_cast<double>(width));

  ProbeParams params;
  params.repr_type = type;
  params.weight.resize(2, width);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < width; ++c) params.weight(r, c) = gen.next_uniform(-bound, bound);
  }
  for (int r = 0; r < 2; ++r) params.bias(r) = gen.next_uniform(-bound, bound);
  if (type == ReprType::SELF_ATTENTIVE) {
    const double scorer_bound = 1.0 / std::sqrt(static_cast<double>(encoder_width));
    AttentiveScorer scorer;
    scorer.weights.resize(encoder_width);
    for (int i = 0; i < encoder_width; ++i) {
      scorer.weights(i) = gen.next_uniform(-scorer_bound, scorer_bound);
    }
    params.scorer = std::move(scorer);
  }
  return params;
}

Eigen::Vector2d softmax2(const Eigen::Vector2d& logits) {
  const double shift = logits.maxCoeff();
  Eigen::Vector2d exps = (logits.array() - shift).exp();
  return exps / exps.sum();
}

double softmax_cross_entropy(const Eigen::Vector2d& logits, Label gold) {
  const int g = static_cast<int>(gold);
  const double shift = logits.maxCoeff();
  const double log_sum = std::log((logits.array() - shift).exp().sum());
  return -(logits(g) - shift - log_sum);
}

Label predict_label(const Eigen::Vector2d& logits) {
  return logits(0) >= logits(1) ? Label::IDIOMATIC : Label::NON_IDIOMATIC;
}

Eigen::Vector2d probe_logits(const Eigen::Ref<const Eigen::VectorXd>& representation,
                             const ProbeParams& params) {
  if (representation.size() != params.weight.cols()) {
    std::ostringstream msg;
    msg << "representation width " << representation.size() << " does not match probe width "
        << params.weight.cols();
    throw ValidationError(msg.str());
  }
  return params.weight * representation + params.bias;
}

Eigen::Vector2d probe_logits_train(const Eigen::Ref<const Eigen::VectorXd>& representation,
                                   const ProbeParams& params, double dropout_prob, rng::Generator& gen,
                                   Eigen::VectorXd* scale_out) {
  if (dropout_prob < 0.0 || dropout_prob >= 1.0) {
    throw ConfigError("dropout probability must lie in [0, 1)");
  }
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(representation.size());
  if (dropout_prob > 0.0) {
    const double keep_scale = 1.0 / (1.0 - dropout_prob);
    for (Eigen::Index i = 0; i < scale.size(); ++i) {
      scale(i) = gen.next_bernoulli(dropout_prob) ? 0.0 : keep_scale;
    }
  }
  if (scale_out != nullptr) *scale_out = scale;
  return probe_logits(representation.cwiseProduct(scale), params);
}

double probe_loss_and_gradients(const Eigen::Ref<const Eigen::MatrixXd>& span_vectors, Label gold,
                                const ProbeParams& params,
                                const Eigen::Ref<const Eigen::VectorXd>& dropout_scale,
                                ProbeGradients* gradients) {
  const AttentiveScorer* scorer = params.scorer.has_value() ? &*params.scorer : nullptr;
  const Eigen::VectorXd rep = represent(span_vectors, params.repr_type, scorer);
  if (dropout_scale.size() != rep.size()) {
    std::ostringstream msg;
    msg << "dropout scale width " << dropout_scale.size() << " does not match representation width "
        << rep.size();
    throw ValidationError(msg.str());
  }
  const Eigen::VectorXd dropped = rep.cwiseProduct(dropout_scale);
  const Eigen::Vector2d logits = probe_logits(dropped, params);
  const double loss = softmax_cross_entropy(logits, gold);

  if (gradients != nullptr) {
    Eigen::Vector2d dlogits = softmax2(logits);
    dlogits(static_cast<int>(gold)) -= 1.0;
    gradients->weight = dlogits * dropped.transpose();
    gradients->bias = dlogits;
    if (scorer != nullptr) {
      const Eigen::VectorXd drep =
          (params.weight.transpose() * dlogits).cwiseProduct(dropout_scale);
      gradients->scorer = self_attentive_scorer_gradient(span_vectors, *scorer, drep);
    } else {
      gradients->scorer.resize(0);
    }
  }
  return loss;
}

Label majority_label(const std::vector<PreparedExample>& examples) {
  long idiomatic = 0;
  long non_idiomatic = 0;
  for (const PreparedExample& example : examples) {
    if (!example.label.has_value()) continue;
    (*example.label == Label::IDIOMATIC ? idiomatic : non_idiomatic) += 1;
  }
  return non_idiomatic > idiomatic ? Label::NON_IDIOMATIC : Label::IDIOMATIC;
}

TrainOutcome train_probe(const std::vector<PreparedExample>& examples, ReprType type,
                         int encoder_width, const TrainConfig& config, const EpochHook& hook) {
  check_train_config(config);
  if (examples.empty()) throw ValidationError("cannot train on an empty example set");
  for (const PreparedExample& example : examples) {
    if (!example.label.has_value()) {
      throw ValidationError("unlabeled row " + example.record_id +
                            " reached training; unlabeled rows are prediction-only");
    }
    if (example.span_vectors.cols() != encoder_width) {
      std::ostringstream msg;
      msg << "row " << example.record_id << ": span vectors have width "
          << example.span_vectors.cols() << ", expected encoder width " << encoder_width;
      throw ValidationError(msg.str());
    }
  }

  TrainOutcome outcome;
  outcome.params = init_probe(type, encoder_width, config.seed);
  outcome.majority_label = majority_label(examples);
  ProbeParams& params = outcome.params;
  const int rep_width = static_cast<int>(params.weight.cols());

  // AdamW first/second moments, one slot per tensor.
  Eigen::MatrixXd m_weight = Eigen::MatrixXd::Zero(2, rep_width);
  Eigen::MatrixXd v_weight = Eigen::MatrixXd::Zero(2, rep_width);
  Eigen::Vector2d m_bias = Eigen::Vector2d::Zero();
  Eigen::Vector2d v_bias = Eigen::Vector2d::Zero();
  Eigen::VectorXd m_scorer;
  Eigen::VectorXd v_scorer;
  if (params.scorer.has_value()) {
    m_scorer = Eigen::VectorXd::Zero(encoder_width);
    v_scorer = Eigen::VectorXd::Zero(encoder_width);
  }

  const double lr = config.learning_rate;
  const double beta1 = config.adam_beta1;
  const double beta2 = config.adam_beta2;
  const double eps = config.adam_eps;
  long step = 0;
  // Decoupled weight decay: shrink the parameter directly, keep the decay
  // term out of the moments. The bias is exempt.
  auto adam_step = [&](auto& param, const auto& grad, auto& m, auto& v, bool decay) {
    m = beta1 * m + (1.0 - beta1) * grad;
    v = (beta2 * v.array() + (1.0 - beta2) * grad.array().square()).matrix();
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    if (decay) param *= (1.0 - lr * config.weight_decay);
    param -= (lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + eps)).matrix();
  };

  rng::Generator shuffle_rng(rng::derive_stream(config.seed, "shuffle"));
  rng::Generator dropout_rng(rng::derive_stream(config.seed, "dropout"));
  std::vector<int> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  const int n = static_cast<int>(examples.size());
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (int begin = 0; begin < n; begin += config.batch_size) {
      const int end = std::min(begin + config.batch_size, n);
      const double inv_batch = 1.0 / (end - begin);
      Eigen::MatrixXd g_weight = Eigen::MatrixXd::Zero(2, rep_width);
      Eigen::Vector2d g_bias = Eigen::Vector2d::Zero();
      Eigen::VectorXd g_scorer;
      if (params.scorer.has_value()) g_scorer = Eigen::VectorXd::Zero(encoder_width);

      for (int i = begin; i < end; ++i) {
        const PreparedExample& example = examples[order[i]];
        Eigen::VectorXd scale = Eigen::VectorXd::Ones(rep_width);
        if (config.dropout_prob > 0.0) {
          const double keep_scale = 1.0 / (1.0 - config.dropout_prob);
          for (int k = 0; k < rep_width; ++k) {
            scale(k) = dropout_rng.next_bernoulli(config.dropout_prob) ? 0.0 : keep_scale;
          }
        }
        ProbeGradients grads;
        probe_loss_and_gradients(example.span_vectors, *example.label, params, scale, &grads);
        g_weight += inv_batch * grads.weight;
        g_bias += inv_batch * grads.bias;
        if (params.scorer.has_value()) g_scorer += inv_batch * grads.scorer;
      }

      ++step;
      adam_step(params.weight, g_weight, m_weight, v_weight, true);
      adam_step(params.bias, g_bias, m_bias, v_bias, false);
      if (params.scorer.has_value()) {
        adam_step(params.scorer->weights, g_scorer, m_scorer, v_scorer, true);
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    double loss_sum = 0.0;
    int correct = 0;
    for (const PreparedExample& example : examples) {
      const AttentiveScorer* scorer = params.scorer.has_value() ? &*params.scorer : nullptr;
      const Eigen::VectorXd rep = represent(example.span_vectors, type, scorer);
      const Eigen::Vector2d logits = probe_logits(rep, params);
      loss_sum += softmax_cross_entropy(logits, *example.label);
      if (predict_label(logits) == *example.label) ++correct;
    }
    stats.mean_loss = loss_sum / n;
    stats.train_accuracy = static_cast<double>(correct) / n;
    if (hook) stats.dev_macro_f1 = hook(epoch, params);
    outcome.trace.push_back(stats);
  }
  return outcome;
}

Label classify(const PreparedExample& example, const ProbeParams& params) {
  const AttentiveScorer* scorer = params.scorer.has_value() ? &*params.scorer : nullptr;
  const Eigen::VectorXd rep = represent(example.span_vectors, params.repr_type, scorer);
  return predict_label(probe_logits(rep, params));
}

std::vector<Prediction> classify_records(const std::vector<ExampleRecord>& records,
                                         const SpanPipeline& pipeline, const ProbeParams& params,
                                         Label fallback, PrepareStats* stats) {
  std::vector<Prediction> out;
  out.reserve(records.size());
  PrepareStats local;
  local.total = static_cast<int>(records.size());
  for (const ExampleRecord& record : records) {
    std::string reason;
    std::optional<PreparedExample> prepared = pipeline.prepare(record, &reason);
    Prediction prediction;
    prediction.record_id = record.id;
    if (prepared.has_value()) {
      ++local.prepared;
      if (prepared->context_trimmed) ++local.trimmed;
      prediction.label = classify(*prepared, params);
    } else {
      local.failures.push_back({record.id, reason});
      prediction.label = fallback;
      prediction.fallback = true;
    }
    out.push_back(std::move(prediction));
  }
  if (stats != nullptr) *stats = std::move(local);
  return out;
}

}  // namespace spanprobe
