#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spanprobe/pipeline.hpp"
#include "spanprobe/rng.hpp"
#include "spanprobe/span_repr.hpp"

namespace spanprobe {

/// The linear probe over a span representation: two logits (idiomatic /
/// non-idiomatic) plus, for the self-attentive combinator, its scorer.
struct ProbeParams {
  ReprType repr_type = ReprType::XY;
  Eigen::MatrixXd weight;  // 2 x representation width
  Eigen::Vector2d bias = Eigen::Vector2d::Zero();
  std::optional<AttentiveScorer> scorer;  // present iff repr_type is SELF_ATTENTIVE

  int input_width() const { return static_cast<int>(weight.cols()); }
};

enum class OptimizerKind { ADAMW };

struct TrainConfig {
  int epochs = 10;
  double learning_rate = 5e-5;
  double dropout_prob = 0.5;
  int batch_size = 32;
  std::uint64_t seed = 42;
  OptimizerKind optimizer = OptimizerKind::ADAMW;
  double weight_decay = 0.01;  // decoupled; never applied to the bias
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  bool operator==(const TrainConfig&) const = default;
};

struct EpochStats {
  int epoch = 0;             // 1-based
  double mean_loss = 0.0;    // full-pass cross entropy after the epoch, dropout off
  double train_accuracy = 0.0;
  std::optional<double> dev_macro_f1;
};

/// Ran after each epoch; a returned value is recorded as that epoch's dev
/// macro F1.
using EpochHook = std::function<std::optional<double>(int epoch, const ProbeParams& params)>;

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialization from the "init"
/// stream of `seed`. Draw order is pinned (weight row-major, then bias,
/// then scorer) so checkpoints reproduce bit-for-bit.
ProbeParams init_probe(ReprType type, int encoder_width, std::uint64_t seed);

Eigen::Vector2d softmax2(const Eigen::Vector2d& logits);

/// -log softmax(logits)[gold], computed with the max-shift trick.
double softmax_cross_entropy(const Eigen::Vector2d& logits, Label gold);

/// Argmax; an exact tie resolves to IDIOMATIC (label 0).
Label predict_label(const Eigen::Vector2d& logits);

/// Inference forward pass: representation -> linear layer. No dropout.
Eigen::Vector2d probe_logits(const Eigen::Ref<const Eigen::VectorXd>& representation,
                             const ProbeParams& params);

/// Training forward pass. Inverted dropout: each coordinate is kept with
/// probability 1-p and scaled by 1/(1-p), so inference needs no rescaling.
/// The applied scale vector (0 or 1/(1-p) per coordinate) is written to
/// `scale_out` when given.
Eigen::Vector2d probe_logits_train(const Eigen::Ref<const Eigen::VectorXd>& representation,
                                   const ProbeParams& params, double dropout_prob,
                                   rng::Generator& gen, Eigen::VectorXd* scale_out = nullptr);

struct ProbeGradients {
  Eigen::MatrixXd weight;
  Eigen::Vector2d bias = Eigen::Vector2d::Zero();
  Eigen::VectorXd scorer;  // size 0 without a scorer
};

/// Loss and analytic gradients for one span under a fixed dropout scale
/// vector (pass all-ones for no dropout). Differentiates through the
/// representation into the scorer when present. Holding the scale fixed
/// makes the function deterministic, so finite differences of this same
/// function validate the gradients.
double probe_loss_and_gradients(const Eigen::Ref<const Eigen::MatrixXd>& span_vectors, Label gold,
                                const ProbeParams& params,
                                const Eigen::Ref<const Eigen::VectorXd>& dropout_scale,
                                ProbeGradients* gradients = nullptr);

struct TrainOutcome {
  ProbeParams params;
  std::vector<EpochStats> trace;
  Label majority_label = Label::IDIOMATIC;  // of the training examples; tie -> IDIOMATIC
};

/// Most frequent gold label; ties resolve to IDIOMATIC. Used as the
/// fallback prediction for rows whose MWE cannot be located.
Label majority_label(const std::vector<PreparedExample>& examples);

/// Mini-batch AdamW over shuffled epochs. Batch gradients are means over
/// the batch; one optimizer step per batch, step count shared across
/// epochs. RNG streams "shuffle", "dropout" and "init" derive from
/// config.seed, so equal inputs give bit-equal outcomes. Every example
/// must carry a gold label; epochs = 0 returns the initialization
/// untouched.
TrainOutcome train_probe(const std::vector<PreparedExample>& examples, ReprType type,
                         int encoder_width, const TrainConfig& config,
                         const EpochHook& hook = {});

Label classify(const PreparedExample& example, const ProbeParams& params);

struct Prediction {
  std::string record_id;
  Label label = Label::IDIOMATIC;
  bool fallback = false;  // MWE not located; majority label substituted
};

/// Predict every record, in order. Rows whose span cannot be prepared get
/// `fallback` with the flag set instead of being dropped.
std::vector<Prediction> classify_records(const std::vector<ExampleRecord>& records,
                                         const SpanPipeline& pipeline, const ProbeParams& params,
                                         Label fallback, PrepareStats* stats = nullptr);

}  // namespace spanprobe
