#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "spanprobe/corpus.hpp"
#include "spanprobe/encoder.hpp"
#include "spanprobe/span_locator.hpp"

namespace spanprobe {

/// What the encoder sees: the target sentence alone, or the previous and
/// next sentences around it.
enum class ContextMode { TARGET_ONLY, WITH_CONTEXT };

const char* context_mode_name(ContextMode mode);
ContextMode parse_context_mode(std::string_view name);

/// A corpus row resolved to the layer-k word vectors of its MWE span.
struct PreparedExample {
  std::string record_id;
  Language language = Language::EN;
  std::optional<Label> label;
  Eigen::MatrixXd span_vectors;  // span words x encoder width
  bool context_trimmed = false;  // capacity forced dropping non-span words
};

struct PipelineOptions {
  int layer = -1;  // -1 picks the top block layer
  ContextMode context_mode = ContextMode::TARGET_ONLY;
  double locate_threshold = 0.5;
};

struct PrepareFailure {
  std::string record_id;
  std::string reason;
};

struct PrepareStats {
  int total = 0;
  int prepared = 0;
  int trimmed = 0;
  std::vector<PrepareFailure> failures;

  double failure_rate() const {
    return total == 0 ? 0.0 : static_cast<double>(failures.size()) / total;
  }
};

/// The assembled encode -> locate -> align -> extract chain. Pure given a
/// frozen encoder, so concurrent prepare calls are safe.
class SpanPipeline {
 public:
  SpanPipeline(const Encoder& encoder, PipelineOptions options);

  const PipelineOptions& options() const { return options_; }
  int layer() const { return layer_; }
  int encoder_width() const { return encoder_->spec().hidden_width; }

  /// Locate the MWE and extract its span vectors. Localization misses
  /// fill `failure_reason` and return nullopt; a sentence whose MWE span
  /// alone exceeds the encoder capacity raises TruncationError naming the
  /// row.
  std::optional<PreparedExample> prepare(const ExampleRecord& record,
                                         std::string* failure_reason = nullptr) const;

  /// Prepare a batch, collecting failures instead of dropping them
  /// silently.
  std::vector<PreparedExample> prepare_many(const std::vector<ExampleRecord>& records,
                                            PrepareStats* stats) const;

 private:
  const Encoder* encoder_;
  PipelineOptions options_;
  int layer_ = 0;
};

}  // namespace spanprobe
