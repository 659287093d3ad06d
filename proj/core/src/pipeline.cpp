#include "spanprobe/pipeline.hpp"

#include <numeric>
#include <sstream>

#include "spanprobe/errors.hpp"
#include "spanprobe/text.hpp"

namespace spanprobe {

const char* context_mode_name(ContextMode mode) {
  switch (mode) {
    case ContextMode::TARGET_ONLY: return "target-only";
    case ContextMode::WITH_CONTEXT: return "with-context";
  }
  return "?";
}

ContextMode parse_context_mode(std::string_view name) {
  if (name == "target-only" || name == "target_only" || name == "target") {
    return ContextMode::TARGET_ONLY;
  }
  if (name == "with-context" || name == "with_context" || name == "context") {
    return ContextMode::WITH_CONTEXT;
  }
  throw ConfigError("unknown context mode '" + std::string(name) +
                    "' (expected target-only or with-context)");
}

SpanPipeline::SpanPipeline(const Encoder& encoder, PipelineOptions options)
    : encoder_(&encoder), options_(options) {
  const EncoderSpec& spec = encoder.spec();
  layer_ = options_.layer < 0 ? spec.num_layers : options_.layer;
  if (layer_ > spec.num_layers) {
    std::ostringstream msg;
    msg << "layer " << layer_ << " out of range for " << encoder_name_str(spec.name)
        << " (valid: 0.." << spec.num_layers << ")";
    throw ConfigError(msg.str());
  }
}

std::optional<PreparedExample> SpanPipeline::prepare(const ExampleRecord& record,
                                                     std::string* failure_reason) const {
  const std::vector<text::Word> target_words = text::split_words_utf8(record.target);
  const LocateResult located = try_locate_mwe(record.mwe, record.target, options_.locate_threshold);
  if (!located.found) {
    if (failure_reason != nullptr) {
      std::ostringstream msg;
      msg << "could not locate \"" << record.mwe << "\" in row " << record.id;
      if (target_words.empty()) {
        msg << " (sentence has no words)";
      } else {
        msg << " (closest candidate at edit distance " << located.best.distance
            << ", normalized " << located.best.normalized_distance << " > threshold "
            << options_.locate_threshold << ")";
      }
      *failure_reason = msg.str();
    }
    return std::nullopt;
  }

  const WordSpan span = char_span_to_word_span(located.best, target_words);

  std::vector<std::string> words;
  int span_first = span.first_word;
  if (options_.context_mode == ContextMode::WITH_CONTEXT) {
    for (const text::Word& w : text::split_words_utf8(record.previous)) words.push_back(w.utf8);
    span_first += static_cast<int>(words.size());
    for (const text::Word& w : target_words) words.push_back(w.utf8);
    for (const text::Word& w : text::split_words_utf8(record.next)) words.push_back(w.utf8);
  } else {
    words.reserve(target_words.size());
    for (const text::Word& w : target_words) words.push_back(w.utf8);
  }
  int span_last = span_first + span.word_count - 1;

  // Fit to the encoder's positional capacity. Context words may be shed
  // around the span; the span itself may not.
  const std::vector<int> counts = encoder_->piece_counts(words);
  const int budget = encoder_->spec().max_positions - encoder_->marker_positions();
  const long total = std::accumulate(counts.begin(), counts.end(), 0L);
  bool trimmed = false;
  if (total > budget) {
    long span_total = 0;
    for (int i = span_first; i <= span_last; ++i) span_total += counts[i];
    if (span_total > budget) {
      std::ostringstream msg;
      msg << "row " << record.id << ": MWE span alone needs " << span_total
          << " encoder positions plus " << encoder_->marker_positions()
          << " markers, over the capacity of " << encoder_->spec().max_positions;
      throw TruncationError(msg.str());
    }
    // Grow a window outward from the span, alternating sides, until
    // nothing more fits.
    int lo = span_first;
    int hi = span_last;
    long used = span_total;
    bool left_turn = true;
    for (;;) {
      const bool can_left = lo > 0 && used + counts[lo - 1] <= budget;
      const bool can_right = hi + 1 < static_cast<int>(words.size()) && used + counts[hi + 1] <= budget;
      if (!can_left && !can_right) break;
      if ((left_turn && can_left) || !can_right) {
        used += counts[--lo];
      } else {
        used += counts[++hi];
      }
      left_turn = !left_turn;
    }
    words = std::vector<std::string>(words.begin() + lo, words.begin() + hi + 1);
    span_first -= lo;
    span_last -= lo;
    trimmed = true;
  }

  const LayeredWordVectors encoded = encoder_->encode(words);
  const Eigen::MatrixXf layer_matrix = select_layer(encoded, layer_);

  PreparedExample out;
  out.record_id = record.id;
  out.language = record.language;
  out.label = record.label;
  out.context_trimmed = trimmed;
  out.span_vectors =
      layer_matrix.block(span_first, 0, span.word_count, layer_matrix.cols()).cast<double>();
  return out;
}

std::vector<PreparedExample> SpanPipeline::prepare_many(
    const std::vector<ExampleRecord>& records, PrepareStats* stats) const {
  std::vector<PreparedExample> out;
  out.reserve(records.size());
  PrepareStats local;
  local.total = static_cast<int>(records.size());
  for (const ExampleRecord& record : records) {
    std::string reason;
    std::optional<PreparedExample> prepared = prepare(record, &reason);
    if (prepared.has_value()) {
      ++local.prepared;
      if (prepared->context_trimmed) ++local.trimmed;
      out.push_back(std::move(*prepared));
    } else {
      local.failures.push_back({record.id, reason});
    }
  }
  if (stats != nullptr) *stats = std::move(local);
  return out;
}

}  // namespace spanprobe
