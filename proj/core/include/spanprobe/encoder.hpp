#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "spanprobe/alignment.hpp"

namespace spanprobe {

enum class EncoderName { MBERT, XLMR_BASE, XLMR_LARGE, MOCK };

const char* encoder_name_str(EncoderName name);
EncoderName parse_encoder_name(std::string_view name);  // "mbert", "xlmr", "xlmr-large", "mock"

/// Which encoder to use and its dimensions. L counts transformer blocks;
/// the embedding output is addressed as layer 0, so encode() exposes L+1
/// layers. `trainable` requests fine-tuning below the probe layer; only
/// backends with gradient support accept it.
struct EncoderSpec {
  EncoderName name = EncoderName::MOCK;
  int num_layers = 2;     // L
  int hidden_width = 8;   // d
  bool trainable = false;
  int max_positions = 512;       // piece capacity including sequence markers
  std::uint64_t mock_seed = 42;  // MOCK only

  bool operator==(const EncoderSpec&) const = default;
};

/// Dimensions of the published checkpoints; MOCK gets small test-friendly
/// defaults that remain configurable.
EncoderSpec default_spec(EncoderName name);

/// Per-layer word vectors after subword mean pooling: layers[k] is a
/// (words x width) matrix, k = 0 the embedding output, k = 1..L the blocks.
struct LayeredWordVectors {
  int num_block_layers = 0;  // L
  int width = 0;             // d
  std::vector<Eigen::MatrixXf> layers;

  int num_words() const { return layers.empty() ? 0 : static_cast<int>(layers[0].rows()); }
};

/// Uniform interface over encoder backends. encode() preserves word count
/// and applies piece mean pooling through the alignment module; sequences
/// beyond the positional capacity raise TruncationError rather than being
/// cut silently.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual const EncoderSpec& spec() const = 0;
  /// Subword piece count per word, before markers. Lets callers shrink a
  /// context window to capacity without guessing tokenization.
  virtual std::vector<int> piece_counts(const std::vector<std::string>& words) const = 0;
  /// Positions consumed by sequence markers ([CLS]/[SEP] analogues).
  virtual int marker_positions() const = 0;
  virtual LayeredWordVectors encode(const std::vector<std::string>& words) const = 0;
};

/// Layer-k slice, one row per word. k is a 1-based transformer block
/// index, with 0 addressing the embedding output. Out-of-range k raises
/// ConfigError naming the valid range.
Eigen::MatrixXf select_layer(const LayeredWordVectors& vectors, int layer);

/// Deterministic encoder for tests: no weights, no network. Every subword
/// piece vector is a pure function of (piece string, layer, dimension) and
/// the seed:
///   cell  = splitmix64(splitmix64(seed ^ fnv1a(piece))
///                      ^ (uint64(layer) << 32) ^ uint64(dim))
///   value = (cell >> 11) * 2^-53 * 2 - 1            (uniform in [-1, 1))
/// Words of more than four code points split into four-code-point pieces
/// whose continuations carry a "##" prefix; word vectors are the mean of
/// their piece vectors, so single-piece words equal the hash of the word
/// itself. A [CLS]/[SEP] marker pair occupies the outer positions and
/// belongs to no word.
class MockEncoder : public Encoder {
 public:
  explicit MockEncoder(EncoderSpec spec);

  const EncoderSpec& spec() const override { return spec_; }
  std::vector<int> piece_counts(const std::vector<std::string>& words) const override;
  int marker_positions() const override { return 2; }
  LayeredWordVectors encode(const std::vector<std::string>& words) const override;

  /// The documented cell function, exposed for tests.
  static float cell_value(std::uint64_t seed, const std::string& piece, int layer, int dim);

  std::vector<Piece> tokenize(const std::vector<std::string>& words) const;

 private:
  EncoderSpec spec_;
};

struct EncoderOptions {
  /// Directory holding either a precomputed hidden-state dump (meta.json)
  /// or model weights, resolved per model name.
  std::filesystem::path registry_dir;
  bool offline = false;
};

/// Resolve a spec to a backend: MOCK builds the mock encoder, real model
/// names resolve through the registry directory. Raises EncoderError with
/// an actionable message when the backend is unavailable or the trainable
/// flag is unsupported.
std::unique_ptr<Encoder> make_encoder(const EncoderSpec& spec, const EncoderOptions& options = {});

}  // namespace spanprobe
