#include "spanprobe/encoder.hpp"

#include <algorithm>

#include "spanprobe/errors.hpp"
#include "spanprobe/registry.hpp"
#include "spanprobe/rng.hpp"
#include "spanprobe/text.hpp"

namespace spanprobe {

const char* encoder_name_str(EncoderName name) {
  switch (name) {
    case EncoderName::MBERT: return "mbert";
    case EncoderName::XLMR_BASE: return "xlmr";
    case EncoderName::XLMR_LARGE: return "xlmr-large";
    case EncoderName::MOCK: return "mock";
  }
  return "?";
}

EncoderName parse_encoder_name(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 0x20);
    if (c == '_') c = '-';
  }
  if (lower == "mbert") return EncoderName::MBERT;
  if (lower == "xlmr" || lower == "xlmr-base" || lower == "xlm-r") return EncoderName::XLMR_BASE;
  if (lower == "xlmr-large" || lower == "xlm-r-l" || lower == "xlmr-l") {
    return EncoderName::XLMR_LARGE;
  }
  if (lower == "mock") return EncoderName::MOCK;
  throw ConfigError("unknown encoder \"" + std::string(name) +
                    "\" (expected mbert, xlmr, xlmr-large or mock)");
}

EncoderSpec default_spec(EncoderName name) {
  EncoderSpec spec;
  spec.name = name;
  switch (name) {
    case EncoderName::MBERT:
      spec.num_layers = 12;
      spec.hidden_width = 768;
      break;
    case EncoderName::XLMR_BASE:
      spec.num_layers = 12;
      spec.hidden_width = 768;
      break;
    case EncoderName::XLMR_LARGE:
      spec.num_layers = 24;
      spec.hidden_width = 1024;
      break;
    case EncoderName::MOCK:
      spec.num_layers = 2;
      spec.hidden_width = 8;
      break;
  }
  return spec;
}

Eigen::MatrixXf select_layer(const LayeredWordVectors& vectors, int layer) {
  if (layer < 0 || layer > vectors.num_block_layers) {
    throw ConfigError("layer " + std::to_string(layer) + " out of range; valid layers are 0 (" +
                      "embedding output) through " + std::to_string(vectors.num_block_layers));
  }
  return vectors.layers[static_cast<std::size_t>(layer)];
}

MockEncoder::MockEncoder(EncoderSpec spec) : spec_(std::move(spec)) {
  if (spec_.num_layers < 1 || spec_.hidden_width < 1) {
    throw ConfigError("mock encoder needs num_layers >= 1 and hidden_width >= 1");
  }
  if (spec_.trainable) {
    throw EncoderError(
        "the mock encoder has no trainable parameters; rerun with encoder_trainable=false");
  }
}

std::vector<Piece> MockEncoder::tokenize(const std::vector<std::string>& words) const {
  // Four code points per piece, continuations marked "##" (mirrors the
  // wordpiece look so alignment fixtures read naturally).
  constexpr std::size_t piece_len = 4;
  std::vector<Piece> pieces;
  pieces.push_back(Piece{"[CLS]", -1});
  for (std::size_t w = 0; w < words.size(); ++w) {
    const std::u32string cps = text::decode_utf8(words[w]);
    if (cps.size() <= piece_len) {
      pieces.push_back(Piece{words[w], static_cast<int>(w)});
      continue;
    }
    for (std::size_t offset = 0; offset < cps.size(); offset += piece_len) {
      const std::u32string chunk = cps.substr(offset, piece_len);
      std::string token = text::encode_utf8(chunk);
      if (offset > 0) token = "##" + token;
      pieces.push_back(Piece{std::move(token), static_cast<int>(w)});
    }
  }
  pieces.push_back(Piece{"[SEP]", -1});
  return pieces;
}

std::vector<int> MockEncoder::piece_counts(const std::vector<std::string>& words) const {
  std::vector<int> counts(words.size(), 0);
  for (const Piece& piece : tokenize(words)) {
    if (piece.word_index >= 0) ++counts[static_cast<std::size_t>(piece.word_index)];
  }
  return counts;
}

float MockEncoder::cell_value(std::uint64_t seed, const std::string& piece, int layer, int dim) {
  const std::uint64_t piece_state = rng::splitmix64(seed ^ rng::fnv1a(piece));
  const std::uint64_t cell = rng::splitmix64(
      piece_state ^ (static_cast<std::uint64_t>(layer) << 32) ^ static_cast<std::uint64_t>(dim));
  const double unit = static_cast<double>(cell >> 11) * 0x1.0p-53;
  return static_cast<float>(unit * 2.0 - 1.0);
}

LayeredWordVectors MockEncoder::encode(const std::vector<std::string>& words) const {
  if (words.empty()) throw ValidationError("encode: empty word sequence");
  const std::vector<Piece> pieces = tokenize(words);
  if (static_cast<int>(pieces.size()) > spec_.max_positions) {
    throw TruncationError("sequence of " + std::to_string(words.size()) + " words (" +
                          std::to_string(pieces.size()) + " pieces with markers) exceeds the " +
                          "positional capacity " + std::to_string(spec_.max_positions));
  }
  const std::vector<PieceAlignment> alignments = align(words, pieces);

  LayeredWordVectors out;
  out.num_block_layers = spec_.num_layers;
  out.width = spec_.hidden_width;
  out.layers.reserve(static_cast<std::size_t>(spec_.num_layers) + 1);
  for (int layer = 0; layer <= spec_.num_layers; ++layer) {
    Eigen::MatrixXf piece_matrix(static_cast<Eigen::Index>(pieces.size()), spec_.hidden_width);
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      for (int dim = 0; dim < spec_.hidden_width; ++dim) {
        piece_matrix(static_cast<Eigen::Index>(p), dim) =
            cell_value(spec_.mock_seed, pieces[p].token, layer, dim);
      }
    }
    Eigen::MatrixXf word_matrix(static_cast<Eigen::Index>(words.size()), spec_.hidden_width);
    for (const PieceAlignment& alignment : alignments) {
      word_matrix.row(alignment.word_index) = pool_pieces(
          piece_matrix.middleRows(alignment.piece_begin, alignment.piece_end - alignment.piece_begin));
    }
    out.layers.push_back(std::move(word_matrix));
  }
  return out;
}

std::unique_ptr<Encoder> make_encoder(const EncoderSpec& spec, const EncoderOptions& options) {
  if (spec.name == EncoderName::MOCK) {
    return std::make_unique<MockEncoder>(spec);
  }
  if (spec.trainable) {
    throw EncoderError(std::string("encoder \"") + encoder_name_str(spec.name) +
                       "\" only supports the frozen path in this build; rerun with "
                       "encoder_trainable=false or fine-tune on a backend with gradient support");
  }
  if (options.registry_dir.empty()) {
    throw EncoderError(std::string("no registry directory configured for encoder \"") +
                       encoder_name_str(spec.name) +
                       "\"; pass --registry-dir pointing at a hidden-state dump" +
                       (options.offline ? " (offline mode is on)" : ""));
  }
  const auto model_dir = options.registry_dir / encoder_name_str(spec.name);
  if (registry::is_registry(model_dir)) {
    return std::make_unique<PrecomputedEncoder>(spec, model_dir);
  }
  if (registry::is_registry(options.registry_dir)) {
    return std::make_unique<PrecomputedEncoder>(spec, options.registry_dir);
  }
  throw EncoderError("registry directory " + options.registry_dir.string() +
                     " holds no hidden-state dump for encoder \"" + encoder_name_str(spec.name) +
                     "\" (expected meta.json in it or in the \"" + encoder_name_str(spec.name) +
                     "\" subdirectory)");
}

}  // namespace spanprobe
