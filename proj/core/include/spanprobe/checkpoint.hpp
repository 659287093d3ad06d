#pragma once

#include <filesystem>
#include <string>

#include "spanprobe/classifier.hpp"
#include "spanprobe/corpus.hpp"
#include "spanprobe/encoder.hpp"
#include "spanprobe/pipeline.hpp"

namespace spanprobe {

/// A trained probe plus everything needed to rebuild its run: encoder
/// spec, layer, combinator, split setting, preparation knobs and the
/// training recipe. Weights serialize as base64 little-endian float64, so
/// save -> load is bit-exact.
struct Checkpoint {
  EncoderSpec encoder;
  int layer = 0;
  Setting setting = Setting::ZERO_SHOT;
  ContextMode context_mode = ContextMode::TARGET_ONLY;
  double locate_threshold = 0.5;
  TrainConfig train;
  Label fallback_label = Label::IDIOMATIC;
  ProbeParams params;
};

std::string checkpoint_to_json(const Checkpoint& checkpoint);

/// Throws SchemaError naming `source` on malformed or mismatched content.
Checkpoint checkpoint_from_json(std::string_view json_text, std::string_view source = "<string>");

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace spanprobe
