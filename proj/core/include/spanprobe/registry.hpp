#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spanprobe/encoder.hpp"

namespace spanprobe {

/// On-disk store of precomputed per-layer word vectors, keyed by the word
/// sequence. Lets a GPU box dump encoder activations once and the harness
/// train and evaluate probes offline. Layout:
///   meta.json    model name, L, d, entry count
///   index.json   key -> {offset, words}
///   vectors.bin  raw little-endian float32, (L+1) * words * d per entry
namespace registry {

/// Lookup key: fnv1a over the words joined with the unit separator 0x1F.
std::string sentence_key(const std::vector<std::string>& words);

class Writer {
 public:
  Writer(const std::filesystem::path& directory, std::string model_name, int num_block_layers,
         int width);
  ~Writer();

  void add(const std::vector<std::string>& words, const LayeredWordVectors& vectors);
  /// Write meta.json and index.json. Called automatically on destruction.
  void finalize();

 private:
  std::filesystem::path directory_;
  std::string model_name_;
  int num_block_layers_ = 0;
  int width_ = 0;
  std::uint64_t offset_ = 0;
  std::map<std::string, std::pair<std::uint64_t, int>> index_;  // key -> (offset, words)
  bool finalized_ = false;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& directory);

  const std::string& model_name() const { return model_name_; }
  int num_block_layers() const { return num_block_layers_; }
  int width() const { return width_; }
  std::size_t size() const { return index_.size(); }

  std::optional<LayeredWordVectors> lookup(const std::vector<std::string>& words) const;

 private:
  std::filesystem::path directory_;
  std::string model_name_;
  int num_block_layers_ = 0;
  int width_ = 0;
  std::map<std::string, std::pair<std::uint64_t, int>> index_;
};

/// True when the directory looks like a hidden-state dump.
bool is_registry(const std::filesystem::path& directory);

}  // namespace registry

/// Encoder backend serving vectors from a registry dump. Frozen by
/// definition; sentences missing from the dump raise EncoderError naming
/// the sentence so the dump can be regenerated.
class PrecomputedEncoder : public Encoder {
 public:
  PrecomputedEncoder(EncoderSpec spec, const std::filesystem::path& directory);

  const EncoderSpec& spec() const override { return spec_; }
  std::vector<int> piece_counts(const std::vector<std::string>& words) const override;
  int marker_positions() const override { return 0; }
  LayeredWordVectors encode(const std::vector<std::string>& words) const override;

 private:
  EncoderSpec spec_;
  registry::Reader reader_;
};

}  // namespace spanprobe
