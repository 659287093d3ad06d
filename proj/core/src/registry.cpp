#include "spanprobe/registry.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "spanprobe/errors.hpp"
#include "spanprobe/rng.hpp"

namespace spanprobe {
namespace registry {

namespace {

constexpr const char* kMetaFile = "meta.json";
constexpr const char* kIndexFile = "index.json";
constexpr const char* kVectorsFile = "vectors.bin";
constexpr const char* kFormatTag = "spanprobe-registry";
constexpr int kFormatVersion = 1;

std::string joined(const std::vector<std::string>& words) {
  std::string joined_words;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) joined_words.push_back('\x1f');
    joined_words += words[i];
  }
  return joined_words;
}

}  // namespace

std::string sentence_key(const std::vector<std::string>& words) {
  const std::uint64_t h = rng::fnv1a(joined(words));
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buffer);
}

bool is_registry(const std::filesystem::path& directory) {
  return std::filesystem::exists(directory / kMetaFile);
}

Writer::Writer(const std::filesystem::path& directory, std::string model_name,
               int num_block_layers, int width)
    : directory_(directory),
      model_name_(std::move(model_name)),
      num_block_layers_(num_block_layers),
      width_(width) {
  std::filesystem::create_directories(directory_);
  // Truncate any previous dump.
  std::ofstream out(directory_ / kVectorsFile, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ConfigError("cannot create " + (directory_ / kVectorsFile).string());
  }
}

Writer::~Writer() {
  try {
    finalize();
  } catch (...) {
    // Destructor must not throw; an explicit finalize() call surfaces errors.
  }
}

void Writer::add(const std::vector<std::string>& words, const LayeredWordVectors& vectors) {
  if (vectors.num_block_layers != num_block_layers_ || vectors.width != width_) {
    throw ConfigError("registry writer: vector dimensions (L=" +
                      std::to_string(vectors.num_block_layers) + ", d=" +
                      std::to_string(vectors.width) + ") do not match the registry (L=" +
                      std::to_string(num_block_layers_) + ", d=" + std::to_string(width_) + ")");
  }
  if (vectors.num_words() != static_cast<int>(words.size())) {
    throw ConfigError("registry writer: word count mismatch");
  }
  const std::string key = sentence_key(words);
  if (index_.count(key)) return;  // already dumped

  std::ofstream out(directory_ / kVectorsFile, std::ios::binary | std::ios::app);
  if (!out) {
    throw ConfigError("cannot append to " + (directory_ / kVectorsFile).string());
  }
  for (const Eigen::MatrixXf& layer : vectors.layers) {
    for (Eigen::Index row = 0; row < layer.rows(); ++row) {
      for (Eigen::Index col = 0; col < layer.cols(); ++col) {
        const float value = layer(row, col);
        out.write(reinterpret_cast<const char*>(&value), sizeof(float));
      }
    }
  }
  index_[key] = {offset_, static_cast<int>(words.size())};
  offset_ += static_cast<std::uint64_t>(num_block_layers_ + 1) * words.size() * width_ *
             sizeof(float);
}

void Writer::finalize() {
  if (finalized_) return;
  finalized_ = true;

  nlohmann::json meta;
  meta["format"] = kFormatTag;
  meta["version"] = kFormatVersion;
  meta["model"] = model_name_;
  meta["num_layers"] = num_block_layers_;
  meta["width"] = width_;
  meta["entries"] = index_.size();
  std::ofstream meta_out(directory_ / kMetaFile, std::ios::binary);
  meta_out << meta.dump(2) << "\n";

  nlohmann::json index;
  for (const auto& [key, value] : index_) {
    index[key] = {{"offset", value.first}, {"words", value.second}};
  }
  std::ofstream index_out(directory_ / kIndexFile, std::ios::binary);
  index_out << index.dump() << "\n";
  if (!meta_out || !index_out) {
    throw ConfigError("cannot write registry metadata under " + directory_.string());
  }
}

Reader::Reader(const std::filesystem::path& directory) : directory_(directory) {
  std::ifstream meta_in(directory_ / kMetaFile, std::ios::binary);
  if (!meta_in) {
    throw EncoderError("no hidden-state dump at " + directory_.string() + " (missing " +
                       kMetaFile + ")");
  }
  nlohmann::json meta = nlohmann::json::parse(meta_in, nullptr, true, true);
  if (meta.value("format", "") != kFormatTag) {
    throw EncoderError(directory_.string() + "/" + kMetaFile + " is not a hidden-state dump");
  }
  model_name_ = meta.at("model").get<std::string>();
  num_block_layers_ = meta.at("num_layers").get<int>();
  width_ = meta.at("width").get<int>();

  std::ifstream index_in(directory_ / kIndexFile, std::ios::binary);
  if (!index_in) {
    throw EncoderError("registry at " + directory_.string() + " is missing " + kIndexFile);
  }
  nlohmann::json index = nlohmann::json::parse(index_in, nullptr, true, true);
  for (const auto& [key, value] : index.items()) {
    index_[key] = {value.at("offset").get<std::uint64_t>(), value.at("words").get<int>()};
  }
}

std::optional<LayeredWordVectors> Reader::lookup(const std::vector<std::string>& words) const {
  const auto it = index_.find(sentence_key(words));
  if (it == index_.end()) return std::nullopt;
  const auto [offset, word_count] = it->second;
  if (word_count != static_cast<int>(words.size())) {
    throw EncoderError("registry entry word count mismatch for key " + it->first +
                       " (hash collision or stale dump)");
  }

  std::ifstream in(directory_ / kVectorsFile, std::ios::binary);
  if (!in) {
    throw EncoderError("registry at " + directory_.string() + " is missing " + kVectorsFile);
  }
  in.seekg(static_cast<std::streamoff>(offset));

  LayeredWordVectors out;
  out.num_block_layers = num_block_layers_;
  out.width = width_;
  out.layers.reserve(static_cast<std::size_t>(num_block_layers_) + 1);
  for (int layer = 0; layer <= num_block_layers_; ++layer) {
    Eigen::MatrixXf matrix(word_count, width_);
    for (Eigen::Index row = 0; row < matrix.rows(); ++row) {
      for (Eigen::Index col = 0; col < matrix.cols(); ++col) {
        float value = 0.0f;
        in.read(reinterpret_cast<char*>(&value), sizeof(float));
        matrix(row, col) = value;
      }
    }
    out.layers.push_back(std::move(matrix));
  }
  if (!in) {
    throw EncoderError("registry at " + directory_.string() + " ends prematurely; re-dump");
  }
  return out;
}

}  // namespace registry

PrecomputedEncoder::PrecomputedEncoder(EncoderSpec spec, const std::filesystem::path& directory)
    : spec_(std::move(spec)), reader_(directory) {
  if (reader_.num_block_layers() != spec_.num_layers || reader_.width() != spec_.hidden_width) {
    throw EncoderError("hidden-state dump at " + directory.string() + " was made for L=" +
                       std::to_string(reader_.num_block_layers()) + ", d=" +
                       std::to_string(reader_.width()) + " but the requested encoder has L=" +
                       std::to_string(spec_.num_layers) + ", d=" +
                       std::to_string(spec_.hidden_width));
  }
}

std::vector<int> PrecomputedEncoder::piece_counts(const std::vector<std::string>& words) const {
  // Capacity was resolved when the dump was produced.
  return std::vector<int>(words.size(), 1);
}

LayeredWordVectors PrecomputedEncoder::encode(const std::vector<std::string>& words) const {
  if (words.empty()) throw ValidationError("encode: empty word sequence");
  auto vectors = reader_.lookup(words);
  if (!vectors.has_value()) {
    std::string sentence;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) sentence.push_back(' ');
      sentence += words[i];
    }
    throw EncoderError("sentence not in the hidden-state dump (key " +
                       registry::sentence_key(words) + "): \"" + sentence +
                       "\"; regenerate the dump to cover the corpus");
  }
  return std::move(*vectors);
}

}  // namespace spanprobe
