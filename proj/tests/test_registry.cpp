#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "spanprobe/encoder.hpp"
#include "spanprobe/errors.hpp"
#include "spanprobe/registry.hpp"
#include "support/fixtures.hpp"

using namespace spanprobe;

namespace {

EncoderSpec small_real_spec() {
  EncoderSpec spec;
  spec.name = EncoderName::MBERT;
  spec.num_layers = 2;
  spec.hidden_width = 4;
  return spec;
}

}  // namespace

TEST_SUITE("registry") {

TEST_CASE("sentence keys are sensitive to word boundaries") {
  CHECK(registry::sentence_key({"ab", "c"}) != registry::sentence_key({"a", "bc"}));
  CHECK(registry::sentence_key({"ab", "c"}) == registry::sentence_key({"ab", "c"}));
  CHECK(registry::sentence_key({}) == registry::sentence_key({}));
}

TEST_CASE("a dump round-trips vectors bit-exactly") {
  const auto dir = fixtures::scratch_dir("registry-roundtrip");

  EncoderSpec mock;
  mock.num_layers = 2;
  mock.hidden_width = 4;
  const MockEncoder source(mock);
  const std::vector<std::vector<std::string>> sentences = {
      {"spill", "the", "beans"}, {"pedra", "viva"}, {"lúa"}};

  {
    registry::Writer writer(dir, "mbert", mock.num_layers, mock.hidden_width);
    for (const auto& words : sentences) writer.add(words, source.encode(words));
    writer.finalize();
  }

  CHECK(registry::is_registry(dir));
  registry::Reader reader(dir);
  CHECK(reader.model_name() == "mbert");
  CHECK(reader.num_block_layers() == 2);
  CHECK(reader.width() == 4);
  CHECK(reader.size() == 3);

  for (const auto& words : sentences) {
    const auto stored = reader.lookup(words);
    REQUIRE(stored.has_value());
    const auto fresh = source.encode(words);
    REQUIRE(stored->layers.size() == fresh.layers.size());
    for (std::size_t layer = 0; layer < fresh.layers.size(); ++layer) {
      CHECK((stored->layers[layer].array() == fresh.layers[layer].array()).all());
    }
  }
  CHECK_FALSE(reader.lookup({"absent", "words"}).has_value());

  std::filesystem::remove_all(dir);
}

TEST_CASE("precomputed encoder serves dumped sentences and names missing ones") {
  const auto dir = fixtures::scratch_dir("registry-encoder");
  const auto spec = small_real_spec();

  EncoderSpec mock;
  mock.num_layers = spec.num_layers;
  mock.hidden_width = spec.hidden_width;
  const MockEncoder source(mock);
  const std::vector<std::string> words{"vento", "forte"};
  {
    registry::Writer writer(dir, "mbert", spec.num_layers, spec.hidden_width);
    writer.add(words, source.encode(words));
  }  // destructor finalizes

  PrecomputedEncoder encoder(spec, dir);
  CHECK(encoder.marker_positions() == 0);
  CHECK(encoder.piece_counts({"a", "b", "c"}) == std::vector<int>{1, 1, 1});
  const auto served = encoder.encode(words);
  const auto fresh = source.encode(words);
  for (std::size_t layer = 0; layer < fresh.layers.size(); ++layer) {
    CHECK((served.layers[layer].array() == fresh.layers[layer].array()).all());
  }
  CHECK_THROWS_AS(encoder.encode({"not", "dumped"}), EncoderError);

  std::filesystem::remove_all(dir);
}

TEST_CASE("dimension mismatches between spec and dump are refused") {
  const auto dir = fixtures::scratch_dir("registry-mismatch");
  {
    registry::Writer writer(dir, "mbert", 2, 4);
    EncoderSpec mock;
    mock.num_layers = 2;
    mock.hidden_width = 4;
    writer.add({"a"}, MockEncoder(mock).encode({"a"}));
  }
  auto wrong_width = small_real_spec();
  wrong_width.hidden_width = 8;
  CHECK_THROWS_AS(PrecomputedEncoder(wrong_width, dir), EncoderError);
  auto wrong_layers = small_real_spec();
  wrong_layers.num_layers = 3;
  CHECK_THROWS_AS(PrecomputedEncoder(wrong_layers, dir), EncoderError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("make_encoder resolves real models through the registry directory") {
  const auto root = fixtures::scratch_dir("registry-resolve");
  const auto spec = small_real_spec();
  {
    registry::Writer writer(root / "mbert", "mbert", spec.num_layers, spec.hidden_width);
    EncoderSpec mock;
    mock.num_layers = spec.num_layers;
    mock.hidden_width = spec.hidden_width;
    writer.add({"auga", "fervendo"}, MockEncoder(mock).encode({"auga", "fervendo"}));
  }

  EncoderOptions options;
  options.registry_dir = root;
  const auto encoder = make_encoder(spec, options);
  CHECK(encoder->spec().name == EncoderName::MBERT);
  CHECK_NOTHROW(encoder->encode({"auga", "fervendo"}));

  // No dump for this name anywhere under the directory.
  EncoderSpec other = spec;
  other.name = EncoderName::XLMR_BASE;
  CHECK_THROWS_AS(make_encoder(other, options), EncoderError);

  std::filesystem::remove_all(root);
}

TEST_CASE("is_registry rejects unrelated directories") {
  const auto dir = fixtures::scratch_dir("registry-not");
  CHECK_FALSE(registry::is_registry(dir));
  CHECK_FALSE(registry::is_registry(dir / "missing"));
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE
