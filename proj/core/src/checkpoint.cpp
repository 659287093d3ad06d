#include "spanprobe/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"
#include "spanprobe/errors.hpp"

namespace spanprobe {

namespace {

using nlohmann::json;

constexpr char kSchemaTag[] = "spanprobe-checkpoint/1";
constexpr char kBase64Alphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string b64_encode(const std::vector<unsigned char>& bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out.push_back(kBase64Alphabet[v & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kBase64Alphabet[(v >> 18) & 63]);
    out.push_back(kBase64Alphabet[(v >> 12) & 63]);
    out.push_back(kBase64Alphabet[(v >> 6) & 63]);
    out += "=";
  }
  return out;
}

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::vector<unsigned char> b64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw SchemaError("base64 payload length is not a multiple of 4");
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw SchemaError("base64 padding misplaced");
        vals[k] = 0;
        ++pad;
      } else {
        if (pad > 0) throw SchemaError("base64 padding misplaced");
        vals[k] = b64_value(c);
        if (vals[k] < 0) throw SchemaError(std::string("base64 payload has invalid byte '") + c + "'");
      }
    }
    const std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
    if (pad < 2) out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<unsigned char>(v & 0xFF));
  }
  return out;
}

// Doubles serialize little-endian regardless of host order.
void append_double(std::vector<unsigned char>& bytes, double value) {
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof bits);
  for (int k = 0; k < 8; ++k) bytes.push_back(static_cast<unsigned char>((bits >> (8 * k)) & 0xFF));
}

double read_double(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(p[k]) << (8 * k);
  double value = 0.0;
  std::memcpy(&value, &bits, sizeof value);
  return value;
}

std::string doubles_to_b64(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  std::vector<unsigned char> bytes;
  bytes.reserve(static_cast<std::size_t>(m.size()) * 8);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) append_double(bytes, m(r, c));
  }
  return b64_encode(bytes);
}

Eigen::MatrixXd b64_to_matrix(const std::string& text, Eigen::Index rows, Eigen::Index cols,
                              const char* what) {
  const std::vector<unsigned char> bytes = b64_decode(text);
  if (bytes.size() != static_cast<std::size_t>(rows * cols) * 8) {
    std::ostringstream msg;
    msg << what << ": expected " << rows * cols << " float64 values, payload holds "
        << bytes.size() / 8;
    throw SchemaError(msg.str());
  }
  Eigen::MatrixXd m(rows, cols);
  std::size_t offset = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c, offset += 8) m(r, c) = read_double(&bytes[offset]);
  }
  return m;
}

const char* optimizer_name(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::ADAMW: return "adamw";
  }
  return "?";
}

OptimizerKind parse_optimizer(const std::string& name) {
  if (name == "adamw") return OptimizerKind::ADAMW;
  throw SchemaError("unknown optimizer '" + name + "'");
}

}  // namespace

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  const ProbeParams& params = checkpoint.params;
  json j;
  j["schema"] = kSchemaTag;
  j["encoder"] = {{"name", encoder_name_str(checkpoint.encoder.name)},
                  {"num_layers", checkpoint.encoder.num_layers},
                  {"hidden_width", checkpoint.encoder.hidden_width},
                  {"trainable", checkpoint.encoder.trainable},
                  {"max_positions", checkpoint.encoder.max_positions},
                  {"mock_seed", checkpoint.encoder.mock_seed}};
  j["layer"] = checkpoint.layer;
  j["setting"] = setting_name(checkpoint.setting);
  j["context_mode"] = context_mode_name(checkpoint.context_mode);
  j["locate_threshold"] = checkpoint.locate_threshold;
  j["train"] = {{"epochs", checkpoint.train.epochs},
                {"learning_rate", checkpoint.train.learning_rate},
                {"dropout_prob", checkpoint.train.dropout_prob},
                {"batch_size", checkpoint.train.batch_size},
                {"seed", checkpoint.train.seed},
                {"optimizer", optimizer_name(checkpoint.train.optimizer)},
                {"weight_decay", checkpoint.train.weight_decay},
                {"adam_beta1", checkpoint.train.adam_beta1},
                {"adam_beta2", checkpoint.train.adam_beta2},
                {"adam_eps", checkpoint.train.adam_eps}};
  j["fallback_label"] = static_cast<int>(checkpoint.fallback_label);
  json p;
  p["repr_type"] = repr_type_name(params.repr_type);
  p["input_width"] = params.input_width();
  p["weight"] = doubles_to_b64(params.weight);
  p["bias"] = doubles_to_b64(params.bias);
  p["scorer"] = params.scorer.has_value() ? json(doubles_to_b64(params.scorer->weights))
                                          : json(nullptr);
  j["params"] = std::move(p);
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(std::string_view json_text, std::string_view source) {
  const std::string where(source);
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw SchemaError(where + ": not valid JSON: " + e.what());
  }
  try {
    if (!j.is_object() || j.value("schema", "") != kSchemaTag) {
      throw SchemaError("missing or unexpected schema tag (want " + std::string(kSchemaTag) + ")");
    }
    Checkpoint out;
    const json& enc = j.at("encoder");
    out.encoder.name = parse_encoder_name(enc.at("name").get<std::string>());
    out.encoder.num_layers = enc.at("num_layers").get<int>();
    out.encoder.hidden_width = enc.at("hidden_width").get<int>();
    out.encoder.trainable = enc.at("trainable").get<bool>();
    out.encoder.max_positions = enc.at("max_positions").get<int>();
    out.encoder.mock_seed = enc.at("mock_seed").get<std::uint64_t>();
    out.layer = j.at("layer").get<int>();
    out.setting = parse_setting(j.at("setting").get<std::string>());
    out.context_mode = parse_context_mode(j.at("context_mode").get<std::string>());
    out.locate_threshold = j.at("locate_threshold").get<double>();
    const json& tr = j.at("train");
    out.train.epochs = tr.at("epochs").get<int>();
    out.train.learning_rate = tr.at("learning_rate").get<double>();
    out.train.dropout_prob = tr.at("dropout_prob").get<double>();
    out.train.batch_size = tr.at("batch_size").get<int>();
    out.train.seed = tr.at("seed").get<std::uint64_t>();
    out.train.optimizer = parse_optimizer(tr.at("optimizer").get<std::string>());
    out.train.weight_decay = tr.at("weight_decay").get<double>();
    out.train.adam_beta1 = tr.at("adam_beta1").get<double>();
    out.train.adam_beta2 = tr.at("adam_beta2").get<double>();
    out.train.adam_eps = tr.at("adam_eps").get<double>();
    const int fallback = j.at("fallback_label").get<int>();
    if (fallback != 0 && fallback != 1) throw SchemaError("fallback_label must be 0 or 1");
    out.fallback_label = static_cast<Label>(fallback);
    const json& p = j.at("params");
    out.params.repr_type = parse_repr_type(p.at("repr_type").get<std::string>());
    const int width = p.at("input_width").get<int>();
    if (width < 1) throw SchemaError("input_width must be >= 1");
    if (width != repr_width(out.params.repr_type, out.encoder.hidden_width)) {
      std::ostringstream msg;
      msg << "input_width " << width << " does not match combinator "
          << repr_type_name(out.params.repr_type) << " over encoder width "
          << out.encoder.hidden_width;
      throw SchemaError(msg.str());
    }
    out.params.weight = b64_to_matrix(p.at("weight").get<std::string>(), 2, width, "weight");
    out.params.bias = b64_to_matrix(p.at("bias").get<std::string>(), 2, 1, "bias");
    const json& scorer = p.at("scorer");
    const bool needs_scorer = out.params.repr_type == ReprType::SELF_ATTENTIVE;
    if (scorer.is_null() != !needs_scorer) {
      throw SchemaError("scorer must be present exactly for the self-attentive combinator");
    }
    if (needs_scorer) {
      AttentiveScorer s;
      s.weights = b64_to_matrix(scorer.get<std::string>(), out.encoder.hidden_width, 1, "scorer");
      out.params.scorer = std::move(s);
    }
    return out;
  } catch (const json::exception& e) {
    throw SchemaError(where + ": malformed checkpoint: " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError(where + ": " + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  out << checkpoint_to_json(checkpoint);
  if (!out) throw ConfigError("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_json(buffer.str(), path.string());
}

}  // namespace spanprobe
