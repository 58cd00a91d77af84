#include "lids/embedding_store.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include <json.hpp>

#include "lids/error.hpp"

namespace lids {
namespace {

static_assert(std::numeric_limits<float>::is_iec559, "f32 must be IEEE-754");

constexpr std::array<std::uint8_t, 4> kMagic = {'L', 'I', 'D', 'S'};

struct FlagName {
  std::uint8_t bit;
  const char* name;
};
constexpr std::array<FlagName, 4> kFlagNames = {{
    {token_flag::kStopword, "stopword"},
    {token_flag::kPunctuation, "punctuation"},
    {token_flag::kContinuation, "wordpiece_continuation"},
    {token_flag::kSpecial, "special"},
}};

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c >> 5) == 0x6) {
      extra = 1;
    } else if ((c >> 4) == 0xE) {
      extra = 2;
    } else if ((c >> 3) == 0x1E) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) >> 6) != 0x2) return false;
    }
    i += extra + 1;
  }
  return true;
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t offset() const { return offset_; }

  void need(std::size_t count, const char* what) const {
    if (bytes_.size() - offset_ < count) {
      throw Error(ErrorCode::kTruncatedFile, std::string("need ") + std::to_string(count) +
                                                " bytes for " + what + " at byte offset " +
                                                std::to_string(offset_) + ", file has " +
                                                std::to_string(bytes_.size()));
    }
  }

  template <typename T>
  T read(const char* what) {
    need(sizeof(T), what);
    T value{};
    std::memcpy(&value, bytes_.data() + offset_, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
      value = byteswap(value);
    }
    offset_ += sizeof(T);
    return value;
  }

  std::string read_string(const char* what) {
    const auto len = read<std::uint16_t>(what);
    need(len, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + offset_), len);
    offset_ += len;
    return s;
  }

  std::span<const std::uint8_t> rest() const { return bytes_.subspan(offset_); }
  void skip(std::size_t count) { offset_ += count; }

 private:
  template <typename T>
  static T byteswap(T value) {
    std::array<std::uint8_t, sizeof(T)> raw{};
    std::memcpy(raw.data(), &value, sizeof(T));
    std::reverse(raw.begin(), raw.end());
    std::memcpy(&value, raw.data(), sizeof(T));
    return value;
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t offset_ = 0;
};

class Writer {
 public:
  template <typename T>
  void write(T value) {
    std::array<std::uint8_t, sizeof(T)> raw{};
    std::memcpy(raw.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
      std::reverse(raw.begin(), raw.end());
    }
    out_.insert(out_.end(), raw.begin(), raw.end());
  }

  void write_string(const std::string& s) {
    write(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }

  void write_raw(std::span<const std::uint8_t> raw) { out_.insert(out_.end(), raw.begin(), raw.end()); }

  Bytes take() && { return std::move(out_); }
  void reserve(std::size_t n) { out_.reserve(n); }

 private:
  Bytes out_;
};

void validate_tokens(const std::vector<TokenRecord>& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& t = tokens[i];
    const auto where = " (token record " + std::to_string(i) + ")";
    if (t.text.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw Error(ErrorCode::kInvalidText, "token text longer than 65535 bytes" + where);
    }
    if (!valid_utf8(t.text)) {
      throw Error(ErrorCode::kInvalidText, "token text is not valid UTF-8" + where);
    }
    if (t.flags & ~token_flag::kAll) {
      throw Error(ErrorCode::kInvalidText, "unknown flag bits" + where);
    }
    if (t.special() && (t.stopword() || t.punctuation())) {
      throw Error(ErrorCode::kInvalidText, "special token also flagged stopword/punctuation" + where);
    }
    if (i == 0) {
      if (t.continuation()) {
        throw Error(ErrorCode::kInvalidText, "first token cannot be a wordpiece continuation" + where);
      }
      continue;
    }
    const auto prev = tokens[i - 1].word_index;
    if (t.word_index < prev || t.word_index > prev + 1) {
      throw Error(ErrorCode::kInvalidText, "word_index must advance by 0 or 1" + where);
    }
    if (t.continuation() && t.word_index != prev) {
      throw Error(ErrorCode::kInvalidText, "continuation piece must share its predecessor's word_index" + where);
    }
  }
}

EmbeddedText load_json(std::span<const std::uint8_t> bytes) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kParseError, std::string("JSON debug format: ") + e.what());
  }
  try {
    std::string model_id = doc.value("model_id", std::string{});
    const auto& jtokens = doc.at("tokens");
    const auto& jmatrix = doc.at("matrix");
    std::vector<TokenRecord> tokens;
    tokens.reserve(jtokens.size());
    for (const auto& jt : jtokens) {
      TokenRecord t;
      t.text = jt.at("text").get<std::string>();
      t.word_index = jt.at("word_index").get<std::uint32_t>();
      for (const auto& name : jt.value("flags", nlohmann::json::array())) {
        const auto s = name.get<std::string>();
        bool known = false;
        for (const auto& f : kFlagNames) {
          if (s == f.name) {
            t.flags |= f.bit;
            known = true;
          }
        }
        if (!known) {
          throw Error(ErrorCode::kParseError, "unknown flag name '" + s + "' in token record " +
                                                  std::to_string(tokens.size()));
        }
      }
      tokens.push_back(std::move(t));
    }
    if (jmatrix.size() != tokens.size()) {
      throw Error(ErrorCode::kTokenCountMismatch, std::to_string(tokens.size()) + " tokens but " +
                                                      std::to_string(jmatrix.size()) + " matrix rows");
    }
    const std::size_t p = jmatrix.empty() ? 0 : jmatrix.front().size();
    FloatMatrix m(static_cast<Eigen::Index>(jmatrix.size()), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < jmatrix.size(); ++r) {
      if (jmatrix[r].size() != p) {
        throw Error(ErrorCode::kTokenCountMismatch, "matrix row " + std::to_string(r) + " has " +
                                                        std::to_string(jmatrix[r].size()) +
                                                        " entries, expected " + std::to_string(p));
      }
      for (std::size_t c = 0; c < p; ++c) {
        const auto& v = jmatrix[r][c];
        if (!v.is_number()) {
          throw Error(ErrorCode::kNonFiniteEntry,
                      "matrix entry (" + std::to_string(r) + ", " + std::to_string(c) + ") is not a number");
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v.get<float>();
      }
    }
    return EmbeddedText(std::move(model_id), std::move(tokens), std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, std::string("JSON debug format: ") + e.what());
  }
}

}  // namespace

EmbeddedText::EmbeddedText(std::string model_id, std::vector<TokenRecord> tokens, FloatMatrix matrix)
    : model_id_(std::move(model_id)), tokens_(std::move(tokens)), matrix_(std::move(matrix)) {
  if (tokens_.empty()) {
    throw Error(ErrorCode::kTokenCountMismatch, "an embedded text needs at least one token");
  }
  if (static_cast<std::size_t>(matrix_.rows()) != tokens_.size()) {
    throw Error(ErrorCode::kTokenCountMismatch, std::to_string(tokens_.size()) + " tokens but " +
                                                    std::to_string(matrix_.rows()) + " matrix rows");
  }
  if (matrix_.cols() < 1) {
    throw Error(ErrorCode::kTokenCountMismatch, "embedding dimension must be at least 1");
  }
  if (model_id_.size() > std::numeric_limits<std::uint16_t>::max() || !valid_utf8(model_id_)) {
    throw Error(ErrorCode::kInvalidText, "model_id must be UTF-8 of at most 65535 bytes");
  }
  validate_tokens(tokens_);
  for (Eigen::Index r = 0; r < matrix_.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix_.cols(); ++c) {
      if (!std::isfinite(matrix_(r, c))) {
        throw Error(ErrorCode::kNonFiniteEntry,
                    "matrix entry (" + std::to_string(r) + ", " + std::to_string(c) + ") is not finite");
      }
    }
  }
}

Eigen::MatrixXd EmbeddedText::to_double() const { return matrix_.cast<double>(); }

bool MaskPolicy::matches(const TokenRecord& token) const noexcept {
  return (zero_stopwords && token.stopword()) || (zero_punctuation && token.punctuation()) ||
         (zero_special && token.special());
}

EmbeddedText load_embedded_text(std::span<const std::uint8_t> bytes) {
  std::size_t first = 0;
  while (first < bytes.size() && (bytes[first] == ' ' || bytes[first] == '\n' || bytes[first] == '\r' ||
                                  bytes[first] == '\t')) {
    ++first;
  }
  if (first < bytes.size() && bytes[first] == '{') return load_json(bytes);

  Reader in(bytes);
  in.need(kMagic.size(), "magic");
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kBadMagic, "expected \"LIDS\" at byte offset 0");
  }
  in.skip(kMagic.size());
  const auto version = in.read<std::uint16_t>("version");
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "version " + std::to_string(version) + " at byte offset 4, supported: 1");
  }
  in.read<std::uint16_t>("reserved");
  const auto n = in.read<std::uint32_t>("token count");
  const auto p = in.read<std::uint32_t>("embedding dimension");
  std::string model_id = in.read_string("model_id");

  std::vector<TokenRecord> tokens;
  tokens.reserve(std::min<std::size_t>(n, bytes.size() / 7));
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto start = in.offset();
    try {
      TokenRecord t;
      t.text = in.read_string("token text");
      t.word_index = in.read<std::uint32_t>("word_index");
      t.flags = in.read<std::uint8_t>("flags");
      tokens.push_back(std::move(t));
    } catch (const Error&) {
      throw Error(ErrorCode::kTruncatedFile, "header declares " + std::to_string(n) + " tokens; record " +
                                                 std::to_string(i) + " at byte offset " + std::to_string(start) +
                                                 " is incomplete");
    }
  }

  const std::size_t values = static_cast<std::size_t>(n) * p;
  in.need(values * sizeof(float), "matrix");
  FloatMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  const auto matrix_offset = in.offset();
  for (std::size_t k = 0; k < values; ++k) {
    const float v = in.read<float>("matrix entry");
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteEntry, "matrix entry " + std::to_string(k) + " at byte offset " +
                                                  std::to_string(matrix_offset + k * sizeof(float)));
    }
    m.data()[k] = v;
  }
  if (!in.rest().empty()) {
    throw Error(ErrorCode::kTokenCountMismatch, std::to_string(in.rest().size()) +
                                                    " trailing bytes after the matrix at byte offset " +
                                                    std::to_string(in.offset()));
  }
  return EmbeddedText(std::move(model_id), std::move(tokens), std::move(m));
}

Bytes save_embedded_text(const EmbeddedText& text) {
  Writer out;
  out.reserve(16 + text.model_id().size() + text.size() * 16 +
              static_cast<std::size_t>(text.matrix().size()) * sizeof(float));
  out.write_raw(kMagic);
  out.write(kFormatVersion);
  out.write(std::uint16_t{0});
  out.write(static_cast<std::uint32_t>(text.rows()));
  out.write(static_cast<std::uint32_t>(text.dim()));
  out.write_string(text.model_id());
  for (const auto& t : text.tokens()) {
    out.write_string(t.text);
    out.write(t.word_index);
    out.write(t.flags);
  }
  const float* data = text.matrix().data();
  for (Eigen::Index k = 0; k < text.matrix().size(); ++k) out.write(data[k]);
  return std::move(out).take();
}

EmbeddedText load_embedded_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return load_embedded_text(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

void save_embedded_text_file(const EmbeddedText& text, const std::filesystem::path& path) {
  const auto bytes = save_embedded_text(text);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kMissingFile, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::string to_debug_json(const EmbeddedText& text) {
  nlohmann::json doc;
  doc["model_id"] = text.model_id();
  auto& jtokens = doc["tokens"] = nlohmann::json::array();
  for (const auto& t : text.tokens()) {
    nlohmann::json flags = nlohmann::json::array();
    for (const auto& f : kFlagNames) {
      if (t.flags & f.bit) flags.push_back(f.name);
    }
    jtokens.push_back({{"text", t.text}, {"word_index", t.word_index}, {"flags", flags}});
  }
  auto& jmatrix = doc["matrix"] = nlohmann::json::array();
  for (Eigen::Index r = 0; r < text.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < text.dim(); ++c) row.push_back(text.matrix()(r, c));
    jmatrix.push_back(std::move(row));
  }
  return doc.dump();
}

EmbeddedText apply_row_mask(const EmbeddedText& text, const MaskPolicy& mask) {
  FloatMatrix m = text.matrix();
  bool any_nonzero = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    if (mask.matches(text.tokens()[i])) {
      m.row(r).setZero();
    } else if (!any_nonzero && (m.row(r).array() != 0.0f).any()) {
      any_nonzero = true;
    }
  }
  if (!any_nonzero) {
    throw Error(ErrorCode::kAllRowsZero, "no nonzero row remains after masking " +
                                             std::to_string(text.size()) + " tokens");
  }
  return EmbeddedText(text.model_id(), text.tokens(), std::move(m));
}

}  // namespace lids
