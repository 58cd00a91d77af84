#pragma once

// Canonical token-embedding container and its on-disk formats.
//
// Binary layout (little-endian):
//   "LIDS" | u16 version=1 | u16 reserved=0 | u32 n | u32 p
//   | u16 len + model_id bytes
//   | n x (u16 len + token bytes, u32 word_index, u8 flags)
//   | n*p f32, row-major
//
// A JSON debug form ({"model_id", "tokens", "matrix"}) is accepted on input
// and detected by a leading '{'.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace lids {

using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Bytes = std::vector<std::uint8_t>;

namespace token_flag {
inline constexpr std::uint8_t kStopword = 1u << 0;
inline constexpr std::uint8_t kPunctuation = 1u << 1;
inline constexpr std::uint8_t kContinuation = 1u << 2;
inline constexpr std::uint8_t kSpecial = 1u << 3;
inline constexpr std::uint8_t kAll = kStopword | kPunctuation | kContinuation | kSpecial;
}  // namespace token_flag

struct TokenRecord {
  std::string text;
  std::uint32_t word_index = 0;
  std::uint8_t flags = 0;

  bool stopword() const noexcept { return flags & token_flag::kStopword; }
  bool punctuation() const noexcept { return flags & token_flag::kPunctuation; }
  bool continuation() const noexcept { return flags & token_flag::kContinuation; }
  bool special() const noexcept { return flags & token_flag::kSpecial; }

  friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

// Immutable after construction. The constructor enforces every invariant of
// the token table and matrix, so any EmbeddedText in hand is valid.
class EmbeddedText {
 public:
  EmbeddedText(std::string model_id, std::vector<TokenRecord> tokens, FloatMatrix matrix);

  const std::string& model_id() const noexcept { return model_id_; }
  const std::vector<TokenRecord>& tokens() const noexcept { return tokens_; }
  const FloatMatrix& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  Eigen::Index rows() const noexcept { return matrix_.rows(); }
  Eigen::Index dim() const noexcept { return matrix_.cols(); }

  // Matrix widened to double for the numerical routines.
  Eigen::MatrixXd to_double() const;

  friend bool operator==(const EmbeddedText&, const EmbeddedText&) = default;

 private:
  std::string model_id_;
  std::vector<TokenRecord> tokens_;
  FloatMatrix matrix_;
};

struct MaskPolicy {
  bool zero_stopwords = false;
  bool zero_punctuation = false;
  bool zero_special = false;

  bool matches(const TokenRecord& token) const noexcept;
  bool any() const noexcept { return zero_stopwords || zero_punctuation || zero_special; }

  friend bool operator==(const MaskPolicy&, const MaskPolicy&) = default;
};

inline constexpr std::uint16_t kFormatVersion = 1;

EmbeddedText load_embedded_text(std::span<const std::uint8_t> bytes);
Bytes save_embedded_text(const EmbeddedText& text);

EmbeddedText load_embedded_text_file(const std::filesystem::path& path);
void save_embedded_text_file(const EmbeddedText& text, const std::filesystem::path& path);

// Serialises to the JSON debug form; flags as names ("stopword", ...).
std::string to_debug_json(const EmbeddedText& text);

// Rows whose token matches an enabled flag become zero. Throws AllRowsZero if
// nothing nonzero remains.
EmbeddedText apply_row_mask(const EmbeddedText& text, const MaskPolicy& mask);

}  // namespace lids
