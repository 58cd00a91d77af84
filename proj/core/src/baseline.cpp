#include "lids/baseline.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "lids/error.hpp"

namespace lids {
namespace {

// ASCII punctuation plus the common UTF-8 quote/dash sequences.
bool is_ascii_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

constexpr std::string_view kUtf8Punct[] = {
    "\xE2\x80\x98", "\xE2\x80\x99", "\xE2\x80\x9C", "\xE2\x80\x9D",  // quotes
    "\xE2\x80\x93", "\xE2\x80\x94", "\xE2\x80\xA6",                  // dashes, ellipsis
};

std::size_t leading_punct(std::string_view w) {
  if (w.empty()) return 0;
  if (is_ascii_punct(static_cast<unsigned char>(w.front()))) return 1;
  for (auto p : kUtf8Punct) {
    if (w.starts_with(p)) return p.size();
  }
  return 0;
}

std::size_t trailing_punct(std::string_view w) {
  if (w.empty()) return 0;
  if (is_ascii_punct(static_cast<unsigned char>(w.back()))) return 1;
  for (auto p : kUtf8Punct) {
    if (w.ends_with(p)) return p.size();
  }
  return 0;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool blank(std::string_view s) { return s.find_first_not_of(" \t\r\n") == std::string_view::npos; }

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view w = text.substr(i, j - i);
    for (std::size_t n; (n = leading_punct(w)) > 0;) w.remove_prefix(n);
    for (std::size_t n; (n = trailing_punct(w)) > 0;) w.remove_suffix(n);
    if (!w.empty()) out.emplace_back(w);
    i = j;
  }
  return out;
}

std::string WordSample::joined() const {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += ' ';
    out += words[i];
  }
  return out;
}

WordSample naive_summary(const std::vector<std::string>& reference_words, std::size_t target_len,
                         std::uint64_t seed) {
  if (reference_words.empty()) throw Error(ErrorCode::kEmptyReference, "reference has no words");
  if (target_len == 0) throw Error(ErrorCode::kInvalidArgument, "target length must be at least 1");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, reference_words.size() - 1);
  WordSample out{{}, seed, reference_words.size()};
  out.words.reserve(target_len);
  for (std::size_t i = 0; i < target_len; ++i) out.words.push_back(reference_words[pick(rng)]);
  return out;
}

std::vector<TopicEntry> load_topic_corpus(const std::filesystem::path& manifest) {
  const std::string body = read_text(manifest);
  const auto base = manifest.parent_path();
  std::vector<TopicEntry> out;
  std::istringstream lines(body);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line) || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error(ErrorCode::kParseError,
                  manifest.string() + ":" + std::to_string(line_no) + ": expected <topic>\\t<path>");
    }
    const std::filesystem::path rel = line.substr(tab + 1);
    const auto path = rel.is_absolute() ? rel : base / rel;
    if (!std::filesystem::is_regular_file(path)) throw Error(ErrorCode::kMissingFile, path.string());
    std::string text = read_text(path);
    if (blank(text)) throw Error(ErrorCode::kEmptyText, path.string());
    out.push_back({line.substr(0, tab), std::move(text)});
  }
  return out;
}

}  // namespace lids
