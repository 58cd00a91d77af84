#pragma once

// Benchmark summary mechanisms: frequency-proportional word samples of the
// reference (naive summaries) and an ingested corpus of off-topic texts.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lids {

// Whitespace-delimited words with punctuation stripped at both ends only.
// Case is preserved; words that are pure punctuation are dropped.
std::vector<std::string> split_words(std::string_view text);

struct WordSample {
  std::vector<std::string> words;
  std::uint64_t seed = 0;
  std::size_t source_length = 0;

  std::string joined() const;
};

// Draws target_len words i.i.d. uniformly over the reference's word
// occurrences (with replacement). Deterministic given the seed.
WordSample naive_summary(const std::vector<std::string>& reference_words, std::size_t target_len,
                         std::uint64_t seed);

struct TopicEntry {
  std::string topic;
  std::string text;
};

// Manifest lines: "<topic>\t<path>", paths relative to the manifest.
// Blank lines and lines starting with '#' are skipped.
std::vector<TopicEntry> load_topic_corpus(const std::filesystem::path& manifest);

}  // namespace lids
