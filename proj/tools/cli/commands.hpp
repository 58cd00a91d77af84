#pragma once

// Subcommand implementations behind the `lids` executable. Each returns the
// process exit code and writes only to the given streams and output files.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace lids::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNothingSelected = 3;

struct ScoreOptions {
  std::filesystem::path reference;
  std::vector<std::filesystem::path> summaries;
  bool emit_embeddings = false;
};

// One JSON line {path, score, k_hat} per summary, in input order. With an
// output directory, also writes scores.json and, on request,
// embeddings/<stem>.json holding d_test(k_hat).
int cmd_score(const ScoreOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err);

struct BaselineOptions {
  std::filesystem::path reference_text;
  std::string mode = "naive";
  int count = 50;
  int target_len = 150;
};

// Writes naive_<i>.txt (i = 1..count, seed + i) plus naive_manifest.json.
int cmd_baseline(const BaselineOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err);

struct KeywordOptions {
  std::filesystem::path summary;
  std::optional<std::filesystem::path> reference;  // supplies k_hat
  std::optional<int> layers;
  std::optional<int> noise_rank;
  std::string format = "json";
};

int cmd_keywords(const KeywordOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err);

struct ReportOptions {
  std::vector<std::string> sets;  // "label=path"
  std::optional<std::filesystem::path> human;
  std::string human_pair;
  std::optional<std::filesystem::path> timings;
  bool json_to_stdout = false;
};

int cmd_report(const ReportOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err);

struct MetricsOptions {
  std::filesystem::path reference;  // stem; <stem>.txt and/or <stem>.lids
  std::vector<std::filesystem::path> candidates;
  bool idf = false;
};

// Baseline metrics (ROUGE-1, ROUGE-L, BLEU, BERTScore-style) next to LIDS,
// with wall time and peak memory per metric.
int cmd_metrics(const MetricsOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace lids::cli
