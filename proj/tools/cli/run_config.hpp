#pragma once

// Run configuration shared by the `lids` subcommands.
//
// Config file grammar (lids.toml style, one setting per line):
//   key = value        # trailing comments allowed
// Strings may be double-quoted. Booleans are true/false. Recognised keys:
//   alpha, fdr_q, seed, output_dir, threads,
//   mask_stopwords, mask_punctuation, mask_special
// Lookup order for the file: --config, then $LIDS_CONFIG, then ./lids.toml.
// Command-line flags override file values, which override the defaults.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "lids/embedding_store.hpp"
#include "lids/layer_inference.hpp"
#include "lids/report.hpp"

namespace lids::cli {

struct RunConfig {
  double alpha = 1.0;
  double fdr_q = kDefaultFdrQ;
  MaskPolicy mask;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path output_dir;  // empty: not configured
  unsigned threads = 0;

  // Throws Error(kInvalidArgument) when alpha <= 0 or fdr_q outside (0, 1).
  void validate() const;
};

// Values present in a config file; unset fields keep whatever the caller had.
struct ConfigOverrides {
  std::optional<double> alpha;
  std::optional<double> fdr_q;
  std::optional<bool> mask_stopwords;
  std::optional<bool> mask_punctuation;
  std::optional<bool> mask_special;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output_dir;
  std::optional<unsigned> threads;

  void apply_to(RunConfig& config) const;
};

// Throws Error(kParseError) with "path:line" on malformed input.
ConfigOverrides parse_config(const std::string& text, const std::string& origin = "<config>");
ConfigOverrides load_config_file(const std::filesystem::path& path);

// Explicit path if given, else $LIDS_CONFIG, else ./lids.toml when it exists.
std::optional<std::filesystem::path> locate_config(const std::optional<std::filesystem::path>& explicit_path);

// Defaults, then the located config file, then `flags`.
RunConfig resolve_run_config(const std::optional<std::filesystem::path>& explicit_path, const ConfigOverrides& flags);

}  // namespace lids::cli
