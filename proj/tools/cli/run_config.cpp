#include "run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lids/error.hpp"

namespace lids::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

double to_double(const std::string& v, const std::string& where) {
  std::size_t used = 0;
  try {
    const double out = std::stod(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  fail(where, "expected a number, got '" + v + "'");
}

std::uint64_t to_u64(const std::string& v, const std::string& where) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
    fail(where, "expected a non-negative integer, got '" + v + "'");
  }
  try {
    return std::stoull(v);
  } catch (const std::exception&) {
    fail(where, "integer out of range: '" + v + "'");
  }
}

bool to_bool(const std::string& v, const std::string& where) {
  if (v == "true") return true;
  if (v == "false") return false;
  fail(where, "expected true or false, got '" + v + "'");
}

}  // namespace

void RunConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be positive, got " + std::to_string(alpha));
  }
  if (!(fdr_q > 0.0 && fdr_q < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "q must lie in (0, 1), got " + std::to_string(fdr_q));
  }
}

void ConfigOverrides::apply_to(RunConfig& config) const {
  if (alpha) config.alpha = *alpha;
  if (fdr_q) config.fdr_q = *fdr_q;
  if (mask_stopwords) config.mask.zero_stopwords = *mask_stopwords;
  if (mask_punctuation) config.mask.zero_punctuation = *mask_punctuation;
  if (mask_special) config.mask.zero_special = *mask_special;
  if (seed) config.seed = *seed;
  if (output_dir) config.output_dir = *output_dir;
  if (threads) config.threads = *threads;
}

ConfigOverrides parse_config(const std::string& text, const std::string& origin) {
  ConfigOverrides out;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = origin + ":" + std::to_string(line_no);
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

    if (key == "alpha") {
      out.alpha = to_double(value, where);
    } else if (key == "fdr_q" || key == "q") {
      out.fdr_q = to_double(value, where);
    } else if (key == "seed") {
      out.seed = to_u64(value, where);
    } else if (key == "output_dir") {
      out.output_dir = value;
    } else if (key == "threads") {
      out.threads = static_cast<unsigned>(to_u64(value, where));
    } else if (key == "mask_stopwords") {
      out.mask_stopwords = to_bool(value, where);
    } else if (key == "mask_punctuation") {
      out.mask_punctuation = to_bool(value, where);
    } else if (key == "mask_special") {
      out.mask_special = to_bool(value, where);
    } else {
      fail(where, "unknown key '" + key + "'");
    }
  }
  return out;
}

ConfigOverrides load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

std::optional<std::filesystem::path> locate_config(const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path) return explicit_path;
  if (const char* env = std::getenv("LIDS_CONFIG"); env && *env) return std::filesystem::path(env);
  if (std::filesystem::exists("lids.toml")) return std::filesystem::path("lids.toml");
  return std::nullopt;
}

RunConfig resolve_run_config(const std::optional<std::filesystem::path>& explicit_path, const ConfigOverrides& flags) {
  RunConfig config;
  if (auto path = locate_config(explicit_path)) load_config_file(*path).apply_to(config);
  flags.apply_to(config);
  return config;
}

}  // namespace lids::cli
