#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "lids/error.hpp"
#include "run_config.hpp"

namespace {

using namespace lids::cli;

// Flag values, applied on top of the config file only when given.
struct FlagValues {
  double alpha = 1.0;
  double q = lids::kDefaultFdrQ;
  bool mask_stopwords = false;
  std::uint64_t seed = lids::kDefaultSeed;
  std::string out;
  unsigned threads = 0;
};

struct FlagHandles {
  CLI::Option* alpha = nullptr;
  CLI::Option* q = nullptr;
  CLI::Option* mask = nullptr;
  CLI::Option* seed = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* threads = nullptr;
};

void add_common(CLI::App* cmd, FlagValues& v, FlagHandles& h, bool with_q, bool with_seed) {
  h.alpha = cmd->add_option("--alpha", v.alpha, "layer weight exponent (> 0)");
  h.mask = cmd->add_flag("--mask-stopwords,!--no-mask-stopwords", v.mask_stopwords, "zero stop-word rows before the SVD");
  h.out = cmd->add_option("--out", v.out, "output directory");
  h.threads = cmd->add_option("--threads", v.threads, "worker threads (0 = all cores)");
  if (with_q) h.q = cmd->add_option("--q", v.q, "BH false discovery rate level");
  if (with_seed) h.seed = cmd->add_option("--seed", v.seed, "base random seed");
}

RunConfig resolve(const std::optional<std::filesystem::path>& config_path, const FlagValues& v, const FlagHandles& h) {
  auto given = [](CLI::Option* o) { return o != nullptr && o->count() > 0; };
  ConfigOverrides flags;
  if (given(h.alpha)) flags.alpha = v.alpha;
  if (given(h.q)) flags.fdr_q = v.q;
  if (given(h.mask)) flags.mask_stopwords = v.mask_stopwords;
  if (given(h.seed)) flags.seed = v.seed;
  if (given(h.out)) flags.output_dir = v.out;
  if (given(h.threads)) flags.threads = v.threads;
  return resolve_run_config(config_path, flags);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LIDS: layered SVD direction similarity for summaries"};
  app.require_subcommand(1);
  std::string config_file;
  auto* config_opt = app.add_option("--config", config_file, "config file (default $LIDS_CONFIG or ./lids.toml)");

  FlagValues flags;

  FlagHandles score_h;
  ScoreOptions score;
  std::string score_ref;
  std::vector<std::string> score_sums;
  auto* score_cmd = app.add_subcommand("score", "score summaries against a reference (.lids files)");
  score_cmd->add_option("reference", score_ref)->required();
  score_cmd->add_option("summaries", score_sums)->required();
  score_cmd->add_flag("--emit-embeddings", score.emit_embeddings, "write d_test(k_hat) per summary");
  add_common(score_cmd, flags, score_h, false, false);

  FlagHandles base_h;
  BaselineOptions baseline;
  std::string base_ref;
  auto* base_cmd = app.add_subcommand("baseline", "generate naive word-sample summaries");
  base_cmd->add_option("reference_text", base_ref)->required();
  base_cmd->add_option("--mode", baseline.mode, "naive");
  base_cmd->add_option("--count", baseline.count);
  base_cmd->add_option("--target-len", baseline.target_len);
  add_common(base_cmd, flags, base_h, false, true);

  FlagHandles kw_h;
  KeywordOptions keywords;
  std::string kw_summary, kw_reference;
  int kw_layers = 0, kw_noise = 0;
  auto* kw_cmd = app.add_subcommand("keywords", "per-layer keyword selection and word clouds");
  kw_cmd->add_option("summary", kw_summary)->required();
  auto* kw_ref_opt = kw_cmd->add_option("--reference", kw_reference, "reference .lids used to obtain k_hat");
  auto* kw_layers_opt = kw_cmd->add_option("--layers", kw_layers, "number of layers (overrides k_hat)");
  auto* kw_noise_opt = kw_cmd->add_option("--noise-rank", kw_noise, "rank removed before estimating sigma");
  kw_cmd->add_option("--format", keywords.format, "json or svg")->check(CLI::IsMember({"json", "svg"}));
  add_common(kw_cmd, flags, kw_h, true, false);

  FlagHandles rep_h;
  ReportOptions report;
  std::string rep_human, rep_timings;
  auto* rep_cmd = app.add_subcommand("report", "distribution, Sharpe and correlation report");
  rep_cmd->add_option("sets", report.sets, "label=scores.json")->required();
  auto* rep_human_opt = rep_cmd->add_option("--human", rep_human, "human ratings (JSON array or {\"scores\": [...]})");
  rep_cmd->add_option("--human-pair", report.human_pair, "label of the set paired with the human ratings");
  auto* rep_timings_opt = rep_cmd->add_option("--timings", rep_timings, "timings.json from `lids metrics`");
  rep_cmd->add_flag("--json", report.json_to_stdout, "print the JSON report instead of the table");
  add_common(rep_cmd, flags, rep_h, false, true);

  FlagHandles met_h;
  MetricsOptions metrics;
  std::string met_ref;
  std::vector<std::string> met_cands;
  auto* met_cmd = app.add_subcommand("metrics", "ROUGE-1, ROUGE-L, BLEU, BERTScore-style and LIDS side by side");
  met_cmd->add_option("reference", met_ref, "path stem; <stem>.txt and/or <stem>.lids")->required();
  met_cmd->add_option("candidates", met_cands)->required();
  met_cmd->add_flag("--idf", metrics.idf, "idf-weight the BERTScore-style metric");
  add_common(met_cmd, flags, met_h, false, false);

  CLI11_PARSE(app, argc, argv);

  std::optional<std::filesystem::path> config_path;
  if (config_opt->count() > 0) config_path = config_file;

  try {
    if (score_cmd->parsed()) {
      score.reference = score_ref;
      score.summaries.assign(score_sums.begin(), score_sums.end());
      return cmd_score(score, resolve(config_path, flags, score_h), std::cout, std::cerr);
    }
    if (base_cmd->parsed()) {
      baseline.reference_text = base_ref;
      return cmd_baseline(baseline, resolve(config_path, flags, base_h), std::cout, std::cerr);
    }
    if (kw_cmd->parsed()) {
      keywords.summary = kw_summary;
      if (kw_ref_opt->count()) keywords.reference = kw_reference;
      if (kw_layers_opt->count()) keywords.layers = kw_layers;
      if (kw_noise_opt->count()) keywords.noise_rank = kw_noise;
      return cmd_keywords(keywords, resolve(config_path, flags, kw_h), std::cout, std::cerr);
    }
    if (rep_cmd->parsed()) {
      if (rep_human_opt->count()) report.human = rep_human;
      if (rep_timings_opt->count()) report.timings = rep_timings;
      return cmd_report(report, resolve(config_path, flags, rep_h), std::cout, std::cerr);
    }
    if (met_cmd->parsed()) {
      metrics.reference = met_ref;
      metrics.candidates.assign(met_cands.begin(), met_cands.end());
      return cmd_metrics(metrics, resolve(config_path, flags, met_h), std::cout, std::cerr);
    }
  } catch (const lids::Error& e) {
    // configuration problems
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
