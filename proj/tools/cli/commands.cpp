#include "commands.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lids/baseline.hpp"
#include "lids/error.hpp"
#include "lids/layer_inference.hpp"
#include "lids/metric.hpp"
#include "lids/number_format.hpp"
#include "lids/reference_metrics.hpp"
#include "lids/report.hpp"

namespace lids::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& body) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << body;
  if (!out.flush()) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
}

ojson mask_json(const MaskPolicy& mask) {
  return {{"stopwords", mask.zero_stopwords}, {"punctuation", mask.zero_punctuation}, {"special", mask.zero_special}};
}

double r9(double v) { return round_significant(v); }

// Loads every file; on failure lists each offending path and returns nullopt.
std::optional<std::vector<EmbeddedText>> load_all(const std::vector<fs::path>& paths, std::ostream& err) {
  std::vector<EmbeddedText> out;
  std::vector<std::string> failures;
  for (const auto& p : paths) {
    try {
      out.push_back(load_embedded_text_file(p));
    } catch (const std::exception& e) {
      failures.push_back(p.string() + ": " + e.what());
    }
  }
  if (failures.empty()) return out;
  err << "error: failed to load " << failures.size() << " file(s):\n";
  for (const auto& f : failures) err << "  " << f << "\n";
  return std::nullopt;
}

std::string unique_name(const fs::path& path, std::set<std::string>& used) {
  std::string base = path.stem().string();
  std::string name = base;
  for (int i = 2; !used.insert(name).second; ++i) name = base + "_" + std::to_string(i);
  return name;
}

struct ParsedScores {
  std::string metric = "lids";
  std::vector<double> scores;
};

// Accepts a bare JSON array of numbers or an object with "scores" (and
// optionally "metric").
ParsedScores parse_score_file(const fs::path& path) {
  const std::string text = read_text(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  ParsedScores out;
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("scores")) throw Error(ErrorCode::kParseError, path.string() + ": missing \"scores\"");
    list = &doc["scores"];
    if (doc.contains("metric")) {
      if (!doc["metric"].is_string()) throw Error(ErrorCode::kParseError, path.string() + ": \"metric\" not a string");
      out.metric = doc["metric"].get<std::string>();
    }
  }
  if (!list->is_array()) throw Error(ErrorCode::kParseError, path.string() + ": scores must be an array");
  for (const auto& v : *list) {
    if (!v.is_number()) throw Error(ErrorCode::kParseError, path.string() + ": non-numeric score");
    out.scores.push_back(v.get<double>());
  }
  if (out.scores.empty()) throw Error(ErrorCode::kEmptyInput, path.string() + ": score set is empty");
  return out;
}

fs::path strip_known_extension(const fs::path& p) {
  if (p.extension() == ".txt" || p.extension() == ".lids") return fs::path(p).replace_extension();
  return p;
}

struct MetricInput {
  std::string name;
  std::optional<std::vector<std::string>> words;
  std::optional<EmbeddedText> embedded;
};

MetricInput load_metric_input(const fs::path& given) {
  const fs::path stem = strip_known_extension(given);
  MetricInput in;
  in.name = stem.string();
  const fs::path txt = fs::path(stem).concat(".txt");
  const fs::path emb = fs::path(stem).concat(".lids");
  if (fs::exists(txt)) in.words = overlap_tokens(read_text(txt));
  if (fs::exists(emb)) in.embedded = load_embedded_text_file(emb);
  if (!in.words && !in.embedded) throw Error(ErrorCode::kMissingFile, "neither " + txt.string() + " nor " + emb.string());
  return in;
}

}  // namespace

int cmd_score(const ScoreOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  std::vector<fs::path> all{options.reference};
  all.insert(all.end(), options.summaries.begin(), options.summaries.end());
  auto loaded = load_all(all, err);
  if (!loaded) return kExitInput;

  try {
    const EmbeddedText reference = std::move(loaded->front());
    std::vector<EmbeddedText> tests(std::make_move_iterator(loaded->begin() + 1),
                                    std::make_move_iterator(loaded->end()));
    const auto results = score_batch(reference, tests, config.alpha, config.mask, config.threads);

    bool failed = false;
    ojson paths = ojson::array(), scores = ojson::array(), k_hats = ojson::array();
    const fs::path embed_dir = (config.output_dir.empty() ? fs::path(".") : config.output_dir) / "embeddings";
    std::set<std::string> used;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto path = options.summaries[i].string();
      const auto& item = results[i];
      if (!item.result) {
        failed = true;
        out << ojson{{"path", path}, {"error", item.error}}.dump() << "\n";
        continue;
      }
      const auto& r = *item.result;
      out << ojson{{"path", path}, {"score", r9(r.score)}, {"k_hat", r.k_hat}}.dump() << "\n";
      paths.push_back(path);
      scores.push_back(r9(r.score));
      k_hats.push_back(r.k_hat);
      if (options.emit_embeddings) {
        ojson vec = ojson::array();
        for (Eigen::Index j = 0; j < r.embedding.size(); ++j) vec.push_back(r9(r.embedding(j)));
        const ojson doc{{"path", path}, {"k_hat", r.k_hat}, {"alpha", r9(config.alpha)}, {"embedding", vec}};
        write_text(embed_dir / (unique_name(options.summaries[i], used) + ".json"), doc.dump() + "\n");
      }
    }
    if (!config.output_dir.empty()) {
      const ojson doc{{"metric", "lids"},
                      {"reference", options.reference.string()},
                      {"alpha", r9(config.alpha)},
                      {"mask", mask_json(config.mask)},
                      {"paths", paths},
                      {"scores", scores},
                      {"k_hat", k_hats}};
      write_text(config.output_dir / "scores.json", doc.dump(2) + "\n");
    }
    if (failed) {
      err << "error: some summaries could not be scored\n";
      return kExitInternal;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int cmd_baseline(const BaselineOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (options.mode != "naive") {
    err << "error: unsupported mode '" << options.mode << "' (only naive is generated; topic texts are ingested)\n";
    return kExitInput;
  }
  if (options.count < 0 || options.target_len < 1) {
    err << "error: count must be >= 0 and target length >= 1\n";
    return kExitInput;
  }
  std::vector<std::string> words;
  try {
    words = split_words(read_text(options.reference_text));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  if (words.empty()) {
    err << "error: " << options.reference_text.string() << " has no words\n";
    return kExitInput;
  }
  try {
    const fs::path dir = config.output_dir.empty() ? fs::path(".") : config.output_dir;
    ojson files = ojson::array();
    for (int i = 1; i <= options.count; ++i) {
      const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
      const auto sample = naive_summary(words, static_cast<std::size_t>(options.target_len), seed);
      const fs::path target = dir / ("naive_" + std::to_string(i) + ".txt");
      write_text(target, sample.joined() + "\n");
      files.push_back({{"file", target.filename().string()}, {"seed", seed}});
    }
    if (options.count > 0) {
      const ojson manifest{{"reference", options.reference_text.string()},
                           {"mode", options.mode},
                           {"target_len", options.target_len},
                           {"base_seed", config.seed},
                           {"files", files}};
      write_text(dir / "naive_manifest.json", manifest.dump(2) + "\n");
    }
    out << "wrote " << options.count << " naive summaries to " << dir.string() << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int cmd_keywords(const KeywordOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (options.format != "json" && options.format != "svg") {
    err << "error: --format must be json or svg\n";
    return kExitInput;
  }
  try {
    config.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  std::vector<fs::path> paths{options.summary};
  if (options.reference) paths.push_back(*options.reference);
  auto loaded = load_all(paths, err);
  if (!loaded) return kExitInput;
  const EmbeddedText& summary = loaded->front();

  KeywordClouds clouds;
  try {
    int layers = 0;
    int noise_rank = 0;
    if (options.reference) {
      const auto sim = macs(loaded->back(), summary, config.alpha, config.mask);
      layers = options.layers.value_or(sim.k_hat);
      noise_rank = options.noise_rank.value_or(sim.k_hat);
    } else if (options.layers) {
      layers = *options.layers;
      noise_rank = options.noise_rank.value_or(layers);
    } else {
      err << "error: need --reference (to obtain k_hat) or --layers\n";
      return kExitInput;
    }
    clouds = keyword_clouds(summary, layers, config.fdr_q, noise_rank, config.mask);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    const bool input_side = e.code() == ErrorCode::kRankTooLarge || e.code() == ErrorCode::kAllRowsZero ||
                            e.code() == ErrorCode::kDimensionMismatch;
    return input_side ? kExitInput : kExitInternal;
  }

  try {
    const std::string json = emit_cloud(clouds, CloudFormat::kJson);
    if (config.output_dir.empty()) {
      out << (options.format == "svg" ? emit_cloud(clouds, CloudFormat::kSvg) : json);
    } else {
      const std::string stem = options.summary.stem().string();
      write_text(config.output_dir / (stem + ".cloud.json"), json);
      if (options.format == "svg") write_text(config.output_dir / (stem + ".cloud.svg"), emit_cloud(clouds, CloudFormat::kSvg));
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
  if (!clouds.any_selected()) {
    err << "no words selected in any layer at q = " << format_significant(config.fdr_q, 6) << "\n";
    return kExitNothingSelected;
  }
  return kExitOk;
}

int cmd_report(const ReportOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err) {
  ReportInputs inputs;
  inputs.seed = config.seed;
  try {
    if (options.sets.empty()) throw Error(ErrorCode::kEmptyInput, "no score sets given");
    for (const auto& entry : options.sets) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
        throw Error(ErrorCode::kParseError, "expected label=path, got '" + entry + "'");
      }
      auto parsed = parse_score_file(entry.substr(eq + 1));
      inputs.sets.push_back({entry.substr(0, eq), parsed.metric, std::move(parsed.scores)});
    }
    if (options.human) inputs.human = HumanScores{parse_score_file(*options.human).scores, options.human_pair};
    if (options.timings) {
      const auto doc = nlohmann::json::parse(read_text(*options.timings));
      for (const auto& [metric, cost] : doc.items()) {
        inputs.timings_s[metric] = cost.at("seconds").get<double>();
        if (cost.contains("peak_mb")) inputs.memory_mb[metric] = cost.at("peak_mb").get<double>();
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  EvaluationReport report;
  try {
    report = build_report(inputs);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  try {
    const std::string json = report_to_json(report);
    if (!config.output_dir.empty()) write_text(config.output_dir / "report.json", json);
    out << (options.json_to_stdout ? json : render_table(report));
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int cmd_metrics(const MetricsOptions& options, const RunConfig& config, std::ostream& out, std::ostream& err) {
  MetricInput reference;
  std::vector<MetricInput> candidates;
  std::vector<std::string> failures;
  try {
    config.validate();
    reference = load_metric_input(options.reference);
  } catch (const std::exception& e) {
    failures.push_back(options.reference.string() + ": " + e.what());
  }
  for (const auto& c : options.candidates) {
    try {
      candidates.push_back(load_metric_input(c));
    } catch (const std::exception& e) {
      failures.push_back(c.string() + ": " + e.what());
    }
  }
  if (!failures.empty()) {
    err << "error: failed to load " << failures.size() << " input(s):\n";
    for (const auto& f : failures) err << "  " << f << "\n";
    return kExitInput;
  }

  const std::vector<std::string> names{"rouge1", "rougeL", "bleu", "bertscore", "lids"};
  std::map<std::string, std::vector<std::optional<double>>> values;
  for (const auto& n : names) values[n].assign(candidates.size(), std::nullopt);
  std::map<std::string, MetricCost> costs;

  try {
    if (reference.words) {
      const auto& ref = *reference.words;
      costs["rouge1"] = measure_cost([&] {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (candidates[i].words) values["rouge1"][i] = rouge1(ref, *candidates[i].words).f1;
        }
      });
      costs["rougeL"] = measure_cost([&] {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (candidates[i].words) values["rougeL"][i] = rougeL(ref, *candidates[i].words).f1;
        }
      });
      costs["bleu"] = measure_cost([&] {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (candidates[i].words) values["bleu"][i] = bleu(ref, *candidates[i].words);
        }
      });
    }
    if (reference.embedded) {
      const auto& ref = *reference.embedded;
      BertScoreOptions bs;
      IdfWeights idf;
      if (options.idf) {
        std::vector<std::vector<std::string>> docs{words_from_tokens(ref.tokens())};
        for (const auto& c : candidates) {
          if (c.embedded) docs.push_back(words_from_tokens(c.embedded->tokens()));
        }
        idf = compute_idf(docs, &bs.unseen_idf);
        bs.use_idf = true;
        bs.idf = &idf;
      }
      costs["bertscore"] = measure_cost([&] {
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (candidates[i].embedded) values["bertscore"][i] = bertscore(ref, *candidates[i].embedded, bs).f1;
        }
      });
      costs["lids"] = measure_cost([&] {
        const PreparedText prepared = prepare_text(ref, config.alpha, config.mask);
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          if (!candidates[i].embedded) continue;
          values["lids"][i] = macs(prepared, prepare_text(*candidates[i].embedded, config.alpha, config.mask)).score;
        }
      });
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInternal;
  }

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    ojson line{{"path", candidates[i].name}};
    for (const auto& n : names) {
      const auto& v = values[n][i];
      line[n] = v ? ojson(r9(*v)) : ojson(nullptr);
    }
    out << line.dump() << "\n";
  }

  if (!config.output_dir.empty()) {
    try {
      for (const auto& n : names) {
        const auto& col = values[n];
        if (col.empty() || !std::all_of(col.begin(), col.end(), [](const auto& v) { return v.has_value(); })) continue;
        ojson paths = ojson::array(), scores = ojson::array();
        for (std::size_t i = 0; i < col.size(); ++i) {
          paths.push_back(candidates[i].name);
          scores.push_back(r9(*col[i]));
        }
        write_text(config.output_dir / (n + ".json"),
                   ojson{{"metric", n}, {"reference", reference.name}, {"paths", paths}, {"scores", scores}}.dump(2) +
                       "\n");
      }
      ojson timings = ojson::object();
      for (const auto& n : names) {
        if (auto it = costs.find(n); it != costs.end()) {
          timings[n] = {{"seconds", r9(it->second.seconds)}, {"peak_mb", r9(it->second.peak_mb)}};
        }
      }
      write_text(config.output_dir / "timings.json", timings.dump(2) + "\n");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitInternal;
    }
  }
  return kExitOk;
}

}  // namespace lids::cli
