#include "lids/reference_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "lids/error.hpp"

namespace lids {
namespace {

void require_nonempty(const std::vector<std::string>& reference, const std::vector<std::string>& candidate) {
  if (reference.empty() || candidate.empty()) {
    throw Error(ErrorCode::kEmptyInput, reference.empty() ? "reference has no tokens" : "candidate has no tokens");
  }
}

using NgramCounts = std::map<std::vector<std::string>, std::size_t>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

std::size_t clipped_matches(const NgramCounts& reference, const NgramCounts& candidate) {
  std::size_t match = 0;
  for (const auto& [gram, count] : candidate) {
    if (auto it = reference.find(gram); it != reference.end()) match += std::min(count, it->second);
  }
  return match;
}

struct Rows {
  Eigen::MatrixXd unit;  // one normalised row per usable token
  std::vector<std::size_t> source;
  std::size_t zero_rows = 0;
};

Rows usable_rows(const EmbeddedText& text) {
  std::vector<std::size_t> keep;
  std::size_t zero = 0;
  const auto& m = text.matrix();
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text.tokens()[i].special()) continue;
    if ((m.row(static_cast<Eigen::Index>(i)).array() == 0.0f).all()) {
      ++zero;
      continue;
    }
    keep.push_back(i);
  }
  Rows out;
  out.zero_rows = zero;
  out.unit.resize(static_cast<Eigen::Index>(keep.size()), text.dim());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const Eigen::VectorXd row = m.row(static_cast<Eigen::Index>(keep[r])).cast<double>().transpose();
    out.unit.row(static_cast<Eigen::Index>(r)) = row.transpose() / row.norm();
  }
  out.source = std::move(keep);
  return out;
}

double weighted_best_match(const Eigen::VectorXd& best, const EmbeddedText& text, const std::vector<std::size_t>& rows,
                           const BertScoreOptions& options) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double w = 1.0;
    if (options.use_idf) {
      const auto& token = text.tokens()[rows[r]].text;
      const auto it = options.idf->find(token);
      w = it == options.idf->end() ? options.unseen_idf : it->second;
    }
    num += w * std::max(0.0, best(static_cast<Eigen::Index>(r)));
    den += w;
  }
  if (den <= 0.0) throw Error(ErrorCode::kEmptyInput, "all token weights are zero");
  return std::clamp(num / den, 0.0, 1.0);
}

std::string lowercase(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

PrfScore PrfScore::from(double precision, double recall) {
  const double sum = precision + recall;
  return {precision, recall, sum > 0.0 ? 2.0 * precision * recall / sum : 0.0};
}

std::vector<std::string> overlap_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (const char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || (c < 0x80 && std::ispunct(c))) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(c)));
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::vector<std::string> words_from_tokens(const std::vector<TokenRecord>& tokens) {
  std::vector<std::string> out;
  bool open = false;
  std::uint32_t open_index = 0;
  for (const auto& t : tokens) {
    if (t.special() || t.punctuation()) {
      open = false;
      continue;
    }
    std::string piece = t.text;
    if (t.continuation() && piece.starts_with("##")) piece.erase(0, 2);
    if (open && t.word_index == open_index && t.continuation()) {
      out.back() += lowercase(piece);
    } else {
      out.push_back(lowercase(piece));
      open = true;
      open_index = t.word_index;
    }
  }
  return out;
}

PrfScore rouge1(const std::vector<std::string>& reference, const std::vector<std::string>& candidate) {
  require_nonempty(reference, candidate);
  const auto match = static_cast<double>(clipped_matches(count_ngrams(reference, 1), count_ngrams(candidate, 1)));
  return PrfScore::from(match / static_cast<double>(candidate.size()), match / static_cast<double>(reference.size()));
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

PrfScore rougeL(const std::vector<std::string>& reference, const std::vector<std::string>& candidate) {
  require_nonempty(reference, candidate);
  const auto l = static_cast<double>(lcs_length(reference, candidate));
  return PrfScore::from(l / static_cast<double>(candidate.size()), l / static_cast<double>(reference.size()));
}

double bleu(const std::vector<std::string>& reference, const std::vector<std::string>& candidate, int max_n) {
  require_nonempty(reference, candidate);
  if (max_n < 1) throw Error(ErrorCode::kInvalidArgument, "max_n must be at least 1");

  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= max_n; ++n) {
    const auto un = static_cast<std::size_t>(n);
    if (candidate.size() < un) break;
    const auto cand = count_ngrams(candidate, un);
    const double total = static_cast<double>(candidate.size() - un + 1);
    const auto match = static_cast<double>(clipped_matches(count_ngrams(reference, un), cand));
    double precision = match / total;
    if (match == 0.0) {
      if (n == 1) return 0.0;
      precision = 1.0 / (total + 1.0);
    }
    log_sum += std::log(precision);
    ++orders;
  }
  const double c = static_cast<double>(candidate.size());
  const double r = static_cast<double>(reference.size());
  const double bp = c < r ? std::exp(1.0 - r / c) : 1.0;
  return std::clamp(bp * std::exp(log_sum / orders), 0.0, 1.0);
}

IdfWeights compute_idf(const std::vector<std::vector<std::string>>& documents, double* unseen) {
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::vector<std::string> uniq(doc);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    for (const auto& w : uniq) ++df[w];
  }
  const double m = static_cast<double>(documents.size());
  IdfWeights out;
  for (const auto& [w, count] : df) out[w] = std::log((m + 1.0) / (static_cast<double>(count) + 1.0));
  if (unseen) *unseen = std::log(m + 1.0);
  return out;
}

PrfScore bertscore(const EmbeddedText& reference, const EmbeddedText& candidate, const BertScoreOptions& options,
                   BertScoreDiagnostics* diagnostics) {
  if (reference.dim() != candidate.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "reference p = " + std::to_string(reference.dim()) +
                                                   ", candidate p = " + std::to_string(candidate.dim()));
  }
  if (options.use_idf && options.idf == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "idf weighting requested without weights");
  }
  const Rows ref = usable_rows(reference);
  const Rows cand = usable_rows(candidate);
  if (diagnostics) {
    diagnostics->zero_reference_rows = ref.zero_rows;
    diagnostics->zero_candidate_rows = cand.zero_rows;
    if (ref.zero_rows) {
      diagnostics->warnings.push_back("DegenerateToken: " + std::to_string(ref.zero_rows) +
                                      " all-zero reference rows excluded");
    }
    if (cand.zero_rows) {
      diagnostics->warnings.push_back("DegenerateToken: " + std::to_string(cand.zero_rows) +
                                      " all-zero candidate rows excluded");
    }
  }
  if (ref.source.empty() || cand.source.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no matchable (non-special, nonzero) token rows");
  }

  const Eigen::MatrixXd sim = ref.unit * cand.unit.transpose();
  const Eigen::VectorXd best_for_ref = sim.rowwise().maxCoeff();
  const Eigen::VectorXd best_for_cand = sim.colwise().maxCoeff().transpose();
  const double recall = weighted_best_match(best_for_ref, reference, ref.source, options);
  const double precision = weighted_best_match(best_for_cand, candidate, cand.source, options);
  return PrfScore::from(precision, recall);
}

}  // namespace lids
