#pragma once

// Baseline similarity metrics used for comparison: ROUGE-1, ROUGE-L, BLEU
// and a BERTScore-style greedy token matching over embeddings.

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lids/embedding_store.hpp"

namespace lids {

struct PrfScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PrfScore from(double precision, double recall);
};

// Lowercased tokens; whitespace and ASCII punctuation separate tokens and
// punctuation is dropped.
std::vector<std::string> overlap_tokens(std::string_view text);

// Words reconstructed from a token table: continuation pieces glued on,
// special and punctuation tokens dropped, lowercased.
std::vector<std::string> words_from_tokens(const std::vector<TokenRecord>& tokens);

PrfScore rouge1(const std::vector<std::string>& reference, const std::vector<std::string>& candidate);
PrfScore rougeL(const std::vector<std::string>& reference, const std::vector<std::string>& candidate);

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Geometric mean of clipped n-gram precisions (n = 1..max_n) times the
// brevity penalty. Zero match counts for n >= 2 use add-one smoothing;
// orders for which the candidate has no n-grams are left out of the mean.
double bleu(const std::vector<std::string>& reference, const std::vector<std::string>& candidate, int max_n = 4);

using IdfWeights = std::unordered_map<std::string, double>;

// idf(w) = log((M + 1) / (df(w) + 1)) over M documents of token strings.
// `unseen` receives log(M + 1).
IdfWeights compute_idf(const std::vector<std::vector<std::string>>& documents, double* unseen = nullptr);

struct BertScoreOptions {
  bool use_idf = false;
  const IdfWeights* idf = nullptr;
  double unseen_idf = 0.0;
};

struct BertScoreDiagnostics {
  std::size_t zero_reference_rows = 0;
  std::size_t zero_candidate_rows = 0;
  std::vector<std::string> warnings;
};

// Greedy max-cosine matching between non-special token rows. Each token's
// best cosine is floored at 0 so the result stays in [0, 1]. All-zero rows
// are skipped and reported in `diagnostics`.
PrfScore bertscore(const EmbeddedText& reference, const EmbeddedText& candidate, const BertScoreOptions& options = {},
                   BertScoreDiagnostics* diagnostics = nullptr);

}  // namespace lids
