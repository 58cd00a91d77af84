#pragma once

// Maximum absolute cosine similarity (MACS) between the layered direction
// vectors of a test text and a reference text, plus the per-summary
// embedding d_test(k_hat).

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lids/embedding_store.hpp"
#include "lids/svd_layers.hpp"

namespace lids {

struct Cosine {
  double value = 0.0;
  bool degenerate = false;  // either norm below kDegenerateNorm; value is 0
};

inline constexpr double kDegenerateNorm = 1e-12;

Cosine cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

struct SimilarityResult {
  double score = 0.0;
  int k_hat = 0;
  std::vector<double> curve;           // |CS(d_test(k), d_ref(k))|, k = 1..K
  std::vector<bool> degenerate;        // per k
  Eigen::VectorXd embedding;           // d_test(k_hat)
};

// A text prepared for scoring: masked matrix, its SVD and its full profile.
// Building it once lets a reference be reused across a batch.
struct PreparedText {
  Eigen::MatrixXd matrix;
  SvdStack stack;
  std::vector<DirectionVector> profile;
};

PreparedText prepare_text(const Eigen::MatrixXd& x, double alpha);
PreparedText prepare_text(const EmbeddedText& text, double alpha, const MaskPolicy& mask);

SimilarityResult macs(const PreparedText& reference, const PreparedText& test);
SimilarityResult macs(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& test, double alpha = kDefaultAlpha);
SimilarityResult macs(const EmbeddedText& reference, const EmbeddedText& test, double alpha = kDefaultAlpha,
                      const MaskPolicy& mask = {});

struct BatchItem {
  std::optional<SimilarityResult> result;
  std::string error;  // set when result is empty
};

// Element i corresponds to tests[i]; failures are recorded per item.
// threads = 0 picks the hardware concurrency.
std::vector<BatchItem> score_batch(const EmbeddedText& reference, const std::vector<EmbeddedText>& tests,
                                   double alpha = kDefaultAlpha, const MaskPolicy& mask = {},
                                   unsigned threads = 0);

}  // namespace lids
