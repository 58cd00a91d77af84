#include "lids/metric.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "lids/error.hpp"
#include "lids/number_format.hpp"

namespace lids {
namespace {

// Last-bit noise must not decide the argmax.
constexpr int kArgmaxDigits = 12;

}  // namespace

Cosine cosine_similarity(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na < kDegenerateNorm || nb < kDegenerateNorm) return {0.0, true};
  const double cs = a.dot(b) / (na * nb);
  return {std::clamp(cs, -1.0, 1.0), false};
}

PreparedText prepare_text(const Eigen::MatrixXd& x, double alpha) {
  PreparedText out;
  out.matrix = x;
  out.stack = compute_svd(out.matrix);
  out.profile = direction_profile(out.matrix, out.stack, static_cast<int>(out.stack.rank_bound()), alpha);
  return out;
}

PreparedText prepare_text(const EmbeddedText& text, double alpha, const MaskPolicy& mask) {
  if (mask.any()) return prepare_text(apply_row_mask(text, mask).to_double(), alpha);
  return prepare_text(text.to_double(), alpha);
}

SimilarityResult macs(const PreparedText& reference, const PreparedText& test) {
  if (reference.matrix.cols() != test.matrix.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "reference p = " + std::to_string(reference.matrix.cols()) +
                                                   ", test p = " + std::to_string(test.matrix.cols()));
  }
  const std::size_t k_max = std::min(reference.profile.size(), test.profile.size());
  if (k_max == 0) throw Error(ErrorCode::kEmptyCurve, "no layer count to compare");

  SimilarityResult out;
  out.curve.reserve(k_max);
  out.degenerate.reserve(k_max);
  double best = -1.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < k_max; ++k) {
    const auto cs = cosine_similarity(test.profile[k].values, reference.profile[k].values);
    const double value = std::abs(cs.value);
    out.curve.push_back(value);
    out.degenerate.push_back(cs.degenerate);
    const double key = round_significant(value, kArgmaxDigits);
    if (key > best) {
      best = key;
      best_k = k;
    }
  }
  out.k_hat = static_cast<int>(best_k) + 1;
  out.score = out.curve[best_k];
  out.embedding = test.profile[best_k].values;
  return out;
}

SimilarityResult macs(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& test, double alpha) {
  return macs(prepare_text(reference, alpha), prepare_text(test, alpha));
}

SimilarityResult macs(const EmbeddedText& reference, const EmbeddedText& test, double alpha, const MaskPolicy& mask) {
  return macs(prepare_text(reference, alpha, mask), prepare_text(test, alpha, mask));
}

std::vector<BatchItem> score_batch(const EmbeddedText& reference, const std::vector<EmbeddedText>& tests,
                                   double alpha, const MaskPolicy& mask, unsigned threads) {
  std::vector<BatchItem> out(tests.size());
  if (tests.empty()) return out;

  const PreparedText ref = prepare_text(reference, alpha, mask);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tests.size(); i = next++) {
      try {
        out[i].result = macs(ref, prepare_text(tests[i], alpha, mask));
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tests.size()));
  if (threads <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  return out;
}

}  // namespace lids
