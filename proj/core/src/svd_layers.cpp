#include "lids/svd_layers.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "lids/error.hpp"

namespace lids {
namespace {

void check_layers(const SvdStack& stack, Eigen::Index rows, int k) {
  if (stack.left.rows() != rows) {
    throw Error(ErrorCode::kDimensionMismatch, "SVD stack has " + std::to_string(stack.left.rows()) +
                                                   " left-vector rows, matrix has " + std::to_string(rows));
  }
  if (k < 1 || k > stack.rank_bound()) {
    throw Error(ErrorCode::kLayerOutOfRange,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(stack.rank_bound()) + "]");
  }
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be a finite positive number");
  }
}

// lambda_l^alpha * s_l * X^T u_l
Eigen::VectorXd layer_contribution(const Eigen::MatrixXd& x, const SvdStack& stack, Eigen::Index l,
                                   double alpha) {
  const double lambda = stack.singular_values(l);
  if (lambda == 0.0) return Eigen::VectorXd::Zero(x.cols());
  const double weight = std::pow(lambda, alpha) * stack.signs[static_cast<std::size_t>(l)];
  return weight * (x.transpose() * stack.left.col(l));
}

}  // namespace

SvdStack compute_svd(const Eigen::MatrixXd& x) {
  if (x.rows() < 1 || x.cols() < 1) {
    throw Error(ErrorCode::kZeroMatrix, "empty matrix");
  }
  if (!x.allFinite()) {
    throw Error(ErrorCode::kNumericalFailure, "matrix has non-finite entries");
  }
  if (x.squaredNorm() == 0.0) {
    throw Error(ErrorCode::kZeroMatrix, "Frobenius norm is zero");
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorCode::kNumericalFailure, "SVD did not converge");
  }

  SvdStack out;
  out.singular_values = svd.singularValues();
  out.left = svd.matrixU();
  out.right = svd.matrixV();
  if (!out.singular_values.allFinite() || !out.left.allFinite() || !out.right.allFinite()) {
    throw Error(ErrorCode::kNumericalFailure, "SVD produced non-finite values");
  }
  out.signs.reserve(static_cast<std::size_t>(out.right.cols()));
  for (Eigen::Index l = 0; l < out.right.cols(); ++l) out.signs.push_back(layer_sign(out.right.col(l)));
  return out;
}

SvdStack compute_svd(const EmbeddedText& text) { return compute_svd(text.to_double()); }

int layer_sign(const Eigen::Ref<const Eigen::VectorXd>& v) noexcept { return v.sum() < 0.0 ? -1 : 1; }

DirectionVector direction_vector(const Eigen::MatrixXd& x, const SvdStack& stack, int k, double alpha) {
  check_alpha(alpha);
  check_layers(stack, x.rows(), k);
  DirectionVector d{Eigen::VectorXd::Zero(x.cols()), k, alpha};
  for (Eigen::Index l = 0; l < k; ++l) d.values += layer_contribution(x, stack, l, alpha);
  return d;
}

DirectionVector direction_vector(const EmbeddedText& text, const SvdStack& stack, int k, double alpha) {
  return direction_vector(text.to_double(), stack, k, alpha);
}

std::vector<DirectionVector> direction_profile(const Eigen::MatrixXd& x, const SvdStack& stack, int k_max,
                                               double alpha) {
  check_alpha(alpha);
  check_layers(stack, x.rows(), k_max);
  std::vector<DirectionVector> profile;
  profile.reserve(static_cast<std::size_t>(k_max));
  Eigen::VectorXd running = Eigen::VectorXd::Zero(x.cols());
  for (int k = 1; k <= k_max; ++k) {
    running += layer_contribution(x, stack, k - 1, alpha);
    profile.push_back(DirectionVector{running, k, alpha});
  }
  return profile;
}

std::vector<DirectionVector> direction_profile(const EmbeddedText& text, const SvdStack& stack, int k_max,
                                               double alpha) {
  return direction_profile(text.to_double(), stack, k_max, alpha);
}

}  // namespace lids
