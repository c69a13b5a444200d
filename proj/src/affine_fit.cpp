#include "vrface/affine_fit.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace vrface {

std::optional<Transform2D> fit_affine(std::span<const Keypoint> from, std::span<const Keypoint> to) {
  if (from.size() != to.size()) {
    throw Error(ErrorKind::DimensionMismatch, "affine fit needs equally many source and target points");
  }
  const auto n = static_cast<Eigen::Index>(from.size());
  if (n < 3) return std::nullopt;

  // Solve on centered data: the offset then follows from the means, and the
  // conditioning test reduces to the spread of the centered source points.
  const Keypoint mf = centroid(from);
  const Keypoint mt = centroid(to);
  Eigen::MatrixX2d x(n, 2);
  Eigen::MatrixX2d y(n, 2);
  for (Eigen::Index j = 0; j < n; ++j) {
    x(j, 0) = from[j].x - mf.x;
    x(j, 1) = from[j].y - mf.y;
    y(j, 0) = to[j].x - mt.x;
    y(j, 1) = to[j].y - mt.y;
  }

  Eigen::JacobiSVD<Eigen::MatrixX2d> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double min_sv = svd.singularValues()(1) / std::sqrt(static_cast<double>(n));
  if (!(min_sv >= kMinFitSpread)) return std::nullopt;

  // x * L^T = y  ->  L^T = solve(x, y)
  const Eigen::Matrix2d lt = svd.solve(y);
  const Eigen::Matrix2d lin = lt.transpose();
  if (!lin.allFinite() || lin.determinant() == 0.0) return std::nullopt;

  const Eigen::Vector2d off = Eigen::Vector2d(mt.x, mt.y) - lin * Eigen::Vector2d(mf.x, mf.y);
  return Transform2D::affine(lin(0, 0), lin(0, 1), off(0), lin(1, 0), lin(1, 1), off(1));
}

}  // namespace vrface
