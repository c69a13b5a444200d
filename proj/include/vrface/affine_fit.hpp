#pragma once

#include <optional>
#include <span>

#include "vrface/core_types.hpp"

namespace vrface {

/// Minimum standard deviation (normalized units) the source points must show
/// along every direction for an affine fit to be well posed.
inline constexpr double kMinFitSpread = 1e-9;

/// Closed-form least-squares affine map sending `from[j]` to `to[j]`.
/// Returns nullopt when the source points are (numerically) collinear or the
/// fitted linear part is singular.
std::optional<Transform2D> fit_affine(std::span<const Keypoint> from, std::span<const Keypoint> to);

}  // namespace vrface
