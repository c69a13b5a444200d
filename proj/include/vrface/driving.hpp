#pragma once

#include <cstddef>

#include "vrface/alignment.hpp"
#include "vrface/core_types.hpp"
#include "vrface/eyetrack.hpp"

namespace vrface {

/// Annotated range of the gaze keypoint in the source image: its position at
/// frontal gaze and at the four axis extremes of the eye coordinate system.
struct EyeBoundary {
  Keypoint origin;
  Keypoint pos_u;  // gaze (+1, 0)
  Keypoint neg_u;  // gaze (-1, 0)
  Keypoint pos_v;  // gaze (0, +1)
  Keypoint neg_v;  // gaze (0, -1)

  /// Throws InvalidArgument unless every point is finite and every extent
  /// differs from the origin.
  void validate() const;

  friend bool operator==(const EyeBoundary&, const EyeBoundary&) = default;
};

/// Keypoints of the constructed driving frame plus the state that produced them.
struct DrivingFrame {
  KeypointSet keypoints;
  std::size_t expression_index = 0;
  Gaze eye_coordinate;
  bool blink = false;

  friend bool operator==(const DrivingFrame&, const DrivingFrame&) = default;
};

/// Projected lower-face keypoints must stay inside this box.
inline constexpr double kLowerFaceBound = 1.5;

/// Position of the gaze keypoint for a gaze coordinate (clamped to [-1, 1]^2).
/// Each axis interpolates linearly from the origin toward the extent on the
/// side of its sign; the two offsets add.
Keypoint map_eye_coordinate(const EyeBoundary& boundary, const Gaze& gaze);

/// Source keypoints with the lower face replaced by the projected mouth
/// keypoints and the gaze keypoint moved to the filtered eye coordinate.
/// Pose keypoints (and the remaining eye keypoints) are copied verbatim.
DrivingFrame construct_driving(const FrameRecord& source, const KeypointSet& mouth_set,
                               const AlignmentModel& model, const GazeState& gaze,
                               const EyeBoundary& boundary, std::size_t gaze_index,
                               std::size_t expression_index = 0);

}  // namespace vrface
