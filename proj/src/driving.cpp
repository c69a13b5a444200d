#include "vrface/driving.hpp"

#include <algorithm>
#include <cmath>

namespace vrface {

void EyeBoundary::validate() const {
  const Keypoint* extents[] = {&pos_u, &neg_u, &pos_v, &neg_v};
  if (!origin.finite()) throw Error(ErrorKind::InvalidArgument, "eye boundary origin is not finite");
  for (const Keypoint* e : extents) {
    if (!e->finite()) throw Error(ErrorKind::InvalidArgument, "eye boundary extent is not finite");
    if (*e == origin) throw Error(ErrorKind::InvalidArgument, "eye boundary extent equals the origin");
  }
}

Keypoint map_eye_coordinate(const EyeBoundary& boundary, const Gaze& gaze) {
  const Gaze g = clamp_gaze(gaze);
  const Keypoint& o = boundary.origin;
  const Keypoint& ex = g.u >= 0.0 ? boundary.pos_u : boundary.neg_u;
  const Keypoint& ey = g.v >= 0.0 ? boundary.pos_v : boundary.neg_v;
  const double tu = std::abs(g.u);
  const double tv = std::abs(g.v);
  const Keypoint along_u{std::lerp(o.x, ex.x, tu), std::lerp(o.y, ex.y, tu)};
  const Keypoint along_v{std::lerp(o.x, ey.x, tv), std::lerp(o.y, ey.y, tv)};
  // Start from the dominant axis so the annotated extents are hit exactly.
  if (tu >= tv) return along_u + (along_v - o);
  return along_v + (along_u - o);
}

DrivingFrame construct_driving(const FrameRecord& source, const KeypointSet& mouth_set,
                               const AlignmentModel& model, const GazeState& gaze,
                               const EyeBoundary& boundary, std::size_t gaze_index,
                               std::size_t expression_index) {
  const KeypointSet& src = source.keypoints;
  if (gaze_index >= src.size() || src.roles()[gaze_index] != Role::Eye) {
    throw Error(ErrorKind::InvalidArgument, "gaze index does not name an eye keypoint of the source");
  }
  const KeypointSet lower = project(model, mouth_set, src);

  DrivingFrame out;
  out.keypoints = src;
  std::size_t next = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src.roles()[i] != Role::LowerFace) continue;
    const Keypoint& p = lower[next++];
    if (!p.finite() || std::abs(p.x) > kLowerFaceBound || std::abs(p.y) > kLowerFaceBound) {
      throw Error(ErrorKind::MalformedFrame, "projected lower-face keypoint leaves the sanity box");
    }
    out.keypoints.set_point(i, p);
  }
  out.keypoints.set_point(gaze_index, map_eye_coordinate(boundary, gaze.filtered));
  out.expression_index = expression_index;
  out.eye_coordinate = gaze.filtered;
  out.blink = gaze.blink;
  return out;
}

}  // namespace vrface
