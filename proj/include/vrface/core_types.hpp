#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vrface/error.hpp"

namespace vrface {

/// A 2D keypoint in normalized image coordinates; the image center is the
/// origin and the visible image spans [-1, 1] on both axes.
struct Keypoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Keypoint&, const Keypoint&) = default;

  Keypoint operator+(const Keypoint& o) const { return {x + o.x, y + o.y}; }
  Keypoint operator-(const Keypoint& o) const { return {x - o.x, y - o.y}; }
  Keypoint operator*(double s) const { return {x * s, y * s}; }

  bool finite() const;
  /// True when the point lies inside the visible [-1, 1]^2 square. Points
  /// outside are legal (e.g. right after a projection) but suspicious.
  bool in_image() const;
};

double distance(const Keypoint& a, const Keypoint& b);

enum class Role : std::uint8_t { LowerFace, Eye, Pose };

const char* to_string(Role role);
Role role_from_string(const std::string& name);

/// Fixed role layout of a keypoint set: lower-face keypoints first (the
/// headset mouth-camera detector's output), then eye and pose keypoints (the
/// full-face detector's output).
class RolePartition {
 public:
  RolePartition() = default;
  RolePartition(std::vector<Role> roles, std::size_t gaze_index);

  /// 68-landmark layout. The 20 mouth landmarks (48-67) come first and are
  /// LowerFace; landmarks 0-47 follow, with the eye landmarks 36-47 tagged Eye.
  /// The gaze keypoint is landmark 37, the upper eyelid of the right eye.
  static RolePartition landmarks68();

  /// Lower-face-only layout with `count` keypoints (used for the mouth stream).
  static RolePartition lower_face_only(std::size_t count);

  std::size_t size() const { return roles_.size(); }
  std::size_t lower_face_count() const { return lower_face_count_; }
  std::size_t gaze_index() const { return gaze_index_; }
  const std::vector<Role>& roles() const { return roles_; }

  friend bool operator==(const RolePartition&, const RolePartition&) = default;

 private:
  std::vector<Role> roles_;
  std::size_t lower_face_count_ = 0;
  std::size_t gaze_index_ = 0;
};

/// Ordered keypoints with a parallel list of role tags.
class KeypointSet {
 public:
  KeypointSet() = default;
  KeypointSet(std::vector<Keypoint> points, std::vector<Role> roles);

  static KeypointSet lower_face(std::vector<Keypoint> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  const std::vector<Keypoint>& points() const { return points_; }
  const std::vector<Role>& roles() const { return roles_; }
  const Keypoint& operator[](std::size_t i) const { return points_[i]; }

  void set_point(std::size_t i, const Keypoint& p);

  std::size_t count(Role role) const;
  /// Points carrying `role`, in order.
  std::vector<Keypoint> subset(Role role) const;
  /// The lower-face subset as its own KeypointSet.
  KeypointSet lower_face_set() const;

  bool all_finite() const;
  /// Lower-face entries form a prefix and every other entry follows it.
  bool lower_face_first() const;

  friend bool operator==(const KeypointSet&, const KeypointSet&) = default;

 private:
  std::vector<Keypoint> points_;
  std::vector<Role> roles_;
};

/// Timestamped keypoints plus an opaque reference to the image or feature
/// asset they were detected on. The engine never dereferences payload_ref.
struct FrameRecord {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  KeypointSet keypoints;
  std::string payload_ref;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

/// Checks id uniqueness and strictly increasing timestamps.
void validate_sequence(std::span<const FrameRecord> frames);

/// 2D affine transform stored as a 3x3 homogeneous matrix whose bottom row is
/// exactly (0, 0, 1). Construction rejects singular linear parts.
class Transform2D {
 public:
  Transform2D() : m_(Eigen::Matrix3d::Identity()) {}
  explicit Transform2D(const Eigen::Matrix3d& m);

  static Transform2D identity() { return Transform2D(); }
  static Transform2D translation(double tx, double ty);
  static Transform2D scaling(double s);
  static Transform2D scaling(double sx, double sy);
  /// Row-major [a b tx; c d ty].
  static Transform2D affine(double a, double b, double tx, double c, double d, double ty);

  const Eigen::Matrix3d& matrix() const { return m_; }
  Eigen::Matrix2d linear() const { return m_.topLeftCorner<2, 2>(); }
  Eigen::Vector2d offset() const { return m_.topRightCorner<2, 1>(); }

  Transform2D inverse() const;
  /// (a * b)(p) == a(b(p)).
  Transform2D operator*(const Transform2D& other) const;

  friend bool operator==(const Transform2D& a, const Transform2D& b) { return a.m_ == b.m_; }

 private:
  Eigen::Matrix3d m_;
};

Keypoint apply_transform(const Transform2D& t, const Keypoint& p);

/// Arithmetic mean of the keypoints carrying `role`.
Keypoint centroid(const KeypointSet& set, Role role);
Keypoint centroid(std::span<const Keypoint> points);

}  // namespace vrface
