#include "vrface/core_types.hpp"

#include <cmath>
#include <set>

#include <Eigen/LU>

namespace vrface {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyRoleSubset: return "empty role subset";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::DegenerateInput: return "degenerate input";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::IndexOutOfRange: return "index out of range";
    case ErrorKind::ShapeMismatch: return "shape mismatch";
    case ErrorKind::CollinearSamples: return "collinear samples";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::MalformedFrame: return "malformed frame";
    case ErrorKind::Format: return "format error";
  }
  return "error";
}

bool Keypoint::finite() const { return std::isfinite(x) && std::isfinite(y); }

bool Keypoint::in_image() const {
  return finite() && x >= -1.0 && x <= 1.0 && y >= -1.0 && y <= 1.0;
}

double distance(const Keypoint& a, const Keypoint& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

const char* to_string(Role role) {
  switch (role) {
    case Role::LowerFace: return "lower_face";
    case Role::Eye: return "eye";
    case Role::Pose: return "pose";
  }
  return "?";
}

Role role_from_string(const std::string& name) {
  if (name == "lower_face") return Role::LowerFace;
  if (name == "eye") return Role::Eye;
  if (name == "pose") return Role::Pose;
  throw Error(ErrorKind::Format, "unknown role tag '" + name + "'");
}

// ---------------------------------------------------------------------------

RolePartition::RolePartition(std::vector<Role> roles, std::size_t gaze_index)
    : roles_(std::move(roles)), gaze_index_(gaze_index) {
  while (lower_face_count_ < roles_.size() && roles_[lower_face_count_] == Role::LowerFace) {
    ++lower_face_count_;
  }
  for (std::size_t i = lower_face_count_; i < roles_.size(); ++i) {
    if (roles_[i] == Role::LowerFace) {
      throw Error(ErrorKind::InvalidArgument, "lower-face roles must precede eye and pose roles");
    }
  }
  if (lower_face_count_ == 0) {
    throw Error(ErrorKind::InvalidArgument, "partition has no lower-face keypoints");
  }
  const bool lower_only = lower_face_count_ == roles_.size();
  if (!lower_only && (gaze_index_ >= roles_.size() || roles_[gaze_index_] != Role::Eye)) {
    throw Error(ErrorKind::InvalidArgument, "gaze index must name an eye keypoint");
  }
}

RolePartition RolePartition::landmarks68() {
  std::vector<Role> roles(68, Role::Pose);
  for (std::size_t i = 0; i < 20; ++i) roles[i] = Role::LowerFace;
  // Landmark l < 48 lives at position 20 + l.
  for (std::size_t l = 36; l < 48; ++l) roles[20 + l] = Role::Eye;
  return RolePartition(std::move(roles), 20 + 37);
}

RolePartition RolePartition::lower_face_only(std::size_t count) {
  return RolePartition(std::vector<Role>(count, Role::LowerFace), 0);
}

// ---------------------------------------------------------------------------

KeypointSet::KeypointSet(std::vector<Keypoint> points, std::vector<Role> roles)
    : points_(std::move(points)), roles_(std::move(roles)) {
  if (points_.size() != roles_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "keypoint set has " + std::to_string(points_.size()) +
                                                  " points but " + std::to_string(roles_.size()) +
                                                  " roles");
  }
}

KeypointSet KeypointSet::lower_face(std::vector<Keypoint> points) {
  std::vector<Role> roles(points.size(), Role::LowerFace);
  return KeypointSet(std::move(points), std::move(roles));
}

void KeypointSet::set_point(std::size_t i, const Keypoint& p) { points_.at(i) = p; }

std::size_t KeypointSet::count(Role role) const {
  std::size_t n = 0;
  for (Role r : roles_) n += (r == role);
  return n;
}

std::vector<Keypoint> KeypointSet::subset(Role role) const {
  std::vector<Keypoint> out;
  out.reserve(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (roles_[i] == role) out.push_back(points_[i]);
  }
  return out;
}

KeypointSet KeypointSet::lower_face_set() const { return lower_face(subset(Role::LowerFace)); }

bool KeypointSet::all_finite() const {
  for (const auto& p : points_) {
    if (!p.finite()) return false;
  }
  return true;
}

bool KeypointSet::lower_face_first() const {
  bool seen_other = false;
  for (Role r : roles_) {
    if (r != Role::LowerFace) {
      seen_other = true;
    } else if (seen_other) {
      return false;
    }
  }
  return true;
}

void validate_sequence(std::span<const FrameRecord> frames) {
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!ids.insert(frames[i].frame_id).second) {
      throw Error(ErrorKind::MalformedFrame,
                  "duplicate frame_id " + std::to_string(frames[i].frame_id));
    }
    if (i > 0 && !(frames[i].timestamp > frames[i - 1].timestamp)) {
      throw Error(ErrorKind::MalformedFrame,
                  "timestamps not strictly increasing at frame_id " +
                      std::to_string(frames[i].frame_id));
    }
  }
}

// ---------------------------------------------------------------------------

Transform2D::Transform2D(const Eigen::Matrix3d& m) : m_(m) {
  if (m_(2, 0) != 0.0 || m_(2, 1) != 0.0 || m_(2, 2) != 1.0) {
    throw Error(ErrorKind::InvalidArgument, "transform bottom row must be (0, 0, 1)");
  }
  if (!m_.allFinite()) throw Error(ErrorKind::InvalidArgument, "transform has non-finite entries");
  if (m_.topLeftCorner<2, 2>().determinant() == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "transform linear part is singular");
  }
}

Transform2D Transform2D::translation(double tx, double ty) { return affine(1, 0, tx, 0, 1, ty); }

Transform2D Transform2D::scaling(double s) { return scaling(s, s); }

Transform2D Transform2D::scaling(double sx, double sy) { return affine(sx, 0, 0, 0, sy, 0); }

Transform2D Transform2D::affine(double a, double b, double tx, double c, double d, double ty) {
  Eigen::Matrix3d m;
  m << a, b, tx, c, d, ty, 0, 0, 1;
  return Transform2D(m);
}

Transform2D Transform2D::inverse() const {
  const Eigen::Matrix2d inv = linear().inverse();
  const Eigen::Vector2d t = -inv * offset();
  return affine(inv(0, 0), inv(0, 1), t(0), inv(1, 0), inv(1, 1), t(1));
}

Transform2D Transform2D::operator*(const Transform2D& other) const {
  Eigen::Matrix3d m = m_ * other.m_;
  m.row(2) << 0, 0, 1;
  return Transform2D(m);
}

Keypoint apply_transform(const Transform2D& t, const Keypoint& p) {
  const auto& m = t.matrix();
  return {m(0, 0) * p.x + m(0, 1) * p.y + m(0, 2), m(1, 0) * p.x + m(1, 1) * p.y + m(1, 2)};
}

Keypoint centroid(std::span<const Keypoint> points) {
  if (points.empty()) throw Error(ErrorKind::EmptyRoleSubset, "centroid of an empty point list");
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& p : points) {
    sx += p.x;
    sy += p.y;
  }
  const double n = static_cast<double>(points.size());
  return {sx / n, sy / n};
}

Keypoint centroid(const KeypointSet& set, Role role) {
  const auto pts = set.subset(role);
  if (pts.empty()) {
    throw Error(ErrorKind::EmptyRoleSubset,
                std::string("no keypoint carries role ") + to_string(role));
  }
  return centroid(std::span<const Keypoint>(pts));
}

}  // namespace vrface
