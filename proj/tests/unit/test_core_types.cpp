#include <doctest.h>

#include "support.hpp"

using namespace vrface;

TEST_CASE("centroid of two lower-face points is their midpoint") {
  const KeypointSet s = KeypointSet::lower_face({{0, 0}, {2, 2}});
  CHECK(centroid(s, Role::LowerFace) == Keypoint{1, 1});
}

TEST_CASE("centroid of a singleton is the point") {
  const KeypointSet s = KeypointSet::lower_face({{0.3, -0.4}});
  CHECK(centroid(s, Role::LowerFace) == Keypoint{0.3, -0.4});
}

TEST_CASE("centroid matches a summation loop on random sets") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = testing::random_points(rng, 20);
    const Keypoint c = centroid(KeypointSet::lower_face(pts), Role::LowerFace);
    const Keypoint o = testing::naive_mean(pts);
    CHECK(std::abs(c.x - o.x) <= 1e-12);
    CHECK(std::abs(c.y - o.y) <= 1e-12);
  }
}

TEST_CASE("centroid only averages the requested role") {
  const KeypointSet s({{0, 0}, {1, 0}, {9, 9}}, {Role::LowerFace, Role::LowerFace, Role::Pose});
  CHECK(centroid(s, Role::LowerFace) == Keypoint{0.5, 0});
  CHECK(centroid(s, Role::Pose) == Keypoint{9, 9});
}

TEST_CASE("centroid of a missing role throws") {
  const KeypointSet s = KeypointSet::lower_face({{0, 0}});
  try {
    centroid(s, Role::Eye);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyRoleSubset);
  }
}

TEST_CASE("centroid is translation equivariant") {
  std::mt19937_64 rng(12);
  auto pts = testing::random_points(rng, 20);
  const Keypoint c0 = centroid(KeypointSet::lower_face(pts), Role::LowerFace);
  const Keypoint v{0.37, -0.81};
  for (auto& p : pts) p = p + v;
  const Keypoint c1 = centroid(KeypointSet::lower_face(pts), Role::LowerFace);
  CHECK(std::abs(c1.x - (c0.x + v.x)) <= 1e-12);
  CHECK(std::abs(c1.y - (c0.y + v.y)) <= 1e-12);
}

TEST_CASE("apply_transform on identity, translation and scaling") {
  CHECK(apply_transform(Transform2D::identity(), {0.5, -0.2}) == Keypoint{0.5, -0.2});
  CHECK(apply_transform(Transform2D::translation(0.1, 0.2), {0, 0}) == Keypoint{0.1, 0.2});
  CHECK(apply_transform(Transform2D::scaling(2.0), {0.3, 0.3}) == Keypoint{0.6, 0.6});
}

TEST_CASE("identity leaves every point exactly unchanged") {
  std::mt19937_64 rng(13);
  for (const auto& p : testing::random_points(rng, 200, -10, 10)) {
    CHECK(apply_transform(Transform2D::identity(), p) == p);
  }
}

TEST_CASE("composition agrees with sequential application") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = Transform2D::affine(1 + u(rng), u(rng), u(rng), u(rng), 1 + u(rng) + 5, u(rng));
    const auto b = Transform2D::affine(3 + u(rng), u(rng), u(rng), u(rng), 3 + u(rng), u(rng));
    const Keypoint p{u(rng), u(rng)};
    const Keypoint lhs = apply_transform(a * b, p);
    const Keypoint rhs = apply_transform(a, apply_transform(b, p));
    CHECK(std::abs(lhs.x - rhs.x) <= 1e-12 * std::max(1.0, std::abs(rhs.x)));
    CHECK(std::abs(lhs.y - rhs.y) <= 1e-12 * std::max(1.0, std::abs(rhs.y)));
  }
}

TEST_CASE("Transform2D rejects non-affine and singular matrices") {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(2, 0) = 0.1;
  CHECK_THROWS_AS(Transform2D{m}, Error);
  CHECK_THROWS_AS(Transform2D::affine(1, 2, 0, 2, 4, 0), Error);
  m = Eigen::Matrix3d::Identity();
  m(0, 2) = std::nan("");
  CHECK_THROWS_AS(Transform2D{m}, Error);
}

TEST_CASE("inverse undoes the transform") {
  const auto t = Transform2D::affine(1.3, 0.2, 0.05, -0.1, 0.9, -0.2);
  const Keypoint p{0.4, -0.7};
  const Keypoint q = apply_transform(t.inverse(), apply_transform(t, p));
  CHECK(q.x == doctest::Approx(p.x).epsilon(1e-14));
  CHECK(q.y == doctest::Approx(p.y).epsilon(1e-14));
}

TEST_CASE("68-landmark partition puts the 20 mouth points first") {
  const auto part = RolePartition::landmarks68();
  CHECK(part.size() == 68);
  CHECK(part.lower_face_count() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(part.roles()[i] == Role::LowerFace);
  std::size_t eyes = 0;
  for (Role r : part.roles()) eyes += r == Role::Eye;
  CHECK(eyes == 12);
  CHECK(part.roles()[part.gaze_index()] == Role::Eye);
}

TEST_CASE("role names round trip") {
  for (Role r : {Role::LowerFace, Role::Eye, Role::Pose}) CHECK(role_from_string(to_string(r)) == r);
  CHECK_THROWS_AS(role_from_string("nose"), Error);
}

TEST_CASE("sequence validation wants unique ids and increasing timestamps") {
  std::vector<FrameRecord> frames(2);
  frames[0].frame_id = 0;
  frames[1].frame_id = 1;
  frames[1].timestamp = 0.1;
  CHECK_NOTHROW(validate_sequence(frames));
  frames[1].timestamp = 0.0;
  CHECK_THROWS_AS(validate_sequence(frames), Error);
  frames[1].timestamp = 0.1;
  frames[1].frame_id = 0;
  CHECK_THROWS_AS(validate_sequence(frames), Error);
}

TEST_CASE("KeypointSet needs one role per point") {
  CHECK_THROWS_AS(KeypointSet({{0, 0}}, {}), Error);
}
