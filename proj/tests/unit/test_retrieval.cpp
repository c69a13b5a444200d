#include <doctest.h>

#include "support.hpp"
#include "vrface/retrieval.hpp"

using namespace vrface;

namespace {

FrameRecord spread_frame(std::int64_t id, double half_width) {
  FrameRecord f;
  f.frame_id = id;
  f.timestamp = static_cast<double>(id);
  f.keypoints = KeypointSet::lower_face({{half_width, 0}, {-half_width, 0}});
  return f;
}

AlignmentModel random_model(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(-0.2, 0.2);
  AlignmentModel model;
  for (std::size_t i = 0; i < k; ++i) {
    model.transforms.push_back(Transform2D::affine(1 + u(rng), u(rng), u(rng) * 0.1, u(rng), 1 + u(rng), u(rng) * 0.1));
  }
  return model;
}

}  // namespace

TEST_CASE("score is zero when the projection equals the key") {
  std::mt19937_64 rng(41);
  const auto frames = testing::random_frames(rng, 5, 20);
  const ExpressionStore store(frames);
  const auto model = AlignmentModel::uniform(20, Transform2D::identity());
  CHECK(score(frames[3].keypoints, model, store, 3) == 0.0);
}

TEST_CASE("score of a single keypoint offset by (0.3, 0.4) is 0.5") {
  FrameRecord f;
  f.keypoints = KeypointSet::lower_face({{0.1, 0.1}});
  const ExpressionStore store({f});
  const auto model = AlignmentModel::uniform(1, Transform2D::translation(0.3, 0.4));
  CHECK(score(f.keypoints, model, store, 0) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("score matches a per-term summation over a 350-frame store") {
  std::mt19937_64 rng(42);
  const auto frames = testing::random_frames(rng, 350, 20);
  const ExpressionStore store(frames);
  const auto model = random_model(rng, 20);
  const auto query = testing::random_points(rng, 20);
  const auto all = score_all(KeypointSet::lower_face(query), model, store);
  REQUIRE(all.size() == 350);
  for (std::size_t i = 0; i < 350; ++i) {
    const double oracle = testing::naive_score(model, query, frames[i].keypoints.points());
    CHECK(std::abs(all[i] - oracle) <= 1e-10);
    CHECK(score(KeypointSet::lower_face(query), model, store, i) == all[i]);
  }
}

TEST_CASE("score rejects an out-of-range index") {
  std::mt19937_64 rng(43);
  const ExpressionStore store(testing::random_frames(rng, 3, 4));
  try {
    score(store.key(0), AlignmentModel::uniform(4, Transform2D::identity()), store, 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IndexOutOfRange);
  }
}

TEST_CASE("keys are the lower-face subsets of the values") {
  FrameRecord f;
  f.keypoints = KeypointSet({{0.1, 0}, {0.9, 0.9}, {-0.1, 0}}, {Role::LowerFace, Role::Pose, Role::LowerFace});
  const ExpressionStore store({f});
  CHECK(store.lower_face_count() == 2);
  CHECK(store.key(0).points() == f.keypoints.subset(Role::LowerFace));
  CHECK_THROWS_AS(ExpressionStore({}), Error);
}

TEST_CASE("retrieve finds the query's own frame at distance zero") {
  std::mt19937_64 rng(44);
  const auto frames = testing::random_frames(rng, 50, 20);
  const ExpressionStore store(frames);
  const auto hit = retrieve(frames[17].keypoints, AlignmentModel::uniform(20, Transform2D::identity()), store);
  CHECK(hit.index == 17);
  CHECK(hit.distance == 0.0);
}

TEST_CASE("retrieve takes the argmin of two scores") {
  // Identity model, query half-width 0.5: scores are 2|0.5 - w|.
  const ExpressionStore store({spread_frame(0, 0.85), spread_frame(1, 0.6)});
  const auto hit = retrieve(spread_frame(9, 0.5).keypoints, AlignmentModel::uniform(2, Transform2D::identity()), store);
  CHECK(hit.index == 1);
  CHECK(hit.distance == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("retrieve breaks ties by the lower index") {
  const ExpressionStore store({spread_frame(0, 0.75), spread_frame(1, 0.25), spread_frame(2, 0.25)});
  const auto hit = retrieve(spread_frame(9, 0.5).keypoints, AlignmentModel::uniform(2, Transform2D::identity()), store);
  CHECK(hit.index == 0);
}

TEST_CASE("retrieve agrees with a brute-force scan on 1000 queries") {
  std::mt19937_64 rng(45);
  const auto frames = testing::random_frames(rng, 350, 20);
  const ExpressionStore store(frames);
  const auto model = random_model(rng, 20);
  int mismatches = 0;
  for (int q = 0; q < 1000; ++q) {
    const auto query = testing::random_points(rng, 20);
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      const double d = testing::naive_score(model, query, frames[i].keypoints.points());
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    mismatches += retrieve(KeypointSet::lower_face(query), model, store).index != best;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("hysteresis cold start adopts the argmin") {
  const ExpressionStore store({spread_frame(0, 0.85), spread_frame(1, 0.6)});
  const auto r = retrieve_with_hysteresis(spread_frame(9, 0.5).keypoints, AlignmentModel::uniform(2, Transform2D::identity()),
                                          store, RetrievalState{}, 0.25);
  CHECK(r.switched);
  CHECK(r.state.current_index == 1u);
  CHECK(*r.state.current_distance == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("hysteresis keeps a frame within the margin and leaves one outside it") {
  const auto model = AlignmentModel::uniform(2, Transform2D::identity());
  const auto query = spread_frame(9, 0.5).keypoints;
  // Scores: frame 0 -> 0.30, frame 1 -> 0.25, frame 2 -> 0.40.
  const ExpressionStore store({spread_frame(0, 0.35), spread_frame(1, 0.375), spread_frame(2, 0.3)});
  RetrievalState at0;
  at0.current_index = 0;
  auto r = retrieve_with_hysteresis(query, model, store, at0, 0.25);
  CHECK_FALSE(r.switched);
  CHECK(r.state.current_index == 0u);
  CHECK(*r.state.current_distance == doctest::Approx(0.30).epsilon(1e-12));

  RetrievalState at2;
  at2.current_index = 2;
  at2.current_distance = 0.0;  // stale distances are ignored
  r = retrieve_with_hysteresis(query, model, store, at2, 0.25);
  CHECK(r.switched);
  CHECK(r.state.current_index == 1u);
  CHECK(*r.state.current_distance == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("hysteresis with zero margin is plain retrieval") {
  std::mt19937_64 rng(46);
  const auto frames = testing::random_frames(rng, 100, 20);
  const ExpressionStore store(frames);
  const auto model = random_model(rng, 20);
  RetrievalState state;
  for (int q = 0; q < 300; ++q) {
    const auto query = KeypointSet::lower_face(testing::random_points(rng, 20));
    const auto plain = retrieve(query, model, store);
    const auto r = retrieve_with_hysteresis(query, model, store, state, 0.0);
    CHECK(*r.state.current_index == plain.index);
    state = r.state;
  }
}

TEST_CASE("hysteresis never switches to a worse frame") {
  std::mt19937_64 rng(47);
  const auto frames = testing::random_frames(rng, 60, 20);
  const ExpressionStore store(frames);
  const auto model = random_model(rng, 20);
  RetrievalState state;
  for (int q = 0; q < 300; ++q) {
    const auto query = KeypointSet::lower_face(testing::random_points(rng, 20));
    const auto r = retrieve_with_hysteresis(query, model, store, state, 0.25);
    if (state.current_index && r.switched) {
      CHECK(score(query, model, store, *r.state.current_index) < score(query, model, store, *state.current_index));
    }
    state = r.state;
  }
}

TEST_CASE("a larger margin never switches on a query where a smaller one holds") {
  std::mt19937_64 rng(48);
  const auto frames = testing::random_frames(rng, 60, 20);
  const ExpressionStore store(frames);
  const auto model = random_model(rng, 20);
  for (int q = 0; q < 300; ++q) {
    const auto query = KeypointSet::lower_face(testing::random_points(rng, 20));
    RetrievalState state;
    state.current_index = static_cast<std::size_t>(q % 60);
    bool previous = true;
    for (double lambda : {0.0, 0.1, 0.25, 0.5}) {
      const bool s = retrieve_with_hysteresis(query, model, store, state, lambda).switched;
      CHECK((previous || !s));
      previous = s;
    }
  }
}

TEST_CASE("hysteresis rejects a negative margin") {
  const ExpressionStore store({spread_frame(0, 0.3)});
  CHECK_THROWS_AS(retrieve_with_hysteresis(store.key(0), AlignmentModel::uniform(2, Transform2D::identity()), store,
                                           RetrievalState{}, -0.1),
                  Error);
}
