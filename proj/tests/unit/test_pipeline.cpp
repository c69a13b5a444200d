#include <doctest.h>

#include "support.hpp"
#include "vrface/bench.hpp"
#include "vrface/serialization.hpp"

using namespace vrface;

namespace {

SyntheticPipeline small_setup(double lambda_swap = kDefaultLambdaSwap, std::uint64_t seed = 7) {
  SyntheticScenario sc;
  sc.frames = 120;
  sc.seed = seed;
  return make_synthetic_pipeline(sc, lambda_swap);
}

// Hysteresis replay written against the naive score.
std::uint64_t oracle_switches(const SyntheticPipeline& sp, const std::vector<FrameInput>& frames, double lambda) {
  const auto& values = sp.store->values();
  std::optional<std::size_t> current;
  std::uint64_t switches = 0;
  for (const auto& f : frames) {
    const auto q = f.mouth.points();
    std::vector<double> s;
    for (const auto& v : values) s.push_back(testing::naive_score(*sp.model, q, v.keypoints.subset(Role::LowerFace)));
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i] < s[best]) best = i;
    if (!current) {
      current = best;
    } else if (best != *current && s[*current] > (1 + lambda) * s[best]) {
      current = best;
      ++switches;
    }
  }
  return switches;
}

std::string log_of(const std::vector<RenderRequest>& reqs) {
  std::string out;
  for (const auto& r : reqs) out += json(r).dump() + "\n";
  return out;
}

}  // namespace

TEST_CASE("replaying the mouth enrollment retrieves the generating frames") {
  const auto sp = small_setup();
  const Pipeline p = sp.make_pipeline();
  auto state = p.initial_state();
  std::size_t hits = 0;
  const auto frames = sp.live_frames(sp.data.mouth.size());
  for (std::size_t j = 0; j < frames.size(); ++j) {
    const auto req = p.step(state, frames[j]);
    hits += req.driving.expression_index == sp.data.truth.permutation[j];
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(frames.size()) >= 0.9);
}

TEST_CASE("constant input settles after the first step") {
  const auto sp = small_setup();
  const Pipeline p = sp.make_pipeline();
  auto frames = sp.live_frames(sp.data.mouth.size());
  // Pick a frame whose eyes agree well enough for the filter to move.
  FrameInput base;
  FusedGaze fused{};
  for (const auto& f : frames) {
    fused = fuse(*sp.eyes, f.left_raw, f.right_raw);
    if (fused.confidence > 0.9) {
      base = f;
      break;
    }
  }
  REQUIRE(fused.confidence > 0.9);
  auto state = p.initial_state();
  RenderRequest first, last;
  for (int t = 0; t < 100; ++t) {
    FrameInput in = base;
    in.timestamp = t * 0.1;
    last = p.step(state, in);
    if (t == 0) first = last;
    if (t > 0) CHECK_FALSE(last.switched);
    CHECK(last.driving.expression_index == first.driving.expression_index);
  }
  const Gaze target = clamp_gaze(fused.position);
  CHECK(std::abs(state.gaze.filtered.u - target.u) < 1e-9);
  CHECK(std::abs(state.gaze.filtered.v - target.v) < 1e-9);
  CHECK(state.frame_counter == 100);
}

TEST_CASE("a malformed frame is dropped, state kept, counter advanced") {
  const auto sp = small_setup();
  const Pipeline p = sp.make_pipeline();
  auto frames = sp.live_frames(3);
  auto state = p.initial_state();
  p.step(state, frames[0]);
  const PipelineState before = state;

  FrameInput bad = frames[1];
  auto pts = bad.mouth.points();
  pts[3].x = std::nan("");
  bad.mouth = KeypointSet::lower_face(pts);
  CHECK_THROWS_AS(p.step(state, bad), Error);
  PipelineState expected = before;
  expected.frame_counter += 1;
  CHECK(state == expected);

  FrameInput stale = frames[2];
  stale.timestamp = frames[0].timestamp;
  try {
    p.step(state, stale);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MalformedFrame);
  }
  CHECK(state.frame_counter == 3);
  CHECK_NOTHROW(p.step(state, frames[2]));
}

TEST_CASE("blink frames freeze the eye keypoint") {
  const auto sp = small_setup();
  const Pipeline p = sp.make_pipeline();
  CollectingSink sink;
  VectorSource source(sp.live_frames(sp.data.mouth.size()));
  auto state = p.initial_state();
  const auto report = run_replay(p, source, sink, state);
  REQUIRE(report.blink_frames > 0);
  const std::size_t gaze = p.config().partition.gaze_index();
  for (std::size_t i = 1; i < sink.requests.size(); ++i) {
    const auto& r = sink.requests[i];
    CHECK(r.driving.blink == (r.confidence < kDefaultLambdaC));
    if (r.driving.blink) CHECK(r.driving.keypoints[gaze] == sink.requests[i - 1].driving.keypoints[gaze]);
  }
}

TEST_CASE("render requests name frames present in the store") {
  const auto sp = small_setup();
  const Pipeline p = sp.make_pipeline();
  CollectingSink sink;
  VectorSource source(sp.live_frames(50));
  auto state = p.initial_state();
  run_replay(p, source, sink, state);
  for (const auto& r : sink.requests) {
    CHECK(r.expression_payload_ref == sp.store->value(r.driving.expression_index).payload_ref);
    CHECK(r.source_payload_ref == p.source().payload_ref);
    CHECK(r.blend_weights == BlendConfig{});
  }
}

TEST_CASE("empty stream gives an empty report") {
  const auto sp = small_setup();
  const Pipeline p = sp.make_pipeline();
  VectorSource source({});
  NullSink sink;
  auto state = p.initial_state();
  const auto report = run_replay(p, source, sink, state);
  CHECK(report.frames == 0);
  CHECK(report.processed == 0);
  CHECK(report.switches == 0);
  CHECK(report.total.mean_us == 0.0);
}

TEST_CASE("1000-frame replay counts switches like a naive replay") {
  for (double lambda : {0.0, 0.25}) {
    const auto sp = small_setup(lambda);
    const Pipeline p = sp.make_pipeline();
    const auto frames = sp.live_frames(1000);
    VectorSource source(frames);
    NullSink sink;
    auto state = p.initial_state();
    const auto report = run_replay(p, source, sink, state);
    CHECK(report.frames == 1000);
    CHECK(report.processed == 1000);
    CHECK(report.switches == oracle_switches(sp, frames, lambda));
  }
}

TEST_CASE("one malformed frame in 1000 is accounted for") {
  const auto sp = small_setup();
  const Pipeline p = sp.make_pipeline();
  auto frames = sp.live_frames(1000);
  frames[500].left_raw.x = std::numeric_limits<double>::infinity();
  VectorSource source(frames);
  NullSink sink;
  auto state = p.initial_state();
  const auto report = run_replay(p, source, sink, state);
  CHECK(report.frames == 1000);
  CHECK(report.processed == 999);
  CHECK(report.dropped == 1);
  REQUIRE(report.drops.size() == 1);
  CHECK(report.drops[0].index == 500);
  CHECK(state.frame_counter == 1000);
}

TEST_CASE("replay is deterministic and resumes from a serialized state") {
  const auto sp = small_setup();
  const Pipeline p = sp.make_pipeline();
  const auto frames = sp.live_frames(300);

  CollectingSink a, b;
  {
    VectorSource src(frames);
    auto state = p.initial_state();
    run_replay(p, src, a, state);
    VectorSource again(frames);
    auto state2 = p.initial_state();
    run_replay(p, again, b, state2);
  }
  CHECK(log_of(a.requests) == log_of(b.requests));

  CollectingSink head, tail;
  VectorSource src(frames);
  auto state = p.initial_state();
  run_replay(p, src, head, state, 137);
  const PipelineState restored = json::parse(json(state).dump()).get<PipelineState>();
  CHECK(restored == state);
  auto resumed = restored;
  run_replay(p, src, tail, resumed);
  auto joined = head.requests;
  joined.insert(joined.end(), tail.requests.begin(), tail.requests.end());
  CHECK(log_of(joined) == log_of(a.requests));
}

TEST_CASE("pipeline construction validates its inputs") {
  auto sp = small_setup();
  auto cfg = sp.config;
  cfg.source_frame_id = 99999;
  CHECK_THROWS_AS(Pipeline(cfg, sp.model, sp.eyes, sp.store), Error);
  cfg = sp.config;
  cfg.lambda_swap = -1;
  CHECK_THROWS_AS(Pipeline(cfg, sp.model, sp.eyes, sp.store), Error);
  cfg = sp.config;
  cfg.blend.lambda_e = 0.9;
  CHECK_THROWS_AS(Pipeline(cfg, sp.model, sp.eyes, sp.store), Error);
  auto short_model = std::make_shared<const AlignmentModel>(AlignmentModel::uniform(5, Transform2D::identity()));
  CHECK_THROWS_AS(Pipeline(sp.config, short_model, sp.eyes, sp.store), Error);
}

TEST_CASE("latency summary uses nearest-rank percentiles") {
  std::vector<double> v;
  for (int i = 100; i >= 1; --i) v.push_back(i);
  const auto s = summarize_latency(v);
  CHECK(s.mean_us == 50.5);
  CHECK(s.p50_us == 50);
  CHECK(s.p90_us == 90);
  CHECK(s.p99_us == 99);
  CHECK(s.max_us == 100);
}
