#include "vrface/bench.hpp"

namespace vrface {

SyntheticPipeline make_synthetic_pipeline(const SyntheticScenario& scenario, double lambda_swap) {
  SyntheticPipeline sp;
  sp.data = generate_synthetic(scenario);
  sp.store = std::make_shared<const ExpressionStore>(frames_of(sp.data.source));
  auto model = AlignmentModel::uniform(scenario.lower_face_keypoints, Transform2D::identity());
  model.transforms = sp.data.truth.transforms;
  sp.model = std::make_shared<const AlignmentModel>(std::move(model));
  sp.eyes = std::make_shared<const EyeCalibration>(fit_calibration(sp.data.eye_samples));
  sp.config.lambda_swap = lambda_swap;
  sp.config.eye_boundary = sp.data.eye_boundary;
  const auto& roles = sp.data.source.front().frame.keypoints.roles();
  sp.config.partition = RolePartition(roles, scenario.lower_face_keypoints + 37);
  sp.config.source_frame_id = 0;
  return sp;
}

std::vector<FrameInput> SyntheticPipeline::live_frames(std::size_t count) const {
  std::vector<FrameInput> out;
  out.reserve(count);
  const std::size_t n = data.mouth.size();
  if (n == 0) return out;
  const double period = data.mouth.back().frame.timestamp + (n > 1 ? data.mouth[1].frame.timestamp : 1.0);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& line = data.mouth[i % n];
    const double t = line.frame.timestamp + static_cast<double>(i / n) * period;
    out.push_back({static_cast<std::int64_t>(i), t, line.frame.keypoints, line.eyes->left, line.eyes->right});
  }
  return out;
}

BenchReport run_bench(std::size_t calibration_frames, std::size_t store_frames, std::size_t steps,
                      std::uint64_t seed) {
  BenchReport r;
  SyntheticScenario cal;
  cal.frames = calibration_frames;
  cal.seed = seed;
  cal.full_face = false;
  const auto cal_data = generate_synthetic(cal);
  r.calibration = evaluate_calibration(frames_of(cal_data.source), frames_of(cal_data.mouth), cal_data.truth);
  r.calibration_frames = calibration_frames;

  SyntheticScenario live;
  live.frames = store_frames;
  live.seed = seed + 1;
  const auto sp = make_synthetic_pipeline(live);
  const Pipeline pipeline = sp.make_pipeline();
  VectorSource source(sp.live_frames(steps));
  NullSink sink;
  PipelineState state = pipeline.initial_state();
  r.pipeline = run_replay(pipeline, source, sink, state);
  r.store_frames = store_frames;
  r.keypoints = sp.config.partition.size();
  return r;
}

void to_json(json& j, const BenchReport& r) {
  j = {{"calibration", r.calibration},
       {"calibration_frames", r.calibration_frames},
       {"store_frames", r.store_frames},
       {"keypoints", r.keypoints},
       {"pipeline", r.pipeline}};
}

}  // namespace vrface
