#pragma once

#include <cstdint>

#include "vrface/pipeline.hpp"
#include "vrface/synthetic.hpp"

namespace vrface {

/// Pipeline bundle built directly from a synthetic capture: the store holds
/// every source frame, the alignment model is the ground truth and the eye
/// calibration is fitted on the generated calibration dots.
struct SyntheticPipeline {
  SyntheticData data;
  PipelineConfig config;
  std::shared_ptr<const AlignmentModel> model;
  std::shared_ptr<const EyeCalibration> eyes;
  std::shared_ptr<const ExpressionStore> store;

  Pipeline make_pipeline() const { return Pipeline(config, model, eyes, store); }
  /// `count` live frames cycling through the mouth stream with increasing
  /// timestamps.
  std::vector<FrameInput> live_frames(std::size_t count) const;
};

SyntheticPipeline make_synthetic_pipeline(const SyntheticScenario& scenario,
                                          double lambda_swap = kDefaultLambdaSwap);

struct BenchReport {
  CalibrationReport calibration;
  std::size_t calibration_frames = 0;
  std::size_t store_frames = 0;
  std::size_t keypoints = 0;
  ReplayReport pipeline;
};

/// Times calibration on a `calibration_frames` scenario and `steps` pipeline
/// steps against a store of `store_frames` full-face enrollment frames.
BenchReport run_bench(std::size_t calibration_frames, std::size_t store_frames, std::size_t steps,
                      std::uint64_t seed);

void to_json(json& j, const BenchReport& r);

}  // namespace vrface
