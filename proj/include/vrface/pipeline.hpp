#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vrface/alignment.hpp"
#include "vrface/blend.hpp"
#include "vrface/core_types.hpp"
#include "vrface/driving.hpp"
#include "vrface/eyetrack.hpp"
#include "vrface/retrieval.hpp"

namespace vrface {

struct PipelineConfig {
  double lambda_swap = kDefaultLambdaSwap;
  BlendConfig blend;
  double lambda_c = kDefaultLambdaC;
  EyeBoundary eye_boundary;
  RolePartition partition = RolePartition::landmarks68();
  /// Enrollment frame used as the primary source image.
  std::int64_t source_frame_id = 0;

  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Everything the (external) motion network and generator need for one
/// output frame.
struct RenderRequest {
  std::uint64_t frame_index = 0;
  double timestamp = 0.0;
  DrivingFrame driving;
  std::string source_payload_ref;
  std::string expression_payload_ref;
  BlendConfig blend_weights;
  bool switched = false;
  double confidence = 0.0;
  /// Low-pass filtered expression features for the current step.
  FeatureGrid expression_features;

  friend bool operator==(const RenderRequest&, const RenderRequest&) = default;
};

struct PipelineState {
  RetrievalState retrieval;
  GazeState gaze;
  /// Filtered expression features of the previous step.
  std::optional<FeatureGrid> blended_expression;
  /// Stand-in for the previous generator output; see Pipeline.
  std::optional<FeatureGrid> last_output;
  std::uint64_t frame_counter = 0;
  std::optional<double> last_timestamp;

  friend bool operator==(const PipelineState&, const PipelineState&) = default;
};

/// One live frame: mouth-camera lower-face keypoints and the raw keypoints of
/// both eye cameras.
struct FrameInput {
  std::int64_t frame_id = 0;
  double timestamp = 0.0;
  KeypointSet mouth;
  Keypoint left_raw;
  Keypoint right_raw;
};

/// Wall-clock microseconds spent per stage of one step.
struct StageTimings {
  double gaze_us = 0.0;
  double retrieval_us = 0.0;
  double driving_us = 0.0;
  double blend_us = 0.0;
  double total_us = 0.0;
};

/// Features representing an expression frame in the blend filter.
using FeatureProvider = std::function<FeatureGrid(const FrameRecord&)>;

/// Default provider: a 1 x k x 2 grid holding the frame's lower-face
/// keypoint coordinates.
FeatureGrid keypoint_features(const FrameRecord& frame);

/// Per-frame orchestration: fuse gaze, detect blinks, filter the eye
/// position, retrieve the expression frame with hysteresis, build the driving
/// keypoints and low-pass the expression features.
///
/// No generator exists here, so the blended expression features are fed
/// back as the previous output as well.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, std::shared_ptr<const AlignmentModel> model,
           std::shared_ptr<const EyeCalibration> eyes, std::shared_ptr<const ExpressionStore> store,
           FeatureProvider features = keypoint_features, WarpOperator warp = identity_warp);

  const PipelineConfig& config() const { return config_; }
  const ExpressionStore& store() const { return *store_; }
  const FrameRecord& source() const { return store_->value(source_index_); }

  PipelineState initial_state() const { return {}; }

  /// Advances `state` by one frame. On error the frame is dropped: only the
  /// frame counter advances and the error is rethrown.
  RenderRequest step(PipelineState& state, const FrameInput& input,
                     StageTimings* timings = nullptr) const;

 private:
  RenderRequest step_impl(PipelineState& state, const FrameInput& input, StageTimings* timings) const;

  PipelineConfig config_;
  std::shared_ptr<const AlignmentModel> model_;
  std::shared_ptr<const EyeCalibration> eyes_;
  std::shared_ptr<const ExpressionStore> store_;
  FeatureProvider features_;
  WarpOperator warp_;
  std::size_t source_index_ = 0;
};

/// Pull-style frame stream. `next` returns nullopt at end of stream. It
/// throws Error(Format) for unreadable input (which aborts a replay) and any
/// other Error for a readable but invalid frame (which is dropped).
class ReplaySource {
 public:
  virtual ~ReplaySource() = default;
  virtual std::optional<FrameInput> next() = 0;
};

class VectorSource : public ReplaySource {
 public:
  explicit VectorSource(std::vector<FrameInput> frames) : frames_(std::move(frames)) {}
  std::optional<FrameInput> next() override;

 private:
  std::vector<FrameInput> frames_;
  std::size_t pos_ = 0;
};

class RenderSink {
 public:
  virtual ~RenderSink() = default;
  virtual void consume(const RenderRequest& request) = 0;
};

class NullSink : public RenderSink {
 public:
  void consume(const RenderRequest&) override {}
};

class CollectingSink : public RenderSink {
 public:
  void consume(const RenderRequest& request) override { requests.push_back(request); }
  std::vector<RenderRequest> requests;
};

struct LatencySummary {
  double mean_us = 0.0;
  double p50_us = 0.0;
  double p90_us = 0.0;
  double p99_us = 0.0;
  double max_us = 0.0;
};

LatencySummary summarize_latency(std::vector<double> samples_us);

struct DroppedFrame {
  std::uint64_t index = 0;
  std::string reason;
};

struct ReplayReport {
  std::uint64_t frames = 0;
  std::uint64_t processed = 0;
  std::uint64_t dropped = 0;
  std::vector<DroppedFrame> drops;
  /// Expression-frame changes after the initial adoption.
  std::uint64_t switches = 0;
  std::uint64_t blink_frames = 0;
  LatencySummary gaze;
  LatencySummary retrieval;
  LatencySummary driving;
  LatencySummary blend;
  LatencySummary total;
};

/// Feeds frames from `source` through the pipeline into `sink`, starting
/// from `state` and leaving the final state there. Stops after `max_frames`
/// frames when given.
ReplayReport run_replay(const Pipeline& pipeline, ReplaySource& source, RenderSink& sink,
                        PipelineState& state, std::optional<std::uint64_t> max_frames = std::nullopt);

}  // namespace vrface
