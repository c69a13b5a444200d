#include "vrface/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace vrface {

namespace {

using Clock = std::chrono::steady_clock;

double micros(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::micro>(b - a).count();
}

}  // namespace

void PipelineConfig::validate() const {
  if (!std::isfinite(lambda_swap) || lambda_swap < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "lambda_swap must be finite and >= 0");
  }
  if (!(lambda_c >= 0.0 && lambda_c <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "lambda_c must lie in [0, 1]");
  }
  blend.validate();
  eye_boundary.validate();
  if (partition.size() == partition.lower_face_count()) {
    throw Error(ErrorKind::InvalidArgument, "pipeline partition needs eye keypoints");
  }
}

FeatureGrid keypoint_features(const FrameRecord& frame) {
  const auto pts = frame.keypoints.subset(Role::LowerFace);
  std::vector<double> data;
  data.reserve(pts.size() * 2);
  for (const auto& p : pts) {
    data.push_back(p.x);
    data.push_back(p.y);
  }
  return FeatureGrid(1, pts.size(), 2, std::move(data));
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<const AlignmentModel> model,
                   std::shared_ptr<const EyeCalibration> eyes,
                   std::shared_ptr<const ExpressionStore> store, FeatureProvider features,
                   WarpOperator warp)
    : config_(std::move(config)),
      model_(std::move(model)),
      eyes_(std::move(eyes)),
      store_(std::move(store)),
      features_(std::move(features)),
      warp_(std::move(warp)) {
  if (!model_ || !eyes_ || !store_) throw Error(ErrorKind::InvalidArgument, "pipeline needs calibrations and a store");
  config_.validate();
  const std::size_t k = config_.partition.lower_face_count();
  if (model_->keypoint_count() != k || store_->lower_face_count() != k) {
    throw Error(ErrorKind::DimensionMismatch,
                "partition, alignment model and expression store disagree on the lower-face count");
  }
  const auto idx = store_->find(config_.source_frame_id);
  if (!idx) {
    throw Error(ErrorKind::IndexOutOfRange,
                "source frame " + std::to_string(config_.source_frame_id) + " is not in the store");
  }
  source_index_ = *idx;
  if (source().keypoints.roles() != config_.partition.roles()) {
    throw Error(ErrorKind::DimensionMismatch, "source frame does not follow the configured role partition");
  }
}

RenderRequest Pipeline::step(PipelineState& state, const FrameInput& input, StageTimings* timings) const {
  try {
    return step_impl(state, input, timings);
  } catch (const Error&) {
    ++state.frame_counter;
    throw;
  }
}

RenderRequest Pipeline::step_impl(PipelineState& state, const FrameInput& input,
                                  StageTimings* timings) const {
  if (!std::isfinite(input.timestamp) || (state.last_timestamp && !(input.timestamp > *state.last_timestamp))) {
    throw Error(ErrorKind::MalformedFrame, "timestamp does not increase");
  }
  if (!input.mouth.all_finite() || !input.left_raw.finite() || !input.right_raw.finite()) {
    throw Error(ErrorKind::MalformedFrame, "non-finite keypoint");
  }
  if (input.mouth.count(Role::LowerFace) != config_.partition.lower_face_count()) {
    throw Error(ErrorKind::MalformedFrame,
                "mouth frame has " + std::to_string(input.mouth.count(Role::LowerFace)) +
                    " lower-face keypoints, expected " +
                    std::to_string(config_.partition.lower_face_count()));
  }

  PipelineState next = state;
  const auto t0 = Clock::now();

  const FusedGaze fused = fuse(*eyes_, input.left_raw, input.right_raw);
  GazeState gaze = filter_eye(next.gaze, fused.position, fused.confidence, config_.lambda_c);
  if (gaze.blink) gaze.filtered = next.gaze.filtered;
  next.gaze = gaze;
  const auto t1 = Clock::now();

  const auto hit = retrieve_with_hysteresis(input.mouth, *model_, *store_, next.retrieval, config_.lambda_swap);
  next.retrieval = hit.state;
  const std::size_t expr = *hit.state.current_index;
  const auto t2 = Clock::now();

  DrivingFrame driving = construct_driving(source(), input.mouth, *model_, next.gaze, config_.eye_boundary,
                                           config_.partition.gaze_index(), expr);
  const auto t3 = Clock::now();

  const FeatureGrid raw = features_(store_->value(expr));
  const FeatureGrid& prev_e = next.blended_expression ? *next.blended_expression : raw;
  const FeatureGrid& prev_o = next.last_output ? *next.last_output : raw;
  FeatureGrid blended = blend_expression(config_.blend, raw, prev_e, prev_o, warp_);
  next.blended_expression = blended;
  next.last_output = blended;
  const auto t4 = Clock::now();

  RenderRequest req;
  req.frame_index = next.frame_counter;
  req.timestamp = input.timestamp;
  req.driving = std::move(driving);
  req.source_payload_ref = source().payload_ref;
  req.expression_payload_ref = store_->value(expr).payload_ref;
  req.blend_weights = config_.blend;
  req.switched = hit.switched;
  req.confidence = fused.confidence;
  req.expression_features = std::move(blended);

  next.frame_counter += 1;
  next.last_timestamp = input.timestamp;
  state = std::move(next);

  if (timings) {
    timings->gaze_us = micros(t0, t1);
    timings->retrieval_us = micros(t1, t2);
    timings->driving_us = micros(t2, t3);
    timings->blend_us = micros(t3, t4);
    timings->total_us = micros(t0, t4);
  }
  return req;
}

std::optional<FrameInput> VectorSource::next() {
  if (pos_ >= frames_.size()) return std::nullopt;
  return frames_[pos_++];
}

LatencySummary summarize_latency(std::vector<double> samples_us) {
  LatencySummary s;
  if (samples_us.empty()) return s;
  std::sort(samples_us.begin(), samples_us.end());
  const auto n = samples_us.size();
  // Nearest-rank percentile.
  auto pct = [&](double p) {
    const auto rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    return samples_us[std::clamp<std::size_t>(rank, 1, n) - 1];
  };
  s.mean_us = std::accumulate(samples_us.begin(), samples_us.end(), 0.0) / static_cast<double>(n);
  s.p50_us = pct(0.50);
  s.p90_us = pct(0.90);
  s.p99_us = pct(0.99);
  s.max_us = samples_us.back();
  return s;
}

ReplayReport run_replay(const Pipeline& pipeline, ReplaySource& source, RenderSink& sink,
                        PipelineState& state, std::optional<std::uint64_t> max_frames) {
  ReplayReport report;
  std::vector<double> gaze, retrieval, driving, blend, total;
  while (!max_frames || report.frames < *max_frames) {
    const std::uint64_t index = report.frames;
    std::optional<FrameInput> frame;
    try {
      frame = source.next();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Format) {
        throw Error(ErrorKind::Format, "stream frame " + std::to_string(index) + ": " + e.detail());
      }
      ++report.frames;
      ++report.dropped;
      ++state.frame_counter;
      report.drops.push_back({index, e.what()});
      continue;
    }
    if (!frame) break;
    ++report.frames;

    StageTimings t;
    const bool had_expression = state.retrieval.current_index.has_value();
    try {
      const RenderRequest req = pipeline.step(state, *frame, &t);
      sink.consume(req);
      ++report.processed;
      if (req.switched && had_expression) ++report.switches;
      if (req.driving.blink) ++report.blink_frames;
      gaze.push_back(t.gaze_us);
      retrieval.push_back(t.retrieval_us);
      driving.push_back(t.driving_us);
      blend.push_back(t.blend_us);
      total.push_back(t.total_us);
    } catch (const Error& e) {
      ++report.dropped;
      report.drops.push_back({index, e.what()});
    }
  }
  report.gaze = summarize_latency(std::move(gaze));
  report.retrieval = summarize_latency(std::move(retrieval));
  report.driving = summarize_latency(std::move(driving));
  report.blend = summarize_latency(std::move(blend));
  report.total = summarize_latency(std::move(total));
  return report;
}

}  // namespace vrface
