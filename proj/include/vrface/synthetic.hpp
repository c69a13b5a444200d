#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vrface/alignment.hpp"
#include "vrface/driving.hpp"
#include "vrface/eyetrack.hpp"
#include "vrface/stream_io.hpp"

namespace vrface {

/// Sinusoidal motion of one lower-face keypoint around its rest position.
struct KeypointWaveform {
  double amplitude_x = 0.0;
  double amplitude_y = 0.0;
  double frequency_hz = 0.0;
  double phase_x = 0.0;
  double phase_y = 0.0;
};

/// Parameters of a synthetic enrollment + live capture. Everything that is
/// not given explicitly is drawn from the seeded generator, so the seed
/// fully determines the output.
struct SyntheticScenario {
  std::size_t frames = 250;
  std::size_t lower_face_keypoints = 20;
  double fps = 30.0;
  double noise_sigma = 0.01;
  std::uint64_t seed = 7;

  /// Ground-truth mouth->source transforms are base_scale * (I + E_i) plus a
  /// zero-sum translation, with E_i entries uniform in +-linear_jitter and
  /// translations uniform in +-translation_jitter.
  double base_scale = 0.5;
  double linear_jitter = 0.1;
  double translation_jitter = 0.01;
  /// Overrides the drawn transforms when non-empty.
  std::vector<Transform2D> transforms;

  /// Mouth frame j shows the expression of source frame permutation[j].
  bool identity_permutation = false;
  std::vector<std::size_t> permutation;
  std::vector<KeypointWaveform> waveforms;

  /// Emit 68-landmark source frames (lower face first); otherwise source
  /// frames carry only the lower face.
  bool full_face = true;

  double eye_noise_sigma = 0.005;
  /// Every blink_period frames the eyes close for blink_length frames.
  std::size_t blink_period = 90;
  std::size_t blink_length = 4;
  std::size_t eye_calibration_samples = 60;
};

/// What the generator knows and the estimators must recover.
struct SyntheticTruth {
  std::vector<Transform2D> transforms;
  std::vector<std::size_t> permutation;
  Transform2D left_cam_to_vr;
  Transform2D right_cam_to_vr;
  std::vector<Gaze> gaze;
  std::vector<bool> blink;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  std::vector<StreamLine> source;
  /// Mouth frames, each with its eye-camera observation.
  std::vector<StreamLine> mouth;
  std::vector<CalibrationSample> eye_samples;
  EyeBoundary eye_boundary;
  SyntheticTruth truth;
};

SyntheticData generate_synthetic(const SyntheticScenario& scenario);

void to_json(json& j, const SyntheticTruth& t);
void from_json(const json& j, SyntheticTruth& t);

/// First (1 - holdout) of the frames and the remaining tail.
struct Split {
  std::vector<FrameRecord> train;
  std::vector<FrameRecord> test;
};
Split holdout_split(std::span<const FrameRecord> frames, double holdout = 0.1);

/// Mean distance between the fitted and ground-truth projections of the
/// given mouth frames (both anchored at the same source centroid).
double reprojection_error(const AlignmentModel& fitted, std::span<const Transform2D> truth,
                          std::span<const FrameRecord> mouth_frames);

/// Fraction of pairs whose source frame is the generating one.
double correspondence_agreement(std::span<const CorrespondencePair> pairs,
                                std::span<const std::size_t> permutation);

/// Largest relative deviation of sqrt|det| of the fitted linear parts from
/// `scale`.
double max_scale_error(const AlignmentModel& fitted, double scale);

struct CalibrationReport {
  AlignmentModel model;
  double seconds = 0.0;
  double heldout_reprojection_error = 0.0;
  double agreement = 0.0;
};

/// Calibrates on the first 90% of mouth frames and scores the held-out
/// tail and the correspondence agreement (over all mouth frames) against the
/// ground truth.
CalibrationReport evaluate_calibration(std::span<const FrameRecord> source,
                                       std::span<const FrameRecord> mouth, const SyntheticTruth& truth,
                                       const CalibrationConfig& config = {});

void to_json(json& j, const CalibrationReport& r);

}  // namespace vrface
