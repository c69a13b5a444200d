#pragma once

#include <span>
#include <vector>

#include "vrface/core_types.hpp"

namespace vrface {

/// Gaze position in the normalized eye coordinate system: (0, 0) is frontal
/// gaze, the annotated extremes sit at +-1 on each axis.
struct Gaze {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Gaze&, const Gaze&) = default;
};

Gaze clamp_gaze(const Gaze& g);

/// Maps from each eye camera's keypoint space into the display gaze plane.
struct EyeCalibration {
  Transform2D left_transform;
  Transform2D right_transform;
  double fit_residual = 0.0;

  friend bool operator==(const EyeCalibration&, const EyeCalibration&) = default;
};

struct CalibrationSample {
  Keypoint left_raw;
  Keypoint right_raw;
  Gaze gaze_gt;
};

struct GazeState {
  Gaze filtered;
  double last_confidence = 1.0;
  bool blink = false;

  friend bool operator==(const GazeState&, const GazeState&) = default;
};

struct FusedGaze {
  Gaze position;
  double confidence = 0.0;
};

inline constexpr double kDefaultLambdaC = 0.75;
/// Confidence at or above which the eye filter starts trusting new samples.
inline constexpr double kFilterKnee = 0.8;

/// Least-squares affine maps raw -> gaze for each eye. Throws
/// CollinearSamples when either eye's raw keypoints do not span the plane.
EyeCalibration fit_calibration(std::span<const CalibrationSample> samples);

/// Mean of the two per-eye predictions plus the agreement confidence
/// c = 1 - |p_L - p_R| / (2 sqrt 2), clamped to [0, 1].
FusedGaze fuse(const EyeCalibration& cal, const Keypoint& left_raw, const Keypoint& right_raw);

/// Confidence of two already-mapped predictions.
double gaze_confidence(const Gaze& left, const Gaze& right);

/// Eyes are treated as closed strictly below the threshold.
bool detect_blink(double confidence, double lambda_c);

/// Filter gain: 5c - 4 from the knee upwards, 0 below it.
double filter_gain(double confidence);

/// Confidence-gated recursive low-pass on the gaze position.
GazeState filter_eye(const GazeState& state, const Gaze& p, double confidence,
                     double lambda_c = kDefaultLambdaC);

}  // namespace vrface
