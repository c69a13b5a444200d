#include "vrface/eyetrack.hpp"

#include <algorithm>
#include <cmath>

#include "vrface/affine_fit.hpp"

namespace vrface {

Gaze clamp_gaze(const Gaze& g) { return {std::clamp(g.u, -1.0, 1.0), std::clamp(g.v, -1.0, 1.0)}; }

EyeCalibration fit_calibration(std::span<const CalibrationSample> samples) {
  std::vector<Keypoint> left;
  std::vector<Keypoint> right;
  std::vector<Keypoint> gaze;
  left.reserve(samples.size());
  right.reserve(samples.size());
  gaze.reserve(samples.size());
  for (const auto& s : samples) {
    if (!s.left_raw.finite() || !s.right_raw.finite() || !std::isfinite(s.gaze_gt.u) ||
        !std::isfinite(s.gaze_gt.v)) {
      throw Error(ErrorKind::InvalidArgument, "calibration sample has non-finite values");
    }
    left.push_back(s.left_raw);
    right.push_back(s.right_raw);
    gaze.push_back({s.gaze_gt.u, s.gaze_gt.v});
  }

  const auto lt = fit_affine(left, gaze);
  if (!lt) throw Error(ErrorKind::CollinearSamples, "left-eye samples do not span the plane");
  const auto rt = fit_affine(right, gaze);
  if (!rt) throw Error(ErrorKind::CollinearSamples, "right-eye samples do not span the plane");

  double err = 0.0;
  for (std::size_t j = 0; j < samples.size(); ++j) {
    err += distance(apply_transform(*lt, left[j]), gaze[j]);
    err += distance(apply_transform(*rt, right[j]), gaze[j]);
  }
  return {*lt, *rt, err / static_cast<double>(2 * samples.size())};
}

double gaze_confidence(const Gaze& left, const Gaze& right) {
  const double du = left.u - right.u;
  const double dv = left.v - right.v;
  const double c = 1.0 - std::sqrt(du * du + dv * dv) / (2.0 * std::sqrt(2.0));
  return std::clamp(c, 0.0, 1.0);
}

FusedGaze fuse(const EyeCalibration& cal, const Keypoint& left_raw, const Keypoint& right_raw) {
  const Keypoint pl = apply_transform(cal.left_transform, left_raw);
  const Keypoint pr = apply_transform(cal.right_transform, right_raw);
  const Gaze l{pl.x, pl.y};
  const Gaze r{pr.x, pr.y};
  return {{(l.u + r.u) / 2.0, (l.v + r.v) / 2.0}, gaze_confidence(l, r)};
}

bool detect_blink(double confidence, double lambda_c) { return confidence < lambda_c; }

double filter_gain(double confidence) {
  if (confidence >= kFilterKnee) return std::clamp(5.0 * confidence - 4.0, 0.0, 1.0);
  return 0.0;
}

GazeState filter_eye(const GazeState& state, const Gaze& p, double confidence, double lambda_c) {
  const double c = std::clamp(confidence, 0.0, 1.0);
  GazeState out = state;
  out.last_confidence = c;
  out.blink = detect_blink(c, lambda_c);
  const double g = filter_gain(c);
  if (g > 0.0) {
    out.filtered = clamp_gaze({g * p.u + (1.0 - g) * state.filtered.u,
                               g * p.v + (1.0 - g) * state.filtered.v});
  }
  return out;
}

}  // namespace vrface
