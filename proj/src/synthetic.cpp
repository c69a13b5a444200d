#include "vrface/synthetic.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <Eigen/Dense>

namespace vrface {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Keypoint kMouthCenter{0.0, 0.35};
const Keypoint kHeadsetMouthCenter{0.0, 0.05};
constexpr std::size_t kGazeLandmark = 37;

// Rest positions of landmarks 0-47 (everything except the mouth), image
// y axis pointing down.
std::vector<Keypoint> face_template() {
  std::vector<Keypoint> t(48);
  for (std::size_t l = 0; l <= 16; ++l) {
    const double a = std::numbers::pi * static_cast<double>(l) / 16.0;
    t[l] = {-0.55 * std::cos(a), -0.05 + 0.65 * std::sin(a)};
  }
  for (std::size_t q = 0; q < 5; ++q) {
    const double x = 0.42 - 0.08 * static_cast<double>(q);
    const double y = -0.35 - 0.04 * std::sin(std::numbers::pi * static_cast<double>(q) / 4.0);
    t[17 + q] = {-x, y};
    t[26 - q] = {x, y};
  }
  for (std::size_t q = 0; q < 4; ++q) t[27 + q] = {0.0, -0.25 + 0.1 * static_cast<double>(q)};
  for (std::size_t q = 0; q < 5; ++q) t[31 + q] = {-0.1 + 0.05 * static_cast<double>(q), 0.1};
  const Keypoint right_eye[] = {{-0.33, -0.18}, {-0.28, -0.215}, {-0.22, -0.215},
                                {-0.17, -0.18}, {-0.22, -0.145}, {-0.28, -0.145}};
  for (std::size_t q = 0; q < 6; ++q) {
    t[36 + q] = right_eye[q];
    // Mirror with the inner corner first, as in the 68-point layout.
    t[42 + q] = {-right_eye[(3 + 6 - q) % 6].x, right_eye[(3 + 6 - q) % 6].y};
  }
  return t;
}

// Centered rest shape of the lower-face keypoints: an outer and an inner lip
// contour (12 + 8 points for the default count of 20).
std::vector<Keypoint> mouth_template(std::size_t k) {
  std::vector<Keypoint> pts;
  const std::size_t outer = std::max<std::size_t>(1, (k * 3) / 5);
  const std::size_t inner = k - outer;
  for (std::size_t q = 0; q < outer; ++q) {
    const double a = std::numbers::pi + kTwoPi * static_cast<double>(q) / static_cast<double>(outer);
    pts.push_back({0.18 * std::cos(a), 0.08 * std::sin(a)});
  }
  for (std::size_t q = 0; q < inner; ++q) {
    const double a = std::numbers::pi + kTwoPi * static_cast<double>(q) / static_cast<double>(inner);
    pts.push_back({0.1 * std::cos(a), 0.035 * std::sin(a)});
  }
  return pts;
}

std::vector<Role> source_roles(std::size_t k, bool full_face) {
  std::vector<Role> roles(k, Role::LowerFace);
  if (!full_face) return roles;
  for (std::size_t l = 0; l < 48; ++l) roles.push_back(l >= 36 ? Role::Eye : Role::Pose);
  return roles;
}

Keypoint head_offset(double t) {
  return {0.02 * std::sin(kTwoPi * 0.11 * t), 0.015 * std::sin(kTwoPi * 0.07 * t + 0.5)};
}

Keypoint headset_offset(double t) {
  return {0.01 * std::sin(kTwoPi * 0.09 * t), 0.01 * std::cos(kTwoPi * 0.05 * t)};
}

Gaze gaze_path(double t) {
  return {0.7 * std::sin(kTwoPi * 0.23 * t), 0.5 * std::sin(kTwoPi * 0.17 * t + 1.0)};
}

std::string payload(const char* stem, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s/%06zu.png", stem, i);
  return buf;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticScenario& sc) {
  const std::size_t k = sc.lower_face_keypoints;
  const std::size_t n = sc.frames;
  if (k < 3) throw Error(ErrorKind::InvalidArgument, "synthetic scenario needs at least 3 lower-face keypoints");
  if (!(sc.fps > 0.0) || !(sc.noise_sigma >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "synthetic scenario needs fps > 0 and noise >= 0");
  }

  std::mt19937_64 rng(sc.seed);
  auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::normal_distribution<double> unit_normal(0.0, 1.0);

  SyntheticData out;
  SyntheticTruth& truth = out.truth;
  truth.noise_sigma = sc.noise_sigma;
  truth.seed = sc.seed;

  // Ground-truth mouth->source transforms.
  if (!sc.transforms.empty()) {
    if (sc.transforms.size() != k) throw Error(ErrorKind::DimensionMismatch, "scenario transform count != keypoints");
    truth.transforms = sc.transforms;
  } else {
    std::vector<Eigen::Matrix2d> lin(k);
    std::vector<Eigen::Vector2d> off(k);
    Eigen::Vector2d mean_off = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < k; ++i) {
      Eigen::Matrix2d e;
      e << uniform(-sc.linear_jitter, sc.linear_jitter), uniform(-sc.linear_jitter, sc.linear_jitter),
          uniform(-sc.linear_jitter, sc.linear_jitter), uniform(-sc.linear_jitter, sc.linear_jitter);
      lin[i] = sc.base_scale * (Eigen::Matrix2d::Identity() + e);
      off[i] = {uniform(-sc.translation_jitter, sc.translation_jitter),
                uniform(-sc.translation_jitter, sc.translation_jitter)};
      mean_off += off[i];
    }
    mean_off /= static_cast<double>(k);
    for (std::size_t i = 0; i < k; ++i) {
      const Eigen::Vector2d b = off[i] - mean_off;
      truth.transforms.push_back(Transform2D::affine(lin[i](0, 0), lin[i](0, 1), b(0), lin[i](1, 0), lin[i](1, 1), b(1)));
    }
  }

  std::vector<KeypointWaveform> waves = sc.waveforms;
  if (waves.empty()) {
    for (std::size_t i = 0; i < k; ++i) {
      KeypointWaveform w;
      w.amplitude_x = uniform(0.015, 0.035);
      w.amplitude_y = uniform(0.02, 0.05);
      w.frequency_hz = uniform(2.5, 6.5);
      w.phase_x = uniform(0.0, kTwoPi);
      w.phase_y = uniform(0.0, kTwoPi);
      waves.push_back(w);
    }
  } else if (waves.size() != k) {
    throw Error(ErrorKind::DimensionMismatch, "scenario waveform count != keypoints");
  }

  // Centered source shapes must satisfy sum(s_i) = 0 and
  // sum(T_i^-1(s_i)) = 0 so that the mouth shapes are centered as well and
  // the ground truth is exactly representable by the projection model.
  const auto dim = static_cast<Eigen::Index>(2 * k);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(4, dim);
  Eigen::Vector4d d = Eigen::Vector4d::Zero();
  std::vector<Transform2D> inverse;
  for (std::size_t i = 0; i < k; ++i) {
    inverse.push_back(truth.transforms[i].inverse());
    const Eigen::Matrix2d b = inverse[i].linear();
    const auto col = static_cast<Eigen::Index>(2 * i);
    c(0, col) = 1.0;
    c(1, col + 1) = 1.0;
    c.block<2, 2>(2, col) = b;
    d.tail<2>() += b * truth.transforms[i].offset();
  }
  const Eigen::MatrixXd cct = c * c.transpose();
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cct_solver(cct);

  const auto base = mouth_template(k);
  std::vector<std::vector<Keypoint>> shapes(n);
  for (std::size_t f = 0; f < n; ++f) {
    const double t = static_cast<double>(f) / sc.fps;
    Eigen::VectorXd x(dim);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& w = waves[i];
      x(2 * i) = base[i].x + w.amplitude_x * std::sin(kTwoPi * w.frequency_hz * t + w.phase_x);
      x(2 * i + 1) = base[i].y + w.amplitude_y * std::sin(kTwoPi * w.frequency_hz * t + w.phase_y);
    }
    const Eigen::Vector4d r = c * x - d;
    x -= c.transpose() * cct_solver.solve(r);
    shapes[f].resize(k);
    for (std::size_t i = 0; i < k; ++i) shapes[f][i] = {x(2 * i), x(2 * i + 1)};
  }

  // Source stream.
  const auto face = face_template();
  const auto roles = source_roles(k, sc.full_face);
  for (std::size_t f = 0; f < n; ++f) {
    const double t = static_cast<double>(f) / sc.fps;
    const Keypoint head = head_offset(t);
    std::vector<Keypoint> pts;
    pts.reserve(roles.size());
    for (const auto& p : shapes[f]) pts.push_back(kMouthCenter + head + p);
    if (sc.full_face) {
      for (const auto& p : face) pts.push_back(p + head);
    }
    StreamLine line;
    line.frame = {static_cast<std::int64_t>(f), t, KeypointSet(std::move(pts), roles), payload("source", f)};
    line.sentence = "That quick beige fox jumped in the air over each thin dog, look out he shouts for "
                    "he's foiled you again, creating chaos";
    out.source.push_back(std::move(line));
  }

  // Which source expression each mouth frame shows.
  if (!sc.permutation.empty()) {
    if (sc.permutation.size() != n) throw Error(ErrorKind::DimensionMismatch, "scenario permutation size != frames");
    truth.permutation = sc.permutation;
  } else {
    truth.permutation.resize(n);
    for (std::size_t j = 0; j < n; ++j) truth.permutation[j] = j;
    if (!sc.identity_permutation) std::shuffle(truth.permutation.begin(), truth.permutation.end(), rng);
  }

  // Eye cameras: raw keypoints are the inverse camera->display maps applied
  // to the gaze target.
  truth.left_cam_to_vr = Transform2D::affine(1.8 + uniform(-0.1, 0.1), 0.2, 0.1, -0.15, 1.6 + uniform(-0.1, 0.1), -0.05);
  truth.right_cam_to_vr = Transform2D::affine(-1.7 + uniform(-0.1, 0.1), 0.1, -0.05, 0.2, 1.9 + uniform(-0.1, 0.1), 0.08);
  const Transform2D left_inv = truth.left_cam_to_vr.inverse();
  const Transform2D right_inv = truth.right_cam_to_vr.inverse();
  auto eye_noise = [&] { return Keypoint{sc.eye_noise_sigma * unit_normal(rng), sc.eye_noise_sigma * unit_normal(rng)}; };

  // Mouth stream with eye observations.
  for (std::size_t j = 0; j < n; ++j) {
    const double t = static_cast<double>(j) / sc.fps;
    const auto& shape = shapes[truth.permutation[j]];
    const Keypoint center = kHeadsetMouthCenter + headset_offset(t);
    std::vector<Keypoint> pts;
    pts.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
      const Keypoint noise{sc.noise_sigma * unit_normal(rng), sc.noise_sigma * unit_normal(rng)};
      pts.push_back(apply_transform(inverse[i], shape[i]) + center + noise);
    }

    const Gaze g = gaze_path(t);
    const bool blink = sc.blink_period > 0 && (j + sc.blink_period / 2) % sc.blink_period < sc.blink_length;
    EyeObservation eyes;
    if (blink) {
      // Closed eyes: the two predictions disagree strongly.
      eyes.left = apply_transform(left_inv, Keypoint{g.u + 0.8, g.v + 0.8});
      eyes.right = apply_transform(right_inv, Keypoint{g.u - 0.8, g.v - 0.8});
    } else {
      eyes.left = apply_transform(left_inv, Keypoint{g.u, g.v}) + eye_noise();
      eyes.right = apply_transform(right_inv, Keypoint{g.u, g.v}) + eye_noise();
    }
    truth.gaze.push_back(g);
    truth.blink.push_back(blink);

    StreamLine line;
    line.frame = {static_cast<std::int64_t>(j), t, KeypointSet::lower_face(std::move(pts)), payload("mouth", j)};
    line.eyes = eyes;
    out.mouth.push_back(std::move(line));
  }

  // Calibration dots.
  for (std::size_t s = 0; s < sc.eye_calibration_samples; ++s) {
    const Gaze g{uniform(-0.9, 0.9), uniform(-0.9, 0.9)};
    const Keypoint l = apply_transform(left_inv, Keypoint{g.u, g.v}) + eye_noise();
    const Keypoint r = apply_transform(right_inv, Keypoint{g.u, g.v}) + eye_noise();
    out.eye_samples.push_back({l, r, g});
  }

  // Boundary of the gaze keypoint around its rest position in source frame 0.
  const Keypoint origin = sc.full_face ? out.source.front().frame.keypoints[k + kGazeLandmark]
                                       : face[kGazeLandmark] + head_offset(0.0);
  out.eye_boundary = {origin, origin + Keypoint{0.025, 0.0}, origin + Keypoint{-0.025, 0.0},
                      origin + Keypoint{0.0, -0.012}, origin + Keypoint{0.0, 0.015}};
  return out;
}

void to_json(json& j, const SyntheticTruth& t) {
  json blink = json::array();
  for (bool b : t.blink) blink.push_back(b);
  j = {{"transforms", t.transforms},
       {"permutation", t.permutation},
       {"left_cam_to_vr", t.left_cam_to_vr},
       {"right_cam_to_vr", t.right_cam_to_vr},
       {"gaze", t.gaze},
       {"blink", blink},
       {"noise_sigma", t.noise_sigma},
       {"seed", t.seed}};
}

void from_json(const json& j, SyntheticTruth& t) {
  t.transforms = j.at("transforms").get<std::vector<Transform2D>>();
  t.permutation = j.at("permutation").get<std::vector<std::size_t>>();
  t.left_cam_to_vr = j.at("left_cam_to_vr").get<Transform2D>();
  t.right_cam_to_vr = j.at("right_cam_to_vr").get<Transform2D>();
  t.gaze = j.at("gaze").get<std::vector<Gaze>>();
  t.blink = j.at("blink").get<std::vector<bool>>();
  t.noise_sigma = j.at("noise_sigma").get<double>();
  t.seed = j.at("seed").get<std::uint64_t>();
}

Split holdout_split(std::span<const FrameRecord> frames, double holdout) {
  const auto n = frames.size();
  const auto test = static_cast<std::size_t>(std::ceil(holdout * static_cast<double>(n)));
  const auto train = n - std::min(test, n);
  return {{frames.begin(), frames.begin() + static_cast<std::ptrdiff_t>(train)},
          {frames.begin() + static_cast<std::ptrdiff_t>(train), frames.end()}};
}

double reprojection_error(const AlignmentModel& fitted, std::span<const Transform2D> truth,
                          std::span<const FrameRecord> mouth_frames) {
  if (fitted.keypoint_count() != truth.size()) {
    throw Error(ErrorKind::DimensionMismatch, "fitted and ground-truth models differ in size");
  }
  if (mouth_frames.empty()) return 0.0;
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& f : mouth_frames) {
    const auto pts = f.keypoints.subset(Role::LowerFace);
    if (pts.size() != truth.size()) throw Error(ErrorKind::DimensionMismatch, "mouth frame size mismatch");
    const Keypoint c = centroid(std::span<const Keypoint>(pts));
    for (std::size_t i = 0; i < pts.size(); ++i) {
      total += distance(apply_transform(fitted.transforms[i], pts[i] - c), apply_transform(truth[i], pts[i] - c));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

double correspondence_agreement(std::span<const CorrespondencePair> pairs,
                                std::span<const std::size_t> permutation) {
  if (pairs.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& p : pairs) {
    const auto m = static_cast<std::size_t>(p.mouth_frame_id);
    if (m < permutation.size() && static_cast<std::int64_t>(permutation[m]) == p.source_frame_id) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

double max_scale_error(const AlignmentModel& fitted, double scale) {
  double worst = 0.0;
  for (const auto& t : fitted.transforms) {
    const double s = std::sqrt(std::abs(t.linear().determinant()));
    worst = std::max(worst, std::abs(s - scale) / scale);
  }
  return worst;
}

CalibrationReport evaluate_calibration(std::span<const FrameRecord> source,
                                       std::span<const FrameRecord> mouth, const SyntheticTruth& truth,
                                       const CalibrationConfig& config) {
  const Split split = holdout_split(mouth);
  CalibrationReport report;
  const auto start = std::chrono::steady_clock::now();
  report.model = calibrate(source, split.train, config);
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.heldout_reprojection_error = reprojection_error(report.model, truth.transforms, split.test);
  report.agreement = correspondence_agreement(find_correspondences(report.model, mouth, source), truth.permutation);
  return report;
}

void to_json(json& j, const CalibrationReport& r) {
  j = {{"seconds", r.seconds},
       {"iterations", r.model.iteration_count},
       {"final_residual", r.model.final_residual},
       {"heldout_reprojection_error", r.heldout_reprojection_error},
       {"correspondence_agreement", r.agreement}};
}

}  // namespace vrface
