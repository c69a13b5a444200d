#include "vrface/alignment.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>

#include "vrface/affine_fit.hpp"

namespace vrface {

namespace {

constexpr double kMinSpread = 1e-9;

// Lower-face keypoints of a frame sequence, stored relative to each frame's
// lower-face centroid.
struct CenteredFrames {
  std::size_t k = 0;
  std::vector<Keypoint> centered;  // frame-major, k per frame
  std::vector<Keypoint> centroids;
  std::vector<std::int64_t> ids;
  std::unordered_map<std::int64_t, std::size_t> index_of;

  std::size_t size() const { return ids.size(); }
  std::span<const Keypoint> frame(std::size_t f) const {
    return std::span<const Keypoint>(centered).subspan(f * k, k);
  }
  std::size_t lookup(std::int64_t id) const {
    const auto it = index_of.find(id);
    if (it == index_of.end()) {
      throw Error(ErrorKind::IndexOutOfRange, "no frame with id " + std::to_string(id));
    }
    return it->second;
  }
};

CenteredFrames center_frames(std::span<const FrameRecord> frames, std::size_t expected_k,
                             const char* what) {
  CenteredFrames out;
  out.k = expected_k;
  out.centered.reserve(frames.size() * expected_k);
  out.centroids.reserve(frames.size());
  out.ids.reserve(frames.size());
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto pts = frames[f].keypoints.subset(Role::LowerFace);
    if (pts.size() != expected_k) {
      throw Error(ErrorKind::DimensionMismatch,
                  std::string(what) + " frame " + std::to_string(frames[f].frame_id) + " has " +
                      std::to_string(pts.size()) + " lower-face keypoints, expected " +
                      std::to_string(expected_k));
    }
    const Keypoint c = centroid(std::span<const Keypoint>(pts));
    for (const auto& p : pts) out.centered.push_back(p - c);
    out.centroids.push_back(c);
    out.ids.push_back(frames[f].frame_id);
    out.index_of.emplace(frames[f].frame_id, f);
  }
  return out;
}

std::size_t lower_face_count(std::span<const FrameRecord> frames) {
  return frames.empty() ? 0 : frames.front().keypoints.count(Role::LowerFace);
}

void map_centered(const AlignmentModel& model, std::span<const Keypoint> centered,
                  std::vector<Keypoint>& out) {
  out.resize(centered.size());
  for (std::size_t i = 0; i < centered.size(); ++i) {
    out[i] = apply_transform(model.transforms[i], centered[i]);
  }
}

std::vector<CorrespondencePair> correspondences(const AlignmentModel& model,
                                                const CenteredFrames& mouth,
                                                const CenteredFrames& source) {
  std::vector<CorrespondencePair> pairs;
  pairs.reserve(mouth.size());
  std::vector<Keypoint> mapped;
  for (std::size_t j = 0; j < mouth.size(); ++j) {
    map_centered(model, mouth.frame(j), mapped);
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_id = 0;
    for (std::size_t s = 0; s < source.size(); ++s) {
      const auto target = source.frame(s);
      double d = 0.0;
      for (std::size_t i = 0; i < mouth.k && d <= best; ++i) d += distance(mapped[i], target[i]);
      if (d < best || (d == best && source.ids[s] < best_id)) {
        best = d;
        best_id = source.ids[s];
      }
    }
    pairs.push_back({mouth.ids[j], best_id, best});
  }
  return pairs;
}

double residual(const AlignmentModel& model, std::span<const CorrespondencePair> pairs,
                const CenteredFrames& mouth, const CenteredFrames& source) {
  if (pairs.empty()) return 0.0;
  double total = 0.0;
  std::vector<Keypoint> mapped;
  for (const auto& pair : pairs) {
    map_centered(model, mouth.frame(mouth.lookup(pair.mouth_frame_id)), mapped);
    const auto target = source.frame(source.lookup(pair.source_frame_id));
    for (std::size_t i = 0; i < mouth.k; ++i) total += distance(mapped[i], target[i]);
  }
  return total / static_cast<double>(pairs.size() * mouth.k);
}

AlignmentModel refit(const AlignmentModel& model, std::span<const CorrespondencePair> pairs,
                     const CenteredFrames& mouth, const CenteredFrames& source) {
  if (pairs.empty()) throw Error(ErrorKind::EmptyInput, "refine needs at least one pair");

  std::vector<std::size_t> mouth_idx;
  std::vector<std::size_t> source_idx;
  mouth_idx.reserve(pairs.size());
  source_idx.reserve(pairs.size());
  for (const auto& pair : pairs) {
    mouth_idx.push_back(mouth.lookup(pair.mouth_frame_id));
    source_idx.push_back(source.lookup(pair.source_frame_id));
  }

  AlignmentModel out = model;
  out.rank_deficient.assign(model.keypoint_count(), false);
  std::vector<Keypoint> from(pairs.size());
  std::vector<Keypoint> to(pairs.size());
  for (std::size_t i = 0; i < model.keypoint_count(); ++i) {
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      from[p] = mouth.frame(mouth_idx[p])[i];
      to[p] = source.frame(source_idx[p])[i];
    }
    if (auto fit = fit_affine(from, to)) {
      out.transforms[i] = *fit;
    } else {
      out.rank_deficient[i] = true;
    }
  }
  out.final_residual = residual(out, pairs, mouth, source);
  return out;
}

void check_model(const AlignmentModel& model, std::size_t k) {
  if (model.keypoint_count() != k) {
    throw Error(ErrorKind::DimensionMismatch,
                "model has " + std::to_string(model.keypoint_count()) + " transforms but frames have " +
                    std::to_string(k) + " lower-face keypoints");
  }
}

}  // namespace

AlignmentModel AlignmentModel::uniform(std::size_t keypoints, const Transform2D& t) {
  AlignmentModel m;
  m.transforms.assign(keypoints, t);
  m.rank_deficient.assign(keypoints, false);
  return m;
}

std::vector<Keypoint> project_points(const AlignmentModel& model, std::span<const Keypoint> mouth,
                                     const Keypoint& mouth_centroid,
                                     const Keypoint& source_centroid) {
  check_model(model, mouth.size());
  std::vector<Keypoint> out;
  out.reserve(mouth.size());
  for (std::size_t i = 0; i < mouth.size(); ++i) {
    out.push_back(apply_transform(model.transforms[i], mouth[i] - mouth_centroid) + source_centroid);
  }
  return out;
}

KeypointSet project(const AlignmentModel& model, const KeypointSet& mouth_set,
                    const KeypointSet& source_set) {
  const auto mouth = mouth_set.subset(Role::LowerFace);
  check_model(model, mouth.size());
  const Keypoint cm = centroid(std::span<const Keypoint>(mouth));
  const Keypoint cs = centroid(source_set, Role::LowerFace);
  return KeypointSet::lower_face(project_points(model, mouth, cm, cs));
}

double mean_spread(std::span<const FrameRecord> frames) {
  if (frames.empty()) throw Error(ErrorKind::EmptyInput, "spread of an empty sequence");
  double total = 0.0;
  for (const auto& f : frames) {
    const auto pts = f.keypoints.subset(Role::LowerFace);
    if (pts.empty()) {
      throw Error(ErrorKind::EmptyRoleSubset,
                  "frame " + std::to_string(f.frame_id) + " has no lower-face keypoints");
    }
    const Keypoint c = centroid(std::span<const Keypoint>(pts));
    double s = 0.0;
    for (const auto& p : pts) s += distance(p, c);
    total += s / static_cast<double>(pts.size());
  }
  return total / static_cast<double>(frames.size());
}

AlignmentModel init_from_scale(std::span<const FrameRecord> source_frames,
                               std::span<const FrameRecord> mouth_frames) {
  if (source_frames.empty() || mouth_frames.empty()) {
    throw Error(ErrorKind::EmptyInput, "scale initialisation needs source and mouth frames");
  }
  const std::size_t k = lower_face_count(source_frames);
  if (lower_face_count(mouth_frames) != k) {
    throw Error(ErrorKind::DimensionMismatch, "mouth and source frames disagree on lower-face count");
  }
  const double source_spread = mean_spread(source_frames);
  const double mouth_spread = mean_spread(mouth_frames);
  if (source_spread < kMinSpread || mouth_spread < kMinSpread) {
    throw Error(ErrorKind::DegenerateInput, "lower-face keypoints are coincident");
  }
  return AlignmentModel::uniform(k, Transform2D::scaling(source_spread / mouth_spread));
}

std::vector<CorrespondencePair> find_correspondences(const AlignmentModel& model,
                                                     std::span<const FrameRecord> mouth_frames,
                                                     std::span<const FrameRecord> source_frames) {
  if (mouth_frames.empty() || source_frames.empty()) {
    throw Error(ErrorKind::EmptyInput, "correspondence search needs mouth and source frames");
  }
  const std::size_t k = model.keypoint_count();
  const auto mouth = center_frames(mouth_frames, k, "mouth");
  const auto source = center_frames(source_frames, k, "source");
  return correspondences(model, mouth, source);
}

AlignmentModel refine(const AlignmentModel& model, std::span<const CorrespondencePair> pairs,
                      std::span<const FrameRecord> mouth_frames,
                      std::span<const FrameRecord> source_frames) {
  const std::size_t k = model.keypoint_count();
  return refit(model, pairs, center_frames(mouth_frames, k, "mouth"),
               center_frames(source_frames, k, "source"));
}

double pair_residual(const AlignmentModel& model, std::span<const CorrespondencePair> pairs,
                     std::span<const FrameRecord> mouth_frames,
                     std::span<const FrameRecord> source_frames) {
  const std::size_t k = model.keypoint_count();
  return residual(model, pairs, center_frames(mouth_frames, k, "mouth"),
                  center_frames(source_frames, k, "source"));
}

AlignmentModel calibrate(std::span<const FrameRecord> source_frames,
                         std::span<const FrameRecord> mouth_frames,
                         const CalibrationConfig& config) {
  if (source_frames.size() < 2 || mouth_frames.size() < 2) {
    throw Error(ErrorKind::EmptyInput, "calibration needs at least two source and two mouth frames");
  }
  AlignmentModel model = init_from_scale(source_frames, mouth_frames);
  const std::size_t k = model.keypoint_count();
  const auto mouth = center_frames(mouth_frames, k, "mouth");
  const auto source = center_frames(source_frames, k, "source");

  std::optional<AlignmentModel> best;
  std::vector<std::int64_t> previous;
  int iterations = 0;
  for (int it = 1; it <= config.max_iterations; ++it) {
    const auto pairs = correspondences(model, mouth, source);
    iterations = it;
    std::vector<std::int64_t> assignment;
    assignment.reserve(pairs.size());
    for (const auto& p : pairs) assignment.push_back(p.source_frame_id);
    if (assignment == previous) break;

    model = refit(model, pairs, mouth, source);
    if (!best || model.final_residual < best->final_residual) best = model;
    previous = std::move(assignment);
  }

  AlignmentModel out = best ? *best : model;
  out.iteration_count = iterations;
  return out;
}

}  // namespace vrface
