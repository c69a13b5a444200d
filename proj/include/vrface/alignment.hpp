#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "vrface/core_types.hpp"

namespace vrface {

/// Per-keypoint maps from mouth-camera space into the source image's head
/// pose. Each transform acts on centroid-relative coordinates:
///
///   proj(m_i) = T_i (m_i - mean(m)) + mean(s)
///
/// where the means run over the lower-face keypoints of the mouth frame and
/// the source frame respectively.
struct AlignmentModel {
  std::vector<Transform2D> transforms;
  /// Keypoints whose last refit was rank-deficient and kept the old transform.
  std::vector<bool> rank_deficient;
  int iteration_count = 0;
  /// Mean per-keypoint Euclidean distance over the correspondence pairs the
  /// model was fitted on.
  double final_residual = 0.0;

  static AlignmentModel uniform(std::size_t keypoints, const Transform2D& t);

  std::size_t keypoint_count() const { return transforms.size(); }

  friend bool operator==(const AlignmentModel&, const AlignmentModel&) = default;
};

struct CorrespondencePair {
  std::int64_t mouth_frame_id = 0;
  std::int64_t source_frame_id = 0;
  /// Sum over lower-face keypoints of the projected-to-source distance.
  double distance = 0.0;

  friend bool operator==(const CorrespondencePair&, const CorrespondencePair&) = default;
};

/// Projects the lower-face keypoints of `mouth_set` into `source_set`'s frame.
/// The result carries only LowerFace roles.
KeypointSet project(const AlignmentModel& model, const KeypointSet& mouth_set,
                    const KeypointSet& source_set);

/// Point-level form of `project` with explicit centroids.
std::vector<Keypoint> project_points(const AlignmentModel& model, std::span<const Keypoint> mouth,
                                     const Keypoint& mouth_centroid,
                                     const Keypoint& source_centroid);

/// Mean Euclidean distance of the lower-face keypoints to their centroid,
/// averaged over frames.
double mean_spread(std::span<const FrameRecord> frames);

/// Initial model: every transform is the uniform scaling by the ratio of the
/// source spread to the mouth spread.
AlignmentModel init_from_scale(std::span<const FrameRecord> source_frames,
                               std::span<const FrameRecord> mouth_frames);

/// For each mouth frame (in order), the source frame whose lower-face keypoints
/// lie closest to the projected mouth keypoints. Ties go to the lower id.
std::vector<CorrespondencePair> find_correspondences(const AlignmentModel& model,
                                                     std::span<const FrameRecord> mouth_frames,
                                                     std::span<const FrameRecord> source_frames);

/// Refits every transform by least squares on the centroid-relative keypoint
/// pairs named by `pairs`. A keypoint whose fit is rank-deficient keeps its
/// previous transform and is flagged in `rank_deficient`.
AlignmentModel refine(const AlignmentModel& model, std::span<const CorrespondencePair> pairs,
                      std::span<const FrameRecord> mouth_frames,
                      std::span<const FrameRecord> source_frames);

/// Mean per-keypoint distance between projected mouth keypoints and their
/// paired source keypoints.
double pair_residual(const AlignmentModel& model, std::span<const CorrespondencePair> pairs,
                     std::span<const FrameRecord> mouth_frames,
                     std::span<const FrameRecord> source_frames);

struct CalibrationConfig {
  int max_iterations = 1000;
};

/// Alternates correspondence search and refitting, starting from
/// init_from_scale, until the assignment stops changing or the iteration cap
/// is hit. Returns the lowest-residual refit seen; never fails on
/// non-convergence.
AlignmentModel calibrate(std::span<const FrameRecord> source_frames,
                         std::span<const FrameRecord> mouth_frames,
                         const CalibrationConfig& config = {});

}  // namespace vrface
