#pragma once

#include <optional>
#include <vector>

#include "vrface/alignment.hpp"
#include "vrface/core_types.hpp"

namespace vrface {

/// Enrollment frames indexed by their lower-face keypoints. Keys are the
/// lower-face subsets of the stored values; both are immutable once built.
class ExpressionStore {
 public:
  explicit ExpressionStore(std::vector<FrameRecord> values);

  std::size_t size() const { return values_.size(); }
  std::size_t lower_face_count() const { return k_; }

  const FrameRecord& value(std::size_t i) const { return values_.at(i); }
  const std::vector<FrameRecord>& values() const { return values_; }
  /// Lower-face keypoints of value i.
  KeypointSet key(std::size_t i) const;

  const Keypoint& key_centroid(std::size_t i) const { return centroids_[i]; }
  /// Lower-face keypoints of value i relative to their centroid.
  std::span<const Keypoint> centered_key(std::size_t i) const {
    return std::span<const Keypoint>(centered_).subspan(i * k_, k_);
  }

  /// Index of the value with the given frame id, if stored.
  std::optional<std::size_t> find(std::int64_t frame_id) const;

 private:
  std::vector<FrameRecord> values_;
  std::size_t k_ = 0;
  std::vector<Keypoint> centroids_;
  std::vector<Keypoint> centered_;
};

struct RetrievalState {
  std::optional<std::size_t> current_index;
  std::optional<double> current_distance;

  friend bool operator==(const RetrievalState&, const RetrievalState&) = default;
};

struct RetrievalHit {
  std::size_t index = 0;
  double distance = 0.0;
};

/// Sum over lower-face keypoints of the distance between the query projected
/// onto value `index` (anchored at that value's lower-face centroid) and the
/// value's key.
double score(const KeypointSet& query, const AlignmentModel& model, const ExpressionStore& store,
             std::size_t index);

/// Scores of every stored value for one query.
std::vector<double> score_all(const KeypointSet& query, const AlignmentModel& model,
                              const ExpressionStore& store);

/// Linear-scan argmin of `score`; ties go to the lower index.
RetrievalHit retrieve(const KeypointSet& query, const AlignmentModel& model,
                      const ExpressionStore& store);

struct HysteresisResult {
  RetrievalState state;
  bool switched = false;
};

/// Keeps the current expression frame unless the best other frame is more
/// than (1 + lambda_swap) times closer. The current frame's distance is
/// always re-scored against the new query.
HysteresisResult retrieve_with_hysteresis(const KeypointSet& query, const AlignmentModel& model,
                                          const ExpressionStore& store, const RetrievalState& state,
                                          double lambda_swap);

inline constexpr double kDefaultLambdaSwap = 0.25;

}  // namespace vrface
