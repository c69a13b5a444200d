#include "vrface/retrieval.hpp"

#include <cmath>

namespace vrface {

ExpressionStore::ExpressionStore(std::vector<FrameRecord> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorKind::EmptyInput, "expression store needs at least one frame");
  k_ = values_.front().keypoints.count(Role::LowerFace);
  if (k_ == 0) throw Error(ErrorKind::EmptyRoleSubset, "expression frames carry no lower-face keypoints");
  centroids_.reserve(values_.size());
  centered_.reserve(values_.size() * k_);
  for (const auto& v : values_) {
    const auto pts = v.keypoints.subset(Role::LowerFace);
    if (pts.size() != k_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "expression frame " + std::to_string(v.frame_id) + " has " +
                      std::to_string(pts.size()) + " lower-face keypoints, expected " +
                      std::to_string(k_));
    }
    const Keypoint c = centroid(std::span<const Keypoint>(pts));
    centroids_.push_back(c);
    for (const auto& p : pts) centered_.push_back(p - c);
  }
}

KeypointSet ExpressionStore::key(std::size_t i) const {
  return values_.at(i).keypoints.lower_face_set();
}

std::optional<std::size_t> ExpressionStore::find(std::int64_t frame_id) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i].frame_id == frame_id) return i;
  }
  return std::nullopt;
}

namespace {

// Query keypoints mapped by the per-keypoint transforms, still relative to
// the query centroid. Adding a value's centroid gives the projection onto it.
std::vector<Keypoint> mapped_query(const KeypointSet& query, const AlignmentModel& model,
                                   const ExpressionStore& store) {
  const auto pts = query.subset(Role::LowerFace);
  if (pts.size() != store.lower_face_count() || pts.size() != model.keypoint_count()) {
    throw Error(ErrorKind::DimensionMismatch,
                "query has " + std::to_string(pts.size()) + " lower-face keypoints; store has " +
                    std::to_string(store.lower_face_count()) + ", model " +
                    std::to_string(model.keypoint_count()));
  }
  const Keypoint c = centroid(std::span<const Keypoint>(pts));
  std::vector<Keypoint> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = apply_transform(model.transforms[i], pts[i] - c);
  return out;
}

double score_mapped(std::span<const Keypoint> mapped, const ExpressionStore& store, std::size_t index) {
  const auto key = store.centered_key(index);
  double d = 0.0;
  for (std::size_t l = 0; l < mapped.size(); ++l) d += distance(mapped[l], key[l]);
  return d;
}

std::size_t argmin(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] < scores[best]) best = i;
  }
  return best;
}

}  // namespace

double score(const KeypointSet& query, const AlignmentModel& model, const ExpressionStore& store,
             std::size_t index) {
  if (index >= store.size()) {
    throw Error(ErrorKind::IndexOutOfRange,
                "index " + std::to_string(index) + " outside store of size " + std::to_string(store.size()));
  }
  return score_mapped(mapped_query(query, model, store), store, index);
}

std::vector<double> score_all(const KeypointSet& query, const AlignmentModel& model,
                              const ExpressionStore& store) {
  const auto mapped = mapped_query(query, model, store);
  std::vector<double> scores(store.size());
  for (std::size_t i = 0; i < store.size(); ++i) scores[i] = score_mapped(mapped, store, i);
  return scores;
}

RetrievalHit retrieve(const KeypointSet& query, const AlignmentModel& model,
                      const ExpressionStore& store) {
  const auto scores = score_all(query, model, store);
  const std::size_t best = argmin(scores);
  return {best, scores[best]};
}

HysteresisResult retrieve_with_hysteresis(const KeypointSet& query, const AlignmentModel& model,
                                          const ExpressionStore& store, const RetrievalState& state,
                                          double lambda_swap) {
  if (!(lambda_swap >= 0.0) || !std::isfinite(lambda_swap)) {
    throw Error(ErrorKind::InvalidArgument, "lambda_swap must be a finite non-negative number");
  }
  if (state.current_index && *state.current_index >= store.size()) {
    throw Error(ErrorKind::IndexOutOfRange, "retrieval state names a frame outside the store");
  }
  const auto scores = score_all(query, model, store);
  const std::size_t best = argmin(scores);

  HysteresisResult out;
  if (!state.current_index) {
    out.state = {best, scores[best]};
    out.switched = true;
    return out;
  }
  const std::size_t current = *state.current_index;
  if (best != current && scores[current] > (1.0 + lambda_swap) * scores[best]) {
    out.state = {best, scores[best]};
    out.switched = true;
  } else {
    out.state = {current, scores[current]};
  }
  return out;
}

}  // namespace vrface
