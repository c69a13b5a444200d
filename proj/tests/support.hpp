#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "vrface/alignment.hpp"
#include "vrface/core_types.hpp"

namespace testing {

using namespace vrface;

inline std::vector<Keypoint> random_points(std::mt19937_64& rng, std::size_t n, double lo = -0.5,
                                           double hi = 0.5) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Keypoint> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

inline std::vector<FrameRecord> random_frames(std::mt19937_64& rng, std::size_t n, std::size_t k,
                                              std::int64_t first_id = 0) {
  std::vector<FrameRecord> frames;
  for (std::size_t i = 0; i < n; ++i) {
    FrameRecord f;
    f.frame_id = first_id + static_cast<std::int64_t>(i);
    f.timestamp = static_cast<double>(i) / 30.0;
    f.keypoints = KeypointSet::lower_face(random_points(rng, k));
    frames.push_back(f);
  }
  return frames;
}

// Plain loop, no library helpers.
inline Keypoint naive_mean(const std::vector<Keypoint>& pts) {
  double sx = 0.0, sy = 0.0;
  for (const auto& p : pts) {
    sx += p.x;
    sy += p.y;
  }
  return {sx / static_cast<double>(pts.size()), sy / static_cast<double>(pts.size())};
}

// Direct evaluation of T(m - mean(m)) + mean(s) from raw matrix entries.
inline Keypoint naive_project(const Transform2D& t, const Keypoint& m, const Keypoint& mouth_mean,
                              const Keypoint& source_mean) {
  const auto& a = t.matrix();
  const double dx = m.x - mouth_mean.x;
  const double dy = m.y - mouth_mean.y;
  return {a(0, 0) * dx + a(0, 1) * dy + a(0, 2) + source_mean.x,
          a(1, 0) * dx + a(1, 1) * dy + a(1, 2) + source_mean.y};
}

// Sum over keypoints of || T_l(q_l - mean q) + mean key - key_l ||.
inline double naive_score(const AlignmentModel& model, const std::vector<Keypoint>& query,
                          const std::vector<Keypoint>& key) {
  const Keypoint qm = naive_mean(query);
  const Keypoint km = naive_mean(key);
  double total = 0.0;
  for (std::size_t l = 0; l < query.size(); ++l) {
    const Keypoint p = naive_project(model.transforms[l], query[l], qm, km);
    total += std::hypot(p.x - key[l].x, p.y - key[l].y);
  }
  return total;
}

inline double max_abs_diff(const Transform2D& a, const Transform2D& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

}  // namespace testing
