#include "vrface/blend.hpp"

#include <cmath>
#include <string>

namespace vrface {

namespace {

std::string shape(const FeatureGrid& g) {
  return std::to_string(g.height()) + "x" + std::to_string(g.width()) + "x" +
         std::to_string(g.channels());
}

void require_same_shape(const FeatureGrid& a, const FeatureGrid& b, const char* what) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::ShapeMismatch, std::string(what) + ": " + shape(a) + " vs " + shape(b));
  }
}

}  // namespace

FeatureGrid::FeatureGrid(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : h_(height), w_(width), c_(channels), data_(height * width * channels, fill) {
  if (h_ == 0 || w_ == 0 || c_ == 0) throw Error(ErrorKind::ShapeMismatch, "feature grid dims must be positive");
}

FeatureGrid::FeatureGrid(std::size_t height, std::size_t width, std::size_t channels,
                         std::vector<double> data)
    : h_(height), w_(width), c_(channels), data_(std::move(data)) {
  if (h_ == 0 || w_ == 0 || c_ == 0) throw Error(ErrorKind::ShapeMismatch, "feature grid dims must be positive");
  if (data_.size() != h_ * w_ * c_) {
    throw Error(ErrorKind::ShapeMismatch, "feature grid data size does not match " + shape(*this));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "feature grid entries must be finite");
  }
}

Mask::Mask(std::size_t height, std::size_t width, std::uint8_t fill)
    : h_(height), w_(width), data_(height * width, fill) {
  if (fill > 1) throw Error(ErrorKind::InvalidArgument, "mask values must be 0 or 1");
}

Mask::Mask(std::size_t height, std::size_t width, std::vector<std::uint8_t> data)
    : h_(height), w_(width), data_(std::move(data)) {
  if (data_.size() != h_ * w_) throw Error(ErrorKind::ShapeMismatch, "mask data size does not match dims");
  for (auto v : data_) {
    if (v > 1) throw Error(ErrorKind::InvalidArgument, "mask values must be 0 or 1");
  }
}

void BlendConfig::validate() const {
  for (double w : {lambda_e, lambda_e_tilde, lambda_o}) {
    if (!(w >= 0.0 && w <= 1.0)) throw Error(ErrorKind::InvalidArgument, "blend weights must lie in [0, 1]");
  }
  if (std::abs(lambda_e + lambda_e_tilde + lambda_o - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "blend weights must sum to 1");
  }
}

FeatureGrid identity_warp(const FeatureGrid& g) { return g; }

FeatureGrid fuse_features(const FeatureGrid& f_s, const FeatureGrid& f_e, const Mask& mask_down) {
  require_same_shape(f_s, f_e, "fuse_features");
  if (mask_down.height() != f_s.height() || mask_down.width() != f_s.width()) {
    throw Error(ErrorKind::ShapeMismatch, "mask dims do not match feature grid " + shape(f_s));
  }
  FeatureGrid out = f_s;
  for (std::size_t y = 0; y < f_s.height(); ++y) {
    for (std::size_t x = 0; x < f_s.width(); ++x) {
      // The mask is binary, so the formula is either f_s or the mean.
      if (mask_down.at(y, x) == 0) continue;
      for (std::size_t ch = 0; ch < f_s.channels(); ++ch) {
        out.at(y, x, ch) = 0.5 * (f_s.at(y, x, ch) + f_e.at(y, x, ch));
      }
    }
  }
  return out;
}

Mask downsample_mask(const Mask& mask, std::size_t target_h, std::size_t target_w) {
  if (target_h == 0 || target_w == 0 || mask.height() % target_h != 0 || mask.width() % target_w != 0) {
    throw Error(ErrorKind::ShapeMismatch, "mask of " + std::to_string(mask.height()) + "x" +
                                              std::to_string(mask.width()) + " cannot be pooled to " +
                                              std::to_string(target_h) + "x" + std::to_string(target_w));
  }
  const std::size_t by = mask.height() / target_h;
  const std::size_t bx = mask.width() / target_w;
  Mask out(target_h, target_w);
  for (std::size_t y = 0; y < mask.height(); ++y) {
    for (std::size_t x = 0; x < mask.width(); ++x) {
      if (mask.at(y, x)) out.at(y / by, x / bx) = 1;
    }
  }
  return out;
}

FeatureGrid blend_expression(const BlendConfig& config, const FeatureGrid& raw_e,
                             const FeatureGrid& prev_e_tilde, const FeatureGrid& prev_output,
                             const WarpOperator& warp) {
  const FeatureGrid we = warp(prev_e_tilde);
  const FeatureGrid wo = warp(prev_output);
  require_same_shape(raw_e, we, "blend_expression (previous expression)");
  require_same_shape(raw_e, wo, "blend_expression (previous output)");
  FeatureGrid out = raw_e;
  auto& d = out.data();
  const auto& a = raw_e.data();
  const auto& b = we.data();
  const auto& c = wo.data();
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = config.lambda_e * a[i] + config.lambda_e_tilde * b[i] + config.lambda_o * c[i];
  }
  return out;
}

}  // namespace vrface
