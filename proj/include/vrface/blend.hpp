#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "vrface/error.hpp"

namespace vrface {

/// Dense h x w x c feature tensor, channel-fastest layout.
class FeatureGrid {
 public:
  FeatureGrid() = default;
  FeatureGrid(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);
  FeatureGrid(std::size_t height, std::size_t width, std::size_t channels, std::vector<double> data);

  std::size_t height() const { return h_; }
  std::size_t width() const { return w_; }
  std::size_t channels() const { return c_; }
  std::size_t size() const { return data_.size(); }

  double& at(std::size_t y, std::size_t x, std::size_t ch) { return data_[(y * w_ + x) * c_ + ch]; }
  double at(std::size_t y, std::size_t x, std::size_t ch) const { return data_[(y * w_ + x) * c_ + ch]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool same_shape(const FeatureGrid& o) const { return h_ == o.h_ && w_ == o.w_ && c_ == o.c_; }

  friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;

 private:
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::size_t c_ = 0;
  std::vector<double> data_;
};

/// Binary h x w mask.
class Mask {
 public:
  Mask() = default;
  Mask(std::size_t height, std::size_t width, std::uint8_t fill = 0);
  Mask(std::size_t height, std::size_t width, std::vector<std::uint8_t> data);

  std::size_t height() const { return h_; }
  std::size_t width() const { return w_; }

  std::uint8_t& at(std::size_t y, std::size_t x) { return data_[y * w_ + x]; }
  std::uint8_t at(std::size_t y, std::size_t x) const { return data_[y * w_ + x]; }
  const std::vector<std::uint8_t>& data() const { return data_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t h_ = 0;
  std::size_t w_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Weights of the recursive expression-frame filter.
struct BlendConfig {
  double lambda_e = 0.7;
  double lambda_e_tilde = 0.1;
  double lambda_o = 0.2;

  /// Throws InvalidArgument unless each weight lies in [0, 1] and they sum
  /// to 1 within 1e-12.
  void validate() const;

  friend bool operator==(const BlendConfig&, const BlendConfig&) = default;
};

/// Maps a grid into the geometry of the current expression frame.
using WarpOperator = std::function<FeatureGrid(const FeatureGrid&)>;

FeatureGrid identity_warp(const FeatureGrid& g);

/// Masked fusion of source and expression features:
///   m/2 * (f_s + f_e) + (1 - m) * f_s
/// with the 2D mask broadcast over channels.
FeatureGrid fuse_features(const FeatureGrid& f_s, const FeatureGrid& f_e, const Mask& mask_down);

/// Block-max pooling; target dims must divide the source dims.
Mask downsample_mask(const Mask& mask, std::size_t target_h, std::size_t target_w);

/// lambda_e * raw + lambda_e_tilde * warp(prev_e_tilde) + lambda_o * warp(prev_output).
FeatureGrid blend_expression(const BlendConfig& config, const FeatureGrid& raw_e,
                             const FeatureGrid& prev_e_tilde, const FeatureGrid& prev_output,
                             const WarpOperator& warp = identity_warp);

}  // namespace vrface
