#include <doctest.h>

#include <random>

#include "vrface/blend.hpp"

using namespace vrface;

namespace {

FeatureGrid random_grid(std::mt19937_64& rng, std::size_t h, std::size_t w, std::size_t c) {
  std::uniform_real_distribution<double> u(-2, 2);
  std::vector<double> d(h * w * c);
  for (auto& v : d) v = u(rng);
  return FeatureGrid(h, w, c, std::move(d));
}

Mask random_mask(std::mt19937_64& rng, std::size_t h, std::size_t w, double p = 0.5) {
  std::bernoulli_distribution b(p);
  std::vector<std::uint8_t> d(h * w);
  for (auto& v : d) v = b(rng) ? 1 : 0;
  return Mask(h, w, std::move(d));
}

// Shifts every cell one column to the right, wrapping around.
FeatureGrid shift_warp(const FeatureGrid& g) {
  FeatureGrid out(g.height(), g.width(), g.channels());
  for (std::size_t y = 0; y < g.height(); ++y)
    for (std::size_t x = 0; x < g.width(); ++x)
      for (std::size_t c = 0; c < g.channels(); ++c) out.at(y, (x + 1) % g.width(), c) = g.at(y, x, c);
  return out;
}

}  // namespace

TEST_CASE("all-zero mask returns f_s bit for bit") {
  std::mt19937_64 rng(71);
  const auto fs = random_grid(rng, 8, 8, 4);
  const auto fe = random_grid(rng, 8, 8, 4);
  CHECK(fuse_features(fs, fe, Mask(8, 8, 0)) == fs);
}

TEST_CASE("all-one mask returns the mean") {
  std::mt19937_64 rng(72);
  const auto fs = random_grid(rng, 8, 8, 4);
  const auto fe = random_grid(rng, 8, 8, 4);
  const auto out = fuse_features(fs, fe, Mask(8, 8, 1));
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.data()[i] == doctest::Approx((fs.data()[i] + fe.data()[i]) / 2).epsilon(1e-15));
}

TEST_CASE("fuse_features matches the element formula on random grids") {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 20; ++trial) {
    const auto fs = random_grid(rng, 8, 8, 4);
    const auto fe = random_grid(rng, 8, 8, 4);
    const auto m = random_mask(rng, 8, 8);
    const auto out = fuse_features(fs, fe, m);
    for (std::size_t y = 0; y < 8; ++y)
      for (std::size_t x = 0; x < 8; ++x)
        for (std::size_t c = 0; c < 4; ++c) {
          const double md = m.at(y, x);
          const double oracle = (md / 2) * (fs.at(y, x, c) + fe.at(y, x, c)) + (1 - md) * fs.at(y, x, c);
          CHECK(std::abs(out.at(y, x, c) - oracle) <= 1e-12);
          if (m.at(y, x) == 0) CHECK(out.at(y, x, c) == fs.at(y, x, c));
        }
  }
}

TEST_CASE("fuse_features rejects mismatched shapes") {
  std::mt19937_64 rng(74);
  const auto a = random_grid(rng, 8, 8, 4);
  const auto b = random_grid(rng, 8, 8, 3);
  CHECK_THROWS_AS(fuse_features(a, b, Mask(8, 8)), Error);
  CHECK_THROWS_AS(fuse_features(a, a, Mask(4, 8)), Error);
}

TEST_CASE("block-max downsampling") {
  CHECK(downsample_mask(Mask(8, 8, 1), 4, 4) == Mask(4, 4, 1));
  Mask one(2, 2);
  one.at(1, 0) = 1;
  CHECK(downsample_mask(one, 1, 1) == Mask(1, 1, 1));
  CHECK_THROWS_AS(downsample_mask(Mask(6, 6), 4, 4), Error);
}

TEST_CASE("downsampling matches a block scan") {
  std::mt19937_64 rng(75);
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = random_mask(rng, 16, 16, 0.03);
    const auto out = downsample_mask(m, 4, 4);
    for (std::size_t by = 0; by < 4; ++by)
      for (std::size_t bx = 0; bx < 4; ++bx) {
        int any = 0;
        for (std::size_t y = by * 4; y < by * 4 + 4; ++y)
          for (std::size_t x = bx * 4; x < bx * 4 + 4; ++x) any |= m.at(y, x);
        CHECK(out.at(by, bx) == any);
      }
  }
}

TEST_CASE("blend of constant inputs is a fixed point") {
  const FeatureGrid g(4, 4, 2, 0.37);
  const auto out = blend_expression(BlendConfig{}, g, g, g);
  for (double v : out.data()) CHECK(std::abs(v - 0.37) <= 1e-15);
}

TEST_CASE("full weight on the raw frame returns it bit for bit") {
  std::mt19937_64 rng(76);
  const auto raw = random_grid(rng, 4, 4, 2);
  const auto out = blend_expression(BlendConfig{1.0, 0.0, 0.0}, raw, random_grid(rng, 4, 4, 2), random_grid(rng, 4, 4, 2));
  CHECK(out == raw);
}

TEST_CASE("default weights on a raw 1 and zero history give 0.7") {
  const auto out = blend_expression(BlendConfig{}, FeatureGrid(1, 1, 1, 1.0), FeatureGrid(1, 1, 1, 0.0), FeatureGrid(1, 1, 1, 0.0));
  CHECK(out.data()[0] == 0.7);
}

TEST_CASE("adding a constant to every input adds it to the output") {
  std::mt19937_64 rng(77);
  const auto a = random_grid(rng, 4, 4, 3), b = random_grid(rng, 4, 4, 3), c = random_grid(rng, 4, 4, 3);
  auto shifted = [](FeatureGrid g, double k) {
    for (auto& v : g.data()) v += k;
    return g;
  };
  const auto base = blend_expression(BlendConfig{}, a, b, c);
  const auto moved = blend_expression(BlendConfig{}, shifted(a, 1.25), shifted(b, 1.25), shifted(c, 1.25));
  for (std::size_t i = 0; i < base.size(); ++i) CHECK(std::abs(moved.data()[i] - base.data()[i] - 1.25) <= 1e-12);
}

TEST_CASE("feeding the blend back converges with ratio 0.3") {
  const FeatureGrid raw(2, 2, 1, 1.0);
  FeatureGrid prev(2, 2, 1, -3.0);
  const double e0 = 4.0;
  for (int t = 1; t <= 40; ++t) {
    prev = blend_expression(BlendConfig{}, raw, prev, prev);
    for (double v : prev.data()) CHECK(std::abs(v - 1.0) <= std::pow(0.3, t) * e0 + 1e-12);
  }
}

TEST_CASE("the warp is applied to both history terms") {
  std::mt19937_64 rng(78);
  const auto raw = random_grid(rng, 3, 5, 2), pe = random_grid(rng, 3, 5, 2), po = random_grid(rng, 3, 5, 2);
  const auto out = blend_expression(BlendConfig{}, raw, pe, po, shift_warp);
  const auto we = shift_warp(pe), wo = shift_warp(po);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double oracle = 0.7 * raw.data()[i] + 0.1 * we.data()[i] + 0.2 * wo.data()[i];
    CHECK(std::abs(out.data()[i] - oracle) <= 1e-12);
  }
}

TEST_CASE("blend config and grid validation") {
  CHECK_NOTHROW(BlendConfig{}.validate());
  CHECK_THROWS_AS((BlendConfig{0.7, 0.2, 0.2}.validate()), Error);
  CHECK_THROWS_AS((BlendConfig{1.2, -0.1, -0.1}.validate()), Error);
  CHECK_THROWS_AS(FeatureGrid(1, 1, 1, std::vector<double>{std::nan("")}), Error);
  CHECK_THROWS_AS(Mask(1, 1, std::vector<std::uint8_t>{2}), Error);
  CHECK_THROWS_AS(blend_expression(BlendConfig{}, FeatureGrid(1, 1, 1), FeatureGrid(1, 2, 1), FeatureGrid(1, 1, 1)), Error);
}
