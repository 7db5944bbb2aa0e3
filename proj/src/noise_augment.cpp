#include "noise_augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace fpaug {

GrayImage add_uniform_noise(const GrayImage& img, const UniformNoiseParams& p, Rng& rng) {
  if (p.a > p.b || p.a < -255 || p.b > 255)
    throw Error(ErrorCode::InvalidArgument, "uniform noise requires -255 <= a <= b <= 255");
  GrayImage out = img;
  for (auto& v : out.pixels()) {
    const int z = static_cast<int>(rng.uniform_int(p.a, p.b));
    v = static_cast<std::uint8_t>(std::clamp(v + z, 0, 255));
  }
  return out;
}

std::vector<Region> dense_tiles(const GrayImage& img, int window, int threshold) {
  if (window < 1) throw Error(ErrorCode::InvalidArgument, "window must be positive");
  if (window > std::min(img.width(), img.height()))
    throw Error(ErrorCode::WindowTooLarge, "window larger than the image");
  std::vector<Region> tiles;
  const std::uint64_t area = static_cast<std::uint64_t>(window) * window;
  for (int ty = 0; ty + window <= img.height(); ty += window) {
    for (int tx = 0; tx + window <= img.width(); tx += window) {
      std::uint64_t sum = 0;
      for (int y = ty; y < ty + window; ++y)
        for (int x = tx; x < tx + window; ++x) sum += img.at(x, y);
      // mean < threshold, compared exactly in integers
      if (static_cast<std::int64_t>(sum) < static_cast<std::int64_t>(threshold) *
                                               static_cast<std::int64_t>(area))
        tiles.push_back({tx, ty, window, window});
    }
  }
  return tiles;
}

NoiseOutcome random_area_noise(const GrayImage& img, const RandomAreaNoiseParams& p,
                               Rng& rng) {
  if (p.window < 4 || p.circle_diameter < 2 || p.circle_count < 1)
    throw Error(ErrorCode::InvalidArgument, "invalid random area noise parameters");

  NoiseOutcome outcome{img, false, std::nullopt, {}, 0};
  if (p.window > std::min(img.width(), img.height())) return outcome;
  const std::vector<Region> candidates = dense_tiles(img, p.window, p.dense_threshold);
  if (candidates.empty()) return outcome;

  const Region seed = candidates[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))];
  outcome.applied = true;
  outcome.seed_window = seed;

  const double radius = p.circle_diameter / 2.0;
  DiskCenter c{seed.x + (seed.w - 1) / 2.0, seed.y + (seed.h - 1) / 2.0};
  outcome.disks.push_back(c);
  for (int i = 1; i < p.circle_count; ++i) {
    const double step = rng.uniform_real(radius / 2.0, radius);
    const double dir = rng.uniform_real(0.0, 2.0 * std::numbers::pi);
    c = {c.x + step * std::cos(dir), c.y + step * std::sin(dir)};
    outcome.disks.push_back(c);
  }

  const double r2 = radius * radius;
  std::vector<bool> painted(img.size(), false);
  for (const DiskCenter& d : outcome.disks) {
    const int x0 = std::max(0, static_cast<int>(std::floor(d.x - radius)));
    const int x1 = std::min(img.width() - 1, static_cast<int>(std::ceil(d.x + radius)));
    const int y0 = std::max(0, static_cast<int>(std::floor(d.y - radius)));
    const int y1 = std::min(img.height() - 1, static_cast<int>(std::ceil(d.y + radius)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const double ddx = x - d.x, ddy = y - d.y;
        const std::size_t idx = static_cast<std::size_t>(y) * img.width() + x;
        if (ddx * ddx + ddy * ddy <= r2 && !painted[idx]) {
          painted[idx] = true;
          outcome.image.at(x, y) = 0;
          ++outcome.painted_pixels;
        }
      }
    }
  }
  return outcome;
}

}  // namespace fpaug
