#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "image_core.hpp"
#include "random.hpp"

namespace fpaug {

/// Additive offset z drawn uniformly from the integers in [a, b].
struct UniformNoiseParams {
  int a = -32;
  int b = 32;
};

/// Sweat-blot model: window w, dense-tile threshold, disk diameter w_n and
/// the number of chained disks.
struct RandomAreaNoiseParams {
  int window = 16;
  int dense_threshold = 64;
  int circle_diameter = 32;
  int circle_count = 4;
};

struct DiskCenter {
  double x = 0.0;
  double y = 0.0;
};

struct NoiseOutcome {
  GrayImage image;
  bool applied = false;
  std::optional<Region> seed_window;
  std::vector<DiskCenter> disks;
  std::size_t painted_pixels = 0;  // size of the disk union inside the image
};

GrayImage add_uniform_noise(const GrayImage& img, const UniformNoiseParams& p, Rng& rng);

/// Full window x window tiles whose mean is strictly below `threshold`, in
/// row-major order. Throws WindowTooLarge.
std::vector<Region> dense_tiles(const GrayImage& img, int window, int threshold);

/// Paints a chain of overlapping black disks seeded at the center of a
/// randomly chosen dense tile. No dense tile: returns the input with
/// applied = false.
NoiseOutcome random_area_noise(const GrayImage& img, const RandomAreaNoiseParams& p,
                               Rng& rng);

}  // namespace fpaug
