#pragma once

#include <array>
#include <cstdint>

#include "image_core.hpp"
#include "random.hpp"

namespace fpaug {

using Histogram = std::array<std::uint64_t, 256>;

struct StretchParams {
  int t_min = 0;
  int t_max = 255;
};

struct EqualizeParams {
  int q0 = 0;
  int qk = 255;
};

Histogram histogram(const GrayImage& img);

/// Linear remap of the observed [p_min, p_max] onto [t_min, t_max]. A
/// constant image maps to the rounded midpoint of the target range.
GrayImage stretch(const GrayImage& img, const StretchParams& p);

/// Cumulative-histogram remap onto [q0, qk]; the cumulative sum starts at the
/// observed minimum brightness.
GrayImage equalize(const GrayImage& img, const EqualizeParams& p);

/// Draws t_min from {0, 10, ..., 50} and t_max from {205, 215, ..., 255}.
StretchParams sample_stretch(Rng& rng);

}  // namespace fpaug
