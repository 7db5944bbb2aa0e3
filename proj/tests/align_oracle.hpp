#pragma once

// Exhaustive stride-1, all-angle search used as the reference for the
// coarse-to-fine alignment. Candidates are built through the padded-square
// composition and scored with the plain ncc, so none of the production
// search or scoring code is shared.

#include <algorithm>
#include <vector>

#include "error.hpp"
#include "fingerprint_area.hpp"
#include "geometric_augment.hpp"
#include "image_core.hpp"
#include "region_align.hpp"

namespace fpaug::testing {

struct OracleHit {
  int x = 0, y = 0, angle = 0;
  double score = -2.0;
};

inline GrayImage oracle_candidate(const GrayImage& img, int x, int y, const PatchSpec& spec,
                                  int angle) {
  const int side = enlarged_side(spec);
  const int ox = (side - spec.width) / 2, oy = (side - spec.height) / 2;
  // Patch center is floored, the window top-left is center - size/2.
  const int cx = x + spec.width / 2, cy = y + spec.height / 2;
  const int px = cx - spec.width / 2, py = cy - spec.height / 2;
  const GrayImage square = crop_padded(img, {px - ox, py - oy, side, side}, 255);
  return crop(rotate_about_center(square, angle, 255), {ox, oy, spec.width, spec.height});
}

inline double oracle_score(const GrayImage& cand, const GrayImage& ref) {
  try {
    return ncc(cand, ref);
  } catch (const Error&) {
    return -1.0;  // constant candidate
  }
}

inline OracleHit exhaustive_alignment(const GrayImage& extra, const GrayImage& ref_patch,
                                      const PatchSpec& spec, const std::vector<int>& angles) {
  const GrayImage norm = normalize(extra);
  const Region area = fingerprint_bounding_region(binarize(norm));
  const int W = extra.width(), H = extra.height();
  const int x_lo = std::clamp(area.x, 0, W - spec.width);
  const int x_hi = std::max(x_lo, std::min(area.x + area.w - spec.width, W - spec.width));
  const int y_lo = std::clamp(area.y, 0, H - spec.height);
  const int y_hi = std::max(y_lo, std::min(area.y + area.h - spec.height, H - spec.height));
  OracleHit best;
  for (int y = y_lo; y <= y_hi; ++y)
    for (int x = x_lo; x <= x_hi; ++x)
      for (int a : angles) {
        const double s = oracle_score(oracle_candidate(norm, x, y, spec, a), ref_patch);
        if (s > best.score) best = {x, y, a, s};
      }
  return best;
}

}  // namespace fpaug::testing
