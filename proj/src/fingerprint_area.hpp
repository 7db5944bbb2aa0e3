#pragma once

#include <cstdint>
#include <vector>

#include "image_core.hpp"

namespace fpaug {

/// Target mean M0 and variance V0 for normalization. Both default to 100.
struct NormalizationParams {
  double target_mean = 100.0;
  double target_variance = 100.0;
};

/// true = foreground (dark ridge pixel).
struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<bool> mask;

  bool at(int x, int y) const {
    return mask[static_cast<std::size_t>(y) * width + x];
  }
};

/// Network input patch size. Both sides must be at least 16.
struct PatchSpec {
  int width = 128;
  int height = 128;

  PatchSpec() = default;
  PatchSpec(int w, int h);
};

inline constexpr std::uint8_t kBinarizeThreshold = 100;
inline constexpr int kAreaBlock = 16;
inline constexpr double kAreaMinDensity = 0.10;

/// Pixel-wise remap to the target mean/variance. A constant input maps to a
/// constant target_mean image.
GrayImage normalize(const GrayImage& img, const NormalizationParams& p = {});

/// Foreground iff pixel < threshold.
BinaryImage binarize(const GrayImage& img, std::uint8_t threshold = kBinarizeThreshold);

/// Bounding box of all block x block tiles whose foreground fraction reaches
/// min_density. Edge tiles that are cut short by the image border count with
/// their actual pixel area. Throws NoFingerprintArea when no tile qualifies.
Region fingerprint_bounding_region(const BinaryImage& bin, int block = kAreaBlock,
                                   double min_density = kAreaMinDensity);

/// The spec-sized region centered on fp's (floored) center. Throws
/// PatchLargerThanArea when the patch does not fit inside fp.
Region center_crop_region(const Region& fp, const PatchSpec& spec);

/// Same centering without the area-size check. The result may hang over the
/// image; callers translate it with fit_inside.
Region centered_region(const Region& fp, const PatchSpec& spec) noexcept;

struct ExtractedArea {
  Region fingerprint;     // actual fingerprint area
  Region patch;           // spec-sized patch region, inside the image
  bool patch_exceeds_area = false;
};

/// normalize -> binarize -> bounding region -> centered patch, translated to
/// fit inside the image. Throws NoFingerprintArea or RegionOutOfBounds (image
/// smaller than the patch).
ExtractedArea extract_fingerprint_area(const GrayImage& img, const PatchSpec& spec,
                                       const NormalizationParams& p = {});

}  // namespace fpaug
