#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fingerprint_area.hpp"
#include "image_core.hpp"
#include "random.hpp"

namespace fpaug {

struct Point {
  int x = 0;
  int y = 0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Rotation angle in whole degrees, [0, 360).
struct RotationAugment {
  int angle = 0;
};

/// Patch-center displacement; |dx| <= w_s/10 and |dy| <= h_s/10.
struct ShiftAugment {
  int dx = 0;
  int dy = 0;
};

/// ceil(2 * sqrt((w/2)^2 + (h/2)^2)): side of the square that covers the
/// patch under any rotation.
int enlarged_side(const PatchSpec& spec) noexcept;

/// Largest legal shift magnitude per axis (truncated tenth of the side).
int max_shift_x(const PatchSpec& spec) noexcept;
int max_shift_y(const PatchSpec& spec) noexcept;

/// Center of a patch region, floored.
Point region_center(const Region& r) noexcept;

/// The spec-sized region whose center (floored) is `center`.
Region region_around(Point center, const PatchSpec& spec) noexcept;

/// Cuts the enlarged square around `center` (padded with `fill` beyond the
/// source), rotates it about its own center and keeps the central w_s x h_s
/// window. Throws CenterOutOfBounds.
GrayImage rotated_patch(const GrayImage& img, Point center, const PatchSpec& spec,
                        double angle, std::uint8_t fill = 255);

/// Bilinear taps of rotated_patch for one patch size and angle, reusable
/// across centers. sample() is bit-identical to rotated_patch.
class RotationTable {
 public:
  RotationTable(const PatchSpec& spec, double angle);

  double angle() const noexcept { return angle_; }
  void sample(const GrayImage& img, Point center, std::uint8_t fill,
              std::span<std::uint8_t> out) const;
  GrayImage sample(const GrayImage& img, Point center, std::uint8_t fill = 255) const;

 private:
  struct Tap {
    int x0 = 0, y0 = 0;  // top-left neighbour in square coordinates
    double ax = 0.0, ay = 0.0;
    bool all_fill = false;
    std::uint8_t inside = 0;  // bit k set: neighbour k lies in the square
  };
  PatchSpec spec_;
  double angle_ = 0.0;
  int side_ = 0;
  std::vector<Tap> taps_;
};

/// Integer angle overload.
inline GrayImage rotated_patch(const GrayImage& img, Point center, const PatchSpec& spec,
                               RotationAugment rot, std::uint8_t fill = 255) {
  return rotated_patch(img, center, spec, static_cast<double>(rot.angle), fill);
}

/// Patch centered at center + (dx, dy), translated to fit the image.
GrayImage shifted_patch(const GrayImage& img, Point center, const PatchSpec& spec,
                        ShiftAugment sh);

RotationAugment sample_rotation(Rng& rng);
ShiftAugment sample_shift(const PatchSpec& spec, Rng& rng);

/// Axis-aligned overlap of the shifted patch with the original.
double shift_overlap(const PatchSpec& spec, ShiftAugment sh) noexcept;

}  // namespace fpaug
