#pragma once

#include <span>
#include <vector>

#include "fingerprint_area.hpp"
#include "geometric_augment.hpp"
#include "image_core.hpp"

namespace fpaug {

/// Normalized reference patch of one finger.
struct ReferenceTemplate {
  GrayImage patch;
  int finger_id = 0;
};

struct AlignSearchParams {
  int coarse_stride = 8;
  int refine_radius = 8;
  std::vector<int> angle_set = {-10, -8, -6, -4, -2, 0, 2, 4, 6, 8, 10};
  double accept_threshold = 0.35;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct AlignmentResult {
  Region region;  // in the extra image
  int angle = 0;  // member of the searched angle set
  double score = -1.0;
};

/// Best candidate found; `accepted` is false when its score does not clear
/// the threshold (the extra is rejected).
struct AlignOutcome {
  AlignmentResult best;
  bool accepted = false;
};

/// Pearson correlation of two equally sized images. Throws ZeroVariance if
/// either is constant, InvalidArgument on a size mismatch.
double ncc(const GrayImage& a, const GrayImage& b);

/// Strict score > threshold.
bool accept(const AlignmentResult& result, double threshold) noexcept;

/// Inclusive range of candidate top-left corners for a patch window sliding
/// over `area`, clamped so the window stays inside a width x height image.
struct SearchRange {
  int x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;
};
SearchRange search_range(const Region& area, const PatchSpec& spec, int width, int height);

/// Scores candidate windows of one (already normalized) image against a
/// fixed template. A candidate is the rotated_patch around the window
/// center; constant candidates score -1.
class CandidateScorer {
 public:
  /// Rotation tables for `angles` are built up front; other angles are
  /// built per call.
  CandidateScorer(const GrayImage& image, const GrayImage& reference, const PatchSpec& spec,
                  std::span<const int> angles = {});

  double score(int x, int y, int angle) const;

 private:
  const GrayImage& image_;
  PatchSpec spec_;
  std::vector<RotationTable> tables_;
  std::vector<double> ref_centered_;
  double ref_norm_ = 0.0;
};

/// Coarse lattice over the extra's fingerprint area for every angle, then a
/// stride-1 refinement around the coarse winner. Ties resolve to the lowest
/// (y, x, angle).
AlignOutcome best_matching_region(const GrayImage& extra, const ReferenceTemplate& ref,
                                  const PatchSpec& spec, const AlignSearchParams& sp);

/// Reference template of an image: its normalized patch at `patch`.
ReferenceTemplate make_reference(const GrayImage& img, const Region& patch, int finger_id);

}  // namespace fpaug
