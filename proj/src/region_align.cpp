#include "region_align.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>
#include <vector>

#include "error.hpp"

namespace fpaug {

void AlignSearchParams::validate() const {
  if (coarse_stride < 1) throw Error(ErrorCode::InvalidArgument, "coarse_stride must be >= 1");
  if (refine_radius < 0) throw Error(ErrorCode::InvalidArgument, "refine_radius must be >= 0");
  if (angle_set.empty()) throw Error(ErrorCode::InvalidArgument, "angle_set is empty");
  if (!(accept_threshold > -1.0 && accept_threshold < 1.0))
    throw Error(ErrorCode::InvalidArgument, "accept_threshold must lie in (-1, 1)");
}

double ncc(const GrayImage& a, const GrayImage& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw Error(ErrorCode::InvalidArgument, "ncc needs equally sized images");
  const ImageStats sa = stats(a);
  const ImageStats sb = stats(b);
  if (sa.variance == 0.0 || sb.variance == 0.0)
    throw Error(ErrorCode::ZeroVariance, "ncc of a constant image is undefined");
  const auto pa = a.pixels();
  const auto pb = b.pixels();
  double cov = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i)
    cov += (pa[i] - sa.mean) * (pb[i] - sb.mean);
  cov /= static_cast<double>(pa.size());
  const double r = cov / std::sqrt(sa.variance * sb.variance);
  return std::clamp(r, -1.0, 1.0);
}

bool accept(const AlignmentResult& result, double threshold) noexcept {
  return result.score > threshold;
}

SearchRange search_range(const Region& area, const PatchSpec& spec, int width, int height) {
  if (spec.width > width || spec.height > height)
    throw Error(ErrorCode::ImageTooSmall, "extra image is smaller than the patch");
  SearchRange r;
  r.x_lo = std::clamp(area.x, 0, width - spec.width);
  r.x_hi = std::clamp(area.right() - spec.width, r.x_lo, width - spec.width);
  r.y_lo = std::clamp(area.y, 0, height - spec.height);
  r.y_hi = std::clamp(area.bottom() - spec.height, r.y_lo, height - spec.height);
  return r;
}

CandidateScorer::CandidateScorer(const GrayImage& image, const GrayImage& reference,
                                 const PatchSpec& spec, std::span<const int> angles)
    : image_(image), spec_(spec) {
  if (reference.width() != spec.width || reference.height() != spec.height)
    throw Error(ErrorCode::InvalidArgument, "reference patch does not match the patch size");
  const ImageStats s = stats(reference);
  if (s.variance == 0.0)
    throw Error(ErrorCode::ZeroVariance, "reference patch is constant");
  ref_centered_.reserve(reference.size());
  for (auto v : reference.pixels()) ref_centered_.push_back(v - s.mean);
  ref_norm_ = std::sqrt(s.variance * static_cast<double>(reference.size()));
  for (int a : angles) tables_.emplace_back(spec, static_cast<double>(a));
}

double CandidateScorer::score(int x, int y, int angle) const {
  const Point center = region_center({x, y, spec_.width, spec_.height});
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(spec_.width) * spec_.height);
  const std::span<std::uint8_t> px(buf);
  const auto it = std::find_if(tables_.begin(), tables_.end(),
                               [&](const RotationTable& t) { return t.angle() == angle; });
  if (it != tables_.end()) {
    it->sample(image_, center, 255, px);
  } else {
    RotationTable(spec_, static_cast<double>(angle)).sample(image_, center, 255, px);
  }
  std::uint64_t sum = 0, sum_sq = 0;
  for (auto v : px) {
    sum += v;
    sum_sq += static_cast<std::uint64_t>(v) * v;
  }
  const double n = static_cast<double>(px.size());
  // Integer moments: exact, so a constant candidate is detected reliably.
  const double centered_sq = static_cast<double>(sum_sq) - static_cast<double>(sum) *
                                                               static_cast<double>(sum) / n;
  if (centered_sq <= 0.0) return -1.0;
  // sum(ref_c * cand) == sum(ref_c * (cand - mean)) because ref_c sums to 0.
  double dot = 0.0;
  for (std::size_t i = 0; i < px.size(); ++i) dot += ref_centered_[i] * px[i];
  return std::clamp(dot / (ref_norm_ * std::sqrt(centered_sq)), -1.0, 1.0);
}

namespace {

struct Candidate {
  int x = 0, y = 0, angle = 0;
  double score = -2.0;
};

// Higher score wins; equal scores go to the lowest (y, x, angle).
bool better(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.y, a.x, a.angle) < std::tie(b.y, b.x, b.angle);
}

// Separable Gaussian blur with clamped borders.
GrayImage smooth(const GrayImage& img, double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double total = 0.0;
  for (int i = -r; i <= r; ++i) total += k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
  for (auto& v : k) v /= total;
  const int w = img.width(), h = img.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * img.at(std::clamp(x + i, 0, w - 1), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
      out.at(x, y) = round_clamp(acc);
    }
  return out;
}

}  // namespace

AlignOutcome best_matching_region(const GrayImage& extra, const ReferenceTemplate& ref,
                                  const PatchSpec& spec, const AlignSearchParams& sp) {
  sp.validate();
  if (extra.width() < spec.width || extra.height() < spec.height)
    throw Error(ErrorCode::ImageTooSmall, "extra image is smaller than the patch");

  const GrayImage norm = normalize(extra);
  const Region area = fingerprint_bounding_region(binarize(norm));
  const SearchRange range = search_range(area, spec, extra.width(), extra.height());
  const CandidateScorer scorer(norm, ref.patch, spec, sp.angle_set);

  // The coarse lattice is scored on low-passed images: at full resolution
  // the ridge texture makes the score surface oscillate faster than the
  // lattice samples it, and the winner can sit on a wrong ridge phase.
  Candidate coarse;
  {
    const double sigma = sp.coarse_stride / 2.0;
    const GrayImage blurred = sp.coarse_stride > 1 ? smooth(norm, sigma) : norm;
    const GrayImage blurred_ref = sp.coarse_stride > 1 ? smooth(ref.patch, sigma) : ref.patch;
    std::optional<CandidateScorer> low;
    if (stats(blurred_ref).variance > 0.0) low.emplace(blurred, blurred_ref, spec, sp.angle_set);
    const CandidateScorer& cs = low ? *low : scorer;
    for (int y = range.y_lo; y <= range.y_hi; y += sp.coarse_stride)
      for (int x = range.x_lo; x <= range.x_hi; x += sp.coarse_stride)
        for (int angle : sp.angle_set) {
          const Candidate c{x, y, angle, cs.score(x, y, angle)};
          if (better(c, coarse)) coarse = c;
        }
  }

  Candidate best;
  const int rx_lo = std::max(range.x_lo, coarse.x - sp.refine_radius);
  const int rx_hi = std::min(range.x_hi, coarse.x + sp.refine_radius);
  const int ry_lo = std::max(range.y_lo, coarse.y - sp.refine_radius);
  const int ry_hi = std::min(range.y_hi, coarse.y + sp.refine_radius);
  for (int y = ry_lo; y <= ry_hi; ++y)
    for (int x = rx_lo; x <= rx_hi; ++x)
      for (int angle : sp.angle_set) {
        const Candidate c{x, y, angle, scorer.score(x, y, angle)};
        if (better(c, best)) best = c;
      }

  AlignOutcome out;
  out.best.region = {best.x, best.y, spec.width, spec.height};
  out.best.angle = best.angle;
  out.best.score = best.score;
  out.accepted = accept(out.best, sp.accept_threshold);
  return out;
}

ReferenceTemplate make_reference(const GrayImage& img, const Region& patch, int finger_id) {
  return {crop(normalize(img), patch), finger_id};
}

}  // namespace fpaug
