#include "fingerprint_area.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace fpaug {

PatchSpec::PatchSpec(int w, int h) : width(w), height(h) {
  if (w < 16 || h < 16)
    throw Error(ErrorCode::InvalidArgument,
                "patch sides must be at least 16 pixels, got " + std::to_string(w) +
                    "x" + std::to_string(h));
}

GrayImage normalize(const GrayImage& img, const NormalizationParams& p) {
  if (p.target_mean < 0.0 || p.target_mean > 255.0 || !(p.target_variance > 0.0))
    throw Error(ErrorCode::InvalidArgument, "invalid normalization parameters");
  const ImageStats s = stats(img);
  GrayImage out(img.width(), img.height());
  auto dst = out.pixels();
  const auto src = img.pixels();
  if (s.variance == 0.0) {
    std::fill(dst.begin(), dst.end(), round_clamp(p.target_mean));
    return out;
  }
  // Per-value lookup: the mapping depends only on the input brightness.
  std::uint8_t lut[256];
  for (int v = 0; v < 256; ++v) {
    const double d = v - s.mean;
    const double dev = std::sqrt(p.target_variance * d * d / s.variance);
    lut[v] = round_clamp(v > s.mean ? p.target_mean + dev : p.target_mean - dev);
  }
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[src[i]];
  return out;
}

BinaryImage binarize(const GrayImage& img, std::uint8_t threshold) {
  BinaryImage bin{img.width(), img.height(), {}};
  bin.mask.reserve(img.size());
  for (auto v : img.pixels()) bin.mask.push_back(v < threshold);
  return bin;
}

Region fingerprint_bounding_region(const BinaryImage& bin, int block, double min_density) {
  if (bin.width < 1 || bin.height < 1 ||
      bin.mask.size() != static_cast<std::size_t>(bin.width) * bin.height)
    throw Error(ErrorCode::InvalidArgument, "binary image is empty or malformed");
  if (block < 1) throw Error(ErrorCode::InvalidArgument, "block must be positive");

  int x0 = bin.width, y0 = bin.height, x1 = -1, y1 = -1;
  for (int ty = 0; ty < bin.height; ty += block) {
    const int th = std::min(block, bin.height - ty);
    for (int tx = 0; tx < bin.width; tx += block) {
      const int tw = std::min(block, bin.width - tx);
      int count = 0;
      for (int y = ty; y < ty + th; ++y)
        for (int x = tx; x < tx + tw; ++x) count += bin.at(x, y) ? 1 : 0;
      if (count >= min_density * (tw * th) && count > 0) {
        x0 = std::min(x0, tx);
        y0 = std::min(y0, ty);
        x1 = std::max(x1, tx + tw);
        y1 = std::max(y1, ty + th);
      }
    }
  }
  if (x1 < 0) throw Error(ErrorCode::NoFingerprintArea, "no fingerprint area found");
  return {x0, y0, x1 - x0, y1 - y0};
}

Region centered_region(const Region& fp, const PatchSpec& spec) noexcept {
  const int cx = fp.x + fp.w / 2;
  const int cy = fp.y + fp.h / 2;
  return {cx - spec.width / 2, cy - spec.height / 2, spec.width, spec.height};
}

Region center_crop_region(const Region& fp, const PatchSpec& spec) {
  if (spec.width > fp.w || spec.height > fp.h)
    throw Error(ErrorCode::PatchLargerThanArea,
                "patch " + std::to_string(spec.width) + "x" +
                    std::to_string(spec.height) + " is larger than the fingerprint area " +
                    std::to_string(fp.w) + "x" + std::to_string(fp.h));
  return centered_region(fp, spec);
}

ExtractedArea extract_fingerprint_area(const GrayImage& img, const PatchSpec& spec,
                                       const NormalizationParams& p) {
  const GrayImage norm = normalize(img, p);
  const Region fp = fingerprint_bounding_region(binarize(norm));
  ExtractedArea out;
  out.fingerprint = fp;
  out.patch_exceeds_area = spec.width > fp.w || spec.height > fp.h;
  out.patch = fit_inside(centered_region(fp, spec), img.width(), img.height());
  return out;
}

}  // namespace fpaug
