#include "geometric_augment.hpp"

#include <cmath>
#include <cstdlib>

#include "error.hpp"

namespace fpaug {

int enlarged_side(const PatchSpec& spec) noexcept {
  const double hw = spec.width / 2.0;
  const double hh = spec.height / 2.0;
  return static_cast<int>(std::ceil(2.0 * std::sqrt(hw * hw + hh * hh)));
}

int max_shift_x(const PatchSpec& spec) noexcept { return spec.width / 10; }
int max_shift_y(const PatchSpec& spec) noexcept { return spec.height / 10; }

Point region_center(const Region& r) noexcept { return {r.x + r.w / 2, r.y + r.h / 2}; }

Region region_around(Point center, const PatchSpec& spec) noexcept {
  return {center.x - spec.width / 2, center.y - spec.height / 2, spec.width, spec.height};
}

GrayImage rotated_patch(const GrayImage& img, Point center, const PatchSpec& spec,
                        double angle, std::uint8_t fill) {
  if (!img.contains(center.x, center.y))
    throw Error(ErrorCode::CenterOutOfBounds, "patch center lies outside the image");

  double c = 1.0, s = 0.0;
  rotation_terms(angle, c, s);
  if (c == 1.0 && s == 0.0) {
    const Region patch = region_around(center, spec);
    GrayImage out(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) {
        const int sx = patch.x + x, sy = patch.y + y;
        out.at(x, y) = img.contains(sx, sy) ? img.at(sx, sy) : fill;
      }
    return out;
  }
  return RotationTable(spec, angle).sample(img, center, fill);
}

// Same arithmetic as crop_padded(square) -> rotate_about_center -> crop, but
// with the per-pixel source coordinates precomputed in square coordinates.
RotationTable::RotationTable(const PatchSpec& spec, double angle)
    : spec_(spec), angle_(angle), side_(enlarged_side(spec)) {
  double c = 1.0, s = 0.0;
  rotation_terms(angle, c, s);
  const int off_x = (side_ - spec.width) / 2;
  const int off_y = (side_ - spec.height) / 2;
  const double mid = (side_ - 1) / 2.0;
  taps_.resize(static_cast<std::size_t>(spec.width) * spec.height);
  auto in_square = [&](int u, int v) { return u >= 0 && v >= 0 && u < side_ && v < side_; };
  for (int y = 0; y < spec.height; ++y) {
    const double dv = (y + off_y) - mid;
    for (int x = 0; x < spec.width; ++x) {
      const double du = (x + off_x) - mid;
      const double su = mid + c * du - s * dv;
      const double sv = mid + s * du + c * dv;
      Tap& t = taps_[static_cast<std::size_t>(y) * spec.width + x];
      const double fx0 = std::floor(su);
      const double fy0 = std::floor(sv);
      if (fx0 < -1.0 || fy0 < -1.0 || fx0 > side_ || fy0 > side_) {
        t.all_fill = true;
        continue;
      }
      t.x0 = static_cast<int>(fx0);
      t.y0 = static_cast<int>(fy0);
      t.ax = su - fx0;
      t.ay = sv - fy0;
      t.inside = static_cast<std::uint8_t>(in_square(t.x0, t.y0) | in_square(t.x0 + 1, t.y0) << 1 |
                                           in_square(t.x0, t.y0 + 1) << 2 |
                                           in_square(t.x0 + 1, t.y0 + 1) << 3);
    }
  }
}

void RotationTable::sample(const GrayImage& img, Point center, std::uint8_t fill,
                           std::span<std::uint8_t> out) const {
  if (!img.contains(center.x, center.y))
    throw Error(ErrorCode::CenterOutOfBounds, "patch center lies outside the image");
  if (out.size() != taps_.size())
    throw Error(ErrorCode::InvalidArgument, "output buffer does not match the patch size");
  const Region patch = region_around(center, spec_);
  const int ox = patch.x - (side_ - spec_.width) / 2;
  const int oy = patch.y - (side_ - spec_.height) / 2;
  const int w = img.width(), h = img.height();
  const std::uint8_t* px = img.pixels().data();
  // Whole square inside the image: only the square edge can read fill.
  const bool interior = ox >= 0 && oy >= 0 && ox + side_ <= w && oy + side_ <= h;
  const double f = fill;

  for (std::size_t i = 0; i < taps_.size(); ++i) {
    const Tap& t = taps_[i];
    if (t.all_fill) {
      out[i] = round_clamp(f);
      continue;
    }
    const int x0 = t.x0 + ox, y0 = t.y0 + oy;
    double v[4];
    if (interior && t.inside == 0xF) {
      const std::uint8_t* row = px + static_cast<std::ptrdiff_t>(y0) * w + x0;
      v[0] = row[0];
      v[1] = row[1];
      v[2] = row[w];
      v[3] = row[w + 1];
    } else {
      for (int k = 0; k < 4; ++k) {
        const int xi = x0 + (k & 1), yi = y0 + (k >> 1);
        const bool ok = (t.inside >> k & 1) && xi >= 0 && yi >= 0 && xi < w && yi < h;
        v[k] = ok ? double(px[static_cast<std::ptrdiff_t>(yi) * w + xi]) : f;
      }
    }
    const double top = (1.0 - t.ax) * v[0] + t.ax * v[1];
    const double bottom = (1.0 - t.ax) * v[2] + t.ax * v[3];
    out[i] = round_clamp((1.0 - t.ay) * top + t.ay * bottom);
  }
}

GrayImage RotationTable::sample(const GrayImage& img, Point center, std::uint8_t fill) const {
  GrayImage out(spec_.width, spec_.height);
  sample(img, center, fill, out.pixels());
  return out;
}

GrayImage shifted_patch(const GrayImage& img, Point center, const PatchSpec& spec,
                        ShiftAugment sh) {
  const Region r = region_around({center.x + sh.dx, center.y + sh.dy}, spec);
  return crop(img, fit_inside(r, img.width(), img.height()));
}

RotationAugment sample_rotation(Rng& rng) {
  return {static_cast<int>(rng.uniform_int(0, 359))};
}

ShiftAugment sample_shift(const PatchSpec& spec, Rng& rng) {
  const int mx = max_shift_x(spec);
  const int my = max_shift_y(spec);
  const int dx = static_cast<int>(rng.uniform_int(-mx, mx));
  const int dy = static_cast<int>(rng.uniform_int(-my, my));
  return {dx, dy};
}

double shift_overlap(const PatchSpec& spec, ShiftAugment sh) noexcept {
  const double w = spec.width, h = spec.height;
  const double ow = std::max(0.0, w - std::abs(sh.dx));
  const double oh = std::max(0.0, h - std::abs(sh.dy));
  return (ow * oh) / (w * h);
}

}  // namespace fpaug
