#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace fpaug {

/// 8-bit single-channel raster, row-major. Pixel (x, y) lives at
/// data[y * width + x] and its center sits at coordinates (x, y).
class GrayImage {
 public:
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return data_[index(x, y)]; }

  std::span<const std::uint8_t> pixels() const noexcept { return data_; }
  std::span<std::uint8_t> pixels() noexcept { return data_; }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> data_;
};

/// Integer rectangle in image coordinates.
struct Region {
  int x = 0;
  int y = 0;
  int w = 1;
  int h = 1;

  int right() const noexcept { return x + w; }
  int bottom() const noexcept { return y + h; }
  bool valid_for(const GrayImage& img) const noexcept {
    return w >= 1 && h >= 1 && x >= 0 && y >= 0 && right() <= img.width() &&
           bottom() <= img.height();
  }

  friend bool operator==(const Region&, const Region&) = default;
};

struct ImageStats {
  double mean = 0.0;
  double variance = 0.0;
};

/// Nearest integer with ties away from zero, clamped to [0, 255]. The one
/// rounding rule every pixel-producing operation uses.
inline std::uint8_t round_clamp(double v) noexcept {
  // Same result as std::round then clamp; v - t is exact in this range.
  if (!(v > 0.0)) return 0;
  if (v >= 255.0) return 255;
  const int t = static_cast<int>(v);
  return static_cast<std::uint8_t>(t + (v - t >= 0.5 ? 1 : 0));
}

GrayImage load_image(const std::filesystem::path& path);

/// Writes an uncompressed 8-bit BMP with a 256-entry gray palette.
void save_image(const GrayImage& img, const std::filesystem::path& path);

/// Population mean and variance (divides by w*h).
ImageStats stats(const GrayImage& img);

GrayImage crop(const GrayImage& img, const Region& r);

/// Like crop, but the region may hang over the image edge; pixels outside
/// the source take `fill`.
GrayImage crop_padded(const GrayImage& img, const Region& r, std::uint8_t fill);

/// Translates `r` by the smallest amount that places it inside the image.
/// Throws RegionOutOfBounds when the image is smaller than the region.
Region fit_inside(const Region& r, int image_width, int image_height);

/// Bilinear interpolation over a w x h raster reached through `px(x, y)`;
/// neighbours outside [0,w) x [0,h) read `fill`.
template <class PixelFn>
double bilinear_generic(PixelFn&& px, int w, int h, double x, double y,
                        std::uint8_t fill) noexcept {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  if (fx0 < -1.0 || fy0 < -1.0 || fx0 > w || fy0 > h) return fill;
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double ax = x - fx0;
  const double ay = y - fy0;
  auto at = [&](int xi, int yi) -> double {
    return (xi >= 0 && yi >= 0 && xi < w && yi < h) ? double(px(xi, yi)) : double(fill);
  };
  const double top = (1.0 - ax) * at(x0, y0) + ax * at(x0 + 1, y0);
  const double bottom = (1.0 - ax) * at(x0, y0 + 1) + ax * at(x0 + 1, y0 + 1);
  return (1.0 - ay) * top + ay * bottom;
}

/// Bilinear sample at real coordinates; neighbours outside the image read
/// `fill`.
double bilinear_sample(const GrayImage& img, double x, double y,
                       std::uint8_t fill) noexcept;

/// Exact cos/sin for multiples of 90 degrees, std::cos/std::sin otherwise.
void rotation_terms(double degrees, double& cos_out, double& sin_out) noexcept;

/// Counterclockwise (as displayed, y axis pointing down) rotation about
/// ((w-1)/2, (h-1)/2). Output keeps the input size.
GrayImage rotate_about_center(const GrayImage& img, double degrees,
                              std::uint8_t fill = 255);

}  // namespace fpaug
