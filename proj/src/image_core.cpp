#include "image_core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "error.hpp"

namespace fpaug {

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
               fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1)
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive");
  if (data_.size() !=
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw Error(ErrorCode::InvalidArgument, "pixel buffer does not match dimensions");
}

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

void put_u16(std::ofstream& out, std::uint16_t v) {
  const char b[2] = {static_cast<char>(v & 0xff), static_cast<char>(v >> 8)};
  out.write(b, 2);
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  static const std::set<std::string> kSupported = {".bmp", ".png", ".pgm",
                                                   ".tif", ".tiff"};
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec))
    throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  if (!kSupported.count(lower_extension(path)))
    throw Error(ErrorCode::UnsupportedFormat,
                "unsupported raster format: " + path.string());

  cv::Mat m;
  try {
    m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception& e) {
    throw Error(ErrorCode::UnsupportedFormat,
                "cannot decode " + path.string() + ": " + e.what());
  }
  if (m.empty())
    throw Error(ErrorCode::UnsupportedFormat, "cannot decode " + path.string());
  if (m.depth() != CV_8U)
    throw Error(ErrorCode::UnsupportedFormat,
                "only 8-bit images are supported: " + path.string());

  const int channels = m.channels();
  if (channels != 1 && channels != 3 && channels != 4)
    throw Error(ErrorCode::NotGrayscale, "unexpected channel layout in " + path.string());

  std::vector<std::uint8_t> data(static_cast<std::size_t>(m.rows) *
                                 static_cast<std::size_t>(m.cols));
  for (int y = 0; y < m.rows; ++y) {
    const std::uint8_t* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < m.cols; ++x) {
      const std::uint8_t* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      // Alpha, when present, is ignored; the color channels must agree.
      if (channels >= 3 && (px[0] != px[1] || px[1] != px[2]))
        throw Error(ErrorCode::NotGrayscale,
                    "color channels differ in " + path.string());
      data[static_cast<std::size_t>(y) * m.cols + x] = px[0];
    }
  }
  return GrayImage(m.cols, m.rows, std::move(data));
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  const std::uint32_t w = static_cast<std::uint32_t>(img.width());
  const std::uint32_t h = static_cast<std::uint32_t>(img.height());
  const std::uint32_t stride = (w + 3u) & ~3u;
  const std::uint32_t palette_bytes = 256u * 4u;
  const std::uint32_t offset = 14u + 40u + palette_bytes;
  const std::uint32_t image_bytes = stride * h;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());

  out.write("BM", 2);
  put_u32(out, offset + image_bytes);
  put_u32(out, 0);
  put_u32(out, offset);

  put_u32(out, 40);
  put_u32(out, w);
  put_u32(out, h);  // positive height: bottom-up rows
  put_u16(out, 1);
  put_u16(out, 8);
  put_u32(out, 0);  // BI_RGB
  put_u32(out, image_bytes);
  put_u32(out, 2835);  // 72 dpi
  put_u32(out, 2835);
  put_u32(out, 256);
  put_u32(out, 256);

  for (int i = 0; i < 256; ++i) {
    const char entry[4] = {static_cast<char>(i), static_cast<char>(i),
                           static_cast<char>(i), 0};
    out.write(entry, 4);
  }

  std::vector<char> row(stride, 0);
  for (int y = img.height() - 1; y >= 0; --y) {
    for (int x = 0; x < img.width(); ++x) row[x] = static_cast<char>(img.at(x, y));
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

ImageStats stats(const GrayImage& img) {
  const auto px = img.pixels();
  // Integer accumulation keeps the mean exact; variance from the centered sum.
  std::uint64_t sum = 0;
  for (auto v : px) sum += v;
  const double n = static_cast<double>(px.size());
  const double mean = static_cast<double>(sum) / n;
  double sq = 0.0;
  for (auto v : px) {
    const double d = static_cast<double>(v) - mean;
    sq += d * d;
  }
  return {mean, sq / n};
}

GrayImage crop(const GrayImage& img, const Region& r) {
  if (!r.valid_for(img))
    throw Error(ErrorCode::RegionOutOfBounds, "crop region exceeds image bounds");
  GrayImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y) {
    const auto src = img.pixels().subspan(
        static_cast<std::size_t>(r.y + y) * img.width() + r.x, r.w);
    std::copy(src.begin(), src.end(),
              out.pixels().begin() + static_cast<std::ptrdiff_t>(y) * r.w);
  }
  return out;
}

GrayImage crop_padded(const GrayImage& img, const Region& r, std::uint8_t fill) {
  if (r.w < 1 || r.h < 1)
    throw Error(ErrorCode::InvalidArgument, "region must be non-empty");
  GrayImage out(r.w, r.h, fill);
  for (int y = 0; y < r.h; ++y) {
    const int sy = r.y + y;
    if (sy < 0 || sy >= img.height()) continue;
    for (int x = 0; x < r.w; ++x) {
      const int sx = r.x + x;
      if (sx >= 0 && sx < img.width()) out.at(x, y) = img.at(sx, sy);
    }
  }
  return out;
}

Region fit_inside(const Region& r, int image_width, int image_height) {
  if (r.w > image_width || r.h > image_height)
    throw Error(ErrorCode::RegionOutOfBounds,
                "image " + std::to_string(image_width) + "x" +
                    std::to_string(image_height) + " is smaller than the " +
                    std::to_string(r.w) + "x" + std::to_string(r.h) + " region");
  Region out = r;
  out.x = std::clamp(r.x, 0, image_width - r.w);
  out.y = std::clamp(r.y, 0, image_height - r.h);
  return out;
}

double bilinear_sample(const GrayImage& img, double x, double y,
                       std::uint8_t fill) noexcept {
  return bilinear_generic([&](int xi, int yi) { return img.at(xi, yi); }, img.width(),
                          img.height(), x, y, fill);
}

void rotation_terms(double degrees, double& cos_out, double& sin_out) noexcept {
  double a = std::fmod(degrees, 360.0);
  if (a < 0) a += 360.0;
  if (a == 0.0) {
    cos_out = 1.0; sin_out = 0.0;
  } else if (a == 90.0) {
    cos_out = 0.0; sin_out = 1.0;
  } else if (a == 180.0) {
    cos_out = -1.0; sin_out = 0.0;
  } else if (a == 270.0) {
    cos_out = 0.0; sin_out = -1.0;
  } else {
    const double rad = a * std::numbers::pi / 180.0;
    cos_out = std::cos(rad);
    sin_out = std::sin(rad);
  }
}

GrayImage rotate_about_center(const GrayImage& img, double degrees, std::uint8_t fill) {
  double c = 1.0, s = 0.0;
  rotation_terms(degrees, c, s);
  if (c == 1.0 && s == 0.0) return img;
  const double cx = (img.width() - 1) / 2.0;
  const double cy = (img.height() - 1) / 2.0;
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    const double dy = y - cy;
    for (int x = 0; x < img.width(); ++x) {
      const double dx = x - cx;
      const double sx = cx + c * dx - s * dy;
      const double sy = cy + s * dx + c * dy;
      out.at(x, y) = round_clamp(bilinear_sample(img, sx, sy, fill));
    }
  }
  return out;
}

}  // namespace fpaug
