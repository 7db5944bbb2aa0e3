#include <doctest.h>

#include <cmath>
#include <fstream>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "error.hpp"
#include "image_core.hpp"
#include "synthetic.hpp"

using namespace fpaug;
namespace fs = std::filesystem;

namespace {

GrayImage ramp4() {
  std::vector<std::uint8_t> v(16);
  for (int i = 0; i < 16; ++i) v[i] = static_cast<std::uint8_t>(i);
  return GrayImage(4, 4, v);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an fpaug::Error");
  return ErrorCode::InvalidArgument;
}

// Mean absolute difference over the disk inscribed in the image.
double disk_mad(const GrayImage& a, const GrayImage& b, double margin = 2.0) {
  const double cx = (a.width() - 1) / 2.0, cy = (a.height() - 1) / 2.0;
  const double r = std::min(a.width(), a.height()) / 2.0 - margin;
  double sum = 0.0;
  int n = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x)
      if (std::hypot(x - cx, y - cy) <= r) {
        sum += std::abs(int(a.at(x, y)) - int(b.at(x, y)));
        ++n;
      }
  return sum / n;
}

}  // namespace

TEST_CASE("load_image decodes an all-zero PGM exactly") {
  const fs::path dir = testing::fresh_dir("pgm");
  const fs::path p = dir / "zero.pgm";
  {
    std::ofstream out(p, std::ios::binary);
    out << "P5\n4 4\n255\n";
    const char zeros[16] = {};
    out.write(zeros, 16);
  }
  const GrayImage img = load_image(p);
  CHECK(img.width() == 4);
  CHECK(img.height() == 4);
  for (auto v : img.pixels()) CHECK(v == 0);
}

TEST_CASE("load_image keeps native sensor dimensions") {
  // DB1-sized raster; the decoder must not resample.
  const fs::path dir = testing::fresh_dir("native");
  Rng rng(3);
  const GrayImage src = testing::random_image(388, 374, rng);
  cv::Mat m(374, 388, CV_8UC1, const_cast<std::uint8_t*>(src.pixels().data()));
  cv::imwrite((dir / "1_1.tif").string(), m);
  const GrayImage img = load_image(dir / "1_1.tif");
  CHECK(img.width() == 388);
  CHECK(img.height() == 374);
  CHECK(img == src);
}

TEST_CASE("load_image rejects color, unknown formats and missing files") {
  const fs::path dir = testing::fresh_dir("load_errors");
  cv::Mat color(8, 8, CV_8UC3, cv::Scalar(10, 20, 30));
  cv::imwrite((dir / "color.png").string(), color);
  CHECK(code_of([&] { load_image(dir / "color.png"); }) == ErrorCode::NotGrayscale);

  cv::Mat gray3(8, 8, CV_8UC3, cv::Scalar(77, 77, 77));
  cv::imwrite((dir / "gray3.png").string(), gray3);
  const GrayImage g = load_image(dir / "gray3.png");
  CHECK(g.at(3, 3) == 77);

  std::ofstream(dir / "notes.txt") << "hello";
  CHECK(code_of([&] { load_image(dir / "notes.txt"); }) == ErrorCode::UnsupportedFormat);
  std::ofstream(dir / "junk.png") << "not a png";
  CHECK(code_of([&] { load_image(dir / "junk.png"); }) == ErrorCode::UnsupportedFormat);
  CHECK(code_of([&] { load_image(dir / "missing.png"); }) == ErrorCode::IoFailure);

  cv::Mat deep(8, 8, CV_16UC1, cv::Scalar(1000));
  cv::imwrite((dir / "deep.png").string(), deep);
  CHECK(code_of([&] { load_image(dir / "deep.png"); }) == ErrorCode::UnsupportedFormat);
}

TEST_CASE("save/load round trip is bit exact for random images") {
  const fs::path dir = testing::fresh_dir("roundtrip");
  Rng rng(11);
  for (int i = 0; i < 40; ++i) {
    const int w = static_cast<int>(rng.uniform_int(1, 70));
    const int h = static_cast<int>(rng.uniform_int(1, 70));
    const GrayImage img = testing::random_image(w, h, rng);
    const fs::path p = dir / ("r" + std::to_string(i) + ".bmp");
    save_image(img, p);
    CHECK(load_image(p) == img);
  }
}

TEST_CASE("save_image output size and failure") {
  const fs::path dir = testing::fresh_dir("save");
  GrayImage patch(128, 128, 200);
  save_image(patch, dir / "p.bmp");
  const GrayImage back = load_image(dir / "p.bmp");
  CHECK(back.width() == 128);
  CHECK(back.height() == 128);
  // 54-byte header, 1024-byte palette, 128 rows of 128 bytes
  CHECK(fs::file_size(dir / "p.bmp") == 54u + 1024u + 128u * 128u);

  CHECK(code_of([&] { save_image(patch, dir / "no_such_dir" / "p.bmp"); }) ==
        ErrorCode::IoFailure);
  CHECK(code_of([&] { save_image(patch, "/proc/fpaug_readonly.bmp"); }) == ErrorCode::IoFailure);
}

TEST_CASE("stats uses the population mean and variance") {
  const ImageStats c = stats(GrayImage(5, 3, 100));
  CHECK(c.mean == 100.0);
  CHECK(c.variance == 0.0);

  const ImageStats s = stats(GrayImage(2, 2, {50, 150, 50, 150}));
  CHECK(s.mean == doctest::Approx(100.0));
  CHECK(s.variance == doctest::Approx(2500.0));

  const ImageStats t = stats(GrayImage(2, 1, {0, 255}));
  CHECK(t.mean == doctest::Approx(127.5));
  CHECK(t.variance == doctest::Approx(16256.25));
}

TEST_CASE("stats: adding a constant shifts the mean only") {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const GrayImage img = testing::random_image(17, 9, rng, 40, 200);
    const int c = static_cast<int>(rng.uniform_int(-40, 55));
    GrayImage shifted = img;
    for (auto& v : shifted.pixels()) v = static_cast<std::uint8_t>(v + c);
    const ImageStats a = stats(img), b = stats(shifted);
    CHECK(b.mean == doctest::Approx(a.mean + c).epsilon(1e-12));
    CHECK(b.variance == doctest::Approx(a.variance).epsilon(1e-9));
  }
}

TEST_CASE("crop") {
  const GrayImage img = ramp4();
  CHECK(crop(img, {0, 0, 4, 4}) == img);
  CHECK(crop(img, {1, 1, 2, 2}) == GrayImage(2, 2, {5, 6, 9, 10}));
  CHECK(code_of([&] { crop(img, {3, 0, 2, 2}); }) == ErrorCode::RegionOutOfBounds);
  CHECK(code_of([&] { crop(img, {-1, 0, 2, 2}); }) == ErrorCode::RegionOutOfBounds);
}

TEST_CASE("crop composes over nested regions") {
  Rng rng(8);
  const GrayImage img = testing::random_image(40, 30, rng);
  for (int i = 0; i < 100; ++i) {
    const int aw = static_cast<int>(rng.uniform_int(1, 40));
    const int ah = static_cast<int>(rng.uniform_int(1, 30));
    const Region a{static_cast<int>(rng.uniform_int(0, 40 - aw)),
                   static_cast<int>(rng.uniform_int(0, 30 - ah)), aw, ah};
    const int bw = static_cast<int>(rng.uniform_int(1, aw));
    const int bh = static_cast<int>(rng.uniform_int(1, ah));
    const Region b{static_cast<int>(rng.uniform_int(0, aw - bw)),
                   static_cast<int>(rng.uniform_int(0, ah - bh)), bw, bh};
    const Region composed{a.x + b.x, a.y + b.y, bw, bh};
    CHECK(crop(crop(img, a), b) == crop(img, composed));
  }
}

TEST_CASE("fit_inside translates minimally") {
  CHECK(fit_inside({-5, 3, 10, 10}, 50, 40) == Region{0, 3, 10, 10});
  CHECK(fit_inside({45, 35, 10, 10}, 50, 40) == Region{40, 30, 10, 10});
  CHECK(fit_inside({5, 5, 10, 10}, 50, 40) == Region{5, 5, 10, 10});
  CHECK(code_of([] { fit_inside({0, 0, 60, 10}, 50, 40); }) == ErrorCode::RegionOutOfBounds);
}

TEST_CASE("round_clamp rounds half away from zero and clamps") {
  CHECK(round_clamp(127.5) == 128);
  CHECK(round_clamp(127.49) == 127);
  CHECK(round_clamp(-0.4) == 0);
  CHECK(round_clamp(-3.0) == 0);
  CHECK(round_clamp(255.4) == 255);
  CHECK(round_clamp(300.0) == 255);
}

TEST_CASE("rotate_about_center by 0 is the identity") {
  Rng rng(1);
  const GrayImage img = testing::random_image(31, 20, rng);
  CHECK(rotate_about_center(img, 0.0) == img);
  CHECK(rotate_about_center(img, 360.0) == img);
}

TEST_CASE("rotate_about_center by 90 matches transpose then vertical flip") {
  Rng rng(2);
  for (int n : {2, 5, 16, 33}) {
    const GrayImage img = testing::random_image(n, n, rng);
    // Index-permutation oracle: out(x, y) = in(n-1-y, x).
    GrayImage oracle(n, n);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) oracle.at(x, y) = img.at(n - 1 - y, x);
    const GrayImage rot = rotate_about_center(img, 90.0);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) CHECK(std::abs(int(rot.at(x, y)) - int(oracle.at(x, y))) <= 1);
  }
}

TEST_CASE("rotate_about_center turns counterclockwise as displayed") {
  GrayImage img(9, 9, 0);
  img.at(8, 0) = 255;  // top-right corner
  const GrayImage rot = rotate_about_center(img, 90.0, 0);
  CHECK(rot.at(0, 0) == 255);  // moves to top-left
}

TEST_CASE("rotation round trips preserve the inscribed disk") {
  // Smooth content: two bilinear passes blur ridge-frequency texture by more
  // than the bound, so the bound is checked on low-frequency images.
  auto model = testing::finger_model(4, 96, 96);
  model.period = 28.0;
  const GrayImage img = testing::render_texture(model, 96, 96, {});
  const GrayImage twice = rotate_about_center(rotate_about_center(img, 180.0), 180.0);
  CHECK(disk_mad(img, twice) <= 2.0);
  for (double a : {17.0, 45.0, 133.0, 301.0}) {
    const GrayImage back = rotate_about_center(rotate_about_center(img, a), -a);
    CHECK(disk_mad(img, back) <= 2.0);
  }
}
