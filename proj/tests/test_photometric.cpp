#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "photometric_augment.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace fpaug;
using testing::thrown_code;

namespace {

std::pair<int, int> min_max(const GrayImage& img) {
  const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
  return {*lo, *hi};
}

GrayImage random_nonconstant(Rng& rng) {
  const int w = static_cast<int>(rng.uniform_int(2, 40));
  const int h = static_cast<int>(rng.uniform_int(1, 40));
  const int lo = static_cast<int>(rng.uniform_int(0, 200));
  const int hi = static_cast<int>(rng.uniform_int(lo + 1, 255));
  GrayImage img = testing::random_image(w, h, rng, lo, hi);
  img.pixels()[0] = static_cast<std::uint8_t>(lo);
  img.pixels()[1] = static_cast<std::uint8_t>(hi);
  return img;
}

}  // namespace

TEST_CASE("histogram counts") {
  const Histogram c = histogram(GrayImage(4, 4, 100));
  CHECK(c[100] == 16);
  std::uint64_t rest = 0;
  for (int v = 0; v < 256; ++v)
    if (v != 100) rest += c[v];
  CHECK(rest == 0);

  const Histogram h = histogram(GrayImage(4, 1, {0, 0, 255, 255}));
  CHECK(h[0] == 2);
  CHECK(h[255] == 2);

  Rng rng(60);
  for (int t = 0; t < 20; ++t) {
    const GrayImage img = random_nonconstant(rng);
    std::uint64_t sum = 0;
    for (auto n : histogram(img)) sum += n;
    CHECK(sum == img.size());
  }
}

TEST_CASE("stretch examples") {
  const GrayImage img(3, 1, {50, 100, 150});
  CHECK(stretch(img, {0, 255}) == GrayImage(3, 1, {0, 128, 255}));
  CHECK(stretch(GrayImage(5, 5, 77), {0, 255}) == GrayImage(5, 5, 128));
  CHECK(stretch(GrayImage(5, 5, 77), {20, 225}) == GrayImage(5, 5, 123));

  Rng rng(61);
  GrayImage full = testing::random_image(30, 30, rng);
  full.pixels()[0] = 0;
  full.pixels()[1] = 255;
  CHECK(stretch(full, {0, 255}) == full);

  CHECK(thrown_code([&] { stretch(img, {100, 100}); }) == ErrorCode::InvalidArgument);
  CHECK(thrown_code([&] { stretch(img, {-1, 100}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("stretch hits the target range exactly and is monotone") {
  Rng rng(62);
  for (int t = 0; t < 200; ++t) {
    const GrayImage img = random_nonconstant(rng);
    const StretchParams p = sample_stretch(rng);
    const GrayImage out = stretch(img, p);
    const auto [lo, hi] = min_max(out);
    CHECK(lo == p.t_min);
    CHECK(hi == p.t_max);
    const auto src = img.pixels(), dst = out.pixels();
    for (std::size_t i = 1; i < src.size(); ++i) {
      if (src[i - 1] <= src[i]) CHECK(dst[i - 1] <= dst[i]);
      if (src[i - 1] >= src[i]) CHECK(dst[i - 1] >= dst[i]);
    }
    const GrayImage twice = stretch(out, p);
    for (std::size_t i = 0; i < dst.size(); ++i)
      CHECK(std::abs(int(twice.pixels()[i]) - int(dst[i])) <= 1);
  }
}

TEST_CASE("sample_stretch draws from the two ladders") {
  Rng rng(63);
  std::set<int> lows, highs;
  for (int t = 0; t < 500; ++t) {
    const StretchParams p = sample_stretch(rng);
    CHECK(p.t_min % 10 == 0);
    CHECK((p.t_max - 205) % 10 == 0);
    lows.insert(p.t_min);
    highs.insert(p.t_max);
  }
  CHECK(lows == std::set<int>{0, 10, 20, 30, 40, 50});
  CHECK(highs == std::set<int>{205, 215, 225, 235, 245, 255});
}

TEST_CASE("equalize forced cases") {
  CHECK(equalize(GrayImage(6, 3, 42), {0, 255}) == GrayImage(6, 3, 255));
  CHECK(equalize(GrayImage(6, 3, 42), {10, 200}) == GrayImage(6, 3, 200));
  CHECK(equalize(GrayImage(4, 1, {0, 0, 255, 255}), {0, 255}) ==
        GrayImage(4, 1, {128, 128, 255, 255}));
  CHECK(thrown_code([] { equalize(GrayImage(2, 2), {200, 100}); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("equalize is monotone and confined to its range") {
  Rng rng(64);
  for (int t = 0; t < 200; ++t) {
    const GrayImage img = random_nonconstant(rng);
    const int q0 = static_cast<int>(rng.uniform_int(0, 120));
    const int qk = static_cast<int>(rng.uniform_int(q0 + 1, 255));
    const GrayImage out = equalize(img, {q0, qk});
    const auto [lo, hi] = min_max(out);
    CHECK(lo >= q0);
    CHECK(hi == qk);
    const auto src = img.pixels(), dst = out.pixels();
    for (std::size_t i = 1; i < src.size(); ++i)
      if (src[i - 1] <= src[i]) CHECK(dst[i - 1] <= dst[i]);
  }
}

TEST_CASE("equalize barely moves an already uniform histogram") {
  std::vector<std::uint8_t> v;
  for (int rep = 0; rep < 4; ++rep)
    for (int k = 0; k < 256; ++k) v.push_back(static_cast<std::uint8_t>(k));
  const GrayImage img(256, 4, v);
  const GrayImage out = equalize(img, {0, 255});
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(std::abs(int(out.pixels()[i]) - int(v[i])) <= 1);
}
