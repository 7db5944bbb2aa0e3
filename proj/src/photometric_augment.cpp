#include "photometric_augment.hpp"

#include <algorithm>

#include "error.hpp"

namespace fpaug {

namespace {

GrayImage apply_lut(const GrayImage& img, const std::array<std::uint8_t, 256>& lut) {
  GrayImage out(img.width(), img.height());
  auto dst = out.pixels();
  const auto src = img.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = lut[src[i]];
  return out;
}

}  // namespace

Histogram histogram(const GrayImage& img) {
  Histogram h{};
  for (auto v : img.pixels()) ++h[v];
  return h;
}

GrayImage stretch(const GrayImage& img, const StretchParams& p) {
  if (p.t_min < 0 || p.t_max > 255 || p.t_min >= p.t_max)
    throw Error(ErrorCode::InvalidArgument, "stretch requires 0 <= t_min < t_max <= 255");
  const auto [lo_it, hi_it] = std::minmax_element(img.pixels().begin(), img.pixels().end());
  const int p_min = *lo_it;
  const int p_max = *hi_it;

  std::array<std::uint8_t, 256> lut{};
  if (p_min == p_max) {
    lut.fill(round_clamp((p.t_min + p.t_max) / 2.0));
    return apply_lut(img, lut);
  }
  const double span = p_max - p_min;
  for (int v = 0; v < 256; ++v) {
    // Numerator first: keeps exact halves exact before rounding.
    const double q = static_cast<double>(p.t_max - p.t_min) * (v - p_min) / span + p.t_min;
    lut[v] = round_clamp(q);
  }
  return apply_lut(img, lut);
}

GrayImage equalize(const GrayImage& img, const EqualizeParams& p) {
  if (p.q0 < 0 || p.qk > 255 || p.q0 >= p.qk)
    throw Error(ErrorCode::InvalidArgument, "equalize requires 0 <= q0 < qk <= 255");
  const Histogram h = histogram(img);
  const double total = static_cast<double>(img.size());

  // Bins below the observed minimum are empty, so a cumulative sum from 0
  // equals the sum from p0.
  std::array<std::uint8_t, 256> lut{};
  std::uint64_t cumulative = 0;
  for (int v = 0; v < 256; ++v) {
    cumulative += h[v];
    const double q = static_cast<double>(p.qk - p.q0) * static_cast<double>(cumulative) / total + p.q0;
    lut[v] = static_cast<std::uint8_t>(std::clamp<int>(round_clamp(q), p.q0, p.qk));
  }
  return apply_lut(img, lut);
}

StretchParams sample_stretch(Rng& rng) {
  const int lo = static_cast<int>(rng.uniform_int(0, 5)) * 10;
  const int hi = 205 + static_cast<int>(rng.uniform_int(0, 5)) * 10;
  return {lo, hi};
}

}  // namespace fpaug
