#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace fpaug::testing {

FingerModel finger_model(int finger_id, double canvas_w, double canvas_h) {
  Rng rng(stable_hash({0xf1a9e2ULL, static_cast<std::uint64_t>(finger_id)}));
  FingerModel m;
  m.core_x = canvas_w / 2.0 + rng.uniform_real(-12.0, 12.0);
  m.core_y = canvas_h / 2.0 + rng.uniform_real(-12.0, 12.0);
  m.period = rng.uniform_real(7.5, 10.0);
  m.swirl = rng.uniform_real(2.0, 7.0);
  m.swirl_phase = rng.uniform_real(0.0, 2.0 * std::numbers::pi);
  m.ellipse = rng.uniform_real(1.0, 1.4);
  m.area_rx = canvas_w * 0.42;
  m.area_ry = canvas_h * 0.45;
  return m;
}

namespace {

// Master-frame coordinates of sensor pixel (x, y) under a placement.
void to_master(const Placement& p, double cx, double cy, int x, int y, double& mx, double& my) {
  const double a = p.angle * std::numbers::pi / 180.0;
  const double ux = x - p.dx - cx;
  const double uy = y - p.dy - cy;
  // Inverse of a counterclockwise (y down) rotation.
  mx = cx + std::cos(a) * ux - std::sin(a) * uy;
  my = cy + std::sin(a) * ux + std::cos(a) * uy;
}

double ridge(const FingerModel& m, double x, double y) {
  const double dx = x - m.core_x;
  const double dy = (y - m.core_y) / m.ellipse;
  const double r = std::hypot(dx, dy);
  const double theta = std::atan2(dy, dx);
  const double phase = r + m.swirl * std::sin(2.0 * theta + m.swirl_phase) +
                       0.004 * dx * dx - 0.002 * dy * dx;
  return std::cos(2.0 * std::numbers::pi * phase / m.period);
}

}  // namespace

GrayImage render_finger(const FingerModel& m, int w, int h, const Placement& p,
                        int noise_amplitude, std::uint64_t noise_seed) {
  GrayImage img(w, h, 255);
  Rng rng(noise_seed);
  const double cx = w / 2.0, cy = h / 2.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double mx, my;
      to_master(p, cx, cy, x, y, mx, my);
      const double ex = (mx - m.core_x) / m.area_rx;
      const double ey = (my - m.core_y) / m.area_ry;
      const double e = ex * ex + ey * ey;
      double v = 255.0;
      if (e < 1.0) {
        // Ridges dark, valleys light, fading toward the contact edge; the
        // pressed middle inks almost solid.
        const double contrast = e < 0.8 ? 1.0 : (1.0 - e) / 0.2;
        const double pressure = std::exp(-e / 0.15);
        const double ink = std::clamp(0.5 + 0.45 * ridge(m, mx, my) + 0.75 * pressure, 0.0, 1.0);
        v = 255.0 - contrast * 235.0 * ink;
      }
      if (noise_amplitude > 0) v += static_cast<double>(rng.uniform_int(-noise_amplitude, noise_amplitude));
      img.at(x, y) = round_clamp(v);
    }
  }
  return img;
}

GrayImage render_texture(const FingerModel& m, int w, int h, const Placement& p) {
  GrayImage img(w, h);
  const double cx = w / 2.0, cy = h / 2.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double mx, my;
      to_master(p, cx, cy, x, y, mx, my);
      img.at(x, y) = round_clamp(128.0 + 100.0 * ridge(m, mx, my));
    }
  return img;
}

GrayImage random_image(int w, int h, Rng& rng, int lo, int hi) {
  GrayImage img(w, h);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
  return img;
}

void write_database(const std::filesystem::path& dir, int fingers, int impressions, int w,
                    int h, std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  for (int f = 1; f <= fingers; ++f) {
    const FingerModel m = finger_model(f, w, h);
    for (int i = 1; i <= impressions; ++i) {
      Rng rng(stable_hash({seed, static_cast<std::uint64_t>(f), static_cast<std::uint64_t>(i)}));
      Placement p;
      if (i > 1) {
        p.dx = static_cast<double>(rng.uniform_int(-9, 9));
        p.dy = static_cast<double>(rng.uniform_int(-9, 9));
        p.angle = static_cast<double>(rng.uniform_int(-6, 6));
      }
      const GrayImage img = render_finger(m, w, h, p, 6, rng.next());
      cv::Mat mat(h, w, CV_8UC1, const_cast<std::uint8_t*>(img.pixels().data()));
      cv::imwrite((dir / (std::to_string(f) + "_" + std::to_string(i) + ".png")).string(), mat);
    }
  }
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("fpaug_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fpaug::testing
