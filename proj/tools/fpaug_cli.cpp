// fpaug command line front end. Talks to the library only through the C API.
//
// Exit codes: 0 ok, 1 I/O failure, 2 usage or unusable input, 3 validation
// violations.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpaug/fpaug.h"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInvalid = 3;
constexpr std::uint64_t kDefaultSeed = 20220101;

struct ImageDeleter {
  void operator()(fpaug_image* p) const { fpaug_image_free(p); }
};
using ImagePtr = std::unique_ptr<fpaug_image, ImageDeleter>;

struct StringDeleter {
  void operator()(char* p) const { fpaug_string_free(p); }
};
using CString = std::unique_ptr<char, StringDeleter>;

int exit_code_for(fpaug_status s) {
  switch (s) {
    case FPAUG_OK: return kExitOk;
    case FPAUG_ERR_IO:
    case FPAUG_ERR_INTERNAL: return kExitIo;
    default: return kExitUsage;
  }
}

int report(fpaug_status s, const std::string& context) {
  std::cerr << "fpaug: " << context << ": " << fpaug_last_error() << " ("
            << fpaug_status_string(s) << ")\n";
  return exit_code_for(s);
}

std::string region_text(const fpaug_region& r) {
  return std::to_string(r.x) + " " + std::to_string(r.y) + " " + std::to_string(r.w) + " " +
         std::to_string(r.h);
}

// ------------------------------------------------------------------ extract

struct ExtractArgs {
  std::string image;
  int size = 128;
  int height = 0;
  std::string out;
};

int cmd_extract(const ExtractArgs& a) {
  fpaug_image* raw = nullptr;
  if (auto s = fpaug_image_load(a.image.c_str(), &raw); s != FPAUG_OK)
    return report(s, "cannot load " + a.image);
  ImagePtr img(raw);

  const int h = a.height > 0 ? a.height : a.size;
  fpaug_region area{}, patch{};
  int exceeds = 0;
  if (auto s = fpaug_extract_area(img.get(), a.size, h, &area, &patch, &exceeds); s != FPAUG_OK)
    return report(s, "cannot extract the fingerprint area of " + a.image);
  if (exceeds)
    std::cerr << "fpaug: warning: the " << a.size << "x" << h
              << " patch is larger than the fingerprint area; region clamped to the image\n";

  fpaug_image* cropped = nullptr;
  if (auto s = fpaug_image_crop(img.get(), &patch, &cropped); s != FPAUG_OK)
    return report(s, "crop failed");
  ImagePtr out(cropped);
  if (auto s = fpaug_image_save(out.get(), a.out.c_str()); s != FPAUG_OK)
    return report(s, "cannot write " + a.out);

  std::cout << "fingerprint " << region_text(area) << "\n";
  std::cout << "region " << region_text(patch) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------ augment

struct AugmentArgs {
  std::string image;
  std::string ops;
  std::vector<int> angles;
  int count = 1;
  int size = 128;
  std::uint64_t seed = kDefaultSeed;
  std::string outdir;
};

int cmd_augment(const AugmentArgs& a) {
  // Validate the op list before touching files.
  {
    const fpaug_region probe{0, 0, a.size, a.size};
    char* tmp = nullptr;
    if (auto s = fpaug_chain_sample(a.ops.c_str(), &probe, 0, 0, &tmp); s != FPAUG_OK)
      return report(s, "bad --op");
    fpaug_string_free(tmp);
  }
  const bool has_rotate = a.ops.find("rotate") != std::string::npos;
  if (!a.angles.empty() && !has_rotate) {
    std::cerr << "fpaug: --angles needs a rotate op\n";
    return kExitUsage;
  }

  fpaug_image* raw = nullptr;
  if (auto s = fpaug_image_load(a.image.c_str(), &raw); s != FPAUG_OK)
    return report(s, "cannot load " + a.image);
  ImagePtr img(raw);

  fpaug_region patch{};
  const fpaug_status area = fpaug_extract_area(img.get(), a.size, a.size, nullptr, &patch, nullptr);
  if (area == FPAUG_ERR_NO_FINGERPRINT_AREA) {
    std::cerr << "fpaug: warning: no fingerprint area found; using the image center\n";
    const int w = fpaug_image_width(img.get()), h = fpaug_image_height(img.get());
    if (w < a.size || h < a.size) {
      std::cerr << "fpaug: image is smaller than the " << a.size << "x" << a.size << " patch\n";
      return kExitUsage;
    }
    patch = {(w - a.size) / 2, (h - a.size) / 2, a.size, a.size};
  } else if (area != FPAUG_OK) {
    return report(area, "cannot place the patch");
  }

  std::error_code ec;
  fs::create_directories(a.outdir, ec);
  if (!fs::is_directory(a.outdir)) {
    std::cerr << "fpaug: cannot create " << a.outdir << "\n";
    return kExitIo;
  }

  const int n = a.angles.empty() ? a.count : static_cast<int>(a.angles.size());
  const std::string stem = fs::path(a.image).stem().string();
  int written = 0, skipped = 0;
  for (int k = 0; k < n; ++k) {
    const std::uint64_t item_seed = a.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(k + 1));
    char* chain_raw = nullptr;
    if (auto s = fpaug_chain_sample(a.ops.c_str(), &patch, 0, item_seed, &chain_raw); s != FPAUG_OK)
      return report(s, "cannot sample the chain");
    CString chain_text(chain_raw);
    std::string chain = chain_text.get();
    if (!a.angles.empty()) {
      auto j = nlohmann::json::parse(chain);
      for (auto& op : j)
        if (op["op"] == "rotate") op["angle"] = ((a.angles[k] % 360) + 360) % 360;
      chain = j.dump();
    }

    fpaug_image* out_raw = nullptr;
    int applied = 1;
    if (auto s = fpaug_chain_apply(img.get(), chain.c_str(), item_seed, &out_raw, &applied);
        s != FPAUG_OK)
      return report(s, "augmentation failed");
    ImagePtr out(out_raw);
    if (!applied) {
      std::cerr << "fpaug: warning: augment " << k
                << " skipped, the noise op found nothing to apply to\n";
      ++skipped;
      continue;
    }
    const fs::path file = fs::path(a.outdir) / (stem + "_" + std::to_string(k) + ".bmp");
    if (auto s = fpaug_image_save(out.get(), file.string().c_str()); s != FPAUG_OK)
      return report(s, "cannot write " + file.string());
    std::cout << file.filename().string() << " " << chain << "\n";
    ++written;
  }
  std::cerr << "fpaug: wrote " << written << " file(s), skipped " << skipped << "\n";
  return kExitOk;
}

// -------------------------------------------------------------------- build

struct BuildArgs {
  std::string input;
  std::string output;
  std::string preset = "dataset1";
  std::string plan;
  int size = 128;
  std::uint64_t seed = kDefaultSeed;
  std::uint64_t verify_count = 0;
  double threshold = 0.35;
  int jobs = 0;
};

int cmd_build(const BuildArgs& a) {
  fpaug_build_config cfg;
  fpaug_build_config_default(&cfg);
  cfg.input_dir = a.input.c_str();
  cfg.output_dir = a.output.c_str();
  cfg.preset = a.preset.c_str();
  cfg.plan_file = a.plan.empty() ? nullptr : a.plan.c_str();
  cfg.patch_width = a.size;
  cfg.patch_height = a.size;
  cfg.seed = a.seed;
  cfg.verify_count = a.verify_count;
  cfg.align.accept_threshold = a.threshold;
  cfg.jobs = a.jobs > 0 ? a.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  fpaug_build_summary s{};
  if (auto st = fpaug_build(&cfg, &s); st != FPAUG_OK) return report(st, "build failed");

  std::cout << "fingers=" << s.fingers << "\n"
            << "source_images=" << s.source_images << "\n"
            << "skipped_files=" << s.skipped_files << "\n"
            << "references=" << s.references << "\n"
            << "accepted_extras=" << s.accepted_extras << "\n"
            << "rejected_extras=" << s.rejected_extras << "\n"
            << "failed_images=" << s.failed_images << "\n"
            << "per_image=" << s.per_image_count << "\n"
            << "noisy=" << s.per_image_noisy << "/" << s.per_image_count << "\n"
            << "area_noise=" << s.per_image_random_area << "/" << s.per_image_noisy << "\n"
            << "outputs=" << s.outputs << "\n"
            << "train=" << s.train << "\n"
            << "verify=" << s.verify << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- validate

int cmd_validate(const std::string& outdir, unsigned replay, std::uint64_t seed) {
  char* raw = nullptr;
  std::uint64_t violations = 0;
  if (auto s = fpaug_validate(outdir.c_str(), replay, seed, &raw, &violations); s != FPAUG_OK) {
    report(s, "cannot validate " + outdir);
    return s == FPAUG_ERR_IO ? kExitIo : exit_code_for(s);
  }
  CString text(raw);
  std::cout << text.get();
  return violations == 0 ? kExitOk : kExitInvalid;
}

// -------------------------------------------------------------------- count

int cmd_count(const std::string& preset, std::uint64_t sources, std::uint64_t verify) {
  std::uint64_t total = 0;
  if (auto s = fpaug_preset_output_count(preset.c_str(), sources, &total); s != FPAUG_OK)
    return report(s, "bad preset");
  if (verify >= total && total > 0) {
    std::cerr << "fpaug: verify count must be below the " << total << " outputs\n";
    return kExitUsage;
  }
  std::cout << "outputs=" << total << "\ntrain=" << total - verify << "\nverify=" << verify << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Small-area fingerprint dataset augmentation"};
  app.require_subcommand(1);
  int verbosity = 0;
  bool quiet = false;
  app.add_flag("-v,--verbose", verbosity, "More progress output on stderr (repeatable)");
  app.add_flag("-q,--quiet", quiet, "Errors only");

  ExtractArgs ex;
  auto* extract = app.add_subcommand("extract", "Cut the centered patch from a fingerprint image");
  extract->add_option("image", ex.image, "Input image")->required();
  extract->add_option("-s,--size", ex.size, "Patch side in pixels")->check(CLI::Range(16, 4096));
  extract->add_option("--height", ex.height, "Patch height when not square")->check(CLI::Range(16, 4096));
  extract->add_option("-o,--out", ex.out, "Output BMP")->required();

  AugmentArgs au;
  std::string angles_text;
  auto* augment = app.add_subcommand("augment", "Augment the patch of one image");
  augment->add_option("image", au.image, "Input image")->required();
  augment->add_option("--op", au.ops,
                      "rotate, shift, stretch, equalize, uniform-noise, area-noise or a '+' chain")
      ->required();
  augment->add_option("--angles", au.angles, "Fixed rotation angles, one output each")->delimiter(',');
  augment->add_option("-n,--count", au.count, "Number of random augments")->check(CLI::Range(1, 100000));
  augment->add_option("-s,--size", au.size, "Patch side in pixels")->check(CLI::Range(16, 4096));
  augment->add_option("--seed", au.seed, "Random seed");
  augment->add_option("-o,--out", au.outdir, "Output directory")->required();

  BuildArgs bu;
  auto* build = app.add_subcommand("build", "Build a training dataset from a fingerprint database");
  build->add_option("-i,--input", bu.input, "Database directory of <finger>_<impression> images")
      ->required();
  build->add_option("-o,--output", bu.output, "Output directory")->required();
  auto* preset_opt = build->add_option("--preset", bu.preset, "dataset1 | dataset2 | dataset3");
  build->add_option("--plan", bu.plan, "Custom JSON plan file")->excludes(preset_opt);
  build->add_option("-s,--size", bu.size, "Patch side in pixels")->check(CLI::Range(16, 4096));
  build->add_option("--seed", bu.seed, "Random seed");
  build->add_option("--verify-count", bu.verify_count, "Entries held out for verification");
  build->add_option("--threshold", bu.threshold, "Alignment acceptance threshold")
      ->check(CLI::Range(-0.999999, 0.999999));
  build->add_option("-j,--jobs", bu.jobs, "Worker threads (default: logical CPUs)")
      ->check(CLI::Range(1, 1024));

  std::string val_dir;
  unsigned replay = 20;
  std::uint64_t val_seed = 1;
  auto* validate = app.add_subcommand("validate", "Check a built dataset");
  validate->add_option("outdir", val_dir, "Dataset directory")->required();
  validate->add_option("--replay", replay, "Number of manifest chains to replay");
  validate->add_option("--seed", val_seed, "Seed for choosing replayed entries");

  std::string count_preset = "dataset1";
  std::uint64_t count_sources = 0, count_verify = 0;
  auto* count = app.add_subcommand("count", "Output count of a preset for a number of source images");
  count->add_option("--preset", count_preset, "dataset1 | dataset2 | dataset3");
  count->add_option("--sources", count_sources, "Accepted source images")->required();
  count->add_option("--verify-count", count_verify, "Entries held out for verification");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  fpaug_set_log_level(quiet            ? FPAUG_LOG_ERROR
                      : verbosity >= 2 ? FPAUG_LOG_DEBUG
                      : verbosity == 1 ? FPAUG_LOG_INFO
                                       : FPAUG_LOG_WARN);

  if (*extract) return cmd_extract(ex);
  if (*augment) return cmd_augment(au);
  if (*build) return cmd_build(bu);
  if (*validate) return cmd_validate(val_dir, replay, val_seed);
  if (*count) return cmd_count(count_preset, count_sources, count_verify);
  return kExitUsage;
}
