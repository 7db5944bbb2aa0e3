#include "fpaug/fpaug.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

#include "augment_chain.hpp"
#include "dataset_builder.hpp"
#include "error.hpp"
#include "fingerprint_area.hpp"
#include "geometric_augment.hpp"
#include "log.hpp"
#include "noise_augment.hpp"
#include "photometric_augment.hpp"
#include "region_align.hpp"

struct fpaug_image {
  fpaug::GrayImage img;
};

namespace {

thread_local std::string g_last_error;

fpaug_status to_status(fpaug::ErrorCode c) {
  using fpaug::ErrorCode;
  switch (c) {
    case ErrorCode::InvalidArgument: return FPAUG_ERR_INVALID_ARGUMENT;
    case ErrorCode::IoFailure: return FPAUG_ERR_IO;
    case ErrorCode::UnsupportedFormat: return FPAUG_ERR_UNSUPPORTED_FORMAT;
    case ErrorCode::NotGrayscale: return FPAUG_ERR_NOT_GRAYSCALE;
    case ErrorCode::RegionOutOfBounds: return FPAUG_ERR_REGION_OUT_OF_BOUNDS;
    case ErrorCode::NoFingerprintArea: return FPAUG_ERR_NO_FINGERPRINT_AREA;
    case ErrorCode::PatchLargerThanArea: return FPAUG_ERR_PATCH_LARGER_THAN_AREA;
    case ErrorCode::CenterOutOfBounds: return FPAUG_ERR_CENTER_OUT_OF_BOUNDS;
    case ErrorCode::WindowTooLarge: return FPAUG_ERR_WINDOW_TOO_LARGE;
    case ErrorCode::ZeroVariance: return FPAUG_ERR_ZERO_VARIANCE;
    case ErrorCode::ImageTooSmall: return FPAUG_ERR_IMAGE_TOO_SMALL;
    case ErrorCode::EmptyDatabase: return FPAUG_ERR_EMPTY_DATABASE;
    case ErrorCode::MalformedFilename: return FPAUG_ERR_MALFORMED_FILENAME;
    case ErrorCode::UnknownPreset: return FPAUG_ERR_UNKNOWN_PRESET;
    case ErrorCode::VerifyCountTooLarge: return FPAUG_ERR_VERIFY_COUNT_TOO_LARGE;
    case ErrorCode::InvalidPlan: return FPAUG_ERR_INVALID_PLAN;
  }
  return FPAUG_ERR_INTERNAL;
}

fpaug_status fail(fpaug_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
fpaug_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return FPAUG_OK;
  } catch (const fpaug::Error& e) {
    return fail(to_status(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FPAUG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FPAUG_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FPAUG_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw fpaug::Error(fpaug::ErrorCode::InvalidArgument, what);
}

fpaug_image* wrap(fpaug::GrayImage img) { return new fpaug_image{std::move(img)}; }

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

fpaug::Region to_region(const fpaug_region& r) { return {r.x, r.y, r.w, r.h}; }
fpaug_region from_region(const fpaug::Region& r) { return {r.x, r.y, r.w, r.h}; }

fpaug::AlignSearchParams to_align(const fpaug_align_params& p) {
  fpaug::AlignSearchParams sp;
  sp.coarse_stride = p.coarse_stride;
  sp.refine_radius = p.refine_radius;
  if (p.angles && p.angle_count > 0) sp.angle_set.assign(p.angles, p.angles + p.angle_count);
  sp.accept_threshold = p.accept_threshold;
  sp.validate();
  return sp;
}

constexpr int32_t kDefaultAngles[] = {-10, -8, -6, -4, -2, 0, 2, 4, 6, 8, 10};

}  // namespace

extern "C" {

const char* fpaug_status_string(fpaug_status status) {
  switch (status) {
    case FPAUG_OK: return "ok";
    case FPAUG_ERR_INVALID_ARGUMENT: return "invalid argument";
    case FPAUG_ERR_IO: return "I/O failure";
    case FPAUG_ERR_UNSUPPORTED_FORMAT: return "unsupported format";
    case FPAUG_ERR_NOT_GRAYSCALE: return "not grayscale";
    case FPAUG_ERR_REGION_OUT_OF_BOUNDS: return "region out of bounds";
    case FPAUG_ERR_NO_FINGERPRINT_AREA: return "no fingerprint area";
    case FPAUG_ERR_PATCH_LARGER_THAN_AREA: return "patch larger than fingerprint area";
    case FPAUG_ERR_CENTER_OUT_OF_BOUNDS: return "center out of bounds";
    case FPAUG_ERR_WINDOW_TOO_LARGE: return "window too large";
    case FPAUG_ERR_ZERO_VARIANCE: return "zero variance";
    case FPAUG_ERR_IMAGE_TOO_SMALL: return "image too small";
    case FPAUG_ERR_EMPTY_DATABASE: return "empty database";
    case FPAUG_ERR_MALFORMED_FILENAME: return "malformed file name";
    case FPAUG_ERR_UNKNOWN_PRESET: return "unknown preset";
    case FPAUG_ERR_VERIFY_COUNT_TOO_LARGE: return "verify count too large";
    case FPAUG_ERR_INVALID_PLAN: return "invalid plan";
    case FPAUG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* fpaug_last_error(void) { return g_last_error.c_str(); }

void fpaug_set_log_level(fpaug_log_level level) {
  fpaug::log::set_level(static_cast<fpaug::log::Level>(level));
}

void fpaug_string_free(char* s) { std::free(s); }

fpaug_status fpaug_image_create(int32_t width, int32_t height, const uint8_t* pixels,
                                fpaug_image** out) {
  return guarded([&] {
    require(out != nullptr, "out is NULL");
    fpaug::GrayImage img(width, height);
    if (pixels) std::memcpy(img.pixels().data(), pixels, img.size());
    *out = wrap(std::move(img));
  });
}

fpaug_status fpaug_image_load(const char* path, fpaug_image** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    *out = wrap(fpaug::load_image(path));
  });
}

fpaug_status fpaug_image_save(const fpaug_image* img, const char* path) {
  return guarded([&] {
    require(img && path, "NULL argument");
    fpaug::save_image(img->img, path);
  });
}

void fpaug_image_free(fpaug_image* img) { delete img; }

int32_t fpaug_image_width(const fpaug_image* img) { return img ? img->img.width() : 0; }
int32_t fpaug_image_height(const fpaug_image* img) { return img ? img->img.height() : 0; }
const uint8_t* fpaug_image_pixels(const fpaug_image* img) {
  return img ? img->img.pixels().data() : nullptr;
}

fpaug_status fpaug_image_stats(const fpaug_image* img, double* mean, double* variance) {
  return guarded([&] {
    require(img != nullptr, "image is NULL");
    const fpaug::ImageStats s = fpaug::stats(img->img);
    if (mean) *mean = s.mean;
    if (variance) *variance = s.variance;
  });
}

fpaug_status fpaug_image_crop(const fpaug_image* img, const fpaug_region* region,
                              fpaug_image** out) {
  return guarded([&] {
    require(img && region && out, "NULL argument");
    *out = wrap(fpaug::crop(img->img, to_region(*region)));
  });
}

fpaug_status fpaug_image_rotate(const fpaug_image* img, double degrees, uint8_t fill,
                                fpaug_image** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = wrap(fpaug::rotate_about_center(img->img, degrees, fill));
  });
}

fpaug_status fpaug_normalize(const fpaug_image* img, double target_mean,
                             double target_variance, fpaug_image** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = wrap(fpaug::normalize(img->img, {target_mean, target_variance}));
  });
}

fpaug_status fpaug_extract_area(const fpaug_image* img, int32_t patch_width,
                                int32_t patch_height, fpaug_region* fingerprint,
                                fpaug_region* patch, int* patch_exceeds_area) {
  return guarded([&] {
    require(img != nullptr, "image is NULL");
    const fpaug::ExtractedArea a =
        fpaug::extract_fingerprint_area(img->img, fpaug::PatchSpec(patch_width, patch_height));
    if (fingerprint) *fingerprint = from_region(a.fingerprint);
    if (patch) *patch = from_region(a.patch);
    if (patch_exceeds_area) *patch_exceeds_area = a.patch_exceeds_area ? 1 : 0;
  });
}

fpaug_status fpaug_rotated_patch(const fpaug_image* img, int32_t center_x, int32_t center_y,
                                 int32_t patch_width, int32_t patch_height, double degrees,
                                 fpaug_image** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = wrap(fpaug::rotated_patch(img->img, {center_x, center_y},
                                     fpaug::PatchSpec(patch_width, patch_height), degrees));
  });
}

fpaug_status fpaug_shifted_patch(const fpaug_image* img, int32_t center_x, int32_t center_y,
                                 int32_t patch_width, int32_t patch_height, int32_t dx,
                                 int32_t dy, fpaug_image** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = wrap(fpaug::shifted_patch(img->img, {center_x, center_y},
                                     fpaug::PatchSpec(patch_width, patch_height), {dx, dy}));
  });
}

fpaug_status fpaug_stretch(const fpaug_image* img, int32_t t_min, int32_t t_max,
                           fpaug_image** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = wrap(fpaug::stretch(img->img, {t_min, t_max}));
  });
}

fpaug_status fpaug_equalize(const fpaug_image* img, int32_t q0, int32_t qk, fpaug_image** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    *out = wrap(fpaug::equalize(img->img, {q0, qk}));
  });
}

fpaug_status fpaug_uniform_noise(const fpaug_image* img, int32_t a, int32_t b, uint64_t seed,
                                 fpaug_image** out) {
  return guarded([&] {
    require(img && out, "NULL argument");
    fpaug::Rng rng(seed);
    *out = wrap(fpaug::add_uniform_noise(img->img, {a, b}, rng));
  });
}

fpaug_status fpaug_random_area_noise(const fpaug_image* img, int32_t window,
                                     int32_t dense_threshold, int32_t circle_diameter,
                                     int32_t circle_count, uint64_t seed, fpaug_image** out,
                                     int* applied, uint64_t* painted_pixels) {
  return guarded([&] {
    require(img && out, "NULL argument");
    fpaug::Rng rng(seed);
    fpaug::NoiseOutcome o = fpaug::random_area_noise(
        img->img, {window, dense_threshold, circle_diameter, circle_count}, rng);
    if (applied) *applied = o.applied ? 1 : 0;
    if (painted_pixels) *painted_pixels = o.painted_pixels;
    *out = wrap(std::move(o.image));
  });
}

fpaug_status fpaug_chain_sample(const char* ops, const fpaug_region* base, int32_t base_angle,
                                uint64_t seed, char** chain_json) {
  return guarded([&] {
    require(ops && base && chain_json, "NULL argument");
    const auto kinds = fpaug::parse_op_list(ops);
    fpaug::Rng rng(seed);
    const fpaug::TransformChain chain =
        fpaug::sample_chain(kinds, to_region(*base), base_angle, rng);
    *chain_json = dup_string(fpaug::chain_to_json(chain).dump());
  });
}

fpaug_status fpaug_chain_apply(const fpaug_image* src, const char* chain_json,
                               uint64_t item_seed, fpaug_image** out, int* noise_applied) {
  return guarded([&] {
    require(src && chain_json && out, "NULL argument");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(chain_json);
    } catch (const nlohmann::json::exception& e) {
      throw fpaug::Error(fpaug::ErrorCode::InvalidArgument,
                         std::string("chain is not valid JSON: ") + e.what());
    }
    fpaug::ChainResult r = fpaug::apply_chain(src->img, fpaug::chain_from_json(j), item_seed);
    if (noise_applied) {
      bool all = true;
      for (bool b : r.noise_applied) all = all && b;
      *noise_applied = all ? 1 : 0;
    }
    *out = wrap(std::move(r.image));
  });
}

void fpaug_align_params_default(fpaug_align_params* params) {
  if (!params) return;
  const fpaug::AlignSearchParams d;
  params->coarse_stride = d.coarse_stride;
  params->refine_radius = d.refine_radius;
  params->angles = kDefaultAngles;
  params->angle_count = sizeof(kDefaultAngles) / sizeof(kDefaultAngles[0]);
  params->accept_threshold = d.accept_threshold;
}

fpaug_status fpaug_ncc(const fpaug_image* a, const fpaug_image* b, double* out) {
  return guarded([&] {
    require(a && b && out, "NULL argument");
    *out = fpaug::ncc(a->img, b->img);
  });
}

fpaug_status fpaug_align(const fpaug_image* extra, const fpaug_image* reference_patch,
                         const fpaug_align_params* params, fpaug_region* region,
                         int32_t* angle, double* score, int* accepted) {
  return guarded([&] {
    require(extra && reference_patch, "NULL argument");
    fpaug_align_params p;
    fpaug_align_params_default(&p);
    if (params) p = *params;
    const fpaug::PatchSpec spec(reference_patch->img.width(), reference_patch->img.height());
    const fpaug::AlignOutcome o = fpaug::best_matching_region(
        extra->img, {reference_patch->img, 0}, spec, to_align(p));
    if (region) *region = from_region(o.best.region);
    if (angle) *angle = o.best.angle;
    if (score) *score = o.best.score;
    if (accepted) *accepted = o.accepted ? 1 : 0;
  });
}

void fpaug_build_config_default(fpaug_build_config* config) {
  if (!config) return;
  const fpaug::BuildConfig d;
  config->input_dir = nullptr;
  config->output_dir = nullptr;
  config->preset = "dataset1";
  config->plan_file = nullptr;
  config->patch_width = d.spec.width;
  config->patch_height = d.spec.height;
  config->seed = d.seed;
  config->verify_count = 0;
  config->jobs = 1;
  fpaug_align_params_default(&config->align);
}

fpaug_status fpaug_build(const fpaug_build_config* config, fpaug_build_summary* summary) {
  return guarded([&] {
    require(config && config->input_dir && config->output_dir, "input and output directories are required");
    fpaug::AugmentPlan plan;
    if (config->plan_file) {
      std::ifstream in(config->plan_file);
      if (!in)
        throw fpaug::Error(fpaug::ErrorCode::IoFailure,
                           std::string("cannot read plan file ") + config->plan_file);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw fpaug::Error(fpaug::ErrorCode::InvalidPlan, std::string("malformed plan: ") + e.what());
      }
      plan = fpaug::AugmentPlan::from_json(j);
      plan.validate(true);
    } else {
      plan = fpaug::preset_plan(config->preset ? config->preset : "dataset1");
    }

    fpaug::BuildConfig bc;
    bc.spec = fpaug::PatchSpec(config->patch_width, config->patch_height);
    bc.align = to_align(config->align);
    bc.seed = config->seed;
    bc.jobs = config->jobs;
    bc.outdir = config->output_dir;

    const fpaug::SourceDatabase db = fpaug::scan_database(config->input_dir);
    fpaug::BuildResult r = fpaug::build_dataset(db, plan, bc);
    if (config->verify_count > 0) {
      r.manifest = fpaug::split_train_verify(std::move(r.manifest), config->verify_count,
                                             fpaug::stable_hash({config->seed, 0x59u}));
      fpaug::write_manifest(r.manifest, bc.outdir / "manifest.jsonl");
    }

    if (summary) {
      fpaug_build_summary s{};
      s.fingers = r.fingers;
      s.source_images = db.image_count();
      s.skipped_files = db.skipped.size();
      s.references = r.references;
      s.accepted_extras = r.accepted_extras;
      s.rejected_extras = r.rejections.size();
      s.failed_images = r.failures.size();
      s.outputs = r.manifest.size();
      for (const auto& e : r.manifest) (e.split == fpaug::Split::Train ? s.train : s.verify) += 1;
      s.per_image_count = plan.per_image_count;
      s.per_image_noisy = plan.noisy_count();
      s.per_image_random_area = plan.random_area_count();
      *summary = s;
    }
  });
}

fpaug_status fpaug_validate(const char* output_dir, uint32_t replay_checks, uint64_t seed,
                            char** report, uint64_t* violations) {
  return guarded([&] {
    require(output_dir != nullptr, "output_dir is NULL");
    const fpaug::ValidationReport rep =
        fpaug::validate_output_dir(output_dir, {replay_checks, seed});
    if (report) *report = dup_string(rep.to_text());
    if (violations) *violations = rep.violations.size();
  });
}

fpaug_status fpaug_preset_output_count(const char* preset, uint64_t source_images,
                                       uint64_t* total) {
  return guarded([&] {
    require(preset && total, "NULL argument");
    *total = fpaug::expected_output_count(fpaug::preset_plan(preset), source_images);
  });
}

}  // extern "C"
