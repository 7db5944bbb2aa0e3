/*
 * fpaug: small-area fingerprint dataset augmentation.
 *
 * C interface over the C++ core. Objects are opaque handles released with
 * their matching *_free function. Every call that can fail returns an
 * fpaug_status; on failure fpaug_last_error() holds a message for the
 * calling thread until its next failing call.
 */
#ifndef FPAUG_FPAUG_H
#define FPAUG_FPAUG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FPAUG_BUILDING_LIBRARY)
#    define FPAUG_API __declspec(dllexport)
#  else
#    define FPAUG_API __declspec(dllimport)
#  endif
#else
#  define FPAUG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fpaug_status {
  FPAUG_OK = 0,
  FPAUG_ERR_INVALID_ARGUMENT = 1,
  FPAUG_ERR_IO = 2,
  FPAUG_ERR_UNSUPPORTED_FORMAT = 3,
  FPAUG_ERR_NOT_GRAYSCALE = 4,
  FPAUG_ERR_REGION_OUT_OF_BOUNDS = 5,
  FPAUG_ERR_NO_FINGERPRINT_AREA = 6,
  FPAUG_ERR_PATCH_LARGER_THAN_AREA = 7,
  FPAUG_ERR_CENTER_OUT_OF_BOUNDS = 8,
  FPAUG_ERR_WINDOW_TOO_LARGE = 9,
  FPAUG_ERR_ZERO_VARIANCE = 10,
  FPAUG_ERR_IMAGE_TOO_SMALL = 11,
  FPAUG_ERR_EMPTY_DATABASE = 12,
  FPAUG_ERR_MALFORMED_FILENAME = 13,
  FPAUG_ERR_UNKNOWN_PRESET = 14,
  FPAUG_ERR_VERIFY_COUNT_TOO_LARGE = 15,
  FPAUG_ERR_INVALID_PLAN = 16,
  FPAUG_ERR_INTERNAL = 100
} fpaug_status;

typedef struct fpaug_image fpaug_image;

typedef struct fpaug_region {
  int32_t x;
  int32_t y;
  int32_t w;
  int32_t h;
} fpaug_region;

typedef enum fpaug_log_level {
  FPAUG_LOG_ERROR = 0,
  FPAUG_LOG_WARN = 1,
  FPAUG_LOG_INFO = 2,
  FPAUG_LOG_DEBUG = 3
} fpaug_log_level;

FPAUG_API const char* fpaug_status_string(fpaug_status status);
FPAUG_API const char* fpaug_last_error(void);
FPAUG_API void fpaug_set_log_level(fpaug_log_level level);

/* Strings returned through char** parameters. */
FPAUG_API void fpaug_string_free(char* s);

/* ------------------------------------------------------------------ images */

/* pixels may be NULL for an all-zero image; otherwise w*h row-major bytes. */
FPAUG_API fpaug_status fpaug_image_create(int32_t width, int32_t height,
                                          const uint8_t* pixels, fpaug_image** out);
/* BMP, PNG, PGM or TIFF; 8-bit gray or RGB with equal channels. */
FPAUG_API fpaug_status fpaug_image_load(const char* path, fpaug_image** out);
/* Always writes an 8-bit palettized BMP. */
FPAUG_API fpaug_status fpaug_image_save(const fpaug_image* img, const char* path);
FPAUG_API void fpaug_image_free(fpaug_image* img);

FPAUG_API int32_t fpaug_image_width(const fpaug_image* img);
FPAUG_API int32_t fpaug_image_height(const fpaug_image* img);
/* Borrowed; valid until the image is freed. */
FPAUG_API const uint8_t* fpaug_image_pixels(const fpaug_image* img);

FPAUG_API fpaug_status fpaug_image_stats(const fpaug_image* img, double* mean,
                                         double* variance);
FPAUG_API fpaug_status fpaug_image_crop(const fpaug_image* img, const fpaug_region* region,
                                        fpaug_image** out);
/* Counterclockwise, bilinear, about ((w-1)/2, (h-1)/2). */
FPAUG_API fpaug_status fpaug_image_rotate(const fpaug_image* img, double degrees,
                                          uint8_t fill, fpaug_image** out);

/* -------------------------------------------------------- fingerprint area */

FPAUG_API fpaug_status fpaug_normalize(const fpaug_image* img, double target_mean,
                                       double target_variance, fpaug_image** out);

/* Locates the fingerprint area and the centered patch region (translated to
 * fit the image). patch_exceeds_area is set to 1 when the patch is larger
 * than the fingerprint area; any out pointer may be NULL. */
FPAUG_API fpaug_status fpaug_extract_area(const fpaug_image* img, int32_t patch_width,
                                          int32_t patch_height, fpaug_region* fingerprint,
                                          fpaug_region* patch, int* patch_exceeds_area);

/* ------------------------------------------------------------ augmentation */

FPAUG_API fpaug_status fpaug_rotated_patch(const fpaug_image* img, int32_t center_x,
                                           int32_t center_y, int32_t patch_width,
                                           int32_t patch_height, double degrees,
                                           fpaug_image** out);
FPAUG_API fpaug_status fpaug_shifted_patch(const fpaug_image* img, int32_t center_x,
                                           int32_t center_y, int32_t patch_width,
                                           int32_t patch_height, int32_t dx, int32_t dy,
                                           fpaug_image** out);
FPAUG_API fpaug_status fpaug_stretch(const fpaug_image* img, int32_t t_min, int32_t t_max,
                                     fpaug_image** out);
FPAUG_API fpaug_status fpaug_equalize(const fpaug_image* img, int32_t q0, int32_t qk,
                                      fpaug_image** out);
FPAUG_API fpaug_status fpaug_uniform_noise(const fpaug_image* img, int32_t a, int32_t b,
                                           uint64_t seed, fpaug_image** out);
/* applied and painted_pixels may be NULL. */
FPAUG_API fpaug_status fpaug_random_area_noise(const fpaug_image* img, int32_t window,
                                               int32_t dense_threshold,
                                               int32_t circle_diameter, int32_t circle_count,
                                               uint64_t seed, fpaug_image** out,
                                               int* applied, uint64_t* painted_pixels);

/* Augmentation chains, as JSON arrays in the manifest "chain" format.
 * ops is a '+'-joined list: rotate, shift, stretch, equalize, uniform-noise,
 * area-noise. */
FPAUG_API fpaug_status fpaug_chain_sample(const char* ops, const fpaug_region* base,
                                          int32_t base_angle, uint64_t seed,
                                          char** chain_json);
/* noise_applied (may be NULL) is 0 when some noise op in the chain was a
 * no-op, 1 otherwise. */
FPAUG_API fpaug_status fpaug_chain_apply(const fpaug_image* src, const char* chain_json,
                                         uint64_t item_seed, fpaug_image** out,
                                         int* noise_applied);

/* --------------------------------------------------------------- alignment */

typedef struct fpaug_align_params {
  int32_t coarse_stride;
  int32_t refine_radius;
  const int32_t* angles; /* borrowed for the duration of the call */
  size_t angle_count;
  double accept_threshold;
} fpaug_align_params;

FPAUG_API void fpaug_align_params_default(fpaug_align_params* params);

FPAUG_API fpaug_status fpaug_ncc(const fpaug_image* a, const fpaug_image* b, double* out);

/* reference_patch is the normalized reference area; its size sets the patch
 * size. Any out pointer may be NULL. */
FPAUG_API fpaug_status fpaug_align(const fpaug_image* extra,
                                   const fpaug_image* reference_patch,
                                   const fpaug_align_params* params, fpaug_region* region,
                                   int32_t* angle, double* score, int* accepted);

/* ----------------------------------------------------------------- dataset */

typedef struct fpaug_build_config {
  const char* input_dir;
  const char* output_dir;
  const char* preset;    /* dataset1 | dataset2 | dataset3, used when plan_file is NULL */
  const char* plan_file; /* JSON plan, optional */
  int32_t patch_width;
  int32_t patch_height;
  uint64_t seed;
  uint64_t verify_count;
  int32_t jobs;
  fpaug_align_params align;
} fpaug_build_config;

typedef struct fpaug_build_summary {
  uint64_t fingers;
  uint64_t source_images;
  uint64_t skipped_files;
  uint64_t references;
  uint64_t accepted_extras;
  uint64_t rejected_extras;
  uint64_t failed_images;
  uint64_t outputs;
  uint64_t train;
  uint64_t verify;
  int32_t per_image_count;
  int32_t per_image_noisy;
  int32_t per_image_random_area;
} fpaug_build_summary;

FPAUG_API void fpaug_build_config_default(fpaug_build_config* config);
FPAUG_API fpaug_status fpaug_build(const fpaug_build_config* config,
                                   fpaug_build_summary* summary);

/* Validates an output directory. report (may be NULL) receives the text
 * report; violations receives the violation count. */
FPAUG_API fpaug_status fpaug_validate(const char* output_dir, uint32_t replay_checks,
                                      uint64_t seed, char** report, uint64_t* violations);

FPAUG_API fpaug_status fpaug_preset_output_count(const char* preset, uint64_t source_images,
                                                 uint64_t* total);

#ifdef __cplusplus
}
#endif

#endif /* FPAUG_FPAUG_H */
