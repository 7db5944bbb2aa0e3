#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "augment_chain.hpp"
#include "fingerprint_area.hpp"
#include "region_align.hpp"

namespace fpaug {

struct Impression {
  int id = 0;
  std::filesystem::path path;
};

struct SourceDatabase {
  std::map<int, std::vector<Impression>> fingers;  // impressions sorted by id
  std::vector<std::string> skipped;                // malformed file names

  std::size_t image_count() const noexcept;
};

/// Groups `<finger>_<impression>.<ext>` raster files. Other names are
/// skipped with a warning. Throws EmptyDatabase when nothing qualifies.
SourceDatabase scan_database(const std::filesystem::path& dir);

/// Lowest impression id.
const Impression& select_reference(const std::vector<Impression>& group);

/// Buckets of a per-image augmentation plan.
enum class MixKind {
  Rotation,
  Shift,
  Stretch,
  Equalize,
  Combined,
  UniformNoise,
  RandomAreaNoise,
};
inline constexpr std::size_t kMixKinds = 7;
std::string_view mix_key(MixKind kind) noexcept;

struct AugmentPlan {
  std::string name = "custom";
  int per_image_count = 0;
  std::array<int, kMixKinds> mix{};
  /// Op sequences cycled through by combined items. When non-empty, noise
  /// items also start from the cycled chain before adding their noise.
  std::vector<std::vector<OpKind>> combine_chains;
  double noise_fraction_max = 0.30;
  double random_area_share = 0.60;

  int count(MixKind kind) const noexcept { return mix[static_cast<std::size_t>(kind)]; }
  int noisy_count() const noexcept;
  int random_area_count() const noexcept { return count(MixKind::RandomAreaNoise); }

  /// Checks the bucket sum and the random-area share. With
  /// enforce_noise_cap the noisy fraction must also stay within
  /// noise_fraction_max plus one item of slack.
  void validate(bool enforce_noise_cap) const;

  /// Op list of every augment index, in emission order.
  std::vector<std::vector<OpKind>> item_ops() const;

  nlohmann::json to_json() const;
  static AugmentPlan from_json(const nlohmann::json& j);
};

/// dataset1 | dataset2 | dataset3. Throws UnknownPreset.
AugmentPlan preset_plan(std::string_view name);

/// Number of patches a plan yields from `source_images` accepted images.
std::uint64_t expected_output_count(const AugmentPlan& plan, std::uint64_t source_images);

enum class Split { Train, Verify };

struct ManifestEntry {
  std::string output_file;
  int finger_id = 0;
  int impression_id = 0;
  int sequence = 0;
  std::string source_file;
  TransformChain chain;
  std::vector<bool> noise_applied;
  std::uint64_t item_seed = 0;
  Split split = Split::Train;

  nlohmann::json to_json() const;
  static ManifestEntry from_json(const nlohmann::json& j);
};

using Manifest = std::vector<ManifestEntry>;

void write_manifest(const Manifest& m, const std::filesystem::path& path);
Manifest read_manifest(const std::filesystem::path& path);

struct Rejection {
  int finger_id = 0;
  int impression_id = 0;
  double best_score = 0.0;
};

struct Failure {
  int finger_id = 0;
  int impression_id = 0;
  std::string reason;
};

struct BuildConfig {
  PatchSpec spec;
  AlignSearchParams align;
  std::uint64_t seed = 20220101;
  int jobs = 1;
  std::filesystem::path outdir;
};

struct BuildResult {
  Manifest manifest;  // sorted by (finger_id, sequence)
  std::vector<Rejection> rejections;
  std::vector<Failure> failures;
  std::size_t fingers = 0;
  std::size_t references = 0;
  std::size_t accepted_extras = 0;
};

/// Per-item seed: stable hash of (seed, finger, impression, augment index).
std::uint64_t item_seed(std::uint64_t seed, int finger_id, int impression_id, int index);

/// Runs the whole pipeline and writes patches, manifest.jsonl (all train),
/// plan.json and rejections.log into config.outdir. Per-image failures are
/// logged and skipped. Output bytes do not depend on config.jobs.
BuildResult build_dataset(const SourceDatabase& db, const AugmentPlan& plan,
                          const BuildConfig& config);

/// Labels `verify_count` entries as verify, never all entries of a finger.
/// Throws VerifyCountTooLarge.
Manifest split_train_verify(Manifest manifest, std::size_t verify_count, std::uint64_t seed);

struct FingerComposition {
  int finger_id = 0;
  std::size_t images = 0;
  std::size_t outputs = 0;
  std::size_t noisy = 0;
  std::size_t random_area = 0;
  std::size_t verify = 0;
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<FingerComposition> fingers;
  std::size_t entries = 0;
  std::size_t train = 0;
  std::size_t verify = 0;
  std::size_t replayed = 0;
  int per_image_noisy = 0;       // from the plan
  int per_image_random_area = 0;
  int per_image_count = 0;

  bool ok() const noexcept { return violations.empty(); }
  std::string to_text() const;
};

struct ValidateOptions {
  std::size_t replay_checks = 20;
  std::uint64_t seed = 1;
};

/// Checks names, patch sizes, manifest/file agreement, plan composition and
/// replays a sample of chains. Violations are reported, never thrown.
ValidationReport validate_dataset(const std::filesystem::path& outdir, const Manifest& manifest,
                                  const AugmentPlan& plan, const ValidateOptions& opts = {});

/// Reads manifest.jsonl and plan.json from `outdir`; throws IoFailure when
/// either is missing.
ValidationReport validate_output_dir(const std::filesystem::path& outdir,
                                     const ValidateOptions& opts = {});

}  // namespace fpaug
