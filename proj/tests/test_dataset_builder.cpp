#include <doctest.h>

#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "dataset_builder.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace fpaug;
using testing::thrown_code;
namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> read_tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    out[e.path().filename().string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return out;
}

AugmentPlan five_plan() {
  AugmentPlan p;
  p.name = "five";
  p.per_image_count = 5;
  p.mix[static_cast<std::size_t>(MixKind::Rotation)] = 1;
  p.mix[static_cast<std::size_t>(MixKind::Shift)] = 1;
  p.mix[static_cast<std::size_t>(MixKind::Stretch)] = 1;
  p.mix[static_cast<std::size_t>(MixKind::Equalize)] = 1;
  p.mix[static_cast<std::size_t>(MixKind::RandomAreaNoise)] = 1;
  return p;
}

// Shared 4 x 3 database, written once.
const fs::path& small_db() {
  static const fs::path dir = [] {
    const fs::path d = testing::fresh_dir("builder_db");
    testing::write_database(d, 4, 3, 200, 200, 5);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("scan_database groups impressions") {
  const fs::path dir = testing::fresh_dir("scan");
  for (int i = 1; i <= 8; ++i) std::ofstream(dir / ("110_" + std::to_string(i) + ".tif")) << "x";
  std::ofstream(dir / "readme.txt") << "x";
  std::ofstream(dir / "110_x.tif") << "x";
  fs::create_directory(dir / "7_1.png");  // directories are ignored
  const SourceDatabase db = scan_database(dir);
  REQUIRE(db.fingers.size() == 1);
  const auto& group = db.fingers.at(110);
  REQUIRE(group.size() == 8);
  for (int i = 0; i < 8; ++i) CHECK(group[static_cast<std::size_t>(i)].id == i + 1);
  CHECK(db.image_count() == 8);
  CHECK(db.skipped.size() == 2);

  CHECK(thrown_code([] { scan_database(testing::fresh_dir("scan_empty")); }) ==
        ErrorCode::EmptyDatabase);
  CHECK(thrown_code([] { scan_database("/nonexistent/fpaug"); }) == ErrorCode::IoFailure);
}

TEST_CASE("select_reference takes the lowest impression") {
  const std::vector<Impression> g = {{3, "a"}, {1, "b"}, {7, "c"}};
  CHECK(select_reference(g).id == 1);
  CHECK(select_reference(g).id == 1);
  CHECK(select_reference({{4, "x"}}).id == 4);
  CHECK(thrown_code([] { select_reference({}); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("presets") {
  const AugmentPlan d1 = preset_plan("dataset1");
  const AugmentPlan d2 = preset_plan("dataset2");
  const AugmentPlan d3 = preset_plan("dataset3");
  CHECK(d1.per_image_count == 50);
  CHECK(d2.per_image_count == 30);
  CHECK(d3.per_image_count == 30);
  CHECK(d3.noisy_count() == 10);
  CHECK(d3.random_area_count() == 6);
  for (const auto& ops : d1.item_ops()) CHECK(ops.size() == 1);
  for (const auto& ops : d2.item_ops()) CHECK(ops.size() >= 2);
  for (const AugmentPlan* p : {&d1, &d2, &d3}) {
    CHECK_NOTHROW(p->validate(false));
    CHECK(p->item_ops().size() == static_cast<std::size_t>(p->per_image_count));
  }
  CHECK(expected_output_count(d1, 2720) == 136000);
  CHECK(expected_output_count(d2, 2720) == 81600);
  CHECK(expected_output_count(d3, 2720) == 81600);
  CHECK(thrown_code([] { preset_plan("dataset4"); }) == ErrorCode::UnknownPreset);

  const AugmentPlan back = AugmentPlan::from_json(d3.to_json());
  CHECK(back.mix == d3.mix);
  CHECK(back.combine_chains == d3.combine_chains);
}

TEST_CASE("plan validation") {
  AugmentPlan p = five_plan();
  CHECK_NOTHROW(p.validate(true));
  p.per_image_count = 6;
  CHECK(thrown_code([&] { p.validate(false); }) == ErrorCode::InvalidPlan);

  // 10 noisy of 20 exceeds 30% plus one item of slack.
  AugmentPlan noisy;
  noisy.per_image_count = 20;
  noisy.mix[static_cast<std::size_t>(MixKind::Rotation)] = 10;
  noisy.mix[static_cast<std::size_t>(MixKind::UniformNoise)] = 4;
  noisy.mix[static_cast<std::size_t>(MixKind::RandomAreaNoise)] = 6;
  CHECK_NOTHROW(noisy.validate(false));
  CHECK(thrown_code([&] { noisy.validate(true); }) == ErrorCode::InvalidPlan);

  AugmentPlan share = five_plan();
  share.mix[static_cast<std::size_t>(MixKind::RandomAreaNoise)] = 0;
  share.mix[static_cast<std::size_t>(MixKind::UniformNoise)] = 1;
  CHECK(thrown_code([&] { share.validate(false); }) == ErrorCode::InvalidPlan);

  CHECK(thrown_code([] { AugmentPlan::from_json(nlohmann::json::parse(R"({"mix":{}})")); }) ==
        ErrorCode::InvalidPlan);
  CHECK(thrown_code([] {
          AugmentPlan::from_json(nlohmann::json::parse(R"({"per_image_count":1,"mix":{"blur":1}})"));
        }) == ErrorCode::InvalidPlan);
}

TEST_CASE("item seeds are stable and distinct") {
  CHECK(item_seed(1, 2, 3, 4) == item_seed(1, 2, 3, 4));
  std::set<std::uint64_t> seen;
  for (int f = 0; f < 10; ++f)
    for (int i = 0; i < 10; ++i)
      for (int k = 0; k < 10; ++k) seen.insert(item_seed(20220101, f, i, k));
  CHECK(seen.size() == 1000);
}

TEST_CASE("build on a 4 x 3 database yields 60 patches") {
  BuildConfig cfg;
  cfg.outdir = testing::fresh_dir("build_small");
  const SourceDatabase db = scan_database(small_db());
  const BuildResult r = build_dataset(db, five_plan(), cfg);
  CHECK(r.fingers == 4);
  CHECK(r.references == 4);
  CHECK(r.accepted_extras == 8);
  CHECK(r.rejections.empty());
  CHECK(r.failures.empty());
  REQUIRE(r.manifest.size() == 60);
  for (const auto& e : r.manifest) {
    const GrayImage img = load_image(cfg.outdir / e.output_file);
    CHECK(img.width() == 128);
    CHECK(img.height() == 128);
    CHECK(e.sequence == e.impression_id * 5 + (e.sequence % 5));
  }
  CHECK(fs::exists(cfg.outdir / "plan.json"));
  CHECK(fs::file_size(cfg.outdir / "rejections.log") == 0);
  const Manifest m = read_manifest(cfg.outdir / "manifest.jsonl");
  REQUIRE(m.size() == 60);
  CHECK(m[7].to_json() == r.manifest[7].to_json());

  const ValidationReport rep = validate_output_dir(cfg.outdir, {60, 3});
  CHECK(rep.ok());
  CHECK(rep.replayed == 60);
  INFO(rep.to_text());
}

TEST_CASE("builds are deterministic across job counts") {
  const SourceDatabase db = scan_database(small_db());
  BuildConfig a, b;
  a.outdir = testing::fresh_dir("build_det_a");
  b.outdir = testing::fresh_dir("build_det_b");
  b.jobs = 3;
  build_dataset(db, five_plan(), a);
  build_dataset(db, five_plan(), b);
  const auto ta = read_tree(a.outdir), tb = read_tree(b.outdir);
  CHECK(ta.size() == 63);
  CHECK(ta == tb);

  BuildConfig c = a;
  c.outdir = testing::fresh_dir("build_det_c");
  c.seed = 7;
  build_dataset(db, five_plan(), c);
  CHECK_FALSE(read_tree(c.outdir) == ta);
}

TEST_CASE("a pure noise extra is rejected and logged") {
  const fs::path dir = testing::fresh_dir("build_noise_db");
  testing::write_database(dir, 2, 2, 200, 200, 6);
  Rng rng(4);
  const GrayImage noise = testing::random_image(200, 200, rng);
  fs::remove(dir / "2_2.png");
  save_image(noise, dir / "2_2.bmp");

  BuildConfig cfg;
  cfg.outdir = testing::fresh_dir("build_noise_out");
  const BuildResult r = build_dataset(scan_database(dir), five_plan(), cfg);
  CHECK(r.manifest.size() == 15);
  REQUIRE(r.rejections.size() == 1);
  CHECK(r.rejections[0].finger_id == 2);
  CHECK(r.rejections[0].impression_id == 2);
  for (const auto& e : r.manifest) CHECK_FALSE((e.finger_id == 2 && e.impression_id == 2));
  std::ifstream log(cfg.outdir / "rejections.log");
  std::string line;
  std::getline(log, line);
  CHECK(line.rfind("2 2 ", 0) == 0);
  CHECK(validate_output_dir(cfg.outdir).ok());
}

TEST_CASE("unreadable images are skipped, not fatal") {
  const fs::path dir = testing::fresh_dir("build_bad_db");
  testing::write_database(dir, 2, 2, 200, 200, 8);
  std::ofstream(dir / "1_2.png", std::ios::trunc) << "garbage";
  BuildConfig cfg;
  cfg.outdir = testing::fresh_dir("build_bad_out");
  const BuildResult r = build_dataset(scan_database(dir), five_plan(), cfg);
  CHECK(r.manifest.size() == 15);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].impression_id == 2);
}

TEST_CASE("split_train_verify") {
  Manifest m;
  for (int f = 1; f <= 4; ++f)
    for (int k = 0; k < 15; ++k) {
      ManifestEntry e;
      e.finger_id = f;
      e.sequence = k;
      m.push_back(e);
    }
  const Manifest s = split_train_verify(m, 10, 1);
  std::size_t verify = 0;
  for (const auto& e : s) verify += e.split == Split::Verify;
  CHECK(verify == 10);
  CHECK(split_train_verify(m, 10, 1)[17].split == s[17].split);
  CHECK(thrown_code([&] { split_train_verify(m, 60, 1); }) == ErrorCode::VerifyCountTooLarge);

  // 4 fingers of 15: at most 56 can be held out while each keeps one train entry.
  const Manifest most = split_train_verify(m, 56, 9);
  std::map<int, int> train;
  for (const auto& e : most) train[e.finger_id] += e.split == Split::Train;
  for (const auto& [f, n] : train) CHECK(n == 1);
  CHECK(thrown_code([&] { split_train_verify(m, 57, 1); }) == ErrorCode::VerifyCountTooLarge);
}

TEST_CASE("validate detects tampering") {
  BuildConfig cfg;
  cfg.outdir = testing::fresh_dir("build_tamper");
  const BuildResult r = build_dataset(scan_database(small_db()), preset_plan("dataset3"), cfg);
  REQUIRE(r.manifest.size() == 12 * 30);
  const ValidationReport fresh = validate_output_dir(cfg.outdir);
  CHECK(fresh.ok());
  CHECK(fresh.per_image_noisy == 10);
  CHECK(fresh.per_image_random_area == 6);
  for (const auto& f : fresh.fingers) {
    CHECK(f.noisy * 30 == f.outputs * 10);
    CHECK(f.random_area * 10 == f.noisy * 6);
  }

  fs::remove(cfg.outdir / r.manifest[5].output_file);
  ValidationReport deleted = validate_output_dir(cfg.outdir);
  REQUIRE(deleted.violations.size() == 1);
  CHECK(deleted.violations[0].find("missing file") != std::string::npos);

  fs::copy_file(cfg.outdir / r.manifest[6].output_file, cfg.outdir / "999_1.bmp");
  CHECK(validate_output_dir(cfg.outdir).violations.size() == 2);

  // Overwrite a patch with different bytes: replay of every entry catches it.
  fs::remove(cfg.outdir / "999_1.bmp");
  save_image(GrayImage(128, 128, 9), cfg.outdir / r.manifest[8].output_file);
  const ValidationReport swapped = validate_output_dir(cfg.outdir, {400, 1});
  bool mismatch = false;
  for (const auto& v : swapped.violations) mismatch |= v.find("replay mismatch") != std::string::npos;
  CHECK(mismatch);

  fs::remove(cfg.outdir / "manifest.jsonl");
  CHECK(thrown_code([&] { validate_output_dir(cfg.outdir); }) == ErrorCode::IoFailure);
}
