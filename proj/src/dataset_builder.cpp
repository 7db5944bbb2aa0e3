#include "dataset_builder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "log.hpp"

namespace fpaug {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------- database

std::size_t SourceDatabase::image_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [id, group] : fingers) n += group.size();
  return n;
}

SourceDatabase scan_database(const fs::path& dir) {
  static const std::regex kName(R"(^(\d+)_(\d+)\.(bmp|png|pgm|tif|tiff)$)",
                                std::regex::icase);
  std::error_code ec;
  if (!fs::is_directory(dir, ec))
    throw Error(ErrorCode::IoFailure, "cannot read database directory " + dir.string());

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir, ec))
    if (e.is_regular_file()) files.push_back(e.path());
  if (ec) throw Error(ErrorCode::IoFailure, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  SourceDatabase db;
  for (const auto& f : files) {
    const std::string name = f.filename().string();
    std::smatch m;
    int finger = -1, impression = -1;
    if (std::regex_match(name, m, kName)) {
      try {
        finger = std::stoi(m[1].str());
        impression = std::stoi(m[2].str());
      } catch (const std::exception&) {
        finger = -1;
      }
    }
    if (finger < 0 || impression < 0) {
      log::warn("skipping malformed file name " + name);
      db.skipped.push_back(name);
      continue;
    }
    auto& group = db.fingers[finger];
    const bool duplicate = std::any_of(group.begin(), group.end(),
                                       [&](const Impression& i) { return i.id == impression; });
    if (duplicate) {
      log::warn("skipping duplicate impression " + name);
      db.skipped.push_back(name);
      continue;
    }
    group.push_back({impression, fs::absolute(f)});
  }
  for (auto& [id, group] : db.fingers)
    std::sort(group.begin(), group.end(),
              [](const Impression& a, const Impression& b) { return a.id < b.id; });
  if (db.fingers.empty())
    throw Error(ErrorCode::EmptyDatabase, "no fingerprint images found in " + dir.string());
  return db;
}

const Impression& select_reference(const std::vector<Impression>& group) {
  if (group.empty()) throw Error(ErrorCode::InvalidArgument, "finger has no impressions");
  return *std::min_element(group.begin(), group.end(),
                           [](const Impression& a, const Impression& b) { return a.id < b.id; });
}

// ---------------------------------------------------------------- plans

std::string_view mix_key(MixKind kind) noexcept {
  switch (kind) {
    case MixKind::Rotation: return "rotation";
    case MixKind::Shift: return "shift";
    case MixKind::Stretch: return "stretch";
    case MixKind::Equalize: return "equalize";
    case MixKind::Combined: return "combined";
    case MixKind::UniformNoise: return "uniform_noise";
    case MixKind::RandomAreaNoise: return "random_area_noise";
  }
  return "?";
}

namespace {

constexpr std::array<MixKind, kMixKinds> kMixOrder = {
    MixKind::Rotation, MixKind::Shift,        MixKind::Stretch,        MixKind::Equalize,
    MixKind::Combined, MixKind::UniformNoise, MixKind::RandomAreaNoise,
};

void set_count(AugmentPlan& p, MixKind k, int n) { p.mix[static_cast<std::size_t>(k)] = n; }

}  // namespace

int AugmentPlan::noisy_count() const noexcept {
  return count(MixKind::UniformNoise) + count(MixKind::RandomAreaNoise);
}

void AugmentPlan::validate(bool enforce_noise_cap) const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InvalidPlan, why); };
  if (per_image_count < 1) fail("per_image_count must be positive");
  int sum = 0;
  for (int c : mix) {
    if (c < 0) fail("mix counts must be non-negative");
    sum += c;
  }
  if (sum != per_image_count)
    fail("mix counts sum to " + std::to_string(sum) + ", expected " +
         std::to_string(per_image_count));
  if (count(MixKind::Combined) > 0 && combine_chains.empty())
    fail("combined items need at least one combine chain");
  for (const auto& c : combine_chains)
    if (c.empty()) fail("empty combine chain");
  if (noise_fraction_max < 0.0 || noise_fraction_max > 1.0 || random_area_share < 0.0 ||
      random_area_share > 1.0)
    fail("noise ratios must lie in [0, 1]");
  const int noisy = noisy_count();
  const int expected_area = static_cast<int>(std::round(random_area_share * noisy));
  if (random_area_count() != expected_area)
    fail("random-area count " + std::to_string(random_area_count()) + " differs from round(" +
         std::to_string(random_area_share) + " * " + std::to_string(noisy) + ")");
  if (enforce_noise_cap &&
      noisy > static_cast<int>(std::floor(noise_fraction_max * per_image_count)) + 1)
    fail("noisy count " + std::to_string(noisy) + " of " + std::to_string(per_image_count) +
         " exceeds the noise fraction cap");
}

std::vector<std::vector<OpKind>> AugmentPlan::item_ops() const {
  std::vector<std::vector<OpKind>> items;
  items.reserve(static_cast<std::size_t>(per_image_count));
  std::size_t combined_k = 0, noisy_k = 0;
  for (MixKind kind : kMixOrder) {
    for (int i = 0; i < count(kind); ++i) {
      switch (kind) {
        case MixKind::Rotation: items.push_back({OpKind::Rotate}); break;
        case MixKind::Shift: items.push_back({OpKind::Shift}); break;
        case MixKind::Stretch: items.push_back({OpKind::Stretch}); break;
        case MixKind::Equalize: items.push_back({OpKind::Equalize}); break;
        case MixKind::Combined:
          items.push_back(combine_chains[combined_k++ % combine_chains.size()]);
          break;
        case MixKind::UniformNoise:
        case MixKind::RandomAreaNoise: {
          std::vector<OpKind> ops;
          if (!combine_chains.empty()) ops = combine_chains[noisy_k++ % combine_chains.size()];
          ops.push_back(kind == MixKind::UniformNoise ? OpKind::UniformNoise
                                                      : OpKind::AreaNoise);
          items.push_back(std::move(ops));
          break;
        }
      }
    }
  }
  return items;
}

json AugmentPlan::to_json() const {
  json m = json::object();
  for (MixKind k : kMixOrder) m[std::string(mix_key(k))] = count(k);
  json chains = json::array();
  for (const auto& c : combine_chains) {
    std::string s;
    for (OpKind k : c) s += (s.empty() ? "" : "+") + std::string(op_name(k));
    chains.push_back(s);
  }
  return {{"name", name},
          {"per_image_count", per_image_count},
          {"mix", m},
          {"combine_chains", chains},
          {"noise_fraction_max", noise_fraction_max},
          {"random_area_share", random_area_share}};
}

AugmentPlan AugmentPlan::from_json(const json& j) {
  try {
    AugmentPlan p;
    p.name = j.value("name", std::string("custom"));
    p.per_image_count = j.at("per_image_count").get<int>();
    const json& m = j.at("mix");
    for (auto it = m.begin(); it != m.end(); ++it) {
      const auto found = std::find_if(kMixOrder.begin(), kMixOrder.end(),
                                      [&](MixKind k) { return mix_key(k) == it.key(); });
      if (found == kMixOrder.end())
        throw Error(ErrorCode::InvalidPlan, "unknown mix kind '" + it.key() + "'");
      set_count(p, *found, it.value().get<int>());
    }
    for (const auto& c : j.value("combine_chains", json::array()))
      p.combine_chains.push_back(parse_op_list(c.get<std::string>()));
    p.noise_fraction_max = j.value("noise_fraction_max", 0.30);
    p.random_area_share = j.value("random_area_share", 0.60);
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidPlan, std::string("malformed plan: ") + e.what());
  }
}

AugmentPlan preset_plan(std::string_view name) {
  AugmentPlan p;
  p.name = std::string(name);
  const std::vector<std::vector<OpKind>> kCombined = {
      {OpKind::Rotate, OpKind::Shift},
      {OpKind::Rotate, OpKind::Stretch},
      {OpKind::Shift, OpKind::Equalize},
      {OpKind::Rotate, OpKind::Shift, OpKind::Stretch},
  };
  if (name == "dataset1") {
    // Single-op chains only; 10 of 50 noisy, 6 of those random-area.
    p.per_image_count = 50;
    set_count(p, MixKind::Rotation, 12);
    set_count(p, MixKind::Shift, 12);
    set_count(p, MixKind::Stretch, 8);
    set_count(p, MixKind::Equalize, 8);
    set_count(p, MixKind::UniformNoise, 4);
    set_count(p, MixKind::RandomAreaNoise, 6);
  } else if (name == "dataset2") {
    p.per_image_count = 30;
    set_count(p, MixKind::Combined, 30);
    p.combine_chains = kCombined;
  } else if (name == "dataset3") {
    p.per_image_count = 30;
    set_count(p, MixKind::Combined, 20);
    set_count(p, MixKind::UniformNoise, 4);
    set_count(p, MixKind::RandomAreaNoise, 6);
    p.combine_chains = kCombined;
  } else {
    throw Error(ErrorCode::UnknownPreset, "unknown preset '" + std::string(name) + "'");
  }
  return p;
}

std::uint64_t expected_output_count(const AugmentPlan& plan, std::uint64_t source_images) {
  return source_images * static_cast<std::uint64_t>(plan.per_image_count);
}

// ---------------------------------------------------------------- manifest

json ManifestEntry::to_json() const {
  json chain_json = chain_to_json(chain);
  // Record whether each noise op actually painted, next to its parameters.
  std::size_t noise_i = 0;
  for (std::size_t i = 1; i < chain_json.size(); ++i) {
    const std::string op = chain_json[i]["op"];
    if (op == "uniform-noise" || op == "area-noise") {
      if (noise_i < noise_applied.size()) chain_json[i]["applied"] = bool(noise_applied[noise_i]);
      ++noise_i;
    }
  }
  return {{"output_file", output_file},
          {"finger_id", finger_id},
          {"impression_id", impression_id},
          {"sequence", sequence},
          {"source_file", source_file},
          {"region", {{"x", chain.base.x}, {"y", chain.base.y}, {"w", chain.base.w}, {"h", chain.base.h}}},
          {"chain", chain_json},
          {"item_seed", item_seed},
          {"split", split == Split::Train ? "train" : "verify"}};
}

ManifestEntry ManifestEntry::from_json(const json& j) {
  try {
    ManifestEntry e;
    e.output_file = j.at("output_file").get<std::string>();
    e.finger_id = j.at("finger_id").get<int>();
    e.impression_id = j.at("impression_id").get<int>();
    e.sequence = j.at("sequence").get<int>();
    e.source_file = j.at("source_file").get<std::string>();
    e.chain = chain_from_json(j.at("chain"));
    for (const auto& op : j.at("chain"))
      if (op.contains("applied")) e.noise_applied.push_back(op["applied"].get<bool>());
    e.item_seed = j.at("item_seed").get<std::uint64_t>();
    const std::string split = j.at("split").get<std::string>();
    if (split == "train") e.split = Split::Train;
    else if (split == "verify") e.split = Split::Verify;
    else throw Error(ErrorCode::InvalidArgument, "unknown split '" + split + "'");
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed manifest entry: ") + ex.what());
  }
}

void write_manifest(const Manifest& m, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  for (const auto& e : m) out << e.to_json().dump() << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "write failed for " + path.string());
}

Manifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read manifest " + path.string());
  Manifest m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::InvalidArgument,
                  path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    m.push_back(ManifestEntry::from_json(j));
  }
  return m;
}

// ---------------------------------------------------------------- build

std::uint64_t item_seed(std::uint64_t seed, int finger_id, int impression_id, int index) {
  return stable_hash({seed, static_cast<std::uint64_t>(finger_id),
                      static_cast<std::uint64_t>(impression_id),
                      static_cast<std::uint64_t>(index)});
}

namespace {

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct ItemOutput {
  std::vector<ManifestEntry> entries;
  std::optional<Rejection> rejection;
  std::optional<Failure> failure;
};

std::vector<ManifestEntry> emit_augments(const GrayImage& src, const Impression& imp,
                                         int finger_id, const Region& base, int base_angle,
                                         const std::vector<std::vector<OpKind>>& items,
                                         const BuildConfig& config) {
  std::vector<ManifestEntry> out;
  out.reserve(items.size());
  const int n = static_cast<int>(items.size());
  for (int k = 0; k < n; ++k) {
    ManifestEntry e;
    e.finger_id = finger_id;
    e.impression_id = imp.id;
    e.sequence = imp.id * n + k;
    e.output_file = std::to_string(finger_id) + "_" + std::to_string(e.sequence) + ".bmp";
    e.source_file = imp.path.string();
    e.item_seed = item_seed(config.seed, finger_id, imp.id, k);
    Rng rng(e.item_seed);
    e.chain = sample_chain(items[static_cast<std::size_t>(k)], base, base_angle, rng);
    ChainResult r = apply_chain(src, e.chain, e.item_seed);
    e.noise_applied = std::move(r.noise_applied);
    save_image(r.image, config.outdir / e.output_file);
    out.push_back(std::move(e));
  }
  return out;
}

std::string format_score(double s) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(6);
  os << s;
  return os.str();
}

}  // namespace

BuildResult build_dataset(const SourceDatabase& db, const AugmentPlan& plan,
                          const BuildConfig& config) {
  plan.validate(false);
  config.align.validate();
  std::error_code ec;
  fs::create_directories(config.outdir, ec);
  if (!fs::is_directory(config.outdir))
    throw Error(ErrorCode::IoFailure, "cannot create output directory " + config.outdir.string());

  const auto items = plan.item_ops();
  std::vector<int> finger_ids;
  for (const auto& [id, group] : db.fingers) finger_ids.push_back(id);

  // Phase 1: one reference per finger.
  struct ReferenceState {
    std::optional<ReferenceTemplate> tmpl;
  };
  std::vector<ReferenceState> refs(finger_ids.size());
  std::vector<ItemOutput> ref_out(finger_ids.size());
  parallel_for(finger_ids.size(), config.jobs, [&](std::size_t i) {
    const int fid = finger_ids[i];
    const Impression& imp = select_reference(db.fingers.at(fid));
    try {
      const GrayImage src = load_image(imp.path);
      const ExtractedArea area = extract_fingerprint_area(src, config.spec);
      if (area.patch_exceeds_area)
        log::info("finger " + std::to_string(fid) +
                  ": patch is larger than the fingerprint area, using the image-clamped region");
      refs[i].tmpl = make_reference(src, area.patch, fid);
      ref_out[i].entries = emit_augments(src, imp, fid, area.patch, 0, items, config);
    } catch (const std::exception& e) {
      ref_out[i].failure = Failure{fid, imp.id, e.what()};
      log::warn("finger " + std::to_string(fid) + " reference " + std::to_string(imp.id) +
                " skipped: " + e.what());
    }
  });

  // Phase 2: every other impression, aligned against its finger's reference.
  struct ExtraJob {
    std::size_t finger_index;
    const Impression* imp;
  };
  std::vector<ExtraJob> extras;
  for (std::size_t i = 0; i < finger_ids.size(); ++i) {
    const auto& group = db.fingers.at(finger_ids[i]);
    const Impression& ref = select_reference(group);
    for (const auto& imp : group)
      if (imp.id != ref.id) extras.push_back({i, &imp});
  }
  std::vector<ItemOutput> extra_out(extras.size());
  parallel_for(extras.size(), config.jobs, [&](std::size_t j) {
    const ExtraJob& job = extras[j];
    const int fid = finger_ids[job.finger_index];
    const Impression& imp = *job.imp;
    const auto& tmpl = refs[job.finger_index].tmpl;
    if (!tmpl) {
      extra_out[j].failure = Failure{fid, imp.id, "finger has no usable reference"};
      return;
    }
    try {
      const GrayImage src = load_image(imp.path);
      const AlignOutcome a = best_matching_region(src, *tmpl, config.spec, config.align);
      if (!a.accepted) {
        extra_out[j].rejection = Rejection{fid, imp.id, a.best.score};
        log::info("finger " + std::to_string(fid) + " impression " + std::to_string(imp.id) +
                  " rejected, best score " + format_score(a.best.score));
        return;
      }
      extra_out[j].entries =
          emit_augments(src, imp, fid, a.best.region, a.best.angle, items, config);
    } catch (const std::exception& e) {
      extra_out[j].failure = Failure{fid, imp.id, e.what()};
      log::warn("finger " + std::to_string(fid) + " impression " + std::to_string(imp.id) +
                " skipped: " + e.what());
    }
  });

  BuildResult result;
  result.fingers = finger_ids.size();
  auto absorb = [&](ItemOutput& o, bool is_reference) {
    if (o.rejection) result.rejections.push_back(*o.rejection);
    if (o.failure) result.failures.push_back(*o.failure);
    if (!o.entries.empty()) {
      (is_reference ? result.references : result.accepted_extras) += 1;
      std::move(o.entries.begin(), o.entries.end(), std::back_inserter(result.manifest));
    }
  };
  for (auto& o : ref_out) absorb(o, true);
  for (auto& o : extra_out) absorb(o, false);

  std::sort(result.manifest.begin(), result.manifest.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) {
              return std::tie(a.finger_id, a.sequence) < std::tie(b.finger_id, b.sequence);
            });
  auto by_key = [](const auto& a, const auto& b) {
    return std::tie(a.finger_id, a.impression_id) < std::tie(b.finger_id, b.impression_id);
  };
  std::sort(result.rejections.begin(), result.rejections.end(), by_key);
  std::sort(result.failures.begin(), result.failures.end(), by_key);

  write_manifest(result.manifest, config.outdir / "manifest.jsonl");
  {
    std::ofstream plan_out(config.outdir / "plan.json", std::ios::trunc);
    plan_out << plan.to_json().dump(2) << '\n';
    if (!plan_out) throw Error(ErrorCode::IoFailure, "cannot write plan.json");
  }
  {
    std::ofstream rej(config.outdir / "rejections.log", std::ios::trunc);
    for (const auto& r : result.rejections)
      rej << r.finger_id << ' ' << r.impression_id << ' ' << format_score(r.best_score) << '\n';
    if (!rej) throw Error(ErrorCode::IoFailure, "cannot write rejections.log");
  }
  return result;
}

// ---------------------------------------------------------------- split

Manifest split_train_verify(Manifest manifest, std::size_t verify_count, std::uint64_t seed) {
  if (verify_count >= manifest.size())
    throw Error(ErrorCode::VerifyCountTooLarge,
                "verify count " + std::to_string(verify_count) + " must be below the " +
                    std::to_string(manifest.size()) + " entries");
  std::map<int, std::size_t> per_finger;
  for (auto& e : manifest) {
    e.split = Split::Train;
    ++per_finger[e.finger_id];
  }
  std::size_t capacity = 0;
  for (const auto& [id, n] : per_finger) capacity += n - 1;
  if (verify_count > capacity)
    throw Error(ErrorCode::VerifyCountTooLarge,
                "at most " + std::to_string(capacity) +
                    " entries can be held out while every finger keeps a train entry");

  std::vector<std::size_t> order(manifest.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(stable_hash({seed, 0x5b11u}));
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(rng.uniform_int(0, i - 1))]);

  std::map<int, std::size_t> held;
  std::size_t chosen = 0;
  for (std::size_t idx : order) {
    if (chosen == verify_count) break;
    auto& e = manifest[idx];
    if (held[e.finger_id] + 1 >= per_finger[e.finger_id]) continue;
    e.split = Split::Verify;
    ++held[e.finger_id];
    ++chosen;
  }
  return manifest;
}

// ---------------------------------------------------------------- validate

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  os << "entries " << entries << " (train " << train << ", verify " << verify << ")\n";
  os << "plan per image: outputs " << per_image_count << ", noisy " << per_image_noisy << "/"
     << per_image_count << ", random-area " << per_image_random_area << "/" << per_image_noisy
     << "\n";
  for (const auto& f : fingers) {
    os << "finger " << f.finger_id << ": images " << f.images << ", outputs " << f.outputs
       << ", noisy " << f.noisy << "/" << f.outputs << ", random-area " << f.random_area << "/"
       << f.noisy << ", verify " << f.verify << "\n";
  }
  os << "replayed " << replayed << " entries\n";
  os << "violations " << violations.size() << "\n";
  for (const auto& v : violations) os << "  " << v << "\n";
  return os.str();
}

ValidationReport validate_dataset(const fs::path& outdir, const Manifest& manifest,
                                  const AugmentPlan& plan, const ValidateOptions& opts) {
  static const std::regex kOutName(R"(^(\d+)_(\d+)\.bmp$)");
  ValidationReport rep;
  rep.entries = manifest.size();
  rep.per_image_count = plan.per_image_count;
  rep.per_image_noisy = plan.noisy_count();
  rep.per_image_random_area = plan.random_area_count();
  auto violation = [&](std::string v) { rep.violations.push_back(std::move(v)); };

  std::set<std::string> listed;
  std::map<std::pair<int, int>, std::array<std::size_t, 3>> per_image;  // total, noisy, area
  std::map<int, FingerComposition> per_finger;
  std::optional<std::pair<int, int>> patch_size;

  for (const auto& e : manifest) {
    (e.split == Split::Train ? rep.train : rep.verify) += 1;
    if (!listed.insert(e.output_file).second) violation("duplicate manifest entry: " + e.output_file);
    std::smatch m;
    if (!std::regex_match(e.output_file, m, kOutName)) {
      violation("bad file name: " + e.output_file);
    } else if (m[1].str() != std::to_string(e.finger_id) ||
               m[2].str() != std::to_string(e.sequence)) {
      violation("file name does not match finger/sequence: " + e.output_file);
    }

    if (!patch_size) patch_size = {e.chain.base.w, e.chain.base.h};
    else if (*patch_size != std::pair{e.chain.base.w, e.chain.base.h})
      violation("inconsistent patch size in manifest: " + e.output_file);

    const fs::path file = outdir / e.output_file;
    std::error_code ec;
    if (!fs::exists(file, ec)) {
      violation("missing file: " + e.output_file);
    } else {
      try {
        const GrayImage img = load_image(file);
        if (img.width() != e.chain.base.w || img.height() != e.chain.base.h)
          violation("wrong patch size: " + e.output_file);
      } catch (const std::exception& ex) {
        violation("unreadable file: " + e.output_file + " (" + ex.what() + ")");
      }
    }

    bool noisy = false, area = false;
    for (const ChainOp& op : e.chain.ops) {
      noisy = noisy || is_noise(kind_of(op));
      area = area || kind_of(op) == OpKind::AreaNoise;
    }
    auto& counts = per_image[{e.finger_id, e.impression_id}];
    counts[0] += 1;
    counts[1] += noisy ? 1 : 0;
    counts[2] += area ? 1 : 0;
    auto& f = per_finger[e.finger_id];
    f.finger_id = e.finger_id;
    f.outputs += 1;
    f.noisy += noisy ? 1 : 0;
    f.random_area += area ? 1 : 0;
    f.verify += e.split == Split::Verify ? 1 : 0;
  }

  std::error_code ec;
  for (const auto& d : fs::directory_iterator(outdir, ec)) {
    const std::string name = d.path().filename().string();
    if (d.is_regular_file() && d.path().extension() == ".bmp" && !listed.count(name))
      violation("file not in manifest: " + name);
  }
  if (ec) violation("cannot list output directory: " + ec.message());

  for (const auto& [key, c] : per_image) {
    const std::string who =
        "finger " + std::to_string(key.first) + " impression " + std::to_string(key.second);
    if (c[0] != static_cast<std::size_t>(plan.per_image_count))
      violation(who + ": " + std::to_string(c[0]) + " outputs, plan expects " +
                std::to_string(plan.per_image_count));
    if (c[1] != static_cast<std::size_t>(plan.noisy_count()))
      violation(who + ": " + std::to_string(c[1]) + " noisy outputs, plan expects " +
                std::to_string(plan.noisy_count()));
    if (c[2] != static_cast<std::size_t>(plan.random_area_count()))
      violation(who + ": " + std::to_string(c[2]) + " random-area outputs, plan expects " +
                std::to_string(plan.random_area_count()));
    per_finger[key.first].images += 1;
  }

  for (auto& [id, f] : per_finger) {
    // One item of rounding slack per source image.
    if (static_cast<double>(f.noisy) >
        plan.noise_fraction_max * static_cast<double>(f.outputs) + static_cast<double>(f.images))
      violation("finger " + std::to_string(id) + ": noisy fraction exceeds the plan cap");
    if (f.verify > 0 && f.verify == f.outputs)
      violation("finger " + std::to_string(id) + " appears only in the verify split");
    rep.fingers.push_back(f);
  }

  // Replay a seeded sample of entries from their chains.
  if (!manifest.empty() && opts.replay_checks > 0) {
    std::vector<std::size_t> idx(manifest.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Rng rng(stable_hash({opts.seed, 0x7e91u}));
    const std::size_t k = std::min(opts.replay_checks, idx.size());
    for (std::size_t i = 0; i < k; ++i)
      std::swap(idx[i], idx[static_cast<std::size_t>(rng.uniform_int(i, idx.size() - 1))]);
    for (std::size_t i = 0; i < k; ++i) {
      const auto& e = manifest[idx[i]];
      std::error_code exists_ec;
      if (!fs::exists(outdir / e.output_file, exists_ec)) continue;  // already reported
      try {
        const GrayImage src = load_image(e.source_file);
        const ChainResult r = apply_chain(src, e.chain, e.item_seed);
        const GrayImage stored = load_image(outdir / e.output_file);
        if (!(r.image == stored)) violation("replay mismatch: " + e.output_file);
      } catch (const std::exception& ex) {
        violation("replay failed: " + e.output_file + " (" + ex.what() + ")");
      }
      ++rep.replayed;
    }
  }
  return rep;
}

ValidationReport validate_output_dir(const fs::path& outdir, const ValidateOptions& opts) {
  const fs::path plan_path = outdir / "plan.json";
  std::ifstream in(plan_path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + plan_path.string());
  json pj;
  try {
    pj = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidPlan, "malformed plan.json: " + std::string(e.what()));
  }
  const AugmentPlan plan = AugmentPlan::from_json(pj);
  const Manifest manifest = read_manifest(outdir / "manifest.jsonl");
  return validate_dataset(outdir, manifest, plan, opts);
}

}  // namespace fpaug
