#include "augment_chain.hpp"

#include "error.hpp"

namespace fpaug {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

int wrap_degrees(int a) {
  a %= 360;
  return a < 0 ? a + 360 : a;
}

}  // namespace

std::string_view op_name(OpKind kind) noexcept {
  switch (kind) {
    case OpKind::Rotate: return "rotate";
    case OpKind::Shift: return "shift";
    case OpKind::Stretch: return "stretch";
    case OpKind::Equalize: return "equalize";
    case OpKind::UniformNoise: return "uniform-noise";
    case OpKind::AreaNoise: return "area-noise";
  }
  return "?";
}

OpKind parse_op_kind(std::string_view name) {
  for (OpKind k : {OpKind::Rotate, OpKind::Shift, OpKind::Stretch, OpKind::Equalize,
                   OpKind::UniformNoise, OpKind::AreaNoise})
    if (op_name(k) == name) return k;
  throw Error(ErrorCode::InvalidArgument, "unknown augmentation op '" + std::string(name) + "'");
}

std::vector<OpKind> parse_op_list(std::string_view spec) {
  std::vector<OpKind> kinds;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t end = std::min(spec.find('+', start), spec.size());
    kinds.push_back(parse_op_kind(spec.substr(start, end - start)));
    start = end + 1;
  }
  return kinds;
}

bool is_noise(OpKind kind) noexcept {
  return kind == OpKind::UniformNoise || kind == OpKind::AreaNoise;
}

OpKind kind_of(const ChainOp& op) noexcept {
  return std::visit(overloaded{
                        [](const RotationAugment&) { return OpKind::Rotate; },
                        [](const ShiftAugment&) { return OpKind::Shift; },
                        [](const StretchParams&) { return OpKind::Stretch; },
                        [](const EqualizeParams&) { return OpKind::Equalize; },
                        [](const UniformNoiseParams&) { return OpKind::UniformNoise; },
                        [](const RandomAreaNoiseParams&) { return OpKind::AreaNoise; },
                    },
                    op);
}

TransformChain sample_chain(std::span<const OpKind> kinds, const Region& base,
                            int base_angle, Rng& rng) {
  const PatchSpec spec(base.w, base.h);
  TransformChain chain{base, wrap_degrees(base_angle), {}};
  for (OpKind k : kinds) {
    switch (k) {
      case OpKind::Rotate: chain.ops.emplace_back(sample_rotation(rng)); break;
      case OpKind::Shift: chain.ops.emplace_back(sample_shift(spec, rng)); break;
      case OpKind::Stretch: chain.ops.emplace_back(sample_stretch(rng)); break;
      case OpKind::Equalize: chain.ops.emplace_back(EqualizeParams{}); break;
      case OpKind::UniformNoise: chain.ops.emplace_back(UniformNoiseParams{}); break;
      case OpKind::AreaNoise: chain.ops.emplace_back(RandomAreaNoiseParams{}); break;
    }
  }
  return chain;
}

ChainResult apply_chain(const GrayImage& src, const TransformChain& chain,
                        std::uint64_t item_seed) {
  const PatchSpec spec(chain.base.w, chain.base.h);
  Point center = region_center(chain.base);
  int angle = chain.base_angle;
  for (const ChainOp& op : chain.ops) {
    if (const auto* r = std::get_if<RotationAugment>(&op)) angle += r->angle;
    if (const auto* s = std::get_if<ShiftAugment>(&op)) {
      center.x += s->dx;
      center.y += s->dy;
    }
  }
  angle = wrap_degrees(angle);

  ChainResult result{angle == 0 ? shifted_patch(src, center, spec, {})
                                : rotated_patch(src, center, spec, RotationAugment{angle}),
                     {}};

  for (std::size_t i = 0; i < chain.ops.size(); ++i) {
    const ChainOp& op = chain.ops[i];
    std::visit(overloaded{
                   [](const RotationAugment&) {},
                   [](const ShiftAugment&) {},
                   [&](const StretchParams& p) { result.image = stretch(result.image, p); },
                   [&](const EqualizeParams& p) { result.image = equalize(result.image, p); },
                   [&](const UniformNoiseParams& p) {
                     Rng rng(stable_hash({item_seed, i}));
                     result.image = add_uniform_noise(result.image, p, rng);
                     result.noise_applied.push_back(p.a != 0 || p.b != 0);
                   },
                   [&](const RandomAreaNoiseParams& p) {
                     Rng rng(stable_hash({item_seed, i}));
                     NoiseOutcome o = random_area_noise(result.image, p, rng);
                     result.image = std::move(o.image);
                     result.noise_applied.push_back(o.applied);
                   },
               },
               op);
  }
  return result;
}

nlohmann::json chain_to_json(const TransformChain& chain) {
  using nlohmann::json;
  json ops = json::array();
  ops.push_back({{"op", "extract"},
                 {"x", chain.base.x},
                 {"y", chain.base.y},
                 {"w", chain.base.w},
                 {"h", chain.base.h},
                 {"angle", chain.base_angle}});
  for (const ChainOp& op : chain.ops) {
    json j = std::visit(
        overloaded{
            [](const RotationAugment& r) { return json{{"angle", r.angle}}; },
            [](const ShiftAugment& s) { return json{{"dx", s.dx}, {"dy", s.dy}}; },
            [](const StretchParams& p) { return json{{"t_min", p.t_min}, {"t_max", p.t_max}}; },
            [](const EqualizeParams& p) { return json{{"q0", p.q0}, {"qk", p.qk}}; },
            [](const UniformNoiseParams& p) { return json{{"a", p.a}, {"b", p.b}}; },
            [](const RandomAreaNoiseParams& p) {
              return json{{"window", p.window},
                          {"threshold", p.dense_threshold},
                          {"diameter", p.circle_diameter},
                          {"circles", p.circle_count}};
            },
        },
        op);
    j["op"] = std::string(op_name(kind_of(op)));
    ops.push_back(std::move(j));
  }
  return ops;
}

TransformChain chain_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_array() || j.empty() || j.front().at("op") != "extract")
      throw Error(ErrorCode::InvalidArgument, "chain must start with an extract op");
    const auto& e = j.front();
    TransformChain chain;
    chain.base = {e.at("x").get<int>(), e.at("y").get<int>(), e.at("w").get<int>(),
                  e.at("h").get<int>()};
    chain.base_angle = e.value("angle", 0);
    for (std::size_t i = 1; i < j.size(); ++i) {
      const auto& o = j[i];
      switch (parse_op_kind(o.at("op").get<std::string>())) {
        case OpKind::Rotate:
          chain.ops.emplace_back(RotationAugment{o.at("angle").get<int>()});
          break;
        case OpKind::Shift:
          chain.ops.emplace_back(ShiftAugment{o.at("dx").get<int>(), o.at("dy").get<int>()});
          break;
        case OpKind::Stretch:
          chain.ops.emplace_back(StretchParams{o.at("t_min").get<int>(), o.at("t_max").get<int>()});
          break;
        case OpKind::Equalize:
          chain.ops.emplace_back(EqualizeParams{o.at("q0").get<int>(), o.at("qk").get<int>()});
          break;
        case OpKind::UniformNoise:
          chain.ops.emplace_back(UniformNoiseParams{o.at("a").get<int>(), o.at("b").get<int>()});
          break;
        case OpKind::AreaNoise:
          chain.ops.emplace_back(RandomAreaNoiseParams{
              o.at("window").get<int>(), o.at("threshold").get<int>(),
              o.at("diameter").get<int>(), o.at("circles").get<int>()});
          break;
      }
    }
    return chain;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed chain: ") + ex.what());
  }
}

}  // namespace fpaug
