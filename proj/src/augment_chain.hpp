#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fingerprint_area.hpp"
#include "geometric_augment.hpp"
#include "image_core.hpp"
#include "noise_augment.hpp"
#include "photometric_augment.hpp"
#include "random.hpp"

namespace fpaug {

enum class OpKind { Rotate, Shift, Stretch, Equalize, UniformNoise, AreaNoise };

/// CLI / manifest spelling: rotate, shift, stretch, equalize, uniform-noise,
/// area-noise.
std::string_view op_name(OpKind kind) noexcept;
OpKind parse_op_kind(std::string_view name);

/// Parses a `+`-joined chain such as "rotate+shift+stretch".
std::vector<OpKind> parse_op_list(std::string_view spec);

bool is_noise(OpKind kind) noexcept;

using ChainOp = std::variant<RotationAugment, ShiftAugment, StretchParams, EqualizeParams,
                             UniformNoiseParams, RandomAreaNoiseParams>;

OpKind kind_of(const ChainOp& op) noexcept;

/// A replayable recipe for one output patch: the base patch (region plus the
/// rotation that aligned it, 0 for reference images) and the augmentations.
/// Geometric ops act on the base before extraction, in any position; the
/// photometric and noise ops then run on the patch in order.
struct TransformChain {
  Region base;
  int base_angle = 0;
  std::vector<ChainOp> ops;
};

struct ChainResult {
  GrayImage image;
  std::vector<bool> noise_applied;  // one flag per noise op, in chain order
};

/// Draws parameters for each op kind from `rng`.
TransformChain sample_chain(std::span<const OpKind> kinds, const Region& base,
                            int base_angle, Rng& rng);

/// Executes the chain against the full source image. Noise ops draw from a
/// stream derived from (item_seed, op position), so replay needs only the
/// chain and the seed.
ChainResult apply_chain(const GrayImage& src, const TransformChain& chain,
                        std::uint64_t item_seed);

nlohmann::json chain_to_json(const TransformChain& chain);
TransformChain chain_from_json(const nlohmann::json& j);

}  // namespace fpaug
