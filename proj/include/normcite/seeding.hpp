#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace normcite {

using Engine = std::mt19937_64;

/// SplitMix64 finaliser; used to derive well-separated seeds from coordinates.
std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over the bytes of a label. Stable across platforms, unlike std::hash.
std::uint64_t label_hash(std::string_view label);

/// Folds coordinates into a single seed: derive_seed(base, {a, b}) differs for
/// every ordered coordinate tuple with overwhelming probability.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> coords);

/// Engine for an independent substream (e.g. one bootstrap replicate).
Engine substream(std::uint64_t seed, std::uint64_t stream);

}  // namespace normcite
