#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ism {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a root seed and a stream index
/// (splitmix64 of root ^ golden-ratio-scaled index). Used to split episode,
/// sequence and history streams so that parallel loops stay deterministic.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

inline Rng make_stream(std::uint64_t root, std::uint64_t index) {
  return Rng(derive_seed(root, index));
}

/// Draws an index from a discrete distribution given by `weights` (need not
/// be normalized). Falls back to the last positive entry on round-off.
std::size_t sample_index(std::span<const double> weights, Rng& rng);

/// Uniform draw from the probability simplex (Dirichlet(1,...,1)).
std::vector<double> sample_simplex(std::size_t n, Rng& rng);

}  // namespace ism
