#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mclab/chain.hpp"

namespace mclab {

/// Rows all equal to a fixed non-uniform law; X_i are i.i.d.
ChainModel gallery_iid(int size = 3);

/// Two-state flip chain with flip probability p; f = [1, -1].
/// Long-run variance (1-p)/p.
ChainModel gallery_two_state(double p = 0.3);

/// Circulant walk on a cycle: step +1 with probability p, -1 otherwise.
/// Normal for every p, non-reversible for p != 1/2.
ChainModel gallery_cycle_walk(int size = 5, double p = 0.8);

/// Nearest-neighbour chain with holding; reversible by detailed balance.
ChainModel gallery_birth_death(int size = 4);

/// Dense random kernel with full support; generically non-normal.
ChainModel gallery_random_dense(int size = 6, std::uint64_t seed = 1);

/// Deterministic rotation on two states, f = [1, -1]; periodic, zero
/// long-run variance. Not part of the default gallery.
ChainModel two_cycle();

struct GalleryEntry {
  std::string name;
  ChainModel chain;
};

/// The five named chains at default parameters.
std::vector<GalleryEntry> default_gallery();

/// CLI dispatcher. Throws Error on unknown name or invalid parameters.
ChainModel make_gallery_chain(const std::string& name, int size, double p, std::uint64_t seed);

}  // namespace mclab
