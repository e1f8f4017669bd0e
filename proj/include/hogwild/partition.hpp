#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hogwild/objective.hpp"
#include "hogwild/rng.hpp"

namespace hogwild {

// A-priori partition of each sample's gradient support into near-equal
// blocks. The blocks are fixed at build time; only the block choice u_t is
// random during a run. Per sample the block count is min(D, |support|) and
// block sizes differ by at most one.
class FilterPartition {
 public:
  struct Draw {
    std::span<const Index> block;
    int scale;  // block count of the drawn sample
  };

  static FilterPartition build(const Objective& obj, int num_blocks,
                               std::uint64_t seed) {
    if (num_blocks < 1) {
      throw std::invalid_argument("partition: D must be >= 1");
    }
    FilterPartition p;
    p.num_blocks_ = num_blocks;
    p.seed_ = seed;
    const std::size_t n = obj.n();
    p.coords_.resize(n);
    p.offsets_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<Index>& support = obj.sample_support(i);
      const std::size_t m = support.size();
      if (m == 0) {
        throw std::invalid_argument("partition: sample " + std::to_string(i) +
                                    " has empty gradient support");
      }
      std::vector<Index> shuffled = support;
      Rng rng(mix_seed(seed, mix_seed(kStreamPartition, i)));
      for (std::size_t k = m - 1; k > 0; --k) {
        std::swap(shuffled[k], shuffled[rng.next_index(k + 1)]);
      }
      const std::size_t blocks =
          std::min<std::size_t>(static_cast<std::size_t>(num_blocks), m);
      const std::size_t base = m / blocks;
      const std::size_t extra = m % blocks;  // first `extra` blocks get +1
      std::vector<std::uint32_t> offsets(blocks + 1);
      std::size_t pos = 0;
      for (std::size_t u = 0; u < blocks; ++u) {
        offsets[u] = static_cast<std::uint32_t>(pos);
        pos += base + (u < extra ? 1 : 0);
      }
      offsets[blocks] = static_cast<std::uint32_t>(pos);
      p.coords_[i] = std::move(shuffled);
      p.offsets_[i] = std::move(offsets);
    }
    return p;
  }

  int num_blocks_parameter() const { return num_blocks_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t sample_count() const { return coords_.size(); }

  int block_count(std::size_t i) const {
    return static_cast<int>(offsets_[i].size() - 1);
  }

  std::span<const Index> block(std::size_t i, int u) const {
    const auto& off = offsets_[i];
    return {coords_[i].data() + off[static_cast<std::size_t>(u)],
            coords_[i].data() + off[static_cast<std::size_t>(u) + 1]};
  }

  std::span<const Index> support(std::size_t i) const {
    return {coords_[i].data(), coords_[i].size()};
  }

  // Uniform block choice; consumes no rng draw when the sample has a single
  // block, so D = 1 runs share their draw sequence with plain SGD.
  Draw sample_filter(std::size_t i, Rng& rng) const {
    const int k = block_count(i);
    const int u = k == 1 ? 0 : static_cast<int>(rng.next_index(
                                   static_cast<std::size_t>(k)));
    return {block(i, u), k};
  }

 private:
  int num_blocks_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<std::vector<Index>> coords_;          // shuffled support
  std::vector<std::vector<std::uint32_t>> offsets_;  // block boundaries
};

// Sparsity summary of a problem under block parameter D.
//   max_support_size:      largest gradient support over samples
//   padded_support:        D * mean(ceil(|support| / D)); upper-bounds the
//                          per-iteration coordinate updates times D
//   mean_support:          mean support size
//   collision_probability: max_j (samples touching j) / n
struct SparsityStats {
  std::int64_t max_support_size = 0;
  double padded_support = 0.0;
  double mean_support = 0.0;
  double collision_probability = 0.0;
  int block_parameter = 1;

  // Expected single-coordinate updates after t iterations (upper bound).
  double coordinate_updates(double t) const {
    return t * padded_support / static_cast<double>(block_parameter);
  }
};

inline SparsityStats sparsity_stats(const Objective& obj, int num_blocks) {
  if (num_blocks < 1) {
    throw std::invalid_argument("sparsity_stats: D must be >= 1");
  }
  SparsityStats st;
  st.block_parameter = num_blocks;
  const std::size_t n = obj.n();
  const double D = static_cast<double>(num_blocks);
  double ceil_sum = 0.0, size_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t m =
        static_cast<std::int64_t>(obj.sample_support(i).size());
    st.max_support_size = std::max(st.max_support_size, m);
    ceil_sum += static_cast<double>((m + num_blocks - 1) / num_blocks);
    size_sum += static_cast<double>(m);
  }
  st.padded_support = D * ceil_sum / static_cast<double>(n);
  st.mean_support = size_sum / static_cast<double>(n);
  if (obj.kind() == ObjectiveKind::toy_quadratic ||
      obj.regularization_mode() == RegularizationMode::dense) {
    st.collision_probability = 1.0;
  } else {
    std::int64_t max_count = 0;
    for (std::int64_t c : obj.dataset().coordinate_counts) {
      max_count = std::max(max_count, c);
    }
    st.collision_probability =
        static_cast<double>(max_count) / static_cast<double>(n);
  }
  return st;
}

}  // namespace hogwild
