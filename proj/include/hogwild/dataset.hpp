#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hogwild/rng.hpp"
#include "hogwild/vectors.hpp"

namespace hogwild {

struct Sample {
  SparseVector features;
  double label = 0.0;
};

// Immutable after build(); coordinate_counts[j] is the number of samples
// whose feature support contains coordinate j.
struct Dataset {
  std::vector<Sample> samples;
  Index dimension = 0;
  std::vector<std::int64_t> coordinate_counts;

  std::size_t n() const { return samples.size(); }
  Index d() const { return dimension; }

  static Dataset build(std::vector<Sample> samples, Index dimension) {
    if (samples.empty()) throw std::invalid_argument("dataset: n must be >= 1");
    if (dimension < 1) throw std::invalid_argument("dataset: d must be >= 1");
    Dataset ds;
    ds.samples = std::move(samples);
    ds.dimension = dimension;
    ds.coordinate_counts.assign(static_cast<std::size_t>(dimension), 0);
    for (const Sample& s : ds.samples) {
      s.features.validate(dimension);
      for (Index j : s.features.indices) {
        ++ds.coordinate_counts[static_cast<std::size_t>(j)];
      }
    }
    return ds;
  }
};

// Seeded subsample without replacement (partial Fisher-Yates); preserves
// nothing about row order beyond the rng's choices.
inline Dataset subsample(const Dataset& ds, std::size_t rows,
                         std::uint64_t seed) {
  if (rows == 0 || rows > ds.n()) {
    throw std::invalid_argument("subsample: rows must be in [1, n]");
  }
  std::vector<std::size_t> order(ds.n());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(mix_seed(seed, kStreamData));
  std::vector<Sample> picked;
  picked.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t j = i + rng.next_index(order.size() - i);
    std::swap(order[i], order[j]);
    picked.push_back(ds.samples[order[i]]);
  }
  return Dataset::build(std::move(picked), ds.dimension);
}

// Scales every non-empty sample to unit Euclidean norm.
inline Dataset normalize_l2(const Dataset& ds) {
  std::vector<Sample> out = ds.samples;
  for (Sample& s : out) {
    const double nrm = std::sqrt(norm_sq(s.features));
    if (nrm > 0.0) {
      for (double& v : s.features.values) v /= nrm;
    }
  }
  return Dataset::build(std::move(out), ds.dimension);
}

// FNV-1a over a canonical byte serialization; stable fingerprint for manifests.
inline std::uint64_t fingerprint(const Dataset& ds) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto eat = [&h](const void* p, std::size_t len) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::uint64_t n = ds.n();
  eat(&n, sizeof n);
  eat(&ds.dimension, sizeof ds.dimension);
  for (const Sample& s : ds.samples) {
    eat(&s.label, sizeof s.label);
    const std::uint64_t nnz = s.features.nnz();
    eat(&nnz, sizeof nnz);
    eat(s.features.indices.data(), nnz * sizeof(Index));
    eat(s.features.values.data(), nnz * sizeof(double));
  }
  return h;
}

}  // namespace hogwild
