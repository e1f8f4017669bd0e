#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace hogwild {

using Index = std::int32_t;
using DenseVector = std::vector<double>;

// Coordinate-sorted sparse vector. Indices strictly increasing; explicit
// zeros permitted but discouraged.
struct SparseVector {
  std::vector<Index> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }

  void push_back(Index i, double v) {
    indices.push_back(i);
    values.push_back(v);
  }

  double value_at(Index coord) const;
  void validate(Index dimension) const;
};

inline double SparseVector::value_at(Index coord) const {
  std::size_t lo = 0, hi = indices.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (indices[mid] < coord) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return (lo < indices.size() && indices[lo] == coord) ? values[lo] : 0.0;
}

inline void SparseVector::validate(Index dimension) const {
  if (indices.size() != values.size()) {
    throw std::invalid_argument("sparse vector: index/value length mismatch");
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] < 0 || indices[k] >= dimension) {
      throw std::out_of_range("sparse vector: index " +
                              std::to_string(indices[k]) + " outside [0, " +
                              std::to_string(dimension) + ")");
    }
    if (k > 0 && indices[k] <= indices[k - 1]) {
      throw std::invalid_argument("sparse vector: indices not strictly increasing");
    }
    if (!std::isfinite(values[k])) {
      throw std::invalid_argument("sparse vector: non-finite value");
    }
  }
}

inline double dot(const SparseVector& x, const DenseVector& w) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    s += x.values[k] * w[static_cast<std::size_t>(x.indices[k])];
  }
  return s;
}

// Sparse-sparse dot; both inputs coordinate-sorted.
inline double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() && j < b.indices.size()) {
    if (a.indices[i] < b.indices[j]) {
      ++i;
    } else if (a.indices[i] > b.indices[j]) {
      ++j;
    } else {
      s += a.values[i] * b.values[j];
      ++i;
      ++j;
    }
  }
  return s;
}

inline void add_scaled(DenseVector& w, const SparseVector& x, double coef) {
  for (std::size_t k = 0; k < x.indices.size(); ++k) {
    w[static_cast<std::size_t>(x.indices[k])] += coef * x.values[k];
  }
}

inline double norm_sq(const DenseVector& w) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

inline double norm_sq(const SparseVector& x) {
  double s = 0.0;
  for (double v : x.values) s += v * v;
  return s;
}

inline double distance_sq(const DenseVector& a, const DenseVector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline void check_dimension(const DenseVector& w, std::size_t d,
                            const char* where) {
  if (w.size() != d) {
    throw std::invalid_argument(std::string(where) + ": vector length " +
                                std::to_string(w.size()) + ", expected " +
                                std::to_string(d));
  }
}

}  // namespace hogwild
