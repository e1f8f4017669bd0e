#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hogwild/schedule.hpp"
#include "hogwild/vectors.hpp"

namespace hogwild {

// Which of the pending updates a read sees. Updates older than the delay
// window are always included; policies only govern the window itself.
enum class MaskPolicy { all_included, per_coordinate_bernoulli, none_included };

inline const char* to_string(MaskPolicy p) {
  switch (p) {
    case MaskPolicy::all_included: return "all_included";
    case MaskPolicy::per_coordinate_bernoulli: return "bernoulli";
    case MaskPolicy::none_included: return "none_included";
  }
  return "?";
}

inline MaskPolicy mask_policy_from_string(const std::string& s) {
  if (s == "all" || s == "all_included") return MaskPolicy::all_included;
  if (s == "bernoulli" || s == "per_coordinate_bernoulli") {
    return MaskPolicy::per_coordinate_bernoulli;
  }
  if (s == "none" || s == "none_included") return MaskPolicy::none_included;
  throw std::invalid_argument("unknown mask policy: " + s);
}

// Bounded-staleness model: a read at iteration t reflects every update
// through iteration t - tau(t) plus a masked subset of the last tau(t).
struct DelayModel {
  int tau = 0;
  bool growing = false;   // tau(t) = min(growth_cap, sqrt(t (1/ln t - 1/ln^2 t)))
  int growth_cap = 0;
  MaskPolicy mask_policy = MaskPolicy::per_coordinate_bernoulli;
  double mask_p = 0.5;

  std::int64_t delay_at(std::int64_t t) const {
    if (!growing) return tau;
    if (t <= 2) return 0;
    const double cap = tau_growth_cap(static_cast<double>(t));
    return std::min<std::int64_t>(growth_cap,
                                  static_cast<std::int64_t>(std::floor(cap)));
  }
};

// One applied update: the filter block chosen at iteration `iteration` and
// the full delta written to shared state (zero entries dropped).
struct UpdateRecord {
  std::int64_t iteration = 0;
  std::vector<Index> block;  // sorted coordinates of the chosen filter block
  SparseVector delta;
};

}  // namespace hogwild
