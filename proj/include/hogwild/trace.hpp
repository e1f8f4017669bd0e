#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hogwild {

struct Checkpoint {
  std::int64_t t = 0;
  double t_prime = 0.0;  // t * padded_support / D
  double objective_gap = 0.0;
  double squared_distance = 0.0;
};

// Ordered key-value run description; enough to reproduce a sequential run
// bit-exactly. Serialized as "key = value" lines.
using Manifest = std::vector<std::pair<std::string, std::string>>;

inline void manifest_set(Manifest& m, const std::string& key,
                         std::string value) {
  for (auto& kv : m) {
    if (kv.first == key) {
      kv.second = std::move(value);
      return;
    }
  }
  m.emplace_back(key, std::move(value));
}

inline const std::string* manifest_find(const Manifest& m,
                                        const std::string& key) {
  for (const auto& kv : m) {
    if (kv.first == key) return &kv.second;
  }
  return nullptr;
}

inline const std::string& manifest_get(const Manifest& m,
                                       const std::string& key) {
  const std::string* v = manifest_find(m, key);
  if (!v) throw std::runtime_error("manifest: missing key '" + key + "'");
  return *v;
}

struct Trace {
  Manifest manifest;
  std::vector<Checkpoint> checkpoints;
  std::int64_t seed = -1;    // -1 marks a seed-averaged trace
  bool aggregated = false;
  std::int64_t observed_delay = 0;  // parallel engine only

  const Checkpoint& final_checkpoint() const {
    if (checkpoints.empty()) throw std::runtime_error("trace: empty");
    return checkpoints.back();
  }
};

// Checkpoint cadence. Geometric grids keep log-log slope fits
// well-conditioned; fixed stride is available for dense sampling.
struct CheckpointSpec {
  enum class Kind { geometric, every } kind = Kind::geometric;
  double ratio = 1.3;
  std::int64_t stride = 1;

  std::string to_string() const;
  static CheckpointSpec from_string(const std::string& s);
};

inline std::vector<std::int64_t> make_checkpoints(const CheckpointSpec& spec,
                                                  std::int64_t iterations) {
  if (iterations < 1) {
    throw std::invalid_argument("make_checkpoints: iterations < 1");
  }
  std::vector<std::int64_t> ts;
  ts.push_back(0);
  if (spec.kind == CheckpointSpec::Kind::geometric) {
    if (spec.ratio <= 1.0) {
      throw std::invalid_argument("make_checkpoints: ratio must be > 1");
    }
    double v = 1.0;
    while (true) {
      const auto t = static_cast<std::int64_t>(std::ceil(v));
      if (t >= iterations) break;
      if (t > ts.back()) ts.push_back(t);
      v *= spec.ratio;
    }
  } else {
    if (spec.stride < 1) {
      throw std::invalid_argument("make_checkpoints: stride must be >= 1");
    }
    for (std::int64_t t = spec.stride; t < iterations; t += spec.stride) {
      ts.push_back(t);
    }
  }
  ts.push_back(iterations);
  return ts;
}

// Mean of per-seed traces over a shared checkpoint grid.
inline Trace average_traces(const std::vector<Trace>& traces) {
  if (traces.empty()) throw std::invalid_argument("average_traces: no traces");
  Trace out;
  out.manifest = traces.front().manifest;
  out.aggregated = true;
  out.seed = -1;
  const std::size_t k = traces.front().checkpoints.size();
  for (const Trace& tr : traces) {
    if (tr.checkpoints.size() != k) {
      throw std::invalid_argument("average_traces: checkpoint grids differ");
    }
  }
  out.checkpoints.resize(k);
  const double inv = 1.0 / static_cast<double>(traces.size());
  for (std::size_t c = 0; c < k; ++c) {
    Checkpoint cp = traces.front().checkpoints[c];
    double gap = 0.0, dist = 0.0;
    for (const Trace& tr : traces) {
      if (tr.checkpoints[c].t != cp.t) {
        throw std::invalid_argument("average_traces: checkpoint grids differ");
      }
      gap += tr.checkpoints[c].objective_gap;
      dist += tr.checkpoints[c].squared_distance;
    }
    cp.objective_gap = gap * inv;
    cp.squared_distance = dist * inv;
    out.checkpoints[c] = cp;
  }
  return out;
}

inline std::string CheckpointSpec::to_string() const {
  if (kind == Kind::geometric) {
    return "geometric:" + std::to_string(ratio);
  }
  return "every:" + std::to_string(stride);
}

inline CheckpointSpec CheckpointSpec::from_string(const std::string& s) {
  CheckpointSpec spec;
  const auto colon = s.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument("checkpoint spec: expected kind:value");
  }
  const std::string kind = s.substr(0, colon);
  const std::string val = s.substr(colon + 1);
  if (kind == "geometric") {
    spec.kind = Kind::geometric;
    spec.ratio = std::stod(val);
  } else if (kind == "every") {
    spec.kind = Kind::every;
    spec.stride = std::stoll(val);
  } else {
    throw std::invalid_argument("checkpoint spec: unknown kind " + kind);
  }
  return spec;
}

}  // namespace hogwild
