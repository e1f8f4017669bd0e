#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hogwild/dataset.hpp"
#include "hogwild/rng.hpp"
#include "hogwild/trace.hpp"
#include "hogwild/vectors.hpp"

namespace hogwild {

// Shortest round-trip-exact decimal form.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& tok, const char* what) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end != tok.c_str() + tok.size() || tok.empty()) {
    throw std::invalid_argument(std::string(what) + ": not a number: '" + tok +
                                "'");
  }
  return v;
}

inline std::int64_t parse_int(const std::string& tok, const char* what) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size() || tok.empty()) {
    throw std::invalid_argument(std::string(what) + ": not an integer: '" +
                                tok + "'");
  }
  return v;
}

struct LibsvmParseResult {
  Dataset dataset;
  std::string label_rule;  // how raw labels were mapped to {-1, +1}
};

// LIBSVM text format: "label idx:val idx:val ..." with 1-based ascending
// indices. Blank lines and '#' comments are skipped. d is the largest index
// seen unless dimension_override raises it. Binary label sets other than
// {-1, +1} are remapped with max -> +1, min -> -1; the rule is recorded.
inline LibsvmParseResult parse_libsvm(std::istream& in,
                                      Index dimension_override = 0) {
  std::vector<Sample> samples;
  Index max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  std::set<double> labels_seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank
    Sample s;
    try {
      s.label = parse_double(tok, "label");
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("libsvm line " + std::to_string(line_no) +
                                  ": malformed label '" + tok + "'");
    }
    Index prev = 0;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos) {
        throw std::invalid_argument("libsvm line " + std::to_string(line_no) +
                                    ": expected idx:val, got '" + tok + "'");
      }
      std::int64_t idx;
      double val;
      try {
        idx = parse_int(tok.substr(0, colon), "index");
        val = parse_double(tok.substr(colon + 1), "value");
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("libsvm line " + std::to_string(line_no) +
                                    ": " + e.what());
      }
      if (idx < 1) {
        throw std::invalid_argument("libsvm line " + std::to_string(line_no) +
                                    ": indices are 1-based, got " +
                                    std::to_string(idx));
      }
      if (static_cast<Index>(idx) <= prev) {
        throw std::invalid_argument("libsvm line " + std::to_string(line_no) +
                                    ": non-ascending index " +
                                    std::to_string(idx));
      }
      prev = static_cast<Index>(idx);
      s.features.push_back(static_cast<Index>(idx - 1), val);
      max_index = std::max(max_index, static_cast<Index>(idx));
    }
    labels_seen.insert(s.label);
    samples.push_back(std::move(s));
  }
  if (samples.empty()) {
    throw std::invalid_argument("libsvm: no samples in stream");
  }
  Index d = max_index;
  if (dimension_override > 0) {
    if (dimension_override < max_index) {
      throw std::invalid_argument(
          "libsvm: dimension override below largest index seen");
    }
    d = dimension_override;
  }
  if (d < 1) d = 1;

  std::string rule = "none";
  const bool already_binary =
      std::all_of(labels_seen.begin(), labels_seen.end(),
                  [](double v) { return v == -1.0 || v == 1.0; });
  if (!already_binary && labels_seen.size() == 2) {
    const double lo = *labels_seen.begin();
    const double hi = *labels_seen.rbegin();
    for (Sample& s : samples) s.label = s.label == hi ? 1.0 : -1.0;
    rule = "map " + format_double(hi) + "->+1, " + format_double(lo) + "->-1";
  } else if (!already_binary) {
    rule = "none (raw labels)";
  }
  return {Dataset::build(std::move(samples), d), rule};
}

inline LibsvmParseResult parse_libsvm_file(const std::string& path,
                                           Index dimension_override = 0) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return parse_libsvm(in, dimension_override);
}

// Canonical writer: 1-based ascending indices, round-trip-exact values.
inline void write_libsvm(const Dataset& ds, std::ostream& out) {
  for (const Sample& s : ds.samples) {
    out << format_double(s.label);
    for (std::size_t k = 0; k < s.features.nnz(); ++k) {
      out << ' ' << (s.features.indices[k] + 1) << ':'
          << format_double(s.features.values[k]);
    }
    out << '\n';
  }
}

struct SyntheticSpec {
  std::int64_t n = 0;
  Index d = 0;
  Index support_size = 0;
  double noise_p = 0.0;
  std::uint64_t seed = 0;

  std::string to_string() const {
    return "n=" + std::to_string(n) + ",d=" + std::to_string(d) +
           ",s=" + std::to_string(support_size) +
           ",p=" + format_double(noise_p) + ",seed=" + std::to_string(seed);
  }

  static SyntheticSpec from_string(const std::string& text) {
    SyntheticSpec spec;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        throw std::invalid_argument("synthetic spec: expected key=value, got '" +
                                    item + "'");
      }
      const std::string key = item.substr(0, eq);
      const std::string val = item.substr(eq + 1);
      if (key == "n") spec.n = parse_int(val, "n");
      else if (key == "d") spec.d = static_cast<Index>(parse_int(val, "d"));
      else if (key == "s") spec.support_size = static_cast<Index>(parse_int(val, "s"));
      else if (key == "p") spec.noise_p = parse_double(val, "p");
      else if (key == "seed") spec.seed = static_cast<std::uint64_t>(parse_int(val, "seed"));
      else throw std::invalid_argument("synthetic spec: unknown key '" + key + "'");
    }
    return spec;
  }
};

// n samples with exactly s uniformly chosen support coordinates and
// standard-normal values; labels from a hidden unit-norm hyperplane, flipped
// with probability p. Deterministic per seed.
inline Dataset generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n < 1 || spec.d < 1 || spec.support_size < 1 ||
      spec.support_size > spec.d || spec.noise_p < 0.0 ||
      spec.noise_p >= 0.5) {
    throw std::invalid_argument("generate_synthetic: invalid spec (need "
                                "n,d >= 1, 1 <= s <= d, 0 <= p < 0.5)");
  }
  const std::size_t d = static_cast<std::size_t>(spec.d);
  Rng plane_rng(mix_seed(spec.seed, 0x9fa7e));
  DenseVector plane(d);
  double nrm = 0.0;
  for (double& v : plane) {
    v = plane_rng.next_normal();
    nrm += v * v;
  }
  nrm = std::sqrt(nrm);
  for (double& v : plane) v /= nrm;

  Rng rng(mix_seed(spec.seed, kStreamData));
  std::vector<Index> pool(d);
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(spec.n));
  for (std::int64_t i = 0; i < spec.n; ++i) {
    for (std::size_t j = 0; j < d; ++j) pool[j] = static_cast<Index>(j);
    const std::size_t s = static_cast<std::size_t>(spec.support_size);
    for (std::size_t k = 0; k < s; ++k) {
      std::swap(pool[k], pool[k + rng.next_index(d - k)]);
    }
    std::sort(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(s));
    Sample sample;
    double z = 0.0;
    for (std::size_t k = 0; k < s; ++k) {
      const double v = rng.next_normal();
      sample.features.push_back(pool[k], v);
      z += v * plane[static_cast<std::size_t>(pool[k])];
    }
    double label = z >= 0.0 ? 1.0 : -1.0;
    if (rng.next_double() < spec.noise_p) label = -label;
    sample.label = label;
    samples.push_back(std::move(sample));
  }
  return Dataset::build(std::move(samples), spec.d);
}

inline constexpr const char* kTraceHeader =
    "t,t_prime,objective_gap,squared_distance,seed";

inline void write_trace_csv(const Trace& trace, std::ostream& out) {
  if (trace.checkpoints.empty()) {
    throw std::invalid_argument("write_trace_csv: empty trace");
  }
  out << kTraceHeader << '\n';
  for (const Checkpoint& cp : trace.checkpoints) {
    out << cp.t << ',' << format_double(cp.t_prime) << ','
        << format_double(cp.objective_gap) << ','
        << format_double(cp.squared_distance) << ',' << trace.seed << '\n';
  }
}

inline void write_trace_csv_file(const Trace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  write_trace_csv(trace, out);
}

inline Trace read_trace_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) {
    throw std::runtime_error("trace csv: empty stream");
  }
  if (header != kTraceHeader) {
    // Name the first expected column that is absent.
    std::vector<std::string> have;
    std::stringstream hs(header);
    std::string col;
    while (std::getline(hs, col, ',')) have.push_back(col);
    std::stringstream es(kTraceHeader);
    while (std::getline(es, col, ',')) {
      if (std::find(have.begin(), have.end(), col) == have.end()) {
        throw std::runtime_error("trace csv: missing column '" + col + "'");
      }
    }
    throw std::runtime_error("trace csv: unexpected header '" + header + "'");
  }
  Trace trace;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string tok;
    std::vector<std::string> fields;
    while (std::getline(ls, tok, ',')) fields.push_back(tok);
    if (fields.size() != 5) {
      throw std::runtime_error("trace csv line " + std::to_string(line_no) +
                               ": expected 5 fields");
    }
    Checkpoint cp;
    cp.t = parse_int(fields[0], "t");
    cp.t_prime = parse_double(fields[1], "t_prime");
    cp.objective_gap = parse_double(fields[2], "objective_gap");
    cp.squared_distance = parse_double(fields[3], "squared_distance");
    trace.checkpoints.push_back(cp);
    trace.seed = parse_int(fields[4], "seed");
  }
  trace.aggregated = trace.seed == -1;
  return trace;
}

inline Trace read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  return read_trace_csv(in);
}

// Manifest document: one "key = value" line per entry, order preserved.
inline void write_manifest(const Manifest& m, std::ostream& out) {
  for (const auto& [key, value] : m) {
    out << key << " = " << value << '\n';
  }
}

inline void write_manifest_file(const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest file: " + path);
  write_manifest(m, out);
}

inline Manifest read_manifest(std::istream& in) {
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto sep = line.find(" = ");
    if (sep == std::string::npos) {
      throw std::runtime_error("manifest: malformed line '" + line + "'");
    }
    m.emplace_back(line.substr(0, sep), line.substr(sep + 3));
  }
  return m;
}

inline Manifest read_manifest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest file: " + path);
  return read_manifest(in);
}

}  // namespace hogwild
