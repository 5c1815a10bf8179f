#pragma once

// Random instance generators and independent reference computations used by
// the unit and acceptance suites. Nothing here calls the combination,
// coarsening or projection code under test unless stated.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "qmt/qmt.hpp"

namespace qmt::testing {

using Rng = std::mt19937_64;

inline std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Frame letters_frame(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back(std::string(1, static_cast<char>('a' + i)));
  }
  return Frame::make(labels);
}

/// Product frame {0,1}^3 with labels "xyz".
inline Frame cube_frame() {
  std::vector<std::string> labels;
  for (int v = 0; v < 8; ++v) {
    labels.push_back(std::string{char('0' + ((v >> 2) & 1)), char('0' + ((v >> 1) & 1)), char('0' + (v & 1))});
  }
  return Frame::make(labels);
}

/// Partition of the cube frame by the value of coordinate `axis` (0 = x).
inline Partition cube_axis(const Frame& cube, int axis) {
  Mask zero = 0;
  for (std::size_t i = 0; i < cube.size(); ++i) {
    if (cube.label(i)[static_cast<std::size_t>(axis)] == '0') {
      zero |= Mask{1} << i;
    }
  }
  return Partition::from_masks(cube, {zero, cube.all() & ~zero});
}

inline Partition random_partition(Rng& rng, const Frame& frame) {
  const std::size_t n = frame.size();
  const std::size_t k = uniform(rng, 1, n);
  std::vector<Mask> blocks(k, 0);
  for (std::size_t e = 0; e < n; ++e) {
    blocks[uniform(rng, 0, k - 1)] |= Mask{1} << e;
  }
  blocks.erase(std::remove(blocks.begin(), blocks.end(), Mask{0}), blocks.end());
  return Partition::from_masks(frame, std::move(blocks));
}

/// Random mass function with 1..max_focal distinct nonempty focal sets.
inline MassFunction random_mass(Rng& rng, const Frame& frame, std::size_t max_focal) {
  const std::size_t count = uniform(rng, 1, max_focal);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::map<Mask, double> raw;
  for (std::size_t i = 0; i < count; ++i) {
    const Mask s = uniform(rng, 1, frame.all());
    raw[s] += weight(rng);
  }
  double total = 0.0;
  for (const auto& [s, w] : raw) total += w;
  std::vector<FocalElement> focal;
  for (const auto& [s, w] : raw) focal.push_back({s, w / total});
  return MassFunction(frame, focal);
}

/// Random mass function on the full frame carried by p: focal sets are
/// unions of blocks.
inline MassFunction random_carried_mass(Rng& rng, const Partition& p, std::size_t max_focal) {
  const auto coarse = random_mass(rng, p.coarse_frame(), max_focal);
  std::vector<FocalElement> focal;
  for (const auto& f : coarse.focal()) focal.push_back({p.union_of(f.subset), f.mass});
  return MassFunction(p.frame(), focal);
}

/// Random labelled tree shape on n nodes (random Prüfer-like attachment).
inline std::vector<std::pair<std::size_t, std::size_t>> random_tree_edges(Rng& rng, std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t v = 1; v < n; ++v) edges.emplace_back(uniform(rng, 0, v - 1), v);
  return edges;
}

inline std::string node_name(std::size_t i) { return "n" + std::to_string(i); }

inline Network make_network(const Frame& frame, const std::vector<Partition>& parts,
                            const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<NodeSpec> nodes;
  for (std::size_t i = 0; i < parts.size(); ++i) nodes.push_back({node_name(i), parts[i]});
  std::vector<std::pair<NodeId, NodeId>> named;
  for (auto [a, b] : edges) named.emplace_back(node_name(a), node_name(b));
  return Network::build(frame, std::move(nodes), named);
}

inline Network random_tree(Rng& rng, const Frame& frame, std::size_t n) {
  std::vector<Partition> parts;
  for (std::size_t i = 0; i < n; ++i) parts.push_back(random_partition(rng, frame));
  return make_network(frame, parts, random_tree_edges(rng, n));
}

/// Draws random trees until one passes Markov validation.
inline Network random_markov_tree(Rng& rng, std::size_t frame_lo, std::size_t frame_hi, std::size_t nodes_lo,
                                  std::size_t nodes_hi) {
  for (;;) {
    const Frame frame = letters_frame(uniform(rng, frame_lo, frame_hi));
    auto net = random_tree(rng, frame, uniform(rng, nodes_lo, nodes_hi));
    if (validate_markov(net).valid) return net;
  }
}

inline oracle::EvidenceMap random_evidence(Rng& rng, const Network& net, std::size_t max_focal,
                                           std::size_t max_items = 1) {
  oracle::EvidenceMap ev;
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    const std::size_t items = uniform(rng, 0, max_items);
    for (std::size_t k = 0; k < items; ++k) {
      ev[net.id(i)].push_back(random_mass(rng, net.partition(i).coarse_frame(), max_focal));
    }
  }
  return ev;
}

// ---------------------------------------------------------------------------
// Independent reference routes.

/// Dempster's rule through commonality functions: Q(A) = Σ_{S ⊇ A} m(S),
/// Q₁₂ ∝ Q₁·Q₂ on nonempty A, then inversion over supersets. Returns the
/// combined masses indexed by subset mask; throws if the frame is too big.
inline std::vector<double> commonality_combine(const MassFunction& m1, const MassFunction& m2) {
  const std::size_t n = m1.frame().size();
  const Mask all = m1.frame().all();
  const std::size_t count = std::size_t{1} << n;
  auto commonality = [&](const MassFunction& m) {
    std::vector<double> q(count, 0.0);
    for (Mask a = 0; a < count; ++a) {
      for (const auto& f : m.focal()) {
        if ((a & ~f.subset) == 0) q[a] += f.mass;
      }
    }
    return q;
  };
  const auto q1 = commonality(m1);
  const auto q2 = commonality(m2);
  std::vector<double> q(count);
  for (Mask a = 0; a < count; ++a) q[a] = q1[a] * q2[a];
  // m(A) = Σ_{B ⊇ A} (−1)^{|B∖A|} Q(B)
  std::vector<double> m(count, 0.0);
  double kept = 0.0;
  for (Mask a = 1; a < count; ++a) {
    const Mask rest = all & ~a;
    double v = 0.0;
    for (Mask extra = rest;; extra = (extra - 1) & rest) {
      const double term = q[a | extra];
      v += (std::popcount(extra) & 1) ? -term : term;
      if (extra == 0) break;
    }
    m[a] = v;
    kept += v;
  }
  for (auto& v : m) v /= kept;
  m[0] = 0.0;
  return m;
}

/// Mask-indexed masses of a mass function on a small frame.
inline std::vector<double> dense(const MassFunction& m) {
  std::vector<double> out(std::size_t{1} << m.frame().size(), 0.0);
  for (const auto& f : m.focal()) out[f.subset] = f.mass;
  return out;
}

inline double dense_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace qmt::testing
