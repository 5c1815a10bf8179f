#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qmt/markov_tree.hpp"
#include "qmt/mass.hpp"
#include "qmt/propagation.hpp"

namespace qmt {

/// Brute-force reference computations on the full frame. Exponential in the
/// frame size and meant only for desk-scale verification.
namespace oracle {

inline constexpr std::size_t kDefaultFrameCap = 16;

/// Evidence items per node id, each on the coarse frame of that node.
using EvidenceMap = std::map<NodeId, std::vector<MassFunction>>;

struct GlobalResult {
  MassFunction global;
  /// Coarsening of `global` to each node's partition, in node index order.
  std::vector<std::pair<NodeId, MassFunction>> coarsenings;
  double conflict_mass = 0.0;
};

/// Vacuously extends every item to the full frame, combines them all there,
/// then coarsens to every node. Throws FrameTooLarge, TotalConflict,
/// UnknownNode or FrameMismatch.
GlobalResult global_combine(const Network& net, const EvidenceMap& evidence,
                            std::size_t frame_cap = kDefaultFrameCap);

/// Same combination carried out on the meet of all node partitions instead
/// of the full frame. The `global` field lives on the meet's coarse frame.
GlobalResult global_combine_on_meet(const Network& net, const EvidenceMap& evidence,
                                    std::size_t frame_cap = kDefaultFrameCap);

/// Evidence currently entered into an engine.
EvidenceMap evidence_of(const Engine& engine);

struct NodeDeviation {
  NodeId node;
  double deviation = 0.0;
};

struct PropagationReport {
  std::vector<NodeDeviation> deviations;
  double max_deviation = 0.0;
  double tol = 0.0;
  bool pass = false;
};

/// Runs batch propagation and compares each node marginal with the coarsened
/// global combination. Throws MarkovViolation when the tree is not a
/// qualitative Markov tree, plus anything the oracle or engine throws.
PropagationReport check_propagation(Engine& engine, double tol, std::size_t frame_cap = kDefaultFrameCap);

struct IdentityReport {
  double deviation = 0.0;
  bool pass = false;
};

/// (Bel1 ⊕ Bel2) coarsened to p equals the combination of the coarsenings,
/// when [p1, p2] are qualitatively conditionally independent given p and each
/// Bel is carried by its partition. Throws HypothesisNotSatisfied otherwise.
IdentityReport check_coarsening_of_combination(const Partition& p1, const Partition& p2, const Partition& p,
                                               const MassFunction& bel1, const MassFunction& bel2, double tol);

/// Projection of Bel2 (carried by p2) to p1 equals its projection to p1 via
/// p, under the same independence hypothesis. Throws HypothesisNotSatisfied.
IdentityReport check_projection_through(const Partition& p1, const Partition& p2, const Partition& p,
                                        const MassFunction& bel2, double tol);

/// The defining property of a qualitative Markov network, checked over every
/// triple of disjoint node sets (J1, J2, J3) with J3 separating J1 from J2.
/// Enumerates 4^|J| assignments; intended for small networks.
bool is_qualitative_markov_network(const Network& net);

}  // namespace oracle
}  // namespace qmt
