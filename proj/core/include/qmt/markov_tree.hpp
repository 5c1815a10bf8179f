#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qmt/frame.hpp"
#include "qmt/mass.hpp"

namespace qmt {

using NodeId = std::string;

/// Undirected edge between node indices, stored with first < second.
struct Edge {
  std::size_t first = 0;
  std::size_t second = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct NodeSpec {
  NodeId id;
  Partition partition;
};

/// Partition-labelled undirected network. Nodes are indexed in lexicographic
/// id order; edges are canonical (min, max) pairs in sorted order.
class Network {
public:
  /// Throws UnknownNode, SelfLoop, DuplicateEdge or FrameMismatch (also on a
  /// repeated node id).
  static Network build(const Frame& frame, std::vector<NodeSpec> nodes,
                       const std::vector<std::pair<NodeId, NodeId>>& edges);

  const Frame& frame() const noexcept { return frame_; }
  std::size_t node_count() const noexcept { return ids_.size(); }
  std::span<const NodeId> ids() const noexcept { return ids_; }
  const NodeId& id(std::size_t index) const { return ids_.at(index); }
  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws UnknownNode.
  std::size_t index_of(std::string_view id) const;

  const Partition& partition(std::size_t index) const { return partitions_.at(index); }
  const Partition& partition(std::string_view id) const { return partitions_.at(index_of(id)); }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const std::size_t> neighbors(std::size_t index) const { return adjacency_.at(index); }
  std::vector<NodeId> neighbors(std::string_view id) const;
  bool adjacent(std::size_t a, std::size_t b) const;

  /// Nodes with exactly one neighbour.
  std::vector<NodeId> leaves() const;

private:
  Network(Frame frame) : frame_(std::move(frame)) {}

  Frame frame_;
  std::vector<NodeId> ids_;
  std::vector<Partition> partitions_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

bool is_tree(const Network& net);

/// Every path from a node in j1 to a node in j2 passes through j3. Throws
/// OverlappingSets or UnknownNode.
bool separates(const Network& net, const std::set<NodeId>& j1, const std::set<NodeId>& j2,
               const std::set<NodeId>& j3);

/// Node sets of the subtrees left after deleting j, one per neighbour of j in
/// neighbour order. Throws UnknownNode or NotATree.
std::vector<std::vector<NodeId>> subtree_components(const Network& tree, std::string_view j);
std::vector<std::vector<std::size_t>> subtree_components(const Network& tree, std::size_t j);

struct MarkovViolation {
  NodeId node;
  std::vector<std::vector<NodeId>> components;
  /// Block of the node's partition used as the conditioning block.
  Mask given_block = 0;
  /// One block per component, taken from the meet of that component's
  /// partitions; each meets given_block but jointly they miss it.
  std::vector<Mask> selection;
};

struct MarkovReport {
  bool valid = true;
  std::optional<MarkovViolation> violation;
};

/// Node-local characterisation of a qualitative Markov tree: at every node the
/// meets of the partitions in each remaining subtree are qualitatively
/// conditionally independent given the node's partition. Stops at the first
/// violating node. Throws NotATree.
MarkovReport validate_markov(const Network& tree);

enum class MarkovCheck { Validate, Skip };

/// A directed edge slot: message from `from` to `to`.
struct DirectedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
};

/// A tree network with precomputed block-incidence kernels for both directions
/// of every edge.
class MarkovTree {
public:
  /// Throws NotATree, or MarkovViolation when validation is requested and fails.
  static MarkovTree build(Network net, MarkovCheck policy = MarkovCheck::Validate);

  const Network& network() const noexcept { return net_; }
  bool markov_validated() const noexcept { return validated_; }
  std::size_t node_count() const noexcept { return net_.node_count(); }

  /// Directed slots in canonical order: for each edge (a, b), a→b then b→a.
  std::span<const DirectedEdge> directed_edges() const noexcept { return directed_; }
  /// Throws NotAnEdge.
  std::size_t slot(std::size_t from, std::size_t to) const;

  /// Incidence of blocks of ℘_i (rows) against blocks of ℘_j. Throws NotAnEdge
  /// or UnknownNode.
  const IncidenceKernel& edge_kernel(std::string_view i, std::string_view j) const;
  const IncidenceKernel& kernel(std::size_t slot) const { return kernels_.at(slot); }

private:
  explicit MarkovTree(Network net) : net_(std::move(net)) {}

  Network net_;
  bool validated_ = false;
  std::vector<DirectedEdge> directed_;
  std::vector<IncidenceKernel> kernels_;
};

}  // namespace qmt
