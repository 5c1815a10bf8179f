#include "qmt/markov_tree.hpp"

#include <algorithm>
#include <map>

#include "qmt/error.hpp"

namespace qmt {

Network Network::build(const Frame& frame, std::vector<NodeSpec> nodes,
                       const std::vector<std::pair<NodeId, NodeId>>& edges) {
  std::sort(nodes.begin(), nodes.end(), [](const NodeSpec& a, const NodeSpec& b) { return a.id < b.id; });
  Network net(frame);
  for (auto& n : nodes) {
    if (!net.ids_.empty() && net.ids_.back() == n.id) {
      throw Error(ErrorCode::DuplicateLabel, "node '" + n.id + "' is declared twice");
    }
    require_same_frame(frame, n.partition.frame(), "node '" + n.id + "' partition");
    net.ids_.push_back(std::move(n.id));
    net.partitions_.push_back(std::move(n.partition));
  }
  net.adjacency_.resize(net.ids_.size());
  for (const auto& [a, b] : edges) {
    const auto ia = net.find(a);
    const auto ib = net.find(b);
    if (!ia || !ib) {
      throw Error(ErrorCode::UnknownNode, "edge (" + a + ", " + b + ") references an unknown node");
    }
    if (*ia == *ib) {
      throw Error(ErrorCode::SelfLoop, "edge (" + a + ", " + b + ") joins a node to itself");
    }
    const Edge e{std::min(*ia, *ib), std::max(*ia, *ib)};
    if (std::find(net.edges_.begin(), net.edges_.end(), e) != net.edges_.end()) {
      throw Error(ErrorCode::DuplicateEdge, "edge (" + a + ", " + b + ") is listed twice");
    }
    net.edges_.push_back(e);
  }
  std::sort(net.edges_.begin(), net.edges_.end());
  for (const auto& e : net.edges_) {
    net.adjacency_[e.first].push_back(e.second);
    net.adjacency_[e.second].push_back(e.first);
  }
  for (auto& adj : net.adjacency_) {
    std::sort(adj.begin(), adj.end());
  }
  return net;
}

std::optional<std::size_t> Network::find(std::string_view id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) {
    return std::nullopt;
  }
  return static_cast<std::size_t>(it - ids_.begin());
}

std::size_t Network::index_of(std::string_view id) const {
  if (auto idx = find(id)) {
    return *idx;
  }
  throw Error(ErrorCode::UnknownNode, "no node '" + std::string(id) + "'");
}

std::vector<NodeId> Network::neighbors(std::string_view id) const {
  std::vector<NodeId> out;
  for (auto k : adjacency_.at(index_of(id))) {
    out.push_back(ids_[k]);
  }
  return out;
}

bool Network::adjacent(std::size_t a, std::size_t b) const {
  const auto& adj = adjacency_.at(a);
  return std::binary_search(adj.begin(), adj.end(), b);
}

std::vector<NodeId> Network::leaves() const {
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (adjacency_[i].size() == 1) {
      out.push_back(ids_[i]);
    }
  }
  return out;
}

namespace {

// Nodes reachable from `start` without entering `blocked`.
std::vector<bool> reachable(const Network& net, std::size_t start, const std::vector<bool>& blocked) {
  std::vector<bool> seen(net.node_count(), false);
  std::vector<std::size_t> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const auto u = stack.back();
    stack.pop_back();
    for (auto v : net.neighbors(u)) {
      if (!seen[v] && !blocked[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

std::vector<bool> to_flags(const Network& net, const std::set<NodeId>& ids) {
  std::vector<bool> flags(net.node_count(), false);
  for (const auto& id : ids) {
    flags[net.index_of(id)] = true;
  }
  return flags;
}

}  // namespace

bool is_tree(const Network& net) {
  if (net.node_count() == 0 || net.edges().size() != net.node_count() - 1) {
    return false;
  }
  const auto seen = reachable(net, 0, std::vector<bool>(net.node_count(), false));
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

bool separates(const Network& net, const std::set<NodeId>& j1, const std::set<NodeId>& j2,
               const std::set<NodeId>& j3) {
  const auto f1 = to_flags(net, j1);
  const auto f2 = to_flags(net, j2);
  const auto f3 = to_flags(net, j3);
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    if ((f1[i] && f2[i]) || (f1[i] && f3[i]) || (f2[i] && f3[i])) {
      throw Error(ErrorCode::OverlappingSets, "node '" + net.id(i) + "' lies in more than one set");
    }
  }
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    if (!f1[i]) {
      continue;
    }
    const auto seen = reachable(net, i, f3);
    for (std::size_t k = 0; k < net.node_count(); ++k) {
      if (f2[k] && seen[k]) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::vector<std::size_t>> subtree_components(const Network& tree, std::size_t j) {
  if (!is_tree(tree)) {
    throw Error(ErrorCode::NotATree, "subtree components need a tree");
  }
  std::vector<bool> blocked(tree.node_count(), false);
  blocked.at(j) = true;
  std::vector<std::vector<std::size_t>> out;
  for (auto k : tree.neighbors(j)) {
    const auto seen = reachable(tree, k, blocked);
    std::vector<std::size_t> component;
    for (std::size_t i = 0; i < tree.node_count(); ++i) {
      if (seen[i]) {
        component.push_back(i);
      }
    }
    out.push_back(std::move(component));
  }
  return out;
}

std::vector<std::vector<NodeId>> subtree_components(const Network& tree, std::string_view j) {
  std::vector<std::vector<NodeId>> out;
  for (const auto& component : subtree_components(tree, tree.index_of(j))) {
    auto& ids = out.emplace_back();
    for (auto i : component) {
      ids.push_back(tree.id(i));
    }
  }
  return out;
}

MarkovReport validate_markov(const Network& tree) {
  if (!is_tree(tree)) {
    throw Error(ErrorCode::NotATree, "Markov validation needs a tree");
  }
  for (std::size_t j = 0; j < tree.node_count(); ++j) {
    const auto components = subtree_components(tree, j);
    std::vector<Partition> meets;
    meets.reserve(components.size());
    for (const auto& component : components) {
      std::vector<Partition> parts;
      for (auto i : component) {
        parts.push_back(tree.partition(i));
      }
      meets.push_back(meet(parts));
    }
    const Partition& given = tree.partition(j);
    if (auto witness = find_cond_independence_violation(meets, given)) {
      MarkovViolation v;
      v.node = tree.id(j);
      for (const auto& component : components) {
        auto& ids = v.components.emplace_back();
        for (auto i : component) {
          ids.push_back(tree.id(i));
        }
      }
      v.given_block = given.block_mask(witness->given_block);
      for (std::size_t c = 0; c < meets.size(); ++c) {
        v.selection.push_back(meets[c].block_mask(witness->selection[c]));
      }
      return MarkovReport{false, std::move(v)};
    }
  }
  return MarkovReport{true, std::nullopt};
}

MarkovTree MarkovTree::build(Network net, MarkovCheck policy) {
  if (!is_tree(net)) {
    throw Error(ErrorCode::NotATree, "the network must be connected and acyclic");
  }
  MarkovTree tree(std::move(net));
  if (policy == MarkovCheck::Validate) {
    auto report = validate_markov(tree.net_);
    if (!report.valid) {
      throw Error(ErrorCode::MarkovViolation, "qualitative Markov condition fails", report.violation->node);
    }
    tree.validated_ = true;
  }
  const Network& n = tree.net_;
  for (const auto& e : n.edges()) {
    tree.directed_.push_back({e.first, e.second});
    tree.directed_.push_back({e.second, e.first});
    IncidenceKernel forward(n.partition(e.first), n.partition(e.second));
    auto backward = forward.transpose();
    tree.kernels_.push_back(std::move(forward));
    tree.kernels_.push_back(std::move(backward));
  }
  return tree;
}

std::size_t MarkovTree::slot(std::size_t from, std::size_t to) const {
  const Edge e{std::min(from, to), std::max(from, to)};
  const auto edges = net_.edges();
  auto it = std::lower_bound(edges.begin(), edges.end(), e);
  if (from == to || it == edges.end() || !(*it == e)) {
    throw Error(ErrorCode::NotAnEdge, "no edge between the given nodes");
  }
  const auto index = static_cast<std::size_t>(it - edges.begin());
  return 2 * index + (from < to ? 0 : 1);
}

const IncidenceKernel& MarkovTree::edge_kernel(std::string_view i, std::string_view j) const {
  const auto a = net_.index_of(i);
  const auto b = net_.index_of(j);
  try {
    return kernels_.at(slot(a, b));
  } catch (const Error&) {
    throw Error(ErrorCode::NotAnEdge, "no edge between '" + std::string(i) + "' and '" + std::string(j) + "'");
  }
}

}  // namespace qmt
