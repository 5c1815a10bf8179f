#include "qmt/propagation.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "qmt/error.hpp"

namespace qmt {

Engine::Engine(MarkovTree tree) : tree_(std::move(tree)) {
  const Network& net = tree_.network();
  nodes_.reserve(net.node_count());
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    nodes_.push_back(NodeState{{}, MassFunction::vacuous(net.partition(i).coarse_frame()), next_stamp(), {}, {}});
  }
  slots_.resize(tree_.directed_edges().size());
}

Engine Engine::create(Network net, MarkovCheck policy) { return Engine(MarkovTree::build(std::move(net), policy)); }

std::vector<Stamp> Engine::message_inputs(std::size_t slot) const {
  const auto [from, to] = tree_.directed_edges()[slot];
  std::vector<Stamp> inputs{nodes_[from].stamp};
  for (auto k : network().neighbors(from)) {
    if (k != to) {
      inputs.push_back(slots_[tree_.slot(k, from)].stamp);
    }
  }
  return inputs;
}

std::vector<Stamp> Engine::marginal_inputs(std::size_t node) const {
  std::vector<Stamp> inputs{nodes_[node].stamp};
  for (auto k : network().neighbors(node)) {
    inputs.push_back(slots_[tree_.slot(k, node)].stamp);
  }
  return inputs;
}

std::vector<bool> Engine::current_slots() const {
  enum : char { Unknown, No, Yes };
  std::vector<char> memo(slots_.size(), Unknown);
  std::function<bool(std::size_t)> current = [&](std::size_t slot) -> bool {
    if (memo[slot] != Unknown) {
      return memo[slot] == Yes;
    }
    const auto [from, to] = tree_.directed_edges()[slot];
    bool ok = slots_[slot].message.has_value() && slots_[slot].inputs == message_inputs(slot);
    for (auto k : network().neighbors(from)) {
      if (ok && k != to) {
        ok = current(tree_.slot(k, from));
      }
    }
    memo[slot] = ok ? Yes : No;
    return ok;
  };
  std::vector<bool> out(slots_.size());
  for (std::size_t s = 0; s < slots_.size(); ++s) {
    out[s] = current(s);
  }
  return out;
}

bool Engine::inbound_current(std::size_t node, std::optional<std::size_t> except,
                             const std::vector<bool>& current) const {
  for (auto k : network().neighbors(node)) {
    if (k != except && !current[tree_.slot(k, node)]) {
      return false;
    }
  }
  return true;
}

bool Engine::marginal_is_current(std::size_t node, const std::vector<bool>& current) const {
  return nodes_[node].marginal.has_value() && nodes_[node].marginal_inputs == marginal_inputs(node) &&
         inbound_current(node, std::nullopt, current);
}

bool Engine::has_message(std::string_view from, std::string_view to) const {
  return slots_[tree_.slot(network().index_of(from), network().index_of(to))].message.has_value();
}

bool Engine::message_current(std::string_view from, std::string_view to) const {
  return current_slots()[tree_.slot(network().index_of(from), network().index_of(to))];
}

bool Engine::marginal_current(std::string_view node) const {
  return marginal_is_current(network().index_of(node), current_slots());
}

void Engine::enter_evidence(std::string_view node, const MassFunction& m) {
  const auto n = network().index_of(node);
  require_same_frame(network().partition(n).coarse_frame(), m.frame(), "evidence at node '" + std::string(node) + "'");
  auto& state = nodes_[n];
  MassFunction combined = state.combined;
  try {
    combined = dempster_combine(state.combined, m).result;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TotalConflict) {
      throw Error(ErrorCode::TotalConflict, "evidence items conflict totally", "node " + std::string(node));
    }
    throw;
  }
  state.items.push_back(m);
  state.combined = std::move(combined);
  state.stamp = next_stamp();
}

void Engine::retract_evidence(std::string_view node) {
  const auto n = network().index_of(node);
  auto& state = nodes_[n];
  state.items.clear();
  state.combined = MassFunction::vacuous(network().partition(n).coarse_frame());
  state.stamp = next_stamp();
}

std::span<const MassFunction> Engine::evidence(std::string_view node) const {
  return nodes_[network().index_of(node)].items;
}

const MassFunction& Engine::local_belief(std::string_view node) const {
  return nodes_[network().index_of(node)].combined;
}

MassFunction Engine::combine_at(std::size_t node, std::optional<std::size_t> except,
                                const std::string& location) const {
  std::vector<MassFunction> parts{nodes_[node].combined};
  for (auto k : network().neighbors(node)) {
    if (k == except) {
      continue;
    }
    const auto& inbound = slots_[tree_.slot(k, node)].message;
    if (!inbound) {
      throw Error(ErrorCode::MissingInbound, "no message from '" + network().id(k) + "'", location);
    }
    parts.push_back(*inbound);
  }
  try {
    return combine_many(parts).result;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TotalConflict) {
      throw Error(ErrorCode::TotalConflict, "evidence is globally contradictory", location);
    }
    throw;
  }
}

FiringEvent Engine::make_event(int rule, std::size_t from, std::size_t to, std::vector<Stamp> stamps) {
  const std::size_t seq = recording_ != nullptr ? recording_->size() + 1 : 0;
  return FiringEvent{seq, rule, network().id(from), network().id(to), std::move(stamps)};
}

void Engine::fire_message(std::size_t slot) {
  const auto [from, to] = tree_.directed_edges()[slot];
  const std::string location = "edge " + network().id(from) + "->" + network().id(to);
  auto combined = combine_at(from, to, location);
  auto inputs = message_inputs(slot);
  slots_[slot].message = project(combined, tree_.kernel(slot));
  slots_[slot].stamp = next_stamp();
  slots_[slot].inputs = inputs;
  if (recording_ != nullptr) {
    recording_->push_back(make_event(1, from, to, std::move(inputs)));
  }
}

void Engine::fire_marginal(std::size_t node) {
  auto combined = combine_at(node, std::nullopt, "node " + network().id(node));
  auto inputs = marginal_inputs(node);
  nodes_[node].marginal = std::move(combined);
  nodes_[node].marginal_inputs = inputs;
  if (recording_ != nullptr) {
    recording_->push_back(make_event(2, node, node, std::move(inputs)));
  }
}

MassFunction Engine::compute_message(std::string_view j, std::string_view i) {
  const auto from = network().index_of(j);
  const auto to = network().index_of(i);
  const auto slot = tree_.slot(from, to);
  if (!inbound_current(from, to, current_slots())) {
    throw Error(ErrorCode::MissingInbound, "inbound messages at '" + std::string(j) + "' are missing or stale",
                "edge " + std::string(j) + "->" + std::string(i));
  }
  fire_message(slot);
  return *slots_[slot].message;
}

Marginal Engine::marginal(std::string_view n) {
  const auto node = network().index_of(n);
  const auto current = current_slots();
  if (!marginal_is_current(node, current)) {
    const bool no_evidence =
        std::all_of(nodes_.begin(), nodes_.end(), [](const NodeState& s) { return s.items.empty(); });
    if (no_evidence && !inbound_current(node, std::nullopt, current)) {
      // Every message would be the projection of a vacuous function.
      return Marginal{std::string(n), MassFunction::vacuous(network().partition(node).coarse_frame())};
    }
    if (!inbound_current(node, std::nullopt, current)) {
      throw Error(ErrorCode::MissingInbound, "inbound messages are missing or stale; propagate first",
                  "node " + std::string(n));
    }
    fire_marginal(node);
  }
  return Marginal{std::string(n), *nodes_[node].marginal};
}

FiringLog Engine::propagate_batch() {
  const auto saved_slots = slots_;
  const auto saved_nodes = nodes_;
  FiringLog log;
  recording_ = &log;
  try {
    for (;;) {
      auto current = current_slots();
      std::vector<std::size_t> messages;
      for (std::size_t s = 0; s < slots_.size(); ++s) {
        const auto [from, to] = tree_.directed_edges()[s];
        if (!current[s] && inbound_current(from, to, current)) {
          messages.push_back(s);
        }
      }
      for (auto s : messages) {
        fire_message(s);
      }
      current = current_slots();
      std::vector<std::size_t> marginals;
      for (std::size_t n = 0; n < nodes_.size(); ++n) {
        if (!marginal_is_current(n, current) && inbound_current(n, std::nullopt, current)) {
          marginals.push_back(n);
        }
      }
      for (auto n : marginals) {
        fire_marginal(n);
      }
      if (messages.empty() && marginals.empty()) {
        break;
      }
    }
  } catch (...) {
    slots_ = saved_slots;
    nodes_ = saved_nodes;
    recording_ = nullptr;
    throw;
  }
  recording_ = nullptr;
  last_log_ = log;
  return log;
}

const FiringLog& Engine::firing_trace() const {
  if (!last_log_) {
    throw Error(ErrorCode::NoRunYet, "no propagation has run on this engine");
  }
  return *last_log_;
}

void Engine::corrupt_message_for_testing(std::string_view from, std::string_view to, const MassFunction& m) {
  const auto a = network().index_of(from);
  const auto b = network().index_of(to);
  require_same_frame(network().partition(b).coarse_frame(), m.frame(), "corrupted message");
  slots_[tree_.slot(a, b)].message = m;
  // Invalidate the receiver's cached marginal so the corruption is observed.
  nodes_[b].marginal.reset();
}

// ---------------------------------------------------------------------------
// Simulated node processors. Every processor owns a copy of its local belief
// and reads only its inbound mailboxes; every mailbox has one writer (the
// sending processor) and one reader (the receiving processor). A posted
// message becomes readable only after a separate delivery step, so the
// scheduler can reorder transmissions as well as computations.

class ProcessorNetwork {
public:
  ProcessorNetwork(Engine& engine, std::uint64_t seed) : engine_(engine), rng_(seed) {}

  FiringLog run();

private:
  struct Envelope {
    MassFunction mass;
    Stamp stamp = 0;
    std::vector<Stamp> inputs;
  };

  struct Mailbox {
    std::optional<Envelope> in_flight;
    std::optional<Envelope> readable;
  };

  struct Processor {
    std::size_t node = 0;
    MassFunction local;
    Stamp local_stamp = 0;
    std::vector<std::size_t> neighbors;
    std::vector<std::size_t> inbox;   // mailbox index per neighbour, neighbour → this
    std::vector<std::size_t> outbox;  // mailbox index per neighbour, this → neighbour
    std::vector<bool> sent;
    bool output_done = false;
    std::optional<Envelope> output;
  };

  enum class ActionKind { Send, Output, Deliver };
  struct Action {
    ActionKind kind;
    std::size_t processor;
    std::size_t index;
  };

  bool inbox_ready(const Processor& p, std::optional<std::size_t> except) const;
  MassFunction combine(const Processor& p, std::optional<std::size_t> except, const std::string& location) const;
  std::vector<Stamp> read_stamps(const Processor& p, std::optional<std::size_t> except) const;
  void send(Processor& p, std::size_t k);
  void emit_output(Processor& p);

  Engine& engine_;
  std::mt19937_64 rng_;
  std::vector<Mailbox> mailboxes_;
  std::vector<Processor> processors_;
  FiringLog log_;
};

bool ProcessorNetwork::inbox_ready(const Processor& p, std::optional<std::size_t> except) const {
  for (std::size_t k = 0; k < p.neighbors.size(); ++k) {
    if (k != except && !mailboxes_[p.inbox[k]].readable) {
      return false;
    }
  }
  return true;
}

std::vector<Stamp> ProcessorNetwork::read_stamps(const Processor& p, std::optional<std::size_t> except) const {
  std::vector<Stamp> stamps{p.local_stamp};
  for (std::size_t k = 0; k < p.neighbors.size(); ++k) {
    if (k != except) {
      stamps.push_back(mailboxes_[p.inbox[k]].readable->stamp);
    }
  }
  return stamps;
}

MassFunction ProcessorNetwork::combine(const Processor& p, std::optional<std::size_t> except,
                                       const std::string& location) const {
  std::vector<MassFunction> parts{p.local};
  for (std::size_t k = 0; k < p.neighbors.size(); ++k) {
    if (k != except) {
      parts.push_back(mailboxes_[p.inbox[k]].readable->mass);
    }
  }
  try {
    return combine_many(parts).result;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TotalConflict) {
      throw Error(ErrorCode::TotalConflict, "evidence is globally contradictory", location);
    }
    throw;
  }
}

void ProcessorNetwork::send(Processor& p, std::size_t k) {
  const Network& net = engine_.network();
  const auto to = p.neighbors[k];
  const auto slot = engine_.tree_.slot(p.node, to);
  const auto combined = combine(p, k, "edge " + net.id(p.node) + "->" + net.id(to));
  auto stamps = read_stamps(p, k);
  mailboxes_[p.outbox[k]].in_flight =
      Envelope{project(combined, engine_.tree_.kernel(slot)), engine_.next_stamp(), stamps};
  p.sent[k] = true;
  log_.push_back(FiringEvent{log_.size() + 1, 1, net.id(p.node), net.id(to), std::move(stamps)});
}

void ProcessorNetwork::emit_output(Processor& p) {
  const Network& net = engine_.network();
  auto combined = combine(p, std::nullopt, "node " + net.id(p.node));
  auto stamps = read_stamps(p, std::nullopt);
  p.output = Envelope{std::move(combined), 0, stamps};
  p.output_done = true;
  log_.push_back(FiringEvent{log_.size() + 1, 2, net.id(p.node), net.id(p.node), std::move(stamps)});
}

FiringLog ProcessorNetwork::run() {
  const MarkovTree& tree = engine_.tree_;
  const Network& net = tree.network();
  const auto current = engine_.current_slots();

  mailboxes_.resize(engine_.slots_.size());
  for (std::size_t s = 0; s < mailboxes_.size(); ++s) {
    if (current[s]) {
      const auto& slot = engine_.slots_[s];
      mailboxes_[s].readable = Envelope{*slot.message, slot.stamp, slot.inputs};
    }
  }
  for (std::size_t n = 0; n < net.node_count(); ++n) {
    Processor p{n, engine_.nodes_[n].combined, engine_.nodes_[n].stamp, {}, {}, {}, {}, false, {}};
    for (auto k : net.neighbors(n)) {
      p.neighbors.push_back(k);
      p.inbox.push_back(tree.slot(k, n));
      p.outbox.push_back(tree.slot(n, k));
      p.sent.push_back(current[tree.slot(n, k)]);
    }
    p.output_done = engine_.marginal_is_current(n, current);
    processors_.push_back(std::move(p));
  }

  std::vector<Action> enabled;
  for (;;) {
    enabled.clear();
    for (std::size_t i = 0; i < processors_.size(); ++i) {
      const auto& p = processors_[i];
      for (std::size_t k = 0; k < p.neighbors.size(); ++k) {
        if (!p.sent[k] && inbox_ready(p, k)) {
          enabled.push_back({ActionKind::Send, i, k});
        }
      }
      if (!p.output_done && inbox_ready(p, std::nullopt)) {
        enabled.push_back({ActionKind::Output, i, 0});
      }
    }
    for (std::size_t s = 0; s < mailboxes_.size(); ++s) {
      if (mailboxes_[s].in_flight) {
        enabled.push_back({ActionKind::Deliver, 0, s});
      }
    }
    if (enabled.empty()) {
      break;
    }
    std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
    const Action a = enabled[pick(rng_)];
    switch (a.kind) {
      case ActionKind::Send:
        send(processors_[a.processor], a.index);
        break;
      case ActionKind::Output:
        emit_output(processors_[a.processor]);
        break;
      case ActionKind::Deliver:
        mailboxes_[a.index].readable = std::move(mailboxes_[a.index].in_flight);
        mailboxes_[a.index].in_flight.reset();
        break;
    }
  }

  // Quiescent: publish registers and outputs back into the engine.
  for (std::size_t s = 0; s < mailboxes_.size(); ++s) {
    if (!current[s] && mailboxes_[s].readable) {
      auto& env = *mailboxes_[s].readable;
      engine_.slots_[s].message = std::move(env.mass);
      engine_.slots_[s].stamp = env.stamp;
      engine_.slots_[s].inputs = std::move(env.inputs);
    }
  }
  for (auto& p : processors_) {
    if (p.output) {
      engine_.nodes_[p.node].marginal = std::move(p.output->mass);
      engine_.nodes_[p.node].marginal_inputs = std::move(p.output->inputs);
    }
  }
  return log_;
}

FiringLog Engine::propagate_concurrent(std::uint64_t schedule_seed) {
  ProcessorNetwork machine(*this, schedule_seed);
  auto log = machine.run();
  last_log_ = log;
  return log;
}

}  // namespace qmt
