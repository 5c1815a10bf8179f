#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmt/markov_tree.hpp"
#include "qmt/mass.hpp"

namespace qmt {

using Stamp = std::uint64_t;

/// One rule firing. Rule 1 computes the message from→to; rule 2 computes the
/// marginal at `from` (and `to` repeats it). `stamps` are the versions of the
/// inputs the firing read: the local belief first, then inbound messages in
/// neighbour order.
struct FiringEvent {
  std::size_t seq = 0;
  int rule = 0;
  NodeId from;
  NodeId to;
  std::vector<Stamp> stamps;
};

using FiringLog = std::vector<FiringEvent>;

/// The combined belief at one node, on the coarse frame of its partition.
struct Marginal {
  NodeId node;
  MassFunction mass;

  /// Bel over block sets of the node's partition, indexed by coarse mask.
  BeliefTable beliefs() const { return belief_table(mass); }
};

/// Local-computation engine over a qualitative Markov tree. Each node keeps
/// its evidence items and their combination; each directed edge keeps the
/// last message computed along it together with the stamps of its inputs. A
/// message or marginal is current when it exists, the stamps it recorded
/// match its inputs' present stamps, and every inbound message it read is
/// itself current.
///
/// Not thread-safe: one caller drives evidence entry and propagation.
class Engine {
public:
  explicit Engine(MarkovTree tree);
  /// Throws NotATree, or MarkovViolation under MarkovCheck::Validate.
  static Engine create(Network net, MarkovCheck policy = MarkovCheck::Validate);

  const MarkovTree& tree() const noexcept { return tree_; }
  const Network& network() const noexcept { return tree_.network(); }

  std::size_t slot_count() const noexcept { return slots_.size(); }
  bool has_message(std::string_view from, std::string_view to) const;
  bool message_current(std::string_view from, std::string_view to) const;
  bool marginal_current(std::string_view node) const;

  /// Appends an evidence item at `node`; m must live on the node's coarse
  /// frame. Throws UnknownNode, FrameMismatch or TotalConflict (the node's
  /// items conflict totally; the item is then not recorded).
  void enter_evidence(std::string_view node, const MassFunction& m);
  /// Drops every item at `node`. Messages depending on it become stale.
  void retract_evidence(std::string_view node);

  std::span<const MassFunction> evidence(std::string_view node) const;
  const MassFunction& local_belief(std::string_view node) const;

  /// Message j→i: Bel_j combined with the inbound messages at j other than
  /// i's, projected onto ℘_i. Stores the result. Throws NotAnEdge,
  /// MissingInbound or TotalConflict.
  MassFunction compute_message(std::string_view j, std::string_view i);

  /// Bel_n combined with every inbound message. Cached until its inputs
  /// change. Throws MissingInbound or TotalConflict.
  Marginal marginal(std::string_view n);

  /// Forward-chaining run to quiescence. Each sweep fires the rule-1
  /// instances enabled at its start in canonical edge order, then the enabled
  /// rule-2 instances. On TotalConflict the run is rolled back.
  FiringLog propagate_batch();

  /// Same fixed point, reached by one simulated processor per node that talks
  /// to its neighbours only through per-direction mailboxes. The seed picks
  /// the interleaving of processor steps and mailbox deliveries.
  FiringLog propagate_concurrent(std::uint64_t schedule_seed);

  /// Log of the most recent propagation. Throws NoRunYet.
  const FiringLog& firing_trace() const;

  /// Overwrites the stored message from→to without touching its recorded
  /// inputs, so it still counts as current. For comparator sensitivity tests.
  void corrupt_message_for_testing(std::string_view from, std::string_view to, const MassFunction& m);

private:
  struct NodeState {
    std::vector<MassFunction> items;
    MassFunction combined;
    Stamp stamp = 0;
    std::optional<MassFunction> marginal;
    std::vector<Stamp> marginal_inputs;
  };

  struct SlotState {
    std::optional<MassFunction> message;
    Stamp stamp = 0;
    std::vector<Stamp> inputs;
  };

  friend class ProcessorNetwork;

  Stamp next_stamp() noexcept { return ++stamp_counter_; }

  std::vector<Stamp> message_inputs(std::size_t slot) const;
  std::vector<Stamp> marginal_inputs(std::size_t node) const;
  std::vector<bool> current_slots() const;
  bool inbound_current(std::size_t node, std::optional<std::size_t> except, const std::vector<bool>& current) const;
  bool marginal_is_current(std::size_t node, const std::vector<bool>& current) const;

  MassFunction combine_at(std::size_t node, std::optional<std::size_t> except, const std::string& location) const;
  void fire_message(std::size_t slot);
  void fire_marginal(std::size_t node);
  FiringEvent make_event(int rule, std::size_t from, std::size_t to, std::vector<Stamp> stamps);

  MarkovTree tree_;
  std::vector<NodeState> nodes_;
  std::vector<SlotState> slots_;
  Stamp stamp_counter_ = 0;
  std::optional<FiringLog> last_log_;
  FiringLog* recording_ = nullptr;
};

}  // namespace qmt
