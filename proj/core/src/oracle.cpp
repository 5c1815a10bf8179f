#include "qmt/oracle.hpp"

#include <algorithm>
#include <limits>

#include "qmt/error.hpp"

namespace qmt::oracle {

namespace {

void check_cap(const Network& net, std::size_t frame_cap) {
  if (net.frame().size() > frame_cap) {
    throw Error(ErrorCode::FrameTooLarge, "the oracle handles frames of at most " + std::to_string(frame_cap) +
                                              " elements, got " + std::to_string(net.frame().size()));
  }
}

// Every item, vacuously extended to the full frame.
std::vector<MassFunction> extended_items(const Network& net, const EvidenceMap& evidence) {
  std::vector<MassFunction> items{MassFunction::vacuous(net.frame())};
  for (const auto& [id, list] : evidence) {
    const Partition& p = net.partition(id);
    for (const auto& m : list) {
      items.push_back(vacuous_extend(m, p));
    }
  }
  return items;
}

}  // namespace

GlobalResult global_combine(const Network& net, const EvidenceMap& evidence, std::size_t frame_cap) {
  check_cap(net, frame_cap);
  auto combined = combine_many(extended_items(net, evidence));
  GlobalResult out{combined.result, {}, combined.conflict_mass};
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    out.coarsenings.emplace_back(net.id(i), coarsen(out.global, net.partition(i)));
  }
  return out;
}

GlobalResult global_combine_on_meet(const Network& net, const EvidenceMap& evidence, std::size_t frame_cap) {
  check_cap(net, frame_cap);
  std::vector<Partition> parts;
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    parts.push_back(net.partition(i));
  }
  const Partition finest = meet(parts);
  std::vector<MassFunction> items;
  for (const auto& m : extended_items(net, evidence)) {
    items.push_back(coarsen(m, finest));
  }
  auto combined = combine_many(items);
  GlobalResult out{combined.result, {}, combined.conflict_mass};
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    out.coarsenings.emplace_back(net.id(i), project(out.global, finest, net.partition(i)));
  }
  return out;
}

EvidenceMap evidence_of(const Engine& engine) {
  EvidenceMap out;
  for (const auto& id : engine.network().ids()) {
    const auto items = engine.evidence(id);
    if (!items.empty()) {
      out[id] = std::vector<MassFunction>(items.begin(), items.end());
    }
  }
  return out;
}

PropagationReport check_propagation(Engine& engine, double tol, std::size_t frame_cap) {
  const Network& net = engine.network();
  if (!engine.tree().markov_validated()) {
    auto report = validate_markov(net);
    if (!report.valid) {
      throw Error(ErrorCode::MarkovViolation, "not a qualitative Markov tree", report.violation->node);
    }
  }
  const auto reference = global_combine(net, evidence_of(engine), frame_cap);
  engine.propagate_batch();
  PropagationReport report;
  report.tol = tol;
  for (const auto& [id, expected] : reference.coarsenings) {
    const double dev = max_deviation(engine.marginal(id).mass, expected);
    report.deviations.push_back({id, dev});
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.pass = report.max_deviation <= tol;
  return report;
}

namespace {

void require_hypothesis(const Partition& p1, const Partition& p2, const Partition& p) {
  const Partition pair[] = {p1, p2};
  if (!qualitatively_cond_independent(pair, p)) {
    throw Error(ErrorCode::HypothesisNotSatisfied, "the partitions are not conditionally independent");
  }
}

void require_carried(const MassFunction& m, const Partition& p) {
  if (!is_carried_by(m, p)) {
    throw Error(ErrorCode::HypothesisNotSatisfied, "belief function is not carried by its partition");
  }
}

IdentityReport compare(const MassFunction& lhs, const MassFunction& rhs, double tol) {
  const double dev = max_deviation(lhs, rhs);
  return IdentityReport{dev, dev <= tol};
}

}  // namespace

IdentityReport check_coarsening_of_combination(const Partition& p1, const Partition& p2, const Partition& p,
                                               const MassFunction& bel1, const MassFunction& bel2, double tol) {
  require_hypothesis(p1, p2, p);
  require_carried(bel1, p1);
  require_carried(bel2, p2);
  std::optional<MassFunction> lhs;
  std::optional<MassFunction> rhs;
  try {
    lhs = coarsen(dempster_combine(bel1, bel2).result, p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TotalConflict) throw;
  }
  try {
    rhs = dempster_combine(coarsen(bel1, p), coarsen(bel2, p)).result;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TotalConflict) throw;
  }
  if (!lhs && !rhs) {
    return IdentityReport{0.0, true};
  }
  if (!lhs || !rhs) {
    return IdentityReport{std::numeric_limits<double>::infinity(), false};
  }
  return compare(*lhs, *rhs, tol);
}

IdentityReport check_projection_through(const Partition& p1, const Partition& p2, const Partition& p,
                                        const MassFunction& bel2, double tol) {
  require_hypothesis(p1, p2, p);
  require_carried(bel2, p2);
  const auto direct = coarsen(bel2, p1);
  const auto via = project(coarsen(bel2, p), p, p1);
  return compare(direct, via, tol);
}

bool is_qualitative_markov_network(const Network& net) {
  const std::size_t n = net.node_count();
  const Partition trivial = Partition::trivial(net.frame());
  auto meet_of = [&](const std::vector<std::size_t>& nodes) {
    if (nodes.empty()) {
      return trivial;
    }
    std::vector<Partition> parts;
    for (auto i : nodes) {
      parts.push_back(net.partition(i));
    }
    return meet(parts);
  };
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= 4;
  }
  // Digit d of `code` in base 4 assigns node d to: 0 none, 1 J1, 2 J2, 3 J3.
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<std::size_t> sets[4];
    std::set<NodeId> ids[4];
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i, c /= 4) {
      sets[c % 4].push_back(i);
      ids[c % 4].insert(net.id(i));
    }
    if (sets[1].empty() || sets[2].empty()) {
      continue;
    }
    if (!separates(net, ids[1], ids[2], ids[3])) {
      continue;
    }
    const Partition pair[] = {meet_of(sets[1]), meet_of(sets[2])};
    if (!qualitatively_cond_independent(pair, meet_of(sets[3]))) {
      return false;
    }
  }
  return true;
}

}  // namespace qmt::oracle
