#include "json_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qmt/error.hpp"

namespace qmt::io {

namespace {

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    parse_error(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

std::vector<std::string> string_array(const json& j, const char* what) {
  if (!j.is_array()) {
    parse_error(std::string(what) + " must be an array of strings");
  }
  std::vector<std::string> out;
  for (const auto& e : j) {
    if (!e.is_string()) {
      parse_error(std::string(what) + " must be an array of strings");
    }
    out.push_back(e.get<std::string>());
  }
  return out;
}

double number(const json& j, const char* what) {
  if (!j.is_number()) {
    parse_error(std::string(what) + " must be a number");
  }
  return j.get<double>();
}

}  // namespace

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) {
    return value;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return std::strtod(buf, nullptr);
}

json frame_to_json(const Frame& frame) { return frame.labels(); }

Frame frame_from_json(const json& j, std::size_t max_size) {
  return Frame::make(string_array(j, "frame"), max_size);
}

json subset_to_json(const Subset& s) { return s.labels(); }

Subset subset_from_json(const Frame& frame, const json& j) {
  const auto labels = string_array(j, "subset");
  return frame.subset(labels);
}

json partition_to_json(const Partition& p) {
  json out = json::array();
  for (std::size_t b = 0; b < p.block_count(); ++b) {
    out.push_back(subset_to_json(p.block(b)));
  }
  return out;
}

Partition partition_from_json(const Frame& frame, const json& j) {
  if (!j.is_array()) {
    parse_error("a partition must be an array of label arrays");
  }
  std::vector<Subset> blocks;
  for (const auto& b : j) {
    blocks.push_back(subset_from_json(frame, b));
  }
  return Partition::make(frame, blocks);
}

json mass_to_json(const MassFunction& m) {
  json out = json::array();
  for (const auto& f : m.focal()) {
    out.push_back({{"subset", subset_to_json(Subset(m.frame(), f.subset))}, {"mass", round_significant(f.mass)}});
  }
  return out;
}

MassFunction mass_from_json(const Frame& frame, const json& j) {
  if (!j.is_array()) {
    parse_error("a mass function must be an array of {subset, mass} entries");
  }
  std::vector<FocalElement> focal;
  for (const auto& e : j) {
    focal.push_back({subset_from_json(frame, field(e, "subset")).bits(), number(field(e, "mass"), "mass")});
  }
  return MassFunction(frame, focal);
}

json block_set_to_json(Mask blocks, const Partition& p) {
  json out = json::array();
  for_each_bit(blocks, [&](std::size_t b) { out.push_back(subset_to_json(p.block(b))); });
  return out;
}

Mask block_set_from_json(const json& j, const Partition& p) {
  if (!j.is_array()) {
    parse_error("a block set must be an array of blocks");
  }
  Mask out = 0;
  for (const auto& b : j) {
    const Mask bits = subset_from_json(p.frame(), b).bits();
    const Mask touched = p.touching(bits);
    if (bits == 0 || popcount(touched) != 1 || p.union_of(touched) != bits) {
      parse_error("block set entry is not a block of the node partition");
    }
    out |= touched;
  }
  return out;
}

json block_mass_to_json(const MassFunction& m, const Partition& p) {
  require_same_frame(m.frame(), p.coarse_frame(), "block mass output");
  json out = json::array();
  for (const auto& f : m.focal()) {
    out.push_back({{"blocks", block_set_to_json(f.subset, p)}, {"mass", round_significant(f.mass)}});
  }
  return out;
}

MassFunction block_mass_from_json(const json& j, const Partition& p) {
  if (!j.is_array()) {
    parse_error("evidence mass must be an array of {blocks, mass} entries");
  }
  std::vector<FocalElement> focal;
  for (const auto& e : j) {
    focal.push_back({block_set_from_json(field(e, "blocks"), p), number(field(e, "mass"), "mass")});
  }
  return MassFunction(p.coarse_frame(), focal);
}

std::vector<EvidenceItem> evidence_from_json(const json& j, const Network& net) {
  std::vector<EvidenceItem> out;
  auto one = [&](const json& e) {
    const json& node = field(e, "node");
    if (!node.is_string()) {
      parse_error("evidence node must be a string");
    }
    const auto id = node.get<std::string>();
    out.push_back({id, block_mass_from_json(field(e, "mass"), net.partition(id))});
  };
  if (j.is_array()) {
    for (const auto& e : j) {
      one(e);
    }
  } else {
    one(j);
  }
  return out;
}

json evidence_to_json(const EvidenceItem& item, const Network& net) {
  return {{"node", item.node}, {"mass", block_mass_to_json(item.mass, net.partition(item.node))}};
}

ModelDocument model_from_json(const json& j) {
  if (!j.is_object()) {
    parse_error("a model must be a JSON object");
  }
  int version = kModelSchemaVersion;
  if (j.contains("schema_version")) {
    const auto& v = j.at("schema_version");
    if (!v.is_number_integer() || v.get<int>() != kModelSchemaVersion) {
      parse_error("unsupported schema_version");
    }
    version = v.get<int>();
  }
  const Frame frame = frame_from_json(field(j, "frame"));
  const json& nodes = field(j, "nodes");
  if (!nodes.is_object()) {
    parse_error("'nodes' must map node ids to partitions");
  }
  std::vector<NodeSpec> specs;
  for (const auto& [id, part] : nodes.items()) {
    specs.push_back({id, partition_from_json(frame, part)});
  }
  std::vector<std::pair<NodeId, NodeId>> edges;
  const json& edge_list = field(j, "edges");
  if (!edge_list.is_array()) {
    parse_error("'edges' must be an array of [id, id] pairs");
  }
  for (const auto& e : edge_list) {
    const auto pair = string_array(e, "edge");
    if (pair.size() != 2) {
      parse_error("an edge must name exactly two nodes");
    }
    edges.emplace_back(pair[0], pair[1]);
  }
  ModelDocument doc{version, Network::build(frame, std::move(specs), edges), {}};
  if (j.contains("evidence")) {
    doc.evidence = evidence_from_json(j.at("evidence"), doc.network);
  }
  return doc;
}

json model_to_json(const ModelDocument& doc) {
  const Network& net = doc.network;
  json nodes = json::object();
  for (std::size_t i = 0; i < net.node_count(); ++i) {
    nodes[net.id(i)] = partition_to_json(net.partition(i));
  }
  json edges = json::array();
  for (const auto& e : net.edges()) {
    edges.push_back({net.id(e.first), net.id(e.second)});
  }
  json out = {{"schema_version", doc.schema_version},
              {"frame", frame_to_json(net.frame())},
              {"nodes", nodes},
              {"edges", edges}};
  if (!doc.evidence.empty()) {
    json ev = json::array();
    for (const auto& item : doc.evidence) {
      ev.push_back(evidence_to_json(item, net));
    }
    out["evidence"] = ev;
  }
  return out;
}

json marginal_to_json(const Marginal& marginal, const Partition& p) {
  json out = {{"mass", block_mass_to_json(marginal.mass, p)}};
  if (p.block_count() <= kMaxBeliefTableBlocks) {
    json beliefs = json::array();
    const Mask all = full_mask(p.block_count());
    for (Mask b = 1; b <= all; ++b) {
      beliefs.push_back({{"blocks", block_set_to_json(b, p)}, {"bel", round_significant(marginal.mass.belief(b))}});
    }
    out["belief"] = beliefs;
  }
  return out;
}

std::string firing_log_to_jsonl(const FiringLog& log) {
  std::string out;
  for (const auto& e : log) {
    const json line = {{"seq", e.seq}, {"rule", e.rule}, {"from", e.from}, {"to", e.to}, {"stamps", e.stamps}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    parse_error("cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_error("'" + path + "': " + e.what());
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qmt::io
